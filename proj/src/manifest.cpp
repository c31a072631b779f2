#include "plccov/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "plccov/errors.hpp"
#include "plccov/parser.hpp"

namespace plccov {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConsistencyError("manifest: bad boolean for " + key + ": '" + v + "'");
}

} // namespace

ProjectManifest parse_manifest(const std::string& text, const std::string& base_dir) {
    ProjectManifest m;
    m.base_dir = base_dir;
    std::string section;
    TaskDecl task;
    bool in_task = false;
    auto flush_task = [&]() {
        if (!in_task) return;
        if (task.name.empty() || task.entry_pou.empty() || task.cycle_ms <= 0)
            throw ConsistencyError("manifest: incomplete [task] section");
        m.tasks.push_back(task);
        task = {};
        in_task = false;
    };

    std::istringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            flush_task();
            section = t.substr(1, t.size() - 2);
            if (section == "task") {
                in_task = true;
                task = {};
                task.priority = static_cast<int>(m.tasks.size()) + 1;
            } else if (section != "project" && section != "sources" && section != "options") {
                throw ConsistencyError("manifest line " + std::to_string(lineno) +
                                       ": unknown section [" + section + "]");
            }
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConsistencyError("manifest line " + std::to_string(lineno) +
                                   ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (section == "project") {
            if (key == "name") m.name = value;
            else if (key == "out") m.out_dir = value;
            else throw ConsistencyError("manifest: unknown project key '" + key + "'");
        } else if (section == "sources") {
            if (key != "file")
                throw ConsistencyError("manifest: unknown sources key '" + key + "'");
            m.source_files.push_back(value);
        } else if (section == "task") {
            if (key == "name") task.name = value;
            else if (key == "cycle_ms") task.cycle_ms = std::stoll(value);
            else if (key == "priority") task.priority = std::stoi(value);
            else if (key == "program") task.entry_pou = value;
            else throw ConsistencyError("manifest: unknown task key '" + key + "'");
        } else if (section == "options") {
            if (key == "no_reinit") m.no_reinit = parse_bool(value, key);
            else if (key == "interactive_manual") m.interactive_manual = parse_bool(value, key);
            else throw ConsistencyError("manifest: unknown option '" + key + "'");
        } else {
            throw ConsistencyError("manifest line " + std::to_string(lineno) +
                                   ": key outside of a section");
        }
    }
    flush_task();
    if (m.source_files.empty()) throw ConsistencyError("manifest lists no source files");
    if (m.tasks.empty()) throw ConsistencyError("manifest declares no tasks");
    return m;
}

ProjectManifest load_manifest(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConsistencyError("cannot read manifest: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_manifest(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string manifest_text(const ProjectManifest& m) {
    std::string out = "[project]\nname = " + m.name + "\nout = " + m.out_dir + "\n\n[sources]\n";
    for (const std::string& f : m.source_files) out += "file = " + f + "\n";
    for (const TaskDecl& t : m.tasks) {
        out += "\n[task]\nname = " + t.name + "\ncycle_ms = " + std::to_string(t.cycle_ms) +
               "\npriority = " + std::to_string(t.priority) + "\nprogram = " + t.entry_pou + "\n";
    }
    out += "\n[options]\nno_reinit = " + std::string(m.no_reinit ? "true" : "false") +
           "\ninteractive_manual = " + std::string(m.interactive_manual ? "true" : "false") +
           "\n";
    return out;
}

SourceProject load_project(const ProjectManifest& m) {
    std::vector<std::pair<std::string, std::string>> sources;
    for (const std::string& rel : m.source_files) {
        std::filesystem::path p = std::filesystem::path(m.base_dir) / rel;
        std::ifstream f(p, std::ios::binary);
        if (!f) throw ConsistencyError("manifest references missing file: " + p.string());
        std::stringstream ss;
        ss << f.rdbuf();
        sources.emplace_back(rel, ss.str());
    }
    return parse_project(sources, m.tasks);
}

} // namespace plccov
