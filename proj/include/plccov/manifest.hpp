#pragma once

#include <string>
#include <vector>

#include "plccov/ast.hpp"

namespace plccov {

// Declarative project manifest: [sources] file list, one [task] section per
// task, [options]. Paths are resolved relative to the manifest's directory.
struct ProjectManifest {
    std::string name = "project";
    std::string base_dir;
    std::vector<std::string> source_files; // as written (relative)
    std::vector<TaskDecl> tasks;
    std::string out_dir = "out";
    bool no_reinit = false;
    bool interactive_manual = false;
};

ProjectManifest parse_manifest(const std::string& text, const std::string& base_dir);
ProjectManifest load_manifest(const std::string& path);
std::string manifest_text(const ProjectManifest& m);

// Reads and parses the manifest's sources into a resolved project.
SourceProject load_project(const ProjectManifest& m);

} // namespace plccov
