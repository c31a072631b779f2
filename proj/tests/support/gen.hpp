#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "plccov/ast.hpp"

// Random-program generator for property tests. Emits source text that always
// parses, resolves and terminates: loops are counter-bounded, divisions only
// by non-zero literals, the call graph is a DAG.
namespace gen {

struct GenConfig {
    int max_functions = 2;
    int max_fbs = 3;
    bool with_sfc = true;
    bool second_task = true;
    int max_top_stmts = 6;
    int max_depth = 2;
};

struct Generated {
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<plccov::TaskDecl> tasks;
    std::vector<std::pair<std::string, plccov::DataType>> image_inputs;
    std::vector<std::pair<std::string, plccov::DataType>> image_outputs;
};

Generated random_project(uint32_t seed, const GenConfig& cfg);

// One cycle worth of random stimulus for the project's image inputs.
std::map<std::string, plccov::Const> random_inputs(const Generated& g, std::mt19937& rng);

} // namespace gen
