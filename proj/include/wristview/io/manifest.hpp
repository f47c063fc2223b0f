#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "wristview/oracle.hpp"
#include "wristview/render.hpp"
#include "wristview/solver.hpp"
#include "wristview/spc.hpp"

namespace wristview::io {

// Everything a run needs, minus the thread count (threads never change
// results, so they stay a command-line concern). Re-running an identical
// manifest reproduces the output tree byte for byte.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> inputs; // named input paths
    SpcConfig spc;
    SolverConfig solver;
    SplatConfig splat;
    SceneParams scene;
    int correspondences_per_frame = 1000;
    std::uint64_t seed = 0;
    std::string out_dir;
};

RunManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);

} // namespace wristview::io
