#include "wristview/io/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "wristview/errors.hpp"

namespace wristview::io {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) throw ParseError(where, "unknown field '" + key + "'");
    }
}

SpcConfig spc_from_json(const json& j, const std::string& where) {
    reject_unknown(j, {"lambda_u", "lambda_depth", "normalization", "z_eps"}, where);
    SpcConfig cfg;
    cfg.lambda_u = j.value("lambda_u", cfg.lambda_u);
    cfg.lambda_depth = j.value("lambda_depth", cfg.lambda_depth);
    cfg.z_eps = j.value("z_eps", cfg.z_eps);
    const std::string norm = j.value("normalization", std::string("image_diagonal"));
    if (norm == "none") cfg.normalization = Normalization::none;
    else if (norm == "image_diagonal") cfg.normalization = Normalization::image_diagonal;
    else throw ParseError(where, "normalization must be 'none' or 'image_diagonal'");
    if (!(cfg.lambda_u >= 0.0) || !(cfg.lambda_depth >= 0.0) ||
        cfg.lambda_u + cfg.lambda_depth <= 0.0) {
        throw ParseError(where, "lambda_u, lambda_depth must be >= 0 with a positive sum");
    }
    return cfg;
}

json spc_to_json(const SpcConfig& cfg) {
    json j;
    j["lambda_u"] = cfg.lambda_u;
    j["lambda_depth"] = cfg.lambda_depth;
    j["normalization"] =
        cfg.normalization == Normalization::none ? "none" : "image_diagonal";
    j["z_eps"] = cfg.z_eps;
    return j;
}

SolverConfig solver_from_json(const json& j, const std::string& where) {
    reject_unknown(j,
                   {"max_iterations", "step_tolerance", "loss_tolerance", "initial_step",
                    "line_search", "n_starts", "seed"},
                   where);
    SolverConfig cfg;
    cfg.max_iterations = j.value("max_iterations", cfg.max_iterations);
    cfg.step_tolerance = j.value("step_tolerance", cfg.step_tolerance);
    cfg.loss_tolerance = j.value("loss_tolerance", cfg.loss_tolerance);
    cfg.initial_step = j.value("initial_step", cfg.initial_step);
    cfg.n_starts = j.value("n_starts", cfg.n_starts);
    cfg.seed = j.value("seed", cfg.seed);
    const std::string ls = j.value("line_search", std::string("backtracking"));
    if (ls == "backtracking") cfg.line_search = LineSearch::backtracking;
    else if (ls == "fixed") cfg.line_search = LineSearch::fixed;
    else throw ParseError(where, "line_search must be 'backtracking' or 'fixed'");
    if (cfg.max_iterations < 1 || cfg.step_tolerance <= 0.0 || cfg.loss_tolerance <= 0.0 ||
        cfg.n_starts < 1) {
        throw ParseError(where, "solver config violates its invariants");
    }
    return cfg;
}

json solver_to_json(const SolverConfig& cfg) {
    json j;
    j["max_iterations"] = cfg.max_iterations;
    j["step_tolerance"] = cfg.step_tolerance;
    j["loss_tolerance"] = cfg.loss_tolerance;
    j["initial_step"] = cfg.initial_step;
    j["line_search"] = cfg.line_search == LineSearch::fixed ? "fixed" : "backtracking";
    j["n_starts"] = cfg.n_starts;
    j["seed"] = cfg.seed;
    return j;
}

SplatConfig splat_from_json(const json& j, const std::string& where) {
    reject_unknown(j, {"radius_px", "depth_test_eps"}, where);
    SplatConfig cfg;
    cfg.radius_px = j.value("radius_px", cfg.radius_px);
    cfg.depth_test_eps = j.value("depth_test_eps", cfg.depth_test_eps);
    if (cfg.radius_px < 0 || cfg.radius_px > 16) {
        throw ParseError(where, "radius_px must be in [0, 16]");
    }
    return cfg;
}

json splat_to_json(const SplatConfig& cfg) {
    json j;
    j["radius_px"] = cfg.radius_px;
    j["depth_test_eps"] = cfg.depth_test_eps;
    return j;
}

SceneParams scene_from_json(const json& j, const std::string& where) {
    reject_unknown(j,
                   {"n_points", "scene_kind", "n_anchors", "trajectory_frames",
                    "trajectory_kind", "pixel_noise_sigma", "outlier_rate", "seed"},
                   where);
    SceneParams p;
    p.n_points = j.value("n_points", p.n_points);
    p.n_anchors = j.value("n_anchors", p.n_anchors);
    p.trajectory_frames = j.value("trajectory_frames", p.trajectory_frames);
    p.pixel_noise_sigma = j.value("pixel_noise_sigma", p.pixel_noise_sigma);
    p.outlier_rate = j.value("outlier_rate", p.outlier_rate);
    p.seed = j.value("seed", p.seed);
    const std::string kind = j.value("scene_kind", std::string("box_room"));
    if (kind == "box_room") p.scene_kind = SceneKind::box_room;
    else if (kind == "random_blobs") p.scene_kind = SceneKind::random_blobs;
    else if (kind == "planar") p.scene_kind = SceneKind::planar;
    else throw ParseError(where, "scene_kind must be box_room, random_blobs or planar");
    const std::string traj = j.value("trajectory_kind", std::string("arc"));
    if (traj == "arc") p.trajectory_kind = TrajectoryKind::arc;
    else if (traj == "spline") p.trajectory_kind = TrajectoryKind::spline;
    else if (traj == "static") p.trajectory_kind = TrajectoryKind::static_pose;
    else throw ParseError(where, "trajectory_kind must be arc, spline or static");
    if (p.n_points < 1 || p.n_anchors < 1 || p.trajectory_frames < 1 ||
        p.outlier_rate < 0.0 || p.outlier_rate >= 1.0 || p.pixel_noise_sigma < 0.0) {
        throw ParseError(where, "scene params violate their invariants");
    }
    return p;
}

json scene_to_json(const SceneParams& p) {
    json j;
    j["n_points"] = p.n_points;
    switch (p.scene_kind) {
        case SceneKind::box_room: j["scene_kind"] = "box_room"; break;
        case SceneKind::random_blobs: j["scene_kind"] = "random_blobs"; break;
        case SceneKind::planar: j["scene_kind"] = "planar"; break;
    }
    j["n_anchors"] = p.n_anchors;
    j["trajectory_frames"] = p.trajectory_frames;
    switch (p.trajectory_kind) {
        case TrajectoryKind::arc: j["trajectory_kind"] = "arc"; break;
        case TrajectoryKind::spline: j["trajectory_kind"] = "spline"; break;
        case TrajectoryKind::static_pose: j["trajectory_kind"] = "static"; break;
    }
    j["pixel_noise_sigma"] = p.pixel_noise_sigma;
    j["outlier_rate"] = p.outlier_rate;
    j["seed"] = p.seed;
    return j;
}

} // namespace

RunManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    const std::string pathstr = path.string();
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(pathstr + "@" + std::to_string(e.byte), e.what());
    }
    if (!doc.is_object()) throw ParseError(pathstr, "manifest must be a JSON object");
    reject_unknown(doc,
                   {"command", "inputs", "spc", "solver", "splat", "scene",
                    "correspondences_per_frame", "seed", "out"},
                   pathstr);

    RunManifest m;
    m.command = doc.value("command", std::string());
    if (doc.contains("inputs")) {
        if (!doc["inputs"].is_object()) throw ParseError(pathstr, "'inputs' must be an object");
        for (const auto& [key, value] : doc["inputs"].items()) {
            if (!value.is_string()) {
                throw ParseError(pathstr, "input '" + key + "' must be a string path");
            }
            m.inputs[key] = value.get<std::string>();
        }
    }
    if (doc.contains("spc")) m.spc = spc_from_json(doc["spc"], pathstr + " spc");
    if (doc.contains("solver")) m.solver = solver_from_json(doc["solver"], pathstr + " solver");
    if (doc.contains("splat")) m.splat = splat_from_json(doc["splat"], pathstr + " splat");
    if (doc.contains("scene")) m.scene = scene_from_json(doc["scene"], pathstr + " scene");
    m.correspondences_per_frame =
        doc.value("correspondences_per_frame", m.correspondences_per_frame);
    if (m.correspondences_per_frame < 1) {
        throw ParseError(pathstr, "correspondences_per_frame must be >= 1");
    }
    m.seed = doc.value("seed", m.seed);
    m.out_dir = doc.value("out", std::string());
    return m;
}

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    json doc;
    doc["command"] = manifest.command;
    json inputs = json::object();
    for (const auto& [key, value] : manifest.inputs) inputs[key] = value;
    doc["inputs"] = inputs;
    doc["spc"] = spc_to_json(manifest.spc);
    doc["solver"] = solver_to_json(manifest.solver);
    doc["splat"] = splat_to_json(manifest.splat);
    doc["scene"] = scene_to_json(manifest.scene);
    doc["correspondences_per_frame"] = manifest.correspondences_per_frame;
    doc["seed"] = manifest.seed;
    doc["out"] = manifest.out_dir;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

} // namespace wristview::io
