#pragma once

#include <cstdint>
#include <vector>

#include "wristview/spc.hpp"

namespace wristview {

enum class LineSearch { backtracking, fixed };

struct SolverConfig {
    int max_iterations = 500;
    double step_tolerance = 1e-10;
    double loss_tolerance = 1e-12;
    double initial_step = 0.25;
    LineSearch line_search = LineSearch::backtracking;
    int n_starts = 4;
    std::uint64_t seed = 0;
};

struct PoseEstimate {
    PoseSE3 pose;
    SpcBreakdown final_loss;
    int iterations = 0;
    bool converged = false;
    int start_index = 0;
};

// Direct Linear Transform pose from >= 6 tracks: least-squares [R|T] on
// K-normalized rays with Hartley normalization of the 3D points, rotation
// snapped to SO(3) by its polar factor. Depth signs are not guaranteed.
// Throws DegenerateConfiguration when the design matrix loses rank
// (relative singular value below 1e-8).
PoseSE3 linear_init(const std::vector<Track>& tracks, const Intrinsics& K);

// One accepted iterate, for traces.
struct SolverStep {
    PoseSE3 pose;
    SpcBreakdown loss;
};

// Minimizes l_proj by descent on the pose tangent: pose <- exp(-a*g)*pose,
// rotation re-orthonormalized each step. Backtracking line search is Armijo
// (c=1e-4, shrink 0.5) started from a Barzilai-Borwein trial step, so
// accepted loss values never increase. Returns the best iterate visited.
// `trace`, when given, receives the initial state and every accepted step.
PoseEstimate solve_wrist_pose(const std::vector<Track>& tracks, const Intrinsics& K,
                              const SpcConfig& spc_cfg, const SolverConfig& solver_cfg,
                              const PoseSE3& init, std::vector<SolverStep>* trace = nullptr);

// Runs solve_wrist_pose from linear_init (when available) plus
// n_starts-1 seeded random poses; returns the lowest-l_proj estimate,
// ties broken by start index. Starts are independent, so the result is
// the same at any thread count.
PoseEstimate multi_start(const std::vector<Track>& tracks, const Intrinsics& K,
                         const SpcConfig& spc_cfg, const SolverConfig& solver_cfg,
                         int threads = 1);

} // namespace wristview
