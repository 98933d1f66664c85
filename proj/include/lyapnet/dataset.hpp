#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lyapnet/rng.hpp"
#include "lyapnet/trajectory.hpp"

namespace lyapnet {

// Training corpus: n windows of warmup_len + target_len consecutive samples
// drawn from one trajectory. Each window is stored sample-major, so a
// window doubles as a column-major k x (warmup_len + target_len) matrix
// (one column per time step).
struct Dataset {
    uint32_t k = 0;
    uint32_t warmup_len = 0;
    uint32_t target_len = 0;
    double dt = 0.0;
    std::optional<RescaleRecord> rescale;
    std::vector<double> windows;

    uint32_t window_len() const { return warmup_len + target_len; }
    uint64_t size() const {
        const uint64_t w = static_cast<uint64_t>(window_len()) * k;
        return w ? windows.size() / w : 0;
    }
    const double* window(uint64_t i) const {
        return windows.data() + i * static_cast<uint64_t>(window_len()) * k;
    }
    const double* warmup_seg(uint64_t i) const { return window(i); }
    const double* target_seg(uint64_t i) const {
        return window(i) + static_cast<uint64_t>(warmup_len) * k;
    }

    Eigen::Map<const Mat> window_mat(uint64_t i) const {
        return {window(i), k, window_len()};
    }
};

// Draws n_seq windows at uniformly random start offsets, with replacement.
// Throws TrajectoryTooShort when the trajectory cannot fit one window.
Dataset make_dataset(const Trajectory& traj, uint64_t n_seq,
                     uint32_t warmup_len, uint32_t target_len, RngStream& rng);

}  // namespace lyapnet
