#pragma once

#include <cstdint>

#include "lyapnet/rnn.hpp"
#include "lyapnet/trajectory.hpp"

namespace lyapnet {

struct FitConfig {
    uint32_t d = 300;
    double alpha = 0.3;
    double rho0 = 1.2;
    double epsilon = 1e-6;
    uint64_t fit_len = 4000;
    uint32_t warmup_len = 100;
    uint64_t seed = 0;
    uint64_t offset = 0;  // first trajectory sample to use

    void validate() const;  // throws Config
};

// Reservoir-computing fit: W, W_in, b are frozen at their spectral
// initialization; the reservoir is driven with the ground-truth signal,
// the post-warmup hidden states are stacked into H (one column per step)
// and the readout is the ridge solution of W_out H = U, where column t of
// U is the sample one step ahead of the input that produced column t of H.
// Only W_out differs from the initialization in the returned parameters.
RnnParams rc_fit(const Trajectory& traj, const FitConfig& cfg);

}  // namespace lyapnet
