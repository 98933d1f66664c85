#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lyapnet/lyapunov.hpp"
#include "lyapnet/rc.hpp"
#include "lyapnet/train.hpp"
#include "lyapnet/trajectory.hpp"

namespace lyapnet {

enum class EnsembleMode : uint32_t { Train = 0, Fit = 1 };

// Fixed histogram binning so runs are comparable: [0, 6) in steps of 0.1.
inline constexpr uint32_t kHistogramBins = 60;
inline constexpr double kHistogramLo = 0.0;
inline constexpr double kHistogramStep = 0.1;

struct EnsembleConfig {
    EnsembleMode mode = EnsembleMode::Fit;
    uint32_t machines = 1;           // M
    uint32_t traj_per_machine = 1;   // R
    TrainConfig train_cfg;
    FitConfig fit_cfg;
    // dataset construction (train mode)
    uint64_t n_seq = 2000;
    uint32_t warmup_len = 100;
    uint32_t target_len = 120;
    // per-run measurement
    SpectrumConfig spectrum;
    uint32_t run_warmup_len = 100;  // truth window driven before each run
    uint64_t seed = 0;
    uint32_t jobs = 1;

    void validate() const;  // throws Config
};

struct EnsembleMember {
    uint32_t machine = 0;
    uint32_t run = 0;
    uint64_t machine_seed = 0;
    uint64_t run_seed = 0;
    bool ok = false;
    std::string error;  // set when the run aborted
    LyapunovReport report;
};

struct EnsembleReport {
    std::vector<EnsembleMember> members;  // machine-major order
    std::array<uint64_t, kHistogramBins> histogram{};
    uint64_t class_tally[4] = {0, 0, 0, 0};  // indexed by AttractorClass
    uint64_t aborted = 0;
};

// Trains or fits `machines` independent machines with derived seeds, then
// measures traj_per_machine Lyapunov runs per machine, each warmed up on a
// random truth window of the trajectory. Members are computed possibly in
// parallel (cfg.jobs) but aggregated in deterministic order; failures are
// recorded per member, never dropped.
EnsembleReport run_ensemble(const Trajectory& traj, const EnsembleConfig& cfg);

}  // namespace lyapnet
