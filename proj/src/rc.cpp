#include "lyapnet/rc.hpp"

#include <iostream>

#include "lyapnet/errors.hpp"
#include "lyapnet/linalg.hpp"

namespace lyapnet {

void FitConfig::validate() const {
    if (d == 0) throw Config("fit: d must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Config("fit: alpha in (0,1]");
    if (!(rho0 > 0.0)) throw Config("fit: rho0 must be > 0");
    if (epsilon < 0.0) throw Config("fit: epsilon must be >= 0");
    if (fit_len < 1) throw Config("fit: fit_len must be >= 1");
    if (warmup_len < 1) throw Config("fit: warmup_len must be >= 1");
}

RnnParams rc_fit(const Trajectory& traj, const FitConfig& cfg) {
    cfg.validate();
    // need warmup + fit inputs plus one trailing sample for the last target
    const uint64_t needed = cfg.offset + cfg.warmup_len + cfg.fit_len + 1;
    if (traj.count() < needed)
        throw TrajectoryTooShort("rc_fit: trajectory has " +
                                 std::to_string(traj.count()) +
                                 " samples, need " + std::to_string(needed));
    if (cfg.fit_len <= cfg.d)
        std::cerr << "lyapnet: warning: fit_len (" << cfg.fit_len
                  << ") <= reservoir size (" << cfg.d
                  << "); the ridge system is underdetermined\n";

    RngStream rng(cfg.seed);
    RnnParams p = spectral_init(cfg.d, traj.dim, cfg.rho0, cfg.alpha, rng);

    Vec h = Vec::Zero(p.d);
    for (uint64_t t = 0; t < cfg.warmup_len; ++t) {
        const auto u = Eigen::Map<const Vec>(traj.state(cfg.offset + t), p.k);
        Vec pre = p.w * h + p.w_in * u + p.b;
        h = (1.0 - p.alpha) * h + p.alpha * pre.array().tanh().matrix();
    }

    Mat states(p.d, static_cast<Eigen::Index>(cfg.fit_len));
    Mat targets(p.k, static_cast<Eigen::Index>(cfg.fit_len));
    for (uint64_t j = 0; j < cfg.fit_len; ++j) {
        const uint64_t t = cfg.offset + cfg.warmup_len + j;
        const auto u = Eigen::Map<const Vec>(traj.state(t), p.k);
        Vec pre = p.w * h + p.w_in * u + p.b;
        h = (1.0 - p.alpha) * h + p.alpha * pre.array().tanh().matrix();
        states.col(static_cast<Eigen::Index>(j)) = h;
        targets.col(static_cast<Eigen::Index>(j)) =
            Eigen::Map<const Vec>(traj.state(t + 1), p.k);
    }
    require_finite(states, "rc_fit reservoir states");

    p.w_out = ridge_solve(states, targets, cfg.epsilon);
    return p;
}

}  // namespace lyapnet
