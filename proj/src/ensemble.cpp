#include "lyapnet/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "lyapnet/errors.hpp"

namespace lyapnet {

void EnsembleConfig::validate() const {
    if (machines < 1 || traj_per_machine < 1)
        throw Config("ensemble: machines and traj_per_machine must be >= 1");
    if (run_warmup_len < 1) throw Config("ensemble: run_warmup_len >= 1");
    if (jobs < 1) throw Config("ensemble: jobs must be >= 1");
    spectrum.validate();
    if (mode == EnsembleMode::Train) {
        if (n_seq < 1 || warmup_len < 1 || target_len < 1)
            throw Config("ensemble: dataset spec must be positive");
        train_cfg.validate(n_seq);
    } else {
        fit_cfg.validate();
    }
}

namespace {

RnnParams build_machine(const Trajectory& traj, const EnsembleConfig& cfg,
                        uint64_t machine_seed) {
    if (cfg.mode == EnsembleMode::Fit) {
        FitConfig fc = cfg.fit_cfg;
        fc.seed = machine_seed;
        return rc_fit(traj, fc);
    }
    RngStream ds_rng(RngStream::derive(cfg.seed, 2));
    Dataset ds =
        make_dataset(traj, cfg.n_seq, cfg.warmup_len, cfg.target_len, ds_rng);
    TrainConfig tc = cfg.train_cfg;
    tc.seed = machine_seed;
    auto [params, report] = train(ds, tc);
    if (report.aborted)
        throw NumericalBlowup("ensemble: training aborted: " +
                              report.abort_reason);
    return params;
}

void measure_runs(const Trajectory& traj, const EnsembleConfig& cfg,
                  const RnnParams& params, uint32_t machine,
                  uint64_t machine_seed, std::vector<EnsembleMember>& out) {
    for (uint32_t r = 0; r < cfg.traj_per_machine; ++r) {
        EnsembleMember& member = out[machine * cfg.traj_per_machine + r];
        member.machine = machine;
        member.run = r;
        member.machine_seed = machine_seed;
        member.run_seed = RngStream::derive(machine_seed, 500 + r);
        try {
            RngStream run_rng(member.run_seed);
            const uint64_t span = traj.count() - cfg.run_warmup_len;
            const uint64_t off = run_rng.uniform_index(span + 1);
            Eigen::Map<const Mat> window(traj.state(off), traj.dim,
                                         cfg.run_warmup_len);
            Vec h0 = warmup(params, Mat(window));

            SpectrumConfig sc = cfg.spectrum;
            sc.frame_seed = member.run_seed;
            member.report = rnn_lyapunov_spectrum(params, h0, sc);
            member.ok = true;
        } catch (const Error& e) {
            member.ok = false;
            member.error = e.what();
        }
    }
}

}  // namespace

EnsembleReport run_ensemble(const Trajectory& traj,
                            const EnsembleConfig& cfg) {
    cfg.validate();
    if (traj.count() < cfg.run_warmup_len + 1)
        throw TrajectoryTooShort("ensemble: trajectory shorter than warmup");

    EnsembleReport rep;
    rep.members.resize(static_cast<size_t>(cfg.machines) *
                       cfg.traj_per_machine);

    std::atomic<uint32_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const uint32_t m = next.fetch_add(1);
            if (m >= cfg.machines) return;
            const uint64_t machine_seed = RngStream::derive(cfg.seed, 100 + m);
            try {
                RnnParams params = build_machine(traj, cfg, machine_seed);
                measure_runs(traj, cfg, params, m, machine_seed, rep.members);
            } catch (const Error& e) {
                for (uint32_t r = 0; r < cfg.traj_per_machine; ++r) {
                    EnsembleMember& member =
                        rep.members[m * cfg.traj_per_machine + r];
                    member.machine = m;
                    member.run = r;
                    member.machine_seed = machine_seed;
                    member.ok = false;
                    member.error = e.what();
                }
            }
        }
    };

    const uint32_t n_workers = std::min(cfg.jobs, cfg.machines);
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (uint32_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // ordered, deterministic aggregation
    for (const EnsembleMember& member : rep.members) {
        if (!member.ok || member.report.diverged) {
            ++rep.aborted;
            if (member.ok)
                ++rep.class_tally[static_cast<size_t>(
                    AttractorClass::Divergent)];
            continue;
        }
        ++rep.class_tally[static_cast<size_t>(member.report.attractor_class)];
        double dl = member.report.dl_dimension;
        if (!std::isfinite(dl)) dl = 0.0;
        const double hi =
            kHistogramLo + kHistogramStep * static_cast<double>(kHistogramBins);
        dl = std::min(std::max(dl, kHistogramLo), hi - 1e-12);
        const auto bin = static_cast<size_t>((dl - kHistogramLo) / kHistogramStep);
        ++rep.histogram[std::min<size_t>(bin, kHistogramBins - 1)];
    }
    return rep;
}

}  // namespace lyapnet
