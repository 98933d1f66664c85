#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>

#include "doctest.h"
#include "lyapnet/ensemble.hpp"
#include "lyapnet/errors.hpp"
#include "lyapnet/lyapunov.hpp"
#include "lyapnet/ode.hpp"
#include "oracles.hpp"

using namespace lyapnet;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Trajectory lorenz_rescaled(uint64_t n_steps, uint64_t seed) {
    SimConfig cfg;
    cfg.dt_integrate = 1e-3;
    cfg.n_steps = n_steps;
    cfg.skip = 1000;
    cfg.subsample_stride = 20;
    cfg.randomize_initial = true;
    cfg.box_lo = Vec(3);
    cfg.box_hi = Vec(3);
    cfg.box_lo << -15.0, -20.0, 5.0;
    cfg.box_hi << 15.0, 20.0, 40.0;
    cfg.seed = seed;
    return rescale_to_unit_cube(simulate(lorenz(), cfg));
}

}  // namespace

TEST_CASE("kaplan_yorke: tagged examples") {
    CHECK(kaplan_yorke({0.90, -0.006, -14.57}) ==
          doctest::Approx(2.0 + 0.894 / 14.57).epsilon(1e-12));
    CHECK(kaplan_yorke({-1.0, -2.0}) == 0.0);
    CHECK(kaplan_yorke({0.5, 0.3, -1.0}) == doctest::Approx(2.8));
}

TEST_CASE("kaplan_yorke: saturation and error paths") {
    bool saturated = false;
    CHECK(kaplan_yorke({0.5, 0.4, 0.1}, &saturated) == 3.0);
    CHECK(saturated);
    CHECK_THROWS_AS(kaplan_yorke({}), EmptySpectrum);

    // -inf trailing exponents are permitted
    CHECK(kaplan_yorke({0.9, -kInf}) == 1.0);
}

TEST_CASE("kaplan_yorke is invariant under time rescaling") {
    RngStream rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> spec(4);
        spec[0] = rng.uniform(0.0, 2.0);
        spec[1] = rng.uniform(-0.5, 0.5);
        spec[2] = rng.uniform(-2.0, -0.5);
        spec[3] = rng.uniform(-20.0, -2.0);
        std::sort(spec.begin(), spec.end(), std::greater<>());
        const double base = kaplan_yorke(spec);
        for (double c : {0.02, 1.0, 50.0}) {
            std::vector<double> scaled = spec;
            for (auto& v : scaled) v *= c;
            CHECK(kaplan_yorke(scaled) == doctest::Approx(base).epsilon(1e-12));
        }
    }
}

TEST_CASE("kaplan_yorke: raising lambda_1 never lowers the dimension") {
    std::vector<double> spec = {0.2, -0.1, -1.0, -5.0};
    double prev = kaplan_yorke(spec);
    for (double l1 : {0.3, 0.5, 0.9, 1.4}) {
        spec[0] = l1;
        const double d = kaplan_yorke(spec);
        CHECK(d >= prev - 1e-15);
        prev = d;
    }
}

TEST_CASE("classify_attractor: rule table") {
    CHECK(classify_attractor({-0.5, -1.2}, false) ==
          AttractorClass::FixedPoint);
    CHECK(classify_attractor({0.001, -0.8}, false, 0.02) ==
          AttractorClass::LimitCycle);
    CHECK(classify_attractor({0.5, -0.8}, false) == AttractorClass::Strange);
    CHECK(classify_attractor({0.001, 0.0005}, false) ==
          AttractorClass::Strange);
    CHECK(classify_attractor({0.5}, true) == AttractorClass::Divergent);
    // single near-zero exponent: missing lambda_2 counts as -inf
    CHECK(classify_attractor({0.0}, false) == AttractorClass::LimitCycle);
}

TEST_CASE("rnn_lyapunov_spectrum: pure leak contracts at log(1-alpha)") {
    RngStream rng(41);
    RnnParams p = spectral_init(10, 2, 1.2, 0.5, rng);
    p.w.setZero();
    p.w_in.setZero();
    p.b.setZero();

    SpectrumConfig cfg;
    cfg.n_steps = 400;
    cfg.transient = 50;
    Vec h0 = Vec::Constant(10, 0.3);
    auto rep = rnn_lyapunov_spectrum(p, h0, cfg);
    for (double v : rep.spectrum)
        CHECK(v == doctest::Approx(std::log(0.5)).epsilon(1e-10));
    CHECK(rep.attractor_class == AttractorClass::FixedPoint);
    CHECK(rep.dl_dimension == 0.0);
}

TEST_CASE("rnn_lyapunov_spectrum: linear regime at the origin fixed point") {
    // W + W_in W_out = diag(1.5, 0.5) with b = 0, alpha = 1: at h = 0 the
    // tangent map is the diagonal matrix itself
    RnnParams p;
    p.d = 2;
    p.k = 1;
    p.alpha = 1.0;
    p.w = Mat::Zero(2, 2);
    p.w(0, 0) = 1.5;
    p.w(1, 1) = 0.5;
    p.w_in = Mat::Zero(2, 1);
    p.w_out = Mat::Zero(1, 2);
    p.b = Vec::Zero(2);

    SpectrumConfig cfg;
    cfg.n_steps = 300;
    cfg.transient = 50;
    auto rep = rnn_lyapunov_spectrum(p, Vec::Zero(2), cfg);
    CHECK(rep.spectrum[0] == doctest::Approx(std::log(1.5)).epsilon(1e-12));
    CHECK(rep.spectrum[1] == doctest::Approx(std::log(0.5)).epsilon(1e-12));

    // with dt supplied the exponents convert to per-time units
    cfg.dt = 0.02;
    auto rep_t = rnn_lyapunov_spectrum(p, Vec::Zero(2), cfg);
    CHECK(rep_t.spectrum[0] ==
          doctest::Approx(std::log(1.5) / 0.02).epsilon(1e-12));
}

TEST_CASE("rnn_lyapunov_spectrum: contractive machine is a fixed point") {
    RngStream rng(43);
    RnnParams p = spectral_init(12, 2, 0.4, 0.3, rng);  // radius well below 1
    p.w_out *= 0.1;
    SpectrumConfig cfg;
    cfg.n_steps = 600;
    cfg.transient = 100;
    auto rep = rnn_lyapunov_spectrum(p, Vec::Constant(12, 0.2), cfg);
    CHECK(rep.spectrum[0] < 0.0);
    CHECK(rep.attractor_class == AttractorClass::FixedPoint);
}

TEST_CASE("rnn_lyapunov_spectrum: frame choice shifts exponents < 1e-3") {
    RngStream rng(44);
    RnnParams p = spectral_init(24, 3, 1.25, 1.0, rng);
    SpectrumConfig a;
    a.n_steps = 1600;
    a.transient = 100;
    a.frame_seed = 1;
    SpectrumConfig b = a;
    b.frame_seed = 999;
    Vec h0 = Vec::Constant(24, 0.1);
    auto ra = rnn_lyapunov_spectrum(p, h0, a);
    auto rb = rnn_lyapunov_spectrum(p, h0, b);
    REQUIRE(ra.spectrum.size() == rb.spectrum.size());
    for (size_t i = 0; i < ra.spectrum.size(); ++i)
        CHECK(std::abs(ra.spectrum[i] - rb.spectrum[i]) < 1e-3);
}

TEST_CASE("rnn_lyapunov_spectrum: top-m frame tracks the leading exponents") {
    RngStream rng(45);
    RnnParams p = spectral_init(80, 3, 1.3, 1.0, rng);
    Vec h0 = Vec::Constant(80, 0.05);

    SpectrumConfig full;
    full.n_steps = 800;
    full.transient = 100;
    full.top_m = 80;
    full.frame_seed = 3;
    SpectrumConfig top;
    top.n_steps = 800;
    top.transient = 100;
    top.top_m = 6;
    top.frame_seed = 3;

    auto rf = rnn_lyapunov_spectrum(p, h0, full);
    auto rt = rnn_lyapunov_spectrum(p, h0, top);
    REQUIRE(rt.spectrum.size() == 6);
    for (int i = 0; i < 6; ++i)
        CHECK(std::abs(rf.spectrum[i] - rt.spectrum[i]) < 2e-3);

    // default frame sizing: full for small d, leading 16 above 64
    SpectrumConfig def;
    CHECK(def.frame_columns(32) == 32);
    CHECK(def.frame_columns(200) == 16);
}

TEST_CASE("prediction_error_curve: identical, offset and mismatched input") {
    Mat truth = Mat::Random(3, 40);
    auto same = prediction_error_curve(truth, truth, 0.2);
    CHECK(same.valid_horizon == 40);
    for (double v : same.rmse) CHECK(v == 0.0);

    Mat offset = truth;
    offset.array() += 0.05;
    auto shifted = prediction_error_curve(truth, offset, 0.2);
    for (double v : shifted.rmse) CHECK(v == doctest::Approx(0.05));
    CHECK(shifted.valid_horizon == 40);

    auto tight = prediction_error_curve(truth, offset, 0.04);
    CHECK(tight.valid_horizon == 0);

    Mat wrong = Mat::Zero(3, 39);
    CHECK_THROWS_AS(prediction_error_curve(truth, wrong, 0.2),
                    LengthMismatch);
}

TEST_CASE("ensemble: single fitted machine wraps one report") {
    Trajectory traj = lorenz_rescaled(140000, 7);

    EnsembleConfig cfg;
    cfg.mode = EnsembleMode::Fit;
    cfg.machines = 1;
    cfg.traj_per_machine = 1;
    cfg.fit_cfg.d = 60;
    cfg.fit_cfg.fit_len = 2000;
    cfg.fit_cfg.warmup_len = 60;
    cfg.spectrum.n_steps = 700;
    cfg.spectrum.transient = 100;
    cfg.spectrum.dt = 0.02;
    cfg.seed = 31;

    EnsembleReport rep = run_ensemble(traj, cfg);
    REQUIRE(rep.members.size() == 1);
    CHECK(rep.members[0].ok);
    uint64_t hist_sum = 0;
    for (uint64_t c : rep.histogram) hist_sum += c;
    CHECK(hist_sum == 1 - rep.aborted);
}

TEST_CASE("ensemble: bookkeeping identity and determinism") {
    Trajectory traj = lorenz_rescaled(120000, 8);

    EnsembleConfig cfg;
    cfg.mode = EnsembleMode::Fit;
    cfg.machines = 3;
    cfg.traj_per_machine = 2;
    cfg.fit_cfg.d = 40;
    cfg.fit_cfg.fit_len = 1500;
    cfg.fit_cfg.warmup_len = 50;
    cfg.spectrum.n_steps = 500;
    cfg.spectrum.transient = 80;
    cfg.spectrum.dt = 0.02;
    cfg.seed = 77;
    cfg.jobs = 2;

    EnsembleReport rep = run_ensemble(traj, cfg);
    REQUIRE(rep.members.size() == 6);
    uint64_t hist_sum = 0;
    for (uint64_t c : rep.histogram) hist_sum += c;
    CHECK(hist_sum == 6 - rep.aborted);

    uint64_t tallies = 0, failed = 0;
    for (int c = 0; c < 4; ++c) tallies += rep.class_tally[c];
    for (const auto& m : rep.members)
        if (!m.ok) ++failed;
    CHECK(tallies + failed == 6);  // every completed member lands in a class

    // deterministic under (seed, config), independent of worker count
    EnsembleConfig serial = cfg;
    serial.jobs = 1;
    EnsembleReport rep2 = run_ensemble(traj, serial);
    REQUIRE(rep2.members.size() == rep.members.size());
    for (size_t i = 0; i < rep.members.size(); ++i) {
        CHECK(rep.members[i].ok == rep2.members[i].ok);
        if (rep.members[i].ok)
            CHECK(rep.members[i].report.dl_dimension ==
                  rep2.members[i].report.dl_dimension);
    }
}
