#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "lyapnet/errors.hpp"
#include "lyapnet/lyapunov.hpp"
#include "lyapnet/ode.hpp"
#include "lyapnet/trajectory.hpp"
#include "oracles.hpp"

using namespace lyapnet;

namespace {

Vec drift_of(const OdeSystem& sys, const Vec& x) {
    Vec out(sys.dim);
    sys.drift(x.data(), out.data());
    return out;
}

SimConfig lorenz_sim(uint64_t n_steps, uint64_t skip = 1000,
                     uint32_t stride = 20, uint64_t seed = 0) {
    SimConfig cfg;
    cfg.dt_integrate = 1e-3;
    cfg.n_steps = n_steps;
    cfg.skip = skip;
    cfg.subsample_stride = stride;
    cfg.randomize_initial = true;
    cfg.box_lo = Vec(3);
    cfg.box_hi = Vec(3);
    cfg.box_lo << -15.0, -20.0, 5.0;
    cfg.box_hi << 15.0, 20.0, 40.0;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("lorenz drift: origin and the C+ equilibrium are fixed points") {
    OdeSystem sys = lorenz();
    CHECK(drift_of(sys, Vec::Zero(3)).norm() == 0.0);

    const double c = std::sqrt(72.0);  // sqrt(beta (rho-1))
    Vec fp(3);
    fp << c, c, 27.0;
    CHECK(drift_of(sys, fp).norm() < 1e-12);
}

TEST_CASE("lorenz jacobian: trace is constant -(sigma+1+beta)") {
    OdeSystem sys = lorenz();
    RngStream rng(4);
    for (int rep = 0; rep < 5; ++rep) {
        Vec x(3);
        x << rng.uniform(-20, 20), rng.uniform(-25, 25), rng.uniform(0, 50);
        const double trace = ode_jacobian(sys, x.data()).trace();
        CHECK(trace == doctest::Approx(-41.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("analytic jacobians match finite differences on shipped systems") {
    RngStream rng(8);
    for (const OdeSystem& sys : {lorenz(), rossler4()}) {
        for (int rep = 0; rep < 8; ++rep) {
            Vec x(sys.dim);
            for (uint32_t i = 0; i < sys.dim; ++i) x[i] = rng.uniform(-8, 8);
            Mat analytic = ode_jacobian(sys, x.data());
            Mat fd = oracles::fd_jacobian(
                [&](const Vec& v) { return drift_of(sys, v); }, x, 1e-6);
            CHECK(oracles::rel_frobenius(analytic, fd) < 1e-5);
        }
    }
}

TEST_CASE("custom_ode without jacobian falls back to finite differences") {
    auto sys = custom_ode(
        2, [](const double* x, double* d) {
            d[0] = x[1];
            d[1] = -std::sin(x[0]);
        },
        nullptr, "pendulum");
    Vec x(2);
    x << 0.3, -0.2;
    Mat j = ode_jacobian(sys, x.data());
    CHECK(j(0, 1) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(j(1, 0) == doctest::Approx(-std::cos(0.3)).epsilon(1e-7));
}

TEST_CASE("rk4_step: exponential decay to 1e-7") {
    auto sys = custom_ode(
        1, [](const double* x, double* d) { d[0] = -x[0]; }, nullptr, "decay");
    Vec x = Vec::Ones(1);
    Vec next = rk4_step(sys, x, 0.1);
    CHECK(std::abs(next[0] - std::exp(-0.1)) < 1e-7);
    CHECK(next[0] == doctest::Approx(0.9048375).epsilon(1e-7));
}

TEST_CASE("rk4_step: zero drift leaves the state untouched") {
    auto sys = custom_ode(
        3, [](const double*, double* d) { d[0] = d[1] = d[2] = 0.0; },
        nullptr, "still");
    Vec x(3);
    x << 1.0, -2.0, 3.0;
    CHECK(rk4_step(sys, x, 0.5) == x);
}

TEST_CASE("rk4_step: step-halving self-consistency on Lorenz") {
    OdeSystem sys = lorenz();
    Vec a(3), b(3);
    a << 1.0, 1.0, 1.0;
    b = a;
    for (int i = 0; i < 1000; ++i) a = rk4_step(sys, a, 1e-3);
    for (int i = 0; i < 10000; ++i) b = rk4_step(sys, b, 1e-4);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-4);
}

TEST_CASE("rk4 convergence order is ~4 on the decay system") {
    auto sys = custom_ode(
        1, [](const double* x, double* d) { d[0] = -x[0]; }, nullptr, "decay");
    Vec x = Vec::Ones(1);
    // reference with dt/16
    auto err_at = [&](double dt) {
        Vec ref = x;
        for (int i = 0; i < 16; ++i) ref = rk4_step(sys, ref, dt / 16.0);
        return std::abs(rk4_step(sys, x, dt)[0] - ref[0]);
    };
    const double e1 = err_at(0.2);
    const double e2 = err_at(0.1);
    const double order = std::log2(e1 / e2);
    CHECK(order > 3.5);
    CHECK(order < 4.5);
}

TEST_CASE("rk4_step flags numerical blowup") {
    auto sys = custom_ode(
        1, [](const double* x, double* d) { d[0] = x[0] * x[0]; }, nullptr,
        "quad");
    Vec x(1);
    x << 1e200;
    CHECK_THROWS_AS(rk4_step(sys, x, 1.0), NumericalBlowup);
}

TEST_CASE("simulate: stride and skip semantics") {
    OdeSystem sys = lorenz();
    SimConfig cfg;
    cfg.dt_integrate = 1e-3;
    cfg.n_steps = 100;
    cfg.skip = 0;
    cfg.subsample_stride = 1;
    cfg.initial_state = Vec(3);
    cfg.initial_state << 1.0, 1.0, 1.0;

    Trajectory raw = simulate(sys, cfg);
    CHECK(raw.count() == 100);
    CHECK(raw.dt == doctest::Approx(1e-3));

    // raw output is every integration step
    Vec x = cfg.initial_state;
    x = rk4_step(sys, x, 1e-3);
    CHECK(raw.state_vec(0).isApprox(x, 1e-15));

    cfg.n_steps = 1000;
    cfg.skip = 40;
    cfg.subsample_stride = 20;
    Trajectory sampled = simulate(sys, cfg);
    CHECK(sampled.dt == doctest::Approx(2e-2));
    CHECK(sampled.count() == (1000 - 40) / 20);
}

TEST_CASE("simulate: long Lorenz run stays inside the attractor box") {
    Trajectory traj = simulate(lorenz(), lorenz_sim(200000));
    REQUIRE(traj.count() > 0);
    for (uint64_t i = 0; i < traj.count(); ++i) {
        const double* s = traj.state(i);
        CHECK(std::abs(s[0]) <= 25.0);
        CHECK(std::abs(s[1]) <= 35.0);
        CHECK(s[2] >= 0.0);
        CHECK(s[2] <= 55.0);
    }
}

TEST_CASE("simulate is bitwise deterministic for a fixed config") {
    Trajectory a = simulate(lorenz(), lorenz_sim(5000, 100, 20, 9));
    Trajectory b = simulate(lorenz(), lorenz_sim(5000, 100, 20, 9));
    REQUIRE(a.states.size() == b.states.size());
    CHECK(std::memcmp(a.states.data(), b.states.data(),
                      a.states.size() * sizeof(double)) == 0);
}

TEST_CASE("rescale_to_unit_cube: two-point range and round trip") {
    Trajectory t;
    t.dim = 1;
    t.dt = 1.0;
    t.states = {0.0, 10.0};
    Trajectory r = rescale_to_unit_cube(t);
    REQUIRE(r.rescale.has_value());
    CHECK(r.states[0] == doctest::Approx(-1.0));
    CHECK(r.states[1] == doctest::Approx(1.0));
    CHECK(r.rescale->scale[0] == doctest::Approx(5.0));
    CHECK(r.rescale->offset[0] == doctest::Approx(5.0));

    // round trip through the stored affine record
    for (int i = 0; i < 2; ++i) {
        Vec stored(1);
        stored << r.states[i];
        CHECK(std::abs(unrescale_state(*r.rescale, stored)[0] - t.states[i]) <
              1e-12);
    }
}

TEST_CASE("rescale_to_unit_cube: simulation output attains both endpoints") {
    Trajectory traj = simulate(lorenz(), lorenz_sim(100000));
    Trajectory r = rescale_to_unit_cube(traj);
    REQUIRE(r.rescale.has_value());
    for (uint32_t dim = 0; dim < 3; ++dim) {
        double lo = 1e9, hi = -1e9;
        for (uint64_t i = 0; i < r.count(); ++i) {
            lo = std::min(lo, r.state(i)[dim]);
            hi = std::max(hi, r.state(i)[dim]);
        }
        CHECK(lo == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
    }
    // round trip a handful of states
    for (uint64_t i = 0; i < 10; ++i) {
        Vec back = unrescale_state(*r.rescale, r.state_vec(i));
        CHECK((back - traj.state_vec(i)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("rescale_to_unit_cube rejects degenerate ranges") {
    Trajectory t;
    t.dim = 2;
    t.dt = 1.0;
    t.states = {1.0, 5.0, 2.0, 5.0};  // second dimension constant
    CHECK_THROWS_AS(rescale_to_unit_cube(t), DegenerateRange);
}

TEST_CASE("ode_lyapunov_spectrum: linear flow has analytic exponents") {
    auto sys = custom_ode(
        2,
        [](const double* x, double* d) {
            d[0] = 0.5 * x[0];
            d[1] = -1.0 * x[1];
        },
        [](const double*, double* j) {
            j[0] = 0.5; j[1] = 0.0;
            j[2] = 0.0; j[3] = -1.0;
        },
        "linear");
    Vec x0(2);
    x0 << 1e-3, 1e-3;
    auto rep = ode_lyapunov_spectrum(sys, x0, 0.01, 2000, 0);
    CHECK(std::abs(rep.spectrum[0] - 0.5) < 1e-6);
    CHECK(std::abs(rep.spectrum[1] + 1.0) < 1e-6);
}

TEST_CASE("ode_lyapunov_spectrum: Lorenz matches the reference row") {
    OdeSystem sys = lorenz();
    // land on the attractor first
    Vec x0(3);
    x0 << 1.0, 1.0, 1.0;
    for (int i = 0; i < 20000; ++i) x0 = rk4_step(sys, x0, 1e-3);

    auto rep = ode_lyapunov_spectrum(sys, x0, 1e-4, 1000000, 1000);
    REQUIRE(rep.spectrum.size() == 3);
    CHECK(std::abs(rep.spectrum[0] - 0.90) < 0.05);
    CHECK(std::abs(rep.spectrum[1] + 0.006) < 0.05);
    CHECK(std::abs(rep.spectrum[2] + 14.57) < 0.05);

    // exponent-sum conservation: divergence of the field is constant
    const double sum =
        rep.spectrum[0] + rep.spectrum[1] + rep.spectrum[2];
    CHECK(std::abs(sum + 41.0 / 3.0) < 0.05);

    CHECK(rep.attractor_class == AttractorClass::Strange);
    CHECK(rep.dl_dimension == doctest::Approx(2.061).epsilon(0.01));
}

TEST_CASE("ode_lyapunov_spectrum: exponent sum at dt 1e-3 over time 100") {
    OdeSystem sys = lorenz();
    Vec x0(3);
    x0 << -3.0, 2.0, 25.0;
    for (int i = 0; i < 5000; ++i) x0 = rk4_step(sys, x0, 1e-3);
    auto rep = ode_lyapunov_spectrum(sys, x0, 1e-3, 100000, 500);
    double sum = 0.0;
    for (double v : rep.spectrum) sum += v;
    CHECK(std::abs(sum + 41.0 / 3.0) < 0.005 * (41.0 / 3.0));
}

TEST_CASE("ode_lyapunov_spectrum output is sorted non-increasing") {
    OdeSystem sys = lorenz();
    Vec x0(3);
    x0 << 5.0, -7.0, 20.0;
    auto rep = ode_lyapunov_spectrum(sys, x0, 1e-3, 20000, 100);
    for (size_t i = 1; i < rep.spectrum.size(); ++i)
        CHECK(rep.spectrum[i - 1] >= rep.spectrum[i]);
}
