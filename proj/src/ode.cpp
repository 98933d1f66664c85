#include "lyapnet/ode.hpp"

#include <cmath>
#include <utility>

#include "lyapnet/errors.hpp"
#include "lyapnet/rng.hpp"

namespace lyapnet {

OdeSystem lorenz(double sigma, double rho, double beta) {
    OdeSystem sys;
    sys.dim = 3;
    sys.name = "lorenz";
    sys.params = {{"sigma", sigma}, {"rho", rho}, {"beta", beta}};
    sys.drift = [sigma, rho, beta](const double* x, double* dxdt) {
        dxdt[0] = sigma * (x[1] - x[0]);
        dxdt[1] = x[0] * (rho - x[2]) - x[1];
        dxdt[2] = x[0] * x[1] - beta * x[2];
    };
    sys.jacobian = [sigma, rho, beta](const double* x, double* j) {
        j[0] = -sigma; j[1] = sigma;  j[2] = 0.0;
        j[3] = rho - x[2]; j[4] = -1.0; j[5] = -x[0];
        j[6] = x[1]; j[7] = x[0]; j[8] = -beta;
    };
    return sys;
}

OdeSystem rossler4(double a, double b, double c, double d) {
    OdeSystem sys;
    sys.dim = 4;
    sys.name = "rossler4";
    sys.params = {{"a", a}, {"b", b}, {"c", c}, {"d", d}};
    sys.drift = [a, b, c, d](const double* x, double* dxdt) {
        dxdt[0] = -x[1] - x[2];
        dxdt[1] = x[0] + a * x[1] + x[3];
        dxdt[2] = b + x[0] * x[2];
        dxdt[3] = -c * x[2] + d * x[3];
    };
    sys.jacobian = [a, b, c, d](const double* x, double* j) {
        // rows of d(drift)/dx
        j[0] = 0.0;  j[1] = -1.0; j[2] = -1.0; j[3] = 0.0;
        j[4] = 1.0;  j[5] = a;    j[6] = 0.0;  j[7] = 1.0;
        j[8] = x[2]; j[9] = 0.0;  j[10] = x[0]; j[11] = 0.0;
        j[12] = 0.0; j[13] = 0.0; j[14] = -c;  j[15] = d;
    };
    return sys;
}

OdeSystem custom_ode(uint32_t dim,
                     std::function<void(const double*, double*)> drift,
                     std::function<void(const double*, double*)> jacobian,
                     std::string name) {
    if (dim == 0) throw InvalidArgument("custom_ode: dim must be positive");
    if (!drift) throw InvalidArgument("custom_ode: drift callback required");
    OdeSystem sys;
    sys.dim = dim;
    sys.name = std::move(name);
    sys.drift = std::move(drift);
    if (jacobian) {
        sys.jacobian = std::move(jacobian);
    } else {
        // central finite differences of the drift
        auto f = sys.drift;
        sys.jacobian = [dim, f](const double* x, double* j) {
            std::vector<double> xp(x, x + dim), xm(x, x + dim);
            std::vector<double> fp(dim), fm(dim);
            for (uint32_t col = 0; col < dim; ++col) {
                const double h = 1e-6 * std::max(1.0, std::abs(x[col]));
                xp[col] = x[col] + h;
                xm[col] = x[col] - h;
                f(xp.data(), fp.data());
                f(xm.data(), fm.data());
                for (uint32_t row = 0; row < dim; ++row)
                    j[row * dim + col] = (fp[row] - fm[row]) / (2.0 * h);
                xp[col] = x[col];
                xm[col] = x[col];
            }
        };
    }
    return sys;
}

void SimConfig::validate(uint32_t dim) const {
    if (!(dt_integrate > 0.0)) throw Config("sim: dt_integrate must be > 0");
    if (n_steps == 0) throw Config("sim: n_steps must be >= 1");
    if (subsample_stride < 1) throw Config("sim: stride must be >= 1");
    if (n_steps <= skip) throw Config("sim: n_steps must exceed skip");
    if (randomize_initial) {
        if (box_lo.size() != dim || box_hi.size() != dim)
            throw Config("sim: init box must match system dimension");
        for (uint32_t i = 0; i < dim; ++i)
            if (!(box_lo[i] <= box_hi[i])) throw Config("sim: empty init box");
    } else if (initial_state.size() != static_cast<Eigen::Index>(dim)) {
        throw Config("sim: initial state must match system dimension");
    }
}

void rk4_step(const OdeSystem& system, const double* state, double dt,
              double* out) {
    const uint32_t d = system.dim;
    std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d);

    system.drift(state, k1.data());
    for (uint32_t i = 0; i < d; ++i) tmp[i] = state[i] + 0.5 * dt * k1[i];
    system.drift(tmp.data(), k2.data());
    for (uint32_t i = 0; i < d; ++i) tmp[i] = state[i] + 0.5 * dt * k2[i];
    system.drift(tmp.data(), k3.data());
    for (uint32_t i = 0; i < d; ++i) tmp[i] = state[i] + dt * k3[i];
    system.drift(tmp.data(), k4.data());

    bool finite = true;
    for (uint32_t i = 0; i < d; ++i) {
        out[i] = state[i] +
                 (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        finite = finite && std::isfinite(out[i]);
    }
    if (!finite) throw NumericalBlowup("rk4_step: non-finite state");
}

Vec rk4_step(const OdeSystem& system, const Vec& state, double dt) {
    if (state.size() != static_cast<Eigen::Index>(system.dim))
        throw InvalidArgument("rk4_step: state dimension mismatch");
    Vec out(state.size());
    rk4_step(system, state.data(), dt, out.data());
    return out;
}

Trajectory simulate(const OdeSystem& system, const SimConfig& config) {
    config.validate(system.dim);
    const uint32_t d = system.dim;

    std::vector<double> x(d);
    if (config.randomize_initial) {
        RngStream rng(config.seed);
        for (uint32_t i = 0; i < d; ++i)
            x[i] = rng.uniform(config.box_lo[i], config.box_hi[i]);
    } else {
        for (uint32_t i = 0; i < d; ++i) x[i] = config.initial_state[i];
    }

    Trajectory traj;
    traj.dim = d;
    traj.dt = config.dt_integrate * config.subsample_stride;
    const uint64_t stored =
        (config.n_steps - config.skip) / config.subsample_stride;
    traj.states.reserve(stored * d);

    std::vector<double> next(d);
    for (uint64_t step = 1; step <= config.n_steps; ++step) {
        rk4_step(system, x.data(), config.dt_integrate, next.data());
        x.swap(next);
        if (step > config.skip &&
            (step - config.skip) % config.subsample_stride == 0) {
            traj.states.insert(traj.states.end(), x.begin(), x.end());
        }
    }
    return traj;
}

Mat ode_jacobian(const OdeSystem& system, const double* state) {
    const uint32_t d = system.dim;
    std::vector<double> buf(static_cast<size_t>(d) * d);
    system.jacobian(state, buf.data());
    Mat j(d, d);
    for (uint32_t r = 0; r < d; ++r)
        for (uint32_t c = 0; c < d; ++c) j(r, c) = buf[r * d + c];
    return j;
}

}  // namespace lyapnet
