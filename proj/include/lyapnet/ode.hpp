#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "lyapnet/linalg.hpp"
#include "lyapnet/trajectory.hpp"

namespace lyapnet {

// An autonomous ODE dx/dt = f(x) with an analytic Jacobian. The callbacks
// use raw buffers so user-supplied systems can cross the C API unchanged;
// the Jacobian buffer is row-major dim x dim.
struct OdeSystem {
    uint32_t dim = 0;
    std::string name;
    std::map<std::string, double> params;
    std::function<void(const double* x, double* dxdt)> drift;
    std::function<void(const double* x, double* jac)> jacobian;
};

// sigma(y-x), x(rho-z)-y, xy-beta*z.
OdeSystem lorenz(double sigma = 10.0, double rho = 28.0, double beta = 8.0 / 3.0);

// 4-dimensional hyperchaotic Rossler flow in its standard literature form
// (x' = -y-z, y' = x+ay+w, z' = b+xz, w' = -cz+dw). Not derived from the
// reference tables; provided as an extra plugin system.
OdeSystem rossler4(double a = 0.25, double b = 3.0, double c = 0.5,
                   double d = 0.05);

// Wrap user callbacks. A null jacobian falls back to central finite
// differences of the drift (h = 1e-6 scaled by |x|).
OdeSystem custom_ode(uint32_t dim,
                     std::function<void(const double*, double*)> drift,
                     std::function<void(const double*, double*)> jacobian,
                     std::string name = "custom");

struct SimConfig {
    double dt_integrate = 1e-3;
    uint64_t n_steps = 0;
    uint64_t skip = 0;
    uint32_t subsample_stride = 1;
    Vec initial_state;
    // When set, the initial state is drawn uniformly from [box_lo, box_hi]
    // and the transient skip relaxes it onto the attractor.
    bool randomize_initial = false;
    Vec box_lo, box_hi;
    uint64_t seed = 0;

    void validate(uint32_t dim) const;  // throws Config
};

// Classical RK4 update. Throws NumericalBlowup when the result is
// non-finite.
void rk4_step(const OdeSystem& system, const double* state, double dt,
              double* out);
Vec rk4_step(const OdeSystem& system, const Vec& state, double dt);

// Integrates at dt_integrate, discards the first `skip` steps, then stores
// every stride-th state. Trajectory.dt = dt_integrate * stride.
Trajectory simulate(const OdeSystem& system, const SimConfig& config);

// Evaluate the system's Jacobian into a dense matrix.
Mat ode_jacobian(const OdeSystem& system, const double* state);

}  // namespace lyapnet
