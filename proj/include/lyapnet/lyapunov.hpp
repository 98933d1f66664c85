#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lyapnet/layered.hpp"
#include "lyapnet/ode.hpp"
#include "lyapnet/rnn.hpp"

namespace lyapnet {

enum class AttractorClass : uint8_t {
    FixedPoint = 0,
    LimitCycle = 1,
    Strange = 2,
    Divergent = 3,
};

const char* attractor_class_name(AttractorClass c);

// Kaplan-Yorke dimension of a sorted (non-increasing) spectrum: k is the
// largest index with a positive partial sum, D = k + sum_k / |lambda_{k+1}|.
// Returns 0 when lambda_1 <= 0; returns the spectrum length and sets
// *saturated when every partial sum is positive. Throws EmptySpectrum.
double kaplan_yorke(const std::vector<double>& spectrum,
                    bool* saturated = nullptr);

// Divergent if flagged; FixedPoint if lambda_1 < -tol; LimitCycle if
// |lambda_1| <= tol and lambda_2 < -tol; Strange otherwise.
AttractorClass classify_attractor(const std::vector<double>& spectrum,
                                  bool divergent, double tol_zero = 0.02);

struct LyapunovReport {
    std::vector<double> spectrum;  // sorted descending; per unit time when
                                   // dt is known, else per step
    std::optional<double> dt;
    uint64_t n_steps = 0;
    uint64_t transient = 0;
    double dl_dimension = 0.0;
    bool saturated = false;
    bool diverged = false;
    AttractorClass attractor_class = AttractorClass::FixedPoint;
};

struct SpectrumConfig {
    uint64_t n_steps = 1600;
    uint64_t transient = 100;
    std::optional<double> dt;  // converts exponents to per-time units
    uint32_t top_m = 0;        // 0 = full frame for d <= 64, else top 16
    double tol_zero = 0.02;
    uint64_t frame_seed = 0;

    void validate() const;  // throws Config
    uint32_t frame_columns(uint32_t dim) const;
};

// Exponents of the machine's autonomous dynamics: iterate autonomous_step,
// push the tangent frame through the Jacobian at each post-update state,
// re-orthonormalize (Gram-Schmidt) every step and average the log norms
// after the transient. A numerical blowup is reported as class Divergent, a
// collapsed tangent direction as exponent -inf, rather than thrown.
LyapunovReport rnn_lyapunov_spectrum(const RnnParams& p, const Vec& h0,
                                     const SpectrumConfig& cfg);

LyapunovReport layered_lyapunov_spectrum(const LayeredRnnParams& p,
                                         const Vec& h0,
                                         const SpectrumConfig& cfg);

enum class TangentMode : uint8_t {
    VariationalRk4 = 0,  // tangent flow integrated with the RK4 tableau,
                         // Jacobian evaluated at the stage states
    EulerTangent = 1,    // crude I + J dt map along the trajectory
};

// Ground-truth exponents of the ODE itself. The state and the tangent
// frame are co-integrated for `transient` settling steps, then `n_steps`
// accumulation steps; lambda_i = sum log norms_i / (n_steps * dt).
// Unlike the machine variant this propagates errors: NumericalBlowup /
// DegenerateBasis are thrown.
LyapunovReport ode_lyapunov_spectrum(const OdeSystem& system, const Vec& x0,
                                     double dt, uint64_t n_steps,
                                     uint64_t transient,
                                     TangentMode mode = TangentMode::VariationalRk4,
                                     double tol_zero = 0.02);

struct PredictionErrorCurve {
    std::vector<double> rmse;  // per-step RMSE across signal components
    uint64_t valid_horizon;    // first step whose RMSE exceeds theta
};

// truth and predicted are k x n (one column per step).
PredictionErrorCurve prediction_error_curve(const Mat& truth,
                                            const Mat& predicted,
                                            double theta = 0.2);

}  // namespace lyapnet
