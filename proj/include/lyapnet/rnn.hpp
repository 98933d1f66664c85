#pragma once

#include <cstdint>
#include <utility>

#include "lyapnet/linalg.hpp"
#include "lyapnet/rng.hpp"

namespace lyapnet {

// Single-layer recurrent machine with a residual (leaky) state update:
//   h' = (1-alpha) h + alpha tanh(W h + W_in u + b),   u' = W_out h'.
struct RnnParams {
    uint32_t d = 0;  // hidden size
    uint32_t k = 0;  // signal size
    Mat w;           // d x d
    Mat w_in;        // d x k
    Mat w_out;       // k x d
    Vec b;           // d
    double alpha = 1.0;

    void validate() const;  // throws InvalidArgument
};

// W sampled entrywise from U[0,1] and scaled so its spectral radius equals
// rho0. W_in and W_out are U[-0.5, 0.5] scaled by 1/sqrt(fan-in); b = 0.
RnnParams spectral_init(uint32_t d, uint32_t k, double rho0, double alpha,
                        RngStream& rng);

// One driven update; returns (h', u') with u' = W_out h'.
std::pair<Vec, Vec> driven_step(const RnnParams& p, const Vec& h, const Vec& u);

// One autonomous update: the machine's own readout is fed back as input.
// Implemented literally as driven_step(p, h, W_out h) so the two coincide
// bitwise.
std::pair<Vec, Vec> autonomous_step(const RnnParams& p, const Vec& h);

// Folds driven_step over the columns of u_seq (k x n, one column per step)
// without recording outputs; returns the final hidden state.
Vec warmup(const RnnParams& p, Vec h, const Mat& u_seq);
Vec warmup(const RnnParams& p, const Mat& u_seq);  // from h = 0

// n autonomous steps from h; returns the k x n matrix of readouts collected
// after each step plus the final hidden state.
std::pair<Mat, Vec> generate_autonomous(const RnnParams& p, Vec h, uint64_t n);

// Prediction convention used by the losses and the test protocol: the first
// column is the readout of h itself (the driven one-step forecast), the
// remaining n-1 columns follow autonomous steps. h is advanced in place.
Mat predict_autonomous(const RnnParams& p, Vec& h, uint64_t n);

// Jacobian of the autonomous update at the post-update state h_next:
//   J = (1-alpha) I + alpha D (W + W_in W_out),  D = diag(1 - h_next^2).
Mat rnn_jacobian(const RnnParams& p, const Vec& h_next);

}  // namespace lyapnet
