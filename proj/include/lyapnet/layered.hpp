#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lyapnet/linalg.hpp"
#include "lyapnet/rng.hpp"

namespace lyapnet {

enum class Activation : uint8_t { Tanh = 0, Sigmoid = 1 };

// L-layer recurrent machine with equal width N, activation Q and the
// readout fed back into layer 1:
//   h1' = Q(W1 h1 + Win1 Wout hL + B1)
//   hl' = Q(Wl hl + Winl h{l-1}' + Bl)        for l = 2..L
// The stack is updated bottom-up within a step, so layer l consumes the
// already-updated state of layer l-1; only the feedback through the readout
// uses the previous step's top layer. No leak term (alpha = 1).
struct LayeredRnnParams {
    uint32_t layers = 0;   // L
    uint32_t width = 0;    // N, shared by all layers
    uint32_t out_dim = 0;  // d, signal size
    std::vector<Mat> w;     // each N x N
    std::vector<Mat> w_in;  // layer 1: N x d, others N x N
    std::vector<Vec> b;     // each N
    Mat w_out;              // d x N
    Activation activation = Activation::Tanh;

    void validate() const;
    uint32_t state_size() const { return layers * width; }
};

// Random instance for experiments: recurrent blocks spectrally scaled to
// rho0, input/readout blocks U[-0.5,0.5]/sqrt(fan-in), zero biases.
LayeredRnnParams layered_random(uint32_t layers, uint32_t width,
                                uint32_t out_dim, double rho0,
                                Activation activation, RngStream& rng);

// One autonomous update of the stack. h holds the per-layer states
// concatenated bottom-up (layer 1 first). Returns (h_next, readout).
std::pair<Vec, Vec> layered_step(const LayeredRnnParams& p, const Vec& h);

// Jacobian of layered_step at the post-update stacked state, assembled
// blockwise: with H_l = diag(Q'(h_next)) per layer and the cascade factors
// M(l,m) = H_l Win_l ... H_{m+1} Win_{m+1},
//   block(l,l)      = H_l W_l                         (l < L)
//   block(l,m), l>m = M(l,m) H_m W_m
//   block(l,L)      = M(l,0) W_out                    (l < L)
//   block(L,L)      = H_L W_L + M(L,0) W_out
// Everything above the diagonal outside the last block-column is zero.
Mat layered_jacobian(const LayeredRnnParams& p, const Vec& h_next);

}  // namespace lyapnet
