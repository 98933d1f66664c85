#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lyapnet/dataset.hpp"
#include "lyapnet/rnn.hpp"

namespace lyapnet {

enum class LossMode : uint32_t { Seq2Seq = 0, OneStep = 1 };

struct TrainConfig {
    uint32_t d = 200;
    double alpha = 0.3;
    double rho0 = 1.2;
    double lr = 1e-3;
    uint32_t batch_size = 200;
    uint32_t max_epochs = 100;
    uint32_t warmup_len = 100;  // informational; the dataset fixes the split
    LossMode loss_mode = LossMode::Seq2Seq;
    uint32_t early_stop_patience = 5;
    uint32_t val_len = 400;
    uint64_t seed = 0;

    void validate(uint64_t n_sequences) const;  // throws Config
};

struct TrainReport {
    // index 0 is the initialization, entry e the state after epoch e
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    uint32_t best_epoch = 0;
    uint32_t stopped_epoch = 0;
    bool aborted = false;
    std::string abort_reason;
    double wall_seconds = 0.0;
};

struct Gradients {
    Mat w, w_in, w_out;
    Vec b;
};

// Mean losses over one dataset item. Predictions follow the convention of
// predict_autonomous: the forecast of target step t is read out before the
// state consumes (prediction or truth of) that step, so both modes coincide
// at target_len = 1.
//
// seq2seq: the rollout feeds each prediction back as the next input.
// one_step: every step is teacher-forced with the true target sample.
double seq2seq_loss(const RnnParams& p, const Dataset& ds, uint64_t item);
double one_step_loss(const RnnParams& p, const Dataset& ds, uint64_t item);

// Loss restricted to the first `steps` target samples (validation helper).
double sequence_loss(const RnnParams& p, const Dataset& ds, uint64_t item,
                     LossMode mode, uint32_t steps);

// Exact reverse-mode gradients of the mean loss over the batch, including
// (in seq2seq mode) the feedback path through W_out and the influence of
// the warmup segment on the initial rollout state. Warmup steps carry no
// loss terms.
Gradients bptt_gradients(const RnnParams& p, const Dataset& ds,
                         std::span<const uint64_t> batch, LossMode mode,
                         double* loss_out = nullptr);

struct RmspropState {
    Mat vw, vwin, vwout;
    Vec vb;
    double gamma = 0.9;
    double eps = 1e-8;

    static RmspropState zeros_like(const RnnParams& p);
};

// v <- gamma v + (1-gamma) g^2;  theta <- theta - lr g / (sqrt(v) + eps)
void rmsprop_step(RnnParams& p, RmspropState& state, const Gradients& g,
                  double lr);

// Full training loop: spectral init, shuffled mini-batches, per-epoch
// validation on a held-out 5% split, early stopping, best-checkpoint
// return. A numerical blowup aborts the run and returns the best
// parameters so far with report.aborted set.
std::pair<RnnParams, TrainReport> train(const Dataset& ds,
                                        const TrainConfig& cfg);

}  // namespace lyapnet
