#include "lyapnet/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "lyapnet/errors.hpp"

namespace lyapnet {

void TrainConfig::validate(uint64_t n_sequences) const {
    if (d == 0) throw Config("train: d must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Config("train: alpha in (0,1]");
    if (!(rho0 > 0.0)) throw Config("train: rho0 must be > 0");
    if (!(lr > 0.0)) throw Config("train: lr must be > 0");
    if (batch_size == 0 || batch_size > n_sequences)
        throw Config("train: need 1 <= batch_size <= n_sequences");
    if (warmup_len < 1) throw Config("train: warmup_len must be >= 1");
    if (early_stop_patience < 1) throw Config("train: patience must be >= 1");
    if (val_len < 1) throw Config("train: val_len must be >= 1");
}

namespace {

// Batched state: all sequences of a mini-batch advance in lockstep, one
// column per sequence.
struct Workspace {
    std::vector<Mat> hs;            // hidden states h_0 .. h_{Tw+T-1}, d x B
    std::vector<Mat> preds, resid;  // per target step, k x B
};

void gather(const Dataset& ds, std::span<const uint64_t> batch, uint32_t t,
            Mat& out) {
    const uint32_t k = ds.k;
    out.resize(k, static_cast<Eigen::Index>(batch.size()));
    for (size_t b = 0; b < batch.size(); ++b) {
        const double* w = ds.window(batch[b]) + static_cast<uint64_t>(t) * k;
        out.col(static_cast<Eigen::Index>(b)) = Eigen::Map<const Vec>(w, k);
    }
}

Mat leaky_tanh_step(const RnnParams& p, const Mat& h, const Mat& u) {
    Mat z = p.w * h + p.w_in * u;
    z.colwise() += p.b;
    return (1.0 - p.alpha) * h + p.alpha * z.array().tanh().matrix();
}

// Forward pass over a batch; loss averaged over batch, signal dim and the
// first `steps` target samples. When ws != nullptr all intermediate states
// are kept for the backward pass.
double forward_batch(const RnnParams& p, const Dataset& ds,
                     std::span<const uint64_t> batch, LossMode mode,
                     uint32_t steps, Workspace* ws) {
    const uint32_t tw = ds.warmup_len;
    const Eigen::Index bsz = static_cast<Eigen::Index>(batch.size());
    Mat u;

    Mat h = Mat::Zero(p.d, bsz);
    if (ws) {
        ws->hs.assign(1, h);
        ws->hs.reserve(tw + steps);
        ws->preds.clear();
        ws->resid.clear();
    }
    for (uint32_t t = 0; t < tw; ++t) {
        gather(ds, batch, t, u);
        h = leaky_tanh_step(p, h, u);
        if (ws) ws->hs.push_back(h);
    }

    double sum_sq = 0.0;
    for (uint32_t t = 0; t < steps; ++t) {
        Mat pred = p.w_out * h;
        gather(ds, batch, tw + t, u);
        Mat r = pred - u;
        sum_sq += r.squaredNorm();
        if (ws) {
            ws->preds.push_back(pred);
            ws->resid.push_back(std::move(r));
        }
        if (t + 1 < steps) {
            h = leaky_tanh_step(p, h, mode == LossMode::Seq2Seq ? pred : u);
            if (ws) ws->hs.push_back(h);
        }
    }
    return sum_sq / (static_cast<double>(batch.size()) * ds.k * steps);
}

Gradients backward_batch(const RnnParams& p, const Dataset& ds,
                         std::span<const uint64_t> batch, LossMode mode,
                         uint32_t steps, const Workspace& ws) {
    const uint32_t tw = ds.warmup_len;
    const Eigen::Index bsz = static_cast<Eigen::Index>(batch.size());
    const double a = p.alpha;
    const double scale =
        2.0 / (static_cast<double>(batch.size()) * ds.k * steps);

    Gradients g;
    g.w = Mat::Zero(p.d, p.d);
    g.w_in = Mat::Zero(p.d, p.k);
    g.w_out = Mat::Zero(p.k, p.d);
    g.b = Vec::Zero(p.d);

    Mat gh = Mat::Zero(p.d, bsz);
    Mat gp(p.k, bsz), gz(p.d, bsz), act(p.d, bsz), u;

    for (uint32_t ti = steps; ti-- > 0;) {
        const Mat& h_read = ws.hs[tw + ti];
        bool have_feedback = false;
        if (ti + 1 < steps) {
            // reconstruct the tanh output of the step ti -> ti+1
            act = (ws.hs[tw + ti + 1] - (1.0 - a) * h_read) / a;
            gz = (a * gh).cwiseProduct(
                (1.0 - act.array().square()).matrix());
            g.w.noalias() += gz * h_read.transpose();
            g.b += gz.rowwise().sum();
            if (mode == LossMode::Seq2Seq) {
                g.w_in.noalias() += gz * ws.preds[ti].transpose();
                gp.noalias() = p.w_in.transpose() * gz;
                have_feedback = true;
            } else {
                gather(ds, batch, tw + ti, u);
                g.w_in.noalias() += gz * u.transpose();
            }
            gh = (1.0 - a) * gh + p.w.transpose() * gz;
        } else {
            gh.setZero();
        }
        if (!have_feedback) gp.setZero();
        gp += scale * ws.resid[ti];
        g.w_out.noalias() += gp * h_read.transpose();
        gh.noalias() += p.w_out.transpose() * gp;
    }

    for (uint32_t j = tw; j-- > 0;) {
        act = (ws.hs[j + 1] - (1.0 - a) * ws.hs[j]) / a;
        gz = (a * gh).cwiseProduct((1.0 - act.array().square()).matrix());
        g.w.noalias() += gz * ws.hs[j].transpose();
        g.b += gz.rowwise().sum();
        gather(ds, batch, j, u);
        g.w_in.noalias() += gz * u.transpose();
        gh = (1.0 - a) * gh + p.w.transpose() * gz;
    }
    return g;
}

}  // namespace

double sequence_loss(const RnnParams& p, const Dataset& ds, uint64_t item,
                     LossMode mode, uint32_t steps) {
    if (item >= ds.size()) throw InvalidArgument("sequence_loss: bad item");
    if (ds.k != p.k) throw InvalidArgument("sequence_loss: signal dim mismatch");
    steps = std::min(steps, ds.target_len);
    if (steps < 1) throw InvalidArgument("sequence_loss: no target steps");

    const auto win = ds.window_mat(item);
    Vec h = Vec::Zero(p.d);
    for (uint32_t t = 0; t < ds.warmup_len; ++t) {
        Vec pre = p.w * h + p.w_in * win.col(t) + p.b;
        h = (1.0 - p.alpha) * h + p.alpha * pre.array().tanh().matrix();
    }
    double sum_sq = 0.0;
    for (uint32_t t = 0; t < steps; ++t) {
        Vec pred = p.w_out * h;
        sum_sq += (pred - win.col(ds.warmup_len + t)).squaredNorm();
        if (t + 1 < steps) {
            const auto& input =
                (mode == LossMode::Seq2Seq)
                    ? pred
                    : Vec(win.col(ds.warmup_len + t));
            Vec pre = p.w * h + p.w_in * input + p.b;
            h = (1.0 - p.alpha) * h + p.alpha * pre.array().tanh().matrix();
        }
    }
    const double loss = sum_sq / (static_cast<double>(p.k) * steps);
    if (!std::isfinite(loss)) throw NumericalBlowup("sequence_loss");
    return loss;
}

double seq2seq_loss(const RnnParams& p, const Dataset& ds, uint64_t item) {
    return sequence_loss(p, ds, item, LossMode::Seq2Seq, ds.target_len);
}

double one_step_loss(const RnnParams& p, const Dataset& ds, uint64_t item) {
    return sequence_loss(p, ds, item, LossMode::OneStep, ds.target_len);
}

Gradients bptt_gradients(const RnnParams& p, const Dataset& ds,
                         std::span<const uint64_t> batch, LossMode mode,
                         double* loss_out) {
    if (batch.empty()) throw InvalidArgument("bptt_gradients: empty batch");
    if (ds.k != p.k) throw InvalidArgument("bptt_gradients: dim mismatch");
    Workspace ws;
    const double loss =
        forward_batch(p, ds, batch, mode, ds.target_len, &ws);
    if (!std::isfinite(loss)) throw NumericalBlowup("bptt: non-finite loss");
    Gradients g = backward_batch(p, ds, batch, mode, ds.target_len, ws);
    if (!all_finite(g.w) || !all_finite(g.w_in) || !all_finite(g.w_out) ||
        !all_finite(g.b))
        throw NumericalBlowup("bptt: non-finite gradients");
    if (loss_out) *loss_out = loss;
    return g;
}

RmspropState RmspropState::zeros_like(const RnnParams& p) {
    RmspropState s;
    s.vw = Mat::Zero(p.d, p.d);
    s.vwin = Mat::Zero(p.d, p.k);
    s.vwout = Mat::Zero(p.k, p.d);
    s.vb = Vec::Zero(p.d);
    return s;
}

static void rmsprop_update(Mat& theta, Mat& v, const Mat& g, double lr,
                           double gamma, double eps) {
    v = gamma * v + (1.0 - gamma) * g.cwiseProduct(g);
    theta.array() -= lr * g.array() / (v.array().sqrt() + eps);
}

void rmsprop_step(RnnParams& p, RmspropState& s, const Gradients& g,
                  double lr) {
    rmsprop_update(p.w, s.vw, g.w, lr, s.gamma, s.eps);
    rmsprop_update(p.w_in, s.vwin, g.w_in, lr, s.gamma, s.eps);
    rmsprop_update(p.w_out, s.vwout, g.w_out, lr, s.gamma, s.eps);
    s.vb = s.gamma * s.vb + (1.0 - s.gamma) * g.b.cwiseProduct(g.b);
    p.b.array() -= lr * g.b.array() / (s.vb.array().sqrt() + s.eps);
}

namespace {

double eval_split(const RnnParams& p, const Dataset& ds,
                  const std::vector<uint64_t>& idx, LossMode mode,
                  uint32_t steps, uint32_t chunk) {
    double sum = 0.0;
    for (size_t at = 0; at < idx.size(); at += chunk) {
        const size_t n = std::min<size_t>(chunk, idx.size() - at);
        std::span<const uint64_t> part(idx.data() + at, n);
        sum += forward_batch(p, ds, part, mode, steps, nullptr) *
               static_cast<double>(n);
    }
    return sum / static_cast<double>(idx.size());
}

void shuffle_indices(std::vector<uint64_t>& idx, RngStream& rng) {
    for (size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
}

}  // namespace

std::pair<RnnParams, TrainReport> train(const Dataset& ds,
                                        const TrainConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    cfg.validate(ds.size());
    if (ds.size() == 0) throw Config("train: empty dataset");

    RngStream init_rng(cfg.seed);
    RnnParams params = spectral_init(cfg.d, ds.k, cfg.rho0, cfg.alpha, init_rng);

    // held-out validation split, fixed before epoch 1
    std::vector<uint64_t> order(ds.size());
    std::iota(order.begin(), order.end(), 0);
    RngStream split_rng(RngStream::derive(cfg.seed, 101));
    shuffle_indices(order, split_rng);
    const uint64_t n_val = std::max<uint64_t>(1, ds.size() / 20);
    std::vector<uint64_t> val_idx(order.begin(), order.begin() + n_val);
    std::vector<uint64_t> train_idx(order.begin() + n_val, order.end());
    if (train_idx.empty()) throw Config("train: no sequences left to train on");

    const uint32_t val_steps = std::min(cfg.val_len, ds.target_len);
    const uint32_t chunk = cfg.batch_size;

    TrainReport report;
    report.train_loss.push_back(
        eval_split(params, ds, train_idx, cfg.loss_mode, ds.target_len, chunk));
    report.val_loss.push_back(
        eval_split(params, ds, val_idx, LossMode::Seq2Seq, val_steps, chunk));

    RnnParams best = params;
    double best_val = report.val_loss[0];
    uint32_t bad_epochs = 0;

    RmspropState opt = RmspropState::zeros_like(params);

    for (uint32_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        RngStream epoch_rng(RngStream::derive(cfg.seed, 200 + epoch));
        shuffle_indices(train_idx, epoch_rng);

        double epoch_loss = 0.0;
        bool blowup = false;
        for (size_t at = 0; at < train_idx.size(); at += cfg.batch_size) {
            const size_t n =
                std::min<size_t>(cfg.batch_size, train_idx.size() - at);
            std::span<const uint64_t> batch(train_idx.data() + at, n);
            double batch_loss = 0.0;
            try {
                Gradients g =
                    bptt_gradients(params, ds, batch, cfg.loss_mode, &batch_loss);
                rmsprop_step(params, opt, g, cfg.lr);
            } catch (const NumericalBlowup& e) {
                report.aborted = true;
                report.abort_reason = e.what();
                blowup = true;
                break;
            }
            epoch_loss += batch_loss * static_cast<double>(n);
        }
        if (blowup) {
            report.stopped_epoch = epoch;
            break;
        }
        epoch_loss /= static_cast<double>(train_idx.size());
        report.train_loss.push_back(epoch_loss);

        const double val =
            eval_split(params, ds, val_idx, LossMode::Seq2Seq, val_steps, chunk);
        report.val_loss.push_back(val);
        report.stopped_epoch = epoch;

        if (val < best_val) {
            best_val = val;
            best = params;
            report.best_epoch = epoch;
            bad_epochs = 0;
        } else if (++bad_epochs >= cfg.early_stop_patience) {
            break;
        }
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    return {std::move(best), std::move(report)};
}

}  // namespace lyapnet
