#include "lyapnet/rnn.hpp"

#include <cmath>

#include "lyapnet/errors.hpp"

namespace lyapnet {

void RnnParams::validate() const {
    if (d == 0 || k == 0) throw InvalidArgument("rnn: empty dimensions");
    if (w.rows() != d || w.cols() != d || w_in.rows() != d ||
        w_in.cols() != k || w_out.rows() != k || w_out.cols() != d ||
        b.size() != d)
        throw InvalidArgument("rnn: parameter shapes do not chain");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw InvalidArgument("rnn: alpha must be in (0, 1]");
    if (!all_finite(w) || !all_finite(w_in) || !all_finite(w_out) ||
        !all_finite(b))
        throw InvalidArgument("rnn: non-finite parameters");
}

RnnParams spectral_init(uint32_t d, uint32_t k, double rho0, double alpha,
                        RngStream& rng) {
    if (!(rho0 > 0.0)) throw InvalidArgument("spectral_init: rho0 must be > 0");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw InvalidArgument("spectral_init: alpha must be in (0, 1]");

    RnnParams p;
    p.d = d;
    p.k = k;
    p.alpha = alpha;

    p.w.resize(d, d);
    // row-major fill so the draw order matches the serialized layout
    for (uint32_t i = 0; i < d; ++i)
        for (uint32_t j = 0; j < d; ++j) p.w(i, j) = rng.uniform();
    const double radius = spectral_radius(p.w);
    if (radius <= 0.0)
        throw NoConvergence("spectral_init: sampled matrix has zero radius");
    p.w *= rho0 / radius;

    const double in_scale = 1.0 / std::sqrt(static_cast<double>(k));
    p.w_in.resize(d, k);
    for (uint32_t i = 0; i < d; ++i)
        for (uint32_t j = 0; j < k; ++j)
            p.w_in(i, j) = rng.uniform(-0.5, 0.5) * in_scale;

    const double out_scale = 1.0 / std::sqrt(static_cast<double>(d));
    p.w_out.resize(k, d);
    for (uint32_t i = 0; i < k; ++i)
        for (uint32_t j = 0; j < d; ++j)
            p.w_out(i, j) = rng.uniform(-0.5, 0.5) * out_scale;

    p.b = Vec::Zero(d);
    return p;
}

std::pair<Vec, Vec> driven_step(const RnnParams& p, const Vec& h,
                                const Vec& u) {
    if (h.size() != p.d || u.size() != p.k)
        throw InvalidArgument("driven_step: shape mismatch");
    Vec pre = p.w * h + p.w_in * u + p.b;
    Vec h_next = (1.0 - p.alpha) * h + p.alpha * pre.array().tanh().matrix();
    Vec u_next = p.w_out * h_next;
    return {std::move(h_next), std::move(u_next)};
}

std::pair<Vec, Vec> autonomous_step(const RnnParams& p, const Vec& h) {
    return driven_step(p, h, p.w_out * h);
}

Vec warmup(const RnnParams& p, Vec h, const Mat& u_seq) {
    if (u_seq.cols() < 1) throw InvalidArgument("warmup: empty input sequence");
    if (u_seq.rows() != p.k || h.size() != p.d)
        throw InvalidArgument("warmup: shape mismatch");
    for (Eigen::Index t = 0; t < u_seq.cols(); ++t) {
        Vec pre = p.w * h + p.w_in * u_seq.col(t) + p.b;
        h = (1.0 - p.alpha) * h + p.alpha * pre.array().tanh().matrix();
    }
    require_finite(h, "warmup");
    return h;
}

Vec warmup(const RnnParams& p, const Mat& u_seq) {
    return warmup(p, Vec::Zero(p.d), u_seq);
}

std::pair<Mat, Vec> generate_autonomous(const RnnParams& p, Vec h,
                                        uint64_t n) {
    if (n < 1) throw InvalidArgument("generate_autonomous: n must be >= 1");
    Mat out(p.k, static_cast<Eigen::Index>(n));
    for (uint64_t t = 0; t < n; ++t) {
        auto [h_next, u_next] = autonomous_step(p, h);
        h = std::move(h_next);
        out.col(static_cast<Eigen::Index>(t)) = u_next;
    }
    require_finite(h, "generate_autonomous");
    return {std::move(out), std::move(h)};
}

Mat predict_autonomous(const RnnParams& p, Vec& h, uint64_t n) {
    if (n < 1) throw InvalidArgument("predict_autonomous: n must be >= 1");
    Mat out(p.k, static_cast<Eigen::Index>(n));
    for (uint64_t t = 0; t < n; ++t) {
        Vec u = p.w_out * h;
        out.col(static_cast<Eigen::Index>(t)) = u;
        if (t + 1 < n) {
            Vec pre = p.w * h + p.w_in * u + p.b;
            h = (1.0 - p.alpha) * h + p.alpha * pre.array().tanh().matrix();
        }
    }
    require_finite(h, "predict_autonomous");
    return out;
}

Mat rnn_jacobian(const RnnParams& p, const Vec& h_next) {
    if (h_next.size() != p.d)
        throw InvalidArgument("rnn_jacobian: state dimension mismatch");
    Mat a = p.w + p.w_in * p.w_out;
    Vec dd = (1.0 - h_next.array().square()).matrix();
    Mat j = p.alpha * dd.asDiagonal() * a;
    j.diagonal().array() += 1.0 - p.alpha;
    return j;
}

}  // namespace lyapnet
