#include "lyapnet/layered.hpp"

#include <cmath>

#include "lyapnet/errors.hpp"

namespace lyapnet {

void LayeredRnnParams::validate() const {
    if (layers == 0 || width == 0 || out_dim == 0)
        throw InvalidArgument("layered: empty dimensions");
    if (w.size() != layers || w_in.size() != layers || b.size() != layers)
        throw InvalidArgument("layered: per-layer parameter count mismatch");
    for (uint32_t l = 0; l < layers; ++l) {
        const Eigen::Index in_cols = (l == 0) ? out_dim : width;
        if (w[l].rows() != width || w[l].cols() != width ||
            w_in[l].rows() != width || w_in[l].cols() != in_cols ||
            b[l].size() != width)
            throw InvalidArgument("layered: shapes do not chain at layer " +
                                  std::to_string(l + 1));
    }
    if (w_out.rows() != out_dim || w_out.cols() != width)
        throw InvalidArgument("layered: readout shape mismatch");
}

LayeredRnnParams layered_random(uint32_t layers, uint32_t width,
                                uint32_t out_dim, double rho0,
                                Activation activation, RngStream& rng) {
    if (layers == 0 || width == 0 || out_dim == 0)
        throw InvalidArgument("layered_random: empty dimensions");
    LayeredRnnParams p;
    p.layers = layers;
    p.width = width;
    p.out_dim = out_dim;
    p.activation = activation;

    for (uint32_t l = 0; l < layers; ++l) {
        Mat wl(width, width);
        for (uint32_t i = 0; i < width; ++i)
            for (uint32_t j = 0; j < width; ++j) wl(i, j) = rng.uniform();
        wl *= rho0 / spectral_radius(wl);
        p.w.push_back(std::move(wl));

        const uint32_t fan_in = (l == 0) ? out_dim : width;
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Mat wi(width, fan_in);
        for (uint32_t i = 0; i < width; ++i)
            for (uint32_t j = 0; j < fan_in; ++j)
                wi(i, j) = rng.uniform(-0.5, 0.5) * scale;
        p.w_in.push_back(std::move(wi));
        p.b.push_back(Vec::Zero(width));
    }

    const double out_scale = 1.0 / std::sqrt(static_cast<double>(width));
    p.w_out.resize(out_dim, width);
    for (uint32_t i = 0; i < out_dim; ++i)
        for (uint32_t j = 0; j < width; ++j)
            p.w_out(i, j) = rng.uniform(-0.5, 0.5) * out_scale;
    return p;
}

static Vec activate(const Vec& z, Activation q) {
    if (q == Activation::Tanh) return z.array().tanh().matrix();
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

std::pair<Vec, Vec> layered_step(const LayeredRnnParams& p, const Vec& h) {
    const uint32_t n = p.width;
    if (h.size() != p.state_size())
        throw InvalidArgument("layered_step: stacked state size mismatch");

    Vec h_next(h.size());
    Vec feedback = p.w_out * h.segment((p.layers - 1) * n, n);
    for (uint32_t l = 0; l < p.layers; ++l) {
        const auto prev = h.segment(l * n, n);
        Vec z = p.w[l] * prev + p.b[l];
        if (l == 0)
            z += p.w_in[0] * feedback;
        else
            z += p.w_in[l] * h_next.segment((l - 1) * n, n);
        h_next.segment(l * n, n) = activate(z, p.activation);
    }
    Vec u_next = p.w_out * h_next.segment((p.layers - 1) * n, n);
    return {std::move(h_next), std::move(u_next)};
}

// Q'(h) expressed through the activation value itself.
static Vec activation_gain(const Vec& h_layer, Activation q) {
    if (q == Activation::Tanh)
        return (1.0 - h_layer.array().square()).matrix();
    return (h_layer.array() * (1.0 - h_layer.array())).matrix();
}

Mat layered_jacobian(const LayeredRnnParams& p, const Vec& h_next) {
    const uint32_t n = p.width;
    const uint32_t ln = p.state_size();
    const uint32_t last = p.layers - 1;
    if (h_next.size() != ln)
        throw InvalidArgument("layered_jacobian: stacked state size mismatch");

    // H_l = diag(Q'), A_l = H_l W_l, C_l = H_l Win_l
    std::vector<Mat> a(p.layers), c(p.layers);
    for (uint32_t l = 0; l < p.layers; ++l) {
        const Vec gain = activation_gain(h_next.segment(l * n, n), p.activation);
        a[l] = gain.asDiagonal() * p.w[l];
        c[l] = gain.asDiagonal() * p.w_in[l];
    }

    Mat r = Mat::Zero(ln, ln);
    for (uint32_t l = 0; l < p.layers; ++l) {
        // walk the cascade downwards: run = C_l C_{l-1} ... C_{m+1}
        Mat run;
        for (uint32_t m = l; m-- > 0;) {
            run = (m + 1 == l) ? c[l] : Mat(run * c[m + 1]);
            r.block(l * n, m * n, n, n) = run * a[m];
        }
        // full cascade down to the fed-back readout: M(l,0) = C_l ... C_1
        Mat to_signal = (l == 0) ? c[0] : Mat(run * c[0]);
        r.block(l * n, last * n, n, n) += to_signal * p.w_out;
        r.block(l * n, l * n, n, n) += a[l];
    }
    return r;
}

}  // namespace lyapnet
