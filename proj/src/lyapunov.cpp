#include "lyapnet/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "lyapnet/errors.hpp"

namespace lyapnet {

const char* attractor_class_name(AttractorClass c) {
    switch (c) {
        case AttractorClass::FixedPoint: return "FixedPoint";
        case AttractorClass::LimitCycle: return "LimitCycle";
        case AttractorClass::Strange: return "Strange";
        case AttractorClass::Divergent: return "Divergent";
    }
    return "Unknown";
}

double kaplan_yorke(const std::vector<double>& spectrum, bool* saturated) {
    if (saturated) *saturated = false;
    if (spectrum.empty()) throw EmptySpectrum("kaplan_yorke: empty spectrum");

    size_t k = 0;
    double sum = 0.0, sum_k = 0.0;
    for (size_t i = 0; i < spectrum.size(); ++i) {
        sum += spectrum[i];
        if (sum > 0.0) {
            k = i + 1;
            sum_k = sum;
        }
    }
    if (k == 0) return 0.0;
    if (k == spectrum.size()) {
        if (saturated) *saturated = true;
        return static_cast<double>(spectrum.size());
    }
    const double next = std::abs(spectrum[k]);
    if (std::isinf(next)) return static_cast<double>(k);
    return static_cast<double>(k) + sum_k / next;
}

AttractorClass classify_attractor(const std::vector<double>& spectrum,
                                  bool divergent, double tol_zero) {
    if (divergent) return AttractorClass::Divergent;
    if (spectrum.empty())
        throw EmptySpectrum("classify_attractor: empty spectrum");
    const double l1 = spectrum[0];
    const double l2 = spectrum.size() > 1
                          ? spectrum[1]
                          : -std::numeric_limits<double>::infinity();
    if (l1 < -tol_zero) return AttractorClass::FixedPoint;
    if (std::abs(l1) <= tol_zero && l2 < -tol_zero)
        return AttractorClass::LimitCycle;
    return AttractorClass::Strange;
}

void SpectrumConfig::validate() const {
    if (n_steps < 1) throw Config("spectrum: n_steps must be >= 1");
    if (transient >= n_steps)
        throw Config("spectrum: transient must be < n_steps");
    if (dt && !(*dt > 0.0)) throw Config("spectrum: dt must be > 0");
    if (!(tol_zero >= 0.0)) throw Config("spectrum: tol_zero must be >= 0");
}

uint32_t SpectrumConfig::frame_columns(uint32_t dim) const {
    if (top_m > 0) return std::min(top_m, dim);
    return dim <= 64 ? dim : std::min<uint32_t>(16, dim);
}

namespace {

// Shared Benettin loop over a discrete map. advance() moves the state one
// step; jacobian() is evaluated at the post-update state.
LyapunovReport map_spectrum(uint32_t dim, const SpectrumConfig& cfg,
                            const std::function<void()>& advance,
                            const std::function<Mat()>& jacobian) {
    cfg.validate();
    const uint32_t m = cfg.frame_columns(dim);
    const uint64_t averaged = cfg.n_steps - cfg.transient;

    LyapunovReport rep;
    rep.dt = cfg.dt;
    rep.n_steps = cfg.n_steps;
    rep.transient = cfg.transient;

    RngStream frame_rng(cfg.frame_seed);
    Mat frame = random_orthonormal_frame(dim, m, frame_rng);
    Vec acc = Vec::Zero(m);
    int collapsed_at = -1;

    try {
        for (uint64_t t = 0; t < cfg.n_steps; ++t) {
            advance();
            GramSchmidtResult gs = gram_schmidt_step(jacobian(), frame);
            frame = std::move(gs.q);
            if (t >= cfg.transient)
                acc += gs.norms.array().log().matrix();
        }
    } catch (const DegenerateBasis&) {
        // a direction contracted below representable range; report the
        // collapsed exponents as -inf instead of failing the run
        collapsed_at = 0;
    } catch (const NumericalBlowup&) {
        rep.diverged = true;
        rep.attractor_class = AttractorClass::Divergent;
        rep.dl_dimension = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }

    rep.spectrum.resize(m);
    for (uint32_t i = 0; i < m; ++i) {
        double v = acc[i] / static_cast<double>(averaged);
        if (cfg.dt) v /= *cfg.dt;
        rep.spectrum[i] = v;
    }
    if (collapsed_at >= 0)
        rep.spectrum.assign(m, -std::numeric_limits<double>::infinity());
    std::sort(rep.spectrum.begin(), rep.spectrum.end(), std::greater<>());
    rep.dl_dimension = kaplan_yorke(rep.spectrum, &rep.saturated);
    rep.attractor_class =
        classify_attractor(rep.spectrum, false, cfg.tol_zero);
    return rep;
}

}  // namespace

LyapunovReport rnn_lyapunov_spectrum(const RnnParams& p, const Vec& h0,
                                     const SpectrumConfig& cfg) {
    p.validate();
    if (h0.size() != p.d)
        throw InvalidArgument("rnn_lyapunov_spectrum: state size mismatch");

    Vec h = h0;
    const Mat a = p.w + p.w_in * p.w_out;  // autonomous coupling, fixed
    auto advance = [&]() {
        auto [h_next, u] = autonomous_step(p, h);
        h = std::move(h_next);
        require_finite(h, "rnn_lyapunov_spectrum");
    };
    auto jac = [&]() {
        Vec dd = (1.0 - h.array().square()).matrix();
        Mat j = p.alpha * dd.asDiagonal() * a;
        j.diagonal().array() += 1.0 - p.alpha;
        return j;
    };
    return map_spectrum(p.d, cfg, advance, jac);
}

LyapunovReport layered_lyapunov_spectrum(const LayeredRnnParams& p,
                                         const Vec& h0,
                                         const SpectrumConfig& cfg) {
    p.validate();
    if (h0.size() != p.state_size())
        throw InvalidArgument("layered_lyapunov_spectrum: state size mismatch");

    Vec h = h0;
    auto advance = [&]() {
        auto [h_next, u] = layered_step(p, h);
        h = std::move(h_next);
        require_finite(h, "layered_lyapunov_spectrum");
    };
    auto jac = [&]() { return layered_jacobian(p, h); };
    return map_spectrum(p.state_size(), cfg, advance, jac);
}

LyapunovReport ode_lyapunov_spectrum(const OdeSystem& system, const Vec& x0,
                                     double dt, uint64_t n_steps,
                                     uint64_t transient, TangentMode mode,
                                     double tol_zero) {
    if (x0.size() != static_cast<Eigen::Index>(system.dim))
        throw InvalidArgument("ode_lyapunov_spectrum: state size mismatch");
    if (!(dt > 0.0)) throw InvalidArgument("ode_lyapunov_spectrum: dt > 0");
    if (n_steps < 1)
        throw InvalidArgument("ode_lyapunov_spectrum: n_steps must be >= 1");

    const uint32_t d = system.dim;
    Vec x = x0;
    Mat frame = Mat::Identity(d, d);
    Vec acc = Vec::Zero(d);

    Vec k1(d), k2(d), k3(d), k4(d), x2(d), x3(d), x4(d);
    Mat v(d, d);

    auto step = [&]() {
        if (mode == TangentMode::VariationalRk4) {
            // coupled RK4 for the state and the tangent frame
            system.drift(x.data(), k1.data());
            Mat m1 = ode_jacobian(system, x.data()) * frame;
            x2 = x + 0.5 * dt * k1;
            system.drift(x2.data(), k2.data());
            Mat m2 = ode_jacobian(system, x2.data()) * (frame + 0.5 * dt * m1);
            x3 = x + 0.5 * dt * k2;
            system.drift(x3.data(), k3.data());
            Mat m3 = ode_jacobian(system, x3.data()) * (frame + 0.5 * dt * m2);
            x4 = x + dt * k3;
            system.drift(x4.data(), k4.data());
            Mat m4 = ode_jacobian(system, x4.data()) * (frame + dt * m3);
            x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            v = frame + (dt / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
        } else {
            // crude first-order tangent map at the pre-step state
            v = frame + dt * (ode_jacobian(system, x.data()) * frame);
            Vec nx = x;
            rk4_step(system, x.data(), dt, nx.data());
            x = nx;
        }
        if (!x.allFinite())
            throw NumericalBlowup("ode_lyapunov_spectrum: state diverged");
        GramSchmidtResult gs = gram_schmidt_step(Mat::Identity(d, d), v);
        frame = std::move(gs.q);
        return gs.norms;
    };

    for (uint64_t t = 0; t < transient; ++t) step();
    for (uint64_t t = 0; t < n_steps; ++t) {
        Vec norms = step();
        acc += norms.array().log().matrix();
    }

    LyapunovReport rep;
    rep.dt = dt;
    rep.n_steps = n_steps;
    rep.transient = transient;
    rep.spectrum.resize(d);
    for (uint32_t i = 0; i < d; ++i)
        rep.spectrum[i] = acc[i] / (static_cast<double>(n_steps) * dt);
    std::sort(rep.spectrum.begin(), rep.spectrum.end(), std::greater<>());
    rep.dl_dimension = kaplan_yorke(rep.spectrum, &rep.saturated);
    rep.attractor_class = classify_attractor(rep.spectrum, false, tol_zero);
    return rep;
}

PredictionErrorCurve prediction_error_curve(const Mat& truth,
                                            const Mat& predicted,
                                            double theta) {
    if (truth.rows() != predicted.rows() || truth.cols() != predicted.cols())
        throw LengthMismatch("prediction_error_curve: shape mismatch");
    if (truth.cols() == 0)
        throw LengthMismatch("prediction_error_curve: empty sequences");

    const auto n = truth.cols();
    PredictionErrorCurve out;
    out.rmse.resize(static_cast<size_t>(n));
    out.valid_horizon = static_cast<uint64_t>(n);
    bool exceeded = false;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double mse =
            (predicted.col(t) - truth.col(t)).squaredNorm() / truth.rows();
        out.rmse[static_cast<size_t>(t)] = std::sqrt(mse);
        if (!exceeded && out.rmse[static_cast<size_t>(t)] > theta) {
            out.valid_horizon = static_cast<uint64_t>(t);
            exceeded = true;
        }
    }
    return out;
}

}  // namespace lyapnet
