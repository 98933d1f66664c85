// C API implementation: thin opaque-handle wrappers over the core library.
// Every entry point traps exceptions and converts them to status codes; the
// message is kept in a thread-local buffer for lyp_last_error().

#include "lyapnet.h"

#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "lyapnet/dataset.hpp"
#include "lyapnet/ensemble.hpp"
#include "lyapnet/errors.hpp"
#include "lyapnet/io.hpp"
#include "lyapnet/layered.hpp"
#include "lyapnet/lyapunov.hpp"
#include "lyapnet/ode.hpp"
#include "lyapnet/rc.hpp"
#include "lyapnet/rnn.hpp"
#include "lyapnet/train.hpp"
#include "lyapnet/trajectory.hpp"
#include "lyapnet/version.hpp"

using namespace lyapnet;

struct lyp_ode {
    OdeSystem sys;
};
struct lyp_traj {
    Trajectory t;
};
struct lyp_rnn {
    RnnParams p;
};
struct lyp_layered {
    LayeredRnnParams p;
};
struct lyp_dataset {
    Dataset ds;
};
struct lyp_report {
    LyapunovReport r;
};
struct lyp_train_report {
    TrainReport r;
};
struct lyp_ensemble_report {
    EnsembleReport r;
    std::vector<lyp_report> member_reports;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
int guarded(F&& f) {
    try {
        g_last_error.clear();
        f();
        return LYP_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return static_cast<int>(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return LYP_ERR_UNKNOWN;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return LYP_ERR_UNKNOWN;
    }
}

template <typename F>
auto guarded_handle(F&& f) -> decltype(f()) {
    try {
        g_last_error.clear();
        return f();
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return nullptr;
    }
}

int invalid(const char* msg) {
    g_last_error = msg;
    return LYP_ERR_INVALID;
}

void copy_rowmajor(const Mat& m, double* out) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) *out++ = m(r, c);
}

TrainConfig to_core(const lyp_train_config& c) {
    TrainConfig tc;
    tc.d = c.d;
    tc.alpha = c.alpha;
    tc.rho0 = c.rho0;
    tc.lr = c.lr;
    tc.batch_size = c.batch_size;
    tc.max_epochs = c.max_epochs;
    tc.loss_mode = static_cast<LossMode>(c.loss_mode);
    tc.early_stop_patience = c.early_stop_patience;
    tc.val_len = c.val_len;
    tc.seed = c.seed;
    return tc;
}

FitConfig to_core(const lyp_fit_config& c) {
    FitConfig fc;
    fc.d = c.d;
    fc.alpha = c.alpha;
    fc.rho0 = c.rho0;
    fc.epsilon = c.epsilon;
    fc.fit_len = c.fit_len;
    fc.warmup_len = c.warmup_len;
    fc.seed = c.seed;
    fc.offset = c.offset;
    return fc;
}

SpectrumConfig to_core(const lyp_spectrum_config& c) {
    SpectrumConfig sc;
    sc.n_steps = c.n_steps;
    sc.transient = c.transient;
    if (c.dt > 0.0) sc.dt = c.dt;
    sc.top_m = c.top_m;
    sc.tol_zero = c.tol_zero;
    sc.frame_seed = c.frame_seed;
    return sc;
}

}  // namespace

extern "C" {

const char* lyp_version(void) { return kVersion; }

const char* lyp_status_name(int status) {
    return error_code_name(static_cast<ErrorCode>(status));
}

const char* lyp_last_error(void) { return g_last_error.c_str(); }

/* ---- ODE systems -------------------------------------------------- */

lyp_ode* lyp_ode_lorenz(double sigma, double rho, double beta) {
    return guarded_handle([&]() -> lyp_ode* {
        return new lyp_ode{lorenz(sigma, rho, beta)};
    });
}

lyp_ode* lyp_ode_rossler4(double a, double b, double c, double d) {
    return guarded_handle([&]() -> lyp_ode* {
        return new lyp_ode{rossler4(a, b, c, d)};
    });
}

lyp_ode* lyp_ode_custom(uint32_t dim, lyp_drift_fn drift,
                        lyp_jacobian_fn jacobian, void* user) {
    return guarded_handle([&]() -> lyp_ode* {
        if (!drift) throw InvalidArgument("lyp_ode_custom: drift required");
        std::function<void(const double*, double*)> jac_fn;
        if (jacobian)
            jac_fn = [jacobian, user](const double* x, double* j) {
                jacobian(x, j, user);
            };
        return new lyp_ode{custom_ode(
            dim,
            [drift, user](const double* x, double* dxdt) {
                drift(x, dxdt, user);
            },
            jac_fn)};
    });
}

void lyp_ode_free(lyp_ode* ode) { delete ode; }

uint32_t lyp_ode_dim(const lyp_ode* ode) { return ode ? ode->sys.dim : 0; }

int lyp_ode_drift(const lyp_ode* ode, const double* state, double* dxdt) {
    if (!ode || !state || !dxdt) return invalid("lyp_ode_drift: null arg");
    return guarded([&] { ode->sys.drift(state, dxdt); });
}

int lyp_ode_jacobian(const lyp_ode* ode, const double* state, double* jac) {
    if (!ode || !state || !jac) return invalid("lyp_ode_jacobian: null arg");
    return guarded([&] { ode->sys.jacobian(state, jac); });
}

int lyp_ode_rk4_step(const lyp_ode* ode, const double* state, double dt,
                     double* out) {
    if (!ode || !state || !out) return invalid("lyp_ode_rk4_step: null arg");
    return guarded([&] { rk4_step(ode->sys, state, dt, out); });
}

lyp_sim_config lyp_sim_config_default(void) {
    lyp_sim_config c;
    std::memset(&c, 0, sizeof(c));
    c.dt_integrate = 1e-3;
    c.n_steps = 201000;
    c.skip = 1000;
    c.stride = 20;
    c.seed = 0;
    return c;
}

int lyp_simulate(const lyp_ode* ode, const lyp_sim_config* config,
                 lyp_traj** out) {
    if (!ode || !config || !out) return invalid("lyp_simulate: null arg");
    return guarded([&] {
        SimConfig sc;
        sc.dt_integrate = config->dt_integrate;
        sc.n_steps = config->n_steps;
        sc.skip = config->skip;
        sc.subsample_stride = config->stride;
        sc.seed = config->seed;
        sc.randomize_initial = config->randomize_initial != 0;
        const uint32_t d = ode->sys.dim;
        if (sc.randomize_initial) {
            if (!config->box_lo || !config->box_hi)
                throw Config("lyp_simulate: randomize needs box_lo/box_hi");
            sc.box_lo = Eigen::Map<const Vec>(config->box_lo, d);
            sc.box_hi = Eigen::Map<const Vec>(config->box_hi, d);
        } else {
            if (!config->initial_state)
                throw Config("lyp_simulate: initial_state required");
            sc.initial_state = Eigen::Map<const Vec>(config->initial_state, d);
        }
        *out = new lyp_traj{simulate(ode->sys, sc)};
    });
}

int lyp_ode_lyapunov(const lyp_ode* ode, const double* x0, double dt,
                     uint64_t n_steps, uint64_t transient, int tangent_mode,
                     lyp_report** out) {
    if (!ode || !x0 || !out) return invalid("lyp_ode_lyapunov: null arg");
    return guarded([&] {
        const Vec x = Eigen::Map<const Vec>(x0, ode->sys.dim);
        *out = new lyp_report{ode_lyapunov_spectrum(
            ode->sys, x, dt, n_steps, transient,
            static_cast<TangentMode>(tangent_mode))};
    });
}

/* ---- Trajectories -------------------------------------------------- */

int lyp_traj_create(uint32_t dim, uint64_t count, double dt,
                    const double* states, lyp_traj** out) {
    if (!states || !out) return invalid("lyp_traj_create: null arg");
    return guarded([&] {
        if (dim == 0) throw InvalidArgument("lyp_traj_create: dim == 0");
        Trajectory t;
        t.dim = dim;
        t.dt = dt;
        t.states.assign(states, states + count * dim);
        *out = new lyp_traj{std::move(t)};
    });
}

void lyp_traj_free(lyp_traj* traj) { delete traj; }

uint32_t lyp_traj_dim(const lyp_traj* traj) { return traj ? traj->t.dim : 0; }

uint64_t lyp_traj_count(const lyp_traj* traj) {
    return traj ? traj->t.count() : 0;
}

double lyp_traj_dt(const lyp_traj* traj) { return traj ? traj->t.dt : 0.0; }

int lyp_traj_has_rescale(const lyp_traj* traj) {
    return traj && traj->t.rescale ? 1 : 0;
}

int lyp_traj_rescale_record(const lyp_traj* traj, double* scale,
                            double* offset) {
    if (!traj || !scale || !offset)
        return invalid("lyp_traj_rescale_record: null arg");
    return guarded([&] {
        if (!traj->t.rescale)
            throw InvalidArgument("trajectory has no rescale record");
        const auto& rec = *traj->t.rescale;
        std::memcpy(scale, rec.scale.data(), rec.scale.size() * sizeof(double));
        std::memcpy(offset, rec.offset.data(),
                    rec.offset.size() * sizeof(double));
    });
}

const double* lyp_traj_states(const lyp_traj* traj) {
    return traj ? traj->t.states.data() : nullptr;
}

int lyp_traj_rescale_to_unit_cube(const lyp_traj* traj, lyp_traj** out) {
    if (!traj || !out) return invalid("lyp_traj_rescale: null arg");
    return guarded([&] { *out = new lyp_traj{rescale_to_unit_cube(traj->t)}; });
}

int lyp_traj_save(const lyp_traj* traj, const char* path) {
    if (!traj || !path) return invalid("lyp_traj_save: null arg");
    return guarded([&] { save_trajectory(traj->t, path); });
}

int lyp_traj_load(const char* path, lyp_traj** out) {
    if (!path || !out) return invalid("lyp_traj_load: null arg");
    return guarded([&] { *out = new lyp_traj{load_trajectory(path)}; });
}

/* ---- Recurrent machines -------------------------------------------- */

int lyp_rnn_spectral_init(uint32_t d, uint32_t k, double rho0, double alpha,
                          uint64_t seed, lyp_rnn** out) {
    if (!out) return invalid("lyp_rnn_spectral_init: null out");
    return guarded([&] {
        RngStream rng(seed);
        *out = new lyp_rnn{spectral_init(d, k, rho0, alpha, rng)};
    });
}

void lyp_rnn_free(lyp_rnn* rnn) { delete rnn; }

uint32_t lyp_rnn_hidden_dim(const lyp_rnn* rnn) { return rnn ? rnn->p.d : 0; }
uint32_t lyp_rnn_signal_dim(const lyp_rnn* rnn) { return rnn ? rnn->p.k : 0; }
double lyp_rnn_alpha(const lyp_rnn* rnn) { return rnn ? rnn->p.alpha : 0.0; }

int lyp_rnn_weights(const lyp_rnn* rnn, double* w, double* w_in,
                    double* w_out, double* b) {
    if (!rnn) return invalid("lyp_rnn_weights: null rnn");
    return guarded([&] {
        if (w) copy_rowmajor(rnn->p.w, w);
        if (w_in) copy_rowmajor(rnn->p.w_in, w_in);
        if (w_out) copy_rowmajor(rnn->p.w_out, w_out);
        if (b)
            std::memcpy(b, rnn->p.b.data(), rnn->p.b.size() * sizeof(double));
    });
}

int lyp_rnn_save(const lyp_rnn* rnn, const char* path) {
    if (!rnn || !path) return invalid("lyp_rnn_save: null arg");
    return guarded([&] { save_rnn(rnn->p, path); });
}

int lyp_rnn_load(const char* path, lyp_rnn** out) {
    if (!path || !out) return invalid("lyp_rnn_load: null arg");
    return guarded([&] { *out = new lyp_rnn{load_rnn(path)}; });
}

int lyp_rnn_driven_step(const lyp_rnn* rnn, double* h, const double* u,
                        double* u_next) {
    if (!rnn || !h || !u) return invalid("lyp_rnn_driven_step: null arg");
    return guarded([&] {
        const auto& p = rnn->p;
        auto [hn, un] = driven_step(p, Eigen::Map<const Vec>(h, p.d),
                                    Eigen::Map<const Vec>(u, p.k));
        std::memcpy(h, hn.data(), p.d * sizeof(double));
        if (u_next) std::memcpy(u_next, un.data(), p.k * sizeof(double));
    });
}

int lyp_rnn_autonomous_step(const lyp_rnn* rnn, double* h, double* u_next) {
    if (!rnn || !h) return invalid("lyp_rnn_autonomous_step: null arg");
    return guarded([&] {
        const auto& p = rnn->p;
        auto [hn, un] = autonomous_step(p, Eigen::Map<const Vec>(h, p.d));
        std::memcpy(h, hn.data(), p.d * sizeof(double));
        if (u_next) std::memcpy(u_next, un.data(), p.k * sizeof(double));
    });
}

int lyp_rnn_warmup(const lyp_rnn* rnn, double* h, const double* seq,
                   uint64_t n) {
    if (!rnn || !h || !seq) return invalid("lyp_rnn_warmup: null arg");
    return guarded([&] {
        const auto& p = rnn->p;
        Eigen::Map<const Mat> u_seq(seq, p.k,
                                    static_cast<Eigen::Index>(n));
        Vec hn = warmup(p, Eigen::Map<const Vec>(h, p.d), u_seq);
        std::memcpy(h, hn.data(), p.d * sizeof(double));
    });
}

int lyp_rnn_generate(const lyp_rnn* rnn, double* h, uint64_t n, double* out) {
    if (!rnn || !h || !out) return invalid("lyp_rnn_generate: null arg");
    return guarded([&] {
        const auto& p = rnn->p;
        auto [seq, hn] =
            generate_autonomous(p, Eigen::Map<const Vec>(h, p.d), n);
        std::memcpy(h, hn.data(), p.d * sizeof(double));
        for (uint64_t t = 0; t < n; ++t)
            std::memcpy(out + t * p.k,
                        seq.col(static_cast<Eigen::Index>(t)).data(),
                        p.k * sizeof(double));
    });
}

int lyp_rnn_predict(const lyp_rnn* rnn, double* h, uint64_t n, double* out) {
    if (!rnn || !h || !out) return invalid("lyp_rnn_predict: null arg");
    return guarded([&] {
        const auto& p = rnn->p;
        Vec state = Eigen::Map<const Vec>(h, p.d);
        Mat seq = predict_autonomous(p, state, n);
        std::memcpy(h, state.data(), p.d * sizeof(double));
        for (uint64_t t = 0; t < n; ++t)
            std::memcpy(out + t * p.k,
                        seq.col(static_cast<Eigen::Index>(t)).data(),
                        p.k * sizeof(double));
    });
}

int lyp_rnn_jacobian(const lyp_rnn* rnn, const double* h_next, double* out) {
    if (!rnn || !h_next || !out) return invalid("lyp_rnn_jacobian: null arg");
    return guarded([&] {
        const auto& p = rnn->p;
        copy_rowmajor(rnn_jacobian(p, Eigen::Map<const Vec>(h_next, p.d)),
                      out);
    });
}

/* ---- Datasets and training ----------------------------------------- */

int lyp_dataset_make(const lyp_traj* traj, uint64_t n_seq,
                     uint32_t warmup_len, uint32_t target_len, uint64_t seed,
                     lyp_dataset** out) {
    if (!traj || !out) return invalid("lyp_dataset_make: null arg");
    return guarded([&] {
        RngStream rng(seed);
        *out = new lyp_dataset{
            make_dataset(traj->t, n_seq, warmup_len, target_len, rng)};
    });
}

void lyp_dataset_free(lyp_dataset* ds) { delete ds; }

uint64_t lyp_dataset_size(const lyp_dataset* ds) {
    return ds ? ds->ds.size() : 0;
}
uint32_t lyp_dataset_signal_dim(const lyp_dataset* ds) {
    return ds ? ds->ds.k : 0;
}
uint32_t lyp_dataset_warmup_len(const lyp_dataset* ds) {
    return ds ? ds->ds.warmup_len : 0;
}
uint32_t lyp_dataset_target_len(const lyp_dataset* ds) {
    return ds ? ds->ds.target_len : 0;
}
double lyp_dataset_dt(const lyp_dataset* ds) { return ds ? ds->ds.dt : 0.0; }

const double* lyp_dataset_window(const lyp_dataset* ds, uint64_t i) {
    if (!ds || i >= ds->ds.size()) return nullptr;
    return ds->ds.window(i);
}

int lyp_dataset_save(const lyp_dataset* ds, const char* path) {
    if (!ds || !path) return invalid("lyp_dataset_save: null arg");
    return guarded([&] { save_dataset(ds->ds, path); });
}

int lyp_dataset_load(const char* path, lyp_dataset** out) {
    if (!path || !out) return invalid("lyp_dataset_load: null arg");
    return guarded([&] { *out = new lyp_dataset{load_dataset(path)}; });
}

lyp_train_config lyp_train_config_default(void) {
    lyp_train_config c;
    std::memset(&c, 0, sizeof(c));
    c.d = 200;
    c.alpha = 0.3;
    c.rho0 = 1.2;
    c.lr = 1e-3;
    c.batch_size = 200;
    c.max_epochs = 100;
    c.loss_mode = LYP_LOSS_SEQ2SEQ;
    c.early_stop_patience = 5;
    c.val_len = 400;
    return c;
}

int lyp_train(const lyp_dataset* ds, const lyp_train_config* config,
              lyp_rnn** out, lyp_train_report** report_out) {
    if (!ds || !config || !out) return invalid("lyp_train: null arg");
    return guarded([&] {
        auto [params, report] = train(ds->ds, to_core(*config));
        *out = new lyp_rnn{std::move(params)};
        if (report_out)
            *report_out = new lyp_train_report{std::move(report)};
    });
}

uint32_t lyp_train_report_epochs(const lyp_train_report* rep) {
    return rep ? static_cast<uint32_t>(rep->r.train_loss.size()) : 0;
}

double lyp_train_report_train_loss(const lyp_train_report* rep,
                                   uint32_t epoch) {
    if (!rep || epoch >= rep->r.train_loss.size()) return -1.0;
    return rep->r.train_loss[epoch];
}

double lyp_train_report_val_loss(const lyp_train_report* rep,
                                 uint32_t epoch) {
    if (!rep || epoch >= rep->r.val_loss.size()) return -1.0;
    return rep->r.val_loss[epoch];
}

uint32_t lyp_train_report_best_epoch(const lyp_train_report* rep) {
    return rep ? rep->r.best_epoch : 0;
}

uint32_t lyp_train_report_stopped_epoch(const lyp_train_report* rep) {
    return rep ? rep->r.stopped_epoch : 0;
}

int lyp_train_report_aborted(const lyp_train_report* rep) {
    return rep && rep->r.aborted ? 1 : 0;
}

void lyp_train_report_free(lyp_train_report* rep) { delete rep; }

int lyp_rnn_dataset_loss(const lyp_rnn* rnn, const lyp_dataset* ds,
                         uint64_t item, uint32_t loss_mode, double* out) {
    if (!rnn || !ds || !out) return invalid("lyp_rnn_dataset_loss: null arg");
    return guarded([&] {
        *out = sequence_loss(rnn->p, ds->ds, item,
                             static_cast<LossMode>(loss_mode),
                             ds->ds.target_len);
    });
}

lyp_fit_config lyp_fit_config_default(void) {
    lyp_fit_config c;
    std::memset(&c, 0, sizeof(c));
    c.d = 300;
    c.alpha = 0.3;
    c.rho0 = 1.2;
    c.epsilon = 1e-6;
    c.fit_len = 4000;
    c.warmup_len = 100;
    return c;
}

int lyp_rc_fit(const lyp_traj* traj, const lyp_fit_config* config,
               lyp_rnn** out) {
    if (!traj || !config || !out) return invalid("lyp_rc_fit: null arg");
    return guarded(
        [&] { *out = new lyp_rnn{rc_fit(traj->t, to_core(*config))}; });
}

/* ---- Lyapunov analysis ---------------------------------------------- */

lyp_spectrum_config lyp_spectrum_config_default(void) {
    lyp_spectrum_config c;
    std::memset(&c, 0, sizeof(c));
    c.n_steps = 1600;
    c.transient = 100;
    c.dt = 0.0;
    c.top_m = 0;
    c.tol_zero = 0.02;
    return c;
}

int lyp_rnn_lyapunov(const lyp_rnn* rnn, const double* h0,
                     const lyp_spectrum_config* config, lyp_report** out) {
    if (!rnn || !config || !out) return invalid("lyp_rnn_lyapunov: null arg");
    return guarded([&] {
        const auto& p = rnn->p;
        Vec h = h0 ? Vec(Eigen::Map<const Vec>(h0, p.d)) : Vec(Vec::Zero(p.d));
        *out = new lyp_report{rnn_lyapunov_spectrum(p, h, to_core(*config))};
    });
}

uint32_t lyp_report_spectrum_size(const lyp_report* rep) {
    return rep ? static_cast<uint32_t>(rep->r.spectrum.size()) : 0;
}

int lyp_report_spectrum(const lyp_report* rep, double* out) {
    if (!rep || !out) return invalid("lyp_report_spectrum: null arg");
    std::memcpy(out, rep->r.spectrum.data(),
                rep->r.spectrum.size() * sizeof(double));
    return LYP_OK;
}

double lyp_report_dimension(const lyp_report* rep) {
    return rep ? rep->r.dl_dimension : 0.0;
}

int lyp_report_saturated(const lyp_report* rep) {
    return rep && rep->r.saturated ? 1 : 0;
}

int lyp_report_diverged(const lyp_report* rep) {
    return rep && rep->r.diverged ? 1 : 0;
}

int lyp_report_attractor_class(const lyp_report* rep) {
    return rep ? static_cast<int>(rep->r.attractor_class) : -1;
}

uint64_t lyp_report_steps(const lyp_report* rep) {
    return rep ? rep->r.n_steps : 0;
}

uint64_t lyp_report_transient(const lyp_report* rep) {
    return rep ? rep->r.transient : 0;
}

double lyp_report_dt(const lyp_report* rep) {
    return rep && rep->r.dt ? *rep->r.dt : 0.0;
}

void lyp_report_free(lyp_report* rep) { delete rep; }

int lyp_kaplan_yorke(const double* spectrum, uint32_t n, int* saturated,
                     double* out) {
    if (!spectrum || !out) return invalid("lyp_kaplan_yorke: null arg");
    return guarded([&] {
        bool sat = false;
        *out = kaplan_yorke(std::vector<double>(spectrum, spectrum + n), &sat);
        if (saturated) *saturated = sat ? 1 : 0;
    });
}

int lyp_classify_attractor(const double* spectrum, uint32_t n, int divergent,
                           double tol_zero, int* out) {
    if (!spectrum || !out) return invalid("lyp_classify_attractor: null arg");
    return guarded([&] {
        *out = static_cast<int>(
            classify_attractor(std::vector<double>(spectrum, spectrum + n),
                               divergent != 0, tol_zero));
    });
}

int lyp_prediction_error_curve(const double* truth, const double* predicted,
                               uint64_t n, uint32_t k, double theta,
                               double* rmse_out, uint64_t* valid_horizon) {
    if (!truth || !predicted)
        return invalid("lyp_prediction_error_curve: null arg");
    return guarded([&] {
        Eigen::Map<const Mat> t(truth, k, static_cast<Eigen::Index>(n));
        Eigen::Map<const Mat> pr(predicted, k, static_cast<Eigen::Index>(n));
        PredictionErrorCurve curve = prediction_error_curve(t, pr, theta);
        if (rmse_out)
            std::memcpy(rmse_out, curve.rmse.data(),
                        curve.rmse.size() * sizeof(double));
        if (valid_horizon) *valid_horizon = curve.valid_horizon;
    });
}

/* ---- Layered machines ----------------------------------------------- */

int lyp_layered_random(uint32_t layers, uint32_t width, uint32_t out_dim,
                       double rho0, int sigmoid_activation, uint64_t seed,
                       lyp_layered** out) {
    if (!out) return invalid("lyp_layered_random: null out");
    return guarded([&] {
        RngStream rng(seed);
        *out = new lyp_layered{layered_random(
            layers, width, out_dim, rho0,
            sigmoid_activation ? Activation::Sigmoid : Activation::Tanh,
            rng)};
    });
}

void lyp_layered_free(lyp_layered* p) { delete p; }

uint32_t lyp_layered_layers(const lyp_layered* p) {
    return p ? p->p.layers : 0;
}
uint32_t lyp_layered_width(const lyp_layered* p) { return p ? p->p.width : 0; }
uint32_t lyp_layered_out_dim(const lyp_layered* p) {
    return p ? p->p.out_dim : 0;
}

int lyp_layered_step(const lyp_layered* p, double* h, double* u_next) {
    if (!p || !h) return invalid("lyp_layered_step: null arg");
    return guarded([&] {
        auto [hn, un] =
            layered_step(p->p, Eigen::Map<const Vec>(h, p->p.state_size()));
        std::memcpy(h, hn.data(), p->p.state_size() * sizeof(double));
        if (u_next)
            std::memcpy(u_next, un.data(), p->p.out_dim * sizeof(double));
    });
}

int lyp_layered_jacobian(const lyp_layered* p, const double* h_next,
                         double* out) {
    if (!p || !h_next || !out) return invalid("lyp_layered_jacobian: null arg");
    return guarded([&] {
        copy_rowmajor(
            layered_jacobian(p->p, Eigen::Map<const Vec>(h_next,
                                                         p->p.state_size())),
            out);
    });
}

int lyp_layered_lyapunov(const lyp_layered* p, const double* h0,
                         const lyp_spectrum_config* config,
                         lyp_report** out) {
    if (!p || !config || !out) return invalid("lyp_layered_lyapunov: null arg");
    return guarded([&] {
        Vec h = h0 ? Vec(Eigen::Map<const Vec>(h0, p->p.state_size()))
                   : Vec(Vec::Zero(p->p.state_size()));
        *out =
            new lyp_report{layered_lyapunov_spectrum(p->p, h, to_core(*config))};
    });
}

int lyp_layered_save(const lyp_layered* p, const char* path) {
    if (!p || !path) return invalid("lyp_layered_save: null arg");
    return guarded([&] { save_layered(p->p, path); });
}

int lyp_layered_load(const char* path, lyp_layered** out) {
    if (!path || !out) return invalid("lyp_layered_load: null arg");
    return guarded([&] { *out = new lyp_layered{load_layered(path)}; });
}

/* ---- Ensembles ------------------------------------------------------ */

lyp_ensemble_config lyp_ensemble_config_default(void) {
    lyp_ensemble_config c;
    std::memset(&c, 0, sizeof(c));
    c.mode = LYP_ENSEMBLE_FIT;
    c.machines = 1;
    c.traj_per_machine = 1;
    c.train_cfg = lyp_train_config_default();
    c.fit_cfg = lyp_fit_config_default();
    c.n_seq = 2000;
    c.warmup_len = 100;
    c.target_len = 120;
    c.spectrum = lyp_spectrum_config_default();
    c.run_warmup_len = 100;
    c.jobs = 1;
    return c;
}

int lyp_ensemble_run(const lyp_traj* traj, const lyp_ensemble_config* config,
                     lyp_ensemble_report** out) {
    if (!traj || !config || !out) return invalid("lyp_ensemble_run: null arg");
    return guarded([&] {
        EnsembleConfig ec;
        ec.mode = static_cast<EnsembleMode>(config->mode);
        ec.machines = config->machines;
        ec.traj_per_machine = config->traj_per_machine;
        ec.train_cfg = to_core(config->train_cfg);
        ec.fit_cfg = to_core(config->fit_cfg);
        ec.n_seq = config->n_seq;
        ec.warmup_len = config->warmup_len;
        ec.target_len = config->target_len;
        ec.spectrum = to_core(config->spectrum);
        ec.run_warmup_len = config->run_warmup_len;
        ec.seed = config->seed;
        ec.jobs = config->jobs;

        auto rep = new lyp_ensemble_report{run_ensemble(traj->t, ec), {}};
        rep->member_reports.reserve(rep->r.members.size());
        for (const auto& m : rep->r.members)
            rep->member_reports.push_back(lyp_report{m.report});
        *out = rep;
    });
}

uint64_t lyp_ensemble_members(const lyp_ensemble_report* rep) {
    return rep ? rep->r.members.size() : 0;
}

const lyp_report* lyp_ensemble_member_report(const lyp_ensemble_report* rep,
                                             uint64_t i) {
    if (!rep || i >= rep->r.members.size()) return nullptr;
    if (!rep->r.members[i].ok) return nullptr;
    return &rep->member_reports[i];
}

int lyp_ensemble_member_ok(const lyp_ensemble_report* rep, uint64_t i) {
    return rep && i < rep->r.members.size() && rep->r.members[i].ok ? 1 : 0;
}

const char* lyp_ensemble_member_error(const lyp_ensemble_report* rep,
                                      uint64_t i) {
    if (!rep || i >= rep->r.members.size()) return "";
    return rep->r.members[i].error.c_str();
}

uint32_t lyp_ensemble_member_machine(const lyp_ensemble_report* rep,
                                     uint64_t i) {
    return rep && i < rep->r.members.size() ? rep->r.members[i].machine : 0;
}

uint32_t lyp_ensemble_member_run(const lyp_ensemble_report* rep, uint64_t i) {
    return rep && i < rep->r.members.size() ? rep->r.members[i].run : 0;
}

int lyp_ensemble_histogram(const lyp_ensemble_report* rep, uint64_t* out) {
    if (!rep || !out) return invalid("lyp_ensemble_histogram: null arg");
    std::memcpy(out, rep->r.histogram.data(),
                rep->r.histogram.size() * sizeof(uint64_t));
    return LYP_OK;
}

uint64_t lyp_ensemble_class_tally(const lyp_ensemble_report* rep,
                                  int attractor_class) {
    if (!rep || attractor_class < 0 || attractor_class > 3) return 0;
    return rep->r.class_tally[attractor_class];
}

uint64_t lyp_ensemble_aborted(const lyp_ensemble_report* rep) {
    return rep ? rep->r.aborted : 0;
}

void lyp_ensemble_report_free(lyp_ensemble_report* rep) { delete rep; }

} /* extern "C" */
