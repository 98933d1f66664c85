/* lyapnet C API: chaotic-trajectory simulation, recurrent-network training
 * (gradient and reservoir style) and Lyapunov-spectrum analysis of the
 * trained machines.
 *
 * All objects are opaque handles created and destroyed by this library.
 * Functions returning int use the lyp_status codes below; 0 is success and
 * lyp_last_error() describes the most recent failure on the calling thread.
 * Matrix buffers are row-major double arrays.
 */
#ifndef LYAPNET_H
#define LYAPNET_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lyp_status {
    LYP_OK = 0,
    LYP_ERR_INVALID = 1,
    LYP_ERR_CONFIG = 2,
    LYP_ERR_BLOWUP = 3,
    LYP_ERR_DEGENERATE_BASIS = 4,
    LYP_ERR_SINGULAR = 5,
    LYP_ERR_NO_CONVERGENCE = 6,
    LYP_ERR_TOO_SHORT = 7,
    LYP_ERR_DEGENERATE_RANGE = 8,
    LYP_ERR_LENGTH_MISMATCH = 9,
    LYP_ERR_EMPTY_SPECTRUM = 10,
    LYP_ERR_IO = 11,
    LYP_ERR_UNKNOWN = 12
} lyp_status;

typedef enum lyp_attractor_class {
    LYP_ATTRACTOR_FIXED_POINT = 0,
    LYP_ATTRACTOR_LIMIT_CYCLE = 1,
    LYP_ATTRACTOR_STRANGE = 2,
    LYP_ATTRACTOR_DIVERGENT = 3
} lyp_attractor_class;

typedef enum lyp_loss_mode {
    LYP_LOSS_SEQ2SEQ = 0,
    LYP_LOSS_ONE_STEP = 1
} lyp_loss_mode;

typedef enum lyp_ensemble_mode {
    LYP_ENSEMBLE_TRAIN = 0,
    LYP_ENSEMBLE_FIT = 1
} lyp_ensemble_mode;

typedef enum lyp_tangent_mode {
    LYP_TANGENT_VARIATIONAL_RK4 = 0,
    LYP_TANGENT_EULER = 1
} lyp_tangent_mode;

typedef struct lyp_ode lyp_ode;
typedef struct lyp_traj lyp_traj;
typedef struct lyp_rnn lyp_rnn;
typedef struct lyp_layered lyp_layered;
typedef struct lyp_dataset lyp_dataset;
typedef struct lyp_report lyp_report;
typedef struct lyp_train_report lyp_train_report;
typedef struct lyp_ensemble_report lyp_ensemble_report;

const char* lyp_version(void);
const char* lyp_status_name(int status);
/* Message for the last failing call on this thread; empty string if none. */
const char* lyp_last_error(void);

/* ---- ODE systems -------------------------------------------------- */

typedef void (*lyp_drift_fn)(const double* state, double* dxdt, void* user);
/* jac is row-major dim x dim. */
typedef void (*lyp_jacobian_fn)(const double* state, double* jac, void* user);

lyp_ode* lyp_ode_lorenz(double sigma, double rho, double beta);
lyp_ode* lyp_ode_rossler4(double a, double b, double c, double d);
/* jacobian may be NULL: central finite differences of drift are used. */
lyp_ode* lyp_ode_custom(uint32_t dim, lyp_drift_fn drift,
                        lyp_jacobian_fn jacobian, void* user);
void lyp_ode_free(lyp_ode* ode);
uint32_t lyp_ode_dim(const lyp_ode* ode);
int lyp_ode_drift(const lyp_ode* ode, const double* state, double* dxdt);
int lyp_ode_jacobian(const lyp_ode* ode, const double* state, double* jac);
int lyp_ode_rk4_step(const lyp_ode* ode, const double* state, double dt,
                     double* out);

typedef struct lyp_sim_config {
    double dt_integrate;
    uint64_t n_steps;
    uint64_t skip;
    uint32_t stride;
    /* dim doubles; ignored when randomize_initial is set */
    const double* initial_state;
    int randomize_initial;
    const double* box_lo; /* dim doubles, used when randomizing */
    const double* box_hi;
    uint64_t seed;
} lyp_sim_config;

lyp_sim_config lyp_sim_config_default(void);
int lyp_simulate(const lyp_ode* ode, const lyp_sim_config* config,
                 lyp_traj** out);

int lyp_ode_lyapunov(const lyp_ode* ode, const double* x0, double dt,
                     uint64_t n_steps, uint64_t transient, int tangent_mode,
                     lyp_report** out);

/* ---- Trajectories -------------------------------------------------- */

int lyp_traj_create(uint32_t dim, uint64_t count, double dt,
                    const double* states, lyp_traj** out);
void lyp_traj_free(lyp_traj* traj);
uint32_t lyp_traj_dim(const lyp_traj* traj);
uint64_t lyp_traj_count(const lyp_traj* traj);
double lyp_traj_dt(const lyp_traj* traj);
int lyp_traj_has_rescale(const lyp_traj* traj);
/* scale/offset are dim doubles; original = scale * stored + offset */
int lyp_traj_rescale_record(const lyp_traj* traj, double* scale,
                            double* offset);
/* contiguous count x dim array owned by the handle */
const double* lyp_traj_states(const lyp_traj* traj);
int lyp_traj_rescale_to_unit_cube(const lyp_traj* traj, lyp_traj** out);
int lyp_traj_save(const lyp_traj* traj, const char* path);
int lyp_traj_load(const char* path, lyp_traj** out);

/* ---- Recurrent machines -------------------------------------------- */

int lyp_rnn_spectral_init(uint32_t d, uint32_t k, double rho0, double alpha,
                          uint64_t seed, lyp_rnn** out);
void lyp_rnn_free(lyp_rnn* rnn);
uint32_t lyp_rnn_hidden_dim(const lyp_rnn* rnn);
uint32_t lyp_rnn_signal_dim(const lyp_rnn* rnn);
double lyp_rnn_alpha(const lyp_rnn* rnn);
/* Any destination may be NULL. w: d*d, w_in: d*k, w_out: k*d, b: d. */
int lyp_rnn_weights(const lyp_rnn* rnn, double* w, double* w_in,
                    double* w_out, double* b);
int lyp_rnn_save(const lyp_rnn* rnn, const char* path);
int lyp_rnn_load(const char* path, lyp_rnn** out);

/* h is d doubles, updated in place; u_next (k doubles) may be NULL. */
int lyp_rnn_driven_step(const lyp_rnn* rnn, double* h, const double* u,
                        double* u_next);
int lyp_rnn_autonomous_step(const lyp_rnn* rnn, double* h, double* u_next);
/* seq holds n samples of k doubles each, fed in order. */
int lyp_rnn_warmup(const lyp_rnn* rnn, double* h, const double* seq,
                   uint64_t n);
/* out holds n samples of k doubles: readouts after each autonomous step. */
int lyp_rnn_generate(const lyp_rnn* rnn, double* h, uint64_t n, double* out);
/* Readout-first variant: out[0] is the forecast from h itself. */
int lyp_rnn_predict(const lyp_rnn* rnn, double* h, uint64_t n, double* out);
/* Jacobian of the autonomous update at h_next; out is d*d row-major. */
int lyp_rnn_jacobian(const lyp_rnn* rnn, const double* h_next, double* out);

/* ---- Datasets and training ----------------------------------------- */

int lyp_dataset_make(const lyp_traj* traj, uint64_t n_seq,
                     uint32_t warmup_len, uint32_t target_len, uint64_t seed,
                     lyp_dataset** out);
void lyp_dataset_free(lyp_dataset* ds);
uint64_t lyp_dataset_size(const lyp_dataset* ds);
uint32_t lyp_dataset_signal_dim(const lyp_dataset* ds);
uint32_t lyp_dataset_warmup_len(const lyp_dataset* ds);
uint32_t lyp_dataset_target_len(const lyp_dataset* ds);
double lyp_dataset_dt(const lyp_dataset* ds);
/* window i: (warmup_len + target_len) samples of k doubles */
const double* lyp_dataset_window(const lyp_dataset* ds, uint64_t i);
int lyp_dataset_save(const lyp_dataset* ds, const char* path);
int lyp_dataset_load(const char* path, lyp_dataset** out);

typedef struct lyp_train_config {
    uint32_t d;
    double alpha;
    double rho0;
    double lr;
    uint32_t batch_size;
    uint32_t max_epochs;
    uint32_t loss_mode; /* lyp_loss_mode */
    uint32_t early_stop_patience;
    uint32_t val_len;
    uint64_t seed;
} lyp_train_config;

lyp_train_config lyp_train_config_default(void);
int lyp_train(const lyp_dataset* ds, const lyp_train_config* config,
              lyp_rnn** out, lyp_train_report** report_out);

uint32_t lyp_train_report_epochs(const lyp_train_report* rep);
/* epoch 0 is the initialization */
double lyp_train_report_train_loss(const lyp_train_report* rep,
                                   uint32_t epoch);
double lyp_train_report_val_loss(const lyp_train_report* rep, uint32_t epoch);
uint32_t lyp_train_report_best_epoch(const lyp_train_report* rep);
uint32_t lyp_train_report_stopped_epoch(const lyp_train_report* rep);
int lyp_train_report_aborted(const lyp_train_report* rep);
void lyp_train_report_free(lyp_train_report* rep);

/* Mean loss of one dataset window under either mode. */
int lyp_rnn_dataset_loss(const lyp_rnn* rnn, const lyp_dataset* ds,
                         uint64_t item, uint32_t loss_mode, double* out);

typedef struct lyp_fit_config {
    uint32_t d;
    double alpha;
    double rho0;
    double epsilon;
    uint64_t fit_len;
    uint32_t warmup_len;
    uint64_t seed;
    uint64_t offset;
} lyp_fit_config;

lyp_fit_config lyp_fit_config_default(void);
int lyp_rc_fit(const lyp_traj* traj, const lyp_fit_config* config,
               lyp_rnn** out);

/* ---- Lyapunov analysis ---------------------------------------------- */

typedef struct lyp_spectrum_config {
    uint64_t n_steps;
    uint64_t transient;
    double dt;      /* <= 0: exponents stay in per-step units */
    uint32_t top_m; /* 0 = full frame up to d 64, else leading 16 */
    double tol_zero;
    uint64_t frame_seed;
} lyp_spectrum_config;

lyp_spectrum_config lyp_spectrum_config_default(void);
/* h0 may be NULL for the zero state. */
int lyp_rnn_lyapunov(const lyp_rnn* rnn, const double* h0,
                     const lyp_spectrum_config* config, lyp_report** out);

uint32_t lyp_report_spectrum_size(const lyp_report* rep);
int lyp_report_spectrum(const lyp_report* rep, double* out);
double lyp_report_dimension(const lyp_report* rep);
int lyp_report_saturated(const lyp_report* rep);
int lyp_report_diverged(const lyp_report* rep);
int lyp_report_attractor_class(const lyp_report* rep);
uint64_t lyp_report_steps(const lyp_report* rep);
uint64_t lyp_report_transient(const lyp_report* rep);
/* 0 when the report is in per-step units */
double lyp_report_dt(const lyp_report* rep);
void lyp_report_free(lyp_report* rep);

int lyp_kaplan_yorke(const double* spectrum_sorted_desc, uint32_t n,
                     int* saturated, double* out);
/* Returns the class through *out. */
int lyp_classify_attractor(const double* spectrum_sorted_desc, uint32_t n,
                           int divergent, double tol_zero, int* out);
/* truth/predicted: n samples of k doubles. rmse_out (n doubles) optional. */
int lyp_prediction_error_curve(const double* truth, const double* predicted,
                               uint64_t n, uint32_t k, double theta,
                               double* rmse_out, uint64_t* valid_horizon);

/* ---- Layered machines ----------------------------------------------- */

int lyp_layered_random(uint32_t layers, uint32_t width, uint32_t out_dim,
                       double rho0, int sigmoid_activation, uint64_t seed,
                       lyp_layered** out);
void lyp_layered_free(lyp_layered* p);
uint32_t lyp_layered_layers(const lyp_layered* p);
uint32_t lyp_layered_width(const lyp_layered* p);
uint32_t lyp_layered_out_dim(const lyp_layered* p);
/* h: layers*width doubles, bottom layer first; updated in place. */
int lyp_layered_step(const lyp_layered* p, double* h, double* u_next);
/* out: (layers*width)^2 doubles, row-major. */
int lyp_layered_jacobian(const lyp_layered* p, const double* h_next,
                         double* out);
int lyp_layered_lyapunov(const lyp_layered* p, const double* h0,
                         const lyp_spectrum_config* config, lyp_report** out);
int lyp_layered_save(const lyp_layered* p, const char* path);
int lyp_layered_load(const char* path, lyp_layered** out);

/* ---- Ensembles ------------------------------------------------------ */

#define LYP_HISTOGRAM_BINS 60

typedef struct lyp_ensemble_config {
    uint32_t mode; /* lyp_ensemble_mode */
    uint32_t machines;
    uint32_t traj_per_machine;
    lyp_train_config train_cfg;
    lyp_fit_config fit_cfg;
    /* dataset construction, train mode only */
    uint64_t n_seq;
    uint32_t warmup_len;
    uint32_t target_len;
    lyp_spectrum_config spectrum;
    uint32_t run_warmup_len;
    uint64_t seed;
    uint32_t jobs;
} lyp_ensemble_config;

lyp_ensemble_config lyp_ensemble_config_default(void);
int lyp_ensemble_run(const lyp_traj* traj, const lyp_ensemble_config* config,
                     lyp_ensemble_report** out);

uint64_t lyp_ensemble_members(const lyp_ensemble_report* rep);
/* Borrowed pointer, valid while the ensemble report lives; NULL when the
 * member aborted before producing a report. */
const lyp_report* lyp_ensemble_member_report(const lyp_ensemble_report* rep,
                                             uint64_t i);
int lyp_ensemble_member_ok(const lyp_ensemble_report* rep, uint64_t i);
const char* lyp_ensemble_member_error(const lyp_ensemble_report* rep,
                                      uint64_t i);
uint32_t lyp_ensemble_member_machine(const lyp_ensemble_report* rep,
                                     uint64_t i);
uint32_t lyp_ensemble_member_run(const lyp_ensemble_report* rep, uint64_t i);
/* out: LYP_HISTOGRAM_BINS counts for dimension bins [0.0, 6.0) step 0.1 */
int lyp_ensemble_histogram(const lyp_ensemble_report* rep, uint64_t* out);
uint64_t lyp_ensemble_class_tally(const lyp_ensemble_report* rep,
                                  int attractor_class);
uint64_t lyp_ensemble_aborted(const lyp_ensemble_report* rep);
void lyp_ensemble_report_free(lyp_ensemble_report* rep);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LYAPNET_H */
