// lyapnet command-line tool. Links the public C API only; all file formats
// and numerics live behind it. Subcommands: simulate | make-dataset |
// train | fit-rc | analyze | ensemble.
//
// Exit codes: 0 success, 2 config/usage/io error, 3 numerical failure.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lyapnet.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CliError {
    int exit_code;
    std::string message;
};

[[noreturn]] void fail_config(const std::string& msg) {
    throw CliError{kExitConfig, msg};
}

[[noreturn]] void fail_status(int status, const std::string& context) {
    const std::string msg = context + ": " + lyp_status_name(status) + " (" +
                            lyp_last_error() + ")";
    switch (status) {
        case LYP_ERR_BLOWUP:
        case LYP_ERR_DEGENERATE_BASIS:
        case LYP_ERR_SINGULAR:
        case LYP_ERR_NO_CONVERGENCE:
        case LYP_ERR_DEGENERATE_RANGE:
            throw CliError{kExitNumerical, msg};
        default:
            throw CliError{kExitConfig, msg};
    }
}

void check(int status, const std::string& context) {
    if (status != LYP_OK) fail_status(status, context);
}

// RAII wrappers for the opaque handles
template <typename T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    explicit Handle(T* p) : ptr(p) {}
    ~Handle() { reset(); }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
    Handle& operator=(Handle&& o) noexcept {
        if (this != &o) {
            reset();
            ptr = o.ptr;
            o.ptr = nullptr;
        }
        return *this;
    }
    void reset() {
        if (ptr) Free(ptr);
        ptr = nullptr;
    }
    T** out() {
        reset();
        return &ptr;
    }
    T* get() const { return ptr; }
    explicit operator bool() const { return ptr != nullptr; }
};

using OdeHandle = Handle<lyp_ode, lyp_ode_free>;
using TrajHandle = Handle<lyp_traj, lyp_traj_free>;
using RnnHandle = Handle<lyp_rnn, lyp_rnn_free>;
using LayeredHandle = Handle<lyp_layered, lyp_layered_free>;
using DatasetHandle = Handle<lyp_dataset, lyp_dataset_free>;
using ReportHandle = Handle<lyp_report, lyp_report_free>;
using TrainReportHandle = Handle<lyp_train_report, lyp_train_report_free>;
using EnsembleHandle = Handle<lyp_ensemble_report, lyp_ensemble_report_free>;

// ---- config / output helpers ----------------------------------------

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_config("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        fail_config(path + ": " + e.what());
    }
    return j;
}

void check_keys(const json& j, const std::string& where,
                const std::vector<std::string>& allowed) {
    if (!j.is_object()) fail_config(where + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const auto& k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) fail_config(where + ": unknown field \"" + it.key() + "\"");
    }
}

void check_version(const json& j, const std::string& where) {
    if (j.contains("version") && j["version"].get<int>() != 1)
        fail_config(where + ": unsupported config version");
}

void atomic_write_text(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail_config("cannot write " + tmp);
        out << text;
        if (!out.good()) fail_config("write error on " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail_config("cannot rename " + tmp + " to " + path);
}

void write_json(const std::string& path, const json& j) {
    atomic_write_text(path, j.dump(2) + "\n");
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const json& j) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a(j.dump()));
    return buf;
}

const char* class_name(int cls) {
    switch (cls) {
        case LYP_ATTRACTOR_FIXED_POINT: return "FixedPoint";
        case LYP_ATTRACTOR_LIMIT_CYCLE: return "LimitCycle";
        case LYP_ATTRACTOR_STRANGE: return "Strange";
        case LYP_ATTRACTOR_DIVERGENT: return "Divergent";
    }
    return "Unknown";
}

json report_to_json(const lyp_report* rep, uint64_t seed,
                    const std::string& cfg_hash) {
    json j;
    j["format"] = "lyapnet-report";
    j["version"] = 1;
    std::vector<double> spec(lyp_report_spectrum_size(rep));
    if (!spec.empty()) lyp_report_spectrum(rep, spec.data());
    json arr = json::array();
    for (double v : spec) {
        if (std::isfinite(v))
            arr.push_back(v);
        else
            arr.push_back(v > 0 ? "inf" : "-inf");
    }
    j["spectrum"] = arr;
    const double dim = lyp_report_dimension(rep);
    if (std::isfinite(dim))
        j["dl_dimension"] = dim;
    else
        j["dl_dimension"] = nullptr;
    j["saturated"] = lyp_report_saturated(rep) != 0;
    j["attractor_class"] = class_name(lyp_report_attractor_class(rep));
    j["diverged"] = lyp_report_diverged(rep) != 0;
    j["n_steps"] = lyp_report_steps(rep);
    j["transient"] = lyp_report_transient(rep);
    const double dt = lyp_report_dt(rep);
    if (dt > 0.0)
        j["dt"] = dt;
    else
        j["dt"] = nullptr;
    j["seed"] = seed;
    j["config_hash"] = cfg_hash;
    return j;
}

OdeHandle make_ode(const std::string& name, const json& params) {
    auto get = [&](const char* key, double fallback) {
        return params.contains(key) ? params[key].get<double>() : fallback;
    };
    if (name == "lorenz") {
        check_keys(params, "ode params", {"sigma", "rho", "beta"});
        return OdeHandle(lyp_ode_lorenz(get("sigma", 10.0), get("rho", 28.0),
                                        get("beta", 8.0 / 3.0)));
    }
    if (name == "rossler4") {
        check_keys(params, "ode params", {"a", "b", "c", "d"});
        return OdeHandle(lyp_ode_rossler4(get("a", 0.25), get("b", 3.0),
                                          get("c", 0.5), get("d", 0.05)));
    }
    fail_config("unknown ode \"" + name + "\" (built in: lorenz, rossler4)");
}

// default sampling box used when randomizing Lorenz-like initial states
std::vector<double> default_box_lo(uint32_t dim) {
    std::vector<double> v(dim, -15.0);
    if (dim >= 3) v[2] = 5.0;
    return v;
}
std::vector<double> default_box_hi(uint32_t dim) {
    std::vector<double> v(dim, 15.0);
    if (dim >= 2) v[1] = 20.0;
    if (dim >= 3) v[2] = 40.0;
    return v;
}

// ---- simulate --------------------------------------------------------

struct SimulateArgs {
    std::string config_path, out_path;
    std::string ode = "lorenz";
    double dt = 1e-3;
    uint64_t steps = 201000;
    uint64_t skip = 1000;
    uint32_t stride = 20;
    uint64_t seed = 0;
    std::vector<double> initial;
    bool no_rescale = false;
    bool cli_seed = false;
};

int cmd_simulate(SimulateArgs& a, CLI::App* cmd) {
    json params = json::object();
    bool randomize = true;
    std::vector<double> box_lo, box_hi;

    if (!a.config_path.empty()) {
        json cfg = load_json(a.config_path);
        check_keys(cfg, "simulate config",
                   {"version", "ode", "params", "dt", "steps", "skip",
                    "stride", "seed", "initial", "randomize", "box_lo",
                    "box_hi", "rescale"});
        check_version(cfg, "simulate config");
        if (cfg.contains("ode") && cmd->count("--ode") == 0)
            a.ode = cfg["ode"].get<std::string>();
        if (cfg.contains("params")) params = cfg["params"];
        if (cfg.contains("dt") && cmd->count("--dt") == 0)
            a.dt = cfg["dt"].get<double>();
        if (cfg.contains("steps") && cmd->count("--steps") == 0)
            a.steps = cfg["steps"].get<uint64_t>();
        if (cfg.contains("skip") && cmd->count("--skip") == 0)
            a.skip = cfg["skip"].get<uint64_t>();
        if (cfg.contains("stride") && cmd->count("--stride") == 0)
            a.stride = cfg["stride"].get<uint32_t>();
        if (cfg.contains("seed") && !a.cli_seed)
            a.seed = cfg["seed"].get<uint64_t>();
        if (cfg.contains("initial") && a.initial.empty())
            a.initial = cfg["initial"].get<std::vector<double>>();
        if (cfg.contains("randomize")) randomize = cfg["randomize"].get<bool>();
        if (cfg.contains("box_lo"))
            box_lo = cfg["box_lo"].get<std::vector<double>>();
        if (cfg.contains("box_hi"))
            box_hi = cfg["box_hi"].get<std::vector<double>>();
        if (cfg.contains("rescale") && cmd->count("--no-rescale") == 0)
            a.no_rescale = !cfg["rescale"].get<bool>();
    }
    if (!a.initial.empty()) randomize = false;

    OdeHandle ode = make_ode(a.ode, params);
    if (!ode) fail_config(lyp_last_error());
    const uint32_t dim = lyp_ode_dim(ode.get());

    lyp_sim_config sc = lyp_sim_config_default();
    sc.dt_integrate = a.dt;
    sc.n_steps = a.steps;
    sc.skip = a.skip;
    sc.stride = a.stride;
    sc.seed = a.seed;
    if (randomize) {
        if (box_lo.empty()) box_lo = default_box_lo(dim);
        if (box_hi.empty()) box_hi = default_box_hi(dim);
        if (box_lo.size() != dim || box_hi.size() != dim)
            fail_config("init box does not match the system dimension");
        sc.randomize_initial = 1;
        sc.box_lo = box_lo.data();
        sc.box_hi = box_hi.data();
    } else {
        if (a.initial.size() != dim)
            fail_config("--init needs exactly " + std::to_string(dim) +
                        " values");
        sc.initial_state = a.initial.data();
    }

    TrajHandle raw;
    check(lyp_simulate(ode.get(), &sc, raw.out()), "simulate");

    TrajHandle final_traj;
    if (a.no_rescale) {
        final_traj = std::move(raw);
    } else {
        check(lyp_traj_rescale_to_unit_cube(raw.get(), final_traj.out()),
              "rescale");
    }
    check(lyp_traj_save(final_traj.get(), a.out_path.c_str()), "save");

    const uint64_t count = lyp_traj_count(final_traj.get());
    const double* states = lyp_traj_states(final_traj.get());
    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    for (uint64_t i = 0; i < count; ++i)
        for (uint32_t d = 0; d < dim; ++d) {
            lo[d] = std::min(lo[d], states[i * dim + d]);
            hi[d] = std::max(hi[d], states[i * dim + d]);
        }
    std::cout << "trajectory: dim=" << dim << " dt="
              << lyp_traj_dt(final_traj.get()) << " count=" << count
              << " bounds=";
    for (uint32_t d = 0; d < dim; ++d)
        std::cout << (d ? "," : "[") << "[" << lo[d] << "," << hi[d] << "]";
    std::cout << "]" << (a.no_rescale ? "" : " (rescaled)") << "\n";
    return kExitOk;
}

// ---- make-dataset ----------------------------------------------------

int cmd_make_dataset(const std::string& in, const std::string& out,
                     uint64_t n_seq, uint32_t warmup, uint32_t target,
                     uint64_t seed) {
    TrajHandle traj;
    check(lyp_traj_load(in.c_str(), traj.out()), "load trajectory");
    DatasetHandle ds;
    check(lyp_dataset_make(traj.get(), n_seq, warmup, target, seed, ds.out()),
          "make dataset");
    check(lyp_dataset_save(ds.get(), out.c_str()), "save dataset");
    std::cout << "dataset: sequences=" << lyp_dataset_size(ds.get())
              << " warmup=" << warmup << " target=" << target
              << " k=" << lyp_dataset_signal_dim(ds.get())
              << " dt=" << lyp_dataset_dt(ds.get()) << "\n";
    return kExitOk;
}

// ---- train / fit-rc ---------------------------------------------------

json train_config_to_json(const lyp_train_config& c) {
    return json{{"d", c.d},
                {"alpha", c.alpha},
                {"rho0", c.rho0},
                {"lr", c.lr},
                {"batch_size", c.batch_size},
                {"max_epochs", c.max_epochs},
                {"loss",
                 c.loss_mode == LYP_LOSS_ONE_STEP ? "one_step" : "seq2seq"},
                {"early_stop_patience", c.early_stop_patience},
                {"val_len", c.val_len},
                {"seed", c.seed}};
}

void train_config_from_json(const json& cfg, lyp_train_config& c) {
    check_keys(cfg, "train config",
               {"version", "d", "alpha", "rho0", "lr", "batch_size",
                "max_epochs", "loss", "early_stop_patience", "val_len",
                "seed"});
    check_version(cfg, "train config");
    if (cfg.contains("d")) c.d = cfg["d"].get<uint32_t>();
    if (cfg.contains("alpha")) c.alpha = cfg["alpha"].get<double>();
    if (cfg.contains("rho0")) c.rho0 = cfg["rho0"].get<double>();
    if (cfg.contains("lr")) c.lr = cfg["lr"].get<double>();
    if (cfg.contains("batch_size"))
        c.batch_size = cfg["batch_size"].get<uint32_t>();
    if (cfg.contains("max_epochs"))
        c.max_epochs = cfg["max_epochs"].get<uint32_t>();
    if (cfg.contains("loss")) {
        const std::string loss = cfg["loss"].get<std::string>();
        if (loss == "seq2seq")
            c.loss_mode = LYP_LOSS_SEQ2SEQ;
        else if (loss == "one_step")
            c.loss_mode = LYP_LOSS_ONE_STEP;
        else
            fail_config("train config: loss must be seq2seq or one_step");
    }
    if (cfg.contains("early_stop_patience"))
        c.early_stop_patience = cfg["early_stop_patience"].get<uint32_t>();
    if (cfg.contains("val_len")) c.val_len = cfg["val_len"].get<uint32_t>();
    if (cfg.contains("seed")) c.seed = cfg["seed"].get<uint64_t>();
}

struct TrainArgs {
    std::string config_path, dataset_path, out_path;
    std::string loss;
    uint32_t d = 0, batch = 0, max_epochs = UINT32_MAX, patience = 0,
             val_len = 0;
    double lr = 0.0, alpha = -1.0, rho0 = 0.0;
    uint64_t seed = 0;
    bool cli_seed = false;
};

int cmd_train(const TrainArgs& a) {
    lyp_train_config cfg = lyp_train_config_default();
    if (!a.config_path.empty())
        train_config_from_json(load_json(a.config_path), cfg);
    if (a.d) cfg.d = a.d;
    if (a.batch) cfg.batch_size = a.batch;
    if (a.max_epochs != UINT32_MAX) cfg.max_epochs = a.max_epochs;
    if (a.patience) cfg.early_stop_patience = a.patience;
    if (a.val_len) cfg.val_len = a.val_len;
    if (a.lr > 0) cfg.lr = a.lr;
    if (a.alpha >= 0) cfg.alpha = a.alpha;
    if (a.rho0 > 0) cfg.rho0 = a.rho0;
    if (a.cli_seed) cfg.seed = a.seed;
    if (!a.loss.empty()) {
        if (a.loss == "seq2seq")
            cfg.loss_mode = LYP_LOSS_SEQ2SEQ;
        else if (a.loss == "one_step")
            cfg.loss_mode = LYP_LOSS_ONE_STEP;
        else
            fail_config("--loss must be seq2seq or one_step");
    }

    DatasetHandle ds;
    check(lyp_dataset_load(a.dataset_path.c_str(), ds.out()), "load dataset");

    RnnHandle model;
    TrainReportHandle report;
    const int status = lyp_train(ds.get(), &cfg, model.out(), report.out());
    if (status != LYP_OK) fail_status(status, "train");

    check(lyp_rnn_save(model.get(), a.out_path.c_str()), "save checkpoint");

    const uint32_t epochs = lyp_train_report_epochs(report.get());
    json sidecar;
    sidecar["format"] = "lyapnet-checkpoint";
    sidecar["version"] = 1;
    sidecar["mode"] = "train";
    sidecar["config"] = train_config_to_json(cfg);
    sidecar["config_hash"] = config_hash(train_config_to_json(cfg));
    json tl = json::array(), vl = json::array();
    for (uint32_t e = 0; e < epochs; ++e) {
        tl.push_back(lyp_train_report_train_loss(report.get(), e));
        vl.push_back(lyp_train_report_val_loss(report.get(), e));
    }
    sidecar["train_loss"] = tl;
    sidecar["val_loss"] = vl;
    sidecar["best_epoch"] = lyp_train_report_best_epoch(report.get());
    sidecar["stopped_epoch"] = lyp_train_report_stopped_epoch(report.get());
    const bool aborted = lyp_train_report_aborted(report.get()) != 0;
    sidecar["aborted"] = aborted;
    write_json(a.out_path + ".json", sidecar);

    std::cout << "trained: epochs=" << lyp_train_report_stopped_epoch(
                     report.get())
              << " best_epoch=" << lyp_train_report_best_epoch(report.get())
              << " val_loss[0]=" << fmt17(
                     lyp_train_report_val_loss(report.get(), 0))
              << " best_val=" << fmt17(lyp_train_report_val_loss(
                     report.get(),
                     lyp_train_report_best_epoch(report.get())))
              << (aborted ? " ABORTED" : "") << "\n";
    if (aborted)
        throw CliError{kExitNumerical,
                       "training aborted on numerical blowup "
                       "(partial checkpoint and report written)"};
    return kExitOk;
}

json fit_config_to_json(const lyp_fit_config& c) {
    return json{{"d", c.d},          {"alpha", c.alpha},
                {"rho0", c.rho0},    {"epsilon", c.epsilon},
                {"fit_len", c.fit_len}, {"warmup_len", c.warmup_len},
                {"seed", c.seed},    {"offset", c.offset}};
}

void fit_config_from_json(const json& cfg, lyp_fit_config& c) {
    check_keys(cfg, "fit config",
               {"version", "d", "alpha", "rho0", "epsilon", "fit_len",
                "warmup_len", "seed", "offset"});
    check_version(cfg, "fit config");
    if (cfg.contains("d")) c.d = cfg["d"].get<uint32_t>();
    if (cfg.contains("alpha")) c.alpha = cfg["alpha"].get<double>();
    if (cfg.contains("rho0")) c.rho0 = cfg["rho0"].get<double>();
    if (cfg.contains("epsilon")) c.epsilon = cfg["epsilon"].get<double>();
    if (cfg.contains("fit_len")) c.fit_len = cfg["fit_len"].get<uint64_t>();
    if (cfg.contains("warmup_len"))
        c.warmup_len = cfg["warmup_len"].get<uint32_t>();
    if (cfg.contains("seed")) c.seed = cfg["seed"].get<uint64_t>();
    if (cfg.contains("offset")) c.offset = cfg["offset"].get<uint64_t>();
}

struct FitArgs {
    std::string config_path, traj_path, out_path;
    uint32_t d = 0, warmup = 0;
    uint64_t fit_len = 0, offset = 0, seed = 0;
    double epsilon = -1.0, alpha = -1.0, rho0 = 0.0;
    bool cli_seed = false, cli_offset = false;
};

int cmd_fit(const FitArgs& a) {
    lyp_fit_config cfg = lyp_fit_config_default();
    if (!a.config_path.empty())
        fit_config_from_json(load_json(a.config_path), cfg);
    if (a.d) cfg.d = a.d;
    if (a.warmup) cfg.warmup_len = a.warmup;
    if (a.fit_len) cfg.fit_len = a.fit_len;
    if (a.epsilon >= 0) cfg.epsilon = a.epsilon;
    if (a.alpha >= 0) cfg.alpha = a.alpha;
    if (a.rho0 > 0) cfg.rho0 = a.rho0;
    if (a.cli_seed) cfg.seed = a.seed;
    if (a.cli_offset) cfg.offset = a.offset;

    TrajHandle traj;
    check(lyp_traj_load(a.traj_path.c_str(), traj.out()), "load trajectory");
    RnnHandle model;
    check(lyp_rc_fit(traj.get(), &cfg, model.out()), "rc fit");
    check(lyp_rnn_save(model.get(), a.out_path.c_str()), "save checkpoint");

    json sidecar;
    sidecar["format"] = "lyapnet-checkpoint";
    sidecar["version"] = 1;
    sidecar["mode"] = "fit";
    sidecar["config"] = fit_config_to_json(cfg);
    sidecar["config_hash"] = config_hash(fit_config_to_json(cfg));
    write_json(a.out_path + ".json", sidecar);

    std::cout << "fitted: d=" << cfg.d << " fit_len=" << cfg.fit_len
              << " epsilon=" << fmt17(cfg.epsilon) << "\n";
    return kExitOk;
}

// ---- analyze -----------------------------------------------------------

std::string peek_magic(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_config("cannot open " + path);
    char tag[5] = {0, 0, 0, 0, 0};
    in.read(tag, 5);
    return std::string(tag, static_cast<size_t>(in.gcount()));
}

struct AnalyzeArgs {
    std::string model_path, traj_path, out_path;
    std::string ode;
    double dt = 0.0;
    double time_span = 100.0;
    uint64_t steps = 0;
    uint64_t transient = UINT64_MAX;
    uint32_t top_m = 0;
    double theta = 0.2;
    uint32_t test_len = 150;
    uint32_t run_warmup = 100;
    uint64_t test_offset = 0;
    uint64_t seed = 0;
    double tol_zero = 0.02;
    bool crude = false;
};

void write_report_outputs(const AnalyzeArgs& a, const lyp_report* rep,
                          const json& extra, const json& cfg_json) {
    json j = report_to_json(rep, a.seed, config_hash(cfg_json));
    for (auto it = extra.begin(); it != extra.end(); ++it)
        j[it.key()] = it.value();
    write_json(a.out_path, j);

    std::vector<double> spec(lyp_report_spectrum_size(rep));
    if (!spec.empty()) lyp_report_spectrum(rep, spec.data());
    std::cout << "spectrum head:";
    for (size_t i = 0; i < std::min<size_t>(4, spec.size()); ++i)
        std::cout << " " << spec[i];
    const double dim = lyp_report_dimension(rep);
    std::cout << "\nD_L = ";
    if (std::isfinite(dim))
        std::cout << dim;
    else
        std::cout << "n/a";
    std::cout << "  class = " << class_name(lyp_report_attractor_class(rep));
    if (extra.contains("valid_horizon"))
        std::cout << "  horizon = " << extra["valid_horizon"].get<uint64_t>();
    std::cout << "\n";
}

int cmd_analyze_ode(const AnalyzeArgs& a) {
    if (!(a.dt > 0)) fail_config("--dt is required in ode mode");
    OdeHandle ode = make_ode(a.ode, json::object());
    if (!ode) fail_config(lyp_last_error());
    const uint32_t dim = lyp_ode_dim(ode.get());

    const uint64_t steps =
        a.steps ? a.steps : static_cast<uint64_t>(a.time_span / a.dt + 0.5);
    const uint64_t transient =
        a.transient == UINT64_MAX ? steps / 100 : a.transient;

    // draw a start state and relax it onto the attractor
    lyp_sim_config sim = lyp_sim_config_default();
    sim.n_steps = 2000;
    sim.skip = 0;
    sim.stride = 2000;
    sim.dt_integrate = 1e-3;
    sim.seed = a.seed;
    sim.randomize_initial = 1;
    std::vector<double> lo = default_box_lo(dim), hi = default_box_hi(dim);
    sim.box_lo = lo.data();
    sim.box_hi = hi.data();
    TrajHandle settle;
    check(lyp_simulate(ode.get(), &sim, settle.out()), "settle");
    std::vector<double> x0(lyp_traj_states(settle.get()),
                           lyp_traj_states(settle.get()) + dim);

    json cfg_json = {{"ode", a.ode},     {"dt", a.dt},
                     {"steps", steps},   {"transient", transient},
                     {"crude", a.crude}, {"seed", a.seed}};

    ReportHandle rep;
    const int status = lyp_ode_lyapunov(
        ode.get(), x0.data(), a.dt, steps, transient,
        a.crude ? LYP_TANGENT_EULER : LYP_TANGENT_VARIATIONAL_RK4, rep.out());
    if (status != LYP_OK) {
        // blowups still produce a (divergent) report file
        json j;
        j["format"] = "lyapnet-report";
        j["version"] = 1;
        j["spectrum"] = json::array();
        j["dl_dimension"] = nullptr;
        j["attractor_class"] = "Divergent";
        j["diverged"] = true;
        j["error"] = lyp_last_error();
        j["seed"] = a.seed;
        j["config_hash"] = config_hash(cfg_json);
        write_json(a.out_path, j);
        fail_status(status, "ode lyapunov");
    }
    write_report_outputs(a, rep.get(), json::object(), cfg_json);
    return kExitOk;
}

int cmd_analyze_machine(const AnalyzeArgs& a) {
    const std::string magic = peek_magic(a.model_path);
    lyp_spectrum_config sc = lyp_spectrum_config_default();
    sc.n_steps = a.steps ? a.steps : 1600;
    sc.transient = a.transient == UINT64_MAX ? 100 : a.transient;
    sc.top_m = a.top_m;
    sc.tol_zero = a.tol_zero;
    sc.frame_seed = a.seed;

    if (magic == "RNNL1") {
        LayeredHandle layered;
        check(lyp_layered_load(a.model_path.c_str(), layered.out()),
              "load layered checkpoint");
        json cfg_json = {{"model", "layered"},
                         {"steps", sc.n_steps},
                         {"transient", sc.transient},
                         {"seed", a.seed}};
        ReportHandle rep;
        check(lyp_layered_lyapunov(layered.get(), nullptr, &sc, rep.out()),
              "layered lyapunov");
        write_report_outputs(a, rep.get(), json::object(), cfg_json);
        return kExitOk;
    }
    if (magic != "RNNP1")
        fail_config(a.model_path + ": not a recognized checkpoint");

    RnnHandle model;
    check(lyp_rnn_load(a.model_path.c_str(), model.out()), "load checkpoint");
    const uint32_t d = lyp_rnn_hidden_dim(model.get());
    const uint32_t k = lyp_rnn_signal_dim(model.get());

    if (a.traj_path.empty())
        fail_config("machine analysis needs a trajectory (-t) for warmup");
    TrajHandle traj;
    check(lyp_traj_load(a.traj_path.c_str(), traj.out()), "load trajectory");
    if (lyp_traj_dim(traj.get()) != k)
        fail_config("trajectory dimension does not match the machine");
    const uint64_t count = lyp_traj_count(traj.get());
    if (count < a.test_offset + a.run_warmup + a.test_len + 1)
        fail_config("trajectory too short for warmup + test window");
    const double* states = lyp_traj_states(traj.get());
    const double traj_dt = lyp_traj_dt(traj.get());
    if (sc.dt <= 0.0) sc.dt = traj_dt;

    // warm the machine on the window, then forecast autonomously
    std::vector<double> h(d, 0.0);
    check(lyp_rnn_warmup(model.get(), h.data(),
                         states + a.test_offset * k, a.run_warmup),
          "warmup");
    std::vector<double> h_spec = h;

    std::vector<double> pred(static_cast<size_t>(a.test_len) * k);
    check(lyp_rnn_predict(model.get(), h.data(), a.test_len, pred.data()),
          "predict");
    const double* truth = states + (a.test_offset + a.run_warmup) * k;
    std::vector<double> rmse(a.test_len);
    uint64_t horizon = 0;
    check(lyp_prediction_error_curve(truth, pred.data(), a.test_len, k,
                                     a.theta, rmse.data(), &horizon),
          "prediction error");

    // per-step error curve, plot-ready
    std::ostringstream csv;
    csv << "step,rmse\n";
    for (uint32_t t = 0; t < a.test_len; ++t)
        csv << t << "," << fmt17(rmse[t]) << "\n";
    atomic_write_text(a.out_path + ".curve.csv", csv.str());

    json cfg_json = {{"model", "rnn"},
                     {"steps", sc.n_steps},
                     {"transient", sc.transient},
                     {"top_m", sc.top_m},
                     {"theta", a.theta},
                     {"test_len", a.test_len},
                     {"run_warmup", a.run_warmup},
                     {"test_offset", a.test_offset},
                     {"seed", a.seed}};

    ReportHandle rep;
    check(lyp_rnn_lyapunov(model.get(), h_spec.data(), &sc, rep.out()),
          "rnn lyapunov");

    json extra;
    extra["valid_horizon"] = horizon;
    extra["theta"] = a.theta;
    extra["test_len"] = a.test_len;
    extra["curve_csv"] = a.out_path + ".curve.csv";
    write_report_outputs(a, rep.get(), extra, cfg_json);

    const int status = lyp_report_diverged(rep.get());
    if (status)
        throw CliError{kExitNumerical,
                       "machine dynamics diverged (report written)"};
    return kExitOk;
}

// ---- ensemble ----------------------------------------------------------

int cmd_ensemble(const std::string& config_path, const std::string& traj_path,
                 const std::string& out_dir, uint32_t jobs_flag) {
    json cfg = load_json(config_path);
    check_keys(cfg, "ensemble config",
               {"version", "mode", "machines", "traj_per_machine", "train",
                "fit", "dataset", "spectrum", "run_warmup", "seed", "jobs"});
    check_version(cfg, "ensemble config");

    lyp_ensemble_config ec = lyp_ensemble_config_default();
    const std::string mode =
        cfg.contains("mode") ? cfg["mode"].get<std::string>() : "fit";
    if (mode == "train")
        ec.mode = LYP_ENSEMBLE_TRAIN;
    else if (mode == "fit")
        ec.mode = LYP_ENSEMBLE_FIT;
    else
        fail_config("ensemble config: mode must be train or fit");
    if (cfg.contains("machines")) ec.machines = cfg["machines"].get<uint32_t>();
    if (cfg.contains("traj_per_machine"))
        ec.traj_per_machine = cfg["traj_per_machine"].get<uint32_t>();
    if (cfg.contains("train")) train_config_from_json(cfg["train"], ec.train_cfg);
    if (cfg.contains("fit")) fit_config_from_json(cfg["fit"], ec.fit_cfg);
    if (cfg.contains("dataset")) {
        const json& d = cfg["dataset"];
        check_keys(d, "ensemble dataset", {"n_seq", "warmup", "target"});
        if (d.contains("n_seq")) ec.n_seq = d["n_seq"].get<uint64_t>();
        if (d.contains("warmup")) ec.warmup_len = d["warmup"].get<uint32_t>();
        if (d.contains("target")) ec.target_len = d["target"].get<uint32_t>();
    }
    if (cfg.contains("spectrum")) {
        const json& s = cfg["spectrum"];
        check_keys(s, "ensemble spectrum",
                   {"steps", "transient", "dt", "top_m", "tol_zero"});
        if (s.contains("steps")) ec.spectrum.n_steps = s["steps"].get<uint64_t>();
        if (s.contains("transient"))
            ec.spectrum.transient = s["transient"].get<uint64_t>();
        if (s.contains("dt")) ec.spectrum.dt = s["dt"].get<double>();
        if (s.contains("top_m")) ec.spectrum.top_m = s["top_m"].get<uint32_t>();
        if (s.contains("tol_zero"))
            ec.spectrum.tol_zero = s["tol_zero"].get<double>();
    }
    if (cfg.contains("run_warmup"))
        ec.run_warmup_len = cfg["run_warmup"].get<uint32_t>();
    if (cfg.contains("seed")) ec.seed = cfg["seed"].get<uint64_t>();
    if (cfg.contains("jobs")) ec.jobs = cfg["jobs"].get<uint32_t>();
    if (jobs_flag) ec.jobs = jobs_flag;

    TrajHandle traj;
    check(lyp_traj_load(traj_path.c_str(), traj.out()), "load trajectory");
    if (ec.spectrum.dt <= 0.0) ec.spectrum.dt = lyp_traj_dt(traj.get());

    std::filesystem::create_directories(out_dir);

    EnsembleHandle rep;
    check(lyp_ensemble_run(traj.get(), &ec, rep.out()), "ensemble");

    const uint64_t members = lyp_ensemble_members(rep.get());
    const std::string hash = config_hash(cfg);
    json member_summaries = json::array();
    for (uint64_t i = 0; i < members; ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "member_%04" PRIu64 ".json", i);
        const std::string path =
            (std::filesystem::path(out_dir) / name).string();
        json j;
        if (lyp_ensemble_member_ok(rep.get(), i)) {
            j = report_to_json(lyp_ensemble_member_report(rep.get(), i),
                               ec.seed, hash);
        } else {
            j["format"] = "lyapnet-report";
            j["version"] = 1;
            j["error"] = lyp_ensemble_member_error(rep.get(), i);
            j["attractor_class"] = "Divergent";
        }
        j["machine"] = lyp_ensemble_member_machine(rep.get(), i);
        j["run"] = lyp_ensemble_member_run(rep.get(), i);
        write_json(path, j);

        json s;
        s["file"] = name;
        s["ok"] = lyp_ensemble_member_ok(rep.get(), i) != 0;
        if (s["ok"].get<bool>()) {
            const lyp_report* r = lyp_ensemble_member_report(rep.get(), i);
            const double dim = lyp_report_dimension(r);
            s["dl_dimension"] = std::isfinite(dim) ? json(dim) : json();
            s["attractor_class"] =
                class_name(lyp_report_attractor_class(r));
        }
        member_summaries.push_back(s);
    }

    uint64_t hist[LYP_HISTOGRAM_BINS];
    lyp_ensemble_histogram(rep.get(), hist);
    std::ostringstream csv;
    csv << "bin_left,count\n";
    for (int b = 0; b < LYP_HISTOGRAM_BINS; ++b)
        csv << fmt17(0.1 * b) << "," << hist[b] << "\n";
    const std::string hist_path =
        (std::filesystem::path(out_dir) / "histogram.csv").string();
    atomic_write_text(hist_path, csv.str());

    json agg;
    agg["format"] = "lyapnet-ensemble";
    agg["version"] = 1;
    agg["config_hash"] = hash;
    agg["mode"] = mode;
    agg["machines"] = ec.machines;
    agg["traj_per_machine"] = ec.traj_per_machine;
    agg["aborted"] = lyp_ensemble_aborted(rep.get());
    agg["class_tally"] = {
        {"FixedPoint", lyp_ensemble_class_tally(rep.get(), 0)},
        {"LimitCycle", lyp_ensemble_class_tally(rep.get(), 1)},
        {"Strange", lyp_ensemble_class_tally(rep.get(), 2)},
        {"Divergent", lyp_ensemble_class_tally(rep.get(), 3)}};
    json hist_json = json::array();
    for (int b = 0; b < LYP_HISTOGRAM_BINS; ++b) hist_json.push_back(hist[b]);
    agg["histogram"] = hist_json;
    agg["members"] = member_summaries;
    write_json((std::filesystem::path(out_dir) / "aggregate.json").string(),
               agg);

    std::cout << "ensemble: members=" << members
              << " aborted=" << lyp_ensemble_aborted(rep.get())
              << " tallies FixedPoint=" << lyp_ensemble_class_tally(rep.get(), 0)
              << " LimitCycle=" << lyp_ensemble_class_tally(rep.get(), 1)
              << " Strange=" << lyp_ensemble_class_tally(rep.get(), 2)
              << " Divergent=" << lyp_ensemble_class_tally(rep.get(), 3)
              << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chaotic-dynamics learning and Lyapunov analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(lyp_version()));

    // simulate
    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "integrate an ODE system");
    c_sim->add_option("--config", sim.config_path, "JSON config");
    c_sim->add_option("--ode", sim.ode, "lorenz | rossler4");
    c_sim->add_option("--dt", sim.dt, "integration step");
    c_sim->add_option("--steps", sim.steps, "integration steps");
    c_sim->add_option("--skip", sim.skip, "transient steps to discard");
    c_sim->add_option("--stride", sim.stride, "subsample stride");
    auto* sim_seed = c_sim->add_option("--seed", sim.seed, "RNG seed");
    c_sim->add_option("--init", sim.initial,
                      "initial state (disables randomization)");
    c_sim->add_flag("--no-rescale", sim.no_rescale,
                    "keep original units instead of [-1,1]");
    c_sim->add_option("-o,--out", sim.out_path, "output TRAJ1 file")
        ->required();

    // make-dataset
    std::string md_in, md_out;
    uint64_t md_nseq = 2000, md_seed = 0;
    uint32_t md_warm = 100, md_target = 120;
    auto* c_md =
        app.add_subcommand("make-dataset", "draw training windows");
    c_md->add_option("-i,--in", md_in, "input TRAJ1")->required();
    c_md->add_option("-o,--out", md_out, "output DSET1")->required();
    c_md->add_option("--n-seq", md_nseq, "number of windows");
    c_md->add_option("--warmup", md_warm, "warmup samples per window");
    c_md->add_option("--target", md_target, "target samples per window");
    c_md->add_option("--seed", md_seed, "RNG seed");

    // train
    TrainArgs tr;
    auto* c_tr = app.add_subcommand("train", "gradient training (BPTT)");
    c_tr->add_option("--config", tr.config_path, "JSON train config");
    c_tr->add_option("-i,--in", tr.dataset_path, "input DSET1")->required();
    c_tr->add_option("-o,--out", tr.out_path, "output RNNP1 checkpoint")
        ->required();
    c_tr->add_option("--d", tr.d, "hidden size");
    c_tr->add_option("--loss", tr.loss, "seq2seq | one_step");
    c_tr->add_option("--lr", tr.lr, "learning rate");
    c_tr->add_option("--batch", tr.batch, "mini-batch size");
    c_tr->add_option("--max-epochs", tr.max_epochs, "epoch cap");
    c_tr->add_option("--patience", tr.patience, "early-stop patience");
    c_tr->add_option("--val-len", tr.val_len, "validation target steps");
    c_tr->add_option("--alpha", tr.alpha, "leak rate");
    c_tr->add_option("--rho0", tr.rho0, "spectral init radius");
    auto* tr_seed = c_tr->add_option("--seed", tr.seed, "RNG seed");

    // fit-rc
    FitArgs ft;
    auto* c_ft = app.add_subcommand("fit-rc", "reservoir ridge fit");
    c_ft->add_option("--config", ft.config_path, "JSON fit config");
    c_ft->add_option("-i,--in", ft.traj_path, "input TRAJ1")->required();
    c_ft->add_option("-o,--out", ft.out_path, "output RNNP1 checkpoint")
        ->required();
    c_ft->add_option("--d", ft.d, "reservoir size");
    c_ft->add_option("--epsilon", ft.epsilon, "ridge strength");
    c_ft->add_option("--fit-len", ft.fit_len, "fitting steps");
    c_ft->add_option("--warmup", ft.warmup, "warmup steps");
    auto* ft_off = c_ft->add_option("--offset", ft.offset,
                                    "first trajectory sample to use");
    auto* ft_seed = c_ft->add_option("--seed", ft.seed, "RNG seed");

    // analyze
    AnalyzeArgs an;
    auto* c_an = app.add_subcommand(
        "analyze", "Lyapunov spectrum and forecast quality");
    c_an->add_option("-m,--model", an.model_path, "RNNP1/RNNL1 checkpoint");
    c_an->add_option("-t,--traj", an.traj_path, "TRAJ1 for warmup/testing");
    c_an->add_option("--ode", an.ode, "analyze an ODE instead of a machine");
    c_an->add_option("--dt", an.dt, "ODE sampling step / report time unit");
    c_an->add_option("--time", an.time_span, "ODE total time when no --steps");
    c_an->add_option("--steps", an.steps, "spectrum steps");
    c_an->add_option("--transient", an.transient, "discarded leading steps");
    c_an->add_option("--top-m", an.top_m, "leading exponents to track");
    c_an->add_option("--theta", an.theta, "valid-horizon threshold");
    c_an->add_option("--test-len", an.test_len, "forecast steps");
    c_an->add_option("--run-warmup", an.run_warmup, "warmup samples");
    c_an->add_option("--offset", an.test_offset, "test window offset");
    c_an->add_option("--seed", an.seed, "frame / start seed");
    c_an->add_option("--tol-zero", an.tol_zero, "classification tolerance");
    c_an->add_flag("--crude", an.crude, "first-order tangent map (I + J dt)");
    c_an->add_option("-o,--out", an.out_path, "report JSON path")->required();

    // ensemble
    std::string en_cfg, en_traj, en_out;
    uint32_t en_jobs = 0;
    auto* c_en = app.add_subcommand("ensemble", "many machines, statistics");
    c_en->add_option("--config", en_cfg, "JSON ensemble config")->required();
    c_en->add_option("-t,--traj", en_traj, "TRAJ1 input")->required();
    c_en->add_option("-o,--out", en_out, "output directory")->required();
    c_en->add_option("--jobs", en_jobs, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (c_sim->parsed()) {
            sim.cli_seed = sim_seed->count() > 0;
            return cmd_simulate(sim, c_sim);
        }
        if (c_md->parsed())
            return cmd_make_dataset(md_in, md_out, md_nseq, md_warm,
                                    md_target, md_seed);
        if (c_tr->parsed()) {
            tr.cli_seed = tr_seed->count() > 0;
            return cmd_train(tr);
        }
        if (c_ft->parsed()) {
            ft.cli_seed = ft_seed->count() > 0;
            ft.cli_offset = ft_off->count() > 0;
            return cmd_fit(ft);
        }
        if (c_an->parsed()) {
            if (!an.ode.empty()) return cmd_analyze_ode(an);
            if (an.model_path.empty())
                fail_config("analyze needs either --model or --ode");
            return cmd_analyze_machine(an);
        }
        if (c_en->parsed()) return cmd_ensemble(en_cfg, en_traj, en_out, en_jobs);
    } catch (const CliError& e) {
        std::cerr << "lyapnet: error: " << e.message << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "lyapnet: error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
