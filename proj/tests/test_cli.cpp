// End-to-end checks of the command-line tool: exit codes, reproducibility,
// file outputs. Spawns the real binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() /
              ("lyapnet_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string path(const std::string& name) const {
        return (dir / name).string();
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LYAPNET_CLI_PATH) + " " + args +
                            " > /dev/null 2> /dev/null";
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("simulate: defaults give the stride-20 sampling step") {
    TempDir tmp;
    const std::string out = tmp.path("lorenz.traj");
    REQUIRE(run_cli("simulate --steps 41000 --seed 3 -o " + out) == 0);
    const std::string bytes = slurp(out);
    REQUIRE(bytes.size() > 26);
    CHECK(bytes.substr(0, 5) == "TRAJ1");
    double dt = 0.0;
    std::memcpy(&dt, bytes.data() + 5 + 4 + 8, sizeof(double));
    CHECK(dt == doctest::Approx(2e-2));
}

TEST_CASE("simulate twice with one seed: byte-identical trajectories") {
    TempDir tmp;
    const std::string args =
        "simulate --steps 21000 --seed 11 --skip 500 -o ";
    REQUIRE(run_cli(args + tmp.path("a.traj")) == 0);
    REQUIRE(run_cli(args + tmp.path("b.traj")) == 0);
    const std::string a = slurp(tmp.path("a.traj"));
    CHECK(a.size() > 0);
    CHECK(a == slurp(tmp.path("b.traj")));
}

TEST_CASE("config errors exit with code 2") {
    TempDir tmp;
    // unknown subcommand / missing required
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("simulate") == 2);
    // malformed JSON config
    write_text(tmp.path("bad.json"), "{ not json");
    CHECK(run_cli("simulate --config " + tmp.path("bad.json") + " -o " +
                  tmp.path("x.traj")) == 2);
    // unknown field rejected
    write_text(tmp.path("unknown.json"),
               R"({"version":1,"ode":"lorenz","bogus":4})");
    CHECK(run_cli("simulate --config " + tmp.path("unknown.json") + " -o " +
                  tmp.path("x.traj")) == 2);
    // unknown ode
    CHECK(run_cli("simulate --ode nosuch -o " + tmp.path("x.traj")) == 2);
    // missing input file
    CHECK(run_cli("make-dataset -i " + tmp.path("missing.traj") + " -o " +
                  tmp.path("d.dset")) == 2);
}

TEST_CASE("full pipeline: simulate, dataset, fit, train, analyze") {
    TempDir tmp;
    const std::string traj = tmp.path("t.traj");
    REQUIRE(run_cli("simulate --steps 1300000 --seed 5 -o " + traj) == 0);

    // fit-rc and its sidecar
    const std::string fit = tmp.path("fit.rnnp");
    REQUIRE(run_cli("fit-rc -i " + traj +
                    " -o " + fit + " --d 60 --fit-len 2000 --warmup 60 "
                    "--seed 21") == 0);
    CHECK(slurp(fit).substr(0, 5) == "RNNP1");
    json fit_sidecar = json::parse(slurp(fit + ".json"));
    CHECK(fit_sidecar["format"] == "lyapnet-checkpoint");
    CHECK(fit_sidecar["mode"] == "fit");
    CHECK(fit_sidecar["config"]["d"] == 60);

    // tiny training run with a JSON config
    const std::string dset = tmp.path("d.dset");
    REQUIRE(run_cli("make-dataset -i " + traj + " -o " + dset +
                    " --n-seq 40 --warmup 20 --target 30 --seed 2") == 0);
    write_text(tmp.path("train.json"),
               R"({"version":1,"d":16,"batch_size":20,"max_epochs":2,
                   "loss":"seq2seq","seed":5})");
    const std::string model = tmp.path("m.rnnp");
    REQUIRE(run_cli("train --config " + tmp.path("train.json") + " -i " +
                    dset + " -o " + model) == 0);
    json sidecar = json::parse(slurp(model + ".json"));
    CHECK(sidecar["format"] == "lyapnet-checkpoint");
    CHECK(sidecar["train_loss"].size() == 3);  // init + 2 epochs
    CHECK(sidecar["aborted"] == false);

    // train determinism: same config, byte-identical checkpoint
    const std::string model2 = tmp.path("m2.rnnp");
    REQUIRE(run_cli("train --config " + tmp.path("train.json") + " -i " +
                    dset + " -o " + model2) == 0);
    CHECK(slurp(model) == slurp(model2));

    // analyze the fitted machine
    const std::string rep_path = tmp.path("rep.json");
    REQUIRE(run_cli("analyze -m " + fit + " -t " + traj + " -o " + rep_path +
                    " --steps 600 --transient 80 --test-len 80") == 0);
    json rep = json::parse(slurp(rep_path));
    CHECK(rep["format"] == "lyapnet-report");
    CHECK(rep["spectrum"].is_array());
    CHECK(rep["spectrum"].size() > 0);
    CHECK(rep.contains("dl_dimension"));
    CHECK(rep.contains("attractor_class"));
    CHECK(rep.contains("valid_horizon"));

    // the per-step error curve exists and has a header plus test-len rows
    std::istringstream curve(slurp(rep_path + ".curve.csv"));
    std::string line;
    int rows = 0;
    std::getline(curve, line);
    CHECK(line == "step,rmse");
    while (std::getline(curve, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 80);
}

TEST_CASE("analyze --ode reproduces the reference-table path") {
    TempDir tmp;
    const std::string rep_path = tmp.path("ode.json");
    REQUIRE(run_cli("analyze --ode lorenz --dt 1e-3 --time 40 --seed 4 -o " +
                    rep_path) == 0);
    json rep = json::parse(slurp(rep_path));
    CHECK(rep["spectrum"].size() == 3);
    CHECK(rep["attractor_class"] == "Strange");
    const double l1 = rep["spectrum"][0].get<double>();
    CHECK(l1 > 0.4);
    CHECK(l1 < 1.6);
}

TEST_CASE("ensemble command writes members, aggregate and histogram") {
    TempDir tmp;
    const std::string traj = tmp.path("t.traj");
    REQUIRE(run_cli("simulate --steps 900000 --seed 6 -o " + traj) == 0);

    write_text(tmp.path("ens.json"), R"({
        "version": 1, "mode": "fit", "machines": 2, "traj_per_machine": 2,
        "fit": {"d": 40, "fit_len": 1200, "warmup_len": 40},
        "spectrum": {"steps": 400, "transient": 60},
        "seed": 12, "jobs": 2})");
    const std::string out_dir = tmp.path("ens_out");
    REQUIRE(run_cli("ensemble --config " + tmp.path("ens.json") + " -t " +
                    traj + " -o " + out_dir) == 0);

    json agg = json::parse(slurp(out_dir + "/aggregate.json"));
    CHECK(agg["format"] == "lyapnet-ensemble");
    CHECK(agg["members"].size() == 4);
    CHECK(agg["histogram"].size() == 60);
    CHECK(fs::exists(out_dir + "/member_0000.json"));
    CHECK(fs::exists(out_dir + "/member_0003.json"));

    std::istringstream hist(slurp(out_dir + "/histogram.csv"));
    std::string line;
    std::getline(hist, line);
    CHECK(line == "bin_left,count");
    int rows = 0;
    while (std::getline(hist, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 60);
}
