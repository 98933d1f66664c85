#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "lyapnet/errors.hpp"
#include "lyapnet/io.hpp"
#include "lyapnet/ode.hpp"
#include "lyapnet/rnn.hpp"

using namespace lyapnet;

namespace {

struct TempDir {
    std::filesystem::path dir;
    TempDir() {
        dir = std::filesystem::temp_directory_path() /
              ("lyapnet_io_" + std::to_string(::getpid()));
        std::filesystem::create_directories(dir);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
    }
    std::string path(const char* name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("trajectory round trip preserves bytes and metadata") {
    TempDir tmp;
    SimConfig cfg;
    cfg.dt_integrate = 1e-3;
    cfg.n_steps = 4000;
    cfg.skip = 200;
    cfg.subsample_stride = 20;
    cfg.initial_state = Vec(3);
    cfg.initial_state << 1.0, 1.0, 1.0;
    Trajectory traj = rescale_to_unit_cube(simulate(lorenz(), cfg));

    const std::string path = tmp.path("a.traj");
    save_trajectory(traj, path);
    CHECK(file_magic(path) == "TRAJ1");

    Trajectory back = load_trajectory(path);
    CHECK(back.dim == traj.dim);
    CHECK(back.dt == traj.dt);
    REQUIRE(back.rescale.has_value());
    CHECK(back.rescale->scale == traj.rescale->scale);
    CHECK(back.rescale->offset == traj.rescale->offset);
    REQUIRE(back.states.size() == traj.states.size());
    CHECK(std::memcmp(back.states.data(), traj.states.data(),
                      traj.states.size() * sizeof(double)) == 0);

    // byte-identical re-save
    save_trajectory(back, tmp.path("b.traj"));
    CHECK(slurp(path) == slurp(tmp.path("b.traj")));
}

TEST_CASE("rnn parameter round trip is bitwise") {
    TempDir tmp;
    RngStream rng(5);
    RnnParams p = spectral_init(17, 3, 1.15, 0.3, rng);
    const std::string path = tmp.path("m.rnnp");
    save_rnn(p, path);
    CHECK(file_magic(path) == "RNNP1");
    RnnParams q = load_rnn(path);
    CHECK(q.d == p.d);
    CHECK(q.k == p.k);
    CHECK(q.alpha == p.alpha);
    CHECK(std::memcmp(q.w.data(), p.w.data(), sizeof(double) * 17 * 17) == 0);
    CHECK(std::memcmp(q.w_in.data(), p.w_in.data(), sizeof(double) * 17 * 3) ==
          0);
    CHECK(std::memcmp(q.w_out.data(), p.w_out.data(),
                      sizeof(double) * 3 * 17) == 0);
    CHECK(std::memcmp(q.b.data(), p.b.data(), sizeof(double) * 17) == 0);
}

TEST_CASE("layered parameter round trip is bitwise") {
    TempDir tmp;
    RngStream rng(6);
    LayeredRnnParams p =
        layered_random(3, 5, 2, 1.2, Activation::Sigmoid, rng);
    const std::string path = tmp.path("m.rnnl");
    save_layered(p, path);
    CHECK(file_magic(path) == "RNNL1");
    LayeredRnnParams q = load_layered(path);
    CHECK(q.layers == 3);
    CHECK(q.width == 5);
    CHECK(q.out_dim == 2);
    CHECK(q.activation == Activation::Sigmoid);
    for (uint32_t l = 0; l < 3; ++l) {
        CHECK(q.w[l] == p.w[l]);
        CHECK(q.w_in[l] == p.w_in[l]);
        CHECK(q.b[l] == p.b[l]);
    }
    CHECK(q.w_out == p.w_out);
}

TEST_CASE("dataset round trip preserves windows") {
    TempDir tmp;
    Trajectory traj;
    traj.dim = 2;
    traj.dt = 0.05;
    RngStream noise(9);
    traj.states.resize(2 * 500);
    for (auto& v : traj.states) v = noise.uniform(-1, 1);
    RngStream rng(10);
    Dataset ds = make_dataset(traj, 12, 5, 8, rng);

    const std::string path = tmp.path("d.dset");
    save_dataset(ds, path);
    CHECK(file_magic(path) == "DSET1");
    Dataset back = load_dataset(path);
    CHECK(back.k == ds.k);
    CHECK(back.warmup_len == ds.warmup_len);
    CHECK(back.target_len == ds.target_len);
    CHECK(back.size() == ds.size());
    CHECK(back.windows == ds.windows);
}

TEST_CASE("loaders reject wrong magic, truncation and trailing bytes") {
    TempDir tmp;
    RngStream rng(11);
    RnnParams p = spectral_init(4, 2, 1.1, 1.0, rng);
    const std::string path = tmp.path("m.rnnp");
    save_rnn(p, path);

    CHECK_THROWS_AS(load_trajectory(path), Io);  // wrong magic

    std::string bytes = slurp(path);
    {
        std::ofstream out(tmp.path("trunc.rnnp"), std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    }
    CHECK_THROWS_AS(load_rnn(tmp.path("trunc.rnnp")), Io);

    {
        std::ofstream out(tmp.path("extra.rnnp"), std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.put('x');
    }
    CHECK_THROWS_AS(load_rnn(tmp.path("extra.rnnp")), Io);

    CHECK_THROWS_AS(load_rnn(tmp.path("missing.rnnp")), Io);
}

TEST_CASE("atomic_write leaves no temp file behind") {
    TempDir tmp;
    const std::string path = tmp.path("out.bin");
    atomic_write(path, "payload");
    CHECK(slurp(path) == "payload");
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
}

TEST_CASE("serialized doubles are little-endian on disk") {
    TempDir tmp;
    Trajectory t;
    t.dim = 1;
    t.dt = 1.0;
    t.states = {1.0};  // 0x3FF0000000000000
    const std::string path = tmp.path("le.traj");
    save_trajectory(t, path);
    std::string bytes = slurp(path);
    // header: magic(5) + dim(4) + count(8) + dt(8) + flag(1) = 26 bytes
    REQUIRE(bytes.size() == 34);
    const unsigned char* s =
        reinterpret_cast<const unsigned char*>(bytes.data()) + 26;
    CHECK(s[0] == 0x00);
    CHECK(s[6] == 0xF0);
    CHECK(s[7] == 0x3F);
}
