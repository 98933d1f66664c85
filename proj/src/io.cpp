#include "lyapnet/io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "lyapnet/errors.hpp"

namespace lyapnet {

namespace {

void put_u8(std::string& out, uint8_t v) {
    out.push_back(static_cast<char>(v));
}

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
    put_u64(out, std::bit_cast<uint64_t>(v));
}

void put_mat_rowmajor(std::string& out, const Mat& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
}

struct Reader {
    std::string buf;
    size_t at = 0;
    std::string path;

    void need(size_t n) const {
        if (at + n > buf.size())
            throw Io("truncated file: " + path);
    }
    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(buf[at++]);
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[at + i]))
                 << (8 * i);
        at += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<uint64_t>(static_cast<uint8_t>(buf[at + i]))
                 << (8 * i);
        at += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    void magic(const char* tag) {
        need(5);
        if (std::memcmp(buf.data() + at, tag, 5) != 0)
            throw Io(path + ": bad magic, expected " + tag);
        at += 5;
    }
    Mat mat_rowmajor(Eigen::Index rows, Eigen::Index cols) {
        Mat m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = f64();
        return m;
    }
    void done() const {
        if (at != buf.size())
            throw Io(path + ": trailing bytes after payload");
    }
};

Reader read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Io("cannot open " + path);
    Reader r;
    r.path = path;
    r.buf.assign(std::istreambuf_iterator<char>(in),
                 std::istreambuf_iterator<char>());
    if (!in.good() && !in.eof()) throw Io("read error on " + path);
    return r;
}

}  // namespace

void atomic_write(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Io("cannot open " + tmp + " for writing");
        out.write(contents.data(),
                  static_cast<std::streamsize>(contents.size()));
        if (!out.good()) throw Io("write error on " + tmp);
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Io("cannot rename " + tmp + " to " + path);
    }
}

std::string file_magic(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Io("cannot open " + path);
    char tag[5];
    in.read(tag, 5);
    if (in.gcount() != 5) throw Io(path + ": shorter than a magic tag");
    return std::string(tag, 5);
}

void save_trajectory(const Trajectory& traj, const std::string& path) {
    std::string out;
    out.reserve(32 + traj.states.size() * 8);
    out += "TRAJ1";
    put_u32(out, traj.dim);
    put_u64(out, traj.count());
    put_f64(out, traj.dt);
    put_u8(out, traj.rescale ? 1 : 0);
    if (traj.rescale) {
        for (double v : traj.rescale->scale) put_f64(out, v);
        for (double v : traj.rescale->offset) put_f64(out, v);
    }
    for (double v : traj.states) put_f64(out, v);
    atomic_write(path, out);
}

Trajectory load_trajectory(const std::string& path) {
    Reader r = read_file(path);
    r.magic("TRAJ1");
    Trajectory traj;
    traj.dim = r.u32();
    const uint64_t count = r.u64();
    traj.dt = r.f64();
    if (traj.dim == 0) throw Io(path + ": zero dimension");
    if (r.u8()) {
        RescaleRecord rec;
        rec.scale.resize(traj.dim);
        rec.offset.resize(traj.dim);
        for (auto& v : rec.scale) v = r.f64();
        for (auto& v : rec.offset) v = r.f64();
        traj.rescale = std::move(rec);
    }
    traj.states.resize(count * traj.dim);
    for (auto& v : traj.states) v = r.f64();
    r.done();
    return traj;
}

void save_rnn(const RnnParams& p, const std::string& path) {
    p.validate();
    std::string out;
    out.reserve(32 + 8 * (static_cast<size_t>(p.d) * p.d +
                          2 * static_cast<size_t>(p.d) * p.k + p.d));
    out += "RNNP1";
    put_u32(out, p.d);
    put_u32(out, p.k);
    put_f64(out, p.alpha);
    put_mat_rowmajor(out, p.w);
    put_mat_rowmajor(out, p.w_in);
    put_mat_rowmajor(out, p.w_out);
    for (Eigen::Index i = 0; i < p.b.size(); ++i) put_f64(out, p.b[i]);
    atomic_write(path, out);
}

RnnParams load_rnn(const std::string& path) {
    Reader r = read_file(path);
    r.magic("RNNP1");
    RnnParams p;
    p.d = r.u32();
    p.k = r.u32();
    p.alpha = r.f64();
    p.w = r.mat_rowmajor(p.d, p.d);
    p.w_in = r.mat_rowmajor(p.d, p.k);
    p.w_out = r.mat_rowmajor(p.k, p.d);
    p.b.resize(p.d);
    for (uint32_t i = 0; i < p.d; ++i) p.b[i] = r.f64();
    r.done();
    p.validate();
    return p;
}

void save_layered(const LayeredRnnParams& p, const std::string& path) {
    p.validate();
    std::string out;
    out += "RNNL1";
    put_u32(out, p.layers);
    put_u32(out, p.width);
    put_u32(out, p.out_dim);
    put_u8(out, static_cast<uint8_t>(p.activation));
    for (uint32_t l = 0; l < p.layers; ++l) {
        put_mat_rowmajor(out, p.w[l]);
        put_mat_rowmajor(out, p.w_in[l]);
        for (Eigen::Index i = 0; i < p.b[l].size(); ++i)
            put_f64(out, p.b[l][i]);
    }
    put_mat_rowmajor(out, p.w_out);
    atomic_write(path, out);
}

LayeredRnnParams load_layered(const std::string& path) {
    Reader r = read_file(path);
    r.magic("RNNL1");
    LayeredRnnParams p;
    p.layers = r.u32();
    p.width = r.u32();
    p.out_dim = r.u32();
    const uint8_t act = r.u8();
    if (act > 1) throw Io(path + ": unknown activation tag");
    p.activation = static_cast<Activation>(act);
    for (uint32_t l = 0; l < p.layers; ++l) {
        p.w.push_back(r.mat_rowmajor(p.width, p.width));
        p.w_in.push_back(
            r.mat_rowmajor(p.width, l == 0 ? p.out_dim : p.width));
        Vec b(p.width);
        for (uint32_t i = 0; i < p.width; ++i) b[i] = r.f64();
        p.b.push_back(std::move(b));
    }
    p.w_out = r.mat_rowmajor(p.out_dim, p.width);
    r.done();
    p.validate();
    return p;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::string out;
    out.reserve(48 + ds.windows.size() * 8);
    out += "DSET1";
    put_u32(out, ds.k);
    put_u32(out, ds.warmup_len);
    put_u32(out, ds.target_len);
    put_u64(out, ds.size());
    put_f64(out, ds.dt);
    put_u8(out, ds.rescale ? 1 : 0);
    if (ds.rescale) {
        for (double v : ds.rescale->scale) put_f64(out, v);
        for (double v : ds.rescale->offset) put_f64(out, v);
    }
    for (double v : ds.windows) put_f64(out, v);
    atomic_write(path, out);
}

Dataset load_dataset(const std::string& path) {
    Reader r = read_file(path);
    r.magic("DSET1");
    Dataset ds;
    ds.k = r.u32();
    ds.warmup_len = r.u32();
    ds.target_len = r.u32();
    const uint64_t count = r.u64();
    ds.dt = r.f64();
    if (ds.k == 0) throw Io(path + ": zero signal dimension");
    if (r.u8()) {
        RescaleRecord rec;
        rec.scale.resize(ds.k);
        rec.offset.resize(ds.k);
        for (auto& v : rec.scale) v = r.f64();
        for (auto& v : rec.offset) v = r.f64();
        ds.rescale = std::move(rec);
    }
    ds.windows.resize(count * ds.window_len() * ds.k);
    for (auto& v : ds.windows) v = r.f64();
    r.done();
    return ds;
}

}  // namespace lyapnet
