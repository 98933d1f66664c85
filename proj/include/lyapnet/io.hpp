#pragma once

#include <string>

#include "lyapnet/dataset.hpp"
#include "lyapnet/layered.hpp"
#include "lyapnet/rnn.hpp"
#include "lyapnet/trajectory.hpp"

namespace lyapnet {

// Binary formats, all little-endian with a 5-byte magic tag:
//   TRAJ1: dim u32, count u64, dt f64, rescale flag u8,
//          [scale f64 x dim, offset f64 x dim], states f64 x count*dim
//   RNNP1: d u32, k u32, alpha f64, then W, W_in, W_out (row-major), b
//   RNNL1: L u32, N u32, d u32, activation u8, per layer W, W_in, B,
//          then W_out (row-major)
//   DSET1: k u32, warmup u32, target u32, count u64, dt f64, rescale flag
//          u8 [+ 2*k f64], windows f64
// Writers go through a temp file and rename, so outputs are atomic.

void save_trajectory(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory(const std::string& path);

void save_rnn(const RnnParams& p, const std::string& path);
RnnParams load_rnn(const std::string& path);

void save_layered(const LayeredRnnParams& p, const std::string& path);
LayeredRnnParams load_layered(const std::string& path);

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

// Peek at the magic tag ("TRAJ1", "RNNP1", ...). Throws Io.
std::string file_magic(const std::string& path);

// Write `contents` to `path` atomically (temp file + rename).
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace lyapnet
