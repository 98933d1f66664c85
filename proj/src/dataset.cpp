#include "lyapnet/dataset.hpp"

#include "lyapnet/errors.hpp"

namespace lyapnet {

Dataset make_dataset(const Trajectory& traj, uint64_t n_seq,
                     uint32_t warmup_len, uint32_t target_len,
                     RngStream& rng) {
    if (n_seq == 0) throw InvalidArgument("make_dataset: n_seq must be >= 1");
    if (warmup_len < 1) throw InvalidArgument("make_dataset: warmup_len >= 1");
    if (target_len < 1) throw InvalidArgument("make_dataset: target_len >= 1");

    const uint64_t window = static_cast<uint64_t>(warmup_len) + target_len;
    const uint64_t count = traj.count();
    if (count < window)
        throw TrajectoryTooShort("make_dataset: trajectory has " +
                                 std::to_string(count) + " samples, window is " +
                                 std::to_string(window));

    Dataset ds;
    ds.k = traj.dim;
    ds.warmup_len = warmup_len;
    ds.target_len = target_len;
    ds.dt = traj.dt;
    ds.rescale = traj.rescale;
    ds.windows.reserve(n_seq * window * traj.dim);

    const uint64_t max_offset = count - window;  // inclusive
    for (uint64_t s = 0; s < n_seq; ++s) {
        const uint64_t off = rng.uniform_index(max_offset + 1);
        const double* begin = traj.state(off);
        ds.windows.insert(ds.windows.end(), begin, begin + window * traj.dim);
    }
    return ds;
}

}  // namespace lyapnet
