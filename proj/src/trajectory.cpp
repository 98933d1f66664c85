#include "lyapnet/trajectory.hpp"

#include <cmath>
#include <limits>

#include "lyapnet/errors.hpp"

namespace lyapnet {

Trajectory rescale_to_unit_cube(const Trajectory& traj) {
    const uint64_t n = traj.count();
    if (n < 2)
        throw InvalidArgument("rescale_to_unit_cube: need at least 2 states");

    const uint32_t d = traj.dim;
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (uint64_t i = 0; i < n; ++i) {
        const double* s = traj.state(i);
        for (uint32_t j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], s[j]);
            hi[j] = std::max(hi[j], s[j]);
        }
    }

    Trajectory out;
    out.dim = d;
    out.dt = traj.dt;
    RescaleRecord rec;
    rec.scale.resize(d);
    rec.offset.resize(d);
    for (uint32_t j = 0; j < d; ++j) {
        if (!(hi[j] > lo[j]))
            throw DegenerateRange("rescale_to_unit_cube: constant dimension " +
                                  std::to_string(j));
        rec.scale[j] = (hi[j] - lo[j]) / 2.0;
        rec.offset[j] = (hi[j] + lo[j]) / 2.0;
    }
    out.states.resize(traj.states.size());
    for (uint64_t i = 0; i < n; ++i) {
        const double* s = traj.state(i);
        double* t = out.states.data() + i * d;
        for (uint32_t j = 0; j < d; ++j)
            t[j] = (s[j] - rec.offset[j]) / rec.scale[j];
    }
    out.rescale = std::move(rec);
    return out;
}

Vec unrescale_state(const RescaleRecord& rec, const Vec& stored) {
    if (stored.size() != static_cast<Eigen::Index>(rec.scale.size()))
        throw LengthMismatch("unrescale_state: dimension mismatch");
    Vec out(stored.size());
    for (Eigen::Index i = 0; i < stored.size(); ++i)
        out[i] = rec.scale[i] * stored[i] + rec.offset[i];
    return out;
}

}  // namespace lyapnet
