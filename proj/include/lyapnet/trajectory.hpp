#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lyapnet/linalg.hpp"

namespace lyapnet {

// Per-dimension affine record: original = scale * stored + offset.
struct RescaleRecord {
    std::vector<double> scale;
    std::vector<double> offset;
};

// Uniformly sampled state sequence. dt is the time between consecutive
// stored samples (integration step times the subsample stride). When
// `rescale` is present the stored states live in [-1, 1]^dim.
struct Trajectory {
    uint32_t dim = 0;
    double dt = 0.0;
    std::vector<double> states;  // count * dim, state-major
    std::optional<RescaleRecord> rescale;

    uint64_t count() const { return dim ? states.size() / dim : 0; }
    const double* state(uint64_t i) const { return states.data() + i * dim; }
    double* state(uint64_t i) { return states.data() + i * dim; }

    Vec state_vec(uint64_t i) const {
        return Eigen::Map<const Vec>(state(i), dim);
    }
};

// Affine map onto [-1, 1]^dim; min -> -1 and max -> +1 per dimension.
// Throws DegenerateRange when a dimension has zero extent, and
// InvalidArgument on fewer than 2 states.
Trajectory rescale_to_unit_cube(const Trajectory& traj);

// Map a stored (rescaled) state back to original units using the record.
Vec unrescale_state(const RescaleRecord& rec, const Vec& stored);

}  // namespace lyapnet
