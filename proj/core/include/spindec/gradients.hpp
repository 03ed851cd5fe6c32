#pragma once

#include <vector>

#include "spindec/bundle.hpp"
#include "spindec/oracle.hpp"

namespace spindec {

struct GradientSet {
  std::vector<TensorGradient> zfs_grad;  // GHz/A
  std::vector<TensorGradient> hfi_grad;  // MHz/A (site's own tensor vs own motion)
};

// Central differences (T(x+dx) - T(x-dx)) / (2 dx) per atom, per Cartesian
// direction.  (atom, direction) evaluations are independent; n_threads > 1
// distributes atoms over a small pool with by-index result placement, so the
// output never depends on scheduling.
GradientSet finite_difference_gradients(const TensorOracle& oracle,
                                        const std::vector<Vec3>& positions_ang,
                                        double dx_ang, int n_threads = 1);

}  // namespace spindec
