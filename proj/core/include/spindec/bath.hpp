#pragma once

#include <cstdint>
#include <vector>

#include "spindec/bundle.hpp"
#include "spindec/spin_triplet.hpp"
#include "spindec/trace.hpp"

namespace spindec {

// One random nuclear-spin placement with initial orientations.
// Moments carry the spin-1/2 magnitude: |I0| = 1/2 per site.
struct NuclearSpinConfig {
  std::vector<int> occupied_sites;     // ascending atom indices
  std::vector<Vec3> initial_moments;   // aligned with occupied_sites
  std::uint64_t seed = 0;
  double concentration = 0.0;
  Vec3 b_field_gauss = Vec3::Zero();
  double temperature_K = 0.0;
};

// Occupies each spin_active site independently with probability
// `concentration`.  Site occupancy uses one uniform draw per spin_active site
// and orientations are drawn for every such site whether or not it is
// occupied, so configurations are nested across concentrations and identical
// across field sweeps at a fixed seed.  Orientations tilt away from the field
// direction by a Gaussian angle of width sigma_theta = c_T * T with uniform
// azimuth; at B = 0 the bundle's defect axis takes over as the reference
// direction.
NuclearSpinConfig sample_configuration(const SystemBundle& bundle, double concentration,
                                       const Vec3& b_field_gauss, double temperature_K,
                                       std::uint64_t seed,
                                       double c_T_rad_per_K = 1e-3);

struct PrecessionTrajectory {
  TimeGrid grid;
  std::vector<std::vector<Vec3>> moments;    // [site][time step]
  std::vector<Vec3> effective_fields_gauss;  // per occupied site
};

// Classical precession dI/dt = gamma_n I x B_eff per occupied site, where
// B_eff = B_ext + A^T <S> / gamma_n (gauss) with the electron pinned in one
// qubit level.  Integration is an exact per-step rotation about B_eff, so
// |I| is conserved to rounding.  Rejects grids with dt >= 1/(10 f_Larmor,max).
PrecessionTrajectory precess(const NuclearSpinConfig& config,
                             const std::vector<Mat3>& hfi_MHz, const SpinTriplet& spin,
                             int electron_ms, const TimeGrid& grid);

// delta E(t) = sum_sites (I(t) - I0) . A . dS, converted to rad/s, where
// dS = <upper|S|upper> - <lower|S|lower>.
FluctuationTrace sp_nu_fluctuation(const PrecessionTrajectory& trajectory,
                                   const NuclearSpinConfig& config,
                                   const std::vector<Mat3>& hfi_MHz,
                                   const SpinTriplet& spin, const QubitPair& pair);

}  // namespace spindec
