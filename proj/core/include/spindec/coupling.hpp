#pragma once

#include <vector>

#include "spindec/bath.hpp"
#include "spindec/bundle.hpp"
#include "spindec/spin_triplet.hpp"
#include "spindec/trace.hpp"

namespace spindec {

// Gap-operator contraction of one phonon mode: delta E contribution per unit
// mass-weighted displacement, rad/s per (sqrt(amu) * A).
struct ModeCoupling {
  int mode_index = -1;
  double k_rad_s_per_sqrtamu_A = 0.0;
  Channel channel = Channel::SpPh;
};

// Per-(atom, direction) gap response to a unit displacement, GHz/A:
// gap_expectation of each zfs gradient slice.  Requires zfs_grad.
std::vector<std::array<double, 3>> sp_ph_gap_factors(const SystemBundle& bundle,
                                                     const SpinTriplet& spin,
                                                     const QubitPair& pair);

// K_lambda = sum_{atoms, dirs} evec(a,d)/sqrt(m_a) * gap-tensor(a,d), where
// the gap tensor is gap_expectation(grad D) for sp-ph and I0 . grad A . dS for
// sp-nu-ph (occupied sites only; requires `nuclear`).  Modes at or below the
// frequency floor get K = 0.
std::vector<ModeCoupling> mode_couplings(const SystemBundle& bundle,
                                         const SpinTriplet& spin, const QubitPair& pair,
                                         Channel channel,
                                         const NuclearSpinConfig* nuclear = nullptr,
                                         double frequency_floor_thz = 0.1);

}  // namespace spindec
