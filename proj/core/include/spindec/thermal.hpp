#pragma once

#include <vector>

#include "spindec/bundle.hpp"

namespace spindec {

// Bose-Einstein occupation for an ordinary frequency in THz.
// Exactly 0 at T = 0; throws for freq_thz <= 0.
double occupation(double freq_thz, double temperature_K);

// Thermal + zero-point amplitude of every bundle mode.
// sigma^2 = hbar (2n + 1) / (2 omega), carried in amu * A^2 so that
// K [rad/s per sqrt(amu)*A] * sigma [sqrt(amu)*A] gives rad/s.
struct ThermalState {
  double temperature_K = 0.0;
  std::vector<double> occupation_n;      // per bundle mode; 0 for floored modes
  std::vector<double> sigma_sq_amu_A2;   // per bundle mode; 0 for floored modes
};

ThermalState thermal_state(const std::vector<PhononMode>& modes, double temperature_K,
                           double frequency_floor_thz = 0.1);

}  // namespace spindec
