#include "spindec/thermal.hpp"

#include <cmath>

#include "spindec/constants.hpp"
#include "spindec/error.hpp"

namespace spindec {

double occupation(double freq_thz, double temperature_K) {
  if (!(freq_thz > 0.0)) throw Error("occupation: frequency must be > 0 THz");
  if (temperature_K < 0.0) throw Error("occupation: temperature must be >= 0 K");
  if (temperature_K == 0.0) return 0.0;
  const double x = constants::h_over_kB_K_per_THz * freq_thz / temperature_K;
  // expm1 keeps precision at high T (x -> 0) and underflows cleanly at low T
  return 1.0 / std::expm1(x);
}

ThermalState thermal_state(const std::vector<PhononMode>& modes, double temperature_K,
                           double frequency_floor_thz) {
  if (temperature_K < 0.0) throw Error("thermal state: temperature must be >= 0 K");
  ThermalState st;
  st.temperature_K = temperature_K;
  st.occupation_n.reserve(modes.size());
  st.sigma_sq_amu_A2.reserve(modes.size());
  for (const PhononMode& m : modes) {
    if (m.freq_thz <= frequency_floor_thz) {
      st.occupation_n.push_back(0.0);
      st.sigma_sq_amu_A2.push_back(0.0);
      continue;
    }
    const double n = occupation(m.freq_thz, temperature_K);
    const double omega_rad_s = constants::two_pi * m.freq_thz * 1e12;
    st.occupation_n.push_back(n);
    st.sigma_sq_amu_A2.push_back(constants::hbar_amu_A2_per_s * (2.0 * n + 1.0) /
                                 (2.0 * omega_rad_s));
  }
  return st;
}

}  // namespace spindec
