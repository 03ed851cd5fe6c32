#include "spindec/coupling.hpp"

#include <cmath>

#include "spindec/constants.hpp"
#include "spindec/error.hpp"
#include "spindec/numeric.hpp"

namespace spindec {

std::vector<std::array<double, 3>> sp_ph_gap_factors(const SystemBundle& bundle,
                                                     const SpinTriplet& spin,
                                                     const QubitPair& pair) {
  validate_pair(pair);
  if (bundle.zfs_grad.empty()) {
    throw Error("couplings: bundle lacks zfs_grad_ghz_per_ang (required for sp-ph)");
  }
  const std::size_t n = bundle.n_atoms();
  std::vector<std::array<double, 3>> factors(n, {0.0, 0.0, 0.0});
  for (std::size_t a = 0; a < n; ++a) {
    for (int d = 0; d < 3; ++d) {
      factors[a][static_cast<std::size_t>(d)] =
          gap_expectation(spin, bundle.zfs_grad[a][static_cast<std::size_t>(d)], pair);
    }
  }
  return factors;
}

std::vector<ModeCoupling> mode_couplings(const SystemBundle& bundle,
                                         const SpinTriplet& spin, const QubitPair& pair,
                                         Channel channel,
                                         const NuclearSpinConfig* nuclear,
                                         double frequency_floor_thz) {
  validate_pair(pair);
  if (channel == Channel::SpNu) {
    throw Error("couplings: channel sp-nu is phonon-free and has no mode couplings");
  }
  if (bundle.modes.empty()) throw Error("couplings: bundle carries no modes");

  const std::size_t n = bundle.n_atoms();

  // per-(atom, direction) gap factor, native units per Angstrom
  std::vector<std::array<double, 3>> gap_factor(n, {0.0, 0.0, 0.0});
  double unit_to_rad_s = 0.0;

  if (channel == Channel::SpPh) {
    unit_to_rad_s = constants::two_pi * 1e9;  // GHz -> rad/s
    gap_factor = sp_ph_gap_factors(bundle, spin, pair);
  } else {  // SpNuPh
    if (bundle.hfi_grad.empty()) {
      throw Error(
          "couplings: bundle lacks hfi_grad_mhz_per_ang (required for sp-nu-ph)");
    }
    if (nuclear == nullptr) {
      throw Error("couplings: sp-nu-ph requires a nuclear spin configuration");
    }
    unit_to_rad_s = constants::two_pi * 1e6;  // MHz -> rad/s
    const Vec3 ds = spin.spin_expectation(pair.upper_ms) -
                    spin.spin_expectation(pair.lower_ms);
    for (std::size_t s = 0; s < nuclear->occupied_sites.size(); ++s) {
      const int site = nuclear->occupied_sites[s];
      if (site < 0 || static_cast<std::size_t>(site) >= n) {
        throw Error("couplings: occupied site " + std::to_string(site) +
                    " out of range");
      }
      const Vec3& i0 = nuclear->initial_moments[s];
      for (int d = 0; d < 3; ++d) {
        const Mat3& slice =
            bundle.hfi_grad[static_cast<std::size_t>(site)][static_cast<std::size_t>(d)];
        gap_factor[static_cast<std::size_t>(site)][static_cast<std::size_t>(d)] =
            i0.dot(slice * ds);
      }
    }
  }

  std::vector<double> inv_sqrt_mass(n);
  for (std::size_t a = 0; a < n; ++a) {
    inv_sqrt_mass[a] = 1.0 / std::sqrt(bundle.atoms[a].mass_amu);
  }

  std::vector<ModeCoupling> out;
  out.reserve(bundle.modes.size());
  std::vector<double> terms(3 * n);
  for (std::size_t m = 0; m < bundle.modes.size(); ++m) {
    const PhononMode& mode = bundle.modes[m];
    ModeCoupling mc;
    mc.mode_index = static_cast<int>(m);
    mc.channel = channel;
    if (mode.freq_thz > frequency_floor_thz) {
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t d = 0; d < 3; ++d) {
          terms[3 * a + d] =
              mode.evec[a][static_cast<int>(d)] * inv_sqrt_mass[a] * gap_factor[a][d];
        }
      }
      mc.k_rad_s_per_sqrtamu_A = unit_to_rad_s * pairwise_sum(terms);
      if (!std::isfinite(mc.k_rad_s_per_sqrtamu_A)) {
        throw Error("couplings: non-finite coupling for mode " + std::to_string(m));
      }
    }
    out.push_back(mc);
  }
  return out;
}

}  // namespace spindec
