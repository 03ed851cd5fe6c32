#include "spindec/bath.hpp"

#include <cmath>

#include "spindec/constants.hpp"
#include "spindec/error.hpp"
#include "spindec/rng.hpp"

namespace spindec {

namespace {

constexpr double kMomentMagnitude = 0.5;  // spin-1/2

// deterministic orthonormal frame with n as the third axis
void frame_about(const Vec3& n, Vec3& e1, Vec3& e2) {
  const Vec3 ref = std::abs(n[2]) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
  e1 = n.cross(ref).normalized();
  e2 = n.cross(e1);
}

}  // namespace

NuclearSpinConfig sample_configuration(const SystemBundle& bundle, double concentration,
                                       const Vec3& b_field_gauss, double temperature_K,
                                       std::uint64_t seed, double c_T_rad_per_K) {
  if (!(concentration >= 0.0 && concentration <= 1.0)) {
    throw Error("bath: concentration must lie in [0, 1]");
  }
  if (temperature_K < 0.0) throw Error("bath: temperature must be >= 0 K");
  if (c_T_rad_per_K < 0.0) throw Error("bath: orientation width constant must be >= 0");

  bool any_active = false;
  for (const auto& atom : bundle.atoms) {
    if (atom.spin_active) {
      any_active = true;
      break;
    }
  }
  if (!any_active) throw Error("bath: bundle has no spin_active sites");

  Vec3 ref_dir = b_field_gauss;
  if (ref_dir.norm() == 0.0) ref_dir = bundle.meta.axis;
  ref_dir.normalize();
  Vec3 e1, e2;
  frame_about(ref_dir, e1, e2);

  const double sigma_theta = c_T_rad_per_K * temperature_K;

  NuclearSpinConfig cfg;
  cfg.seed = seed;
  cfg.concentration = concentration;
  cfg.b_field_gauss = b_field_gauss;
  cfg.temperature_K = temperature_K;

  Rng rng(seed);
  for (std::size_t i = 0; i < bundle.n_atoms(); ++i) {
    if (!bundle.atoms[i].spin_active) continue;
    // fixed draw order per site: occupancy, tilt, azimuth.  Drawing the
    // orientation unconditionally keeps configurations nested across
    // concentrations (same uniforms) at a fixed seed.
    const double u = rng.uniform();
    const double theta = sigma_theta * rng.normal();
    const double phi = rng.uniform_angle();
    if (u >= concentration) continue;
    const Vec3 dir = std::cos(theta) * ref_dir +
                     std::sin(theta) * (std::cos(phi) * e1 + std::sin(phi) * e2);
    cfg.occupied_sites.push_back(static_cast<int>(i));
    cfg.initial_moments.push_back(kMomentMagnitude * dir);
  }
  return cfg;
}

PrecessionTrajectory precess(const NuclearSpinConfig& config,
                             const std::vector<Mat3>& hfi_MHz, const SpinTriplet& spin,
                             int electron_ms, const TimeGrid& grid) {
  grid.validate();
  const std::size_t n_sites = config.occupied_sites.size();
  if (config.initial_moments.size() != n_sites) {
    throw Error("bath: site mismatch between occupancy and moments");
  }

  const Vec3 s_expect = spin.spin_expectation(electron_ms);
  const double gamma_n_MHz_per_G = constants::gamma_n_kHz_per_G * 1e-3;

  PrecessionTrajectory traj;
  traj.grid = grid;
  traj.moments.resize(n_sites);
  traj.effective_fields_gauss.resize(n_sites);

  double f_max_Hz = 0.0;
  for (std::size_t s = 0; s < n_sites; ++s) {
    const int site = config.occupied_sites[s];
    if (site < 0 || static_cast<std::size_t>(site) >= hfi_MHz.size()) {
      throw Error("bath: site mismatch: occupied site " + std::to_string(site) +
                  " has no hyperfine tensor");
    }
    const Vec3 hyperfine_MHz =
        hfi_MHz[static_cast<std::size_t>(site)].transpose() * s_expect;
    const Vec3 b_eff = config.b_field_gauss + hyperfine_MHz / gamma_n_MHz_per_G;
    traj.effective_fields_gauss[s] = b_eff;
    f_max_Hz = std::max(f_max_Hz, constants::gamma_n_kHz_per_G * 1e3 * b_eff.norm());
  }

  if (f_max_Hz > 0.0) {
    const double dt_required = 1.0 / (10.0 * f_max_Hz);
    if (grid.dt_s >= dt_required) {
      throw Error("bath: grid under-resolves precession: need dt < " +
                  std::to_string(dt_required) + " s for f_max = " +
                  std::to_string(f_max_Hz) + " Hz");
    }
  }

  for (std::size_t s = 0; s < n_sites; ++s) {
    const Vec3& b_eff = traj.effective_fields_gauss[s];
    const double b_norm = b_eff.norm();
    auto& series = traj.moments[s];
    series.resize(static_cast<std::size_t>(grid.n));
    series[0] = config.initial_moments[s];
    if (b_norm == 0.0) {
      for (int k = 1; k < grid.n; ++k) series[static_cast<std::size_t>(k)] = series[0];
      continue;
    }
    // dI/dt = 2 pi gamma_n I x B  ==  rotation at rate -omega about B_hat
    const double omega_rad_s =
        constants::two_pi * constants::gamma_n_kHz_per_G * 1e3 * b_norm;
    const Eigen::AngleAxisd step(-omega_rad_s * grid.dt_s, Vec3(b_eff / b_norm));
    const Mat3 rot = step.toRotationMatrix();
    for (int k = 1; k < grid.n; ++k) {
      series[static_cast<std::size_t>(k)] = rot * series[static_cast<std::size_t>(k - 1)];
    }
  }
  return traj;
}

FluctuationTrace sp_nu_fluctuation(const PrecessionTrajectory& trajectory,
                                   const NuclearSpinConfig& config,
                                   const std::vector<Mat3>& hfi_MHz,
                                   const SpinTriplet& spin, const QubitPair& pair) {
  validate_pair(pair);
  const std::size_t n_sites = config.occupied_sites.size();
  if (trajectory.moments.size() != n_sites) {
    throw Error("bath: site mismatch between trajectory and configuration");
  }

  const Vec3 ds = spin.spin_expectation(pair.upper_ms) -
                  spin.spin_expectation(pair.lower_ms);

  std::vector<Vec3> weight_MHz(n_sites);
  for (std::size_t s = 0; s < n_sites; ++s) {
    const int site = config.occupied_sites[s];
    if (site < 0 || static_cast<std::size_t>(site) >= hfi_MHz.size()) {
      throw Error("bath: site mismatch: occupied site " + std::to_string(site) +
                  " has no hyperfine tensor");
    }
    weight_MHz[s] = hfi_MHz[static_cast<std::size_t>(site)] * ds;
  }

  FluctuationTrace trace;
  trace.grid = trajectory.grid;
  trace.channel = Channel::SpNu;
  trace.seed = config.seed;
  trace.temperature_K = config.temperature_K;
  trace.values_rad_s.assign(static_cast<std::size_t>(trajectory.grid.n), 0.0);

  for (std::size_t s = 0; s < n_sites; ++s) {
    const Vec3 i0 = trajectory.moments[s].front();
    for (int k = 0; k < trajectory.grid.n; ++k) {
      const Vec3 di = trajectory.moments[s][static_cast<std::size_t>(k)] - i0;
      trace.values_rad_s[static_cast<std::size_t>(k)] +=
          constants::two_pi * 1e6 * di.dot(weight_MHz[s]);
    }
  }
  return trace;
}

}  // namespace spindec
