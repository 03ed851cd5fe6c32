#include "spindec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <thread>

#include "spindec/bath.hpp"
#include "spindec/constants.hpp"
#include "spindec/error.hpp"
#include "spindec/numeric.hpp"
#include "spindec/rng.hpp"
#include "spindec/thermal.hpp"

namespace spindec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// fallback observation window for the phonon-free nuclear channel: a fixed
// fraction of the slowest external-field Larmor period of interest, so the
// sampled dynamics sit in the dephasing-relevant early-time regime
constexpr double kNuclearWindowS = 0.35e-6;
constexpr int kNuclearSamples = 257;

CorrelationData stride_for_fit(const CorrelationData& c, int max_samples) {
  const auto n = static_cast<int>(c.c_rad2_s2.size());
  if (max_samples < 16) max_samples = 16;
  if (n <= max_samples) return c;
  const int stride = (n + max_samples - 1) / max_samples;
  CorrelationData out;
  out.analytic = c.analytic;
  out.grid.dt_s = c.grid.dt_s * stride;
  out.c_rad2_s2.reserve(static_cast<std::size_t>(n / stride) + 1);
  for (int i = 0; i < n; i += stride) {
    out.c_rad2_s2.push_back(c.c_rad2_s2[static_cast<std::size_t>(i)]);
  }
  out.grid.n = static_cast<int>(out.c_rad2_s2.size());
  return out;
}

struct RateSummary {
  double gamma_inverse_s = kInf;
  double gamma_lower_s = kInf;
  double gamma_upper_s = kInf;
  double delta_sq = 0.0;
  double tau_c_s = 0.0;
  Regime regime = Regime::Undefined;
  std::string status = "no-coupling";
  FitPair fits;
};

RateSummary rates_from_correlation(const CorrelationData& corr, int fit_max_samples) {
  RateSummary out;
  out.delta_sq = corr.c0();
  if (!(out.delta_sq > 0.0)) return out;  // nothing fluctuates: inf sentinel

  out.fits = fit_correlation(stride_for_fit(corr, fit_max_samples));
  out.fits.delta_sq_rad2_s2 = out.delta_sq;

  const RateResult plain = extract_rate(out.delta_sq, out.fits.plain.tau_c_s);
  const RateResult sinus = extract_rate(out.delta_sq, out.fits.sinusoidal.tau_c_s);
  out.gamma_inverse_s = plain.gamma_inverse_s;
  out.gamma_lower_s = std::min(plain.gamma_inverse_s, sinus.gamma_inverse_s);
  out.gamma_upper_s = std::max(plain.gamma_inverse_s, sinus.gamma_inverse_s);
  out.tau_c_s = out.fits.plain.tau_c_s;
  out.regime = plain.regime;

  // Status follows the reported (plain) model; the sinusoidal fit only widens
  // the interval, so its convergence is recorded in `fits` but not flagged.
  if (!out.fits.plain.converged) {
    out.status = "fit-unconverged";
  } else if (!out.fits.plain.decay_resolved) {
    out.status = "no-decay";
  } else {
    out.status = "ok";
  }
  return out;
}

void run_indexed(int n_tasks, int n_threads, const std::function<void(int)>& task) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_tasks));
  auto body = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      try {
        task(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (n_threads <= 1 || n_tasks <= 1) {
    body(0, n_tasks);
  } else {
    const int workers = std::min(n_threads, n_tasks);
    const int chunk = (n_tasks + workers - 1) / workers;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      if (begin >= n_tasks) break;
      pool.emplace_back(body, begin, std::min(n_tasks, begin + chunk));
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

TimeGrid resolve_grid(const GridOverrides& overrides, const TimeGrid& fallback) {
  TimeGrid g = fallback;
  if (overrides.dt_s || overrides.t_max_s) {
    const double dt = overrides.dt_s.value_or(fallback.dt_s);
    const double t_max = overrides.t_max_s.value_or(fallback.t_max());
    if (!(dt > 0.0) || !(t_max > dt)) {
      throw Error("grid: overrides require 0 < dt < t_max");
    }
    g.dt_s = dt;
    // smallest n with (n-1) dt >= t_max, tolerant of rounding in t_max / dt
    const double raw = t_max / dt;
    const double steps = std::ceil(raw * (1.0 - 1e-12));
    if (steps > 2e7) throw Error("grid: override produces more than 2e7 samples");
    g.n = static_cast<int>(steps) + 1;
  }
  g.validate();
  return g;
}

PureResult pure_dephasing(const SystemBundle& bundle, const SpinTriplet& spin,
                          const QubitPair& pair, double temperature_K,
                          const PipelineOptions& options) {
  const auto couplings = mode_couplings(bundle, spin, pair, Channel::SpPh, nullptr,
                                        options.frequency_floor_thz);
  const ThermalState thermal =
      thermal_state(bundle.modes, temperature_K, options.frequency_floor_thz);
  const TimeGrid grid = resolve_grid(
      options.grid, default_phonon_grid(bundle.modes, options.frequency_floor_thz));

  PureResult out;
  out.temperature_K = temperature_K;
  out.correlation = analytic_autocorrelation(couplings, bundle.modes, thermal, grid);

  const RateSummary rs = rates_from_correlation(out.correlation, options.fit_max_samples);
  out.gamma_inverse_s = rs.gamma_inverse_s;
  out.gamma_lower_s = rs.gamma_lower_s;
  out.gamma_upper_s = rs.gamma_upper_s;
  out.delta_sq_rad2_s2 = rs.delta_sq;
  out.tau_c_s = rs.tau_c_s;
  out.regime = rs.regime;
  out.status = rs.status;
  out.fits = rs.fits;
  return out;
}

DisorderResult disorder_dephasing(const SystemBundle& bundle, const SpinTriplet& spin,
                                  const QubitPair& pair, Channel channel,
                                  double concentration, const Vec3& b_field_gauss,
                                  double temperature_K,
                                  const EnsembleSettings& settings) {
  if (channel == Channel::SpPh) {
    throw Error("disorder: channel must be sp-nu or sp-nu-ph");
  }
  if (settings.n_configs < 1) throw Error("disorder: need at least one configuration");
  if (bundle.hfi_MHz.empty()) {
    throw Error("disorder: bundle lacks hfi_mhz (required for nuclear channels)");
  }
  if (channel == Channel::SpNuPh && bundle.hfi_grad.empty()) {
    throw Error("disorder: bundle lacks hfi_grad_mhz_per_ang (required for sp-nu-ph)");
  }

  const double floor = settings.pipeline.frequency_floor_thz;
  const int electron_ms = settings.electron_ms.value_or(pair.upper_ms);

  TimeGrid fallback;
  ThermalState thermal;
  if (channel == Channel::SpNu) {
    fallback.dt_s = kNuclearWindowS / (kNuclearSamples - 1);
    fallback.n = kNuclearSamples;
  } else {
    fallback = default_phonon_grid(bundle.modes, floor);
    thermal = thermal_state(bundle.modes, temperature_K, floor);
  }
  const TimeGrid grid = resolve_grid(settings.pipeline.grid, fallback);

  const int n_cfg = settings.n_configs;
  std::vector<CorrelationData> per_config(static_cast<std::size_t>(n_cfg));
  std::vector<double> per_gamma(static_cast<std::size_t>(n_cfg), 0.0);

  run_indexed(n_cfg, settings.threads, [&](int i) {
    const std::uint64_t seed_i = split_seed(settings.seed, static_cast<std::uint64_t>(i));
    const NuclearSpinConfig cfg =
        sample_configuration(bundle, concentration, b_field_gauss, temperature_K,
                             seed_i, settings.c_T_rad_per_K);

    CorrelationData ci;
    if (channel == Channel::SpNu) {
      if (cfg.occupied_sites.empty()) {
        ci.grid = grid;
        ci.c_rad2_s2.assign(static_cast<std::size_t>(grid.n), 0.0);
      } else {
        const PrecessionTrajectory traj =
            precess(cfg, bundle.hfi_MHz, spin, electron_ms, grid);
        const FluctuationTrace trace =
            sp_nu_fluctuation(traj, cfg, bundle.hfi_MHz, spin, pair);
        ci = autocorrelation(std::vector<FluctuationTrace>{trace});
      }
    } else {
      const auto couplings =
          mode_couplings(bundle, spin, pair, Channel::SpNuPh, &cfg, floor);
      ci = analytic_autocorrelation(couplings, bundle.modes, thermal, grid);
    }

    const RateSummary ri =
        rates_from_correlation(ci, settings.pipeline.fit_max_samples);
    per_gamma[static_cast<std::size_t>(i)] =
        std::isfinite(ri.gamma_inverse_s) ? 1.0 / ri.gamma_inverse_s : 0.0;
    per_config[static_cast<std::size_t>(i)] = std::move(ci);
  });

  // ensemble average of the per-configuration autocorrelations, fixed order
  CorrelationData mean;
  mean.grid = grid;
  mean.analytic = channel == Channel::SpNuPh;
  mean.c_rad2_s2.assign(static_cast<std::size_t>(grid.n), 0.0);
  for (int i = 0; i < n_cfg; ++i) {
    const auto& ci = per_config[static_cast<std::size_t>(i)].c_rad2_s2;
    for (std::size_t k = 0; k < mean.c_rad2_s2.size(); ++k) {
      mean.c_rad2_s2[k] += ci[k];
    }
  }
  for (double& v : mean.c_rad2_s2) v /= static_cast<double>(n_cfg);

  const RateSummary rs = rates_from_correlation(mean, settings.pipeline.fit_max_samples);

  DisorderResult out;
  out.channel = channel;
  out.concentration = concentration;
  out.b_field_gauss = b_field_gauss;
  out.temperature_K = temperature_K;
  out.gamma_inverse_s = rs.gamma_inverse_s;
  out.gamma_lower_s = rs.gamma_lower_s;
  out.gamma_upper_s = rs.gamma_upper_s;
  out.delta_sq_rad2_s2 = rs.delta_sq;
  out.tau_c_s = rs.tau_c_s;
  out.regime = rs.regime;
  out.n_configs = n_cfg;
  out.seed = settings.seed;
  out.status = rs.status;
  out.fits = rs.fits;
  out.correlation = std::move(mean);
  out.per_config_gamma_per_s = std::move(per_gamma);

  // Monte-Carlo standard error of 1/Gamma via the delta method on the
  // per-configuration rates: SE(1/G) = SE(G) / G_ensemble^2
  if (n_cfg > 1 && std::isfinite(out.gamma_inverse_s)) {
    double mean_g = 0.0;
    for (double g : out.per_config_gamma_per_s) mean_g += g;
    mean_g /= static_cast<double>(n_cfg);
    double var = 0.0;
    for (double g : out.per_config_gamma_per_s) var += (g - mean_g) * (g - mean_g);
    var /= static_cast<double>(n_cfg - 1);
    const double se_rate = std::sqrt(var / static_cast<double>(n_cfg));
    const double gamma_ens = 1.0 / out.gamma_inverse_s;
    out.stderr_gamma_inverse_s =
        gamma_ens > 0.0 ? se_rate / (gamma_ens * gamma_ens) : 0.0;
  }
  return out;
}

std::vector<ResolvedRow> resolve_contributions(const SystemBundle& bundle,
                                               const SpinTriplet& spin,
                                               const QubitPair& pair, ResolveBy by,
                                               double temperature_K,
                                               const PipelineOptions& options,
                                               double shell_radius_ang) {
  const double floor = options.frequency_floor_thz;
  const auto couplings =
      mode_couplings(bundle, spin, pair, Channel::SpPh, nullptr, floor);
  const ThermalState thermal = thermal_state(bundle.modes, temperature_K, floor);
  const TimeGrid grid =
      resolve_grid(options.grid, default_phonon_grid(bundle.modes, floor));
  const Vec3 defect = bundle.defect_position();

  std::vector<ResolvedRow> rows;

  if (by == ResolveBy::Mode) {
    double r_max = 0.0;
    for (const auto& atom : bundle.atoms) {
      r_max = std::max(r_max, (atom.pos_ang - defect).norm());
    }
    const double shell = shell_radius_ang > 0.0 ? shell_radius_ang : 0.5 * r_max;

    for (std::size_t m = 0; m < bundle.modes.size(); ++m) {
      const PhononMode& mode = bundle.modes[m];
      ResolvedRow row;
      row.index = static_cast<int>(m);
      row.distance_or_frequency = mode.freq_thz;

      // localization: inverse participation ratio restricted to the shell
      double norm = 0.0, quad = 0.0;
      for (std::size_t a = 0; a < bundle.n_atoms(); ++a) {
        if ((bundle.atoms[a].pos_ang - defect).norm() > shell) continue;
        const double w = mode.evec[a].squaredNorm();
        norm += w;
        quad += w * w;
      }
      row.localization = norm > 0.0 ? quad / (norm * norm) : 0.0;

      CorrelationData cm = analytic_autocorrelation(
          std::vector<ModeCoupling>{couplings[m]}, bundle.modes, thermal, grid);
      const RateSummary rs = rates_from_correlation(cm, options.fit_max_samples);
      row.delta_sq_rad2_s2 = rs.delta_sq;
      row.gamma_inverse_s = rs.gamma_inverse_s;
      row.status = rs.status;
      rows.push_back(std::move(row));
    }
    return rows;
  }

  // per-atom: retain only that atom's gradient terms in every coupling
  const std::vector<std::array<double, 3>> factors =
      sp_ph_gap_factors(bundle, spin, pair);
  for (std::size_t a = 0; a < bundle.n_atoms(); ++a) {
    ResolvedRow row;
    row.index = static_cast<int>(a);
    row.distance_or_frequency = (bundle.atoms[a].pos_ang - defect).norm();

    const double inv_sqrt_mass = 1.0 / std::sqrt(bundle.atoms[a].mass_amu);
    std::vector<ModeCoupling> atom_couplings;
    atom_couplings.reserve(bundle.modes.size());
    for (std::size_t m = 0; m < bundle.modes.size(); ++m) {
      ModeCoupling mc;
      mc.mode_index = static_cast<int>(m);
      mc.channel = Channel::SpPh;
      if (bundle.modes[m].freq_thz > floor) {
        double k = 0.0;
        for (int d = 0; d < 3; ++d) {
          k += bundle.modes[m].evec[a][d] * inv_sqrt_mass *
               factors[a][static_cast<std::size_t>(d)];
        }
        mc.k_rad_s_per_sqrtamu_A = constants::two_pi * 1e9 * k;
      }
      atom_couplings.push_back(mc);
    }

    CorrelationData ca =
        analytic_autocorrelation(atom_couplings, bundle.modes, thermal, grid);
    const RateSummary rs = rates_from_correlation(ca, options.fit_max_samples);
    row.delta_sq_rad2_s2 = rs.delta_sq;
    row.gamma_inverse_s = rs.gamma_inverse_s;
    row.status = rs.status;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sequence_name(Sequence s) {
  return s == Sequence::Ramsey ? "ramsey" : "hahn";
}

Sequence parse_sequence(const std::string& name) {
  if (name == "ramsey") return Sequence::Ramsey;
  if (name == "hahn") return Sequence::Hahn;
  throw Error("sequence: unknown name '" + name + "' (expected ramsey|hahn)");
}

ChannelClassification classify_channel(Channel c) {
  switch (c) {
    case Channel::SpPh: return {true, false};    // homogeneous, irreversible
    case Channel::SpNuPh: return {false, false}; // inhomogeneous, irreversible
    case Channel::SpNu: return {false, true};    // inhomogeneous, reversible
  }
  throw Error("channel: unknown value");
}

DecoherenceReport aggregate_report(const std::vector<ChannelSummary>& channels,
                                   std::optional<double> t1_s, Sequence sequence) {
  if (channels.empty()) throw Error("report: need at least one channel result");

  DecoherenceReport report;
  report.sequence = sequence;
  report.t1_s = t1_s;

  double total = 0.0;
  for (const ChannelSummary& ch : channels) {
    ReportEntry entry;
    entry.summary = ch;
    entry.classification = classify_channel(ch.channel);
    entry.included = !(sequence == Sequence::Hahn && entry.classification.reversible);
    if (entry.included && std::isfinite(ch.gamma_inverse_s) &&
        ch.gamma_inverse_s > 0.0) {
      total += 1.0 / ch.gamma_inverse_s;
    }
    report.entries.push_back(entry);
  }
  if (t1_s) {
    if (!(*t1_s > 0.0)) throw Error("report: t1 must be > 0");
    total += 1.0 / (2.0 * *t1_s);
  }
  report.total_gamma_per_s = total;
  report.total_gamma_inverse_s = total > 0.0 ? 1.0 / total : kInf;
  return report;
}

}  // namespace spindec
