#include "spindec/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

#include "spindec/constants.hpp"
#include "spindec/error.hpp"
#include "spindec/numeric.hpp"
#include "spindec/rng.hpp"

namespace spindec {

namespace {

// fftw plan creation/destruction is not thread-safe; executions on distinct
// plans are.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  std::size_t n_real = 0;

  explicit FftwBuffer(std::size_t n) : n_real(n) {
    real = fftw_alloc_real(n);
    cplx = fftw_alloc_complex(n / 2 + 1);
    if (!real || !cplx) throw Error("correlation: fftw allocation failure");
  }
  ~FftwBuffer() {
    fftw_free(real);
    fftw_free(cplx);
  }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// power spectrum of a zero-padded real series; returns the padded length
std::size_t padded_power_spectrum(const std::vector<double>& x, std::size_t pad_factor,
                                  std::vector<double>& out_power) {
  const std::size_t m = next_pow2(x.size() * pad_factor);
  FftwBuffer buf(m);
  std::fill(buf.real, buf.real + m, 0.0);
  std::copy(x.begin(), x.end(), buf.real);

  fftw_plan fwd;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), buf.real, buf.cplx, FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd);
  }

  out_power.resize(m / 2 + 1);
  for (std::size_t k = 0; k < out_power.size(); ++k) {
    out_power[k] = buf.cplx[k][0] * buf.cplx[k][0] + buf.cplx[k][1] * buf.cplx[k][1];
  }
  return m;
}

void check_mode_consistency(const std::vector<ModeCoupling>& couplings,
                            const std::vector<PhononMode>& modes,
                            const ThermalState& thermal) {
  if (couplings.empty()) {
    throw Error("correlation: empty coupling list (no channel content)");
  }
  if (thermal.sigma_sq_amu_A2.size() != modes.size()) {
    throw Error("correlation: thermal state does not match the mode set");
  }
  for (const ModeCoupling& c : couplings) {
    if (c.mode_index < 0 || static_cast<std::size_t>(c.mode_index) >= modes.size()) {
      throw Error("correlation: coupling refers to mode " +
                  std::to_string(c.mode_index) + " outside the mode set");
    }
  }
}

double retained_f_max(const std::vector<ModeCoupling>& couplings,
                      const std::vector<PhononMode>& modes) {
  double f_max = 0.0;
  for (const ModeCoupling& c : couplings) {
    if (c.k_rad_s_per_sqrtamu_A == 0.0) continue;
    f_max = std::max(f_max, modes[static_cast<std::size_t>(c.mode_index)].freq_thz);
  }
  return f_max;
}

}  // namespace

TimeGrid default_phonon_grid(const std::vector<PhononMode>& modes,
                             double frequency_floor_thz) {
  double f_min = 0.0, f_max = 0.0;
  for (const PhononMode& m : modes) {
    if (m.freq_thz <= frequency_floor_thz) continue;
    if (f_min == 0.0 || m.freq_thz < f_min) f_min = m.freq_thz;
    f_max = std::max(f_max, m.freq_thz);
  }
  if (f_max == 0.0) {
    throw Error("grid: no modes above the frequency floor");
  }
  TimeGrid g;
  g.dt_s = 1.0 / (20.0 * f_max * 1e12);
  const double t_max = 20.0 / (f_min * 1e12);
  g.n = static_cast<int>(std::ceil(t_max / g.dt_s)) + 1;
  return g;
}

CorrelationData analytic_autocorrelation(const std::vector<ModeCoupling>& couplings,
                                         const std::vector<PhononMode>& modes,
                                         const ThermalState& thermal,
                                         const TimeGrid& grid) {
  grid.validate();
  check_mode_consistency(couplings, modes, thermal);

  CorrelationData out;
  out.grid = grid;
  out.analytic = true;
  out.c_rad2_s2.resize(static_cast<std::size_t>(grid.n));

  std::vector<double> amp(couplings.size());
  std::vector<double> omega(couplings.size());
  for (std::size_t i = 0; i < couplings.size(); ++i) {
    const auto m = static_cast<std::size_t>(couplings[i].mode_index);
    const double k = couplings[i].k_rad_s_per_sqrtamu_A;
    amp[i] = 0.5 * modes[m].q_weight * k * k * thermal.sigma_sq_amu_A2[m];
    omega[i] = constants::two_pi * modes[m].freq_thz * 1e12;
  }

  std::vector<double> terms(couplings.size());
  for (int k = 0; k < grid.n; ++k) {
    const double t = grid.t(k);
    for (std::size_t i = 0; i < couplings.size(); ++i) {
      terms[i] = amp[i] * std::cos(omega[i] * t);
    }
    out.c_rad2_s2[static_cast<std::size_t>(k)] = pairwise_sum(terms);
  }
  return out;
}

FluctuationTrace stochastic_trace(const std::vector<ModeCoupling>& couplings,
                                  const std::vector<PhononMode>& modes,
                                  const ThermalState& thermal, const TimeGrid& grid,
                                  std::uint64_t seed) {
  grid.validate();
  check_mode_consistency(couplings, modes, thermal);

  const double f_max = retained_f_max(couplings, modes);
  if (f_max > 0.0) {
    const double dt_required = 1.0 / (10.0 * f_max * 1e12);
    if (grid.dt_s >= dt_required) {
      throw Error("trace: grid under-resolves the fastest mode: need dt < " +
                  format_double(dt_required) + " s");
    }
  }

  FluctuationTrace trace;
  trace.grid = grid;
  trace.channel = couplings.front().channel;
  trace.seed = seed;
  trace.temperature_K = thermal.temperature_K;
  trace.values_rad_s.assign(static_cast<std::size_t>(grid.n), 0.0);

  Rng rng(seed);
  std::vector<double> amp(couplings.size());
  std::vector<double> omega(couplings.size());
  std::vector<double> phase(couplings.size());
  for (std::size_t i = 0; i < couplings.size(); ++i) {
    const auto m = static_cast<std::size_t>(couplings[i].mode_index);
    // one phase per coupling entry, drawn unconditionally to keep streams
    // aligned across floor choices
    phase[i] = rng.uniform_angle();
    amp[i] = couplings[i].k_rad_s_per_sqrtamu_A *
             std::sqrt(thermal.sigma_sq_amu_A2[m] * modes[m].q_weight);
    omega[i] = constants::two_pi * modes[m].freq_thz * 1e12;
  }

  std::vector<double> terms(couplings.size());
  for (int k = 0; k < grid.n; ++k) {
    const double t = grid.t(k);
    for (std::size_t i = 0; i < couplings.size(); ++i) {
      terms[i] = amp[i] * std::cos(omega[i] * t + phase[i]);
    }
    trace.values_rad_s[static_cast<std::size_t>(k)] = pairwise_sum(terms);
  }
  return trace;
}

CorrelationData autocorrelation(const std::vector<FluctuationTrace>& traces) {
  if (traces.empty()) throw Error("autocorrelation: need at least one trace");
  const TimeGrid grid = traces.front().grid;
  grid.validate();
  for (const auto& tr : traces) {
    if (!tr.grid.same_as(grid)) {
      throw Error("autocorrelation: traces carry mismatched grids");
    }
    if (tr.values_rad_s.size() != static_cast<std::size_t>(grid.n)) {
      throw Error("autocorrelation: trace length does not match its grid");
    }
  }

  const auto n = static_cast<std::size_t>(grid.n);
  const std::size_t m = next_pow2(2 * n);

  FftwBuffer buf(m);
  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), buf.real, buf.cplx, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(static_cast<int>(m), buf.cplx, buf.real, FFTW_ESTIMATE);
  }

  std::vector<double> acc(n, 0.0);
  for (const auto& tr : traces) {
    std::fill(buf.real, buf.real + m, 0.0);
    std::copy(tr.values_rad_s.begin(), tr.values_rad_s.end(), buf.real);
    fftw_execute(fwd);
    for (std::size_t k = 0; k < m / 2 + 1; ++k) {
      const double re = buf.cplx[k][0], im = buf.cplx[k][1];
      buf.cplx[k][0] = re * re + im * im;
      buf.cplx[k][1] = 0.0;
    }
    fftw_execute(bwd);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) acc[k] += buf.real[k] * inv_m;
  }
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }

  CorrelationData out;
  out.grid = grid;
  out.analytic = false;
  out.c_rad2_s2.resize(n);
  const double inv_traces = 1.0 / static_cast<double>(traces.size());
  for (std::size_t k = 0; k < n; ++k) {
    out.c_rad2_s2[k] = acc[k] * inv_traces / static_cast<double>(n - k);
  }
  return out;
}

CorrelationData autocorrelation(const CorrelationData& analytic) { return analytic; }

double dominant_angular_frequency(const CorrelationData& data) {
  data.grid.validate();
  const std::size_t n = data.c_rad2_s2.size();
  if (n < 4) return 0.0;

  // remove the tail baseline, then find the strongest non-DC spectral line
  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  double baseline = 0.0;
  for (std::size_t k = n - tail; k < n; ++k) baseline += data.c_rad2_s2[k];
  baseline /= static_cast<double>(tail);

  std::vector<double> centered(n);
  for (std::size_t k = 0; k < n; ++k) centered[k] = data.c_rad2_s2[k] - baseline;

  std::vector<double> power;
  const std::size_t m = padded_power_spectrum(centered, 4, power);

  std::size_t best = 0;
  double best_power = 0.0;
  for (std::size_t k = 1; k < power.size(); ++k) {
    if (power[k] > best_power) {
      best_power = power[k];
      best = k;
    }
  }
  if (best == 0) return 0.0;
  return constants::two_pi * static_cast<double>(best) /
         (static_cast<double>(m) * data.grid.dt_s);
}

}  // namespace spindec
