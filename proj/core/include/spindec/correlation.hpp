#pragma once

#include <cstdint>
#include <vector>

#include "spindec/coupling.hpp"
#include "spindec/thermal.hpp"
#include "spindec/trace.hpp"

namespace spindec {

// dt = 1/(20 f_max), t_max = 20/f_min over modes above the floor.
TimeGrid default_phonon_grid(const std::vector<PhononMode>& modes,
                             double frequency_floor_thz = 0.1);

// C(t) = sum_modes q_weight * K^2 * sigma^2 * cos(omega t) / 2  (rad^2/s^2).
// Throws on an empty coupling list (no channel content) or inconsistent
// mode/thermal sets.
CorrelationData analytic_autocorrelation(const std::vector<ModeCoupling>& couplings,
                                         const std::vector<PhononMode>& modes,
                                         const ThermalState& thermal,
                                         const TimeGrid& grid);

// One random-phase realization:
// dE(t) = sum_modes K sigma sqrt(q_weight) cos(omega t + phi), phi ~ U[0,2pi).
// Rejects grids with dt >= 1/(10 f_max).
FluctuationTrace stochastic_trace(const std::vector<ModeCoupling>& couplings,
                                  const std::vector<PhononMode>& modes,
                                  const ThermalState& thermal, const TimeGrid& grid,
                                  std::uint64_t seed);

// Unbiased lag-product estimator, FFT-accelerated, averaged over the
// ensemble: C(k dt) = mean_traces (1/(N-k)) sum_i x_i x_{i+k}.
CorrelationData autocorrelation(const std::vector<FluctuationTrace>& traces);

// Analytic kernels pass through unchanged.
CorrelationData autocorrelation(const CorrelationData& analytic);

// Dominant oscillation frequency of C(t) after baseline removal (rad/s);
// used to seed the sinusoidal fit.  Returns 0 when no interior peak exists.
double dominant_angular_frequency(const CorrelationData& data);

}  // namespace spindec
