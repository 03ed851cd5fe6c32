#pragma once

#include <string>
#include <vector>

#include "spindec/trace.hpp"

namespace spindec {

// Second-order cumulant for an exponentially decaying autocorrelation:
//   g(t) = delta_sq * tau_c^2 * (exp(-t/tau_c) + t/tau_c - 1)
double cumulant_g_at(double delta_sq_rad2_s2, double tau_c_s, double t_s);
std::vector<double> cumulant_g(double delta_sq_rad2_s2, double tau_c_s,
                               const TimeGrid& grid);

// D(t) = exp(-g(t))
std::vector<double> dephasing_function(const std::vector<double>& g_samples);

enum class Regime { Fast, Slow, Intermediate, Undefined };
std::string regime_name(Regime r);

struct RateResult {
  double gamma_inverse_s = 0.0;  // +inf sentinel when no dephasing occurs
  Regime regime = Regime::Undefined;
  bool finite = true;
};

// 1/Gamma = the time where g reaches 1 (D = 1/e), from a bracketed root solve
// on the closed form.  Reduces to 1/(delta_sq * tau_c) deep in the fast
// regime and sqrt(2)/delta deep in the slow regime.  delta_sq = 0 yields the
// infinite sentinel.  Regime: fast if delta*tau_c < 0.1, slow if > 10.
RateResult extract_rate(double delta_sq_rad2_s2, double tau_c_s);

struct CurveRate {
  RateResult rate;
  bool extrapolated = false;  // 1/e point lay beyond the sampled grid
};

// Data-first extraction: find the 1/e crossing of sampled D(t); when the grid
// never reaches it, fall back to the closed form (flagged).
CurveRate extract_rate_from_curve(const TimeGrid& grid,
                                  const std::vector<double>& d_samples,
                                  double delta_sq_rad2_s2, double tau_c_s);

}  // namespace spindec
