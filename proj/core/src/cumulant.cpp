#include "spindec/cumulant.hpp"

#include <cmath>
#include <limits>

#include "spindec/error.hpp"

namespace spindec {

namespace {

// expm1 keeps g accurate in the deep slow regime where x = t/tau_c is tiny
// and exp(-x) + x - 1 ~ x^2/2 would cancel catastrophically.
double g_shape(double x) { return std::expm1(-x) + x; }

}  // namespace

double cumulant_g_at(double delta_sq, double tau_c, double t) {
  if (delta_sq < 0.0) throw Error("cumulant: delta_sq must be >= 0");
  if (!(tau_c > 0.0)) throw Error("cumulant: tau_c must be > 0");
  if (t < 0.0) throw Error("cumulant: t must be >= 0");
  return delta_sq * tau_c * tau_c * g_shape(t / tau_c);
}

std::vector<double> cumulant_g(double delta_sq, double tau_c, const TimeGrid& grid) {
  grid.validate();
  std::vector<double> g(static_cast<std::size_t>(grid.n));
  for (int i = 0; i < grid.n; ++i) {
    g[static_cast<std::size_t>(i)] = cumulant_g_at(delta_sq, tau_c, grid.t(i));
  }
  return g;
}

std::vector<double> dephasing_function(const std::vector<double>& g_samples) {
  if (g_samples.empty()) throw Error("dephasing function: empty g");
  if (g_samples.front() != 0.0) throw Error("dephasing function: g(0) must be 0");
  std::vector<double> d(g_samples.size());
  for (std::size_t i = 0; i < g_samples.size(); ++i) {
    const double g = g_samples[i];
    if (!std::isfinite(g)) throw Error("dephasing function: non-finite g sample");
    d[i] = std::exp(-g);
  }
  return d;
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::Fast: return "fast";
    case Regime::Slow: return "slow";
    case Regime::Intermediate: return "intermediate";
    case Regime::Undefined: return "undefined";
  }
  throw Error("regime: unknown value");
}

RateResult extract_rate(double delta_sq, double tau_c) {
  if (delta_sq < 0.0) throw Error("rate: delta_sq must be >= 0");
  if (!(tau_c > 0.0)) throw Error("rate: tau_c must be > 0");

  RateResult out;
  if (delta_sq == 0.0) {
    out.gamma_inverse_s = std::numeric_limits<double>::infinity();
    out.regime = Regime::Undefined;
    out.finite = false;
    return out;
  }

  const double delta = std::sqrt(delta_sq);
  const double dtau = delta * tau_c;
  out.regime = dtau < 0.1 ? Regime::Fast : (dtau > 10.0 ? Regime::Slow
                                                        : Regime::Intermediate);

  // solve g_shape(x) = c with x = t/tau_c; g_shape is strictly increasing
  const double c = 1.0 / (delta_sq * tau_c * tau_c);
  double lo = 0.0;
  double hi = c + 2.0;  // g_shape(x) >= x - 1, so g_shape(c + 2) > c
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (g_shape(mid) < c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.gamma_inverse_s = 0.5 * (lo + hi) * tau_c;
  out.finite = true;
  return out;
}

CurveRate extract_rate_from_curve(const TimeGrid& grid,
                                  const std::vector<double>& d_samples,
                                  double delta_sq, double tau_c) {
  grid.validate();
  if (d_samples.size() != static_cast<std::size_t>(grid.n)) {
    throw Error("rate: D samples do not match the grid");
  }

  CurveRate out;
  const double target = std::exp(-1.0);
  for (int i = 1; i < grid.n; ++i) {
    if (d_samples[static_cast<std::size_t>(i)] <= target) {
      // interpolate linearly in g = -ln D between the bracketing samples
      const double g_prev = -std::log(d_samples[static_cast<std::size_t>(i - 1)]);
      const double g_here = -std::log(d_samples[static_cast<std::size_t>(i)]);
      const double frac = (1.0 - g_prev) / (g_here - g_prev);
      out.rate = extract_rate(delta_sq, tau_c);
      out.rate.gamma_inverse_s = grid.t(i - 1) + frac * grid.dt_s;
      out.extrapolated = false;
      return out;
    }
  }
  out.rate = extract_rate(delta_sq, tau_c);
  out.extrapolated = true;
  return out;
}

}  // namespace spindec
