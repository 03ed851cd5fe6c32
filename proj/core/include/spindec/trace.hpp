#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spindec/error.hpp"

namespace spindec {

// Uniform time grid starting at t = 0.
struct TimeGrid {
  double dt_s = 0.0;
  int n = 0;

  double t(int i) const { return dt_s * i; }
  double t_max() const { return n > 0 ? dt_s * (n - 1) : 0.0; }
  bool same_as(const TimeGrid& o) const { return dt_s == o.dt_s && n == o.n; }

  void validate() const {
    if (!(dt_s > 0.0) || n < 2) {
      throw Error("time grid: need dt > 0 and at least 2 samples");
    }
  }
};

// The three fluctuation channels of the gap operator.
enum class Channel { SpPh, SpNuPh, SpNu };

std::string channel_name(Channel c);
Channel parse_channel(const std::string& name);

// One realization of the energy-gap fluctuation, delta E(t), in rad/s.
struct FluctuationTrace {
  TimeGrid grid;
  std::vector<double> values_rad_s;
  Channel channel = Channel::SpPh;
  std::uint64_t seed = 0;
  double temperature_K = 0.0;
};

// Autocorrelation samples C(t) = <dE(t) dE(0)>, rad^2/s^2.
struct CorrelationData {
  TimeGrid grid;
  std::vector<double> c_rad2_s2;
  bool analytic = false;  // closed-form kernel rather than an estimator

  double c0() const {
    if (c_rad2_s2.empty()) throw Error("correlation: empty data");
    return c_rad2_s2.front();
  }
};

inline std::string channel_name(Channel c) {
  switch (c) {
    case Channel::SpPh: return "sp-ph";
    case Channel::SpNuPh: return "sp-nu-ph";
    case Channel::SpNu: return "sp-nu";
  }
  throw Error("channel: unknown value");
}

inline Channel parse_channel(const std::string& name) {
  if (name == "sp-ph") return Channel::SpPh;
  if (name == "sp-nu-ph") return Channel::SpNuPh;
  if (name == "sp-nu") return Channel::SpNu;
  throw Error("channel: unknown name '" + name + "' (expected sp-ph|sp-nu-ph|sp-nu)");
}

}  // namespace spindec
