#pragma once

#include <string>

#include "spindec/trace.hpp"

namespace spindec {

enum class FitModel { PlainExponential, SinusoidalExponential };

std::string fit_model_name(FitModel m);

// One damped-least-squares fit of C(t).  Parameters are reported in the
// original units (rad^2/s^2, s, rad/s).
struct CorrelationFit {
  FitModel model = FitModel::PlainExponential;
  double a_rad2_s2 = 0.0;
  double tau_c_s = 0.0;
  double b_rad2_s2 = 0.0;
  double omega_rad_s = 0.0;  // sinusoidal model only
  double phi_rad = 0.0;      // sinusoidal model only
  double rms_residual = 0.0; // original units
  bool converged = false;
  bool decay_resolved = true;  // false when the data never leaves its baseline
};

// Both models are always fitted; delta_sq is the *data* value C(0), never the
// fitted A + B.
struct FitPair {
  CorrelationFit plain;
  CorrelationFit sinusoidal;
  double delta_sq_rad2_s2 = 0.0;
};

// Levenberg-Marquardt on normalized data.  Preconditions: >= 16 samples and
// C(0) > 0.  Non-convergence is reported through the `converged` flags with
// best-so-far parameters, never by throwing.
FitPair fit_correlation(const CorrelationData& data);

}  // namespace spindec
