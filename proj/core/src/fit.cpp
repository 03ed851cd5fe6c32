#include "spindec/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "spindec/constants.hpp"
#include "spindec/correlation.hpp"
#include "spindec/error.hpp"

namespace spindec {

namespace {

struct LmOutcome {
  Eigen::VectorXd p;
  double cost = 0.0;
  bool converged = false;
};

// Box bounds for the log-tau parameter (index 1 in both models), in
// normalized time where the data window is [0, 1].  Decays slower than the
// window cannot be resolved from it, so tau is pinned at the cap and the fit
// is reported with decay_resolved = false instead of letting tau run away.
constexpr int kLogTauIndex = 1;
const double kLogTauMin = std::log(1e-6);
const double kLogTauMax = std::log(100.0);

// Levenberg-Marquardt on a model with analytic Jacobian.  Model/Jacobian work
// on normalized time (t' in [0, 1]) and normalized values (y' = y / C(0)).
template <class ModelFn, class JacFn>
LmOutcome lm_fit(const Eigen::VectorXd& t, const Eigen::VectorXd& y, Eigen::VectorXd p,
                 ModelFn model, JacFn jacobian) {
  const auto n = t.size();
  const auto np = p.size();

  auto cost_of = [&](const Eigen::VectorXd& params) {
    double c = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = model(t[i], params) - y[i];
      c += r * r;
    }
    return c;
  };

  double cost = cost_of(p);
  double lambda = 1e-3;
  bool converged = false;

  Eigen::MatrixXd jac(n, np);
  Eigen::VectorXd resid(n);
  Eigen::RowVectorXd row(np);

  for (int iter = 0; iter < 500 && !converged; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      resid[i] = model(t[i], p) - y[i];
      jacobian(t[i], p, row);
      jac.row(i) = row;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * resid;

    bool stepped = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd lhs = jtj;
      for (Eigen::Index k = 0; k < np; ++k) {
        lhs(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      }
      const Eigen::VectorXd step = lhs.ldlt().solve(-jtr);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      Eigen::VectorXd trial = p + step;
      trial[kLogTauIndex] =
          std::clamp(trial[kLogTauIndex], kLogTauMin, kLogTauMax);
      const double trial_cost = cost_of(trial);
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        const double improvement = cost - trial_cost;
        p = trial;
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (improvement <= 1e-12 * (cost + 1e-30) ||
            step.norm() <= 1e-10 * (1.0 + p.norm())) {
          converged = true;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) {
      // no downhill step found at any damping: treat the stall as converged
      // if the gradient is already tiny, otherwise report non-convergence
      converged = jtr.norm() <= 1e-10 * (1.0 + cost);
      break;
    }
  }

  LmOutcome out;
  out.p = p;
  out.cost = cost;
  out.converged = converged;
  return out;
}

}  // namespace

std::string fit_model_name(FitModel m) {
  return m == FitModel::PlainExponential ? "plain_exponential"
                                         : "sinusoidal_exponential";
}

FitPair fit_correlation(const CorrelationData& data) {
  data.grid.validate();
  const auto n = static_cast<Eigen::Index>(data.c_rad2_s2.size());
  if (n < 16) throw Error("fit: need at least 16 correlation samples");
  const double c0 = data.c0();
  if (!(c0 > 0.0)) throw Error("fit: C(0) must be > 0");

  const double t_scale = data.grid.t_max();
  Eigen::VectorXd t(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    t[i] = data.grid.t(static_cast<int>(i)) / t_scale;
    y[i] = data.c_rad2_s2[static_cast<std::size_t>(i)] / c0;
  }

  // ---- initial guesses -------------------------------------------------------
  const Eigen::Index tail = std::max<Eigen::Index>(1, n / 10);
  double b0 = 0.0;
  for (Eigen::Index i = n - tail; i < n; ++i) b0 += y[i];
  b0 /= static_cast<double>(tail);
  const double a0 = y[0] - b0;

  // first 1/e crossing of the normalized, baseline-removed signal
  double tau0 = t[n - 1];
  bool crossed = false;
  if (std::abs(a0) > 0.0) {
    for (Eigen::Index i = 1; i < n; ++i) {
      if ((y[i] - b0) / a0 < std::exp(-1.0)) {
        tau0 = t[i];
        crossed = true;
        break;
      }
    }
  }

  const double omega0_rad_s = dominant_angular_frequency(data);
  const double omega0 = omega0_rad_s > 0.0 ? omega0_rad_s * t_scale
                                           : constants::pi;  // half a cycle per window

  FitPair out;
  out.delta_sq_rad2_s2 = c0;

  // degenerate constant data: nothing to fit
  const double spread = (y.array() - b0).abs().maxCoeff();
  if (spread <= 1e-12) {
    CorrelationFit flat;
    flat.model = FitModel::PlainExponential;
    flat.a_rad2_s2 = 0.0;
    flat.b_rad2_s2 = b0 * c0;
    flat.tau_c_s = 10.0 * t_scale;  // upper bound marker
    flat.converged = true;
    flat.decay_resolved = false;
    out.plain = flat;
    flat.model = FitModel::SinusoidalExponential;
    flat.omega_rad_s = 0.0;
    flat.phi_rad = constants::pi / 2.0;
    out.sinusoidal = flat;
    return out;
  }

  // ---- plain exponential: p = (A, log tau, B) --------------------------------
  {
    auto model = [](double tt, const Eigen::VectorXd& p) {
      return p[0] * std::exp(-tt * std::exp(-p[1])) + p[2];
    };
    auto jac = [](double tt, const Eigen::VectorXd& p, Eigen::RowVectorXd& row) {
      const double tau = std::exp(p[1]);
      const double e = std::exp(-tt / tau);
      row[0] = e;
      row[1] = p[0] * e * tt / tau;  // d/d(log tau)
      row[2] = 1.0;
    };
    Eigen::VectorXd p(3);
    p << a0, std::clamp(std::log(std::max(tau0, 1e-6)), kLogTauMin, kLogTauMax), b0;
    auto r = lm_fit(t, y, p, model, jac);

    out.plain.model = FitModel::PlainExponential;
    out.plain.a_rad2_s2 = r.p[0] * c0;
    out.plain.tau_c_s = std::exp(r.p[1]) * t_scale;
    out.plain.b_rad2_s2 = r.p[2] * c0;
    out.plain.rms_residual = std::sqrt(r.cost / static_cast<double>(n)) * c0;
    out.plain.converged = r.converged;
    out.plain.decay_resolved = crossed && r.p[1] < kLogTauMax - 0.01;
  }

  // ---- sinusoidal exponential: p = (A, log tau, B, omega, phi) ---------------
  {
    auto model = [](double tt, const Eigen::VectorXd& p) {
      return p[0] * std::sin(p[3] * tt + p[4]) * std::exp(-tt * std::exp(-p[1])) + p[2];
    };
    auto jac = [](double tt, const Eigen::VectorXd& p, Eigen::RowVectorXd& row) {
      const double tau = std::exp(p[1]);
      const double e = std::exp(-tt / tau);
      const double s = std::sin(p[3] * tt + p[4]);
      const double c = std::cos(p[3] * tt + p[4]);
      row[0] = s * e;
      row[1] = p[0] * s * e * tt / tau;
      row[2] = 1.0;
      row[3] = p[0] * c * tt * e;
      row[4] = p[0] * c * e;
    };
    Eigen::VectorXd p(5);
    p << a0, std::clamp(std::log(std::max(tau0, 1e-6)), kLogTauMin, kLogTauMax), b0,
        omega0, constants::pi / 2.0;
    auto r = lm_fit(t, y, p, model, jac);

    out.sinusoidal.model = FitModel::SinusoidalExponential;
    out.sinusoidal.a_rad2_s2 = r.p[0] * c0;
    out.sinusoidal.tau_c_s = std::exp(r.p[1]) * t_scale;
    out.sinusoidal.b_rad2_s2 = r.p[2] * c0;
    out.sinusoidal.omega_rad_s = r.p[3] / t_scale;
    out.sinusoidal.phi_rad = r.p[4];
    out.sinusoidal.rms_residual = std::sqrt(r.cost / static_cast<double>(n)) * c0;
    out.sinusoidal.converged = r.converged;
    out.sinusoidal.decay_resolved = crossed && r.p[1] < kLogTauMax - 0.01;
  }

  return out;
}

}  // namespace spindec
