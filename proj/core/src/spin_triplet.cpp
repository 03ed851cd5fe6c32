#include "spindec/spin_triplet.hpp"

#include <cmath>

#include "spindec/constants.hpp"
#include "spindec/error.hpp"

namespace spindec {

namespace {

bool is_valid_ms(int ms) { return ms == -1 || ms == 0 || ms == 1; }

}  // namespace

void validate_pair(const QubitPair& pair) {
  if (!is_valid_ms(pair.upper_ms) || !is_valid_ms(pair.lower_ms)) {
    throw Error("qubit pair: m_s labels must lie in {-1, 0, +1}");
  }
  if (pair.upper_ms == pair.lower_ms) {
    throw Error("qubit pair: upper and lower levels must differ");
  }
}

SpinTriplet SpinTriplet::make(double s, const std::array<int, 3>& basis_ms) {
  if (s != 1.0) {
    throw Error("spin triplet: only s = 1 is supported");
  }
  bool seen[3] = {false, false, false};
  for (int ms : basis_ms) {
    if (!is_valid_ms(ms)) {
      throw Error("spin triplet: basis labels must be a permutation of {+1, 0, -1}");
    }
    seen[ms + 1] = true;
  }
  if (!(seen[0] && seen[1] && seen[2])) {
    throw Error("spin triplet: basis labels must be a permutation of {+1, 0, -1}");
  }

  SpinTriplet t;
  t.basis_ms_ = basis_ms;

  // ladder operator: <m+1| S+ |m> = sqrt(s(s+1) - m(m+1))
  Mat3c sp = Mat3c::Zero();
  for (int col = 0; col < 3; ++col) {
    const int m = basis_ms[static_cast<std::size_t>(col)];
    if (m == 1) continue;
    for (int row = 0; row < 3; ++row) {
      if (basis_ms[static_cast<std::size_t>(row)] == m + 1) {
        sp(row, col) = std::sqrt(2.0 - static_cast<double>(m) * (m + 1));
      }
    }
  }
  const std::complex<double> i_unit(0.0, 1.0);
  t.sx_ = 0.5 * (sp + sp.adjoint());
  t.sy_ = -0.5 * i_unit * (sp - sp.adjoint());
  t.sz_ = Mat3c::Zero();
  for (int k = 0; k < 3; ++k) {
    t.sz_(k, k) = static_cast<double>(basis_ms[static_cast<std::size_t>(k)]);
  }
  return t;
}

Mat3c SpinTriplet::casimir() const { return sx_ * sx_ + sy_ * sy_ + sz_ * sz_; }

int SpinTriplet::index_of_ms(int ms) const {
  if (!is_valid_ms(ms)) {
    throw Error("spin triplet: m_s label must lie in {-1, 0, +1}");
  }
  for (int k = 0; k < 3; ++k) {
    if (basis_ms_[static_cast<std::size_t>(k)] == ms) return k;
  }
  throw Error("spin triplet: basis does not contain requested m_s");
}

Vec3 SpinTriplet::spin_expectation(int ms) const {
  const int k = index_of_ms(ms);
  return Vec3(sx_(k, k).real(), sy_(k, k).real(), sz_(k, k).real());
}

double SpinTriplet::quadratic_expectation(int ms, const Mat3& tensor_sym) const {
  const int k = index_of_ms(ms);
  const Mat3c* ops[3] = {&sx_, &sy_, &sz_};
  std::complex<double> acc(0.0, 0.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Mat3c prod = 0.5 * ((*ops[i]) * (*ops[j]) + (*ops[j]) * (*ops[i]));
      acc += tensor_sym(i, j) * prod(k, k);
    }
  }
  return acc.real();
}

double gap_expectation(const SpinTriplet& spin, const Mat3& delta_sym,
                       const QubitPair& pair, double sym_tol) {
  validate_pair(pair);
  const double asym = (delta_sym - delta_sym.transpose()).cwiseAbs().maxCoeff();
  if (asym > sym_tol) {
    throw Error("gap expectation: tensor asymmetry " + std::to_string(asym) +
                " exceeds tolerance");
  }
  return spin.quadratic_expectation(pair.upper_ms, delta_sym) -
         spin.quadratic_expectation(pair.lower_ms, delta_sym);
}

double zeeman_gap_MHz(const SpinTriplet& spin, const Vec3& b_field_gauss,
                      const QubitPair& pair) {
  validate_pair(pair);
  const Vec3 diff =
      spin.spin_expectation(pair.upper_ms) - spin.spin_expectation(pair.lower_ms);
  return constants::gamma_e_MHz_per_G * b_field_gauss.dot(diff);
}

}  // namespace spindec
