#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

namespace spindec {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;

// A qubit encoded in two magnetic sublevels of the triplet.
struct QubitPair {
  int upper_ms = -1;
  int lower_ms = 0;
};

// Zero-field-splitting tensor, ordinary-frequency GHz.  Symmetric and
// traceless within validation tolerances.
struct ZfsTensor {
  Mat3 d_GHz = Mat3::Zero();
};

// Hyperfine tensor for one nuclear site, ordinary-frequency MHz.
struct HfiTensor {
  Mat3 a_MHz = Mat3::Zero();
  int site_index = -1;
};

// Spin-1 operator algebra on an explicit m_s basis ordering.  Operators are
// built from the ladder-operator matrix elements, so any permutation of the
// basis labels yields the consistently permuted matrices.
class SpinTriplet {
 public:
  // Only spin quantum number s = 1 is representable; anything else throws.
  static SpinTriplet make(double s = 1.0,
                          const std::array<int, 3>& basis_ms = {+1, 0, -1});

  const Mat3c& sx() const { return sx_; }
  const Mat3c& sy() const { return sy_; }
  const Mat3c& sz() const { return sz_; }
  const std::array<int, 3>& basis_ms() const { return basis_ms_; }

  // S_x^2 + S_y^2 + S_z^2 (equals s(s+1) * identity)
  Mat3c casimir() const;

  int index_of_ms(int ms) const;  // throws for ms outside {-1,0,+1}

  // <m| S |m>; equals (0, 0, m) in any basis ordering
  Vec3 spin_expectation(int ms) const;

  // <m| sum_ij T_ij (S_i S_j + S_j S_i)/2 |m> for a real symmetric T
  double quadratic_expectation(int ms, const Mat3& tensor_sym) const;

 private:
  SpinTriplet() = default;
  std::array<int, 3> basis_ms_{};
  Mat3c sx_, sy_, sz_;
};

// First-order shift of the |upper> - |lower> transition produced by a
// symmetric tensor perturbation coupling quadratically to the spin.  The
// result carries the units of `delta_sym` (e.g. GHz in, GHz out; GHz/A in,
// GHz/A out).  Throws if `delta_sym` is asymmetric beyond `sym_tol`.
double gap_expectation(const SpinTriplet& spin, const Mat3& delta_sym,
                       const QubitPair& pair, double sym_tol = 1e-9);

// Zeeman contribution to the same transition, in MHz, for a static field
// given in gauss.
double zeeman_gap_MHz(const SpinTriplet& spin, const Vec3& b_field_gauss,
                      const QubitPair& pair);

void validate_pair(const QubitPair& pair);

}  // namespace spindec
