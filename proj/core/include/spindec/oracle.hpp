#pragma once

#include <vector>

#include "spindec/bundle.hpp"
#include "spindec/spin_triplet.hpp"

namespace spindec {

struct TensorSet {
  ZfsTensor zfs;               // GHz
  std::vector<Mat3> hfi_MHz;   // one per atom site
};

// Geometry -> tensors contract.  Implementations must be deterministic and
// return symmetric tensors.
class TensorOracle {
 public:
  virtual ~TensorOracle() = default;
  virtual TensorSet evaluate(const std::vector<Vec3>& positions_ang) const = 0;
};

// Two point spin carriers interacting by the magnetic dipole-dipole law.
//
//   D  = chi * C_zfs * T(r_a - r_b)
//   A_c = P_hfi * sum_k w_k T(r_k - r_c),  w_k = 1/2 per carrier
//   T_ij(r) = (r^2 delta_ij - 3 r_i r_j) / r^5
//
// Exact closed-form gradients make this the oracle for every
// finite-difference and coupling test.
class PointDipoleOracle : public TensorOracle {
 public:
  PointDipoleOracle(int carrier_a, int carrier_b, double chi = 1.0);

  TensorSet evaluate(const std::vector<Vec3>& positions_ang) const override;

  // d(D)/d(displacement of `atom`), GHz/A; zero unless `atom` is a carrier
  TensorGradient zfs_gradient(const std::vector<Vec3>& positions_ang, int atom) const;
  // d(A at atom's own site)/d(own displacement), MHz/A
  TensorGradient hfi_self_gradient(const std::vector<Vec3>& positions_ang,
                                   int atom) const;

  int carrier_a() const { return a_; }
  int carrier_b() const { return b_; }

 private:
  int a_, b_;
  double chi_;
};

// First-order (linear) model built from a bundle's stored tensors and
// gradients.  Finite differences of this model reproduce the stored
// gradients exactly, which makes it the consistency oracle for ingested
// (non-synthetic) data.
class TabulatedOracle : public TensorOracle {
 public:
  explicit TabulatedOracle(const SystemBundle& reference);
  TensorSet evaluate(const std::vector<Vec3>& positions_ang) const override;

 private:
  const SystemBundle& ref_;
};

// dimensionless dipolar geometry tensor and its position derivative
Mat3 dipole_geometry_tensor(const Vec3& r);
TensorGradient dipole_geometry_gradient(const Vec3& r);

}  // namespace spindec
