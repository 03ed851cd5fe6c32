#include "spindec/oracle.hpp"

#include <cmath>

#include "spindec/constants.hpp"
#include "spindec/error.hpp"

namespace spindec {

Mat3 dipole_geometry_tensor(const Vec3& r) {
  const double r2 = r.squaredNorm();
  if (r2 == 0.0) throw Error("dipole tensor: coincident positions (r = 0 singularity)");
  const double r5 = r2 * r2 * std::sqrt(r2);
  return (r2 * Mat3::Identity() - 3.0 * r * r.transpose()) / r5;
}

// dT_ij/dr_k = -3 (delta_ij r_k + delta_ik r_j + delta_jk r_i)/r^5
//             + 15 r_i r_j r_k / r^7
TensorGradient dipole_geometry_gradient(const Vec3& r) {
  const double r2 = r.squaredNorm();
  if (r2 == 0.0) throw Error("dipole tensor: coincident positions (r = 0 singularity)");
  const double rn = std::sqrt(r2);
  const double inv_r5 = 1.0 / (r2 * r2 * rn);
  const double inv_r7 = inv_r5 / r2;
  TensorGradient g;
  for (int k = 0; k < 3; ++k) {
    Mat3 slice;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double v = 15.0 * r[i] * r[j] * r[k] * inv_r7;
        if (i == j) v -= 3.0 * r[k] * inv_r5;
        if (i == k) v -= 3.0 * r[j] * inv_r5;
        if (j == k) v -= 3.0 * r[i] * inv_r5;
        slice(i, j) = v;
      }
    }
    g[static_cast<std::size_t>(k)] = slice;
  }
  return g;
}

PointDipoleOracle::PointDipoleOracle(int carrier_a, int carrier_b, double chi)
    : a_(carrier_a), b_(carrier_b), chi_(chi) {
  if (a_ == b_) throw Error("point-dipole oracle: carrier sites must be distinct");
  if (a_ < 0 || b_ < 0) throw Error("point-dipole oracle: carrier indices must be >= 0");
}

TensorSet PointDipoleOracle::evaluate(const std::vector<Vec3>& pos) const {
  const auto n = static_cast<int>(pos.size());
  if (a_ >= n || b_ >= n) throw Error("point-dipole oracle: carrier index out of range");

  TensorSet out;
  out.zfs.d_GHz = chi_ * constants::zfs_dipole_GHz_A3 *
                  dipole_geometry_tensor(pos[static_cast<std::size_t>(a_)] -
                                         pos[static_cast<std::size_t>(b_)]);

  out.hfi_MHz.assign(pos.size(), Mat3::Zero());
  for (int c = 0; c < n; ++c) {
    if (c == a_ || c == b_) continue;  // carriers host the electron, not a nucleus
    Mat3 acc = Mat3::Zero();
    for (int k : {a_, b_}) {
      acc += 0.5 * dipole_geometry_tensor(pos[static_cast<std::size_t>(k)] -
                                          pos[static_cast<std::size_t>(c)]);
    }
    out.hfi_MHz[static_cast<std::size_t>(c)] = constants::hfi_dipole_MHz_A3 * acc;
  }
  return out;
}

TensorGradient PointDipoleOracle::zfs_gradient(const std::vector<Vec3>& pos,
                                               int atom) const {
  TensorGradient g{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  if (atom != a_ && atom != b_) return g;
  const Vec3 r =
      pos[static_cast<std::size_t>(a_)] - pos[static_cast<std::size_t>(b_)];
  TensorGradient dT = dipole_geometry_gradient(r);
  const double sign = (atom == a_) ? 1.0 : -1.0;  // dr/d(atom) component
  for (int k = 0; k < 3; ++k) {
    g[static_cast<std::size_t>(k)] =
        sign * chi_ * constants::zfs_dipole_GHz_A3 * dT[static_cast<std::size_t>(k)];
  }
  return g;
}

TensorGradient PointDipoleOracle::hfi_self_gradient(const std::vector<Vec3>& pos,
                                                    int atom) const {
  TensorGradient g{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  if (atom == a_ || atom == b_) return g;  // carriers carry no hyperfine site
  for (int k : {a_, b_}) {
    const Vec3 r =
        pos[static_cast<std::size_t>(k)] - pos[static_cast<std::size_t>(atom)];
    TensorGradient dT = dipole_geometry_gradient(r);
    for (int d = 0; d < 3; ++d) {
      // moving the nucleus by +u changes r by -u
      g[static_cast<std::size_t>(d)] -=
          0.5 * constants::hfi_dipole_MHz_A3 * dT[static_cast<std::size_t>(d)];
    }
  }
  return g;
}

TabulatedOracle::TabulatedOracle(const SystemBundle& reference) : ref_(reference) {
  if (ref_.zfs_grad.empty()) {
    throw Error("tabulated oracle: reference bundle lacks zfs gradients");
  }
}

TensorSet TabulatedOracle::evaluate(const std::vector<Vec3>& pos) const {
  if (pos.size() != ref_.n_atoms()) {
    throw Error("tabulated oracle: geometry size mismatch");
  }
  TensorSet out;
  out.zfs = ref_.zfs;
  out.hfi_MHz = ref_.hfi_MHz;
  if (out.hfi_MHz.empty()) out.hfi_MHz.assign(ref_.n_atoms(), Mat3::Zero());

  for (std::size_t a = 0; a < ref_.n_atoms(); ++a) {
    const Vec3 du = pos[a] - ref_.atoms[a].pos_ang;
    if (du.isZero(0.0)) continue;
    for (int d = 0; d < 3; ++d) {
      out.zfs.d_GHz += du[d] * ref_.zfs_grad[a][static_cast<std::size_t>(d)];
      if (!ref_.hfi_grad.empty()) {
        out.hfi_MHz[a] += du[d] * ref_.hfi_grad[a][static_cast<std::size_t>(d)];
      }
    }
  }
  return out;
}

}  // namespace spindec
