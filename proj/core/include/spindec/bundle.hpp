#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spindec/spin_triplet.hpp"

namespace spindec {

struct AtomRecord {
  std::string species;
  double mass_amu = 0.0;
  Vec3 pos_ang = Vec3::Zero();
  bool spin_active = false;  // eligible nuclear-spin host site
};

struct PhononMode {
  double freq_thz = 0.0;   // ordinary frequency
  double q_weight = 1.0;   // q-point multiplicity weight
  std::vector<Vec3> evec;  // mass-weighted, one 3-vector per atom
};

// per-atom gradient of a 3x3 tensor: one 3x3 slice per Cartesian direction
using TensorGradient = std::array<Mat3, 3>;

struct BundleMeta {
  Vec3 axis = Vec3(0, 0, 1);  // defect quantization axis (unit on load)
  Mat3 cell_ang = Mat3::Identity();
  std::string provenance;
  // optional generator-side extras (round-tripped when present)
  std::optional<Vec3> defect_pos_ang;
  std::optional<std::array<int, 2>> carrier_sites;  // effective spin positions
  std::optional<double> chi;                        // pair weight of the dipolar model
  std::optional<std::string> model;                 // e.g. "point_dipole"
};

struct SystemBundle {
  std::vector<AtomRecord> atoms;
  ZfsTensor zfs;                           // GHz
  std::vector<TensorGradient> zfs_grad;    // GHz/A, [atom][dir]
  std::vector<Mat3> hfi_MHz;               // per site (= per atom)
  std::vector<TensorGradient> hfi_grad;    // MHz/A, [atom][dir]; may be empty
  std::vector<PhononMode> modes;
  BundleMeta meta;

  std::size_t n_atoms() const { return atoms.size(); }
  bool has_hfi_grad() const { return !hfi_grad.empty(); }
  Vec3 defect_position() const;  // meta override or centroid fallback
};

struct ValidationOptions {
  double zfs_symmetry_tol_GHz = 1e-9;
  double zfs_trace_tol_GHz = 1e-6;
  double grad_symmetry_tol = 1e-9;        // per gradient slice, native units/A
  double acoustic_sum_tol_GHz_per_A = 1e-6;
  double evec_orthonorm_tol = 1e-6;
  double frequency_floor_thz = 0.1;       // modes at/below are kept but inert
};

struct ValidationReport {
  std::vector<std::string> notes;  // informational findings (never errors)
};

// Parses + validates.  Every violated invariant throws Error with the
// offending field path in the message.
SystemBundle load_bundle(const std::filesystem::path& path,
                         const ValidationOptions& opts = {});
SystemBundle parse_bundle(const std::string& text,
                          const ValidationOptions& opts = {});

// Validation alone (already-parsed bundle); returns informational notes.
ValidationReport validate_bundle(const SystemBundle& bundle,
                                 const ValidationOptions& opts = {});

// Canonical serialization: fixed key order, shortest round-trip numbers.
// save(load(x)) is byte-identical when x is canonical.
std::string serialize_bundle(const SystemBundle& bundle);
void save_bundle(const SystemBundle& bundle, const std::filesystem::path& path);

}  // namespace spindec
