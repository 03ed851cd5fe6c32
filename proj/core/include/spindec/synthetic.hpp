#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "spindec/bundle.hpp"

namespace spindec {

struct ModeRecipe {
  int count = -1;  // -1 means the full 3 * n_atoms set
  double freq_min_thz = 1.0;
  double freq_max_thz = 40.0;
};

// Recipe for a cubic-lattice point-dipole test system.
struct SyntheticSpec {
  int n_atoms = 64;
  double lattice_const_ang = 1.78;
  std::string species = "C";
  double mass_amu = 12.011;
  std::string carrier_species = "N";  // second carrier site gets this species
  double carrier_mass_amu = 14.007;
  std::optional<Vec3> defect_pos_ang;            // default: lattice centroid
  std::optional<std::array<int, 2>> carrier_sites;  // default: two nearest the defect
  double chi = 1.0;
  double min_spin_distance_ang = 0.0;  // freeze spin_active inside this radius
  ModeRecipe modes;
  std::uint64_t seed = 0;
  Vec3 axis = Vec3(0, 0, 1);
};

SyntheticSpec parse_synthetic_spec(const std::string& text);
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

// Deterministic bundle with closed-form tensors, analytic gradients and an
// orthonormal random mode set.
SystemBundle generate_synthetic(const SyntheticSpec& spec);

}  // namespace spindec
