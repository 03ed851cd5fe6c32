#include "spindec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/QR>
#include "json.hpp"

#include "spindec/error.hpp"
#include "spindec/oracle.hpp"
#include "spindec/rng.hpp"

namespace spindec {

namespace {

using json = nlohmann::ordered_json;

Vec3 json_vec3(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(std::string("synthetic spec.") + key + ": expected a 3-vector");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

SyntheticSpec parse_synthetic_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw Error(std::string("synthetic spec: parse failure: ") + e.what());
  }
  SyntheticSpec s;
  s.n_atoms = doc.value("n_atoms", s.n_atoms);
  s.lattice_const_ang = doc.value("lattice_const_ang", s.lattice_const_ang);
  s.species = doc.value("species", s.species);
  s.mass_amu = doc.value("mass_amu", s.mass_amu);
  s.carrier_species = doc.value("carrier_species", s.carrier_species);
  s.carrier_mass_amu = doc.value("carrier_mass_amu", s.carrier_mass_amu);
  if (doc.contains("defect_pos_ang")) {
    s.defect_pos_ang = json_vec3(doc["defect_pos_ang"], "defect_pos_ang");
  }
  if (doc.contains("carrier_sites")) {
    const auto& jc = doc["carrier_sites"];
    if (!jc.is_array() || jc.size() != 2) {
      throw Error("synthetic spec.carrier_sites: expected two atom indices");
    }
    s.carrier_sites = std::array<int, 2>{jc[0].get<int>(), jc[1].get<int>()};
  }
  s.chi = doc.value("chi", s.chi);
  s.min_spin_distance_ang = doc.value("min_spin_distance_ang", s.min_spin_distance_ang);
  if (doc.contains("modes")) {
    const auto& jm = doc["modes"];
    s.modes.count = jm.value("count", s.modes.count);
    s.modes.freq_min_thz = jm.value("freq_min_thz", s.modes.freq_min_thz);
    s.modes.freq_max_thz = jm.value("freq_max_thz", s.modes.freq_max_thz);
  }
  s.seed = doc.value("seed", s.seed);
  if (doc.contains("axis")) s.axis = json_vec3(doc["axis"], "axis");
  return s;
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("synthetic spec: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_synthetic_spec(ss.str());
}

SystemBundle generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_atoms < 2) throw Error("synthetic spec.n_atoms: need at least 2 atoms");
  if (!(spec.lattice_const_ang > 0.0)) {
    throw Error("synthetic spec.lattice_const_ang: must be > 0");
  }
  if (!(spec.mass_amu > 0.0) || !(spec.carrier_mass_amu > 0.0)) {
    throw Error("synthetic spec: masses must be > 0");
  }
  if (spec.axis.norm() == 0.0) throw Error("synthetic spec.axis: zero vector");

  const int n = spec.n_atoms;
  const double a0 = spec.lattice_const_ang;
  int n_side = 1;
  while (n_side * n_side * n_side < n) ++n_side;

  std::vector<Vec3> positions;
  positions.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n_side && static_cast<int>(positions.size()) < n; ++i) {
    for (int j = 0; j < n_side && static_cast<int>(positions.size()) < n; ++j) {
      for (int k = 0; k < n_side && static_cast<int>(positions.size()) < n; ++k) {
        positions.emplace_back(a0 * i, a0 * j, a0 * k);
      }
    }
  }

  Vec3 defect = Vec3::Zero();
  if (spec.defect_pos_ang) {
    defect = *spec.defect_pos_ang;
  } else {
    for (const Vec3& p : positions) defect += p;
    defect /= static_cast<double>(n);
  }

  std::array<int, 2> carriers{};
  if (spec.carrier_sites) {
    carriers = *spec.carrier_sites;
    for (int c : carriers) {
      if (c < 0 || c >= n) {
        throw Error("synthetic spec.carrier_sites: index " + std::to_string(c) +
                    " out of range");
      }
    }
    if (carriers[0] == carriers[1]) {
      throw Error(
          "synthetic spec.carrier_sites: coincident spin positions (r = 0 singularity)");
    }
  } else {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      const double dx = (positions[static_cast<std::size_t>(x)] - defect).squaredNorm();
      const double dy = (positions[static_cast<std::size_t>(y)] - defect).squaredNorm();
      if (dx != dy) return dx < dy;
      return x < y;
    });
    carriers = {order[0], order[1]};
  }

  SystemBundle b;
  b.atoms.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    AtomRecord atom;
    const bool is_carrier = (i == carriers[0] || i == carriers[1]);
    atom.species = (i == carriers[1]) ? spec.carrier_species : spec.species;
    atom.mass_amu = (i == carriers[1]) ? spec.carrier_mass_amu : spec.mass_amu;
    atom.pos_ang = positions[static_cast<std::size_t>(i)];
    const double dist = (atom.pos_ang - defect).norm();
    atom.spin_active = !is_carrier && dist >= spec.min_spin_distance_ang;
    b.atoms.push_back(std::move(atom));
  }

  PointDipoleOracle oracle(carriers[0], carriers[1], spec.chi);
  TensorSet tensors = oracle.evaluate(positions);
  b.zfs = tensors.zfs;
  b.hfi_MHz = std::move(tensors.hfi_MHz);

  b.zfs_grad.reserve(static_cast<std::size_t>(n));
  b.hfi_grad.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    b.zfs_grad.push_back(oracle.zfs_gradient(positions, i));
    b.hfi_grad.push_back(oracle.hfi_self_gradient(positions, i));
  }

  // ---- orthonormal random mode set -----------------------------------------
  const int dof = 3 * n;
  int count = spec.modes.count < 0 ? dof : spec.modes.count;
  if (count < 1 || count > dof) {
    throw Error("synthetic spec.modes.count: must lie in [1, 3*n_atoms]");
  }
  if (!(spec.modes.freq_min_thz > 0.0) ||
      spec.modes.freq_max_thz < spec.modes.freq_min_thz) {
    throw Error("synthetic spec.modes: need 0 < freq_min_thz <= freq_max_thz");
  }

  Rng rng(split_seed(spec.seed, 0x6d6f646573ull));  // independent mode stream
  Eigen::MatrixXd raw(dof, count);
  for (int c = 0; c < count; ++c) {
    for (int r = 0; r < dof; ++r) raw(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dof, count);

  b.modes.reserve(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) {
    PhononMode mode;
    mode.freq_thz =
        count == 1 ? spec.modes.freq_min_thz
                   : spec.modes.freq_min_thz +
                         (spec.modes.freq_max_thz - spec.modes.freq_min_thz) * m /
                             static_cast<double>(count - 1);
    mode.q_weight = 1.0;
    mode.evec.reserve(static_cast<std::size_t>(n));
    for (int atom = 0; atom < n; ++atom) {
      mode.evec.emplace_back(q(3 * atom + 0, m), q(3 * atom + 1, m), q(3 * atom + 2, m));
    }
    b.modes.push_back(std::move(mode));
  }

  b.meta.axis = spec.axis.normalized();
  b.meta.cell_ang = a0 * n_side * Mat3::Identity();
  {
    std::ostringstream prov;
    prov << "synthetic point-dipole bundle: n_atoms=" << n << " seed=" << spec.seed;
    b.meta.provenance = prov.str();
  }
  b.meta.defect_pos_ang = defect;
  b.meta.carrier_sites = carriers;
  b.meta.chi = spec.chi;
  b.meta.model = "point_dipole";

  validate_bundle(b);
  return b;
}

}  // namespace spindec
