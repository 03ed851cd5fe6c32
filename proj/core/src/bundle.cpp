#include "spindec/bundle.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "spindec/error.hpp"
#include "spindec/numeric.hpp"

namespace spindec {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw Error("bundle." + path + ": " + why);
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "non-finite value");
  return v;
}

Vec3 get_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected a 3-vector");
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    v[k] = get_number(j[static_cast<std::size_t>(k)],
                      path + "[" + std::to_string(k) + "]");
  }
  return v;
}

Mat3 get_mat3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected a 3x3 matrix");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    m.row(r) = get_vec3(j[static_cast<std::size_t>(r)],
                        path + "[" + std::to_string(r) + "]")
                   .transpose();
  }
  return m;
}

TensorGradient get_gradient(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) {
    fail(path, "expected [3][3][3] gradient block (one 3x3 slice per direction)");
  }
  TensorGradient g;
  for (int d = 0; d < 3; ++d) {
    g[static_cast<std::size_t>(d)] =
        get_mat3(j[static_cast<std::size_t>(d)], path + "[" + std::to_string(d) + "]");
  }
  return g;
}

json vec3_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json mat3_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(vec3_json(m.row(r).transpose()));
  return rows;
}

json gradient_json(const TensorGradient& g) {
  json out = json::array();
  for (const Mat3& slice : g) out.push_back(mat3_json(slice));
  return out;
}

}  // namespace

Vec3 SystemBundle::defect_position() const {
  if (meta.defect_pos_ang) return *meta.defect_pos_ang;
  Vec3 c = Vec3::Zero();
  for (const auto& a : atoms) c += a.pos_ang;
  return atoms.empty() ? c : Vec3(c / static_cast<double>(atoms.size()));
}

SystemBundle parse_bundle(const std::string& text, const ValidationOptions& opts) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw Error(std::string("bundle: parse failure: ") + e.what());
  }
  if (!doc.is_object()) throw Error("bundle: top level must be an object");

  SystemBundle b;

  // ---- atoms ----
  if (!doc.contains("atoms") || !doc["atoms"].is_array() || doc["atoms"].empty()) {
    throw Error("bundle.atoms: required non-empty array");
  }
  std::size_t i = 0;
  for (const auto& ja : doc["atoms"]) {
    const std::string p = "atoms[" + std::to_string(i) + "]";
    AtomRecord a;
    if (!ja.is_object()) fail(p, "expected an object");
    if (!ja.contains("species") || !ja["species"].is_string()) {
      fail(p + ".species", "expected a string");
    }
    a.species = ja["species"].get<std::string>();
    a.mass_amu = get_number(ja.value("mass_amu", json()), p + ".mass_amu");
    a.pos_ang = get_vec3(ja.value("pos_ang", json()), p + ".pos_ang");
    if (!ja.contains("spin_active") || !ja["spin_active"].is_boolean()) {
      fail(p + ".spin_active", "expected a boolean");
    }
    a.spin_active = ja["spin_active"].get<bool>();
    b.atoms.push_back(std::move(a));
    ++i;
  }
  const std::size_t n = b.atoms.size();

  // ---- tensors ----
  if (!doc.contains("zfs_ghz")) throw Error("bundle.zfs_ghz: missing");
  b.zfs.d_GHz = get_mat3(doc["zfs_ghz"], "zfs_ghz");

  if (doc.contains("zfs_grad_ghz_per_ang")) {
    const auto& jg = doc["zfs_grad_ghz_per_ang"];
    if (!jg.is_array() || jg.size() != n) {
      throw Error("bundle.zfs_grad_ghz_per_ang: shape must be [n_atoms][3][3][3]");
    }
    for (std::size_t a = 0; a < n; ++a) {
      b.zfs_grad.push_back(
          get_gradient(jg[a], "zfs_grad_ghz_per_ang[" + std::to_string(a) + "]"));
    }
  }

  if (doc.contains("hfi_mhz")) {
    const auto& jh = doc["hfi_mhz"];
    if (!jh.is_array() || jh.size() != n) {
      throw Error("bundle.hfi_mhz: shape must be [n_atoms][3][3]");
    }
    for (std::size_t a = 0; a < n; ++a) {
      b.hfi_MHz.push_back(get_mat3(jh[a], "hfi_mhz[" + std::to_string(a) + "]"));
    }
  }

  if (doc.contains("hfi_grad_mhz_per_ang")) {
    const auto& jg = doc["hfi_grad_mhz_per_ang"];
    if (!jg.is_array() || jg.size() != n) {
      throw Error("bundle.hfi_grad_mhz_per_ang: shape must be [n_atoms][3][3][3]");
    }
    for (std::size_t a = 0; a < n; ++a) {
      b.hfi_grad.push_back(get_gradient(
          jg[a], "hfi_grad_mhz_per_ang[" + std::to_string(a) + "]"));
    }
  }

  // ---- modes ----
  if (doc.contains("modes")) {
    if (!doc["modes"].is_array()) throw Error("bundle.modes: expected an array");
    std::size_t m = 0;
    for (const auto& jm : doc["modes"]) {
      const std::string p = "modes[" + std::to_string(m) + "]";
      PhononMode mode;
      mode.freq_thz = get_number(jm.value("freq_thz", json()), p + ".freq_thz");
      mode.q_weight = get_number(jm.value("q_weight", json()), p + ".q_weight");
      if (!jm.contains("evec") || !jm["evec"].is_array() || jm["evec"].size() != n) {
        fail(p + ".evec", "expected [n_atoms][3]");
      }
      for (std::size_t a = 0; a < n; ++a) {
        mode.evec.push_back(
            get_vec3(jm["evec"][a], p + ".evec[" + std::to_string(a) + "]"));
      }
      b.modes.push_back(std::move(mode));
      ++m;
    }
  }

  // ---- meta ----
  if (!doc.contains("meta") || !doc["meta"].is_object()) {
    throw Error("bundle.meta: required object");
  }
  const auto& jm = doc["meta"];
  b.meta.axis = get_vec3(jm.value("axis", json()), "meta.axis");
  if (b.meta.axis.norm() == 0.0) fail("meta.axis", "zero vector");
  b.meta.axis.normalize();
  b.meta.cell_ang = get_mat3(jm.value("cell_ang", json()), "meta.cell_ang");
  if (!jm.contains("provenance") || !jm["provenance"].is_string()) {
    fail("meta.provenance", "expected a string");
  }
  b.meta.provenance = jm["provenance"].get<std::string>();
  if (jm.contains("defect_pos_ang")) {
    b.meta.defect_pos_ang = get_vec3(jm["defect_pos_ang"], "meta.defect_pos_ang");
  }
  if (jm.contains("carrier_sites")) {
    const auto& jc = jm["carrier_sites"];
    if (!jc.is_array() || jc.size() != 2 || !jc[0].is_number_integer() ||
        !jc[1].is_number_integer()) {
      fail("meta.carrier_sites", "expected two atom indices");
    }
    b.meta.carrier_sites = std::array<int, 2>{jc[0].get<int>(), jc[1].get<int>()};
  }
  if (jm.contains("chi")) b.meta.chi = get_number(jm["chi"], "meta.chi");
  if (jm.contains("model")) {
    if (!jm["model"].is_string()) fail("meta.model", "expected a string");
    b.meta.model = jm["model"].get<std::string>();
  }

  validate_bundle(b, opts);  // throws on violated invariants
  return b;
}

SystemBundle load_bundle(const std::filesystem::path& path,
                         const ValidationOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("bundle: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_bundle(ss.str(), opts);
}

ValidationReport validate_bundle(const SystemBundle& b, const ValidationOptions& opts) {
  ValidationReport report;
  const std::size_t n = b.n_atoms();
  if (n == 0) throw Error("bundle.atoms: required non-empty array");

  for (std::size_t a = 0; a < n; ++a) {
    const std::string p = "atoms[" + std::to_string(a) + "]";
    if (!(b.atoms[a].mass_amu > 0.0)) fail(p + ".mass_amu", "must be > 0");
    if (!b.atoms[a].pos_ang.allFinite()) fail(p + ".pos_ang", "non-finite");
  }

  // zfs: symmetric + traceless
  {
    const Mat3& d = b.zfs.d_GHz;
    const double asym = (d - d.transpose()).cwiseAbs().maxCoeff();
    if (asym > opts.zfs_symmetry_tol_GHz) {
      fail("zfs_ghz", "asymmetry " + format_double(asym) + " GHz exceeds tolerance " +
                          format_double(opts.zfs_symmetry_tol_GHz));
    }
    const double tr = d.trace();
    if (std::abs(tr) > opts.zfs_trace_tol_GHz) {
      fail("zfs_ghz", "trace " + format_double(tr) + " GHz violates tracelessness (tol " +
                          format_double(opts.zfs_trace_tol_GHz) + ")");
    }
  }

  // gradients: shape, slice symmetry, acoustic sum rule
  if (!b.zfs_grad.empty()) {
    if (b.zfs_grad.size() != n) {
      fail("zfs_grad_ghz_per_ang", "atom count mismatch");
    }
    Mat3 sum[3] = {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
    for (std::size_t a = 0; a < n; ++a) {
      for (int d = 0; d < 3; ++d) {
        const Mat3& slice = b.zfs_grad[a][static_cast<std::size_t>(d)];
        const double asym = (slice - slice.transpose()).cwiseAbs().maxCoeff();
        if (asym > opts.grad_symmetry_tol) {
          fail("zfs_grad_ghz_per_ang[" + std::to_string(a) + "][" + std::to_string(d) + "]",
               "slice asymmetry " + format_double(asym) + " exceeds tolerance");
        }
        sum[d] += slice;
      }
    }
    for (int d = 0; d < 3; ++d) {
      const double worst = sum[d].cwiseAbs().maxCoeff();
      if (worst > opts.acoustic_sum_tol_GHz_per_A) {
        fail("zfs_grad_ghz_per_ang",
             "acoustic sum rule violated in direction " + std::to_string(d) + ": |sum| = " +
                 format_double(worst) + " GHz/A");
      }
    }
  }

  if (!b.hfi_MHz.empty() && b.hfi_MHz.size() != n) fail("hfi_mhz", "atom count mismatch");
  if (!b.hfi_grad.empty() && b.hfi_grad.size() != n) {
    fail("hfi_grad_mhz_per_ang", "atom count mismatch");
  }
  if (b.hfi_grad.empty()) {
    report.notes.push_back("hfi_grad_mhz_per_ang absent: sp-nu-ph channel unavailable");
  }

  // modes
  std::size_t below_floor = 0;
  for (std::size_t m = 0; m < b.modes.size(); ++m) {
    const std::string p = "modes[" + std::to_string(m) + "]";
    const PhononMode& mode = b.modes[m];
    if (!(mode.freq_thz >= 0.0)) fail(p + ".freq_thz", "must be >= 0");
    if (!(mode.q_weight > 0.0)) fail(p + ".q_weight", "must be > 0");
    if (mode.evec.size() != n) fail(p + ".evec", "atom count mismatch");
    double norm_sq = 0.0;
    for (const Vec3& e : mode.evec) {
      if (!e.allFinite()) fail(p + ".evec", "non-finite component");
      norm_sq += e.squaredNorm();
    }
    if (std::abs(norm_sq - 1.0) > opts.evec_orthonorm_tol) {
      fail(p + ".evec", "norm " + format_double(std::sqrt(norm_sq)) +
                            " deviates from 1 beyond tolerance");
    }
    if (mode.freq_thz <= opts.frequency_floor_thz) ++below_floor;
  }
  if (below_floor > 0) {
    report.notes.push_back(std::to_string(below_floor) +
                           " mode(s) at/below frequency floor " +
                           format_double(opts.frequency_floor_thz) +
                           " THz: retained but excluded from sums");
  }

  // orthogonality is only fully checkable when every mode belongs to the same
  // q-point group; equal q_weight across the whole set is the stand-in marker
  // (the schema carries no q labels)
  if (b.modes.size() > 1) {
    bool uniform_weight = true;
    for (const auto& m : b.modes) {
      if (m.q_weight != b.modes.front().q_weight) {
        uniform_weight = false;
        break;
      }
    }
    if (uniform_weight && b.modes.size() <= 3 * n) {
      for (std::size_t p = 0; p < b.modes.size(); ++p) {
        for (std::size_t q = p + 1; q < b.modes.size(); ++q) {
          double dot = 0.0;
          for (std::size_t a = 0; a < n; ++a) {
            dot += b.modes[p].evec[a].dot(b.modes[q].evec[a]);
          }
          if (std::abs(dot) > opts.evec_orthonorm_tol) {
            fail("modes[" + std::to_string(q) + "].evec",
                 "not orthogonal to modes[" + std::to_string(p) + "]: dot = " +
                     format_double(dot));
          }
        }
      }
    } else if (!uniform_weight) {
      report.notes.push_back(
          "mixed q_weight values: cross-q eigenvector orthogonality not checkable "
          "without q labels");
    }
  }

  // informational mode-count bookkeeping (645 = 3 * 215 style check)
  {
    double wsum = 0.0;
    for (const auto& m : b.modes) wsum += m.q_weight;
    std::ostringstream note;
    note << "mode count " << b.modes.size() << ", weighted count " << format_double(wsum)
         << ", 3*n_atoms = " << 3 * n;
    report.notes.push_back(note.str());
  }

  if (b.meta.carrier_sites) {
    for (int idx : *b.meta.carrier_sites) {
      if (idx < 0 || static_cast<std::size_t>(idx) >= n) {
        fail("meta.carrier_sites", "atom index " + std::to_string(idx) + " out of range");
      }
    }
  }
  if (!b.meta.cell_ang.allFinite()) fail("meta.cell_ang", "non-finite");

  return report;
}

std::string serialize_bundle(const SystemBundle& b) {
  json doc = json::object();

  json atoms = json::array();
  for (const auto& a : b.atoms) {
    json ja = json::object();
    ja["species"] = a.species;
    ja["mass_amu"] = a.mass_amu;
    ja["pos_ang"] = vec3_json(a.pos_ang);
    ja["spin_active"] = a.spin_active;
    atoms.push_back(std::move(ja));
  }
  doc["atoms"] = std::move(atoms);

  doc["zfs_ghz"] = mat3_json(b.zfs.d_GHz);
  if (!b.zfs_grad.empty()) {
    json jg = json::array();
    for (const auto& g : b.zfs_grad) jg.push_back(gradient_json(g));
    doc["zfs_grad_ghz_per_ang"] = std::move(jg);
  }
  if (!b.hfi_MHz.empty()) {
    json jh = json::array();
    for (const auto& h : b.hfi_MHz) jh.push_back(mat3_json(h));
    doc["hfi_mhz"] = std::move(jh);
  }
  if (!b.hfi_grad.empty()) {
    json jg = json::array();
    for (const auto& g : b.hfi_grad) jg.push_back(gradient_json(g));
    doc["hfi_grad_mhz_per_ang"] = std::move(jg);
  }

  json modes = json::array();
  for (const auto& m : b.modes) {
    json jm = json::object();
    jm["freq_thz"] = m.freq_thz;
    jm["q_weight"] = m.q_weight;
    json evec = json::array();
    for (const Vec3& e : m.evec) evec.push_back(vec3_json(e));
    jm["evec"] = std::move(evec);
    modes.push_back(std::move(jm));
  }
  doc["modes"] = std::move(modes);

  json meta = json::object();
  meta["axis"] = vec3_json(b.meta.axis);
  meta["cell_ang"] = mat3_json(b.meta.cell_ang);
  meta["provenance"] = b.meta.provenance;
  if (b.meta.defect_pos_ang) meta["defect_pos_ang"] = vec3_json(*b.meta.defect_pos_ang);
  if (b.meta.carrier_sites) {
    meta["carrier_sites"] = json::array(
        {(*b.meta.carrier_sites)[0], (*b.meta.carrier_sites)[1]});
  }
  if (b.meta.chi) meta["chi"] = *b.meta.chi;
  if (b.meta.model) meta["model"] = *b.meta.model;
  doc["meta"] = std::move(meta);

  return doc.dump(1) + "\n";
}

void save_bundle(const SystemBundle& b, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("bundle: cannot write " + path.string());
  out << serialize_bundle(b);
}

}  // namespace spindec
