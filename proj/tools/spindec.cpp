// spindec — command-line driver for the dephasing pipeline.
//
// Subcommands cover the full workflow: synthetic-bundle generation, bundle
// validation, finite-difference gradients, the analytic spin-phonon sweep,
// nuclear-disorder ensembles, per-atom/per-mode decomposition, and channel
// aggregation.  Every run stamps its outputs with a config hash and the seed,
// and writes one JSON summary next to the CSV tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spindec/bundle.hpp"
#include "spindec/csv.hpp"
#include "spindec/cumulant.hpp"
#include "spindec/error.hpp"
#include "spindec/gradients.hpp"
#include "spindec/numeric.hpp"
#include "spindec/oracle.hpp"
#include "spindec/pipeline.hpp"
#include "spindec/spin_triplet.hpp"
#include "spindec/synthetic.hpp"
#include "spindec/trace.hpp"
#include "spindec/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

fs::path default_out_dir() {
  if (const char* env = std::getenv("SPINDEC_OUT_DIR"); env && *env) {
    return fs::path(env);
  }
  return fs::path(".");
}

std::string join_doubles(const std::vector<double>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ',';
    joined += spindec::format_double(values[i]);
  }
  return joined;
}

// Canonical key=value record of one run.  The FNV hash over it is stamped
// into every output file.  Thread counts and output paths are deliberately
// never added: they must not change results, so they must not change the
// stamp either.
class ConfigKeys {
 public:
  void add(const std::string& key, const std::string& value) {
    lines_ += key;
    lines_ += '=';
    lines_ += value;
    lines_ += '\n';
    json_[key] = value;
  }
  void add(const std::string& key, double value) {
    add(key, spindec::format_double(value));
  }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, std::uint64_t value) {
    add(key, std::to_string(value));
  }
  void add(const std::string& key, const std::vector<double>& values) {
    add(key, join_doubles(values));
  }

  std::string hash() const { return spindec::config_hash(lines_); }
  const ordered_json& json() const { return json_; }

 private:
  std::string lines_;
  ordered_json json_ = ordered_json::object();
};

// JSON has no infinity literal; emit the same `inf` token the CSVs use.
ordered_json json_num(double v) {
  if (std::isfinite(v)) return ordered_json(v);
  if (std::isnan(v)) return ordered_json("nan");
  return ordered_json(v > 0 ? "inf" : "-inf");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw spindec::Error("cannot open output file: " + path.string());
  out << text;
  if (!out) throw spindec::Error("write failed: " + path.string());
}

ordered_json base_summary(const std::string& command, const ConfigKeys& config,
                          const spindec::Provenance& prov) {
  ordered_json j = ordered_json::object();
  j["artifact"] = "spindec";
  j["version"] = spindec::kVersion;
  j["command"] = command;
  j["config_hash"] = prov.config_hash;
  j["seed"] = prov.seed;
  j["bundle"] = prov.bundle_provenance;
  j["config"] = config.json();
  return j;
}

void write_summary(const fs::path& out_dir, const ordered_json& summary) {
  write_text(out_dir / "summary.json", summary.dump(1) + "\n");
}

ordered_json report_to_json(const spindec::DecoherenceReport& report) {
  ordered_json j = ordered_json::object();
  j["sequence"] = spindec::sequence_name(report.sequence);
  j["t1_s"] = report.t1_s ? json_num(*report.t1_s) : ordered_json(nullptr);
  j["total_gamma_per_s"] = json_num(report.total_gamma_per_s);
  j["total_gamma_inv_s"] = json_num(report.total_gamma_inverse_s);
  ordered_json channels = ordered_json::array();
  for (const auto& entry : report.entries) {
    ordered_json c = ordered_json::object();
    c["channel"] = spindec::channel_name(entry.summary.channel);
    c["gamma_inv_s"] = json_num(entry.summary.gamma_inverse_s);
    c["homogeneous"] = entry.classification.homogeneous;
    c["reversible"] = entry.classification.reversible;
    c["included"] = entry.included;
    channels.push_back(std::move(c));
  }
  j["channels"] = std::move(channels);
  return j;
}

// Exit policy: 0 when every requested row was produced and none carries a fit
// failure; 1 when rows exist but at least one fit did not converge; fatal
// errors exit 2 from main's handler.
int exit_code_for(const std::vector<std::string>& statuses) {
  for (const auto& s : statuses) {
    if (s == "fit-unconverged") return 1;
  }
  return 0;
}

spindec::SystemBundle load_checked_bundle(const std::string& path) {
  if (path.empty()) throw spindec::Error("--bundle is required");
  return spindec::load_bundle(path);
}

spindec::Vec3 resolve_field_axis(const std::vector<double>& axis_flag,
                                 const spindec::SystemBundle& bundle) {
  if (axis_flag.empty()) return bundle.meta.axis;
  if (axis_flag.size() != 3) {
    throw spindec::Error("--axis needs exactly three components");
  }
  spindec::Vec3 axis(axis_flag[0], axis_flag[1], axis_flag[2]);
  const double norm = axis.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw spindec::Error("--axis must be a nonzero finite vector");
  }
  return axis / norm;
}

struct CommonArgs {
  std::string bundle_path;
  std::string out_dir = default_out_dir().string();
  std::vector<double> temps;
  std::optional<double> dt_s;
  std::optional<double> t_max_s;
};

spindec::PipelineOptions pipeline_options(const CommonArgs& args) {
  spindec::PipelineOptions options;
  options.grid.dt_s = args.dt_s;
  options.grid.t_max_s = args.t_max_s;
  return options;
}

void add_grid_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--dt", args.dt_s, "Override the time-grid step (s)");
  cmd->add_option("--tmax", args.t_max_s, "Override the time-grid length (s)");
}

void add_config_grid_keys(ConfigKeys& config, const CommonArgs& args) {
  config.add("dt", args.dt_s ? spindec::format_double(*args.dt_s) : "auto");
  config.add("tmax", args.t_max_s ? spindec::format_double(*args.t_max_s) : "auto");
}

fs::path prepare_out_dir(const CommonArgs& args) {
  fs::path dir(args.out_dir);
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// gen-synthetic
// ---------------------------------------------------------------------------

int cmd_gen_synthetic(const std::string& spec_path,
                      std::optional<std::uint64_t> seed_flag,
                      const std::string& out_dir_flag) {
  spindec::SyntheticSpec spec;
  if (!spec_path.empty()) spec = spindec::load_synthetic_spec(spec_path);
  if (seed_flag) spec.seed = *seed_flag;

  const spindec::SystemBundle bundle = spindec::generate_synthetic(spec);

  CommonArgs args;
  args.out_dir = out_dir_flag;
  const fs::path out_dir = prepare_out_dir(args);
  const fs::path bundle_path = out_dir / "bundle.json";
  spindec::save_bundle(bundle, bundle_path);

  ConfigKeys config;
  config.add("command", std::string("gen-synthetic"));
  config.add("spec", spec_path.empty() ? std::string("<default>") : spec_path);
  config.add("n_atoms", spec.n_atoms);
  config.add("seed", spec.seed);

  spindec::Provenance prov{config.hash(), spec.seed, bundle.meta.provenance};
  ordered_json summary = base_summary("gen-synthetic", config, prov);
  summary["bundle_file"] = bundle_path.string();
  summary["n_atoms"] = static_cast<int>(bundle.n_atoms());
  summary["n_modes"] = static_cast<int>(bundle.modes.size());
  write_summary(out_dir, summary);

  std::cout << "wrote " << bundle_path.string() << " (" << bundle.n_atoms()
            << " atoms, " << bundle.modes.size() << " modes)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int cmd_validate(const std::string& bundle_path) {
  const spindec::SystemBundle bundle = load_checked_bundle(bundle_path);
  const spindec::ValidationReport report = spindec::validate_bundle(bundle);
  for (const auto& note : report.notes) {
    std::cout << "note: " << note << "\n";
  }
  std::cout << "bundle OK: " << bundle.n_atoms() << " atoms, "
            << bundle.modes.size() << " modes, provenance \""
            << bundle.meta.provenance << "\"\n";
  return 0;
}

// ---------------------------------------------------------------------------
// gradients
// ---------------------------------------------------------------------------

int cmd_gradients(const std::string& bundle_path, double dx_ang, int threads,
                  const std::string& out_dir_flag) {
  const spindec::SystemBundle bundle = load_checked_bundle(bundle_path);
  if (!bundle.meta.model || *bundle.meta.model != "point_dipole" ||
      !bundle.meta.carrier_sites) {
    throw spindec::Error(
        "gradients: bundle metadata lacks a point_dipole carrier model; "
        "finite differences need a closed-form tensor oracle");
  }
  if (!(dx_ang > 0.0)) throw spindec::Error("--dx must be positive");

  const auto sites = *bundle.meta.carrier_sites;
  const spindec::PointDipoleOracle oracle(sites[0], sites[1],
                                          bundle.meta.chi.value_or(1.0));
  std::vector<spindec::Vec3> positions;
  positions.reserve(bundle.n_atoms());
  for (const auto& atom : bundle.atoms) positions.push_back(atom.pos_ang);

  const spindec::GradientSet fd =
      spindec::finite_difference_gradients(oracle, positions, dx_ang, threads);

  ConfigKeys config;
  config.add("command", std::string("gradients"));
  config.add("bundle", bundle.meta.provenance);
  config.add("dx", dx_ang);

  CommonArgs args;
  args.out_dir = out_dir_flag;
  const fs::path out_dir = prepare_out_dir(args);
  spindec::Provenance prov{config.hash(), 0, bundle.meta.provenance};
  spindec::CsvWriter csv(out_dir / "gradients.csv", prov);
  csv.header({"atom", "direction", "zfs_grad_norm", "hfi_grad_norm",
              "zfs_grad_dev", "hfi_grad_dev"});

  double max_zfs_dev = 0.0;
  double max_hfi_dev = 0.0;
  const bool have_zfs_ref = !bundle.zfs_grad.empty();
  const bool have_hfi_ref = bundle.has_hfi_grad();
  for (std::size_t a = 0; a < bundle.n_atoms(); ++a) {
    for (int d = 0; d < 3; ++d) {
      const spindec::Mat3& gz = fd.zfs_grad[a][d];
      const spindec::Mat3& gh = fd.hfi_grad[a][d];
      double zfs_dev = 0.0;
      double hfi_dev = 0.0;
      if (have_zfs_ref) {
        zfs_dev = (gz - bundle.zfs_grad[a][d]).cwiseAbs().maxCoeff();
      }
      if (have_hfi_ref) {
        hfi_dev = (gh - bundle.hfi_grad[a][d]).cwiseAbs().maxCoeff();
      }
      max_zfs_dev = std::max(max_zfs_dev, zfs_dev);
      max_hfi_dev = std::max(max_hfi_dev, hfi_dev);
      csv.row({spindec::CsvWriter::cell(static_cast<int>(a)),
               spindec::CsvWriter::cell(d),
               spindec::CsvWriter::cell(gz.norm()),
               spindec::CsvWriter::cell(gh.norm()),
               spindec::CsvWriter::cell(zfs_dev),
               spindec::CsvWriter::cell(hfi_dev)});
    }
  }

  ordered_json summary = base_summary("gradients", config, prov);
  summary["max_zfs_grad_dev_ghz_per_ang"] =
      have_zfs_ref ? json_num(max_zfs_dev) : ordered_json(nullptr);
  summary["max_hfi_grad_dev_mhz_per_ang"] =
      have_hfi_ref ? json_num(max_hfi_dev) : ordered_json(nullptr);
  write_summary(out_dir, summary);

  std::cout << "finite-difference gradients for " << bundle.n_atoms()
            << " atoms at dx = " << spindec::format_double(dx_ang) << " A\n";
  if (have_zfs_ref) {
    std::cout << "max deviation vs stored zfs gradients: "
              << spindec::format_double(max_zfs_dev) << " GHz/A\n";
  }
  if (have_hfi_ref) {
    std::cout << "max deviation vs stored hfi gradients: "
              << spindec::format_double(max_hfi_dev) << " MHz/A\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// pure
// ---------------------------------------------------------------------------

int cmd_pure(const CommonArgs& args, std::uint64_t seed,
             std::optional<double> t1_s, const std::string& sequence) {
  const spindec::SystemBundle bundle = load_checked_bundle(args.bundle_path);
  const auto spin = spindec::SpinTriplet::make();
  const spindec::QubitPair pair{};
  const auto options = pipeline_options(args);

  std::vector<double> temps = args.temps;
  if (temps.empty()) temps = {10.0, 300.0};

  ConfigKeys config;
  config.add("command", std::string("pure"));
  config.add("bundle", bundle.meta.provenance);
  config.add("temps", temps);
  add_config_grid_keys(config, args);
  config.add("seed", seed);

  const fs::path out_dir = prepare_out_dir(args);
  spindec::Provenance prov{config.hash(), seed, bundle.meta.provenance};

  spindec::CsvWriter rates(out_dir / "rates.csv", prov);
  rates.header({"T", "gamma_inv_plain", "gamma_inv_lower", "gamma_inv_upper",
                "delta_sq", "tau_c", "regime", "status"});

  std::vector<spindec::PureResult> results;
  std::vector<std::string> statuses;
  ordered_json rows = ordered_json::array();
  for (double T : temps) {
    spindec::PureResult r = spindec::pure_dephasing(bundle, spin, pair, T, options);
    rates.row({spindec::CsvWriter::cell(r.temperature_K),
               spindec::CsvWriter::cell(r.gamma_inverse_s),
               spindec::CsvWriter::cell(r.gamma_lower_s),
               spindec::CsvWriter::cell(r.gamma_upper_s),
               spindec::CsvWriter::cell(r.delta_sq_rad2_s2),
               spindec::CsvWriter::cell(r.tau_c_s),
               spindec::CsvWriter::cell(spindec::regime_name(r.regime)),
               spindec::CsvWriter::cell(r.status)});
    ordered_json row = ordered_json::object();
    row["T"] = json_num(r.temperature_K);
    row["gamma_inv_plain"] = json_num(r.gamma_inverse_s);
    row["gamma_inv_lower"] = json_num(r.gamma_lower_s);
    row["gamma_inv_upper"] = json_num(r.gamma_upper_s);
    row["delta_sq"] = json_num(r.delta_sq_rad2_s2);
    row["tau_c"] = json_num(r.tau_c_s);
    row["regime"] = spindec::regime_name(r.regime);
    row["status"] = r.status;
    rows.push_back(std::move(row));
    statuses.push_back(r.status);
    results.push_back(std::move(r));
  }

  // Companion traces for the first requested temperature.
  const spindec::PureResult& first = results.front();
  {
    spindec::CsvWriter corr(out_dir / "correlation.csv", prov);
    corr.header({"t_s", "c_rad2_s2"});
    const auto& grid = first.correlation.grid;
    for (int i = 0; i < grid.n; ++i) {
      corr.row({spindec::CsvWriter::cell(grid.t(i)),
                spindec::CsvWriter::cell(first.correlation.c_rad2_s2[i])});
    }
  }
  {
    spindec::CsvWriter deph(out_dir / "dephasing.csv", prov);
    deph.header({"t_s", "g", "decay"});
    const auto& grid = first.correlation.grid;
    std::vector<double> g(grid.n, 0.0);
    if (first.delta_sq_rad2_s2 > 0.0 && first.tau_c_s > 0.0 &&
        std::isfinite(first.tau_c_s)) {
      g = spindec::cumulant_g(first.delta_sq_rad2_s2, first.tau_c_s, grid);
    }
    const std::vector<double> decay = spindec::dephasing_function(g);
    for (int i = 0; i < grid.n; ++i) {
      deph.row({spindec::CsvWriter::cell(grid.t(i)),
                spindec::CsvWriter::cell(g[i]),
                spindec::CsvWriter::cell(decay[i])});
    }
  }

  const spindec::DecoherenceReport report = spindec::aggregate_report(
      {{spindec::Channel::SpPh, first.gamma_inverse_s}}, t1_s,
      spindec::parse_sequence(sequence));

  ordered_json summary = base_summary("pure", config, prov);
  summary["rows"] = std::move(rows);
  summary["report"] = report_to_json(report);
  write_summary(out_dir, summary);

  for (const auto& r : results) {
    std::cout << "T = " << spindec::format_double(r.temperature_K)
              << " K: 1/Gamma = " << spindec::format_double(r.gamma_inverse_s)
              << " s [" << spindec::format_double(r.gamma_lower_s) << ", "
              << spindec::format_double(r.gamma_upper_s) << "] ("
              << spindec::regime_name(r.regime) << ", " << r.status << ")\n";
  }
  return exit_code_for(statuses);
}

// ---------------------------------------------------------------------------
// disorder
// ---------------------------------------------------------------------------

int cmd_disorder(const CommonArgs& args, const std::string& channel_flag,
                 std::vector<double> concentrations, std::vector<double> fields,
                 const std::vector<double>& axis_flag,
                 std::optional<int> configs_flag, std::uint64_t seed, double c_T,
                 int threads) {
  const spindec::Channel channel = spindec::parse_channel(channel_flag);
  if (channel == spindec::Channel::SpPh) {
    throw spindec::Error(
        "disorder: channel must be sp-nu or sp-nu-ph (sp-ph has no nuclear "
        "ensemble; use the pure subcommand)");
  }
  const spindec::SystemBundle bundle = load_checked_bundle(args.bundle_path);
  const auto spin = spindec::SpinTriplet::make();
  const spindec::QubitPair pair{};

  std::vector<double> temps = args.temps;
  if (temps.empty()) temps = {300.0};
  if (concentrations.empty()) concentrations = {0.01};
  if (fields.empty()) fields = {0.0};
  const spindec::Vec3 axis = resolve_field_axis(axis_flag, bundle);

  spindec::EnsembleSettings settings;
  settings.n_configs =
      configs_flag ? *configs_flag
                   : (channel == spindec::Channel::SpNu ? 128 : 32);
  if (settings.n_configs < 1) throw spindec::Error("--configs must be >= 1");
  settings.seed = seed;
  settings.c_T_rad_per_K = c_T;
  settings.threads = threads;
  settings.pipeline = pipeline_options(args);

  ConfigKeys config;
  config.add("command", std::string("disorder"));
  config.add("bundle", bundle.meta.provenance);
  config.add("channel", spindec::channel_name(channel));
  config.add("temps", temps);
  config.add("concentrations", concentrations);
  config.add("bfield", fields);
  config.add("axis", std::vector<double>{axis.x(), axis.y(), axis.z()});
  config.add("configs", settings.n_configs);
  config.add("ct", c_T);
  add_config_grid_keys(config, args);
  config.add("seed", seed);

  const fs::path out_dir = prepare_out_dir(args);
  spindec::Provenance prov{config.hash(), seed, bundle.meta.provenance};

  spindec::CsvWriter csv(out_dir / "ensemble.csv", prov);
  csv.header({"concentration", "b_field", "mean_gamma_inv", "std_gamma_inv",
              "n_configs", "seed", "T", "delta_sq", "tau_c", "regime",
              "status"});

  std::vector<std::string> statuses;
  ordered_json rows = ordered_json::array();
  std::optional<spindec::DisorderResult> first;
  for (double T : temps) {
    for (double c : concentrations) {
      for (double b : fields) {
        const spindec::Vec3 b_vec = b * axis;
        spindec::DisorderResult r = spindec::disorder_dephasing(
            bundle, spin, pair, channel, c, b_vec, T, settings);
        csv.row({spindec::CsvWriter::cell(r.concentration),
                 spindec::CsvWriter::cell(b),
                 spindec::CsvWriter::cell(r.gamma_inverse_s),
                 spindec::CsvWriter::cell(r.stderr_gamma_inverse_s),
                 spindec::CsvWriter::cell(r.n_configs),
                 spindec::CsvWriter::cell(r.seed),
                 spindec::CsvWriter::cell(r.temperature_K),
                 spindec::CsvWriter::cell(r.delta_sq_rad2_s2),
                 spindec::CsvWriter::cell(r.tau_c_s),
                 spindec::CsvWriter::cell(spindec::regime_name(r.regime)),
                 spindec::CsvWriter::cell(r.status)});
        ordered_json row = ordered_json::object();
        row["concentration"] = json_num(r.concentration);
        row["b_field"] = json_num(b);
        row["mean_gamma_inv"] = json_num(r.gamma_inverse_s);
        row["std_gamma_inv"] = json_num(r.stderr_gamma_inverse_s);
        row["n_configs"] = r.n_configs;
        row["seed"] = r.seed;
        row["T"] = json_num(r.temperature_K);
        row["status"] = r.status;
        rows.push_back(std::move(row));
        statuses.push_back(r.status);
        std::cout << "c = " << spindec::format_double(r.concentration)
                  << ", B = " << spindec::format_double(b)
                  << " G: mean 1/Gamma = "
                  << spindec::format_double(r.gamma_inverse_s) << " s +- "
                  << spindec::format_double(r.stderr_gamma_inverse_s) << " ("
                  << r.status << ")\n";
        if (!first) first = std::move(r);
      }
    }
  }

  const spindec::DecoherenceReport report = spindec::aggregate_report(
      {{channel, first->gamma_inverse_s}}, std::nullopt,
      spindec::Sequence::Ramsey);

  ordered_json summary = base_summary("disorder", config, prov);
  summary["rows"] = std::move(rows);
  summary["report"] = report_to_json(report);
  write_summary(out_dir, summary);
  return exit_code_for(statuses);
}

// ---------------------------------------------------------------------------
// resolve
// ---------------------------------------------------------------------------

int cmd_resolve(const CommonArgs& args, const std::string& by_flag) {
  spindec::ResolveBy by;
  if (by_flag == "atom") {
    by = spindec::ResolveBy::Atom;
  } else if (by_flag == "mode") {
    by = spindec::ResolveBy::Mode;
  } else {
    throw spindec::Error("--by must be 'atom' or 'mode'");
  }
  const spindec::SystemBundle bundle = load_checked_bundle(args.bundle_path);
  const auto spin = spindec::SpinTriplet::make();
  const spindec::QubitPair pair{};
  const double T = args.temps.empty() ? 300.0 : args.temps.front();
  const auto options = pipeline_options(args);

  const std::vector<spindec::ResolvedRow> rows =
      spindec::resolve_contributions(bundle, spin, pair, by, T, options);

  ConfigKeys config;
  config.add("command", std::string("resolve"));
  config.add("bundle", bundle.meta.provenance);
  config.add("by", by_flag);
  config.add("temps", std::vector<double>{T});
  add_config_grid_keys(config, args);

  const fs::path out_dir = prepare_out_dir(args);
  spindec::Provenance prov{config.hash(), 0, bundle.meta.provenance};

  spindec::CsvWriter csv(out_dir / "resolved.csv", prov);
  csv.header({"index", "distance_or_frequency", "gamma_inv", "localization",
              "delta_sq", "status"});
  std::vector<std::string> statuses;
  double delta_sq_total = 0.0;
  for (const auto& row : rows) {
    csv.row({spindec::CsvWriter::cell(row.index),
             spindec::CsvWriter::cell(row.distance_or_frequency),
             spindec::CsvWriter::cell(row.gamma_inverse_s),
             spindec::CsvWriter::cell(row.localization),
             spindec::CsvWriter::cell(row.delta_sq_rad2_s2),
             spindec::CsvWriter::cell(row.status)});
    statuses.push_back(row.status);
    delta_sq_total += row.delta_sq_rad2_s2;
  }

  ordered_json summary = base_summary("resolve", config, prov);
  summary["n_rows"] = static_cast<int>(rows.size());
  summary["delta_sq_sum"] = json_num(delta_sq_total);
  write_summary(out_dir, summary);

  std::cout << "resolved " << rows.size() << " " << by_flag
            << " contributions at T = " << spindec::format_double(T)
            << " K (sum of delta_sq columns: "
            << spindec::format_double(delta_sq_total) << " rad^2/s^2)\n";
  return exit_code_for(statuses);
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

double parse_rate_value(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw spindec::Error("report: cannot parse channel value '" + text + "'");
  }
  if (used != text.size()) {
    throw spindec::Error("report: trailing junk in channel value '" + text + "'");
  }
  return value;
}

int cmd_report(const std::vector<std::string>& channel_flags,
               std::optional<double> t1_s, const std::string& sequence_flag,
               const std::string& out_dir_flag) {
  if (channel_flags.empty()) {
    throw spindec::Error("report: at least one --channel name=1/Gamma[s] is required");
  }
  std::vector<spindec::ChannelSummary> channels;
  for (const auto& flag : channel_flags) {
    const auto eq = flag.find('=');
    if (eq == std::string::npos) {
      throw spindec::Error("report: --channel expects name=1/Gamma[s], got '" +
                           flag + "'");
    }
    spindec::ChannelSummary summary;
    summary.channel = spindec::parse_channel(flag.substr(0, eq));
    summary.gamma_inverse_s = parse_rate_value(flag.substr(eq + 1));
    channels.push_back(summary);
  }
  const spindec::Sequence sequence = spindec::parse_sequence(sequence_flag);
  const spindec::DecoherenceReport report =
      spindec::aggregate_report(channels, t1_s, sequence);

  ConfigKeys config;
  config.add("command", std::string("report"));
  for (std::size_t i = 0; i < channel_flags.size(); ++i) {
    config.add("channel_" + std::to_string(i), channel_flags[i]);
  }
  config.add("t1", t1_s ? spindec::format_double(*t1_s) : "none");
  config.add("sequence", sequence_flag);

  CommonArgs args;
  args.out_dir = out_dir_flag;
  const fs::path out_dir = prepare_out_dir(args);
  spindec::Provenance prov{config.hash(), 0, ""};

  spindec::CsvWriter csv(out_dir / "report.csv", prov);
  csv.header({"channel", "gamma_inv_s", "gamma_per_s", "homogeneous",
              "reversible", "included"});
  for (const auto& entry : report.entries) {
    const double gamma_inv = entry.summary.gamma_inverse_s;
    const double gamma =
        std::isfinite(gamma_inv) && gamma_inv > 0.0 ? 1.0 / gamma_inv : 0.0;
    csv.row({spindec::CsvWriter::cell(spindec::channel_name(entry.summary.channel)),
             spindec::CsvWriter::cell(gamma_inv),
             spindec::CsvWriter::cell(gamma),
             spindec::CsvWriter::cell(entry.classification.homogeneous ? 1 : 0),
             spindec::CsvWriter::cell(entry.classification.reversible ? 1 : 0),
             spindec::CsvWriter::cell(entry.included ? 1 : 0)});
  }

  ordered_json summary = base_summary("report", config, prov);
  summary["report"] = report_to_json(report);
  write_summary(out_dir, summary);

  std::cout << "total 1/Gamma = "
            << spindec::format_double(report.total_gamma_inverse_s) << " s over "
            << report.entries.size() << " channel(s), sequence "
            << spindec::sequence_name(report.sequence) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "spindec: dephasing times of a triplet color-center spin qubit from "
      "ingested tensors, tensor gradients, and phonon modes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(spindec::kVersion));

  // gen-synthetic ------------------------------------------------------------
  auto* gen = app.add_subcommand(
      "gen-synthetic", "Generate a point-dipole synthetic bundle");
  std::string gen_spec_path;
  std::optional<std::uint64_t> gen_seed;
  std::string gen_out = default_out_dir().string();
  gen->add_option("spec", gen_spec_path, "Synthetic recipe JSON (optional)");
  gen->add_option("--seed", gen_seed, "Override the recipe seed");
  gen->add_option("--out", gen_out, "Output directory");

  // validate -------------------------------------------------------------------
  auto* val = app.add_subcommand("validate", "Validate a bundle file");
  std::string val_bundle;
  val->add_option("--bundle", val_bundle, "Bundle JSON path")->required();

  // gradients -------------------------------------------------------------------
  auto* grad = app.add_subcommand(
      "gradients", "Recompute tensor gradients by central finite differences");
  std::string grad_bundle;
  double grad_dx = 1e-3;
  int grad_threads = 1;
  std::string grad_out = default_out_dir().string();
  grad->add_option("--bundle", grad_bundle, "Bundle JSON path")->required();
  grad->add_option("--dx", grad_dx, "Displacement step (A)");
  grad->add_option("--threads", grad_threads, "Worker threads");
  grad->add_option("--out", grad_out, "Output directory");

  // pure -------------------------------------------------------------------------
  auto* pure = app.add_subcommand(
      "pure", "Analytic spin-phonon dephasing sweep over temperatures");
  CommonArgs pure_args;
  std::uint64_t pure_seed = 0;
  std::optional<double> pure_t1;
  std::string pure_sequence = "ramsey";
  pure->add_option("--bundle", pure_args.bundle_path, "Bundle JSON path")
      ->required();
  pure->add_option("--temps", pure_args.temps, "Temperatures (K)")
      ->delimiter(',');
  add_grid_flags(pure, pure_args);
  pure->add_option("--seed", pure_seed, "Seed recorded in outputs");
  pure->add_option("--t1", pure_t1, "Optional T1 (s) folded into the summary");
  pure->add_option("--sequence", pure_sequence, "ramsey | hahn");
  pure->add_option("--out", pure_args.out_dir, "Output directory");

  // disorder -----------------------------------------------------------------------
  auto* dis = app.add_subcommand(
      "disorder", "Nuclear-disorder ensemble dephasing (sp-nu, sp-nu-ph)");
  CommonArgs dis_args;
  std::string dis_channel;
  std::vector<double> dis_concs;
  std::vector<double> dis_fields;
  std::vector<double> dis_axis;
  std::optional<int> dis_configs;
  std::uint64_t dis_seed = 0;
  double dis_ct = 1e-3;
  int dis_threads = 1;
  dis->add_option("--bundle", dis_args.bundle_path, "Bundle JSON path")
      ->required();
  dis->add_option("--channel", dis_channel, "sp-nu | sp-nu-ph")->required();
  dis->add_option("--concentrations", dis_concs,
                  "Impurity concentrations (fraction of lattice sites)")
      ->delimiter(',');
  dis->add_option("--bfield", dis_fields, "Field magnitudes (Gauss)")
      ->delimiter(',');
  dis->add_option("--axis", dis_axis,
                  "Field axis components (default: defect axis)")
      ->delimiter(',')
      ->expected(3);
  dis->add_option("--configs", dis_configs,
                  "Configurations per ensemble (default 128 sp-nu, 32 sp-nu-ph)");
  dis->add_option("--seed", dis_seed, "Master ensemble seed");
  dis->add_option("--ct", dis_ct,
                  "Thermal orientation width constant (rad/K)");
  dis->add_option("--temps", dis_args.temps, "Temperatures (K)")
      ->delimiter(',');
  add_grid_flags(dis, dis_args);
  dis->add_option("--threads", dis_threads, "Worker threads");
  dis->add_option("--out", dis_args.out_dir, "Output directory");

  // resolve --------------------------------------------------------------------------
  auto* res = app.add_subcommand(
      "resolve", "Per-atom or per-mode decomposition of the sp-ph channel");
  CommonArgs res_args;
  std::string res_by = "mode";
  res->add_option("--bundle", res_args.bundle_path, "Bundle JSON path")
      ->required();
  res->add_option("--by", res_by, "atom | mode");
  res->add_option("--temps", res_args.temps,
                  "Temperature (K); first entry is used")
      ->delimiter(',');
  add_grid_flags(res, res_args);
  res->add_option("--out", res_args.out_dir, "Output directory");

  // report ---------------------------------------------------------------------------
  auto* rep = app.add_subcommand(
      "report", "Aggregate per-channel 1/Gamma values into a total");
  std::vector<std::string> rep_channels;
  std::optional<double> rep_t1;
  std::string rep_sequence = "ramsey";
  std::string rep_out = default_out_dir().string();
  rep->add_option("--channel", rep_channels,
                  "Channel entry name=1/Gamma[s] (repeatable)");
  rep->add_option("--t1", rep_t1, "Spin-lattice relaxation time T1 (s)");
  rep->add_option("--sequence", rep_sequence, "ramsey | hahn");
  rep->add_option("--out", rep_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_synthetic(gen_spec_path, gen_seed, gen_out);
    if (val->parsed()) return cmd_validate(val_bundle);
    if (grad->parsed())
      return cmd_gradients(grad_bundle, grad_dx, grad_threads, grad_out);
    if (pure->parsed())
      return cmd_pure(pure_args, pure_seed, pure_t1, pure_sequence);
    if (dis->parsed())
      return cmd_disorder(dis_args, dis_channel, dis_concs, dis_fields,
                          dis_axis, dis_configs, dis_seed, dis_ct, dis_threads);
    if (res->parsed()) return cmd_resolve(res_args, res_by);
    if (rep->parsed()) return cmd_report(rep_channels, rep_t1, rep_sequence, rep_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << "error: no subcommand selected\n";
  return 2;
}
