// End-to-end library pipelines: pure dephasing, disorder ensembles,
// per-atom / per-mode decomposition, and channel aggregation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "spindec/constants.hpp"
#include "spindec/error.hpp"
#include "spindec/pipeline.hpp"
#include "spindec/synthetic.hpp"
#include "spindec/thermal.hpp"

using namespace spindec;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

SystemBundle synthetic_bundle(int n_atoms, int n_modes, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n_atoms = n_atoms;
  spec.modes.count = n_modes;
  spec.seed = seed;
  return generate_synthetic(spec);
}

// two-atom bundle with hand-picked gap responses: one 10 THz mode, only the
// zz component of the zfs gradient along x is nonzero
SystemBundle two_atom_bundle(double response_0, double response_1) {
  SystemBundle b;
  b.atoms.resize(2);
  b.atoms[0] = {"C", 12.0, Vec3(0, 0, 0), false};
  b.atoms[1] = {"C", 12.0, Vec3(3, 0, 0), false};
  b.meta.defect_pos_ang = Vec3(0, 0, 0);

  b.zfs_grad.resize(2);
  for (auto& g : b.zfs_grad) g = {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  b.zfs_grad[0][0](2, 2) = response_0;  // GHz/A, gap factor == this value
  b.zfs_grad[1][0](2, 2) = response_1;

  PhononMode mode;
  mode.freq_thz = 10.0;
  mode.q_weight = 1.0;
  mode.evec = {Vec3(0.6, 0, 0), Vec3(0.8, 0, 0)};
  b.modes = {mode};
  return b;
}

}  // namespace

TEST_CASE("grid overrides preserve unspecified parts of the fallback") {
  const TimeGrid fallback{1e-12, 1001};  // t_max = 1e-9

  const TimeGrid same = resolve_grid({}, fallback);
  CHECK(same.same_as(fallback));

  GridOverrides dt_only;
  dt_only.dt_s = 2e-12;
  const TimeGrid g1 = resolve_grid(dt_only, fallback);
  CHECK(g1.dt_s == 2e-12);
  CHECK(g1.n == 501);  // ceil(1e-9 / 2e-12) + 1

  GridOverrides tmax_only;
  tmax_only.t_max_s = 2e-9;
  const TimeGrid g2 = resolve_grid(tmax_only, fallback);
  CHECK(g2.dt_s == 1e-12);
  CHECK(g2.n == 2001);

  GridOverrides bad;
  bad.dt_s = 1e-9;
  bad.t_max_s = 1e-10;
  CHECK_THROWS_AS((void)resolve_grid(bad, fallback), Error);

  GridOverrides huge;
  huge.dt_s = 1e-15;
  huge.t_max_s = 1.0;  // 1e15 samples
  CHECK_THROWS_AS((void)resolve_grid(huge, fallback), Error);
}

TEST_CASE("pure dephasing: zero gradients yield the infinite sentinel") {
  SystemBundle bundle = synthetic_bundle(27, 12, 3);
  for (auto& g : bundle.zfs_grad) g = {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  const SpinTriplet spin = SpinTriplet::make();

  const PureResult r = pure_dephasing(bundle, spin, QubitPair{}, 300.0);
  CHECK(r.status == "no-coupling");
  CHECK(std::isinf(r.gamma_inverse_s));
  CHECK(r.delta_sq_rad2_s2 == 0.0);
}

TEST_CASE("pure dephasing: hotter baths decohere faster") {
  const SystemBundle bundle = synthetic_bundle(64, 192, 7);
  const SpinTriplet spin = SpinTriplet::make();

  const PureResult cold = pure_dephasing(bundle, spin, QubitPair{}, 10.0);
  const PureResult hot = pure_dephasing(bundle, spin, QubitPair{}, 300.0);
  CHECK(cold.status == "ok");
  CHECK(hot.status == "ok");
  CHECK(std::isfinite(cold.gamma_inverse_s));
  CHECK(hot.gamma_inverse_s < cold.gamma_inverse_s);
  CHECK(hot.delta_sq_rad2_s2 > cold.delta_sq_rad2_s2);
  CHECK(cold.gamma_lower_s <= cold.gamma_inverse_s);
  CHECK(cold.gamma_inverse_s <= cold.gamma_upper_s);
}

TEST_CASE("pure dephasing: delta_sq scales as 1 + 2n through the pipeline") {
  // single-mode bundle: the pipeline's C(0) must track the occupation factor
  SystemBundle bundle = two_atom_bundle(4.0, 0.5);
  const SpinTriplet spin = SpinTriplet::make();
  const double f = bundle.modes[0].freq_thz;

  const PureResult t1 = pure_dephasing(bundle, spin, QubitPair{}, 100.0);
  const PureResult t2 = pure_dephasing(bundle, spin, QubitPair{}, 450.0);
  const double expected =
      (1.0 + 2.0 * occupation(f, 450.0)) / (1.0 + 2.0 * occupation(f, 100.0));
  CHECK(t2.delta_sq_rad2_s2 / t1.delta_sq_rad2_s2 ==
        doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("pure dephasing honors grid overrides") {
  const SystemBundle bundle = two_atom_bundle(4.0, 0.5);
  const SpinTriplet spin = SpinTriplet::make();
  PipelineOptions opts;
  opts.grid.dt_s = 2e-15;
  opts.grid.t_max_s = 1e-12;
  const PureResult r = pure_dephasing(bundle, spin, QubitPair{}, 300.0, opts);
  CHECK(r.correlation.grid.dt_s == 2e-15);
  CHECK(r.correlation.grid.n == 501);
}

TEST_CASE("disorder: input validation") {
  const SystemBundle bundle = synthetic_bundle(27, 12, 3);
  const SpinTriplet spin = SpinTriplet::make();
  EnsembleSettings s;
  s.n_configs = 2;

  CHECK_THROWS_WITH_AS(
      (void)disorder_dephasing(bundle, spin, QubitPair{}, Channel::SpPh, 0.1,
                               Vec3::Zero(), 300.0, s),
      doctest::Contains("sp-nu"), Error);

  EnsembleSettings none = s;
  none.n_configs = 0;
  CHECK_THROWS_AS((void)disorder_dephasing(bundle, spin, QubitPair{}, Channel::SpNu,
                                           0.1, Vec3::Zero(), 300.0, none),
                  Error);

  SystemBundle no_hfi = bundle;
  no_hfi.hfi_MHz.clear();
  CHECK_THROWS_WITH_AS(
      (void)disorder_dephasing(no_hfi, spin, QubitPair{}, Channel::SpNu, 0.1,
                               Vec3::Zero(), 300.0, s),
      doctest::Contains("hfi_mhz"), Error);

  SystemBundle no_grad = bundle;
  no_grad.hfi_grad.clear();
  CHECK_THROWS_WITH_AS(
      (void)disorder_dephasing(no_grad, spin, QubitPair{}, Channel::SpNuPh, 0.1,
                               Vec3::Zero(), 300.0, s),
      doctest::Contains("hfi_grad"), Error);
}

TEST_CASE("disorder: an empty bath never dephases") {
  const SystemBundle bundle = synthetic_bundle(27, 12, 3);
  const SpinTriplet spin = SpinTriplet::make();
  EnsembleSettings s;
  s.n_configs = 4;
  s.seed = 11;

  const DisorderResult r = disorder_dephasing(
      bundle, spin, QubitPair{}, Channel::SpNu, 0.0, Vec3(0, 0, 100), 300.0, s);
  CHECK(r.status == "no-coupling");
  CHECK(std::isinf(r.gamma_inverse_s));
  CHECK(r.delta_sq_rad2_s2 == 0.0);
  CHECK(r.stderr_gamma_inverse_s == 0.0);
  for (double g : r.per_config_gamma_per_s) CHECK(g == 0.0);
}

TEST_CASE("disorder: seed determinism and thread invariance") {
  const SystemBundle bundle = synthetic_bundle(27, 12, 3);
  const SpinTriplet spin = SpinTriplet::make();
  EnsembleSettings s;
  s.n_configs = 8;
  s.seed = 21;

  const auto run = [&](EnsembleSettings cfg) {
    return disorder_dephasing(bundle, spin, QubitPair{}, Channel::SpNu, 0.3,
                              Vec3(0, 0, 100), 300.0, cfg);
  };
  const DisorderResult a = run(s);
  const DisorderResult b = run(s);
  CHECK(a.gamma_inverse_s == b.gamma_inverse_s);
  CHECK(a.correlation.c_rad2_s2 == b.correlation.c_rad2_s2);
  CHECK(a.per_config_gamma_per_s == b.per_config_gamma_per_s);

  EnsembleSettings threaded = s;
  threaded.threads = 4;
  const DisorderResult c = run(threaded);
  CHECK(a.gamma_inverse_s == c.gamma_inverse_s);
  CHECK(a.correlation.c_rad2_s2 == c.correlation.c_rad2_s2);
  CHECK(a.per_config_gamma_per_s == c.per_config_gamma_per_s);

  EnsembleSettings reseeded = s;
  reseeded.seed = 22;
  const DisorderResult d = run(reseeded);
  CHECK(a.correlation.c_rad2_s2 != d.correlation.c_rad2_s2);
}

TEST_CASE("disorder: reported error bar matches the delta method") {
  const SystemBundle bundle = synthetic_bundle(27, 12, 3);
  const SpinTriplet spin = SpinTriplet::make();
  EnsembleSettings s;
  s.n_configs = 16;
  s.seed = 5;

  const DisorderResult r = disorder_dephasing(
      bundle, spin, QubitPair{}, Channel::SpNu, 0.4, Vec3(0, 0, 100), 300.0, s);
  REQUIRE(std::isfinite(r.gamma_inverse_s));
  REQUIRE(r.per_config_gamma_per_s.size() == 16);

  const double mean =
      std::accumulate(r.per_config_gamma_per_s.begin(),
                      r.per_config_gamma_per_s.end(), 0.0) /
      16.0;
  double var = 0.0;
  for (double g : r.per_config_gamma_per_s) var += (g - mean) * (g - mean);
  var /= 15.0;
  const double se_rate = std::sqrt(var / 16.0);
  const double gamma_ens = 1.0 / r.gamma_inverse_s;
  CHECK(r.stderr_gamma_inverse_s ==
        doctest::Approx(se_rate / (gamma_ens * gamma_ens)).epsilon(1e-12));
}

TEST_CASE("disorder: the pinned electron level matters") {
  const SystemBundle bundle = synthetic_bundle(27, 12, 3);
  const SpinTriplet spin = SpinTriplet::make();
  EnsembleSettings s;
  s.n_configs = 8;
  s.seed = 9;

  const DisorderResult upper = disorder_dephasing(
      bundle, spin, QubitPair{}, Channel::SpNu, 0.3, Vec3(0, 0, 50), 300.0, s);
  EnsembleSettings pinned0 = s;
  pinned0.electron_ms = 0;
  const DisorderResult zero = disorder_dephasing(
      bundle, spin, QubitPair{}, Channel::SpNu, 0.3, Vec3(0, 0, 50), 300.0, pinned0);
  // same occupancies and initial moments (same seeds), different precession
  CHECK(upper.correlation.c_rad2_s2 != zero.correlation.c_rad2_s2);
}

TEST_CASE("per-mode decomposition is additive in delta_sq") {
  const SystemBundle bundle = synthetic_bundle(64, 48, 7);
  const SpinTriplet spin = SpinTriplet::make();
  const double temperature = 300.0;

  const PureResult total = pure_dephasing(bundle, spin, QubitPair{}, temperature);
  const std::vector<ResolvedRow> rows = resolve_contributions(
      bundle, spin, QubitPair{}, ResolveBy::Mode, temperature);
  REQUIRE(rows.size() == 48);

  double sum = 0.0;
  for (const ResolvedRow& row : rows) {
    sum += row.delta_sq_rad2_s2;
    CHECK(row.distance_or_frequency ==
          bundle.modes[std::size_t(row.index)].freq_thz);
    CHECK(row.localization > 0.0);
    CHECK(row.localization <= 1.0 + 1e-12);
  }
  CHECK(sum == doctest::Approx(total.delta_sq_rad2_s2).epsilon(1e-10));
}

TEST_CASE("decomposition on a crafted bundle: responses land where placed") {
  const SystemBundle bundle = two_atom_bundle(4.0, 0.5);
  const SpinTriplet spin = SpinTriplet::make();

  const std::vector<ResolvedRow> atoms = resolve_contributions(
      bundle, spin, QubitPair{}, ResolveBy::Atom, 300.0);
  REQUIRE(atoms.size() == 2);
  CHECK(atoms[0].distance_or_frequency == 0.0);
  CHECK(atoms[1].distance_or_frequency == 3.0);

  // per-atom delta_sq ratio = (evec_0 response_0 / evec_1 response_1)^2
  const double expected_ratio = std::pow((0.6 * 4.0) / (0.8 * 0.5), 2);
  CHECK(atoms[0].delta_sq_rad2_s2 / atoms[1].delta_sq_rad2_s2 ==
        doctest::Approx(expected_ratio).epsilon(1e-10));
  CHECK(atoms[0].delta_sq_rad2_s2 > atoms[1].delta_sq_rad2_s2);

  // the single mode carries the full pure-channel variance
  const std::vector<ResolvedRow> modes = resolve_contributions(
      bundle, spin, QubitPair{}, ResolveBy::Mode, 300.0);
  REQUIRE(modes.size() == 1);
  const PureResult total = pure_dephasing(bundle, spin, QubitPair{}, 300.0);
  CHECK(modes[0].delta_sq_rad2_s2 ==
        doctest::Approx(total.delta_sq_rad2_s2).epsilon(1e-12));
  // only the near atom sits inside the localization shell
  CHECK(modes[0].localization == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a floored mode resolves to an inert row") {
  SystemBundle bundle = two_atom_bundle(4.0, 0.5);
  PhononMode slow = bundle.modes[0];
  slow.freq_thz = 0.05;
  bundle.modes.push_back(slow);
  const SpinTriplet spin = SpinTriplet::make();

  const std::vector<ResolvedRow> rows = resolve_contributions(
      bundle, spin, QubitPair{}, ResolveBy::Mode, 300.0);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].delta_sq_rad2_s2 == 0.0);
  CHECK(std::isinf(rows[1].gamma_inverse_s));
  CHECK(rows[1].status == "no-coupling");
}

TEST_CASE("channel classification drives sequence filtering") {
  CHECK(classify_channel(Channel::SpPh).homogeneous);
  CHECK(!classify_channel(Channel::SpPh).reversible);
  CHECK(!classify_channel(Channel::SpNuPh).homogeneous);
  CHECK(!classify_channel(Channel::SpNuPh).reversible);
  CHECK(!classify_channel(Channel::SpNu).homogeneous);
  CHECK(classify_channel(Channel::SpNu).reversible);
}

TEST_CASE("report: single channel, rate hierarchy, and t1 folding") {
  const ChannelSummary phonon{Channel::SpPh, 5.0};
  const ChannelSummary nuclear{Channel::SpNu, 1e8};

  const DecoherenceReport single = aggregate_report({phonon}, {}, Sequence::Ramsey);
  CHECK(single.total_gamma_per_s == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(single.total_gamma_inverse_s == doctest::Approx(5.0).epsilon(1e-15));

  const DecoherenceReport both =
      aggregate_report({phonon, nuclear}, {}, Sequence::Ramsey);
  CHECK(both.total_gamma_per_s == doctest::Approx(0.2 + 1e-8).epsilon(1e-12));
  CHECK(both.total_gamma_inverse_s < 5.0);
  CHECK(both.entries[0].included);
  CHECK(both.entries[1].included);

  // Hahn echo refocuses the static nuclear channel
  const DecoherenceReport hahn =
      aggregate_report({phonon, nuclear}, {}, Sequence::Hahn);
  CHECK(!hahn.entries[1].included);
  CHECK(hahn.total_gamma_per_s == doctest::Approx(0.2).epsilon(1e-15));

  // longitudinal relaxation adds 1/(2 T1)
  const DecoherenceReport with_t1 =
      aggregate_report({phonon}, std::optional<double>(1e-3), Sequence::Ramsey);
  CHECK(with_t1.total_gamma_per_s == doctest::Approx(0.2 + 500.0).epsilon(1e-15));

  CHECK_THROWS_AS(
      (void)aggregate_report({phonon}, std::optional<double>(0.0), Sequence::Ramsey),
      Error);
  CHECK_THROWS_AS((void)aggregate_report({}, {}, Sequence::Ramsey), Error);
}

TEST_CASE("report: channels that never dephase leave the total infinite") {
  const ChannelSummary silent{Channel::SpNu, kInf};
  const DecoherenceReport r = aggregate_report({silent}, {}, Sequence::Ramsey);
  CHECK(r.total_gamma_per_s == 0.0);
  CHECK(std::isinf(r.total_gamma_inverse_s));

  CHECK(sequence_name(Sequence::Ramsey) == "ramsey");
  CHECK(parse_sequence("hahn") == Sequence::Hahn);
  CHECK_THROWS_AS((void)parse_sequence("cpmg"), Error);
}
