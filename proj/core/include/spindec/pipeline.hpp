#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spindec/bundle.hpp"
#include "spindec/correlation.hpp"
#include "spindec/cumulant.hpp"
#include "spindec/fit.hpp"
#include "spindec/spin_triplet.hpp"

namespace spindec {

struct GridOverrides {
  std::optional<double> dt_s;
  std::optional<double> t_max_s;
};

TimeGrid resolve_grid(const GridOverrides& overrides, const TimeGrid& fallback);

struct PipelineOptions {
  double frequency_floor_thz = 0.1;
  GridOverrides grid;
  int fit_max_samples = 4096;  // correlation is strided down to this for fitting
};

// ---- pure dephasing (sp-ph, analytic path) ---------------------------------

struct PureResult {
  double temperature_K = 0.0;
  double gamma_inverse_s = 0.0;  // plain-exponential value
  double gamma_lower_s = 0.0;    // interval spanned by the two fit models
  double gamma_upper_s = 0.0;
  double delta_sq_rad2_s2 = 0.0;
  double tau_c_s = 0.0;
  Regime regime = Regime::Undefined;
  std::string status;  // ok | no-coupling | no-decay | fit-unconverged
  FitPair fits;
  CorrelationData correlation;
};

PureResult pure_dephasing(const SystemBundle& bundle, const SpinTriplet& spin,
                          const QubitPair& pair, double temperature_K,
                          const PipelineOptions& options = {});

// ---- disorder dephasing (sp-nu and sp-nu-ph ensembles) ----------------------

struct EnsembleSettings {
  int n_configs = 128;
  std::uint64_t seed = 0;
  double c_T_rad_per_K = 1e-3;
  std::optional<int> electron_ms;  // defaults to the pair's upper level
  int threads = 1;
  PipelineOptions pipeline;
};

struct DisorderResult {
  Channel channel = Channel::SpNu;
  double concentration = 0.0;
  Vec3 b_field_gauss = Vec3::Zero();
  double temperature_K = 0.0;
  double gamma_inverse_s = 0.0;      // from the ensemble-averaged C(t)
  double gamma_lower_s = 0.0;
  double gamma_upper_s = 0.0;
  double stderr_gamma_inverse_s = 0.0;  // 1/sqrt(n) Monte-Carlo error bar
  double delta_sq_rad2_s2 = 0.0;
  double tau_c_s = 0.0;
  Regime regime = Regime::Undefined;
  int n_configs = 0;
  std::uint64_t seed = 0;
  std::string status;
  FitPair fits;
  CorrelationData correlation;            // ensemble average
  std::vector<double> per_config_gamma_per_s;  // rates; 0 = no dephasing
};

DisorderResult disorder_dephasing(const SystemBundle& bundle, const SpinTriplet& spin,
                                  const QubitPair& pair, Channel channel,
                                  double concentration, const Vec3& b_field_gauss,
                                  double temperature_K,
                                  const EnsembleSettings& settings);

// ---- per-atom / per-mode decomposition --------------------------------------

enum class ResolveBy { Atom, Mode };

struct ResolvedRow {
  int index = -1;
  double distance_or_frequency = 0.0;  // A from defect, or THz
  double delta_sq_rad2_s2 = 0.0;
  double gamma_inverse_s = 0.0;
  double localization = 0.0;  // shell-restricted inverse participation ratio
  std::string status;
};

// shell_radius_ang <= 0 picks half the maximum defect-to-atom distance.
std::vector<ResolvedRow> resolve_contributions(const SystemBundle& bundle,
                                               const SpinTriplet& spin,
                                               const QubitPair& pair, ResolveBy by,
                                               double temperature_K,
                                               const PipelineOptions& options = {},
                                               double shell_radius_ang = 0.0);

// ---- channel aggregation -----------------------------------------------------

enum class Sequence { Ramsey, Hahn };

std::string sequence_name(Sequence s);
Sequence parse_sequence(const std::string& name);

struct ChannelSummary {
  Channel channel = Channel::SpPh;
  double gamma_inverse_s = 0.0;  // +inf means the channel does not dephase
};

struct ChannelClassification {
  bool homogeneous = false;
  bool reversible = false;
};

ChannelClassification classify_channel(Channel c);

struct ReportEntry {
  ChannelSummary summary;
  ChannelClassification classification;
  bool included = false;  // excluded when reversible under a Hahn sequence
};

struct DecoherenceReport {
  Sequence sequence = Sequence::Ramsey;
  std::optional<double> t1_s;
  double total_gamma_per_s = 0.0;
  double total_gamma_inverse_s = 0.0;  // +inf when nothing dephases
  std::vector<ReportEntry> entries;
};

DecoherenceReport aggregate_report(const std::vector<ChannelSummary>& channels,
                                   std::optional<double> t1_s, Sequence sequence);

}  // namespace spindec
