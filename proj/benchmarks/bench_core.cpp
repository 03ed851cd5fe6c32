// Microbenchmarks for the hot paths: coupling contraction, correlation
// kernels, trace synthesis, the FFT lag-product estimator, curve fitting, and
// nuclear precession.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "spindec/bath.hpp"
#include "spindec/correlation.hpp"
#include "spindec/coupling.hpp"
#include "spindec/fit.hpp"
#include "spindec/pipeline.hpp"
#include "spindec/rng.hpp"
#include "spindec/spin_triplet.hpp"
#include "spindec/synthetic.hpp"
#include "spindec/thermal.hpp"

namespace {

spindec::SystemBundle make_bundle(int n_atoms, int n_modes) {
  spindec::SyntheticSpec spec;
  spec.n_atoms = n_atoms;
  spec.seed = 7;
  spec.modes.count = n_modes;
  spec.modes.freq_min_thz = 1.0;
  spec.modes.freq_max_thz = 40.0;
  return spindec::generate_synthetic(spec);
}

void bm_mode_couplings(benchmark::State& state) {
  const auto bundle = make_bundle(int(state.range(0)), 3 * int(state.range(0)));
  const auto spin = spindec::SpinTriplet::make();
  for (auto _ : state) {
    auto couplings = spindec::mode_couplings(bundle, spin, spindec::QubitPair{},
                                             spindec::Channel::SpPh);
    benchmark::DoNotOptimize(couplings.data());
  }
  state.SetItemsProcessed(state.iterations() * 3 * state.range(0));
}
BENCHMARK(bm_mode_couplings)->Arg(27)->Arg(64)->Arg(216);

void bm_analytic_autocorrelation(benchmark::State& state) {
  const auto bundle = make_bundle(27, int(state.range(0)));
  const auto spin = spindec::SpinTriplet::make();
  const auto couplings = spindec::mode_couplings(bundle, spin, spindec::QubitPair{},
                                                 spindec::Channel::SpPh);
  const auto thermal = spindec::thermal_state(bundle.modes, 300.0);
  const spindec::TimeGrid grid{1e-15, 4096};
  for (auto _ : state) {
    auto c = spindec::analytic_autocorrelation(couplings, bundle.modes, thermal, grid);
    benchmark::DoNotOptimize(c.c_rad2_s2.data());
  }
  state.SetItemsProcessed(state.iterations() * grid.n);
}
BENCHMARK(bm_analytic_autocorrelation)->Arg(12)->Arg(81);

void bm_stochastic_trace(benchmark::State& state) {
  const auto bundle = make_bundle(27, 81);
  const auto spin = spindec::SpinTriplet::make();
  const auto couplings = spindec::mode_couplings(bundle, spin, spindec::QubitPair{},
                                                 spindec::Channel::SpPh);
  const auto thermal = spindec::thermal_state(bundle.modes, 300.0);
  const spindec::TimeGrid grid{1e-15, int(state.range(0))};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto trace = spindec::stochastic_trace(couplings, bundle.modes, thermal, grid,
                                           seed++);
    benchmark::DoNotOptimize(trace.values_rad_s.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_stochastic_trace)->Arg(1024)->Arg(4096);

void bm_fft_autocorrelation(benchmark::State& state) {
  const int n = int(state.range(0));
  spindec::Rng rng(99);
  std::vector<spindec::FluctuationTrace> traces(8);
  for (auto& trace : traces) {
    trace.grid = spindec::TimeGrid{1e-15, n};
    trace.values_rad_s.resize(std::size_t(n));
    for (auto& v : trace.values_rad_s) v = rng.normal();
  }
  for (auto _ : state) {
    auto c = spindec::autocorrelation(traces);
    benchmark::DoNotOptimize(c.c_rad2_s2.data());
  }
  state.SetItemsProcessed(state.iterations() * traces.size() * n);
}
BENCHMARK(bm_fft_autocorrelation)->Arg(1024)->Arg(16384);

void bm_decay_fit(benchmark::State& state) {
  const int n = 257;
  spindec::CorrelationData data;
  data.grid = spindec::TimeGrid{1e-9, n};
  data.c_rad2_s2.resize(std::size_t(n));
  spindec::Rng rng(3);
  const double a = 5e18, b = 1e18, tau = 4e-8;
  for (int k = 0; k < n; ++k) {
    const double t = double(k) * data.grid.dt_s;
    data.c_rad2_s2[std::size_t(k)] = a * std::exp(-t / tau) + b + 1e15 * rng.normal();
  }
  data.c_rad2_s2[0] = a + b;
  for (auto _ : state) {
    auto fits = spindec::fit_correlation(data);
    benchmark::DoNotOptimize(&fits);
  }
}
BENCHMARK(bm_decay_fit);

void bm_precession(benchmark::State& state) {
  const auto spin = spindec::SpinTriplet::make();
  const int n_sites = int(state.range(0));
  spindec::NuclearSpinConfig cfg;
  std::vector<spindec::Mat3> hfi;
  spindec::Rng rng(17);
  for (int i = 0; i < n_sites; ++i) {
    cfg.occupied_sites.push_back(i);
    cfg.initial_moments.push_back(0.5 * spindec::Vec3(1, 0, 0));
    spindec::Mat3 a = spindec::Mat3::Zero();
    a(2, 2) = 0.1 * rng.normal();
    a(0, 2) = a(2, 0) = 0.05 * rng.normal();
    hfi.push_back(a);
  }
  cfg.b_field_gauss = spindec::Vec3(0, 0, 500.0);
  const spindec::TimeGrid grid{5e-8, 1024};
  for (auto _ : state) {
    auto traj = spindec::precess(cfg, hfi, spin, 0, grid);
    benchmark::DoNotOptimize(traj.moments.data());
  }
  state.SetItemsProcessed(state.iterations() * n_sites * (grid.n - 1));
}
BENCHMARK(bm_precession)->Arg(4)->Arg(32);

void bm_pure_pipeline(benchmark::State& state) {
  const auto bundle = make_bundle(64, 192);
  const auto spin = spindec::SpinTriplet::make();
  for (auto _ : state) {
    auto r = spindec::pure_dephasing(bundle, spin, spindec::QubitPair{}, 300.0);
    benchmark::DoNotOptimize(&r);
  }
}
BENCHMARK(bm_pure_pipeline);

}  // namespace

BENCHMARK_MAIN();
