#include <benchmark/benchmark.h>

#include "qcorr/contour.hpp"
#include "qcorr/correlation.hpp"
#include "qcorr/operators.hpp"

#include <map>
#include <vector>

using namespace qcorr;

namespace {

CorrelationEngine make_engine(int n_sites, double beta) {
  const QuantumOperator h = build_tfim(n_sites, 1.5, true);
  return CorrelationEngine(h, thermal_state(h, beta),
                           {{"B", collective_z(n_sites)}});
}

void BM_PauliString(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pauli_string(n, {{1, PauliAxis::X}, {n, PauliAxis::Y}}));
  }
}
BENCHMARK(BM_PauliString)->Arg(4)->Arg(8)->Arg(10);

void BM_BuildTfim(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_tfim(n, 1.5, true));
  }
}
BENCHMARK(BM_BuildTfim)->Arg(4)->Arg(6)->Arg(8);

void BM_SpectralDecomposition(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const QuantumOperator h = build_tfim(n, 1.5, true);
  for (auto _ : state) {
    SpectralDecomposition sd(h);
    benchmark::DoNotOptimize(sd.eigenvalues());
  }
}
BENCHMARK(BM_SpectralDecomposition)->Arg(4)->Arg(6)->Arg(8);

void BM_HeisenbergEvolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto engine = make_engine(n, 1.0);
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine.evolved("B", t));
    engine.clear_scratch();
    t += 0.1;  // defeat the cache, measure the evolution itself
  }
}
BENCHMARK(BM_HeisenbergEvolve)->Arg(6)->Arg(8);

void BM_CtocDirectOrder3(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto engine = make_engine(n, 1.0);
  double t3 = 2.05;
  for (auto _ : state) {
    const CtocSpec spec(EtaVector::parse("+-+"), {0.0, 2.0, t3},
                        {"B", "B", "B"});
    benchmark::DoNotOptimize(engine.ctoc_direct(spec));
    engine.clear_scratch();
    t3 += 0.05;
  }
}
BENCHMARK(BM_CtocDirectOrder3)->Arg(4)->Arg(6)->Arg(8);

void BM_WightmanOrder3(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto engine = make_engine(n, 1.0);
  const Permutation sigma = Permutation::from_trace_string("213");
  double t3 = 2.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        engine.wightman_raw(sigma, {"B", "B", "B"}, {0.0, 2.0, t3}));
    engine.clear_scratch();
    t3 += 0.05;
  }
}
BENCHMARK(BM_WightmanOrder3)->Arg(6)->Arg(8);

void BM_SweepPoint(benchmark::State& state) {
  // Amortized cost of one grid point of the four third-order series.
  const int n = static_cast<int>(state.range(0));
  const QuantumOperator h = build_tfim(n, 1.5, true);
  CorrelationEngine engine(h, product_state_c(n), {{"B", collective_z(n)}});
  std::vector<SweepTemplate> templates;
  for (const char* eta : {"+--", "++-", "+-+", "+++"}) {
    SweepTemplate tpl{EtaVector::parse(eta), {"B", "B", "B"}, {0.0, 2.0, 0.0},
                      3, {}, ""};
    templates.push_back(tpl);
  }
  std::vector<double> grid;
  for (double t = 2.05; t < 4.0; t += 0.05) grid.push_back(t);
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine.sweep(templates, "t3", grid));
  }
  state.SetItemsProcessed(state.iterations() * grid.size());
}
BENCHMARK(BM_SweepPoint)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_EnumerateRanks(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_ranks(n));
  }
}
BENCHMARK(BM_EnumerateRanks)->Arg(6)->Arg(8);

void BM_ExpandCtoc(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<EtaSign> signs(n, EtaSign::Plus);
  signs[0] = EtaSign::Minus;
  const EtaVector eta(signs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(expand_ctoc(eta));
  }
}
BENCHMARK(BM_ExpandCtoc)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
