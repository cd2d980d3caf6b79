#include "harmonia/checks.hpp"
#include "harmonia/gstructures.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace harmonia;

namespace {

AlternatingForm random_form(int n, int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AlternatingForm a(n, p);
  for (auto& c : a.coefficients()) c = u(rng);
  return a;
}

void BM_Wedge(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = random_form(n, 2, 1), b = random_form(n, 3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(wedge(a, b));
}
BENCHMARK(BM_Wedge)->Arg(6)->Arg(8)->Arg(12);

void BM_HodgeStar(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = random_form(n, n / 2, 3);
  Matrix g = Matrix::Identity(n, n);
  g(0, 1) = g(1, 0) = 0.2;
  const PointMetric m(g);
  for (auto _ : state) benchmark::DoNotOptimize(hodge_star(a, m));
}
BENCHMARK(BM_HodgeStar)->Arg(6)->Arg(8)->Arg(12);

void BM_FormInner(benchmark::State& state) {
  const auto a = spin7_form(1);
  Matrix g = Matrix::Identity(8, 8) * 1.5;
  g(2, 5) = g(5, 2) = 0.1;
  const PointMetric m(g);
  for (auto _ : state) benchmark::DoNotOptimize(form_inner(a, a, m));
}
BENCHMARK(BM_FormInner);

void BM_Jet(benchmark::State& state) {
  const Model model = build(state.range(0) == 0 ? "nk-s6" : "sasakian-s5");
  std::vector<const FormField*> fields;
  for (const auto& f : model.field_names()) fields.push_back(&model.field(f));
  const ChartPoint p = model.m().sample_points(1, 1).front();
  for (auto _ : state) benchmark::DoNotOptimize(Jet(model.m(), fields, p));
  state.SetLabel(model.id);
}
BENCHMARK(BM_Jet)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RunField(benchmark::State& state) {
  const Model model = build("nk-s6");
  CheckConfig cfg;
  cfg.points = 4;
  const ModelRun run = prepare_model(model, cfg);
  const auto& checks = model.spec("omega").checks;
  for (auto _ : state) benchmark::DoNotOptimize(run_field(run, "omega", checks, cfg));
}
BENCHMARK(BM_RunField)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
