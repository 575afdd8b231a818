#include <benchmark/benchmark.h>

#include "instab/certificate.hpp"
#include "instab/instability.hpp"
#include "instab/linalg.hpp"
#include "instab/min_norm.hpp"
#include "instab/random.hpp"
#include "instab/reps.hpp"

using namespace instab;

namespace {

std::vector<cartan::ExactVector> random_polytope(int dim, int count, std::uint64_t seed) {
  Rng rng = make_rng(seed, 1, 0);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 4);
  std::vector<cartan::ExactVector> pts;
  for (int i = 0; i < count; ++i) {
    std::vector<Rational> c(dim + 1);
    Rational sum = 0;
    for (int k = 0; k < dim; ++k) {
      c[k] = Rational(num(rng), den(rng));
      sum += c[k];
    }
    c[dim] = -sum;
    pts.emplace_back(c);
  }
  return pts;
}

void BM_MinNormExact(benchmark::State& state) {
  const auto pts = random_polytope(static_cast<int>(state.range(0)), 12, 7);
  for (auto _ : state) benchmark::DoNotOptimize(instability::min_norm_point(pts));
}
BENCHMARK(BM_MinNormExact)->Arg(2)->Arg(4)->Arg(6);

void BM_MinNormFloat(benchmark::State& state) {
  const auto pts = random_polytope(static_cast<int>(state.range(0)), 12, 7);
  for (auto _ : state) benchmark::DoNotOptimize(instability::min_norm_point(pts, instability::Mode::Float));
}
BENCHMARK(BM_MinNormFloat)->Arg(2)->Arg(4)->Arg(6);

void BM_Act(benchmark::State& state) {
  const auto rep = reps::build_rep(reps::parse_spec("sym(2,std)*wedge(2,std)"), static_cast<int>(state.range(0)));
  Rng rng = make_rng(3, 2, 0);
  const auto g = reps::GroupElement::trusted(linalg::haar_special_orthogonal(rep.n(), rng));
  const reps::RepVector v(linalg::Vec::Ones(rep.dim()));
  for (auto _ : state) benchmark::DoNotOptimize(reps::act(rep, g, v));
  state.SetLabel("dim " + std::to_string(rep.dim()));
}
BENCHMARK(BM_Act)->Arg(3)->Arg(4);

void BM_Geodesic(benchmark::State& state) {
  const auto rep = reps::build_rep(reps::parse_spec("sym(2,std)"), 3);
  const reps::RepVector v(std::vector<Rational>{1, 1, 0, 0, 0, 0});
  for (auto _ : state) benchmark::DoNotOptimize(instability::fastest_shrinking_geodesic(rep, v));
}
BENCHMARK(BM_Geodesic)->Unit(benchmark::kMillisecond);

void BM_Certificate(benchmark::State& state) {
  const auto rep = reps::build_rep(reps::parse_spec("wedge(2,std)"), 3);
  const reps::RepVector v(std::vector<Rational>{1, 0, 0});
  for (auto _ : state) benchmark::DoNotOptimize(certificate::dominance_certificate(rep, v));
}
BENCHMARK(BM_Certificate)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
