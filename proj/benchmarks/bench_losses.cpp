#include <benchmark/benchmark.h>

#include <vector>

#include "foc/losses.hpp"
#include "foc/rng.hpp"

namespace {

Eigen::VectorXd random_dist(foc::Rng& rng, int width) {
  Eigen::VectorXd v(width);
  for (int i = 0; i < width; ++i) v[i] = 0.01 + foc::uniform_real(rng, 0.0, 1.0);
  return v / v.sum();
}

std::vector<foc::ProbPair> random_pairs(int n, int width) {
  foc::Rng rng(42);
  std::vector<foc::ProbPair> pairs;
  pairs.reserve(n);
  for (int i = 0; i < n; ++i)
    pairs.push_back({random_dist(rng, width), random_dist(rng, width)});
  return pairs;
}

void bm_cross_entropy(benchmark::State& state) {
  foc::Rng rng(1);
  const int width = static_cast<int>(state.range(0));
  auto p = random_dist(rng, width);
  auto q = random_dist(rng, width);
  for (auto _ : state) benchmark::DoNotOptimize(foc::cross_entropy(p, q));
}
BENCHMARK(bm_cross_entropy)->Arg(6)->Arg(36);

void bm_ce_inverse_loss(benchmark::State& state) {
  foc::Rng rng(2);
  const int width = static_cast<int>(state.range(0));
  auto a = random_dist(rng, width);
  auto b = random_dist(rng, width);
  auto c = random_dist(rng, width);
  for (auto _ : state)
    benchmark::DoNotOptimize(foc::ce_inverse_loss(a, b, c));
}
BENCHMARK(bm_ce_inverse_loss)->Arg(6)->Arg(36);

void bm_joint_matrix_mi(benchmark::State& state) {
  auto pairs = random_pairs(32, static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(foc::mutual_information(foc::joint_matrix(pairs)));
}
BENCHMARK(bm_joint_matrix_mi)->Arg(6)->Arg(36);

void bm_mi_pair_grads(benchmark::State& state) {
  auto pairs = random_pairs(32, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(foc::mi_pair_grads(pairs));
}
BENCHMARK(bm_mi_pair_grads)->Arg(6)->Arg(36);

}  // namespace

BENCHMARK_MAIN();
