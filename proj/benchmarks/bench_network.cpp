#include <benchmark/benchmark.h>

#include <vector>

#include "foc/network.hpp"
#include "foc/rng.hpp"

namespace {

foc::Image random_image(foc::Rng& rng, int size) {
  foc::Image img(size, size, 3);
  for (auto& v : img.data)
    v = static_cast<float>(foc::uniform_real(rng, 0.0, 1.0));
  return img;
}

void bm_forward_backbone(benchmark::State& state) {
  foc::ModelConfig cfg;
  cfg.image_size = 32;
  foc::Model model = foc::build_network(cfg, 9);
  model.norm_stats() = {{0.5f, 0.5f, 0.5f}, {0.25f, 0.25f, 0.25f}};

  foc::Rng rng(3);
  const int batch = static_cast<int>(state.range(0));
  std::vector<foc::Image> images;
  for (int i = 0; i < batch; ++i) images.push_back(random_image(rng, 32));
  std::vector<const foc::Image*> ptrs;
  for (const auto& img : images) ptrs.push_back(&img);

  for (auto _ : state) benchmark::DoNotOptimize(model.forward_backbone(ptrs));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(bm_forward_backbone)->Arg(8)->Arg(32);

void bm_forward_backward(benchmark::State& state) {
  foc::ModelConfig cfg;
  cfg.image_size = 32;
  foc::Model model = foc::build_network(cfg, 9);
  model.norm_stats() = {{0.5f, 0.5f, 0.5f}, {0.25f, 0.25f, 0.25f}};

  foc::Rng rng(4);
  const int batch = static_cast<int>(state.range(0));
  std::vector<foc::Image> images;
  for (int i = 0; i < batch; ++i) images.push_back(random_image(rng, 32));
  std::vector<const foc::Image*> ptrs;
  for (const auto& img : images) ptrs.push_back(&img);

  for (auto _ : state) {
    auto feats = model.forward_backbone(ptrs);
    auto probs = model.forward_head(foc::HeadType::Normal, 0, feats);
    Eigen::MatrixXf d = Eigen::MatrixXf::Constant(probs.rows(), probs.cols(),
                                                  1.0f / probs.rows());
    auto dfeats = model.backward_head(foc::HeadType::Normal, 0, d);
    model.backward_backbone(dfeats);
    benchmark::DoNotOptimize(dfeats);
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(bm_forward_backward)->Arg(8)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
