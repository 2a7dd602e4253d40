//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Serial reference kernels against their OpenMP counterparts. Thread count
// follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "retrograph/center/center.hpp"
#include "retrograph/numcore/batch.hpp"
#include "retrograph/numcore/kernels.hpp"
#include "retrograph/numcore/tape.hpp"
#include "retrograph/pipeline/dataset.hpp"

namespace {

using namespace retrograph;
using numcore::Tensor2;

Tensor2 random_tensor(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  numcore::Rng rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor2 t(rows, cols);
  for (auto& v : t.data()) v = u(rng);
  return t;
}

template <void (*Kernel)(const Tensor2&, const Tensor2&, Tensor2&)>
void bm_matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor2 a = random_tensor(n, n, 1);
  const Tensor2 b = random_tensor(n, n, 2);
  Tensor2 out(n, n);
  for (auto _ : state) {
    Kernel(a, b, out);
    benchmark::DoNotOptimize(out.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

template <void (*Kernel)(const Tensor2&, const Tensor2&, Tensor2&)>
void bm_matmul_tn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor2 a = random_tensor(n, n, 3);
  const Tensor2 b = random_tensor(n, n, 4);
  Tensor2 out(n, n);
  for (auto _ : state) {
    Kernel(a, b, out);
    benchmark::DoNotOptimize(out.data().data());
  }
}

BENCHMARK(bm_matmul<numcore::kernels::matmul_serial>)->Name("matmul/serial")->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(bm_matmul<numcore::kernels::matmul>)->Name("matmul/openmp")->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(bm_matmul_tn<numcore::kernels::matmul_tn_acc_serial>)->Name("matmul_tn_acc/serial")->Arg(256);
BENCHMARK(bm_matmul_tn<numcore::kernels::matmul_tn_acc>)->Name("matmul_tn_acc/openmp")->Arg(256);

struct CenterBatch {
  numcore::ParameterStore store;
  center::CenterModel model;
  std::vector<center::CenterExample> examples;
};

const CenterBatch& center_batch() {
  static const CenterBatch batch = [] {
    CenterBatch b;
    const auto ds = pipeline::ingest(RETROGRAPH_SOURCE_DIR "/data/desk_corpus.tsv", 1);
    numcore::Rng rng(7);
    center::CenterConfig cfg;
    cfg.encoder = {3, 64};
    b.model = center::CenterModel(b.store, ds.elements, cfg, rng);
    for (const auto& e : ds.entries) {
      b.examples.push_back(center::make_example(e.reaction, ds.elements, false));
    }
    return b;
  }();
  return batch;
}

template <double (*Accumulate)(const numcore::ParameterStore&, std::size_t,
                               const numcore::ExampleFn&, numcore::Gradients&)>
void bm_center_batch(benchmark::State& state) {
  const auto& b = center_batch();
  const auto count = static_cast<std::size_t>(state.range(0));
  numcore::Gradients grads(b.store);
  for (auto _ : state) {
    grads.zero();
    const double loss = Accumulate(
        b.store, count,
        [&](std::size_t i, numcore::Gradients& g) {
          const auto& ex = b.examples[i % b.examples.size()];
          numcore::Tape tape(b.store);
          const auto l = b.model.loss(tape, ex.product, ex.labels, ex.reaction_class);
          tape.backward(l, g);
          return tape.scalar(l);
        },
        grads);
    benchmark::DoNotOptimize(loss);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(count));
}

BENCHMARK(bm_center_batch<numcore::accumulate_batch_serial>)->Name("center_batch/serial")->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_center_batch<numcore::accumulate_batch>)->Name("center_batch/openmp")->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
