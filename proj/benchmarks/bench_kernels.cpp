#include <benchmark/benchmark.h>

#include "srpcr/problem_io.hpp"
#include "srpcr/recycling.hpp"
#include "srpcr/sequences.hpp"

using namespace srpcr;

namespace {

std::shared_ptr<const SparseMatrix> laplace(std::size_t n) { return std::make_shared<const SparseMatrix>(gen_laplace_2d(n)); }

void BM_Spmv(benchmark::State& state) {
  const auto a = laplace(static_cast<std::size_t>(state.range(0)));
  const Vector x(a->rows(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(spmv(*a, x));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(a->nnz()));
}
BENCHMARK(BM_Spmv)->Arg(64)->Arg(256);

void BM_Ic0Apply(benchmark::State& state) {
  const auto a = laplace(static_cast<std::size_t>(state.range(0)));
  const Preconditioner m = make_ic0(*a);
  const Vector x(a->rows(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(m.apply_inv(x));
}
BENCHMARK(BM_Ic0Apply)->Arg(64)->Arg(256);

void BM_PcrSolve(benchmark::State& state) {
  const auto a = laplace(static_cast<std::size_t>(state.range(0)));
  OperatorChain chain(a, std::make_shared<const Preconditioner>(make_ic0(*a)));
  const Vector b = ones_image(*a);
  const Vector x0(a->rows(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(pcr_solve(chain, b, x0, 1e-8, 5000));
}
BENCHMARK(BM_PcrSolve)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_PminresSolve(benchmark::State& state) {
  const auto a = laplace(static_cast<std::size_t>(state.range(0)));
  const Preconditioner m = make_ic0(*a);
  const Vector b = ones_image(*a);
  const Vector x0(a->rows(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(pminres_solve(*a, m, b, x0, 1e-8, 5000));
}
BENCHMARK(BM_PminresSolve)->Arg(64)->Unit(benchmark::kMillisecond);

// One full projection phase of a (2, 8, 6) basis, then the post-iterations.
void BM_RecycleProjection(benchmark::State& state) {
  const auto a = laplace(64);
  auto m = std::make_shared<const Preconditioner>(make_ic0(*a));
  OperatorChain chain(a, m);
  const auto seq = gen_sequence(SequenceKind::b, *a, *m, ones_image(*a), 2);
  const Vector x0(a->rows(), 0.0);
  const PcrResult first = pcr_solve(chain, seq.vectors[0], x0, 1e-8, 2000, HarvestConfig{6, 8, 2});
  const RecycleBasis basis = build_recycle_basis(*first.harvest, chain);
  const Vector b_hat = m->apply_inv(seq.vectors[1]);
  for (auto _ : state) {
    Vector x = x0, r = seq.vectors[1], r_hat = b_hat;
    for (const auto& block : basis.blocks) recycle_project_inplace(block, x, r, r_hat);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_RecycleProjection)->Unit(benchmark::kMicrosecond);

void BM_SrpcrApSolve(benchmark::State& state) {
  const auto a = laplace(64);
  auto m = std::make_shared<const Preconditioner>(make_ic0(*a));
  OperatorChain chain(a, m);
  const auto seq = gen_sequence(SequenceKind::b, *a, *m, ones_image(*a), 2);
  const Vector x0(a->rows(), 0.0);
  const PcrResult first = pcr_solve(chain, seq.vectors[0], x0, 1e-8, 2000, HarvestConfig{6, 8, 2});
  const RecycleBasis basis = build_recycle_basis(*first.harvest, chain);
  for (auto _ : state) benchmark::DoNotOptimize(srpcr_ap_solve(basis, seq.vectors[1], x0, SrpcrOptions{}));
}
BENCHMARK(BM_SrpcrApSolve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
