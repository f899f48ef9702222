#include <gtest/gtest.h>

#include "dense_oracle.hpp"
#include "srpcr/operators.hpp"
#include "srpcr/problem_io.hpp"
#include "srpcr/solvers.hpp"

using namespace srpcr;

namespace {

OperatorChain make_chain(const SparseMatrix& a, Preconditioner m) {
  return OperatorChain(oracle::share(a), oracle::share(std::move(m)));
}

// Normalized M-image pairs from a short PCR run, used as deflation data.
oracle::FullBasis lanczos_basis(const OperatorChain& chain, std::size_t m, std::uint64_t seed) {
  oracle::FullBasis basis;
  PcrOptions opts;
  opts.tol = 1e-300;
  opts.max_iter = m;
  opts.observer = oracle::capture(basis);
  const Vector b = oracle::random_vector(chain.size(), seed);
  pcr_solve(chain, b, Vector(chain.size(), 0.0), opts);
  return basis;
}

double rel_err(const Eigen::MatrixXd& got, const Eigen::MatrixXd& ref) { return (got - ref).norm() / ref.norm(); }

}  // namespace

TEST(AFunc, IdentityOperators) {
  const OperatorChain chain = make_chain(gen_laplace_1d(3, 1.0), make_identity(3));
  const SparseMatrix i3 = SparseMatrix::from_triplets(3, 3, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}}, true);
  const OperatorChain id = make_chain(i3, make_identity(3));
  const Vector r{1, 2, 3};
  const AFuncResult out = a_func(id, r);
  EXPECT_EQ(out.u_hat, r);
  EXPECT_EQ(out.d_hat, r);
  EXPECT_EQ(out.v_hat, r);
  EXPECT_EQ(id.counter().snapshot().a, 1u);
  EXPECT_EQ(id.counter().snapshot().minv, 1u);
}

TEST(AFunc, DiagonalExample) {
  const SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 0, 2}, {1, 1, 2}}, true);
  const AFuncResult out = a_func(make_chain(a, make_identity(2)), Vector{1, 0});
  EXPECT_EQ(out.v_hat, (Vector{2, 0}));
  EXPECT_EQ(out.d_hat, (Vector{2, 0}));
  EXPECT_EQ(out.u_hat, (Vector{1, 0}));
}

TEST(AFunc, RandomSpdAgainstDense) {
  const SparseMatrix a = oracle::random_spd(40, 21);
  const SparseMatrix mm = oracle::random_spd(40, 22);
  const OperatorChain chain = make_chain(a, make_ic0(mm));
  const Vector r = oracle::random_vector(40, 3);
  const Eigen::VectorXd ref = oracle::dense_minv(chain.preconditioner()) * (oracle::dense(a) * oracle::to_eigen(r));
  EXPECT_LE((oracle::to_eigen(a_func(chain, r).v_hat) - ref).norm(), 1e-12 * ref.norm());
}

TEST(ModAFunc, EmptyDeflationsMatchAFunc) {
  const OperatorChain chain = make_chain(gen_laplace_2d(5), make_jacobi(gen_laplace_2d(5)));
  const Vector r = oracle::random_vector(25, 5);
  const AFuncResult p = a_func(chain, r);
  const AFuncResult q = mod_a_func(chain, r);
  EXPECT_EQ(p.u_hat, q.u_hat);
  EXPECT_EQ(p.d_hat, q.d_hat);
  EXPECT_EQ(p.v_hat, q.v_hat);
}

TEST(ModAFunc, ZeroCoefficientLeavesOutputUnchanged) {
  const SparseMatrix a = SparseMatrix::from_triplets(3, 3, {{0, 0, 1}, {1, 1, 2}, {2, 2, 3}}, true);
  const OperatorChain base = make_chain(a, make_identity(3));
  // Pair along e3; r = e1 gives A r = e1, orthogonal to v_m = e3.
  const OperatorChain chain = base.with_deflations({{Vector{0, 0, 1.0 / 3.0}, Vector{0, 0, 1}}});
  const AFuncResult out = mod_a_func(chain, Vector{1, 0, 0});
  EXPECT_EQ(out.u_hat, (Vector{1, 0, 0}));
  EXPECT_EQ(out.v_hat, (Vector{1, 0, 0}));
}

TEST(ModAFunc, NewImageIsMOrthogonalToRecycledImages) {
  const SparseMatrix a = gen_laplace_2d(8);
  const OperatorChain plain = make_chain(a, make_ic0(a));
  const std::size_t m = 12;
  const oracle::FullBasis basis = lanczos_basis(plain, m, 77);
  ASSERT_EQ(basis.u.size(), m);
  const OperatorChain chain = plain.with_deflations({{basis.u.back(), basis.v.back()}});
  // r with V^T r = 0, built densely.
  const Eigen::MatrixXd v = oracle::columns(basis.v);
  Eigen::VectorXd r = oracle::to_eigen(oracle::random_vector(64, 8));
  r -= v * v.colPivHouseholderQr().solve(r);
  ASSERT_LE((v.transpose() * r).norm(), 1e-12 * r.norm());
  const Vector r_hat = plain.preconditioner().apply_inv(oracle::from_eigen(r));
  const AFuncResult out = mod_a_func(chain, r_hat);
  const Eigen::VectorXd mv = oracle::dense_m(plain.preconditioner()) * oracle::to_eigen(out.v_hat);
  const Eigen::VectorXd gram = v.transpose() * mv;
  EXPECT_LE(gram.cwiseAbs().maxCoeff(), 1e-8 * oracle::to_eigen(out.v_hat).norm());
  // v_hat stays the exact image of u_hat.
  const Eigen::VectorXd image =
      oracle::dense_minv(plain.preconditioner()) * oracle::dense(a) * oracle::to_eigen(out.u_hat);
  EXPECT_LE((image - oracle::to_eigen(out.v_hat)).norm(), 1e-10 * image.norm());
}

TEST(ChainForward, NoPairsIsPreconditionedOperator) {
  const SparseMatrix a = gen_shifted_laplace(5, 1.0);
  const OperatorChain chain = make_chain(a, make_identity(25));
  const auto got = oracle::materialize(25, [&](const Vector& e) { return chain_forward(chain, e); });
  EXPECT_EQ(got, oracle::dense(a));
}

TEST(ChainForward, DeflatedOperatorMatchesDenseMaterialization) {
  const SparseMatrix a = gen_laplace_2d(6);
  const OperatorChain plain = make_chain(a, make_ic0(a));
  const oracle::FullBasis basis = lanczos_basis(plain, 7, 31);
  const Vector& um = basis.u.back();
  const Vector& vm = basis.v.back();
  const OperatorChain chain = plain.with_deflations({{um, vm}});

  const Eigen::MatrixXd da = oracle::dense(a);
  const Eigen::MatrixXd minv = oracle::dense_minv(plain.preconditioner());
  const Eigen::VectorXd dm = da * oracle::to_eigen(um);  // test-only d_m
  EXPECT_NEAR(dm.dot(oracle::to_eigen(vm)), 1.0, 1e-10);
  const Eigen::MatrixXd ref =
      minv * (Eigen::MatrixXd::Identity(36, 36) - dm * oracle::to_eigen(vm).transpose()) * da;
  const auto got = oracle::materialize(36, [&](const Vector& e) { return chain_forward(chain, e); });
  EXPECT_LE(rel_err(got, ref), 1e-12);

  // u_m is annihilated.
  EXPECT_LE(norm2(chain_forward(chain, um)), 1e-10 * norm2(um) * ref.norm());
}

TEST(ChainAdjoint, NoPairsIsAMinv) {
  const SparseMatrix a = gen_laplace_2d(4);
  const OperatorChain chain = make_chain(a, make_jacobi(a));
  const auto got = oracle::materialize(16, [&](const Vector& e) { return chain_adjoint(chain, e); });
  const Eigen::MatrixXd ref = oracle::dense(a) * oracle::dense_minv(chain.preconditioner());
  EXPECT_LE(rel_err(got, ref), 1e-15);
}

TEST(ChainAdjoint, PairingWithZeroOneTwoPairsAndCuts) {
  const SparseMatrix a = gen_laplace_2d(7);
  const OperatorChain plain = make_chain(a, make_ic0(a));
  const oracle::FullBasis b1 = lanczos_basis(plain, 6, 1);
  const oracle::FullBasis b2 = lanczos_basis(plain, 9, 2);
  std::vector<OperatorChain> chains{
      plain,
      plain.with_deflations({{b1.u.back(), b1.v.back()}}),
      plain.with_deflations({{b1.u.back(), b1.v.back()}, {b2.u.back(), b2.v.back()}}),
      plain.with_cuts({{b1.u.back(), b2.v.back()}}),
      plain.with_deflations({{b1.u.back(), b1.v.back()}}).with_cuts({{b2.u[3], b2.v[4]}}),
  };
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Vector w = oracle::random_vector(49, 100 * c + s);
      const Vector z = oracle::random_vector(49, 100 * c + s + 50);
      const Vector fw = chain_forward(chains[c], w);
      const Vector az = chain_adjoint(chains[c], z);
      EXPECT_LE(std::abs(dot(fw, z) - dot(w, az)), 1e-12 * norm2(fw) * norm2(z) + 1e-12 * norm2(w) * norm2(az))
          << "chain " << c;
    }
  }
}

TEST(ChainAdjoint, SinglePairAgainstDense) {
  const SparseMatrix a = gen_laplace_2d(5);
  const OperatorChain plain = make_chain(a, make_jacobi(a));
  const oracle::FullBasis basis = lanczos_basis(plain, 5, 9);
  const OperatorChain chain = plain.with_deflations({{basis.u.back(), basis.v.back()}});
  const auto fwd = oracle::materialize(25, [&](const Vector& e) { return chain_forward(chain, e); });
  const auto adj = oracle::materialize(25, [&](const Vector& e) { return chain_adjoint(chain, e); });
  EXPECT_LE(rel_err(adj, fwd.transpose()), 1e-12);
  // z = M v_m: the deflated direction contributes nothing.
  const Vector z = plain.preconditioner().apply_fwd(basis.v.back());
  const Eigen::VectorXd ref = fwd.transpose() * oracle::to_eigen(z);
  EXPECT_LE((oracle::to_eigen(chain_adjoint(chain, z)) - ref).norm(), 1e-12 * (ref.norm() + 1.0));
  EXPECT_LE(std::abs(dot(chain_adjoint(chain, z), basis.u.back())), 1e-10);
}

TEST(OperatorChain, CounterChargesOneOfEachPerApplication) {
  const SparseMatrix a = gen_laplace_2d(4);
  const OperatorChain plain = make_chain(a, make_jacobi(a));
  const oracle::FullBasis basis = lanczos_basis(plain, 4, 3);
  const OperatorChain deflated = plain.with_deflations({{basis.u[3], basis.v[3]}, {basis.u[2], basis.v[2]}})
                                     .with_cuts({{basis.u[1], basis.v[1]}})
                                     .with_counter(nullptr);
  const Vector w = oracle::random_vector(16, 5);
  for (const OperatorChain* c : {&plain, &deflated}) {
    c->counter().reset();
    chain_forward(*c, w);
    EXPECT_EQ(c->counter().snapshot().a, 1u);
    EXPECT_EQ(c->counter().snapshot().minv, 1u);
    chain_adjoint(*c, w);
    EXPECT_EQ(c->counter().snapshot().a, 2u);
    EXPECT_EQ(c->counter().snapshot().minv, 2u);
  }
}

TEST(OperatorChain, CopiesShareCounter) {
  const SparseMatrix a = gen_laplace_1d(4, 1.0);
  const OperatorChain c1 = make_chain(a, make_identity(4));
  const OperatorChain c2 = c1.with_deflations({});
  c2.apply_a(Vector(4, 1.0));
  EXPECT_EQ(c1.counter().snapshot().a, 1u);
}
