#include "srpcr/operators.hpp"

#include <cassert>
#include <cmath>

#include "srpcr/errors.hpp"

namespace srpcr {

OperatorChain::OperatorChain(std::shared_ptr<const SparseMatrix> a,
                             std::shared_ptr<const Preconditioner> m,
                             std::shared_ptr<MvecCounter> counter)
    : a_(std::move(a)), m_(std::move(m)), counter_(std::move(counter)) {
  require(a_ != nullptr && m_ != nullptr, ErrorKind::invalid_argument, "operator chain needs A and M");
  require(a_->rows() == a_->cols(), ErrorKind::dimension_mismatch, "A must be square");
  check_same_size(a_->rows(), m_->size(), "A and M");
  if (!counter_) counter_ = std::make_shared<MvecCounter>();
}

OperatorChain OperatorChain::with_deflations(std::vector<DeflationPair> pairs) const {
  for (const auto& p : pairs) {
    check_same_size(p.u.size(), size(), "deflation pair");
    check_same_size(p.v.size(), size(), "deflation pair");
  }
  OperatorChain c = *this;
  c.deflations_ = std::move(pairs);
  return c;
}

OperatorChain OperatorChain::with_cuts(std::vector<CutPair> cuts) const {
  for (const auto& p : cuts) {
    check_same_size(p.u.size(), size(), "cut pair");
    check_same_size(p.z.size(), size(), "cut pair");
  }
  OperatorChain c = *this;
  c.cuts_ = std::move(cuts);
  return c;
}

OperatorChain OperatorChain::with_counter(std::shared_ptr<MvecCounter> counter) const {
  OperatorChain c = *this;
  c.counter_ = counter ? std::move(counter) : std::make_shared<MvecCounter>();
  return c;
}

Vector OperatorChain::apply_a(std::span<const double> x) const {
  Vector y = spmv(*a_, x);
  counter_->add_a();
  return y;
}

Vector OperatorChain::apply_minv(std::span<const double> x) const {
  Vector y = m_->apply_inv(x);
  if (!all_finite(y)) fail(ErrorKind::numerical_breakdown, "preconditioner produced a non-finite value");
  counter_->add_minv();
  return y;
}

AFuncResult a_func(const OperatorChain& chain, std::span<const double> r_hat) {
  check_same_size(r_hat.size(), chain.size(), "a_func");
  AFuncResult out;
  out.u_hat.assign(r_hat.begin(), r_hat.end());
  out.d_hat = chain.apply_a(r_hat);
  out.v_hat = chain.apply_minv(out.d_hat);
  return out;
}

AFuncResult mod_a_func(const OperatorChain& chain, std::span<const double> r_hat) {
  AFuncResult out = a_func(chain, r_hat);
  for (const auto& p : chain.deflations()) {
    const double gamma = dot(p.v, out.d_hat);
#ifndef NDEBUG
    // <d_m, r_hat> = <u_m, d_hat> must vanish for the dropped factor to be exact.
    const double lhs = std::abs(dot(p.u, out.d_hat));
    assert(lhs <= 1e-6 * norm2(p.u) * norm2(out.d_hat) + 1e-300);
#endif
    axpy_inplace(-gamma, p.v, out.v_hat);
    axpy_inplace(-gamma, p.u, out.u_hat);
  }
  return out;
}

Vector chain_forward(const OperatorChain& chain, std::span<const double> w) {
  check_same_size(w.size(), chain.size(), "chain_forward");
  Vector d = chain.apply_a(w);
  Vector out = chain.apply_minv(d);
  for (const auto& p : chain.deflations()) axpy_inplace(-dot(p.v, d), p.v, out);
  for (const auto& c : chain.cuts()) axpy_inplace(-dot(c.z, d), c.u, out);
  return out;
}

Vector chain_adjoint(const OperatorChain& chain, std::span<const double> z) {
  check_same_size(z.size(), chain.size(), "chain_adjoint");
  Vector w = chain.apply_minv(z);
  for (const auto& p : chain.deflations()) axpy_inplace(-dot(p.v, z), p.v, w);
  for (const auto& c : chain.cuts()) axpy_inplace(-dot(c.u, z), c.z, w);
  return chain.apply_a(w);
}

}  // namespace srpcr
