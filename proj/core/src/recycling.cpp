#include "srpcr/recycling.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "srpcr/errors.hpp"

namespace srpcr {

std::size_t RecycleBasis::total_dim() const noexcept {
  std::size_t d = 0;
  for (const auto& b : blocks) d += b.dim();
  return d;
}

std::size_t RecycleBasis::stored_columns() const noexcept {
  std::size_t c = 0;
  for (const auto& b : blocks) c += b.k() + 2;
  return c;
}

std::size_t RecycleBasis::projection_mvecs() const noexcept {
  std::size_t c = 0;
  for (const auto& b : blocks) c += 2 * b.stride();
  return c;
}

RecycleBasis build_recycle_basis(const LanczosHarvest& harvest, const OperatorChain& chain_template) {
  const std::size_t blocks = harvest.complete_blocks();
  require(blocks >= 1, ErrorKind::invalid_argument, "harvest contains no complete block");
  const std::size_t width = harvest.config.block_width();
  const std::size_t stride = harvest.config.stride;
  OperatorChain plain = chain_template.with_deflations({}).with_cuts({});

  RecycleBasis basis{{}, harvest.boundaries, {}, {}, plain};
  basis.boundaries.resize(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    OperatorChain chain = plain;
    long cut = -1;
    if (b > 0) {
      const BlockBoundary& prev = harvest.boundaries[b - 1];
      chain = plain.with_cuts({CutPair{prev.u, prev.z}});
      cut = static_cast<long>(b - 1);
    }
    basis.blocks.push_back(make_short_representation(
        harvest.strided_columns[b], harvest.t.section(b * width, width), stride, std::move(chain)));
    basis.block_cut.push_back(cut);
  }
  // Keep only what the ledger counts: (u, z) for inner blocks, (u, v) for the last.
  for (std::size_t b = 0; b + 1 < blocks; ++b) basis.boundaries[b].v.clear();
  basis.boundaries.back().z.clear();
  basis.post_pairs.push_back({basis.boundaries.back().u, basis.boundaries.back().v});
  return basis;
}

RecycleBasis merge_recycle_bases(RecycleBasis first, const RecycleBasis& second) {
  require(first.chain_template.size() == second.chain_template.size(),
          ErrorKind::dimension_mismatch, "merged bases differ in dimension");
  const long offset = static_cast<long>(first.boundaries.size());
  for (std::size_t b = 0; b < second.blocks.size(); ++b) {
    ShortRepresentation rep = second.blocks[b];
    rep.chain = rep.chain.with_counter(first.chain_template.counter_ptr());
    first.blocks.push_back(std::move(rep));
    const long cut = second.block_cut[b];
    first.block_cut.push_back(cut < 0 ? -1 : cut + offset);
  }
  first.boundaries.insert(first.boundaries.end(), second.boundaries.begin(), second.boundaries.end());
  // Pairs from different runs are not M-orthogonal in general. Orthonormalize
  // the images in the M inner product (same combination on u keeps v = M^{-1}A u)
  // so one coefficient per pair removes each deflated direction exactly.
  const Preconditioner& m = first.chain_template.preconditioner();
  for (DeflationPair p : second.post_pairs) {
    for (int pass = 0; pass < 2; ++pass) {
      const Vector mv = m.apply_fwd(p.v);
      for (const auto& q : first.post_pairs) {
        const double c = dot(q.v, mv);
        axpy_inplace(-c, q.v, p.v);
        axpy_inplace(-c, q.u, p.u);
      }
    }
    const double nrm = std::sqrt(dot(p.v, m.apply_fwd(p.v)));
    require(nrm > 1e-12, ErrorKind::invalid_argument, "merged deflation pairs are linearly dependent");
    scale_inplace(1.0 / nrm, p.v);
    scale_inplace(1.0 / nrm, p.u);
    first.post_pairs.push_back(std::move(p));
  }
  return first;
}

CostLedger cost_ledger(const RecycleBasis& basis) {
  return {basis.stored_columns(), basis.projection_mvecs()};
}

CostLedger cost_ledger(std::size_t blocks, std::size_t k, std::size_t stride) {
  return {blocks * (k + 2), 2 * blocks * stride};
}

void recycle_project_inplace(const ShortRepresentation& block, Vector& x, Vector& r, Vector& r_hat) {
  const OperatorChain& chain = block.chain;
  check_same_size(x.size(), chain.size(), "recycle_project x");
  check_same_size(r.size(), chain.size(), "recycle_project r");
  Vector w = chain.apply_a(r_hat);
  Vector s = apply_u(block, apply_uh(block, w));
  axpy_inplace(1.0, s, x);
  axpy_inplace(-1.0, chain.apply_a(s), r);
  r_hat = chain.apply_minv(r);
}

ProjectionResult recycle_project(const ShortRepresentation& block, std::span<const double> x,
                                 std::span<const double> r) {
  ProjectionResult out{Vector(x.begin(), x.end()), Vector(r.begin(), r.end())};
  Vector r_hat = block.chain.apply_minv(r);
  recycle_project_inplace(block, out.x, out.r, r_hat);
  return out;
}

SrpcrResult srpcr_ap_solve(const RecycleBasis& basis, std::span<const double> b,
                           std::span<const double> x0, const SrpcrOptions& opt) {
  const OperatorChain& chain = basis.chain_template;
  const std::size_t n = chain.size();
  check_same_size(b.size(), n, "srpcr rhs");
  check_same_size(x0.size(), n, "srpcr initial guess");
  MvecCounter& counter = chain.counter();
  const MvecCount start = counter.snapshot();

  SrpcrResult out;
  RecycleReport& rec = out.recycle;
  Vector x(x0.begin(), x0.end());
  const bool zero_start = std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
  Vector r = zero_start ? Vector(b.begin(), b.end()) : axpy(-1.0, chain.apply_a(x), b);
  Vector r_hat = chain.apply_minv(r);
  double res = std::sqrt(std::max(0.0, dot(r, r_hat)));
  double reference = res;
  if (!zero_start) {
    Vector mb = chain.apply_minv(b);
    reference = std::sqrt(std::max(0.0, dot(b, mb)));
  }
  const MvecCount after_init = counter.snapshot();
  rec.initial_mvec_a = after_init.a - start.a;
  rec.projection_history.push_back(res);
  rec.projection_mvec_trace.push_back(rec.initial_mvec_a);

  for (const auto& block : basis.blocks) {
    recycle_project_inplace(block, x, r, r_hat);
    const double next = std::sqrt(std::max(0.0, dot(r, r_hat)));
    if (next > res * (1.0 + opt.collapse_slack)) {
      fail(ErrorKind::orthogonality_collapse,
           "block projection increased the residual norm (block " +
               std::to_string(rec.blocks_applied + 1) + ")");
    }
    res = next;
    ++rec.blocks_applied;
    rec.projection_history.push_back(res);
    rec.projection_mvec_trace.push_back(counter.snapshot().a - start.a);
  }
  const MvecCount after_projection = counter.snapshot();
  rec.projection_mvec_a = after_projection.a - after_init.a;
  rec.projection_mvec_minv = after_projection.minv - start.minv;

  // Restore r_hat orthogonal to each deflated image (residual-optimal step
  // along u_m); the post operator drops the right factor and relies on it.
  for (const auto& p : basis.post_pairs) {
    const double c = dot(p.v, r);
    axpy_inplace(c, p.u, x);
    axpy_inplace(-c, p.v, r_hat);
    axpy_inplace(-c, chain.preconditioner().apply_fwd(p.v), r);
  }

  PcrOptions post;
  post.tol = opt.tol;
  post.max_iter = opt.max_post_iter;
  post.initial_residual = std::move(r);
  post.initial_rhat = std::move(r_hat);
  post.reference_norm = reference;
  post.observer = opt.observer;
  PcrResult pr = pcr_solve(chain.with_deflations(basis.post_pairs), b, x, post);

  rec.post_iterations = pr.report.iterations;
  rec.post_history = pr.report.residual_history;

  SolveReport& rep = out.report;
  rep = std::move(pr.report);
  rep.residual_history = rec.projection_history;
  rep.residual_history.insert(rep.residual_history.end(), rec.post_history.begin(),
                              rec.post_history.end());
  rep.reference_norm = reference;
  const MvecCount end = counter.snapshot();
  rep.mvec_a = end.a - start.a;
  rep.mvec_minv = end.minv - start.minv;
  return out;
}

namespace {

constexpr std::array<char, 8> kMagic{'S', 'R', 'P', 'C', 'R', 'A', 'R', 'C'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(buf, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) fail(ErrorKind::parse_error, "truncated archive");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

void put_doubles(std::ostream& out, std::span<const double> xs) {
  put_u64(out, xs.size());
  for (double x : xs) put_u64(out, std::bit_cast<std::uint64_t>(x));
}

Vector get_doubles(std::istream& in, std::size_t max_len) {
  const std::uint64_t len = get_u64(in);
  if (len > max_len) fail(ErrorKind::parse_error, "archive vector length out of range");
  Vector xs(len);
  for (auto& x : xs) x = std::bit_cast<double>(get_u64(in));
  return xs;
}

}  // namespace

void write_recycle_basis(const RecycleBasis& basis, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  const std::uint32_t version = kVersion;
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((version >> (8 * i)) & 0xffu));
  put_u64(out, basis.chain_template.size());
  put_u64(out, basis.blocks.size());
  for (std::size_t b = 0; b < basis.blocks.size(); ++b) {
    const auto& rep = basis.blocks[b];
    put_u64(out, rep.k());
    put_u64(out, rep.stride());
    put_u64(out, static_cast<std::uint64_t>(basis.block_cut[b] + 1));
    put_doubles(out, rep.t_block.alpha);
    put_doubles(out, rep.t_block.beta);
    for (const auto& u : rep.u_tilde) put_doubles(out, u);
  }
  put_u64(out, basis.boundaries.size());
  for (const auto& bd : basis.boundaries) {
    put_doubles(out, bd.u);
    put_doubles(out, bd.v);
    put_doubles(out, bd.z);
  }
  put_u64(out, basis.post_pairs.size());
  for (const auto& p : basis.post_pairs) {
    put_doubles(out, p.u);
    put_doubles(out, p.v);
  }
  if (!out) fail(ErrorKind::io_error, "archive write failed");
}

RecycleBasis read_recycle_basis(std::istream& in, const OperatorChain& chain_template) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    fail(ErrorKind::parse_error, "not a recycle basis archive");
  }
  std::uint32_t version = 0;
  for (int i = 0; i < 4; ++i) {
    const int c = in.get();
    if (c == EOF) fail(ErrorKind::parse_error, "truncated archive");
    version |= static_cast<std::uint32_t>(c) << (8 * i);
  }
  if (version != kVersion) fail(ErrorKind::parse_error, "unsupported archive version " + std::to_string(version));
  const std::size_t n = get_u64(in);
  if (n != chain_template.size()) fail(ErrorKind::dimension_mismatch, "archive dimension differs from A");
  OperatorChain plain = chain_template.with_deflations({}).with_cuts({});
  RecycleBasis basis{{}, {}, {}, {}, plain};

  const std::size_t blocks = get_u64(in);
  struct Pending {
    std::vector<Vector> u_tilde;
    Tridiagonal t;
    std::size_t stride;
  };
  std::vector<Pending> pending;
  for (std::size_t b = 0; b < blocks; ++b) {
    Pending p;
    const std::size_t k = get_u64(in);
    p.stride = get_u64(in);
    if (k == 0 || p.stride == 0 || k > n || p.stride > n) fail(ErrorKind::parse_error, "bad block shape");
    basis.block_cut.push_back(static_cast<long>(get_u64(in)) - 1);
    p.t.alpha = get_doubles(in, k * p.stride);
    p.t.beta = get_doubles(in, k * p.stride);
    for (std::size_t i = 0; i < k; ++i) p.u_tilde.push_back(get_doubles(in, n));
    pending.push_back(std::move(p));
  }
  const std::size_t nb = get_u64(in);
  if (nb != blocks) fail(ErrorKind::parse_error, "boundary count differs from block count");
  for (std::size_t b = 0; b < nb; ++b) {
    BlockBoundary bd;
    bd.u = get_doubles(in, n);
    bd.v = get_doubles(in, n);
    bd.z = get_doubles(in, n);
    basis.boundaries.push_back(std::move(bd));
  }
  const std::size_t np = get_u64(in);
  for (std::size_t p = 0; p < np; ++p) {
    DeflationPair pair;
    pair.u = get_doubles(in, n);
    pair.v = get_doubles(in, n);
    basis.post_pairs.push_back(std::move(pair));
  }
  for (std::size_t b = 0; b < blocks; ++b) {
    OperatorChain chain = plain;
    const long cut = basis.block_cut[b];
    if (cut >= 0) {
      if (static_cast<std::size_t>(cut) >= nb) fail(ErrorKind::parse_error, "bad cut index");
      const auto& bd = basis.boundaries[static_cast<std::size_t>(cut)];
      chain = plain.with_cuts({CutPair{bd.u, bd.z}});
    }
    basis.blocks.push_back(make_short_representation(std::move(pending[b].u_tilde),
                                                     std::move(pending[b].t), pending[b].stride,
                                                     std::move(chain)));
  }
  return basis;
}

}  // namespace srpcr
