#include "srpcr/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace srpcr {

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::tolerance_met: return "tolerance-met";
    case Termination::max_iter: return "max-iter";
    case Termination::breakdown: return "breakdown";
  }
  return "unknown";
}

void HarvestConfig::validate() const {
  require(stride >= 1 && columns >= 1 && blocks >= 1, ErrorKind::invalid_argument,
          "harvest needs J >= 1, k >= 1, l >= 1");
}

namespace {

bool is_zero(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
}

void check_scalar(double s, const char* what) {
  if (!std::isfinite(s)) fail(ErrorKind::numerical_breakdown, std::string("non-finite ") + what);
}

// Collects strided columns, T entries and block boundaries while PCR runs.
class Harvester {
 public:
  explicit Harvester(const HarvestConfig& cfg) : cfg_(cfg) {
    out_.config = cfg;
    out_.strided_columns.resize(cfg.blocks);
  }

  bool complete() const { return out_.boundaries.size() == cfg_.blocks; }

  // Column c = j + 1 (1-based) of U and V, plus T entries alpha_j, beta_{j+1}
  // (present for j >= 1).
  void record(std::size_t j, const Vector& u_col, const Vector& v_col,
              std::optional<std::pair<double, double>> t_entries) {
    const std::size_t m = cfg_.limit();
    const std::size_t width = cfg_.block_width();
    if (t_entries && j <= m) {
      out_.t.alpha.push_back(t_entries->first);
      out_.t.beta.push_back(t_entries->second);
      // Column j closed a block: z_j = beta_j v_{j-1} + alpha_j v_j + beta_{j+1} v_{j+1}.
      if (j % width == 0) {
        BlockBoundary& bd = pending_;
        bd.z = v_col;
        scale_inplace(t_entries->second, bd.z);
        axpy_inplace(t_entries->first, v_last_, bd.z);
        if (j >= 2) axpy_inplace(out_.t.beta[j - 2], v_before_last_, bd.z);
        out_.boundaries.push_back(std::move(bd));
        pending_ = BlockBoundary{};
      }
    }
    const std::size_t c = j + 1;
    if (c <= m) {
      const std::size_t block = (c - 1) / width;
      const std::size_t pos = (c - 1) % width;
      if (pos % cfg_.stride == 0) out_.strided_columns[block].push_back(u_col);
      if (c % width == 0) {
        pending_.u = u_col;
        pending_.v = v_col;
      }
    }
    v_before_last_ = std::move(v_last_);
    v_last_ = v_col;
  }

  LanczosHarvest finish() && {
    const std::size_t blocks = out_.boundaries.size();
    out_.strided_columns.resize(blocks);
    const std::size_t keep = blocks * cfg_.block_width();
    out_.t.alpha.resize(std::min(out_.t.alpha.size(), keep));
    out_.t.beta.resize(std::min(out_.t.beta.size(), keep));
    return std::move(out_);
  }

 private:
  HarvestConfig cfg_;
  LanczosHarvest out_;
  BlockBoundary pending_;
  Vector v_last_;
  Vector v_before_last_;
};

}  // namespace

PcrResult pcr_solve(const OperatorChain& chain, std::span<const double> b,
                    std::span<const double> x0, const PcrOptions& opt) {
  const std::size_t n = chain.size();
  check_same_size(b.size(), n, "pcr_solve rhs");
  check_same_size(x0.size(), n, "pcr_solve initial guess");
  require(opt.tol > 0.0, ErrorKind::invalid_argument, "tol must be positive");
  std::optional<Harvester> harvester;
  if (opt.harvest) {
    opt.harvest->validate();
    harvester.emplace(*opt.harvest);
  }
  const MvecCount start = chain.counter().snapshot();

  SolveReport rep;
  rep.x.assign(x0.begin(), x0.end());
  const bool zero_start = is_zero(x0);
  Vector& r = rep.r;
  if (opt.initial_residual) {
    check_same_size(opt.initial_residual->size(), n, "initial residual");
    r = *opt.initial_residual;
  } else if (zero_start) {
    r.assign(b.begin(), b.end());
  } else {
    r = axpy(-1.0, chain.apply_a(x0), b);
  }
  Vector r_hat = opt.initial_rhat ? *opt.initial_rhat : chain.apply_minv(r);
  check_same_size(r_hat.size(), n, "initial preconditioned residual");

  double res = std::sqrt(std::max(0.0, dot(r, r_hat)));
  if (opt.reference_norm) {
    rep.reference_norm = *opt.reference_norm;
  } else if (zero_start && !opt.initial_residual) {
    rep.reference_norm = res;
  } else {
    Vector mb = chain.apply_minv(b);
    rep.reference_norm = std::sqrt(std::max(0.0, dot(b, mb)));
  }
  rep.residual_history.push_back(res);
  rep.rhat_norm_history.push_back(norm2(r_hat));

  const bool deflated = !chain.deflations().empty();
  std::vector<Vector> d_m;  // M v_m, working storage for the r recurrence
  for (const auto& p : chain.deflations()) d_m.push_back(chain.preconditioner().apply_fwd(p.v));

  const double threshold = opt.tol * rep.reference_norm;
  double tau = 1.0;
  double eta = 0.0;
  Vector u(n, 0.0), v(n, 0.0), d(n, 0.0);

  for (std::size_t j = 0;; ++j) {
    const bool met = res <= threshold;
    if (met && !rep.converged_at) rep.converged_at = j;
    const bool harvest_pending =
        harvester && opt.continue_until_harvest && !harvester->complete();
    if (met && !harvest_pending) {
      rep.termination = Termination::tolerance_met;
      break;
    }
    if (j >= opt.max_iter) {
      rep.termination = met ? Termination::tolerance_met : Termination::max_iter;
      break;
    }

    AFuncResult af = deflated ? mod_a_func(chain, r_hat) : a_func(chain, r_hat);
    // A u_hat = d_hat - sum gamma d_m
    Vector d_u = af.d_hat;
    for (std::size_t p = 0; p < d_m.size(); ++p) {
      axpy_inplace(-dot(chain.deflations()[p].v, af.d_hat), d_m[p], d_u);
    }
    const double xi = dot(af.d_hat, v);
    const double c = xi / tau;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = af.u_hat[i] - c * u[i];
      v[i] = af.v_hat[i] - c * v[i];
      d[i] = d_u[i] - c * d[i];
    }
    const double tau_hat = dot(af.d_hat, v);
    const double theta = tau_hat + xi * c;
    check_scalar(tau_hat, "tau_hat");
    if (!(tau_hat > 0.0)) {
      rep.termination = met ? Termination::tolerance_met : Termination::breakdown;
      if (!met) rep.error = ErrorKind::breakdown;
      break;
    }
    std::optional<std::pair<double, double>> t_entries;
    if (j >= 1) {
      t_entries.emplace((tau - xi) / eta, -std::sqrt(tau * tau_hat) / eta);
      check_scalar(t_entries->first, "alpha");
      check_scalar(t_entries->second, "beta");
    }
    if (harvester || opt.observer) {
      const double s = 1.0 / std::sqrt(tau_hat);
      Vector u_col = u, v_col = v;
      scale_inplace(s, u_col);
      scale_inplace(s, v_col);
      if (opt.observer) opt.observer(IterationView{j, u_col, v_col, theta});
      if (harvester) harvester->record(j, u_col, v_col, t_entries);
    }

    eta = dot(af.d_hat, r_hat);
    check_scalar(eta, "eta");
    if (eta == 0.0) {
      rep.termination = met ? Termination::tolerance_met : Termination::breakdown;
      if (!met) rep.error = ErrorKind::breakdown;
      break;
    }
    tau = tau_hat;
    const double step = eta / tau;
    axpy_inplace(step, u, rep.x);
    axpy_inplace(-step, v, r_hat);
    axpy_inplace(-step, d, r);
    res = std::sqrt(std::max(0.0, dot(r, r_hat)));
    ++rep.iterations;
    rep.residual_history.push_back(res);
    rep.rhat_norm_history.push_back(norm2(r_hat));
    rep.theta_history.push_back(theta);
  }

  const MvecCount end = chain.counter().snapshot();
  rep.mvec_a = end.a - start.a;
  rep.mvec_minv = end.minv - start.minv;
  PcrResult out{std::move(rep), std::nullopt};
  if (harvester) out.harvest = std::move(*harvester).finish();
  return out;
}

PcrResult pcr_solve(const OperatorChain& chain, std::span<const double> b,
                    std::span<const double> x0, double tol, std::size_t max_iter,
                    std::optional<HarvestConfig> harvest) {
  PcrOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  opt.harvest = harvest;
  return pcr_solve(chain, b, x0, opt);
}

SolveReport pminres_solve(const OperatorChain& chain, std::span<const double> b,
                          std::span<const double> x0, double tol, std::size_t max_iter) {
  const std::size_t n = chain.size();
  check_same_size(b.size(), n, "pminres rhs");
  check_same_size(x0.size(), n, "pminres initial guess");
  require(tol > 0.0, ErrorKind::invalid_argument, "tol must be positive");
  const MvecCount start = chain.counter().snapshot();

  SolveReport rep;
  rep.x.assign(x0.begin(), x0.end());
  const bool zero_start = is_zero(x0);
  Vector r1 = zero_start ? Vector(b.begin(), b.end()) : axpy(-1.0, chain.apply_a(x0), b);
  Vector y = chain.apply_minv(r1);
  const double ry = dot(r1, y);
  if (ry < 0.0) fail(ErrorKind::not_spd, "preconditioner is not positive definite");
  const double beta1 = std::sqrt(ry);
  if (zero_start) {
    rep.reference_norm = beta1;
  } else {
    Vector mb = chain.apply_minv(b);
    rep.reference_norm = std::sqrt(std::max(0.0, dot(b, mb)));
  }
  rep.residual_history.push_back(beta1);
  const double threshold = tol * rep.reference_norm;

  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  Vector r2 = r1;
  Vector w(n, 0.0), w1(n, 0.0), w2(n, 0.0), v(n);
  const double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t itn = 0;; ++itn) {
    if (phibar <= threshold || beta == 0.0) {
      rep.termination = Termination::tolerance_met;
      rep.converged_at = itn;
      break;
    }
    if (itn >= max_iter) {
      rep.termination = Termination::max_iter;
      break;
    }
    const double s = 1.0 / beta;
    for (std::size_t i = 0; i < n; ++i) v[i] = s * y[i];
    y = chain.apply_a(v);
    if (itn >= 1) axpy_inplace(-beta / oldb, r1, y);
    const double alfa = dot(v, y);
    axpy_inplace(-alfa / beta, r2, y);
    r1 = std::move(r2);
    r2 = y;
    y = chain.apply_minv(r2);
    oldb = beta;
    const double b2 = dot(r2, y);
    if (b2 < 0.0) fail(ErrorKind::not_spd, "preconditioner is not positive definite");
    beta = std::sqrt(b2);

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), eps);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    check_scalar(phi, "minres coefficient");

    std::swap(w1, w2);  // w1 <- old w2
    std::swap(w2, w);   // w2 <- old w
    for (std::size_t i = 0; i < n; ++i) w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
    axpy_inplace(phi, w, rep.x);
    ++rep.iterations;
    rep.residual_history.push_back(std::abs(phibar));
  }

  const MvecCount end = chain.counter().snapshot();
  rep.mvec_a = end.a - start.a;
  rep.mvec_minv = end.minv - start.minv;
  return rep;
}

SolveReport pminres_solve(const SparseMatrix& a, const Preconditioner& m,
                          std::span<const double> b, std::span<const double> x0, double tol,
                          std::size_t max_iter) {
  // Non-owning handles; the chain does not outlive this call.
  std::shared_ptr<const SparseMatrix> ap(&a, [](const SparseMatrix*) {});
  std::shared_ptr<const Preconditioner> mp(&m, [](const Preconditioner*) {});
  return pminres_solve(OperatorChain(ap, mp), b, x0, tol, max_iter);
}

}  // namespace srpcr
