#pragma once

// Boundary determination: mu from the principal DN symbol q1 and d_n mu from
// q0, by inverting the forward formulas.  Everything runs on jets, so
// tangential derivatives of the recovered trace come for free.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "stokesdn/factorization.hpp"

namespace stokesdn {

class RecoveryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// q1 at one frequency; entries are joint (x, xi') jets, only the x' part is used.
struct Q1Sample {
  std::vector<double> xi;
  CJetMat q1;
};

struct TFit {
  RJet t;               // x'-jet of t = mu^{-1} (mu + rho)^{1/2} in the joint space
  double max_factor = 0.0;
  double misfit = 0.0;  // relative least-squares residual
};

inline std::vector<bool> tangential_mask(int nv, int n) {
  std::vector<bool> keep(nv, false);
  for (int a = 0; a < n - 1; ++a) keep[a] = true;
  return keep;
}

// Geometry-only context: the viscosity is irrelevant for the factors.
inline SymbolContext geometry_context(const MetricField& metric, const CotangentSample& s, int order) {
  check_sample(s);
  Coords xc = coordinate_jets(JetSpace::get(s.x.dim()), s.x, order);
  return make_context(metric, RJet(1.0), 0.0, s, xc);
}

// Least squares of the column entries of q1 - sqrt(g xi xi) I against the
// geometric factors 2i Gamma^j_{bn} g^{ba} xi_a + Theta_j, over all samples.
inline TFit fit_t_from_q1(const std::vector<Q1Sample>& samples, const MetricField& metric, const Point& x) {
  if (samples.empty()) throw RecoveryError("no q1 samples");
  const int n = x.dim(), F = n;
  RJet num, den;
  double yy = 0.0, maxf = 0.0;
  std::vector<cplx> phis, ys;
  std::vector<bool> keep;
  for (const auto& smp : samples) {
    const int order = smp.q1(0, 0).exact() ? 1 : smp.q1(0, 0).order() + 1;
    SymbolContext c = geometry_context(metric, CotangentSample{x, smp.xi}, order);
    PrincipalParts p = principal_parts(c);
    if (keep.empty()) keep = tangential_mask(c.zs->nv(), n);
    for (int j = 0; j < n; ++j) {
      CJet phi = restrict_to(p.A2(j, F), keep), y = restrict_to(smp.q1(j, F), keep);
      maxf = std::max(maxf, std::abs(phi.value()));
      num += real_part(conj(phi) * y);
      den += real_part(conj(phi) * phi);
      yy += std::norm(y.value());
      phis.push_back(phi.value());
      ys.push_back(y.value());
    }
  }
  if (maxf < 1e-12) throw RecoveryError("indeterminate at this point");
  TFit f;
  f.t = num / den;
  f.max_factor = maxf;
  double r = 0.0;
  for (size_t i = 0; i < phis.size(); ++i) r += std::norm(ys[i] - f.t.value() * phis[i]);
  f.misfit = yy > 0.0 ? std::sqrt(r / yy) : std::sqrt(r);
  return f;
}

// Positive root of t^2 mu^2 - mu - rho = 0.
template <class J>
J mu_from_t(const J& t, double rho) {
  using std::sqrt;
  J t2 = t * t;
  return (1.0 + sqrt(1.0 + 4.0 * rho * t2)) / (2.0 * t2);
}

inline double mu_from_t(double t, double rho) {
  if (!(t > 0.0)) throw RecoveryError("t must be positive");
  if (!(rho >= 0.0)) throw RecoveryError("shift rho must be nonnegative");
  return (1.0 + std::sqrt(1.0 + 4.0 * rho * t * t)) / (2.0 * t * t);
}

inline double t_from_mu(double mu, double rho) { return std::sqrt(mu + rho) / mu; }

struct DNSample {
  std::vector<double> xi;
  Eigen::MatrixXcd q1, q0;
};

struct NormalDerivative {
  double value = 0.0;
  double spread = 0.0;
  std::vector<double> per_sample;
};

// mu_trace is an x-space jet of the boundary values of mu (no x_n dependence).
// E1 = unvec(U vec q0); M'_0 is the (n,n) entry of E1 rebuilt from mu_trace;
// their difference is -sqrt(g xi xi) d_n mu / (mu + rho).
inline NormalDerivative normal_derivative_from_q0(const std::vector<DNSample>& samples, const MetricField& metric,
                                                  const RJet& mu_trace, double rho, const Point& x,
                                                  double tol = 1e-8) {
  if (samples.empty()) throw RecoveryError("no DN samples");
  if (mu_trace.exact()) throw RecoveryError("viscosity trace needs jets");
  const int n = x.dim(), N = n - 1;
  const int order = mu_trace.order();
  Coords xc = coordinate_jets(*mu_trace.space(), x, order);
  NormalDerivative out;
  for (const auto& smp : samples) {
    SymbolContext c = make_context(metric, mu_trace, rho, CotangentSample{x, smp.xi}, xc);
    FactorizationResult r = full_symbol(c, 1);
    const Eigen::MatrixXcd q1 = values(r.q.terms.at(1));
    if ((q1 - smp.q1).norm() > tol * std::max(1.0, q1.norm()))
      throw RecoveryError("inconsistent DN data: q1 does not match the boundary viscosity");
    const Eigen::MatrixXcd E1 = KronVec::unvec(r.kit.U * KronVec::vec(smp.q0), n + 1);
    const cplx M0 = order_rhs(c, r.sym, r.q, 1)(N, N).value();
    const double s = r.kit.s.value().real();
    const double mu = mu_trace.value();
    out.per_sample.push_back(-(mu + rho) * (E1(N, N) - M0).real() / s);
  }
  std::vector<double> v = out.per_sample;
  std::sort(v.begin(), v.end());
  const size_t h = v.size() / 2;
  out.value = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  out.spread = v.back() - v.front();
  if (out.spread > tol * std::max(1.0, std::abs(out.value)))
    throw RecoveryError("inconsistent DN data: normal derivative estimates spread by " + std::to_string(out.spread));
  return out;
}

struct RecoveryPoint {
  Point x;
  bool indeterminate = false;
  double t = 0.0, mu = 0.0, dmu = 0.0;
  double mu_true = 0.0, dmu_true = 0.0;
  double mu_abs_err = 0.0, mu_rel_err = 0.0, dmu_abs_err = 0.0, dmu_rel_err = 0.0;
  double spread = 0.0;
};

struct RecoveryReport {
  std::vector<RecoveryPoint> points;
  double max_mu_rel = 0.0, max_dmu_rel = 0.0;
};

inline double relative_error(double got, double truth) {
  const double a = std::abs(got - truth);
  return std::abs(truth) > 1e-12 ? a / std::abs(truth) : a;
}

// Forward symbols from (mu, g) at each boundary point, then recovery.  Where
// q1 carries no viscosity the true trace is supplied to the d_n mu step.
inline RecoveryReport roundtrip_recover(const ProblemData& d, const std::vector<std::vector<double>>& boundary,
                                        const std::vector<std::vector<double>>& freqs, double tol = 1e-8) {
  check_problem(d);
  const int n = d.metric.n;
  const int order = 5;  // trace jets of order 4 feed the viscosity kit
  RecoveryReport rep;
  for (const auto& xp : boundary) {
    if (static_cast<int>(xp.size()) != n - 1) throw RecoveryError("boundary points need n-1 coordinates");
    std::vector<double> xv = xp;
    xv.push_back(0.0);
    Point x{xv};
    std::vector<Q1Sample> q1s;
    std::vector<DNSample> dns;
    const JetSpace* xs = nullptr;
    RJet mu_true_jet;
    for (const auto& xi : freqs) {
      SymbolContext c = make_context(d, CotangentSample{x, xi}, order);
      FactorizationResult r = full_symbol(c, 1);
      q1s.push_back({xi, r.q.terms.at(1)});
      dns.push_back({xi, values(r.q.terms.at(1)), values(r.q.terms.at(0))});
      xs = c.xs;
      mu_true_jet = c.kit.mu;
    }
    RecoveryPoint pt;
    pt.x = x;
    pt.mu_true = mu_true_jet.value();
    pt.dmu_true = mu_true_jet.partial(n - 1).value();
    RJet trace;
    try {
      TFit f = fit_t_from_q1(q1s, d.metric, x);
      trace = project_prefix(mu_from_t(f.t, d.rho), *xs);
      pt.t = f.t.value();
    } catch (const RecoveryError& e) {
      if (std::string(e.what()) != "indeterminate at this point") throw;
      pt.indeterminate = true;
      trace = mu_true_jet.exact() ? RJet::constant(*xs, order - 1, mu_true_jet.value())
                                  : restrict_to(mu_true_jet, tangential_mask(xs->nv(), n)).truncate(order - 1);
      pt.t = t_from_mu(pt.mu_true, d.rho);
    }
    pt.mu = trace.value();
    NormalDerivative nd = normal_derivative_from_q0(dns, d.metric, trace, d.rho, x, tol);
    pt.dmu = nd.value;
    pt.spread = nd.spread;
    pt.mu_abs_err = std::abs(pt.mu - pt.mu_true);
    pt.mu_rel_err = relative_error(pt.mu, pt.mu_true);
    pt.dmu_abs_err = std::abs(pt.dmu - pt.dmu_true);
    pt.dmu_rel_err = relative_error(pt.dmu, pt.dmu_true);
    if (!pt.indeterminate) rep.max_mu_rel = std::max(rep.max_mu_rel, pt.mu_rel_err);
    rep.max_dmu_rel = std::max(rep.max_dmu_rel, pt.dmu_rel_err);
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace stokesdn
