#pragma once

// Passage between Stokes pairs (u, p) and the unknowns (w, f) of the elliptic
// system, with pointwise residuals of both systems and layered manufactured
// solutions that satisfy the divergence constraint.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "stokesdn/new_system.hpp"

namespace stokesdn {

struct FieldPair {
  std::vector<ComplexField> w;  // n components
  ComplexField f;
};

struct StokesState {
  std::vector<ComplexField> u;
  ComplexField p;
};

struct PointJets {
  GeometryJet geo;
  ViscosityKit kit;
  Coords x;
};

inline PointJets point_jets(const ProblemData& d, const Point& x, int order) {
  check_problem(d);
  check_point(x);
  PointJets pj;
  pj.x = coordinate_jets(JetSpace::get(x.dim()), x, order);
  pj.geo = geometry_jet(d.metric, pj.x);
  pj.kit = viscosity_kit(pj.geo, d.mu(pj.x), d.rho);
  return pj;
}

inline std::vector<CJet> evaluate(const FieldPair& wf, const Coords& x) {
  std::vector<CJet> U;
  for (const auto& w : wf.w) U.push_back(w(x));
  U.push_back(wf.f(x));
  return U;
}

// -nabla* nabla u, componentwise
inline std::vector<CJet> rough_laplacian(const GeometryJet& geo, const std::vector<CJet>& u) {
  const int n = geo.n;
  std::vector<CJet> out(n);
  std::vector<std::vector<CJet>> d(n, std::vector<CJet>(n));
  for (int s = 0; s < n; ++s)
    for (int l = 0; l < n; ++l) d[s][l] = u[s].partial(l);
  for (int j = 0; j < n; ++j) {
    CJet v = laplace_beltrami(geo, u[j]);
    for (int s = 0; s < n; ++s) {
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          if (!geo.gi(k, l).is_zero() && !geo.G(j, s, k).is_zero())
            v += to_complex(2.0 * geo.gi(k, l) * geo.G(j, s, k)) * d[s][l];
      if (!geo.conn_w(j, s).is_zero()) v += to_complex(geo.conn_w(j, s)) * u[s];
    }
    out[j] = v;
  }
  return out;
}

inline CJet divergence(const GeometryJet& geo, const std::vector<CJet>& u) {
  CJet v;
  for (int j = 0; j < geo.n; ++j) {
    v += u[j].partial(j);
    if (!geo.trace_gamma[j].is_zero()) v += to_complex(geo.trace_gamma[j]) * u[j];
  }
  return v;
}

struct StokesJets {
  std::vector<CJet> u;
  CJet p;
};

// u^j = a w^j + f^{;j}/mu - f (1/mu)^{;j},  p = Delta f + mu (Delta 1/mu) f + a d_k mu w^k
inline StokesJets lift_jets(const GeometryJet& geo, const ViscosityKit& k, const std::vector<CJet>& U) {
  const int n = geo.n;
  const CJet& f = U[n];
  StokesJets s;
  auto fu = raised_gradient(geo, f);
  const CJet a = to_complex(k.a), mui = to_complex(k.mui);
  for (int j = 0; j < n; ++j) s.u.push_back(a * U[j] + mui * fu[j] - f * to_complex(k.gm[j]));
  s.p = laplace_beltrami(geo, f) + to_complex(k.mu * k.lap_mui) * f;
  for (int kk = 0; kk < n; ++kk) s.p += a * to_complex(k.dmu[kk]) * U[kk];
  return s;
}

struct LiftedValues {
  Eigen::VectorXcd u;
  cplx p;
  Eigen::MatrixXcd du;  // du(j, l) = d_l u^j
  Eigen::VectorXcd dp;
};

inline LiftedValues lift_solution(const ProblemData& d, const FieldPair& wf, const Point& x) {
  PointJets pj = point_jets(d, x, 3);
  StokesJets s = lift_jets(pj.geo, pj.kit, evaluate(wf, pj.x));
  const int n = x.dim();
  LiftedValues v;
  v.u.resize(n);
  v.du.resize(n, n);
  v.dp.resize(n);
  v.p = s.p.value();
  for (int j = 0; j < n; ++j) {
    v.u(j) = s.u[j].value();
    for (int l = 0; l < n; ++l) v.du(j, l) = s.u[j].partial(l).value();
    v.dp(j) = s.p.partial(j).value();
  }
  return v;
}

struct StokesResidual {
  Eigen::VectorXcd momentum;
  cplx div = 0.0;
};

// mu(-nabla*nabla u + Ric u) + S^{jk} d_k mu - grad p, S^{jk} = u^{j;k} + u^{k;j}
inline StokesResidual stokes_residual_jets(const GeometryJet& geo, const ViscosityKit& k, const StokesJets& s) {
  const int n = geo.n;
  StokesResidual r;
  r.momentum.resize(n);
  auto lap = rough_laplacian(geo, s.u);
  // covariant derivative nabla_l u^j, then raise l
  std::vector<std::vector<CJet>> cov(n, std::vector<CJet>(n));
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      CJet v = s.u[j].partial(l);
      for (int ss = 0; ss < n; ++ss)
        if (!geo.G(j, l, ss).is_zero()) v += to_complex(geo.G(j, l, ss)) * s.u[ss];
      cov[j][l] = v;
    }
  auto up = [&](int j, int kk) {  // u^{j;k}
    CJet v;
    for (int l = 0; l < n; ++l)
      if (!geo.gi(kk, l).is_zero()) v += to_complex(geo.gi(kk, l)) * cov[j][l];
    return v;
  };
  auto gp = raised_gradient(geo, s.p);
  for (int j = 0; j < n; ++j) {
    CJet v = lap[j];
    for (int ss = 0; ss < n; ++ss)
      if (!geo.ricci(j, ss).is_zero()) v += to_complex(geo.ricci(j, ss)) * s.u[ss];
    v = to_complex(k.mu) * v;
    for (int kk = 0; kk < n; ++kk)
      if (!k.dmu[kk].is_zero()) v += (up(j, kk) + up(kk, j)) * to_complex(k.dmu[kk]);
    v -= gp[j];
    r.momentum(j) = v.value();
  }
  r.div = divergence(geo, s.u).value();
  return r;
}

inline StokesResidual stokes_residual(const ProblemData& d, const StokesState& st, const Point& x) {
  PointJets pj = point_jets(d, x, 3);
  StokesJets s;
  for (const auto& u : st.u) s.u.push_back(u(pj.x));
  s.p = st.p(pj.x);
  return stokes_residual_jets(pj.geo, pj.kit, s);
}

// (L_1..L_n, constraint) at x
inline Eigen::VectorXcd new_system_residual(const ProblemData& d, const FieldPair& wf, const Point& x) {
  PointJets pj = point_jets(d, x, 3);
  OperatorCoefficients op = new_system_coefficients(pj.geo, pj.kit);
  auto L = apply_operator(op, evaluate(wf, pj.x));
  Eigen::VectorXcd r(L.size());
  for (size_t i = 0; i < L.size(); ++i) r(i) = L[i].value();
  return r;
}

struct DivergenceIdentity {
  cplx direct = 0.0;
  cplx formula = 0.0;
};

// div u of the lifted field against mu^{-1} Delta f + a div w - (Delta 1/mu) f + d_k a w^k
inline DivergenceIdentity divergence_identity(const ProblemData& d, const FieldPair& wf, const Point& x) {
  PointJets pj = point_jets(d, x, 3);
  auto U = evaluate(wf, pj.x);
  const int n = x.dim();
  StokesJets s = lift_jets(pj.geo, pj.kit, U);
  DivergenceIdentity out;
  out.direct = divergence(pj.geo, s.u).value();
  std::vector<CJet> w(U.begin(), U.begin() + n);
  CJet v = to_complex(pj.kit.mui) * laplace_beltrami(pj.geo, U[n]) + to_complex(pj.kit.a) * divergence(pj.geo, w) -
           to_complex(pj.kit.lap_mui) * U[n];
  for (int kk = 0; kk < n; ++kk) v += to_complex(pj.kit.da[kk]) * U[kk];
  out.formula = v.value();
  return out;
}

// Replace w^n by the solution of the divergence constraint (as a first-order ODE
// in x_n) that agrees with the given w^n on the slice x_n = const, to jet order.
inline std::vector<CJet> complete_constraint(const GeometryJet& geo, const ViscosityKit& k, std::vector<CJet> U) {
  const int n = geo.n, N = n - 1;
  std::vector<bool> keep(U[N].space()->nv(), true);
  keep[N] = false;
  const CJet g = restrict_to(U[N], keep);
  const CJet mua = to_complex(k.mu * k.a);
  CJet R = laplace_beltrami(geo, U[n]) - to_complex(k.mu * k.lap_mui) * U[n];
  for (int al = 0; al < N; ++al) {
    CJet d = U[al].partial(al);
    if (!geo.trace_gamma[al].is_zero()) d += to_complex(geo.trace_gamma[al]) * U[al];
    R += mua * d + to_complex(k.mu * k.da[al]) * U[al];
  }
  const CJet alpha = -to_complex(geo.trace_gamma[N] + k.da[N] / k.a);
  const CJet beta = -R / mua;
  const int order = std::min(U[N].order(), R.order() + 1);
  CJet w = g;
  for (int it = 0; it <= order + 1; ++it) w = g + integrate(alpha * w + beta, N, order);
  U[N] = w;
  return U;
}

struct EquivalenceSample {
  Eigen::VectorXcd momentum;  // Stokes momentum residual of the lifted pair
  Eigen::VectorXcd scaled_l;  // mu (mu+rho)^{-1/2} L_j
  Eigen::VectorXcd l;         // L_j and the constraint row
  cplx div = 0.0;
};

// Lift after completing the constraint around x, so div u vanishes to jet order.
inline EquivalenceSample equivalence_sample(const ProblemData& d, const FieldPair& wf, const Point& x,
                                            bool complete = true) {
  PointJets pj = point_jets(d, x, 4);
  auto U = evaluate(wf, pj.x);
  if (complete) U = complete_constraint(pj.geo, pj.kit, U);
  OperatorCoefficients op = new_system_coefficients(pj.geo, pj.kit);
  auto L = apply_operator(op, U);
  StokesResidual r = stokes_residual_jets(pj.geo, pj.kit, lift_jets(pj.geo, pj.kit, U));
  const int n = x.dim();
  EquivalenceSample s;
  s.momentum = r.momentum;
  s.div = r.div;
  s.l.resize(n + 1);
  s.scaled_l.resize(n);
  const double mua = (pj.kit.mu * pj.kit.a).value();
  for (int j = 0; j <= n; ++j) s.l(j) = L[j].value();
  for (int j = 0; j < n; ++j) s.scaled_l(j) = mua * s.l(j);
  return s;
}

// ---- layered manufactured solutions --------------------------------------

using Profile = std::function<CJet(const CJet&)>;  // function of x_n

struct LayeredSeeds {
  Profile f;               // F(x_n)
  std::vector<Profile> w;  // W^alpha(x_n), alpha < n
  cplx wn0 = 0.0;          // W^n(0)
  double depth = 1.0;
};

struct LayeredPair {
  FieldPair fields;
  std::vector<double> nodes;
  std::vector<std::vector<cplx>> taylor;  // W^n Taylor coefficients at each node
  double step = 0.05;
  int degree = 24;

  // Taylor coefficients of W^n about y
  std::vector<cplx> wn_taylor(double y) const {
    int i = static_cast<int>(std::floor(y / step));
    i = std::max(0, std::min(i, static_cast<int>(nodes.size()) - 1));
    const double dlt = y - nodes[i];
    const auto& w = taylor[i];
    const int P = static_cast<int>(w.size()) - 1;
    std::vector<cplx> out(P + 1, 0.0);
    for (int k = 0; k <= P; ++k) {
      double binom = 1.0;  // C(j, k) for j = k, k+1, ...
      double pw = 1.0;
      for (int j = k; j <= P; ++j) {
        out[k] += binom * pw * w[j];
        binom = binom * (j + 1) / (j + 1 - k);
        pw *= dlt;
      }
    }
    return out;
  }
};

class ManufactureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fields W(x_n) e^{i k.x'} on a flat metric with mu = mu(x_n); W^n integrates the
// divergence constraint as a linear ODE with Taylor steps.
inline LayeredPair layered_manufacture(const ProblemData& d, const std::vector<double>& k, const LayeredSeeds& seeds,
                                       double step = 0.05, int degree = 24) {
  check_problem(d);
  const int n = d.metric.n;
  if (static_cast<int>(k.size()) != n - 1) throw ManufactureError("frequency must have n-1 components");
  if (static_cast<int>(seeds.w.size()) != n - 1) throw ManufactureError("need n-1 tangential seed profiles");
  if (!(seeds.depth > 0.0)) throw ManufactureError("depth must be positive");
  const JetSpace& s1 = JetSpace::get(1);
  if (degree + 2 > s1.max_order()) throw JetDepthError();
  const double k2 = [&] {
    double s = 0;
    for (double v : k) s += v * v;
    return s;
  }();
  const cplx I(0, 1);

  LayeredPair out;
  out.step = step;
  out.degree = degree;
  cplx w0 = seeds.wn0;
  const int nodes = static_cast<int>(std::ceil(seeds.depth / step)) + 1;
  for (int i = 0; i < nodes; ++i) {
    const double x0 = i * step;
    RJet xr = RJet::variable(s1, degree + 2, 0, x0);
    Coords c(n, RJet(0.0));
    c[n - 1] = xr;
    RJet mu = d.mu(c);
    if (!(mu.value() > 0.0)) throw FieldError("viscosity must be positive");
    RJet a = pow(mu + d.rho, -0.5), mui = inv(mu);
    CJet xc = to_complex(xr);
    CJet F = seeds.f(xc);
    CJet kw;
    for (int al = 0; al < n - 1; ++al) kw += I * k[al] * seeds.w[al](xc);
    RJet mua = mu * a;
    CJet rhs = F.partial(0).partial(0) - k2 * F - to_complex(mu * mui.partial(0).partial(0)) * F + to_complex(mua) * kw;
    CJet alpha = to_complex(-a.partial(0) / a);
    CJet beta = -rhs / to_complex(mua);
    // W' = alpha W + beta, coefficient recursion
    std::vector<cplx> w(degree + 1, 0.0);
    w[0] = w0;
    for (int q = 0; q < degree; ++q) {
      cplx s = beta.coeff(q);
      for (int i2 = 0; i2 <= q; ++i2) s += alpha.coeff(i2) * w[q - i2];
      w[q + 1] = s / static_cast<double>(q + 1);
    }
    out.nodes.push_back(x0);
    out.taylor.push_back(w);
    cplx next = 0.0;
    for (int q = degree; q >= 0; --q) next = next * step + w[q];
    if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) throw ManufactureError("integrator failure");
    w0 = next;
  }

  auto wave = [k, n](const Coords& x) {
    CJet ph;
    for (int al = 0; al < n - 1; ++al) ph += cplx(0, k[al]) * to_complex(x[al]);
    return exp(ph);
  };
  for (int al = 0; al < n - 1; ++al) {
    Profile pr = seeds.w[al];
    out.fields.w.push_back([pr, wave, n](const Coords& x) { return pr(to_complex(x[n - 1])) * wave(x); });
  }
  LayeredPair shape;
  shape.nodes = out.nodes;
  shape.taylor = out.taylor;
  shape.step = step;
  shape.degree = degree;
  out.fields.w.push_back([shape, wave, n](const Coords& x) {
    CJet xn = to_complex(x[n - 1]);
    return xn.compose(shape.wn_taylor(x[n - 1].value())) * wave(x);
  });
  Profile fp = seeds.f;
  out.fields.f = [fp, wave, n](const Coords& x) { return fp(to_complex(x[n - 1])) * wave(x); };
  return out;
}

}  // namespace stokesdn
