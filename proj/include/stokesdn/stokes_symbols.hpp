#pragma once

// Interior symbols b1, b0, c2, c1, c0 of the operator d_n^2 + B d_n + C in
// boundary normal coordinates.  Symbols are complex jets in the joint
// variables (x_1..x_n, xi_1..xi_{n-1}), so x- and xi-derivatives are exact.

#include <cmath>
#include <string>
#include <vector>

#include "stokesdn/new_system.hpp"

namespace stokesdn {

class SymbolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SymbolContext {
  int n = 0, m = 0, order = 0;
  double rho = 0.0;
  const JetSpace* xs = nullptr;  // x variables
  const JetSpace* zs = nullptr;  // x then xi' variables
  CotangentSample sample;
  GeometryJet geo;
  ViscosityKit kit;
  OperatorCoefficients op;
  std::vector<CJet> xi;  // xi'_alpha as jets in zs

  CJet lift(const RJet& r) const { return to_complex(embed(r, *zs)); }
  int normal() const { return n - 1; }
  int fslot() const { return n; }
};

inline void check_sample(const CotangentSample& s) {
  check_point(s.x);
  if (static_cast<int>(s.xi.size()) != s.x.dim() - 1) throw FieldError("xi' must have n-1 components");
}

// Context from an x-space viscosity jet (coordinates of the given order at s.x).
inline SymbolContext make_context(const MetricField& metric, const RJet& mu, double rho, const CotangentSample& s,
                                  const Coords& xc) {
  check_sample(s);
  SymbolContext c;
  c.n = s.x.dim();
  c.m = c.n + 1;
  c.order = xc[0].order();
  c.rho = rho;
  c.xs = xc[0].space();
  c.zs = &JetSpace::get(2 * c.n - 1);
  if (c.order > c.zs->max_order()) throw JetDepthError();
  c.sample = s;
  c.geo = geometry_jet(metric, xc);
  c.kit = viscosity_kit(c.geo, mu, rho);
  c.op = new_system_coefficients(c.geo, c.kit);
  for (int a = 0; a < c.n - 1; ++a) c.xi.push_back(CJet::variable(*c.zs, c.order, c.n + a, cplx(s.xi[a])));
  return c;
}

inline SymbolContext make_context(const ProblemData& d, const CotangentSample& s, int order) {
  check_problem(d);
  check_sample(s);
  Coords xc = coordinate_jets(JetSpace::get(s.x.dim()), s.x, order);
  return make_context(d.metric, d.mu(xc), d.rho, s, xc);
}

struct InteriorSymbols {
  CJetMat b1, b0, c2, c1, c0;
};

// g^{ab} xi_a xi_b over tangential indices
inline CJet xi_norm2(const SymbolContext& c) {
  CJet s;
  for (int a = 0; a < c.n - 1; ++a)
    for (int b = 0; b < c.n - 1; ++b)
      if (!c.geo.gi(a, b).is_zero()) s += c.lift(c.geo.gi(a, b)) * c.xi[a] * c.xi[b];
  return s;
}

// Column entries Gamma^j_{gs} g^{ag} g^{bs} xi_a xi_b (before the 1/|xi| factor).
inline std::vector<CJet> gamma_xi_xi(const SymbolContext& c) {
  const int n = c.n, T = n - 1;
  const auto& geo = c.geo;
  std::vector<CJet> out(n);
  std::vector<CJet> xu(n);  // g^{ag} xi_a, raised tangential covector
  for (int g = 0; g < T; ++g)
    for (int a = 0; a < T; ++a)
      if (!geo.gi(a, g).is_zero()) xu[g] += c.lift(geo.gi(a, g)) * c.xi[a];
  for (int j = 0; j < n; ++j)
    for (int g = 0; g < T; ++g)
      for (int s = 0; s < T; ++s)
        if (!geo.G(j, g, s).is_zero()) out[j] += c.lift(geo.G(j, g, s)) * xu[g] * xu[s];
  return out;
}

// Column entries Gamma^j_{bn} g^{ab} xi_a
inline std::vector<CJet> gamma_normal_xi(const SymbolContext& c) {
  const int n = c.n, T = n - 1, N = n - 1;
  std::vector<CJet> out(n);
  for (int j = 0; j < n; ++j)
    for (int b = 0; b < T; ++b)
      for (int a = 0; a < T; ++a)
        if (!c.geo.G(j, b, N).is_zero() && !c.geo.gi(a, b).is_zero())
          out[j] += c.lift(c.geo.G(j, b, N)) * c.lift(c.geo.gi(a, b)) * c.xi[a];
  return out;
}

inline std::pair<CJetMat, CJetMat> assemble_b(const SymbolContext& c) {
  const int n = c.n, m = c.m, T = n - 1, N = n - 1, F = n;
  const auto& geo = c.geo;
  const auto& k = c.kit;
  const cplx I(0, 1);
  CJetMat b1(m, m), b0(m, m);
  const CJet t = c.lift(k.t);
  auto gx = gamma_normal_xi(c);
  for (int j = 0; j < n; ++j)
    if (!gx[j].is_zero()) b1(j, F) = 4.0 * I * t * gx[j];

  RJet tr;  // Gamma^b_{nb}
  for (int b = 0; b < T; ++b) tr += geo.G(b, N, b);
  const RJet rmu = k.rho * inv(k.mu * (k.mu + k.rho));
  for (int r = 0; r < m; ++r) b0(r, r) = c.lift(tr);
  for (int j = 0; j < n; ++j)
    for (int kk = 0; kk < n; ++kk) {
      RJet v = 2.0 * geo.G(j, kk, N);
      if (kk == N) v += k.mu * k.gm[j];
      if (j == kk) v += rmu * k.dmu[N];
      b0(j, kk) += c.lift(v);
    }
  for (int j = 0; j < n; ++j) {
    RJet v = 2.0 * geo.ricci(j, N) - 2.0 * k.mu * k.dgm[j][N] + geo.conn_f(j, N);
    for (int a = 0; a < T; ++a) v -= 2.0 * k.mu * geo.G(j, a, N) * k.gm[a];
    for (int a = 0; a < T; ++a)
      for (int b = 0; b < T; ++b)
        for (int g = 0; g < T; ++g)
          for (int s = 0; s < T; ++s)
            if (!geo.G(j, g, s).is_zero() && !geo.G(N, a, b).is_zero())
              v -= 2.0 * geo.gi(a, g) * geo.gi(b, s) * geo.G(j, g, s) * geo.G(N, a, b);
    b0(j, F) = c.lift(k.t * v);
  }
  b0(F, N) += c.lift(k.mu * k.a);
  return {b1, b0};
}

struct CSymbols {
  CJetMat c2, c1, c0;
};

inline CSymbols assemble_c(const SymbolContext& c) {
  const int n = c.n, m = c.m, T = n - 1, N = n - 1, F = n;
  const auto& geo = c.geo;
  const auto& k = c.kit;
  const cplx I(0, 1);
  CSymbols out{CJetMat(m, m), CJetMat(m, m), CJetMat(m, m)};
  const CJet t = c.lift(k.t);

  CJet q2 = xi_norm2(c);
  auto gxx = gamma_xi_xi(c);
  for (int r = 0; r < m; ++r) out.c2(r, r) = -q2;
  for (int j = 0; j < n; ++j)
    if (!gxx[j].is_zero()) out.c2(j, F) = -2.0 * t * gxx[j];

  // c1
  CJet diag;
  for (int b = 0; b < T; ++b) {
    RJet v;
    for (int a = 0; a < T; ++a) {
      v += geo.gi(a, b).partial(a);
      for (int g = 0; g < T; ++g)
        if (!geo.gi(a, b).is_zero()) v += geo.gi(a, b) * geo.G(g, a, g);
    }
    if (!v.is_zero()) diag += I * c.lift(v) * c.xi[b];
  }
  for (int r = 0; r < m; ++r) out.c1(r, r) = diag;
  const RJet rmu = k.rho * inv(k.mu * (k.mu + k.rho));
  for (int j = 0; j < n; ++j)
    for (int kk = 0; kk < n; ++kk) {
      CJet v;
      if (kk != N) v += I * c.lift(k.mu * k.gm[j]) * c.xi[kk];
      for (int b = 0; b < T; ++b) {
        RJet w;
        for (int a = 0; a < T; ++a) {
          RJet inner = 2.0 * geo.G(j, kk, a);
          if (j == kk) inner += rmu * k.dmu[a];
          if (!inner.is_zero() && !geo.gi(a, b).is_zero()) w += inner * geo.gi(a, b);
        }
        if (!w.is_zero()) v += I * c.lift(w) * c.xi[b];
      }
      out.c1(j, kk) += v;
    }
  for (int j = 0; j < n; ++j) {
    CJet v;
    for (int b = 0; b < T; ++b) {
      RJet w;
      for (int a = 0; a < T; ++a) {
        if (geo.gi(a, b).is_zero()) continue;
        w += 2.0 * geo.ricci(j, a) * geo.gi(a, b);
        w -= 2.0 * k.mu * geo.gi(a, b) * k.dgm[j][a];
        for (int s = 0; s < n; ++s)
          if (!geo.G(j, s, a).is_zero()) w -= 2.0 * k.mu * geo.gi(a, b) * geo.G(j, s, a) * k.gm[s];
        w += geo.conn_f(j, a) * geo.gi(a, b);
      }
      for (int s = 0; s < n; ++s)
        for (int h = 0; h < n; ++h) {
          if (geo.G(j, s, h).is_zero()) continue;
          for (int r = 0; r < n; ++r)
            for (int mm = 0; mm < n; ++mm)
              if (!geo.gi(s, r).is_zero() && !geo.gi(h, mm).is_zero() && !geo.G(b, r, mm).is_zero())
                w -= 2.0 * geo.G(j, s, h) * geo.gi(s, r) * geo.gi(h, mm) * geo.G(b, r, mm);
        }
      if (!w.is_zero()) v += I * t * c.lift(w) * c.xi[b];
    }
    out.c1(j, F) = v;
  }
  for (int kk = 0; kk < T; ++kk) out.c1(F, kk) = I * c.lift(k.mu * k.a) * c.xi[kk];

  // c0 carries exactly the zero-order coefficients of the system
  for (int r = 0; r < m; ++r)
    for (int cc = 0; cc < m; ++cc) out.c0(r, cc) = c.lift(c.op.C0(r, cc));
  return out;
}

inline InteriorSymbols interior_symbols(const SymbolContext& c) {
  auto [b1, b0] = assemble_b(c);
  CSymbols cs = assemble_c(c);
  return {b1, b0, cs.c2, cs.c1, cs.c0};
}

// Same symbols read off the operator coefficients with d_alpha -> i xi_alpha.
inline InteriorSymbols symbols_from_coefficients(const SymbolContext& c) {
  const int n = c.n, m = c.m, T = n - 1, N = n - 1;
  const cplx I(0, 1);
  InteriorSymbols s{CJetMat(m, m), CJetMat(m, m), CJetMat(m, m), CJetMat(m, m), CJetMat(m, m)};
  for (int r = 0; r < m; ++r)
    for (int cc = 0; cc < m; ++cc) {
      const auto& op = c.op;
      for (int a = 0; a < T; ++a) {
        RJet mixed = op.C2(r, cc, N, a) + op.C2(r, cc, a, N);
        if (!mixed.is_zero()) s.b1(r, cc) += I * c.lift(mixed) * c.xi[a];
        for (int b = 0; b < T; ++b)
          if (!op.C2(r, cc, a, b).is_zero()) s.c2(r, cc) -= c.lift(op.C2(r, cc, a, b)) * c.xi[a] * c.xi[b];
        if (!op.C1(r, cc, a).is_zero()) s.c1(r, cc) += I * c.lift(op.C1(r, cc, a)) * c.xi[a];
      }
      s.b0(r, cc) = c.lift(op.C1(r, cc, N));
      s.c0(r, cc) = c.lift(op.C0(r, cc));
    }
  return s;
}

}  // namespace stokesdn
