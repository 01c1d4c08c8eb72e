#pragma once

// Symbol-level factorization d_n^2 + B d_n + C = (d_n + B - Q)(d_n + Q):
// principal term q1, the Sylvester operator for lower orders, and the recursion.

#include <cmath>
#include <map>

#include "stokesdn/stokes_symbols.hpp"
#include "stokesdn/symbol_algebra.hpp"

namespace stokesdn {

// sqrt(g^{ab} xi_a xi_b) as a jet; rejects xi' = 0.
inline CJet symbol_norm(const SymbolContext& c) {
  double z = 0.0;
  for (double v : c.sample.xi) z += v * v;
  if (!(z > 0.0)) throw SymbolError("elliptic symbol undefined at xi'=0");
  return sqrt(xi_norm2(c));
}

// Column-F parts of q1 - s I and q1 - b1 - s I, without the factor t.
struct PrincipalParts {
  CJet s, t;
  CJetMat A1, A2;
};

inline PrincipalParts principal_parts(const SymbolContext& c) {
  const int n = c.n, m = c.m, F = n;
  const cplx I(0, 1);
  PrincipalParts p{symbol_norm(c), c.lift(c.kit.t), CJetMat(m, m), CJetMat(m, m)};
  auto gx = gamma_normal_xi(c);
  auto gxx = gamma_xi_xi(c);
  const CJet is = inv(p.s);
  for (int j = 0; j < n; ++j) {
    CJet theta = gxx[j].is_zero() ? CJet() : gxx[j] * is;
    CJet rot = gx[j].is_zero() ? CJet() : 2.0 * I * gx[j];
    p.A2(j, F) = rot + theta;
    p.A1(j, F) = theta - rot;
  }
  return p;
}

inline CJetMat principal_q1(const SymbolContext& c) {
  PrincipalParts p = principal_parts(c);
  CJetMat q1 = p.t * p.A2;
  for (int r = 0; r < c.m; ++r) q1(r, r) = q1(r, r) + p.s;
  return q1;
}

inline CJetMat principal_q1(const ProblemData& d, const CotangentSample& s, int order = 3) {
  return principal_q1(make_context(d, s, order));
}

// (q1 - b1) X + X q1 = 2 s X + t (A1 X + X A2) = E
struct SylvesterKit {
  CJet s, t;
  CJetMat A1, A2;
  Eigen::MatrixXcd U, Uinv;
  // coefficients of I, I(x)A1 and A2^T(x)I, A2^T(x)A1 in U^{-1}
  cplx s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;

  CJetMat solve(const CJetMat& E) const {
    const CJet is = inv(s);
    const CJet c1 = 0.5 * is;
    const CJet c2 = -0.25 * t * is * is;
    const CJet c4 = 0.25 * t * t * is * is * is;
    CJetMat A1E = A1 * E;
    return c1 * E + c2 * (A1E + E * A2) + c4 * (A1E * A2);
  }
};

inline SylvesterKit build_sylvester(const PrincipalParts& p) {
  SylvesterKit k{p.s, p.t, p.A1, p.A2, {}, {}};
  const Eigen::MatrixXcd a1 = values(p.A1), a2 = values(p.A2);
  const cplx s = p.s.value(), t = p.t.value();
  const Eigen::Index m = a1.rows();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(m, m), II = Eigen::MatrixXcd::Identity(m * m, m * m);
  KronVec kv = kron_vec(s * I + t * a1, s * I + t * a2, I);
  k.U = kv.U;
  k.s1 = 1.0 / (2.0 * s);
  k.s2 = k.s3 = -t / (4.0 * s * s);
  k.s4 = t * t / (4.0 * s * s * s);
  k.Uinv = k.s1 * II + k.s2 * kron(I, a1) + k.s3 * kron(a2.transpose(), I) + k.s4 * kron(a2.transpose(), a1);
  return k;
}

inline SylvesterKit build_sylvester(const SymbolContext& c) { return build_sylvester(principal_parts(c)); }

inline CJetMat solve_next_order(const SylvesterKit& kit, const CJetMat& E) { return kit.solve(E); }

// E_d: everything in the degree-d part of d_n q + b # q - q # q - c except
// (q1 - b1) q_{d-1} + q_{d-1} q1.  Needs q_1 .. q_d; d = 1 gives E_1.
inline CJetMat order_rhs(const SymbolContext& c, const InteriorSymbols& sym, const GradedSymbol& q, int d) {
  const int m = c.m, N = c.n - 1;
  for (int j = d; j <= 1; ++j)
    if (!q.terms.count(j)) throw DegreeError("degree not computed: " + std::to_string(j));
  GradedSymbol b{c.n, {{1, sym.b1}, {0, sym.b0}}};
  GradedSymbol known{c.n, {}};
  for (const auto& [j, t] : q.terms)
    if (j >= d) known.terms.emplace(j, t);
  CJetMat E = partial(q.terms.at(d), N) + compose_term(b, known, d, m) - compose_term(known, known, d, m);
  if (d == 1) E -= sym.c1;
  if (d == 0) E -= sym.c0;
  return E;
}

inline double rel_norm(const Eigen::MatrixXcd& r, const Eigen::MatrixXcd& scale) {
  const double s = scale.norm();
  return s > 0.0 ? r.norm() / s : r.norm();
}

struct FactorizationResult {
  GradedSymbol q;
  InteriorSymbols sym;
  SylvesterKit kit;
  double principal_residual = 0.0;          // |q1^2 - b1 q1 + c2| / |c2|
  std::map<int, double> sylvester_residual;  // keyed by the degree of the solved term
  std::map<int, double> compose_residual;    // degree-d part of d_n q + b # q - q # q - c
  double unitarity = 0.0;                    // |U U^{-1} - I|
};

inline double principal_residual(const CJetMat& q1, const CJetMat& b1, const CJetMat& c2) {
  Eigen::MatrixXcd Q = values(q1), B = values(b1), C = values(c2);
  return rel_norm(Q * Q - B * Q + C, C);
}

// Factorization residual at each degree from 2 down to 2 - K.
inline std::map<int, double> factorization_residual(const SymbolContext& c, const InteriorSymbols& sym,
                                                    const GradedSymbol& q, int K) {
  const int m = c.m, N = c.n - 1;
  GradedSymbol b{c.n, {{1, sym.b1}, {0, sym.b0}}};
  std::map<int, double> out;
  for (int d = 2; d >= 2 - K; --d) {
    CJetMat bq = compose_term(b, q, d, m), qq = compose_term(q, q, d, m);
    CJetMat cd(m, m);
    if (d == 2) cd = sym.c2;
    if (d == 1) cd = sym.c1;
    if (d == 0) cd = sym.c0;
    Eigen::MatrixXcd dn = Eigen::MatrixXcd::Zero(m, m);
    if (q.terms.count(d)) dn = values(partial(q.terms.at(d), N));
    Eigen::MatrixXcd vbq = values(bq), vqq = values(qq), vc = values(cd);
    const double scale = std::max({dn.norm(), vbq.norm(), vqq.norm(), vc.norm()});
    const double r = (dn + vbq - vqq - vc).norm();
    out[d] = scale > 0.0 ? r / scale : r;
  }
  return out;
}

// q1, q0, ..., q_{1-K} at the context's sample.  Context jets of order K + 1 suffice.
inline FactorizationResult full_symbol(const SymbolContext& c, int K) {
  if (K < 0) throw std::invalid_argument("depth must be nonnegative");
  FactorizationResult r;
  r.sym = interior_symbols(c);
  PrincipalParts p = principal_parts(c);
  r.kit = build_sylvester(p);
  r.q.n = c.n;
  CJetMat q1 = p.t * p.A2;
  for (int i = 0; i < c.m; ++i) q1(i, i) = q1(i, i) + p.s;
  r.q.terms.emplace(1, q1);
  r.principal_residual = principal_residual(q1, r.sym.b1, r.sym.c2);
  const Eigen::Index mm = r.kit.U.rows();
  r.unitarity = (r.kit.U * r.kit.Uinv - Eigen::MatrixXcd::Identity(mm, mm)).norm();

  const Eigen::MatrixXcd Q1 = values(q1), L = Q1 - values(r.sym.b1);
  for (int d = 1; d > 1 - K; --d) {
    CJetMat E = order_rhs(c, r.sym, r.q, d);
    CJetMat X = r.kit.solve(E);
    Eigen::MatrixXcd x = values(X), e = values(E);
    r.sylvester_residual[d - 1] = rel_norm(L * x + x * Q1 - e, e);
    r.q.terms.emplace(d - 1, X);
  }
  r.compose_residual = factorization_residual(c, r.sym, r.q, K);
  return r;
}

inline int factorization_order(int K) { return std::max(K + 1, 3); }

inline FactorizationResult full_symbol(const ProblemData& d, const CotangentSample& s, int K = 2) {
  return full_symbol(make_context(d, s, factorization_order(K)), K);
}

}  // namespace stokesdn
