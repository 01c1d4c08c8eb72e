#pragma once

// Viscosity-derived quantities and the coefficients of the second-order
// elliptic system in the unknowns (w^1..w^n, f).  Row/column n is the f slot.

#include <vector>

#include "stokesdn/geometry.hpp"

namespace stokesdn {

struct ProblemData {
  MetricField metric;
  ScalarField mu;
  double rho = 1.0;
};

inline void check_problem(const ProblemData& d) {
  if (!(d.rho >= 0.0)) throw FieldError("shift rho must be nonnegative");
  if (!d.mu.eval) throw FieldError("viscosity not set");
  if (!d.metric.eval) throw FieldError("metric not set");
}

struct ViscosityKit {
  int n = 0;
  double rho = 0.0;
  RJet mu, mui, sq, a, t;       // mu, 1/mu, (mu+rho)^{1/2}, (mu+rho)^{-1/2}, sq/mu
  std::vector<RJet> dmu;        // d_k mu
  std::vector<RJet> gm;         // (1/mu)^{;j}
  std::vector<RJet> da;         // d_k a
  std::vector<RJet> a_up;       // a^{;l}
  std::vector<std::vector<RJet>> dgm;  // dgm[j][l] = d_l (1/mu)^{;j}
  RJet lap_mui, lap_a;
  std::vector<RJet> grad_lap_mui;  // (Delta 1/mu)^{;j}
  RJetMat hess_mui;                // (1/mu)^{;m;j}
  RJetMat dmu_up;                  // (j,k) -> (d_k mu)^{;j}
};

inline ViscosityKit viscosity_kit(const GeometryJet& geo, const RJet& mu, double rho) {
  if (!(mu.value() > 0.0)) throw FieldError("viscosity must be positive");
  ViscosityKit k;
  const int n = geo.n;
  k.n = n;
  k.rho = rho;
  k.mu = mu;
  k.mui = inv(mu);
  k.sq = sqrt(mu + rho);
  k.a = inv(k.sq);
  k.t = k.mui * k.sq;
  k.dmu.resize(n);
  k.da.resize(n);
  for (int i = 0; i < n; ++i) {
    k.dmu[i] = mu.partial(i);
    k.da[i] = k.a.partial(i);
  }
  k.gm = raised_gradient(geo, k.mui);
  k.a_up = raised_gradient(geo, k.a);
  k.dgm.assign(n, std::vector<RJet>(n));
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) k.dgm[j][l] = k.gm[j].partial(l);
  k.lap_mui = laplace_beltrami(geo, k.mui);
  k.lap_a = laplace_beltrami(geo, k.a);
  k.grad_lap_mui = raised_gradient(geo, k.lap_mui);
  k.hess_mui = raised_hessian(geo, k.mui);
  k.dmu_up = RJetMat(n, n);
  for (int kk = 0; kk < n; ++kk) {
    auto up = raised_gradient(geo, k.dmu[kk]);
    for (int j = 0; j < n; ++j) k.dmu_up(j, kk) = up[j];
  }
  return k;
}

// L = sum c2^{ab} d_a d_b + sum c1^a d_a + c0, entries indexed (row, column).
struct OperatorCoefficients {
  int n = 0, m = 0;
  std::vector<RJet> c2, c1, c0;

  RJet& C2(int r, int c, int a, int b) { return c2[((r * m + c) * n + a) * n + b]; }
  RJet& C1(int r, int c, int a) { return c1[(r * m + c) * n + a]; }
  RJet& C0(int r, int c) { return c0[r * m + c]; }
  const RJet& C2(int r, int c, int a, int b) const { return c2[((r * m + c) * n + a) * n + b]; }
  const RJet& C1(int r, int c, int a) const { return c1[(r * m + c) * n + a]; }
  const RJet& C0(int r, int c) const { return c0[r * m + c]; }
};

inline OperatorCoefficients new_system_coefficients(const GeometryJet& geo, const ViscosityKit& k) {
  const int n = geo.n, m = n + 1, F = n;
  OperatorCoefficients op;
  op.n = n;
  op.m = m;
  op.c2.assign(m * m * n * n, RJet());
  op.c1.assign(m * m * n, RJet());
  op.c0.assign(m * m, RJet());
  const RJetMat& gi = geo.gi;
  const RJet rmu = k.rho * inv(k.mu * (k.mu + k.rho));  // rho / (mu (mu+rho))

  // Laplacian on the diagonal, f row included
  for (int r = 0; r < m; ++r) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) op.C2(r, r, a, b) = gi(a, b);
      op.C1(r, r, a) = geo.lap_coef[a];
    }
  }

  std::vector<RJet> grad_mu_up(n);  // g^{ml} d_m mu
  for (int l = 0; l < n; ++l)
    for (int mm = 0; mm < n; ++mm)
      if (!gi(mm, l).is_zero()) grad_mu_up[l] += gi(mm, l) * k.dmu[mm];

  RJet diag0 = k.sq * k.lap_a;
  for (int l = 0; l < n; ++l) diag0 += k.mui * k.sq * k.dmu[l] * k.a_up[l];

  for (int j = 0; j < n; ++j) {
    for (int kk = 0; kk < n; ++kk) {
      // first order, w columns
      op.C1(j, kk, kk) += k.mu * k.gm[j];
      for (int l = 0; l < n; ++l) {
        if (j == kk) op.C1(j, kk, l) += rmu * grad_mu_up[l];
        RJet s;
        for (int mm = 0; mm < n; ++mm)
          if (!gi(mm, l).is_zero() && !geo.G(j, kk, mm).is_zero()) s += gi(mm, l) * geo.G(j, kk, mm);
        if (!s.is_zero()) op.C1(j, kk, l) += 2.0 * s;
      }
      // zero order, w columns
      RJet z = k.mu * k.gm[j] * geo.trace_gamma[kk] + k.mu * k.sq * k.gm[j] * k.da[kk] + geo.conn_w(j, kk) +
               geo.ricci(j, kk) - k.mui * k.dmu_up(j, kk);
      for (int mm = 0; mm < n; ++mm)
        if (!geo.G(j, kk, mm).is_zero()) z += rmu * geo.G(j, kk, mm) * grad_mu_up[mm];
      if (j == kk) z += diag0;
      op.C0(j, kk) = z;
    }

    // f column
    for (int l = 0; l < n; ++l)
      for (int mm = 0; mm < n; ++mm) {
        RJet s;
        for (int ss = 0; ss < n; ++ss)
          for (int r = 0; r < n; ++r)
            if (!geo.G(j, ss, r).is_zero() && !gi(ss, l).is_zero() && !gi(r, mm).is_zero())
              s += geo.G(j, ss, r) * gi(ss, l) * gi(r, mm);
        if (!s.is_zero()) op.C2(j, F, l, mm) = 2.0 * k.t * s;
      }
    for (int l = 0; l < n; ++l) {
      RJet v;
      for (int mm = 0; mm < n; ++mm) {
        if (gi(l, mm).is_zero()) continue;
        v += 2.0 * k.t * geo.ricci(j, mm) * gi(l, mm);
        v -= 2.0 * k.sq * gi(mm, l) * k.dgm[j][mm];
        for (int ss = 0; ss < n; ++ss)
          if (!geo.G(j, ss, mm).is_zero()) v -= 2.0 * k.sq * gi(mm, l) * geo.G(j, ss, mm) * k.gm[ss];
      }
      for (int ss = 0; ss < n; ++ss)
        if (!gi(ss, l).is_zero()) v += k.t * geo.conn_f(j, ss) * gi(ss, l);
      RJet w;
      for (int ss = 0; ss < n; ++ss)
        for (int h = 0; h < n; ++h) {
          if (geo.G(j, ss, h).is_zero()) continue;
          for (int r = 0; r < n; ++r)
            for (int mm = 0; mm < n; ++mm)
              if (!gi(ss, r).is_zero() && !gi(h, mm).is_zero() && !geo.G(l, r, mm).is_zero())
                w += geo.G(j, ss, h) * gi(ss, r) * gi(h, mm) * geo.G(l, r, mm);
        }
      if (!w.is_zero()) v -= 2.0 * k.t * w;
      op.C1(j, F, l) = v;
    }
    RJet z = -2.0 * k.sq * k.grad_lap_mui[j];
    for (int l = 0; l < n; ++l) {
      z -= 2.0 * k.sq * geo.ricci(j, l) * k.gm[l];
      z -= k.sq * geo.conn_w(j, l) * k.gm[l];
      z -= 2.0 * k.mui * k.sq * k.dmu[l] * k.hess_mui(l, j);
      for (int mm = 0; mm < n; ++mm)
        for (int ss = 0; ss < n; ++ss)
          if (!gi(mm, l).is_zero() && !geo.G(j, ss, mm).is_zero())
            z -= 2.0 * k.sq * gi(mm, l) * geo.G(j, ss, mm) * k.dgm[ss][l];
    }
    op.C0(j, F) = z;
  }

  // constraint row
  const RJet mua = k.mu * k.a;
  for (int kk = 0; kk < n; ++kk) {
    op.C1(F, kk, kk) = mua;
    op.C0(F, kk) = mua * geo.trace_gamma[kk] + k.mu * k.da[kk];
  }
  op.C0(F, F) = -k.mu * k.lap_mui;
  return op;
}

// (L U)_r for a vector of field jets U (length n+1).
template <class T>
std::vector<Jet<T>> apply_operator(const OperatorCoefficients& op, const std::vector<Jet<T>>& U) {
  const int n = op.n, m = op.m;
  std::vector<Jet<T>> out(m);
  for (int c = 0; c < m; ++c) {
    if (U[c].is_zero()) continue;
    std::vector<Jet<T>> d1(n);
    for (int a = 0; a < n; ++a) d1[a] = U[c].partial(a);
    for (int r = 0; r < m; ++r) {
      Jet<T> s;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b)
          if (!op.C2(r, c, a, b).is_zero()) s += lift_coef<T>(op.C2(r, c, a, b)) * d1[a].partial(b);
        if (!op.C1(r, c, a).is_zero()) s += lift_coef<T>(op.C1(r, c, a)) * d1[a];
      }
      if (!op.C0(r, c).is_zero()) s += lift_coef<T>(op.C0(r, c)) * U[c];
      out[r] += s;
    }
  }
  return out;
}

}  // namespace stokesdn
