#pragma once

// Metric jets, Christoffel symbols, curvature, Laplace-Beltrami and the
// covariant derivative stacks used by the symbol assembly.

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stokesdn/dense.hpp"
#include "stokesdn/fields.hpp"

namespace stokesdn {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Eigen::MatrixXd metric_inverse(const Eigen::MatrixXd& g) {
  if (g.rows() != g.cols()) throw GeometryError("singular metric");
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.cwiseAbs().maxCoeff()))
    throw GeometryError("singular metric");
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw GeometryError("singular metric");
  Eigen::MatrixXd gi = llt.solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
  return 0.5 * (gi + gi.transpose());
}

// Everything geometric at one point, as jets in the coordinate variables.
// With coordinate jets of order N: g, g^{-1} have order N, Gamma has N-1,
// curvature and the connection-Laplacian coefficients have N-2.
struct GeometryJet {
  int n = 0;
  int order = 0;
  RJetMat g, gi;
  std::vector<RJet> gamma;     // Gamma^j_{lk}
  std::vector<RJet> dgamma;    // d_m Gamma^j_{lk}
  std::vector<RJet> riemann;   // R^j_{klm}
  RJetMat ricci_lower;         // R_{jk} = R^l_{jlk}
  RJetMat ricci;               // R^j_k
  std::vector<RJet> lap_coef;  // first-order coefficient of Laplace-Beltrami: d_a g^{ab} + g^{ab} Gamma^l_{al}
  std::vector<RJet> trace_gamma;  // Gamma^l_{kl}
  // g^{ml} d_m Gamma^j_{kl} + g^{ml} Gamma^j_{hl} Gamma^h_{km} - g^{ml} Gamma^j_{kh} Gamma^h_{ml}
  RJetMat conn_w;
  // g^{mr} d_m Gamma^j_{sr} - g^{mr} Gamma^j_{hr} Gamma^h_{sm} - g^{mr} Gamma^j_{sh} Gamma^h_{mr}
  RJetMat conn_f;

  const RJet& G(int j, int l, int k) const { return gamma[(j * n + l) * n + k]; }
  const RJet& dG(int j, int l, int k, int m) const { return dgamma[((j * n + l) * n + k) * n + m]; }
  const RJet& R(int j, int k, int l, int m) const { return riemann[((j * n + k) * n + l) * n + m]; }
  bool has_curvature() const { return !riemann.empty(); }
};

inline GeometryJet geometry_jet(const MetricField& metric, const Coords& x) {
  GeometryJet geo;
  const int n = static_cast<int>(x.size());
  geo.n = n;
  geo.order = x[0].order();
  if (geo.order < 1) throw JetDepthError();
  geo.g = metric(x);
  if (geo.g.rows() != n || geo.g.cols() != n) throw GeometryError("metric dimension mismatch");
  metric_inverse(values(geo.g));  // positive-definiteness check
  geo.gi = inverse(geo.g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      geo.gi(i, j) = 0.5 * (geo.gi(i, j) + geo.gi(j, i));
      geo.gi(j, i) = geo.gi(i, j);
    }

  std::vector<RJetMat> dg(n);
  for (int m = 0; m < n; ++m) dg[m] = partial(geo.g, m);
  std::vector<RJet> lower(n * n * n);  // Gamma_{m,lk}
  for (int m = 0; m < n; ++m)
    for (int l = 0; l < n; ++l)
      for (int k = l; k < n; ++k) {
        RJet v = 0.5 * (dg[l](k, m) + dg[k](l, m) - dg[m](l, k));
        lower[(m * n + l) * n + k] = v;
        lower[(m * n + k) * n + l] = v;
      }
  geo.gamma.assign(n * n * n, RJet());
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      for (int k = l; k < n; ++k) {
        RJet s;
        for (int m = 0; m < n; ++m)
          if (!geo.gi(j, m).is_zero() && !lower[(m * n + l) * n + k].is_zero())
            s += geo.gi(j, m) * lower[(m * n + l) * n + k];
        geo.gamma[(j * n + l) * n + k] = s;
        geo.gamma[(j * n + k) * n + l] = s;
      }

  geo.trace_gamma.assign(n, RJet());
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) geo.trace_gamma[k] += geo.G(l, k, l);

  geo.lap_coef.assign(n, RJet());
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      geo.lap_coef[b] += geo.gi(a, b).partial(a);
      if (!geo.gi(a, b).is_zero()) geo.lap_coef[b] += geo.gi(a, b) * geo.trace_gamma[a];
    }

  if (geo.order < 2) return geo;

  geo.dgamma.assign(n * n * n * n, RJet());
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) geo.dgamma[((j * n + l) * n + k) * n + m] = geo.G(j, l, k).partial(m);

  auto GG = [&](int j, int s, int a, int b, int c) {  // Gamma^j_{sa} Gamma^s_{bc}
    const RJet& x1 = geo.G(j, s, a);
    const RJet& x2 = geo.G(s, b, c);
    if (x1.is_zero() || x2.is_zero()) return RJet();
    return x1 * x2;
  };

  geo.riemann.assign(n * n * n * n, RJet());
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = l + 1; m < n; ++m) {
          RJet r = geo.dG(j, k, m, l) - geo.dG(j, k, l, m);
          for (int s = 0; s < n; ++s) r += GG(j, s, l, k, m) - GG(j, s, m, k, l);
          geo.riemann[((j * n + k) * n + l) * n + m] = r;
          geo.riemann[((j * n + k) * n + m) * n + l] = -r;
        }

  geo.ricci_lower = RJetMat(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) geo.ricci_lower(j, k) += geo.R(l, j, l, k);
  geo.ricci = geo.gi * geo.ricci_lower;

  geo.conn_w = RJetMat(n, n);
  geo.conn_f = RJetMat(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      RJet w, f;
      for (int m = 0; m < n; ++m)
        for (int l = 0; l < n; ++l) {
          const RJet& gml = geo.gi(m, l);
          if (gml.is_zero()) continue;
          RJet d = geo.dG(j, k, l, m);
          RJet p1, p2;
          for (int h = 0; h < n; ++h) {
            p1 += GG(j, h, l, k, m);
            if (!geo.G(j, k, h).is_zero() && !geo.G(h, m, l).is_zero()) p2 += geo.G(j, k, h) * geo.G(h, m, l);
          }
          w += gml * (d + p1 - p2);
          f += gml * (d - p1 - p2);
        }
      geo.conn_w(j, k) = w;
      geo.conn_f(j, k) = f;
    }
  return geo;
}

template <class T>
Jet<T> lift_coef(const RJet& x);

template <>
inline RJet lift_coef<double>(const RJet& x) {
  return x;
}
template <>
inline CJet lift_coef<cplx>(const RJet& x) {
  return to_complex(x);
}

// Raised gradient f^{;j} = g^{jl} d_l f.
template <class T>
std::vector<Jet<T>> raised_gradient(const GeometryJet& geo, const Jet<T>& f) {
  std::vector<Jet<T>> r(geo.n);
  for (int j = 0; j < geo.n; ++j)
    for (int l = 0; l < geo.n; ++l)
      if (!geo.gi(j, l).is_zero()) r[j] += lift_coef<T>(geo.gi(j, l)) * f.partial(l);
  return r;
}

template <class T>
Jet<T> laplace_beltrami(const GeometryJet& geo, const Jet<T>& f) {
  Jet<T> r;
  for (int b = 0; b < geo.n; ++b) {
    Jet<T> fb = f.partial(b);
    for (int a = 0; a < geo.n; ++a)
      if (!geo.gi(a, b).is_zero()) r += lift_coef<T>(geo.gi(a, b)) * fb.partial(a);
    if (!geo.lap_coef[b].is_zero()) r += lift_coef<T>(geo.lap_coef[b]) * fb;
  }
  return r;
}

// f^{;j;k} = g^{ja} g^{kb} (d_a d_b f - Gamma^c_{ab} d_c f)
inline RJetMat raised_hessian(const GeometryJet& geo, const RJet& f) {
  const int n = geo.n;
  RJetMat H(n, n), up(n, n);
  std::vector<RJet> df(n);
  for (int c = 0; c < n; ++c) df[c] = f.partial(c);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      RJet h = df[a].partial(b);
      for (int c = 0; c < n; ++c)
        if (!geo.G(c, a, b).is_zero()) h -= geo.G(c, a, b) * df[c];
      H(a, b) = h;
      H(b, a) = h;
    }
  up = geo.gi * H * geo.gi;
  return up;
}

// ---- operations on fields ------------------------------------------------

inline std::vector<RJet> christoffel(const MetricField& metric, const Point& x, int order = 2) {
  check_point(x);
  const JetSpace& sp = JetSpace::get(x.dim());
  return geometry_jet(metric, coordinate_jets(sp, x, order + 1)).gamma;
}

struct Curvature {
  std::vector<double> riemann;  // R^j_{klm}, index ((j n + k) n + l) n + m
  Eigen::MatrixXd ricci;        // mixed R^j_k
};

inline Curvature curvature(const MetricField& metric, const Point& x) {
  check_point(x);
  GeometryJet geo = geometry_jet(metric, coordinate_jets(JetSpace::get(x.dim()), x, 2));
  Curvature c;
  for (const auto& r : geo.riemann) c.riemann.push_back(r.value());
  c.ricci = values(geo.ricci);
  return c;
}

// Delta_g f at x as a jet of the requested order.
inline RJet laplace_beltrami(const MetricField& metric, const ScalarField& f, const Point& x, int order = 0) {
  check_point(x);
  Coords c = coordinate_jets(JetSpace::get(x.dim()), x, order + 2);
  GeometryJet geo = geometry_jet(metric, c);
  return laplace_beltrami(geo, f(c));
}

struct CovariantJets {
  Eigen::VectorXd grad;      // f^{;j}
  Eigen::MatrixXd hessian;   // f^{;j;k}
  Eigen::VectorXd grad_lap;  // (Delta_g f)^{;j}
};

inline CovariantJets covariant_jets(const MetricField& metric, const ScalarField& f, const Point& x) {
  check_point(x);
  Coords c = coordinate_jets(JetSpace::get(x.dim()), x, 3);
  GeometryJet geo = geometry_jet(metric, c);
  RJet fj = f(c);
  CovariantJets out;
  const int n = x.dim();
  out.grad.resize(n);
  out.grad_lap.resize(n);
  auto gr = raised_gradient(geo, fj);
  auto gl = raised_gradient(geo, laplace_beltrami(geo, fj));
  for (int j = 0; j < n; ++j) {
    out.grad(j) = gr[j].value();
    out.grad_lap(j) = gl[j].value();
  }
  out.hessian = values(raised_hessian(geo, fj));
  return out;
}

struct BoundaryNormalReport {
  double max_violation = 0.0;
  int worst_sample = -1;
};

inline BoundaryNormalReport verify_boundary_normal_form(const MetricField& metric, const std::vector<Point>& samples,
                                                        double tol = 1e-10) {
  BoundaryNormalReport rep;
  for (size_t s = 0; s < samples.size(); ++s) {
    const Point& x = samples[s];
    check_point(x);
    const int n = x.dim();
    GeometryJet geo = geometry_jet(metric, coordinate_jets(JetSpace::get(n), x, 1));
    double v = std::abs(geo.g(n - 1, n - 1).value() - 1.0);
    for (int a = 0; a < n - 1; ++a) v = std::max({v, std::abs(geo.g(a, n - 1).value()), std::abs(geo.g(n - 1, a).value())});
    for (int k = 0; k < n; ++k) v = std::max(v, std::abs(geo.G(n - 1, n - 1, k).value()));
    for (int l = 0; l < n; ++l) v = std::max(v, std::abs(geo.G(l, n - 1, n - 1).value()));
    if (v > rep.max_violation || rep.worst_sample < 0) {
      rep.max_violation = std::max(rep.max_violation, v);
      if (v >= rep.max_violation) rep.worst_sample = static_cast<int>(s);
    }
  }
  if (rep.max_violation > tol) {
    std::ostringstream os;
    os << "not boundary-normal: violation " << rep.max_violation << " at sample " << rep.worst_sample << " (x =";
    for (double c : samples[rep.worst_sample].x) os << ' ' << c;
    os << ")";
    throw GeometryError(os.str());
  }
  return rep;
}

// Residual of  -nabla*nabla(grad f) - grad(Delta f) - Ric(grad f)  at x, where the
// outer derivatives of the vector field f^{;j} are central differences of step h.
inline Eigen::VectorXd commutation_residual(const MetricField& metric, const ScalarField& f, const Point& x, double h) {
  check_point(x);
  const int n = x.dim();
  const JetSpace& sp = JetSpace::get(n);
  auto field = [&](const std::vector<double>& y) {
    Coords c = coordinate_jets(sp, Point{y}, 1);
    RJetMat g = metric(c);
    Eigen::MatrixXd gi = metric_inverse(values(g));
    RJet fj = f(c);
    Eigen::VectorXd X(n);
    for (int j = 0; j < n; ++j) {
      X(j) = 0.0;
      for (int l = 0; l < n; ++l) X(j) += gi(j, l) * fj.partial(l).value();
    }
    return X;
  };
  auto shifted = [&](int a, double sa, int b, double sb) {
    std::vector<double> y = x.x;
    if (a >= 0) y[a] += sa * h;
    if (b >= 0) y[b] += sb * h;
    return field(y);
  };

  Eigen::VectorXd X0 = field(x.x);
  std::vector<Eigen::VectorXd> d1(n);
  std::vector<std::vector<Eigen::VectorXd>> d2(n, std::vector<Eigen::VectorXd>(n));
  for (int a = 0; a < n; ++a) {
    Eigen::VectorXd p = shifted(a, 1, -1, 0), m = shifted(a, -1, -1, 0);
    d1[a] = (p - m) / (2 * h);
    d2[a][a] = (p - 2 * X0 + m) / (h * h);
    for (int b = 0; b < a; ++b) {
      d2[a][b] = (shifted(a, 1, b, 1) - shifted(a, 1, b, -1) - shifted(a, -1, b, 1) + shifted(a, -1, b, -1)) / (4 * h * h);
      d2[b][a] = d2[a][b];
    }
  }

  Coords c = coordinate_jets(sp, x, 3);
  GeometryJet geo = geometry_jet(metric, c);
  RJet fj = f(c);
  auto grad_lap = raised_gradient(geo, laplace_beltrami(geo, fj));
  Eigen::MatrixXd gi = values(geo.gi);
  Eigen::MatrixXd ric = values(geo.ricci);

  Eigen::VectorXd res(n);
  for (int j = 0; j < n; ++j) {
    double v = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) v += gi(a, b) * d2[a][b](j);
      v += geo.lap_coef[a].value() * d1[a](j);
    }
    for (int s = 0; s < n; ++s) {
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) v += 2.0 * gi(k, l) * geo.G(j, s, k).value() * d1[l](s);
      v += geo.conn_w(j, s).value() * X0(s);
      v -= ric(j, s) * X0(s);
    }
    v -= grad_lap[j].value();
    res(j) = v;
  }
  return res;
}

}  // namespace stokesdn
