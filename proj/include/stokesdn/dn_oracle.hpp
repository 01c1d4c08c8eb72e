#pragma once

// Dirichlet-to-Neumann matrix of the new system on a flat layered strip
// 0 <= x_n <= T, from two-point boundary value problems in x_n, and the
// comparison against the truncated symbol sum q1 + q0 + ...

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <map>
#include <vector>

#include "stokesdn/catalog.hpp"
#include "stokesdn/factorization.hpp"

namespace stokesdn {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LayeredProfile {
  int n = 2;
  ScalarField mu;  // depends on x_n only
  double rho = 1.0;
  double depth = 1.0;
  std::vector<double> k;  // tangential frequency, length n-1

  ProblemData problem() const { return ProblemData{catalog::flat(n), mu, rho}; }
};

inline double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct OracleOptions {
  double mesh_scale = 1.0;     // multiplies every step
  double max_condition = 1e12;
};

struct OracleResult {
  Eigen::MatrixXcd N;  // column j = -W'(0) for W(0) = e_j, W(T) = 0
  double condition = 0.0;
  int intervals = 0;
};

namespace detail {

// 4-stage Gauss-Legendre collocation tableau on [0, 1]
struct GaussTableau {
  Eigen::Vector4d c, b;
  Eigen::Matrix4d a;

  GaussTableau() {
    const double r1 = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(1.2));
    const double r2 = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(1.2));
    c << 0.5 * (1 - r2), 0.5 * (1 - r1), 0.5 * (1 + r1), 0.5 * (1 + r2);
    Eigen::Matrix4d V;
    for (int i = 0; i < 4; ++i)
      for (int p = 0; p < 4; ++p) V(i, p) = std::pow(c(i), p);
    const Eigen::Matrix4d L = V.inverse();  // column j: monomial coefficients of the j-th Lagrange basis
    for (int j = 0; j < 4; ++j) {
      b(j) = 0.0;
      for (int p = 0; p < 4; ++p) b(j) += L(p, j) / (p + 1);
      for (int i = 0; i < 4; ++i) {
        a(i, j) = 0.0;
        for (int p = 0; p < 4; ++p) a(i, j) += L(p, j) * std::pow(c(i), p + 1) / (p + 1);
      }
    }
  }
};

inline const GaussTableau& gauss4() {
  static const GaussTableau t;
  return t;
}

}  // namespace detail

// First-order system matrix for Z = (W, W') at depth y.
inline Eigen::MatrixXcd layered_system_matrix(const LayeredProfile& prof, double y) {
  const int n = prof.n, m = n + 1, N = n - 1;
  std::vector<double> xv(n, 0.0);
  xv[N] = y;
  Point x{xv};
  Coords c = coordinate_jets(JetSpace::get(n), x, 3);
  GeometryJet geo = geometry_jet(catalog::flat(n), c);
  ViscosityKit kit = viscosity_kit(geo, prof.mu(c), prof.rho);
  OperatorCoefficients op = new_system_coefficients(geo, kit);
  const cplx I(0, 1);
  Eigen::MatrixXcd A2(m, m), A1(m, m), A0(m, m);
  for (int r = 0; r < m; ++r)
    for (int cc = 0; cc < m; ++cc) {
      A2(r, cc) = op.C2(r, cc, N, N).value();
      cplx a1 = op.C1(r, cc, N).value();
      cplx a0 = op.C0(r, cc).value();
      for (int al = 0; al < N; ++al) {
        a1 += I * prof.k[al] * (op.C2(r, cc, N, al).value() + op.C2(r, cc, al, N).value());
        a0 += I * prof.k[al] * op.C1(r, cc, al).value();
        for (int be = 0; be < N; ++be) a0 -= prof.k[al] * prof.k[be] * op.C2(r, cc, al, be).value();
      }
      A1(r, cc) = a1;
      A0(r, cc) = a0;
    }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A2);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
  M.topRightCorner(m, m).setIdentity();
  M.bottomLeftCorner(m, m) = -lu.solve(A0);
  M.bottomRightCorner(m, m) = -lu.solve(A1);
  return M;
}

// Steps of at most 0.5/|k|, four times finer at the boundary.
inline std::vector<double> oracle_mesh(double depth, double kn, double scale) {
  const double hmax = scale * std::min(0.5 / kn, depth / 16.0);
  std::vector<double> y{0.0};
  while (y.back() < depth) {
    const double h = hmax * std::min(1.0, 0.25 + y.back() * kn / 4.0);
    y.push_back(std::min(depth, y.back() + h));
    if (depth - y.back() < 1e-3 * hmax) y.back() = depth;
  }
  return y;
}

// Interval propagator of the collocation scheme for Z' = M(y) Z.
inline Eigen::MatrixXcd collocation_propagator(const LayeredProfile& prof, double y0, double h) {
  const auto& g = detail::gauss4();
  std::vector<Eigen::MatrixXcd> Ms;
  for (int i = 0; i < 4; ++i) Ms.push_back(layered_system_matrix(prof, y0 + g.c(i) * h));
  const int D = static_cast<int>(Ms[0].rows());
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(4 * D, 4 * D), R(4 * D, D);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) S.block(i * D, j * D, D, D) -= h * g.a(i, j) * Ms[i];
    R.block(i * D, 0, D, D) = Ms[i];
  }
  Eigen::MatrixXcd K = S.partialPivLu().solve(R);
  Eigen::MatrixXcd Phi = Eigen::MatrixXcd::Identity(D, D);
  for (int i = 0; i < 4; ++i) Phi += h * g.b(i) * K.block(i * D, 0, D, D);
  return Phi;
}

namespace detail {

// Hager-Higham estimate of |A^{-1}|_1 from an existing factorization.
template <class LU>
double inverse_norm1(LU& lu, Eigen::Index dim) {
  Eigen::VectorXcd x = Eigen::VectorXcd::Constant(dim, cplx(1.0 / dim));
  double est = 0.0;
  for (int it = 0; it < 5; ++it) {
    Eigen::VectorXcd y = lu.solve(x);
    est = y.cwiseAbs().sum();
    Eigen::VectorXcd xi(dim);
    for (Eigen::Index i = 0; i < dim; ++i) xi(i) = std::abs(y(i)) > 0 ? y(i) / std::abs(y(i)) : cplx(1.0);
    Eigen::VectorXcd z = lu.adjoint().solve(xi);
    Eigen::Index j;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= std::real(z.dot(x))) break;
    x.setZero();
    x(j) = 1.0;
  }
  return est;
}

}  // namespace detail

inline OracleResult layered_ode_dn(const LayeredProfile& prof, const OracleOptions& opt = {}) {
  const int n = prof.n, m = n + 1, D = 2 * m;
  if (n != 2 && n != 3) throw OracleError("dimension must be 2 or 3");
  if (static_cast<int>(prof.k.size()) != n - 1) throw OracleError("frequency must have n-1 components");
  const double kn = norm(prof.k);
  if (!(kn > 0.0)) throw OracleError("frequency must be nonzero");
  if (!(prof.depth > 0.0)) throw OracleError("strip depth must be positive");
  if (!prof.mu.eval) throw OracleError("viscosity not set");

  const std::vector<double> y = oracle_mesh(prof.depth, kn, opt.mesh_scale);
  const int M = static_cast<int>(y.size()) - 1;
  for (double yy : y) {
    Coords c(n, RJet(0.0));
    c[n - 1] = RJet(yy);
    double v = 0.0;
    try {
      v = prof.mu(c).value();
    } catch (const FieldError&) {
    }
    if (!(v > 0.0)) throw OracleError("viscosity must be positive on the strip");
  }

  using Trip = Eigen::Triplet<cplx>;
  std::vector<Trip> trips;
  const int rows = (M + 1) * D;
  for (int r = 0; r < m; ++r) trips.emplace_back(r, r, 1.0);  // W(0)
  for (int i = 0; i < M; ++i) {
    Eigen::MatrixXcd Phi = collocation_propagator(prof, y[i], y[i + 1] - y[i]);
    const int r0 = m + i * D;
    for (int a = 0; a < D; ++a) {
      trips.emplace_back(r0 + a, (i + 1) * D + a, 1.0);
      for (int b = 0; b < D; ++b)
        if (Phi(a, b) != 0.0) trips.emplace_back(r0 + a, i * D + b, -Phi(a, b));
    }
  }
  for (int r = 0; r < m; ++r) trips.emplace_back(m + M * D + r, M * D + r, 1.0);  // W(T)
  Eigen::SparseMatrix<cplx> A(rows, rows);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw OracleError("resonant rho, adjust shift (singular boundary value problem)");
  double anorm = 0.0;
  for (int j = 0; j < A.outerSize(); ++j) {
    double s = 0.0;
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(A, j); it; ++it) s += std::abs(it.value());
    anorm = std::max(anorm, s);
  }
  OracleResult out;
  out.intervals = M;
  out.condition = anorm * detail::inverse_norm1(lu, rows);
  if (!(out.condition <= opt.max_condition))
    throw OracleError("resonant rho, adjust shift (condition estimate " + std::to_string(out.condition) + ")");

  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(rows, m);
  for (int j = 0; j < m; ++j) rhs(j, j) = 1.0;
  Eigen::MatrixXcd Z = lu.solve(rhs);
  out.N = -Z.block(m, 0, m, m);  // W'(0) sits in the second half of Z_0
  return out;
}

// sum_{j < K} q_{1-j} at (x', 0) and xi' = k
inline Eigen::MatrixXcd asymptotic_dn(const ProblemData& d, const std::vector<double>& xprime,
                                      const std::vector<double>& k, int K) {
  if (K < 1) throw std::invalid_argument("need at least one symbol term");
  std::vector<double> x = xprime;
  x.push_back(0.0);
  FactorizationResult r = full_symbol(d, CotangentSample{Point{x}, k}, K - 1);
  return evaluate_sum(r.q);
}

inline Eigen::MatrixXcd asymptotic_dn(const LayeredProfile& prof, int K) {
  return asymptotic_dn(prof.problem(), std::vector<double>(prof.n - 1, 0.0), prof.k, K);
}

struct ConvergenceReport {
  std::vector<double> knorm;
  std::vector<double> condition;
  std::map<int, std::vector<double>> residual;  // keyed by K
  std::map<int, double> order;                  // fitted p in residual ~ |k|^{-p}
  bool strip_ok = true;                         // T |k| >= 8 on the whole ladder
};

inline double fit_decay_order(const std::vector<double>& k, const std::vector<double>& r) {
  const size_t n = k.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double x = std::log(k[i]), y = std::log(std::max(r[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Profile frequency is overwritten by each ladder entry.
inline ConvergenceReport convergence_report(LayeredProfile prof, const std::vector<std::vector<double>>& ladder,
                                            const std::vector<int>& Ks, const OracleOptions& opt = {}) {
  if (ladder.size() < 4) throw std::invalid_argument("frequency ladder needs at least 4 entries");
  ConvergenceReport rep;
  for (const auto& k : ladder) {
    prof.k = k;
    const double kn = norm(k);
    if (prof.depth * kn < 8.0) rep.strip_ok = false;
    OracleResult o = layered_ode_dn(prof, opt);
    rep.knorm.push_back(kn);
    rep.condition.push_back(o.condition);
    for (int K : Ks) rep.residual[K].push_back((o.N - asymptotic_dn(prof, K)).norm());
  }
  for (int K : Ks) rep.order[K] = fit_decay_order(rep.knorm, rep.residual[K]);
  return rep;
}

}  // namespace stokesdn
