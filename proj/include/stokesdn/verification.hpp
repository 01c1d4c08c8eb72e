#pragma once

// Identity suite over a batch of cotangent samples: degree-2 identity,
// Sylvester machinery, factorization residuals, homogeneity and the exact
// algebraic structure of the principal parts.  Reports worst cases.

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "stokesdn/factorization.hpp"

namespace stokesdn {

struct Worst {
  double value = 0.0;
  int sample = -1;

  void update(double v, int s) {
    if (v > value || sample < 0) {
      value = v;
      sample = s;
    }
  }
};

struct IdentityStats {
  int samples = 0;
  Worst degree2;     // |q1^2 - b1 q1 + c2| / |c2|
  Worst unitarity;   // |U U^{-1} - I|
  Worst sylvester;   // relative residual of every Sylvester solve
  Worst compose;     // relative factorization residual, degrees 2 .. 2-K
  std::map<int, Worst> homogeneity;
  // exact structure, each relative to the natural scale
  Worst b1_square, q1_nilpotent, b1q1_commute, kron_cross;
};

namespace detail {

inline double scaled(const Eigen::MatrixXcd& r, double scale) { return scale > 0.0 ? r.norm() / scale : r.norm(); }

}  // namespace detail

inline IdentityStats identity_suite(const ProblemData& d, const std::vector<CotangentSample>& samples, int K = 2,
                                    const std::vector<double>& lambdas = {2.0, 5.0, 10.0}) {
  IdentityStats st;
  st.samples = static_cast<int>(samples.size());
  const int m = d.metric.n + 1;
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(m, m);
  for (int i = 0; i < st.samples; ++i) {
    const CotangentSample& s = samples[i];
    FactorizationResult r = full_symbol(d, s, K);
    st.degree2.update(r.principal_residual, i);
    st.unitarity.update(r.unitarity, i);
    for (auto [deg, e] : r.sylvester_residual) st.sylvester.update(e, i);
    for (auto [deg, e] : r.compose_residual) st.compose.update(e, i);

    const Eigen::MatrixXcd Q = values(r.q.terms.at(1)), B = values(r.sym.b1);
    const Eigen::MatrixXcd A1 = values(r.kit.A1), A2 = values(r.kit.A2);
    const double sn = r.kit.s.value().real();
    st.b1_square.update(detail::scaled(B * B, B.squaredNorm()), i);
    st.q1_nilpotent.update(detail::scaled((Q - sn * I) * (Q - sn * I), sn * sn), i);
    st.b1q1_commute.update(detail::scaled(B * Q - Q * B, B.norm() * Q.norm()), i);
    const Eigen::MatrixXcd X = kron(I, A1), Y = kron(A2.transpose(), I);
    st.kron_cross.update(detail::scaled(X * Y - Y * X, X.norm() * Y.norm()), i);
    st.kron_cross.update(detail::scaled(X * X, X.squaredNorm()), i);
    st.kron_cross.update(detail::scaled(Y * Y, Y.squaredNorm()), i);

    auto dev = homogeneity_check([&](const CotangentSample& x) { return full_symbol(d, x, K).q; }, {s}, lambdas);
    for (auto [deg, e] : dev) st.homogeneity[deg].update(e, i);
  }
  return st;
}

// Flat metric: q1 = |xi'| I exactly; with constant viscosity also b1 = 0, c0 = 0.
struct FlatStats {
  int samples = 0;
  Worst q1_scalar, b1_zero, c0_zero;
};

inline FlatStats flat_specialization(const ProblemData& d, const std::vector<CotangentSample>& samples) {
  FlatStats st;
  st.samples = static_cast<int>(samples.size());
  const int m = d.metric.n + 1;
  for (int i = 0; i < st.samples; ++i) {
    SymbolContext c = make_context(d, samples[i], 3);
    double s2 = 0.0;
    for (double v : samples[i].xi) s2 += v * v;
    const Eigen::MatrixXcd Q = values(principal_q1(c));
    st.q1_scalar.update((Q - std::sqrt(s2) * Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff(), i);
    InteriorSymbols sym = interior_symbols(c);
    st.b1_zero.update(values(sym.b1).cwiseAbs().maxCoeff(), i);
    st.c0_zero.update(values(sym.c0).cwiseAbs().maxCoeff(), i);
  }
  return st;
}

inline std::string describe(const CotangentSample& s) {
  std::ostringstream os;
  os.precision(6);
  os << "x=(";
  for (size_t i = 0; i < s.x.x.size(); ++i) os << (i ? "," : "") << s.x.x[i];
  os << ") xi=(";
  for (size_t i = 0; i < s.xi.size(); ++i) os << (i ? "," : "") << s.xi[i];
  os << ")";
  return os.str();
}

}  // namespace stokesdn
