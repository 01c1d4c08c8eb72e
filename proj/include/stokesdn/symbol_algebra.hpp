#pragma once

// Graded matrix symbols: evaluation, homogeneity checks, the truncated
// tangential composition a # b, and Kronecker/vec helpers for Sylvester solves.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "stokesdn/dense.hpp"
#include "stokesdn/fields.hpp"

namespace stokesdn {

class DegreeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Terms q_d at one cotangent sample.  Entries are complex jets in
// (x_1..x_n, xi_1..xi_{n-1}); tangential x' are the first n-1 variables and
// xi' the last n-1.
struct GradedSymbol {
  int n = 0;
  std::map<int, CJetMat> terms;

  int top() const { return terms.empty() ? 0 : terms.rbegin()->first; }
  int bottom() const { return terms.empty() ? 0 : terms.begin()->first; }
};

// A symbol-valued function of the cotangent sample, for scaling studies.
using SymbolFamily = std::function<GradedSymbol(const CotangentSample&)>;

inline std::map<int, Eigen::MatrixXcd> evaluate(const GradedSymbol& s, const std::set<int>& degrees) {
  std::map<int, Eigen::MatrixXcd> out;
  for (int d : degrees) {
    auto it = s.terms.find(d);
    if (it == s.terms.end()) throw DegreeError("degree not computed: " + std::to_string(d));
    out[d] = values(it->second);
  }
  return out;
}

inline Eigen::MatrixXcd evaluate_sum(const GradedSymbol& s) {
  Eigen::MatrixXcd sum;
  for (const auto& [d, m] : s.terms) {
    Eigen::MatrixXcd v = values(m);
    if (sum.size() == 0) sum = Eigen::MatrixXcd::Zero(v.rows(), v.cols());
    sum += v;
  }
  return sum;
}

// max over samples and scales of |T_d(x, lam xi) - lam^d T_d(x, xi)| / |T_d(x, xi)|
inline std::map<int, double> homogeneity_check(const SymbolFamily& sym, const std::vector<CotangentSample>& samples,
                                               const std::vector<double>& lambdas) {
  std::map<int, double> dev;
  for (double lam : lambdas)
    if (!(lam > 0.0)) throw std::invalid_argument("scales must be positive");
  for (const auto& s : samples) {
    GradedSymbol base = sym(s);
    for (const auto& [d, m] : base.terms) dev.emplace(d, 0.0);
    for (double lam : lambdas) {
      CotangentSample sc = s;
      for (double& v : sc.xi) v *= lam;
      GradedSymbol scaled = sym(sc);
      for (const auto& [d, m] : base.terms) {
        auto it = scaled.terms.find(d);
        if (it == scaled.terms.end()) throw DegreeError("degree not computed: " + std::to_string(d));
        Eigen::MatrixXcd b = values(m), v = values(it->second);
        const double nb = b.norm();
        const double diff = (v - std::pow(lam, d) * b).norm();
        dev[d] = std::max(dev[d], nb > 0.0 ? diff / nb : diff);
      }
    }
  }
  return dev;
}

namespace detail {

// all multi-indices over `vars` slots with |theta| = order
inline void multi_indices(int vars, int order, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == vars - 1) {
    cur.push_back(order);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int a = order; a >= 0; --a) {
    cur.push_back(a);
    multi_indices(vars, order - a, cur, out);
    cur.pop_back();
  }
}

inline CJetMat derivative(const CJetMat& A, const std::vector<int>& theta, int first_var) {
  CJetMat R = A;
  for (size_t v = 0; v < theta.size(); ++v)
    for (int q = 0; q < theta[v]; ++q) R = partial(R, first_var + static_cast<int>(v));
  return R;
}

}  // namespace detail

// Degree-d term of a # b: sum over j + k - |theta| = d of
// (-i)^{|theta|}/theta! d_xi'^theta a_j d_x'^theta b_k, over the terms present.
inline CJetMat compose_term(const GradedSymbol& a, const GradedSymbol& b, int d, int m) {
  const int n = a.n, T = n - 1;
  CJetMat out(m, m);
  for (const auto& [j, aj] : a.terms)
    for (const auto& [k, bk] : b.terms) {
      const int th = j + k - d;
      if (th < 0) continue;
      std::vector<std::vector<int>> thetas;
      std::vector<int> cur;
      detail::multi_indices(T, th, cur, thetas);
      cplx pref = 1.0;
      for (int q = 0; q < th; ++q) pref *= cplx(0, -1);
      for (const auto& theta : thetas) {
        double fact = 1.0;
        for (int v : theta)
          for (int q = 2; q <= v; ++q) fact *= q;
        CJetMat da = detail::derivative(aj, theta, n);  // xi' variables start at index n
        CJetMat db = detail::derivative(bk, theta, 0);  // x' variables
        out += CJet(pref / fact) * (da * db);
      }
    }
  return out;
}

// a # b keeping the K highest degrees top(a) + top(b), ..., top(a) + top(b) - K + 1.
inline GradedSymbol asymptotic_compose(const GradedSymbol& a, const GradedSymbol& b, int K) {
  if (a.terms.empty() || b.terms.empty()) return GradedSymbol{a.n, {}};
  if (K < 1) throw std::invalid_argument("truncation must be positive");
  if (a.n != b.n) throw std::invalid_argument("dimension mismatch");
  const int m = a.terms.begin()->second.rows();
  const int top = a.top() + b.top();
  GradedSymbol out{a.n, {}};
  for (int d = top; d > top - K; --d) out.terms.emplace(d, compose_term(a, b, d, m));
  return out;
}

// U = I (x) L + M^T (x) I acting on column-stacked vec(X), so U vec X = vec(L X + X M).
struct KronVec {
  Eigen::MatrixXcd U;
  Eigen::VectorXcd vecE;

  static Eigen::VectorXcd vec(const Eigen::MatrixXcd& X) {
    return Eigen::Map<const Eigen::VectorXcd>(X.data(), X.size());
  }
  static Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int m) {
    if (v.size() != static_cast<Eigen::Index>(m) * m) throw std::invalid_argument("dimension mismatch");
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), m, m);
  }
};

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  Eigen::MatrixXcd K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

inline KronVec kron_vec(const Eigen::MatrixXcd& L, const Eigen::MatrixXcd& M, const Eigen::MatrixXcd& E) {
  const Eigen::Index m = L.rows();
  if (L.cols() != m || M.rows() != m || M.cols() != m || E.rows() != m || E.cols() != m)
    throw std::invalid_argument("dimension mismatch");
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(m, m);
  return KronVec{kron(I, L) + kron(M.transpose(), I), KronVec::vec(E)};
}

}  // namespace stokesdn
