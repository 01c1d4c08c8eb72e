#include <gtest/gtest.h>

#include <random>

#include "stokesdn/catalog.hpp"
#include "stokesdn/factorization.hpp"
#include "stokesdn/symbol_algebra.hpp"

using namespace stokesdn;

namespace {

CJetMat constant_matrix(const Eigen::MatrixXcd& A) {
  CJetMat M(static_cast<int>(A.rows()), static_cast<int>(A.cols()));
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) M(i, j) = CJet(A(i, j));
  return M;
}

Eigen::MatrixXcd random_matrix(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = cplx(nd(rng), nd(rng));
  return A;
}

GradedSymbol random_constant_symbol(std::mt19937_64& rng, int n, std::vector<int> degrees) {
  GradedSymbol s{n, {}};
  for (int d : degrees) s.terms.emplace(d, constant_matrix(random_matrix(rng, n + 1)));
  return s;
}

CotangentSample sample(std::vector<double> x, std::vector<double> xi) { return {Point{std::move(x)}, std::move(xi)}; }

ProblemData problem(const std::string& metric, const std::string& mu, int n) {
  return ProblemData{catalog::metric(metric, n), catalog::viscosity(mu, n), 1.0};
}

SymbolFamily q_family(const ProblemData& d, int K) {
  return [d, K](const CotangentSample& s) { return full_symbol(d, s, K).q; };
}

}  // namespace

TEST(Evaluate, FlatPrincipalTermIsIdentityOnUnitSphere) {
  FactorizationResult r = full_symbol(problem("flat", "mixed", 3), sample({0.1, 0.2, 0.3}, {0.6, 0.8}), 1);
  auto v = evaluate(r.q, {1});
  EXPECT_LT((v.at(1) - Eigen::MatrixXcd::Identity(4, 4)).norm(), 1e-15);
}

TEST(Evaluate, ScalingAndMissingDegree) {
  auto d = problem("curved", "sine", 2);
  auto a = full_symbol(d, sample({0.3, 0.1}, {0.7}), 1).q;
  auto b = full_symbol(d, sample({0.3, 0.1}, {1.4}), 1).q;
  auto va = evaluate(a, {1, 0}), vb = evaluate(b, {1, 0});
  EXPECT_LT((vb.at(1) - 2.0 * va.at(1)).norm(), 1e-14);
  EXPECT_LT((vb.at(0) - va.at(0)).norm() / va.at(0).norm(), 1e-10);
  EXPECT_LT((evaluate_sum(a) - va.at(1) - va.at(0)).norm(), 1e-15);
  try {
    evaluate(a, {-1});
    FAIL();
  } catch (const DegreeError& e) {
    EXPECT_NE(std::string(e.what()).find("degree not computed"), std::string::npos);
  }
}

TEST(Homogeneity, FlatPrincipalTermExact) {
  auto dev = homogeneity_check(q_family(problem("flat", "constant", 2), 0), {sample({0.0, 0.2}, {1.3})}, {2.0});
  EXPECT_EQ(dev.at(1), 0.0);
}

TEST(Homogeneity, CurvedZerothOrder) {
  auto d = problem("curved", "mixed", 3);
  std::vector<CotangentSample> ss{sample({0.1, 0.2, 0.05}, {0.4, -0.9}), sample({-0.5, 0.3, 0.2}, {1.1, 0.2})};
  auto dev = homogeneity_check(q_family(d, 1), ss, {2.0, 5.0, 10.0});
  EXPECT_LE(dev.at(0), 1e-10);
  EXPECT_LE(dev.at(1), 1e-10);
}

TEST(Homogeneity, DetectsCorruptedTerm) {
  auto d = problem("hyperbolic", "sine", 2);
  SymbolFamily bad = [d](const CotangentSample& s) {
    GradedSymbol q = full_symbol(d, s, 1).q;
    q.terms.at(0) = q.terms.at(1);  // a degree-1 object filed as degree 0
    return q;
  };
  const double lam = 3.0;
  auto dev = homogeneity_check(bad, {sample({0.2, 0.1}, {0.8})}, {lam});
  EXPECT_NEAR(dev.at(0), std::abs(lam - 1.0), 1e-12);
}

TEST(Homogeneity, RejectsNonPositiveScale) {
  EXPECT_THROW(homogeneity_check(q_family(problem("flat", "constant", 2), 0), {sample({0.0, 0.2}, {1.0})}, {0.0}),
               std::invalid_argument);
}

TEST(Compose, XIndependentIsMatrixProduct) {
  std::mt19937_64 rng(7);
  GradedSymbol a = random_constant_symbol(rng, 2, {1, 0, -1});
  GradedSymbol b = random_constant_symbol(rng, 2, {2, 0});
  GradedSymbol c = asymptotic_compose(a, b, 5);
  for (int d = 3; d >= -1; --d) {
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(3, 3);
    for (const auto& [j, aj] : a.terms)
      for (const auto& [k, bk] : b.terms)
        if (j + k == d) expect += values(aj) * values(bk);
    EXPECT_LT((values(c.terms.at(d)) - expect).norm(), 1e-14) << d;
  }
  for (const auto& [d, t] : c.terms) EXPECT_LE(d, a.top() + b.top());
}

TEST(Compose, SquareOfXIndependentSymbol) {
  // flat metric with constant viscosity: symbol is x-independent but xi-dependent
  FactorizationResult r = full_symbol(problem("flat", "constant", 3), sample({0.1, 0.2, 0.3}, {0.6, -1.2}), 2);
  GradedSymbol qq = asymptotic_compose(r.q, r.q, 3);
  Eigen::MatrixXcd q1 = values(r.q.terms.at(1)), q0 = values(r.q.terms.at(0)), qm = values(r.q.terms.at(-1));
  EXPECT_LT((values(qq.terms.at(2)) - q1 * q1).norm(), 1e-14);
  EXPECT_LT((values(qq.terms.at(1)) - q1 * q0 - q0 * q1).norm(), 1e-14);
  EXPECT_LT((values(qq.terms.at(0)) - q1 * qm - qm * q1 - q0 * q0).norm(), 1e-14);
}

TEST(Compose, AssociativeOnConstantSymbols) {
  std::mt19937_64 rng(11);
  GradedSymbol a = random_constant_symbol(rng, 3, {1, 0});
  GradedSymbol b = random_constant_symbol(rng, 3, {1, -1});
  GradedSymbol c = random_constant_symbol(rng, 3, {0, -1});
  GradedSymbol l = asymptotic_compose(asymptotic_compose(a, b, 4), c, 4);
  GradedSymbol r = asymptotic_compose(a, asymptotic_compose(b, c, 4), 4);
  for (int d = 2; d >= -1; --d)
    EXPECT_LT((values(l.terms.at(d)) - values(r.terms.at(d))).norm(), 1e-12 * values(l.terms.at(d)).norm());
}

TEST(Compose, TangentialProductRule) {
  // a = xi_1 I (degree 1), b = x_1^2 I (degree 0): (a # b)_0 = -i * 2 x_1 I
  const JetSpace& z = JetSpace::get(3);
  const double x1 = 0.7;
  CJet xi = CJet::variable(z, 3, 2, cplx(1.5)), xv = CJet::variable(z, 3, 0, cplx(x1));
  GradedSymbol a{2, {{1, xi * CJetMat::identity(3)}}}, b{2, {{0, (xv * xv) * CJetMat::identity(3)}}};
  GradedSymbol c = asymptotic_compose(a, b, 2);
  EXPECT_LT(std::abs(c.terms.at(1)(0, 0).value() - 1.5 * x1 * x1), 1e-15);
  EXPECT_LT(std::abs(c.terms.at(0)(1, 1).value() - cplx(0, -2 * x1)), 1e-15);
}

TEST(Compose, InsufficientJetDepth) {
  const JetSpace& z = JetSpace::get(3);
  CJet xi = CJet::variable(z, 1, 2, cplx(1.0)), xv = CJet::variable(z, 1, 0, cplx(0.2));
  GradedSymbol a{2, {{1, (xi * xi) * CJetMat::identity(3)}}}, b{2, {{0, (xv * xv) * CJetMat::identity(3)}}};
  try {
    asymptotic_compose(a, b, 3);
    FAIL();
  } catch (const JetDepthError& e) {
    EXPECT_STREQ(e.what(), "jet depth exceeded");
  }
}

TEST(KronVec, IdentityCase) {
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(2, 2);
  KronVec k = kron_vec(I, I, I);
  EXPECT_EQ((k.U - 2.0 * Eigen::MatrixXcd::Identity(4, 4)).norm(), 0.0);
}

TEST(KronVec, SylvesterIdentityOnRandomMatrices) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXcd L = random_matrix(rng, 3), M = random_matrix(rng, 3), X = random_matrix(rng, 3);
    KronVec k = kron_vec(L, M, X);
    EXPECT_EQ(k.U.rows(), 9);
    EXPECT_LT((k.U * KronVec::vec(X) - KronVec::vec(L * X + X * M)).norm(), 1e-12);
    EXPECT_EQ((KronVec::unvec(KronVec::vec(X), 3) - X).norm(), 0.0);
    EXPECT_EQ((k.vecE - KronVec::vec(X)).norm(), 0.0);
  }
}

TEST(KronVec, DimensionMismatch) {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(2, 2), B = Eigen::MatrixXcd::Identity(3, 3);
  EXPECT_THROW(kron_vec(A, B, A), std::invalid_argument);
  EXPECT_THROW(KronVec::unvec(Eigen::VectorXcd::Zero(5), 2), std::invalid_argument);
}
