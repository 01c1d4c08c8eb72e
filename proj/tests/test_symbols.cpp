#include <gtest/gtest.h>

#include <cmath>

#include "stokesdn/catalog.hpp"
#include "stokesdn/stokes_symbols.hpp"

using namespace stokesdn;

namespace {

ProblemData problem(const std::string& metric, const std::string& mu, int n, double rho = 1.0) {
  return ProblemData{catalog::metric(metric, n), catalog::viscosity(mu, n), rho};
}

CotangentSample sample(std::vector<double> x, std::vector<double> xi) { return {Point{std::move(x)}, std::move(xi)}; }

// largest coefficient difference over all derivatives carried by the jets
double maxdiff_jets(const CJetMat& A, const CJetMat& B) {
  double d = 0.0;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) {
      CJet e = A(i, j) - B(i, j);
      for (const auto& c : e.coeffs()) d = std::max(d, std::abs(c));
    }
  return d;
}

}  // namespace

TEST(StokesSymbols, DisplaysMatchOperatorCoefficients) {
  for (int n : {2, 3})
    for (const char* metric : {"flat", "hyperbolic", "curved", "warped"})
      for (const char* mu : {"constant", "sine", "exp", "mixed"}) {
        std::vector<double> x(n, 0.3), xi(n - 1, 0.7);
        x[n - 1] = 0.2;
        xi[0] = -1.1;
        SymbolContext c = make_context(problem(metric, mu, n), sample(x, xi), 3);
        InteriorSymbols a = interior_symbols(c), b = symbols_from_coefficients(c);
        std::string tag = std::string(metric) + "/" + mu + " n=" + std::to_string(n);
        EXPECT_LT(maxdiff_jets(a.b1, b.b1), 1e-12) << tag;
        EXPECT_LT(maxdiff_jets(a.b0, b.b0), 1e-12) << tag;
        EXPECT_LT(maxdiff_jets(a.c2, b.c2), 1e-12) << tag;
        EXPECT_LT(maxdiff_jets(a.c1, b.c1), 1e-12) << tag;
        EXPECT_LT(maxdiff_jets(a.c0, b.c0), 1e-12) << tag;
      }
}

TEST(StokesSymbols, FlatMetricAnyViscosity) {
  SymbolContext c = make_context(problem("flat", "mixed", 3), sample({0.1, 0.2, 0.3}, {0.6, -0.8}), 3);
  auto [b1, b0] = assemble_b(c);
  EXPECT_EQ(values(b1).cwiseAbs().maxCoeff(), 0.0);
  CSymbols cs = assemble_c(c);
  Eigen::MatrixXcd c2 = values(cs.c2);
  EXPECT_LT((c2 + Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(StokesSymbols, FlatLayeredNormalEntry) {
  const double rho = 0.7, amp = 0.4, rate = 1.3, xn = 0.25;
  ProblemData d{catalog::flat(2), catalog::exp_viscosity(2, amp, rate), rho};
  SymbolContext c = make_context(d, sample({0.0, xn}, {2.0}), 3);
  auto [b1, b0] = assemble_b(c);
  double mu = 1 + amp * std::exp(-rate * xn), dmu = -rate * amp * std::exp(-rate * xn);
  EXPECT_NEAR(b0(1, 1).value().real(), -dmu / (mu + rho), 1e-14);
  EXPECT_NEAR(b0(1, 1).value().imag(), 0.0, 1e-15);
}

TEST(StokesSymbols, B1IsNilpotent) {
  for (const char* metric : {"hyperbolic", "curved", "warped"}) {
    SymbolContext c = make_context(problem(metric, "sine", 3), sample({0.4, -0.2, 0.1}, {1.0, 0.3}), 3);
    Eigen::MatrixXcd b1 = values(assemble_b(c).first);
    EXPECT_GT(b1.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((b1 * b1).cwiseAbs().maxCoeff(), 0.0) << metric;
  }
}

TEST(StokesSymbols, FlatConstantViscosity) {
  const double mu = 2.5, rho = 1.0;
  ProblemData d{catalog::flat(3), catalog::constant_viscosity(mu), rho};
  SymbolContext c = make_context(d, sample({0.1, 0.2, 0.3}, {0.6, -0.8}), 3);
  CSymbols cs = assemble_c(c);
  Eigen::MatrixXcd c1 = values(cs.c1), c0 = values(cs.c0);
  const double mua = mu / std::sqrt(mu + rho);
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(4, 4);
  expect(3, 0) = cplx(0, mua * 0.6);
  expect(3, 1) = cplx(0, mua * -0.8);
  EXPECT_LT((c1 - expect).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(c0.cwiseAbs().maxCoeff(), 0.0);
  auto [b1, b0] = assemble_b(c);
  Eigen::MatrixXcd B0 = values(b0);
  Eigen::MatrixXcd eb = Eigen::MatrixXcd::Zero(4, 4);
  eb(3, 2) = mua;
  EXPECT_LT((B0 - eb).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(StokesSymbols, Homogeneity) {
  auto d = problem("warped", "mixed", 3);
  auto at = [&](double lam) {
    return interior_symbols(make_context(d, sample({0.2, 0.1, 0.15}, {0.5 * lam, -0.9 * lam}), 3));
  };
  InteriorSymbols s1 = at(1.0);
  for (double lam : {2.0, 5.0, 10.0}) {
    InteriorSymbols s = at(lam);
    auto rel = [](const CJetMat& A, const CJetMat& B, double f) {
      Eigen::MatrixXcd a = values(A), b = f * values(B);
      return (a - b).norm() / std::max(b.norm(), 1e-300);
    };
    EXPECT_LT(rel(s.b1, s1.b1, lam), 1e-12);
    EXPECT_LT(rel(s.b0, s1.b0, 1.0), 1e-12);
    EXPECT_LT(rel(s.c2, s1.c2, lam * lam), 1e-12);
    EXPECT_LT(rel(s.c1, s1.c1, lam), 1e-12);
    EXPECT_LT(rel(s.c0, s1.c0, 1.0), 1e-12);
  }
}

TEST(StokesSymbols, RejectsNonPositiveViscosity) {
  ProblemData d{catalog::flat(2), catalog::constant_viscosity(-1.0), 1.0};
  EXPECT_THROW(make_context(d, sample({0.0, 0.1}, {1.0}), 3), FieldError);
}
