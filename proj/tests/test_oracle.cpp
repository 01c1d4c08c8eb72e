#include <gtest/gtest.h>

#include <chrono>

#include "stokesdn/dn_oracle.hpp"

using namespace stokesdn;

namespace {

// unit direction used throughout: (1) for n=2, (0.6, 0.8) for n=3
std::vector<double> direction(int n, double kn) {
  return n == 2 ? std::vector<double>{kn} : std::vector<double>{0.6 * kn, 0.8 * kn};
}

LayeredProfile profile(int n, ScalarField mu, double kn, double rho = 1.0) {
  LayeredProfile p;
  p.n = n;
  p.mu = std::move(mu);
  p.rho = rho;
  p.k = direction(n, kn);
  return p;
}

std::vector<std::vector<double>> ladder(int n, std::vector<double> ks = {8, 16, 32, 64}) {
  std::vector<std::vector<double>> out;
  for (double k : ks) out.push_back(direction(n, k));
  return out;
}

}  // namespace

TEST(Oracle, ConstantViscosityTangentialEntryIsStripLaplacian) {
  for (int n : {2, 3})
    for (double kn : {2.0, 5.0, 12.0}) {
      LayeredProfile p = profile(n, catalog::constant_viscosity(1.3), kn);
      p.depth = 0.7;
      OracleResult o = layered_ode_dn(p);
      EXPECT_NEAR(o.N(0, 0).real(), kn / std::tanh(kn * p.depth), 1e-9 * kn) << n << " " << kn;
      EXPECT_LT(std::abs(o.N(0, 0).imag()), 1e-10 * kn);
    }
}

TEST(Oracle, LeadingBehaviourIsScalar) {
  for (int n : {2, 3}) {
    const double kn = 40.0;
    OracleResult o = layered_ode_dn(profile(n, catalog::constant_viscosity(1.0), kn));
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n + 1, n + 1);
    EXPECT_LT((o.N / kn - I).norm(), 0.05);
  }
}

TEST(Oracle, LayeredNormalEntryTendsToHandValue) {
  const double amp = 0.5, rate = 1.0, rho = 1.0;
  const double target = -(-rate * amp) / (2 * (1 + amp + rho));
  double prev = INFINITY;
  for (double kn : {8.0, 16.0, 32.0, 64.0}) {
    OracleResult o = layered_ode_dn(profile(2, catalog::exp_viscosity(2, amp, rate), kn, rho));
    const double err = std::abs((o.N(1, 1) - kn).real() - target);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 0.02);
}

TEST(Oracle, SelfConvergence) {
  for (int n : {2, 3})
    for (double kn : {8.0, 64.0}) {
      LayeredProfile p = profile(n, catalog::exp_viscosity(n, 0.5, 1.0), kn);
      OracleResult a = layered_ode_dn(p), b = layered_ode_dn(p, OracleOptions{0.5});
      EXPECT_LT((a.N - b.N).norm() / a.N.norm(), 1e-9);
      EXPECT_GT(b.intervals, a.intervals);
    }
}

TEST(Oracle, InvalidProfiles) {
  LayeredProfile p = profile(2, catalog::constant_viscosity(1.0), 4.0);
  p.k = {0.0};
  EXPECT_THROW(layered_ode_dn(p), OracleError);
  p.k = {1.0, 1.0};
  EXPECT_THROW(layered_ode_dn(p), OracleError);
  p = profile(2, catalog::constant_viscosity(-1.0), 4.0);
  EXPECT_THROW(layered_ode_dn(p), OracleError);
  p = profile(2, catalog::constant_viscosity(1.0), 4.0);
  p.depth = 0.0;
  EXPECT_THROW(layered_ode_dn(p), OracleError);
}

TEST(Oracle, ConditionGuard) {
  LayeredProfile p = profile(2, catalog::constant_viscosity(1.0), 4.0);
  try {
    layered_ode_dn(p, OracleOptions{1.0, 1.0});
    FAIL();
  } catch (const OracleError& e) {
    EXPECT_NE(std::string(e.what()).find("resonant rho, adjust shift"), std::string::npos);
  }
}

TEST(AsymptoticDn, FlatConstantPrincipal) {
  for (int n : {2, 3}) {
    LayeredProfile p = profile(n, catalog::constant_viscosity(2.0), 3.0);
    EXPECT_EQ((asymptotic_dn(p, 1) - 3.0 * Eigen::MatrixXcd::Identity(n + 1, n + 1)).norm(), 0.0);
  }
}

TEST(AsymptoticDn, FlatLayeredZerothOrder) {
  const double amp = 0.5, rate = 1.0, rho = 0.7, kn = 3.0;
  LayeredProfile p = profile(2, catalog::exp_viscosity(2, amp, rate), kn, rho);
  Eigen::MatrixXcd q = asymptotic_dn(p, 2) - kn * Eigen::MatrixXcd::Identity(3, 3);
  EXPECT_NEAR(std::abs(q(1, 1) - (rate * amp) / (2 * (1 + amp + rho))), 0.0, 1e-14);
}

TEST(AsymptoticDn, ThirdTermScalesInverselyWithFrequency) {
  for (int n : {2, 3}) {
    auto d = [&](double kn) -> Eigen::MatrixXcd {
      LayeredProfile p = profile(n, catalog::exp_viscosity(n, 0.5, 1.0), kn);
      return asymptotic_dn(p, 3) - asymptotic_dn(p, 2);
    };
    Eigen::MatrixXcd a = d(5.0), b = d(10.0);
    EXPECT_GT(a.norm(), 1e-3);
    EXPECT_LT((2.0 * b - a).norm() / a.norm(), 1e-12);
  }
  EXPECT_THROW(asymptotic_dn(profile(2, catalog::constant_viscosity(1.0), 1.0), 0), std::invalid_argument);
}

TEST(Convergence, DecayOrdersOnLayeredProfile) {
  for (int n : {2, 3}) {
    LayeredProfile p = profile(n, catalog::exp_viscosity(n, 0.5, 1.0), 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    ConvergenceReport r = convergence_report(p, ladder(n), {1, 2, 3});
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 60.0);
    EXPECT_TRUE(r.strip_ok);
    EXPECT_GE(r.order.at(2), 0.9);
    EXPECT_GE(r.order.at(3), 1.8);
    for (int K : {1, 2, 3})
      for (size_t i = 1; i < r.knorm.size(); ++i) {
        const double ratio = r.residual.at(K)[i] / r.residual.at(K)[i - 1];
        EXPECT_LE(ratio, std::pow(2.0, -(K - 1) + 0.2)) << "K=" << K << " step " << i;
        if (K > 1) {
          EXPECT_LT(ratio, 1.0);
        }
      }
  }
}

TEST(Convergence, ConstantViscosityIsSuperPolynomial) {
  for (int n : {2, 3}) {
    ConvergenceReport r = convergence_report(profile(n, catalog::constant_viscosity(1.0), 1.0), ladder(n), {2, 3});
    // exp(-2|k|T) strip correction: already below 1e-5 at |k| = 8, then at roundoff
    EXPECT_LT(r.residual.at(2)[0], 1e-5);
    EXPECT_LT(r.residual.at(2)[1], 1e-11);
    EXPECT_GT(r.order.at(2), 5.0);
    EXPECT_LT(r.residual.at(3).back(), 1e-11);
  }
}

TEST(Convergence, ShortLadderRejected) {
  EXPECT_THROW(convergence_report(profile(2, catalog::constant_viscosity(1.0), 1.0), ladder(2, {8, 16, 32}), {2}),
               std::invalid_argument);
}

TEST(Convergence, ShallowStripFlagged) {
  LayeredProfile p = profile(2, catalog::exp_viscosity(2, 0.5, 1.0), 1.0);
  p.depth = 0.2;
  EXPECT_FALSE(convergence_report(p, ladder(2), {2}).strip_ok);
}

TEST(FitDecayOrder, ExactPowerLaw) {
  std::vector<double> k{8, 16, 32, 64}, r;
  for (double x : k) r.push_back(3.0 * std::pow(x, -1.7));
  EXPECT_NEAR(fit_decay_order(k, r), 1.7, 1e-12);
}
