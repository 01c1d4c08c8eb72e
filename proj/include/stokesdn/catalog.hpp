#pragma once

// Built-in metrics (all in boundary normal form) and viscosity fields.

#include <map>
#include <string>
#include <vector>

#include "stokesdn/fields.hpp"

namespace stokesdn::catalog {

struct MetricParams {
  std::vector<double> kappa;  // principal curvatures at x_n = 0, length n-1
  double eps = 0.3;           // tangential warping amplitude
};

inline MetricField flat(int n) {
  return {"flat", n, [n](const Coords&) { return RJetMat::identity(n); }};
}

// Horospherical chart of hyperbolic space: g = diag(e^{2x_n}, ..., e^{2x_n}, 1).
inline MetricField hyperbolic(int n) {
  return {"hyperbolic", n, [n](const Coords& x) {
            RJetMat g = RJetMat::identity(n);
            RJet e = exp(2.0 * x[n - 1]);
            for (int a = 0; a < n - 1; ++a) g(a, a) = e;
            return g;
          }};
}

// g_aa = (1 + kappa_a x_n)^2, so (1/2) d_n g_ab = kappa_a delta_ab on the boundary.
inline MetricField curved(int n, std::vector<double> kappa) {
  kappa.resize(n - 1, kappa.empty() ? 0.5 : kappa.back());
  return {"curved", n, [n, kappa](const Coords& x) {
            RJetMat g = RJetMat::identity(n);
            for (int a = 0; a < n - 1; ++a) {
              RJet s = 1.0 + kappa[a] * x[n - 1];
              g(a, a) = s * s;
            }
            return g;
          }};
}

// Curved family with tangential variation and (n = 3) an off-diagonal block entry.
inline MetricField warped(int n, std::vector<double> kappa, double eps) {
  kappa.resize(n - 1, kappa.empty() ? 0.5 : kappa.back());
  return {"warped", n, [n, kappa, eps](const Coords& x) {
            RJetMat g = RJetMat::identity(n);
            const RJet& xn = x[n - 1];
            if (n == 2) {
              RJet s = 1.0 + kappa[0] * xn;
              g(0, 0) = s * s * exp(eps * (sin(x[0]) + xn * cos(x[0])));
            } else {
              RJet s1 = 1.0 + kappa[0] * xn, s2 = 1.0 + kappa[1] * xn;
              g(0, 0) = s1 * s1 * exp(eps * sin(x[0] + x[1]));
              g(1, 1) = s2 * s2 * exp(eps * cos(x[0] - xn));
              g(0, 1) = 0.3 * eps * sin(x[0]) * cos(x[1]) * s1 * s2;
              g(1, 0) = g(0, 1);
            }
            return g;
          }};
}

inline MetricField metric(const std::string& name, int n, const MetricParams& p = {}) {
  if (n != 2 && n != 3) throw FieldError("dimension must be 2 or 3");
  if (name == "flat") return flat(n);
  if (name == "hyperbolic") return hyperbolic(n);
  if (name == "curved") return curved(n, p.kappa);
  if (name == "warped") return warped(n, p.kappa, p.eps);
  throw FieldError("unknown metric '" + name + "'");
}

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"flat", "hyperbolic", "curved", "warped"};
  return names;
}

struct ViscosityParams {
  double value = 1.0;  // constant level
  double amp = 0.3;
  double rate = 1.0;
};

// mu = value
inline ScalarField constant_viscosity(double value) {
  return ScalarField{"constant", [value](const Coords&) { return RJet(value); }, true};
}

// mu = 1 + amp sin(x_1) e^{-x_n}
inline ScalarField sine_viscosity(int n, double amp) {
  return ScalarField{"sine", [n, amp](const Coords& x) { return 1.0 + amp * sin(x[0]) * exp(-x[n - 1]); },
                     true};
}

// mu = 1 + amp e^{-rate x_n}; depends on x_n only (layered)
inline ScalarField exp_viscosity(int n, double amp, double rate) {
  return ScalarField{"exp", [n, amp, rate](const Coords& x) { return 1.0 + amp * exp(-rate * x[n - 1]); },
                     true};
}

// mu = 1 + amp (sin(x_1 + x_n/2) e^{-x_n} + cos(x_{n-1} - x_n)/2)
inline ScalarField mixed_viscosity(int n, double amp) {
  return ScalarField{"mixed",
                     [n, amp](const Coords& x) {
                       const RJet& xn = x[n - 1];
                       return 1.0 + amp * (sin(x[0] + 0.5 * xn) * exp(-xn) + 0.5 * cos(x[n - 2] - xn));
                     },
                     true};
}

inline ScalarField viscosity(const std::string& name, int n, const ViscosityParams& p = {}) {
  if (name == "constant") return constant_viscosity(p.value);
  if (name == "sine") return sine_viscosity(n, p.amp);
  if (name == "exp") return exp_viscosity(n, p.amp, p.rate);
  if (name == "mixed") return mixed_viscosity(n, p.amp);
  throw FieldError("unknown viscosity '" + name + "'");
}

inline bool is_layered(const std::string& viscosity_name) {
  return viscosity_name == "constant" || viscosity_name == "exp";
}

}  // namespace stokesdn::catalog
