#pragma once

// Smooth manufactured inputs shared by the test suites, the acceptance driver
// and the command line tool.

#include <random>
#include <stdexcept>

#include "stokesdn/equivalence.hpp"

namespace stokesdn::manufactured {

inline ComplexField complexify(std::function<RJet(const Coords&)> f) {
  return [f](const Coords& x) { return to_complex(f(x)); };
}

// Generic smooth (w, f) with no special structure.
inline FieldPair generic_pair(int n) {
  FieldPair wf;
  if (n == 2) {
    wf.w = {complexify([](const Coords& x) { return sin(x[0] + x[1]); }),
            complexify([](const Coords& x) { return exp(0.5 * x[0] * x[1]) + x[1]; })};
    wf.f = complexify([](const Coords& x) { return cos(x[0]) * exp(-x[1]) + x[0] * x[1] * x[1]; });
  } else if (n == 3) {
    wf.w = {complexify([](const Coords& x) { return sin(x[0] + x[2]) * x[1]; }),
            complexify([](const Coords& x) { return exp(x[1] * x[2]) - x[0]; }),
            complexify([](const Coords& x) { return cos(x[0] * x[1]) + x[2] * x[2]; })};
    wf.f = complexify([](const Coords& x) { return sin(x[0]) * exp(x[2]) + x[1] * x[1] * x[2]; });
  } else {
    throw std::invalid_argument("dimension must be 2 or 3");
  }
  return wf;
}

// Normal profiles for layered_manufacture.
inline LayeredSeeds layered_seeds(int n, double phase) {
  LayeredSeeds s;
  s.f = [phase](const CJet& y) { return exp(-0.7 * y) * cos(y + phase) + 0.3 * y * y; };
  for (int a = 0; a < n - 1; ++a)
    s.w.push_back([a, phase](const CJet& y) { return sin(y * (1.0 + 0.5 * a) + phase) + cplx(0, 0.2) * y; });
  s.wn0 = cplx(0.4, -0.1);
  return s;
}

// Scalar test functions: a coordinate and two smooth mixes.  The normal
// coordinate itself is avoided: its gradient is parallel in boundary normal
// form and gives no finite-difference signal.
inline ScalarField test_function(int which, int n) {
  switch (which) {
    case 0:
      return make_scalar("x1", [](const Coords& x) { return x[0]; });
    case 1:
      return make_scalar("product", [n](const Coords& x) { return cos(x[n - 2]) * exp(x[n - 1]) + x[0] * x[n - 1]; });
    default:
      return make_scalar("smooth",
                         [n](const Coords& x) { return sin(x[0]) * exp(0.5 * x[n - 1]) + x[0] * x[n - 1] * x[n - 1]; });
  }
}

// x' uniform in [-1, 1], x_n uniform in [0, 0.5], xi' standard normal.
inline std::vector<CotangentSample> random_samples(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), un(0.0, 0.5);
  std::normal_distribution<double> nd;
  std::vector<CotangentSample> out;
  while (static_cast<int>(out.size()) < count) {
    std::vector<double> x(n), xi(n - 1);
    for (int i = 0; i < n - 1; ++i) x[i] = ux(rng);
    x[n - 1] = un(rng);
    double z = 0;
    for (auto& v : xi) {
      v = nd(rng);
      z += v * v;
    }
    if (z < 1e-6) continue;
    out.push_back(CotangentSample{Point{x}, xi});
  }
  return out;
}

}  // namespace stokesdn::manufactured
