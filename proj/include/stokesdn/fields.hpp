#pragma once

// Points, cotangent samples and closed-form fields evaluated on jets.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stokesdn/dense.hpp"
#include "stokesdn/jet.hpp"

namespace stokesdn {

class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point {
  std::vector<double> x;

  int dim() const { return static_cast<int>(x.size()); }
  double operator[](int i) const { return x[i]; }
};

inline void check_point(const Point& p) {
  if (p.dim() != 2 && p.dim() != 3) throw FieldError("point dimension must be 2 or 3");
  if (p.x.back() < 0.0) throw FieldError("point outside the chart (x_n < 0)");
}

struct CotangentSample {
  Point x;
  std::vector<double> xi;  // length n-1
};

using Coords = std::vector<RJet>;

// Coordinate jets x_i = x0_i + t_i in the first n variables of `sp`.
inline Coords coordinate_jets(const JetSpace& sp, const Point& p, int order) {
  Coords c;
  c.reserve(p.dim());
  for (int i = 0; i < p.dim(); ++i) c.push_back(RJet::variable(sp, order, i, p[i]));
  return c;
}

struct ScalarField {
  std::string name;
  std::function<RJet(const Coords&)> eval;
  bool positive = false;

  RJet operator()(const Coords& x) const {
    RJet v = eval(x);
    if (positive && !(v.value() > 0.0)) throw FieldError("viscosity must be positive (field " + name + ")");
    return v;
  }
};

struct MetricField {
  std::string name;
  int n = 0;
  std::function<RJetMat(const Coords&)> eval;

  RJetMat operator()(const Coords& x) const { return eval(x); }
};

using ComplexField = std::function<CJet(const Coords&)>;

template <class F>
ScalarField make_scalar(std::string name, F f, bool positive = false) {
  return ScalarField{std::move(name), [f](const Coords& x) { return RJet(f(x)); }, positive};
}

}  // namespace stokesdn
