#pragma once

// Truncated multivariate Taylor polynomials ("jets") used for forward-mode
// differentiation of arbitrary order.  A jet stores Taylor coefficients
// c_a = (d^a f)(x0) / a! for every multi-index a with |a| <= order.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

namespace stokesdn {

using cplx = std::complex<double>;

class JetDepthError : public std::runtime_error {
 public:
  JetDepthError() : std::runtime_error("jet depth exceeded") {}
};

// Monomial tables for a fixed number of variables.  Monomials are sorted by
// total degree, so the coefficients of an order-p jet form a prefix of the
// coefficients of any higher-order jet.
class JetSpace {
 public:
  struct Triple {
    int i, j, k;  // monomial(i) * monomial(j) = monomial(k)
  };

  static const JetSpace& get(int nv) {
    static std::array<std::unique_ptr<JetSpace>, 7> spaces;
    static std::array<std::once_flag, 7> flags;
    if (nv < 1 || nv > 6) throw std::invalid_argument("jet space supports 1..6 variables");
    std::call_once(flags[nv], [nv] { spaces[nv].reset(new JetSpace(nv, default_max_order(nv))); });
    return *spaces[nv];
  }

  static int default_max_order(int nv) {
    switch (nv) {
      case 1: return 48;
      case 2: return 24;
      case 3: return 12;
      case 4: return 9;
      case 5: return 8;
      default: return 6;
    }
  }

  int nv() const { return nv_; }
  int max_order() const { return max_order_; }
  int size(int order) const { return offset_[order + 1]; }
  int degree(int idx) const { return degree_[idx]; }
  const int* exponents(int idx) const { return &exps_[static_cast<size_t>(idx) * nv_]; }
  double factorial(int idx) const { return fact_[idx]; }
  int shift(int var, int idx) const { return shift_[static_cast<size_t>(var) * total_ + idx]; }
  const Triple* products() const { return products_.data(); }
  int products_end(int order) const { return product_end_[order]; }

  int index(const int* e) const {
    auto it = lookup_.find(key(e));
    return it == lookup_.end() ? -1 : it->second;
  }

  // Index map sending monomials of a smaller space into this one, the source
  // variables occupying the leading slots.
  const std::vector<int>& prefix_map(int src_nv) const {
    std::call_once(prefix_flags_[src_nv], [this, src_nv] {
      const JetSpace& src = JetSpace::get(src_nv);
      int top = std::min(src.max_order(), max_order_);
      std::vector<int> m(src.size(top));
      std::vector<int> e(nv_, 0);
      for (int s = 0; s < src.size(top); ++s) {
        std::fill(e.begin(), e.end(), 0);
        for (int v = 0; v < src_nv; ++v) e[v] = src.exponents(s)[v];
        m[s] = index(e.data());
      }
      prefix_maps_[src_nv] = std::move(m);
    });
    return prefix_maps_[src_nv];
  }

 private:
  JetSpace(int nv, int max_order) : nv_(nv), max_order_(max_order) {
    // enumerate monomials degree by degree (reverse-lexicographic inside a degree)
    offset_.assign(max_order + 2, 0);
    std::vector<int> e(nv, 0);
    for (int d = 0; d <= max_order; ++d) {
      offset_[d] = static_cast<int>(degree_.size());
      enumerate(d, 0, e);
    }
    offset_[max_order + 1] = static_cast<int>(degree_.size());
    total_ = static_cast<int>(degree_.size());
    for (int i = 0; i < total_; ++i) lookup_[key(exponents(i))] = i;

    fact_.resize(total_);
    for (int i = 0; i < total_; ++i) {
      double f = 1.0;
      for (int v = 0; v < nv; ++v)
        for (int q = 2; q <= exponents(i)[v]; ++q) f *= q;
      fact_[i] = f;
    }

    shift_.assign(static_cast<size_t>(nv) * total_, -1);
    for (int v = 0; v < nv; ++v)
      for (int i = 0; i < total_; ++i) {
        if (degree_[i] >= max_order) continue;
        std::vector<int> f(exponents(i), exponents(i) + nv);
        ++f[v];
        shift_[static_cast<size_t>(v) * total_ + i] = index(f.data());
      }

    std::vector<std::vector<Triple>> by_degree(max_order + 1);
    std::vector<int> f(nv);
    for (int i = 0; i < total_; ++i)
      for (int j = 0; j < total_; ++j) {
        int d = degree_[i] + degree_[j];
        if (d > max_order) continue;
        for (int v = 0; v < nv; ++v) f[v] = exponents(i)[v] + exponents(j)[v];
        by_degree[d].push_back({i, j, index(f.data())});
      }
    product_end_.assign(max_order + 1, 0);
    for (int d = 0; d <= max_order; ++d) {
      products_.insert(products_.end(), by_degree[d].begin(), by_degree[d].end());
      product_end_[d] = static_cast<int>(products_.size());
    }
  }

  void enumerate(int remaining, int var, std::vector<int>& e) {
    if (var == nv_ - 1) {
      e[var] = remaining;
      exps_.insert(exps_.end(), e.begin(), e.end());
      int d = 0;
      for (int x : e) d += x;
      degree_.push_back(d);
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      e[var] = a;
      enumerate(remaining - a, var + 1, e);
    }
    e[var] = 0;
  }

  std::uint64_t key(const int* e) const {
    std::uint64_t k = 0;
    for (int v = 0; v < nv_; ++v) k = k * 64u + static_cast<std::uint64_t>(e[v]);
    return k;
  }

  int nv_, max_order_, total_ = 0;
  std::vector<int> exps_, degree_, offset_, shift_, product_end_;
  std::vector<double> fact_;
  std::vector<Triple> products_;
  std::unordered_map<std::uint64_t, int> lookup_;
  mutable std::array<std::vector<int>, 7> prefix_maps_;
  mutable std::array<std::once_flag, 7> prefix_flags_;
};

// A jet either lives in a JetSpace with a finite order, or is "exact": a
// constant known to all orders (no space attached).  The default jet is the
// exact zero, which keeps sparse matrices of jets cheap.
template <class T>
class Jet {
 public:
  static constexpr int kExact = 1 << 20;

  Jet() = default;
  Jet(T v) : c_{v} {}  // NOLINT(google-explicit-constructor): constants mix freely
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S> && !std::is_same_v<S, T>>>
  Jet(S v) : c_{T(v)} {}  // NOLINT

  Jet(const JetSpace& sp, int order) : sp_(&sp), order_(order), c_(sp.size(order), T(0)) {
    if (order < 0 || order > sp.max_order()) throw JetDepthError();
  }

  static Jet constant(const JetSpace& sp, int order, T v) {
    Jet j(sp, order);
    j.c_[0] = v;
    return j;
  }
  static Jet variable(const JetSpace& sp, int order, int var, T v0) {
    Jet j(sp, order);
    j.c_[0] = v0;
    if (order >= 1) j.c_[1 + var] = T(1);
    return j;
  }

  bool exact() const { return sp_ == nullptr; }
  bool is_zero() const { return exact() && (c_.empty() || c_[0] == T(0)); }
  int order() const { return exact() ? kExact : order_; }
  const JetSpace* space() const { return sp_; }
  const std::vector<T>& coeffs() const { return c_; }
  std::vector<T>& coeffs() { return c_; }

  T value() const { return c_.empty() ? T(0) : c_[0]; }
  T coeff(int idx) const { return idx < static_cast<int>(c_.size()) ? c_[idx] : T(0); }

  // d^a f at the expansion point, a given as exponents per variable.
  T derivative(const std::vector<int>& a) const {
    int d = 0;
    for (int x : a) d += x;
    if (d == 0) return value();
    if (exact()) return T(0);
    if (d > order_) throw JetDepthError();
    std::vector<int> e(sp_->nv(), 0);
    for (size_t v = 0; v < a.size(); ++v) e[v] = a[v];
    int idx = sp_->index(e.data());
    return c_[idx] * sp_->factorial(idx);
  }

  Jet partial(int var) const {
    if (exact()) return Jet();
    if (order_ == 0) throw JetDepthError();
    Jet r(*sp_, order_ - 1);
    for (int i = 0; i < r.size(); ++i) {
      int s = sp_->shift(var, i);
      r.c_[i] = c_[s] * T(sp_->exponents(s)[var]);
    }
    return r;
  }

  Jet truncate(int order) const {
    if (exact() || order >= order_) return *this;
    Jet r(*this);
    r.order_ = order;
    r.c_.resize(sp_->size(order));
    return r;
  }

  Jet operator-() const {
    Jet r(*this);
    for (auto& x : r.c_) x = -x;
    return r;
  }

  Jet& operator+=(const Jet& b) { return *this = *this + b; }
  Jet& operator-=(const Jet& b) { return *this = *this - b; }
  Jet& operator*=(const Jet& b) { return *this = *this * b; }

  friend Jet operator+(const Jet& a, const Jet& b) {
    if (a.exact() && b.exact()) return Jet(a.value() + b.value());
    if (a.exact()) return b.plus_constant(a.value());
    if (b.exact()) return a.plus_constant(b.value());
    check_space(a, b);
    const Jet& lo = a.order_ <= b.order_ ? a : b;
    const Jet& hi = a.order_ <= b.order_ ? b : a;
    Jet r(lo);
    for (int i = 0; i < r.size(); ++i) r.c_[i] += hi.c_[i];
    return r;
  }
  friend Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if (a.exact() && b.exact()) {
      if (a.c_.empty() || b.c_.empty()) return Jet();
      return Jet(a.c_[0] * b.c_[0]);
    }
    if (a.exact()) return b.scaled(a.value(), a.c_.empty());
    if (b.exact()) return a.scaled(b.value(), b.c_.empty());
    check_space(a, b);
    int o = std::min(a.order_, b.order_);
    Jet r(*a.sp_, o);
    const auto* P = a.sp_->products();
    const int end = a.sp_->products_end(o);
    const T* ac = a.c_.data();
    const T* bc = b.c_.data();
    T* rc = r.c_.data();
    for (int t = 0; t < end; ++t) rc[P[t].k] += ac[P[t].i] * bc[P[t].j];
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * inv(b); }

  // f(x) from the Taylor coefficients f[k] = f^(k)(x0)/k! of a scalar function.
  Jet compose(const std::vector<T>& f) const {
    if (exact()) return Jet(f[0]);
    Jet h(*this);
    h.c_[0] = T(0);
    Jet r = Jet::constant(*sp_, order_, f[order_]);
    for (int k = order_ - 1; k >= 0; --k) {
      r = r * h;
      r.c_[0] += f[k];
    }
    return r;
  }

  int size() const { return static_cast<int>(c_.size()); }

 private:
  static void check_space(const Jet& a, const Jet& b) {
    if (a.sp_ != b.sp_) throw std::logic_error("jets from different spaces combined");
  }
  Jet plus_constant(T v) const {
    Jet r(*this);
    r.c_[0] += v;
    return r;
  }
  Jet scaled(T v, bool zero) const {
    if (zero || v == T(0)) return Jet();
    Jet r(*this);
    for (auto& x : r.c_) x *= v;
    return r;
  }

  const JetSpace* sp_ = nullptr;
  int order_ = kExact;
  std::vector<T> c_;
};

using RJet = Jet<double>;
using CJet = Jet<cplx>;

template <class T>
int series_order(const Jet<T>& x) {
  return x.exact() ? 0 : x.order();
}

template <class T>
Jet<T> exp(const Jet<T>& x) {
  using std::exp;
  int K = series_order(x);
  std::vector<T> f(K + 1);
  T e = exp(x.value());
  double fact = 1.0;
  for (int k = 0; k <= K; ++k) {
    if (k > 0) fact *= k;
    f[k] = e / fact;
  }
  return x.compose(f);
}

template <class T>
Jet<T> log(const Jet<T>& x) {
  using std::log;
  int K = series_order(x);
  std::vector<T> f(K + 1);
  T a = x.value();
  f[0] = log(a);
  T p = T(1);
  for (int k = 1; k <= K; ++k) {
    p *= a;
    f[k] = T((k % 2 == 1) ? 1.0 : -1.0) / (T(k) * p);
  }
  return x.compose(f);
}

template <class T>
Jet<T> pow(const Jet<T>& x, double e) {
  using std::pow;
  int K = series_order(x);
  std::vector<T> f(K + 1);
  T a = x.value();
  T binom = T(1);
  T ak = pow(a, e);
  for (int k = 0; k <= K; ++k) {
    f[k] = binom * ak;
    binom *= T((e - k) / (k + 1));
    ak /= a;
  }
  return x.compose(f);
}

template <class T>
Jet<T> sqrt(const Jet<T>& x) {
  return pow(x, 0.5);
}

template <class T>
Jet<T> inv(const Jet<T>& x) {
  int K = series_order(x);
  std::vector<T> f(K + 1);
  T a = x.value();
  if (a == T(0)) throw std::domain_error("division by a jet with zero value");
  T p = T(1) / a;
  for (int k = 0; k <= K; ++k) {
    f[k] = p;
    p *= -T(1) / a;
  }
  return x.compose(f);
}

template <class T>
Jet<T> sin(const Jet<T>& x) {
  using std::cos;
  using std::sin;
  int K = series_order(x);
  std::vector<T> f(K + 1);
  T s = sin(x.value()), c = cos(x.value());
  const T cyc[4] = {s, c, -s, -c};
  double fact = 1.0;
  for (int k = 0; k <= K; ++k) {
    if (k > 0) fact *= k;
    f[k] = cyc[k % 4] / fact;
  }
  return x.compose(f);
}

template <class T>
Jet<T> cos(const Jet<T>& x) {
  using std::cos;
  using std::sin;
  int K = series_order(x);
  std::vector<T> f(K + 1);
  T s = sin(x.value()), c = cos(x.value());
  const T cyc[4] = {c, -s, -c, s};
  double fact = 1.0;
  for (int k = 0; k <= K; ++k) {
    if (k > 0) fact *= k;
    f[k] = cyc[k % 4] / fact;
  }
  return x.compose(f);
}

inline CJet to_complex(const RJet& x) {
  CJet r;
  if (x.exact()) return x.coeffs().empty() ? CJet() : CJet(cplx(x.value()));
  r = CJet(*x.space(), x.order());
  for (int i = 0; i < x.size(); ++i) r.coeffs()[i] = x.coeffs()[i];
  return r;
}

inline RJet real_part(const CJet& x) {
  if (x.exact()) return x.coeffs().empty() ? RJet() : RJet(x.value().real());
  RJet r(*x.space(), x.order());
  for (int i = 0; i < x.size(); ++i) r.coeffs()[i] = x.coeffs()[i].real();
  return r;
}

// Coefficients are conjugated; valid because all jet variables are real.
inline CJet conj(const CJet& x) {
  CJet r(x);
  for (auto& v : r.coeffs()) v = std::conj(v);
  return r;
}

// Re-express a jet in a larger space whose leading variables are the jet's own.
template <class T>
Jet<T> embed(const Jet<T>& x, const JetSpace& dst) {
  if (x.exact()) return x;
  if (x.space() == &dst) return x;
  const auto& m = dst.prefix_map(x.space()->nv());
  int o = std::min(x.order(), dst.max_order());
  Jet<T> r(dst, o);
  int n = x.space()->size(o);
  for (int i = 0; i < n; ++i) r.coeffs()[m[i]] = x.coeffs()[i];
  return r;
}

// Inverse of embed on monomials in the leading dst.nv() variables; the rest are dropped.
template <class T>
Jet<T> project_prefix(const Jet<T>& x, const JetSpace& dst) {
  if (x.exact() || x.space() == &dst) return x;
  const JetSpace& src = *x.space();
  if (src.nv() < dst.nv()) throw std::invalid_argument("projection needs a larger source space");
  int o = std::min(x.order(), dst.max_order());
  Jet<T> r(dst, o);
  const auto& m = src.prefix_map(dst.nv());
  for (int i = 0; i < dst.size(o); ++i) r.coeffs()[i] = x.coeffs()[m[i]];
  return r;
}

// Drop every monomial that involves a variable outside `keep`.
template <class T>
Jet<T> restrict_to(const Jet<T>& x, const std::vector<bool>& keep) {
  if (x.exact()) return x;
  Jet<T> r(x);
  const JetSpace& sp = *x.space();
  for (int i = 0; i < r.size(); ++i) {
    const int* e = sp.exponents(i);
    for (int v = 0; v < sp.nv(); ++v)
      if (e[v] != 0 && !keep[v]) {
        r.coeffs()[i] = T(0);
        break;
      }
  }
  return r;
}

// Antiderivative in `var` vanishing on the slice through the expansion point;
// one order is gained, capped at `order`.
template <class T>
Jet<T> integrate(const Jet<T>& x, int var, int order) {
  if (x.exact() && x.is_zero()) return x;
  if (x.exact()) throw std::invalid_argument("integrate needs a jet space");
  const JetSpace& sp = *x.space();
  order = std::min(order, x.order() + 1);
  Jet<T> r(sp, order);
  std::vector<int> e(sp.nv());
  for (int i = 0; i < r.size(); ++i) {
    const int* ei = sp.exponents(i);
    if (ei[var] == 0) continue;
    e.assign(ei, ei + sp.nv());
    --e[var];
    r.coeffs()[i] = x.coeffs()[sp.index(e.data())] / T(ei[var]);
  }
  return r;
}

// Evaluate the Taylor polynomial at x0 + dx.
template <class T>
T evaluate_at(const Jet<T>& x, const std::vector<double>& dx) {
  if (x.exact()) return x.value();
  const JetSpace& sp = *x.space();
  T s = T(0);
  for (int i = 0; i < x.size(); ++i) {
    double m = 1.0;
    const int* e = sp.exponents(i);
    for (int v = 0; v < sp.nv(); ++v)
      for (int q = 0; q < e[v]; ++q) m *= dx[v];
    s += x.coeffs()[i] * m;
  }
  return s;
}

}  // namespace stokesdn
