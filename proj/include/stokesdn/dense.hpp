#pragma once

// Small dense matrices whose entries are jets (or plain scalars).

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "stokesdn/jet.hpp"

namespace stokesdn {

template <class E>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<size_t>(rows) * cols) {}

  static Mat identity(int m) {
    Mat I(m, m);
    for (int i = 0; i < m; ++i) I(i, i) = E(1.0);
    return I;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  E& operator()(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
  const E& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }

  friend Mat operator+(const Mat& A, const Mat& B) {
    same_shape(A, B);
    Mat R(A.r_, A.c_);
    for (size_t i = 0; i < A.a_.size(); ++i) R.a_[i] = A.a_[i] + B.a_[i];
    return R;
  }
  friend Mat operator-(const Mat& A, const Mat& B) {
    same_shape(A, B);
    Mat R(A.r_, A.c_);
    for (size_t i = 0; i < A.a_.size(); ++i) R.a_[i] = A.a_[i] - B.a_[i];
    return R;
  }
  friend Mat operator*(const Mat& A, const Mat& B) {
    if (A.c_ != B.r_) throw std::invalid_argument("matrix dimension mismatch");
    Mat R(A.r_, B.c_);
    for (int i = 0; i < A.r_; ++i)
      for (int k = 0; k < A.c_; ++k) {
        const E& aik = A(i, k);
        if (is_exact_zero(aik)) continue;
        for (int j = 0; j < B.c_; ++j) {
          const E& bkj = B(k, j);
          if (is_exact_zero(bkj)) continue;
          R(i, j) += aik * bkj;
        }
      }
    return R;
  }
  friend Mat operator*(const E& s, const Mat& A) {
    Mat R(A.r_, A.c_);
    for (size_t i = 0; i < A.a_.size(); ++i) R.a_[i] = s * A.a_[i];
    return R;
  }
  Mat operator-() const {
    Mat R(r_, c_);
    for (size_t i = 0; i < a_.size(); ++i) R.a_[i] = -a_[i];
    return R;
  }
  Mat& operator+=(const Mat& B) { return *this = *this + B; }
  Mat& operator-=(const Mat& B) { return *this = *this - B; }

  template <class F>
  auto map(F&& f) const {
    using R = decltype(f(a_[0]));
    Mat<R> out(r_, c_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) out(i, j) = f((*this)(i, j));
    return out;
  }

 private:
  template <class T>
  static bool is_exact_zero(const Jet<T>& x) {
    return x.is_zero();
  }
  template <class T>
  static bool is_exact_zero(const T& x) {
    return x == T(0);
  }
  static void same_shape(const Mat& A, const Mat& B) {
    if (A.r_ != B.r_ || A.c_ != B.c_) throw std::invalid_argument("matrix dimension mismatch");
  }

  int r_ = 0, c_ = 0;
  std::vector<E> a_;
};

using RJetMat = Mat<RJet>;
using CJetMat = Mat<CJet>;

inline Eigen::MatrixXd values(const RJetMat& A) {
  Eigen::MatrixXd M(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) M(i, j) = A(i, j).value();
  return M;
}

inline Eigen::MatrixXcd values(const CJetMat& A) {
  Eigen::MatrixXcd M(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) M(i, j) = A(i, j).value();
  return M;
}

template <class T>
Mat<Jet<T>> partial(const Mat<Jet<T>>& A, int var) {
  return A.map([var](const Jet<T>& x) { return x.partial(var); });
}

// Gauss-Jordan inverse without pivoting; callers guarantee a well-conditioned
// leading value (symmetric positive-definite metrics).
template <class T>
Mat<Jet<T>> inverse(const Mat<Jet<T>>& A) {
  const int m = A.rows();
  Mat<Jet<T>> L = A, R = Mat<Jet<T>>::identity(m);
  for (int p = 0; p < m; ++p) {
    if (L(p, p).value() == T(0)) throw std::domain_error("singular matrix in jet inverse");
    Jet<T> ip = inv(L(p, p));
    for (int j = 0; j < m; ++j) {
      L(p, j) = L(p, j) * ip;
      R(p, j) = R(p, j) * ip;
    }
    for (int i = 0; i < m; ++i) {
      if (i == p || L(i, p).is_zero()) continue;
      Jet<T> f = L(i, p);
      for (int j = 0; j < m; ++j) {
        L(i, j) = L(i, j) - f * L(p, j);
        R(i, j) = R(i, j) - f * R(p, j);
      }
    }
  }
  return R;
}

}  // namespace stokesdn
