#pragma once

#include <array>

namespace prestrain {

/// Row-major 3x3 matrix over any scalar with ring operations (double or Jet).
template <class T>
struct Mat3 {
  std::array<T, 9> a{};

  static Mat3 identity() {
    Mat3 m;
    for (int i = 0; i < 3; ++i) m(i, i) = T(1.0);
    return m;
  }

  T& operator()(int i, int j) { return a[3 * i + j]; }
  const T& operator()(int i, int j) const { return a[3 * i + j]; }

  Mat3& operator+=(const Mat3& o) {
    for (int k = 0; k < 9; ++k) a[k] += o.a[k];
    return *this;
  }
  Mat3& operator-=(const Mat3& o) {
    for (int k = 0; k < 9; ++k) a[k] -= o.a[k];
    return *this;
  }
  Mat3& operator*=(const T& s) {
    for (auto& x : a) x *= s;
    return *this;
  }
};

template <class T>
Mat3<T> operator+(Mat3<T> x, const Mat3<T>& y) {
  return x += y;
}
template <class T>
Mat3<T> operator-(Mat3<T> x, const Mat3<T>& y) {
  return x -= y;
}
template <class T>
Mat3<T> operator*(Mat3<T> x, const T& s) {
  return x *= s;
}
template <class T>
Mat3<T> operator*(const T& s, Mat3<T> x) {
  return x *= s;
}

template <class T>
Mat3<T> operator*(const Mat3<T>& x, const Mat3<T>& y) {
  Mat3<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j) + x(i, 2) * y(2, j);
  return r;
}

template <class T>
Mat3<T> transpose(const Mat3<T>& x) {
  Mat3<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = x(j, i);
  return r;
}

template <class T>
T trace(const Mat3<T>& x) {
  return x(0, 0) + x(1, 1) + x(2, 2);
}

/// Frobenius inner product.
template <class T>
T dot(const Mat3<T>& x, const Mat3<T>& y) {
  T s = x.a[0] * y.a[0];
  for (int k = 1; k < 9; ++k) s += x.a[k] * y.a[k];
  return s;
}

template <class T>
T det(const Mat3<T>& x) {
  return x(0, 0) * (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) -
         x(0, 1) * (x(1, 0) * x(2, 2) - x(1, 2) * x(2, 0)) +
         x(0, 2) * (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0));
}

/// Cofactor matrix, cof(X) = det(X) X^{-T}.
template <class T>
Mat3<T> cofactor(const Mat3<T>& x) {
  Mat3<T> c;
  c(0, 0) = x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1);
  c(0, 1) = x(1, 2) * x(2, 0) - x(1, 0) * x(2, 2);
  c(0, 2) = x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0);
  c(1, 0) = x(0, 2) * x(2, 1) - x(0, 1) * x(2, 2);
  c(1, 1) = x(0, 0) * x(2, 2) - x(0, 2) * x(2, 0);
  c(1, 2) = x(0, 1) * x(2, 0) - x(0, 0) * x(2, 1);
  c(2, 0) = x(0, 1) * x(1, 2) - x(0, 2) * x(1, 1);
  c(2, 1) = x(0, 2) * x(1, 0) - x(0, 0) * x(1, 2);
  c(2, 2) = x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
  return c;
}

/// det(I + D) - 1 without forming I + D, so small D loses no digits.
template <class T>
T det_identity_plus_minus_one(const Mat3<T>& d) {
  const T tr = trace(d);
  const T second = d(0, 0) * d(1, 1) + d(1, 1) * d(2, 2) + d(0, 0) * d(2, 2) - d(0, 1) * d(1, 0) -
                   d(1, 2) * d(2, 1) - d(0, 2) * d(2, 0);
  return tr + second + det(d);
}

}  // namespace prestrain
