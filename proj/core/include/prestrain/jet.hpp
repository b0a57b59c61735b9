#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "prestrain/error.hpp"

namespace prestrain {

constexpr int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

/// Monomial bookkeeping for truncated Taylor polynomials in Vars variables up
/// to total degree Order. Monomials are sorted by degree, then
/// lexicographically by exponent vector (largest exponent of variable 0 first).
template <int Vars, int Order>
struct Layout {
  static constexpr int vars = Vars;
  static constexpr int order = Order;
  static constexpr int size = binomial(Vars + Order, Order);

  using Exponent = std::array<std::uint8_t, Vars>;

  struct Partner {
    std::uint16_t right;
    std::uint16_t product;
  };

  struct Tables {
    std::vector<Exponent> exponent;
    std::vector<int> degree;
    std::vector<double> factorial;  // alpha! for each monomial
    std::vector<int> unit;          // index of x_v
    std::vector<std::uint32_t> begin;
    std::vector<Partner> partners;
    std::map<Exponent, int> index;
  };

  static const Tables& tables() {
    static const Tables t = build();
    return t;
  }

  static int index_of(const Exponent& e) { return tables().index.at(e); }

 private:
  static void enumerate(int remaining, int var, Exponent& e, std::vector<Exponent>& out) {
    if (var == Vars - 1) {
      e[var] = static_cast<std::uint8_t>(remaining);
      out.push_back(e);
      return;
    }
    for (int p = remaining; p >= 0; --p) {
      e[var] = static_cast<std::uint8_t>(p);
      enumerate(remaining - p, var + 1, e, out);
    }
  }

  static Tables build() {
    Tables t;
    for (int d = 0; d <= Order; ++d) {
      Exponent e{};
      enumerate(d, 0, e, t.exponent);
    }
    for (std::size_t m = 0; m < t.exponent.size(); ++m) {
      const Exponent& e = t.exponent[m];
      int deg = 0;
      double fact = 1.0;
      for (int v = 0; v < Vars; ++v) {
        deg += e[v];
        for (int p = 2; p <= e[v]; ++p) fact *= p;
      }
      t.degree.push_back(deg);
      t.factorial.push_back(fact);
      t.index[e] = static_cast<int>(m);
    }
    t.unit.resize(Vars);
    for (int v = 0; v < Vars; ++v) {
      Exponent e{};
      e[v] = 1;
      t.unit[v] = Order >= 1 ? t.index.at(e) : -1;
    }
    t.begin.push_back(0);
    for (std::size_t i = 0; i < t.exponent.size(); ++i) {
      for (std::size_t j = 0; j < t.exponent.size(); ++j) {
        if (t.degree[i] + t.degree[j] > Order) break;  // sorted by degree
        Exponent e{};
        for (int v = 0; v < Vars; ++v) e[v] = t.exponent[i][v] + t.exponent[j][v];
        t.partners.push_back(
            {static_cast<std::uint16_t>(j), static_cast<std::uint16_t>(t.index.at(e))});
      }
      t.begin.push_back(static_cast<std::uint32_t>(t.partners.size()));
    }
    return t;
  }
};

/// Truncated multivariate Taylor polynomial (a "jet"): c[m] is the
/// coefficient of monomial m, so a mixed partial equals alpha! * c[m].
template <class L>
class Jet {
 public:
  using layout = L;
  static constexpr int size = L::size;

  Jet() { c_.fill(0.0); }
  Jet(double v) {  // NOLINT: implicit lift of constants is intended
    c_.fill(0.0);
    c_[0] = v;
  }

  /// The jet of x_v at value v0.
  static Jet variable(int v, double v0) {
    Jet j(v0);
    j.c_[L::tables().unit[v]] = 1.0;
    return j;
  }

  double value() const { return c_[0]; }
  double& operator[](int m) { return c_[m]; }
  double operator[](int m) const { return c_[m]; }
  std::array<double, size>& coefficients() { return c_; }
  const std::array<double, size>& coefficients() const { return c_; }

  /// Mixed partial derivative for the exponent vector e.
  double derivative(const typename L::Exponent& e) const {
    const int m = L::index_of(e);
    return L::tables().factorial[m] * c_[m];
  }

  Jet& operator+=(const Jet& o) {
    for (int m = 0; m < size; ++m) c_[m] += o.c_[m];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int m = 0; m < size; ++m) c_[m] -= o.c_[m];
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(double s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    *this = *this * o;
    return *this;
  }
  Jet& operator/=(const Jet& o);

  Jet operator-() const {
    Jet r;
    for (int m = 0; m < size; ++m) r.c_[m] = -c_[m];
    return r;
  }

  friend Jet operator*(const Jet& x, const Jet& y) {
    const auto& t = L::tables();
    Jet r;
    r.c_[0] = 0.0;
    for (int i = 0; i < size; ++i) {
      const double xi = x.c_[i];
      if (xi == 0.0) continue;
      for (std::uint32_t p = t.begin[i]; p < t.begin[i + 1]; ++p)
        r.c_[t.partners[p].product] += xi * y.c_[t.partners[p].right];
    }
    return r;
  }

 private:
  std::array<double, size> c_;
};

template <class L>
Jet<L> operator+(Jet<L> x, const Jet<L>& y) {
  return x += y;
}
template <class L>
Jet<L> operator-(Jet<L> x, const Jet<L>& y) {
  return x -= y;
}
template <class L>
Jet<L> operator+(Jet<L> x, double s) {
  return x += s;
}
template <class L>
Jet<L> operator+(double s, Jet<L> x) {
  return x += s;
}
template <class L>
Jet<L> operator-(Jet<L> x, double s) {
  return x -= s;
}
template <class L>
Jet<L> operator-(double s, const Jet<L>& x) {
  return -x + s;
}
template <class L>
Jet<L> operator*(Jet<L> x, double s) {
  return x *= s;
}
template <class L>
Jet<L> operator*(double s, Jet<L> x) {
  return x *= s;
}

inline double value(double x) { return x; }
template <class L>
double value(const Jet<L>& x) {
  return x.value();
}

/// f(a) from the scaled derivatives taylor[m] = f^(m)(a0) / m!, by Horner
/// evaluation in h = a - a0 (h has no constant term, so h^(Order+1) = 0).
template <class L>
Jet<L> compose(const Jet<L>& a, const std::array<double, L::order + 1>& taylor) {
  Jet<L> h = a;
  h[0] = 0.0;
  Jet<L> r(taylor[L::order]);
  for (int m = L::order - 1; m >= 0; --m) {
    r = r * h;
    r[0] += taylor[m];
  }
  return r;
}

template <class L>
Jet<L> exp(const Jet<L>& a) {
  std::array<double, L::order + 1> t;
  double f = std::exp(a.value());
  for (int m = 0; m <= L::order; ++m) {
    t[m] = f;
    f /= (m + 1);
  }
  return compose(a, t);
}

template <class L>
Jet<L> expm1(const Jet<L>& a) {
  Jet<L> r = exp(a);
  r[0] = std::expm1(a.value());
  return r;
}

template <class L>
Jet<L> log1p(const Jet<L>& a) {
  const double x = 1.0 + a.value();
  if (!(x > 0.0)) throw NonSmooth("log1p: argument at or below -1");
  std::array<double, L::order + 1> t;
  t[0] = std::log1p(a.value());
  double p = 1.0;
  for (int m = 1; m <= L::order; ++m) {
    p /= x;
    t[m] = ((m % 2 == 1) ? 1.0 : -1.0) * p / m;
  }
  return compose(a, t);
}

template <class L>
Jet<L> log(const Jet<L>& a) {
  return log1p(a - 1.0);
}

template <class L>
Jet<L> reciprocal(const Jet<L>& a) {
  const double x = a.value();
  if (x == 0.0) throw NonSmooth("reciprocal: division by a jet with zero value");
  std::array<double, L::order + 1> t;
  double p = 1.0 / x;
  for (int m = 0; m <= L::order; ++m) {
    t[m] = ((m % 2 == 0) ? 1.0 : -1.0) * p;
    p /= x;
  }
  return compose(a, t);
}

template <class L>
Jet<L>& Jet<L>::operator/=(const Jet& o) {
  *this = *this * reciprocal(o);
  return *this;
}

template <class L>
Jet<L> operator/(const Jet<L>& x, const Jet<L>& y) {
  return x * reciprocal(y);
}
template <class L>
Jet<L> operator/(const Jet<L>& x, double s) {
  return x * (1.0 / s);
}
template <class L>
Jet<L> operator/(double s, const Jet<L>& y) {
  return s * reciprocal(y);
}

/// Generalized binomial expansion of a^p about a0 > 0.
template <class L>
Jet<L> pow_positive(const Jet<L>& a, double p) {
  const double x = a.value();
  std::array<double, L::order + 1> t;
  double binom = 1.0;
  for (int m = 0; m <= L::order; ++m) {
    t[m] = binom * std::pow(x, p - m);
    binom *= (p - m) / (m + 1);
  }
  return compose(a, t);
}

template <class L>
Jet<L> sqrt(const Jet<L>& a) {
  if (!(a.value() > 0.0)) throw NonSmooth("sqrt: jet value must be positive");
  return pow_positive(a, 0.5);
}

inline bool is_even_integer(double q) {
  return q >= 0.0 && std::floor(q) == q && std::fmod(q, 2.0) == 0.0;
}

inline double pow_abs(double a, double q) {
  if (q == 2.0) return a * a;
  return std::pow(std::abs(a), q);
}

/// |a|^q. At a0 = 0 the expansion exists only if q is an even integer or
/// exceeds the truncation order; otherwise NonSmooth is thrown.
template <class L>
Jet<L> pow_abs(const Jet<L>& a, double q) {
  if (is_even_integer(q)) {
    Jet<L> r(1.0);
    for (int k = 0; k < static_cast<int>(q); ++k) r = r * a;
    return r;
  }
  const double x = a.value();
  if (x > 0.0) return pow_positive(a, q);
  if (x < 0.0) return pow_positive(-a, q);
  if (q > L::order) return Jet<L>(0.0);
  throw NonSmooth("pow_abs: |a|^q is not smooth enough at a = 0 for this order");
}

/// d/da |a|^q = q |a|^(q-2) a, with the same smoothness rules as pow_abs.
inline double pow_abs_derivative(double a, double q) {
  if (q == 2.0) return 2.0 * a;
  if (a == 0.0) return 0.0;
  return q * std::pow(std::abs(a), q - 1.0) * (a > 0.0 ? 1.0 : -1.0);
}

template <class L>
Jet<L> pow_abs_derivative(const Jet<L>& a, double q) {
  if (is_even_integer(q)) {
    Jet<L> r(q);
    for (int k = 1; k < static_cast<int>(q); ++k) r = r * a;
    return q == 0.0 ? Jet<L>(0.0) : r;
  }
  const double x = a.value();
  if (x > 0.0) return q * pow_positive(a, q - 1.0);
  if (x < 0.0) return -q * pow_positive(-a, q - 1.0);
  if (q - 1.0 > L::order) return Jet<L>(0.0);
  throw NonSmooth("pow_abs: |a|^q is not smooth enough at a = 0 for this order");
}

}  // namespace prestrain
