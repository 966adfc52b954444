#pragma once

// Forward-mode automatic differentiation with N-component dual numbers.
//
// Dual<T, N> carries a value and N partial derivatives of scalar type T.
// Nesting (Dual<Dual<double, N>, N>) gives exact second derivatives, which is
// how curvature is computed from the metric components.

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

namespace ypq {

template <class T, int N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  Dual() = default;
  Dual(double c) : v(c) {}  // NOLINT: implicit promotion of constants
  Dual(const T& value, const std::array<T, N>& grad) : v(value), d(grad) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator*=(double c) {
    v *= c;
    for (int i = 0; i < N; ++i) d[i] *= c;
    return *this;
  }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }
  Dual& operator+=(double c) {
    v += c;
    return *this;
  }
  Dual& operator-=(double c) {
    v -= c;
    return *this;
  }
};

template <class T>
struct is_dual : std::false_type {};
template <class T, int N>
struct is_dual<Dual<T, N>> : std::true_type {};
template <class T>
inline constexpr bool is_dual_v = is_dual<T>::value;

template <class T, int N>
Dual<T, N> operator-(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.v = -a.v;
  for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}
template <class T, int N>
Dual<T, N> operator+(const Dual<T, N>& a) {
  return a;
}

template <class T, int N>
Dual<T, N> operator+(Dual<T, N> a, const Dual<T, N>& b) {
  return a += b;
}
template <class T, int N>
Dual<T, N> operator-(Dual<T, N> a, const Dual<T, N>& b) {
  return a -= b;
}
template <class T, int N>
Dual<T, N> operator*(Dual<T, N> a, const Dual<T, N>& b) {
  return a *= b;
}
template <class T, int N>
Dual<T, N> operator/(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  const T inv = T(1.0) / b.v;
  r.v = a.v * inv;
  for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
  return r;
}

template <class T, int N>
Dual<T, N> operator+(Dual<T, N> a, double c) {
  return a += c;
}
template <class T, int N>
Dual<T, N> operator+(double c, Dual<T, N> a) {
  return a += c;
}
template <class T, int N>
Dual<T, N> operator-(Dual<T, N> a, double c) {
  return a -= c;
}
template <class T, int N>
Dual<T, N> operator-(double c, const Dual<T, N>& a) {
  Dual<T, N> r = -a;
  r.v += c;
  return r;
}
template <class T, int N>
Dual<T, N> operator*(Dual<T, N> a, double c) {
  return a *= c;
}
template <class T, int N>
Dual<T, N> operator*(double c, Dual<T, N> a) {
  return a *= c;
}
template <class T, int N>
Dual<T, N> operator/(Dual<T, N> a, double c) {
  return a *= (1.0 / c);
}
template <class T, int N>
Dual<T, N> operator/(double c, const Dual<T, N>& a) {
  return Dual<T, N>(c) / a;
}

// Chain rule helper: f(a) given f(a.v) and f'(a.v).
template <class T, int N>
Dual<T, N> chain(const Dual<T, N>& a, const T& fv, const T& dfv) {
  Dual<T, N> r;
  r.v = fv;
  for (int i = 0; i < N; ++i) r.d[i] = dfv * a.d[i];
  return r;
}

template <class T, int N>
Dual<T, N> sin(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  return chain(a, T(sin(a.v)), T(cos(a.v)));
}
template <class T, int N>
Dual<T, N> cos(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  return chain(a, T(cos(a.v)), T(-sin(a.v)));
}
template <class T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  using std::sqrt;
  const T s = sqrt(a.v);
  return chain(a, s, T(0.5 / s));
}
template <class T, int N>
Dual<T, N> exp(const Dual<T, N>& a) {
  using std::exp;
  const T e = exp(a.v);
  return chain(a, e, e);
}

inline double value_of(double x) { return x; }
inline double value_of(long double x) { return static_cast<double>(x); }
template <class T, int N>
double value_of(const Dual<T, N>& x) {
  return value_of(x.v);
}

// Seeds each coordinate with its own unit tangent.
template <class T, std::size_t N>
std::array<Dual<T, static_cast<int>(N)>, N> seed(const std::array<T, N>& x) {
  constexpr int n = static_cast<int>(N);
  std::array<Dual<T, n>, N> out;
  for (int i = 0; i < n; ++i) {
    out[i].v = x[i];
    out[i].d[i] = T(1.0);
  }
  return out;
}

// Constant lift: the value with zero derivatives.
template <class D>
D lift(double x) {
  return D(x);
}

}  // namespace ypq
