#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace anisocal {

// Forward-mode scalar carrying M directional derivatives. Used to push
// structure-tensor parameter tangents through the builder -> invariant
// chain; never through eigensolvers or branches.
template <int M>
struct Dual {
  double v = 0.0;
  std::array<double, M> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: constants promote with zero tangent

  static Dual seeded(double value, int slot) {
    Dual r(value);
    r.d[static_cast<std::size_t>(slot)] = 1.0;
    return r;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < M; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < M; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < M; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator*=(double s) {
    v *= s;
    for (int i = 0; i < M; ++i) d[i] *= s;
    return *this;
  }
};

template <int M>
inline Dual<M> operator+(Dual<M> a, const Dual<M>& b) { return a += b; }
template <int M>
inline Dual<M> operator-(Dual<M> a, const Dual<M>& b) { return a -= b; }
template <int M>
inline Dual<M> operator*(Dual<M> a, const Dual<M>& b) { return a *= b; }

template <int M>
inline Dual<M> operator-(const Dual<M>& a) {
  Dual<M> r;
  r.v = -a.v;
  for (int i = 0; i < M; ++i) r.d[i] = -a.d[i];
  return r;
}

template <int M>
inline Dual<M> operator+(Dual<M> a, double b) { a.v += b; return a; }
template <int M>
inline Dual<M> operator+(double b, Dual<M> a) { a.v += b; return a; }
template <int M>
inline Dual<M> operator-(Dual<M> a, double b) { a.v -= b; return a; }
template <int M>
inline Dual<M> operator-(double b, const Dual<M>& a) { return Dual<M>(b) - a; }
template <int M>
inline Dual<M> operator*(Dual<M> a, double b) { return a *= b; }
template <int M>
inline Dual<M> operator*(double b, Dual<M> a) { return a *= b; }

template <int M>
inline Dual<M> operator/(const Dual<M>& a, const Dual<M>& b) {
  Dual<M> r;
  const double inv = 1.0 / b.v;
  r.v = a.v * inv;
  for (int i = 0; i < M; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
  return r;
}
template <int M>
inline Dual<M> operator/(Dual<M> a, double b) { return a *= (1.0 / b); }
template <int M>
inline Dual<M> operator/(double a, const Dual<M>& b) { return Dual<M>(a) / b; }

template <int M>
inline Dual<M> sqrt(const Dual<M>& a) {
  Dual<M> r;
  r.v = std::sqrt(a.v);
  const double s = 0.5 / r.v;
  for (int i = 0; i < M; ++i) r.d[i] = s * a.d[i];
  return r;
}

template <int M>
inline Dual<M> log(const Dual<M>& a) {
  Dual<M> r;
  r.v = std::log(a.v);
  const double s = 1.0 / a.v;
  for (int i = 0; i < M; ++i) r.d[i] = s * a.d[i];
  return r;
}

template <int M>
inline Dual<M> exp(const Dual<M>& a) {
  Dual<M> r;
  r.v = std::exp(a.v);
  for (int i = 0; i < M; ++i) r.d[i] = r.v * a.d[i];
  return r;
}

template <int M>
inline Dual<M> sin(const Dual<M>& a) {
  Dual<M> r;
  r.v = std::sin(a.v);
  const double c = std::cos(a.v);
  for (int i = 0; i < M; ++i) r.d[i] = c * a.d[i];
  return r;
}

template <int M>
inline Dual<M> cos(const Dual<M>& a) {
  Dual<M> r;
  r.v = std::cos(a.v);
  const double s = -std::sin(a.v);
  for (int i = 0; i < M; ++i) r.d[i] = s * a.d[i];
  return r;
}

template <int M>
inline Dual<M> tanh(const Dual<M>& a) {
  Dual<M> r;
  r.v = std::tanh(a.v);
  const double s = 1.0 - r.v * r.v;
  for (int i = 0; i < M; ++i) r.d[i] = s * a.d[i];
  return r;
}

// value extraction that also works on plain doubles in templated code
inline double val(double x) { return x; }
template <int M>
inline double val(const Dual<M>& x) { return x.v; }

}  // namespace anisocal
