#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace scalesep {

// Phase-space and spatial dimensions stay small (points in R^1..R^4),
// so points are fixed-capacity stack vectors.
inline constexpr int kMaxDim = 4;

struct Vec {
  std::array<double, kMaxDim> c{};
  int dim = 0;

  Vec() = default;
  explicit Vec(int d) : dim(d) {
    if (d < 0 || d > kMaxDim) throw std::invalid_argument("Vec: dim out of range");
  }
  Vec(std::initializer_list<double> xs) {
    if (static_cast<int>(xs.size()) > kMaxDim)
      throw std::invalid_argument("Vec: too many components");
    dim = static_cast<int>(xs.size());
    int i = 0;
    for (double x : xs) c[i++] = x;
  }

  double& operator[](int i) { return c[static_cast<size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < dim; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < dim; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < dim; ++i) c[i] *= s;
    return *this;
  }
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator*(Vec a, double s) { return a *= s; }

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (int i = 0; i < a.dim; ++i) s += a.c[i] * b.c[i];
  return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline bool finite(const Vec& a) {
  for (int i = 0; i < a.dim; ++i)
    if (!std::isfinite(a.c[i])) return false;
  return true;
}

inline Vec zeros(int dim) { return Vec(dim); }

inline Vec midpoint(const Vec& a, const Vec& b) {
  Vec m(a.dim);
  for (int i = 0; i < a.dim; ++i) m[i] = 0.5 * (a[i] + b[i]);
  return m;
}

}  // namespace scalesep
