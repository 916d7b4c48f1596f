#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace digeo {

using Vector = std::vector<double>;

inline void require_finite(const Vector& x, const char* what) {
  for (double c : x) {
    if (!std::isfinite(c)) throw std::invalid_argument(std::string(what) + ": non-finite coordinate");
  }
}

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vector add(const Vector& a, const Vector& b) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vector sub(const Vector& a, const Vector& b) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vector scale(const Vector& a, double s) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

inline Vector midpoint(const Vector& a, const Vector& b) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = 0.5 * (a[i] + b[i]);
  return r;
}

inline bool is_zero(const Vector& a) {
  for (double c : a)
    if (c != 0.0) return false;
  return true;
}

// Total order used for deterministic tie-breaking among witnesses.
inline bool lex_less(const Vector& a, const Vector& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

inline double linf_dist(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace digeo
