#pragma once

#include <vector>

namespace mgt::poly {

inline double eval(const std::vector<double>& c, double x) {
  double y = 0.0;
  for (size_t k = c.size(); k-- > 0;) y = y * x + c[k];
  return y;
}

inline std::vector<double> derivative(const std::vector<double>& c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> d(c.size() - 1);
  for (size_t k = 1; k < c.size(); ++k) d[k - 1] = k * c[k];
  return d;
}

// antiderivative with value 0 at x = 0
inline std::vector<double> antiderivative(const std::vector<double>& c) {
  std::vector<double> p(c.size() + 1, 0.0);
  for (size_t k = 0; k < c.size(); ++k) p[k + 1] = c[k] / (k + 1);
  return p;
}

inline double integral01(const std::vector<double>& c) {
  double s = 0.0;
  for (size_t k = c.size(); k-- > 0;) s += c[k] / (k + 1);
  return s;
}

// exact integral over [0,1] of the product of two polynomials
inline double inner01(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) s += a[i] * b[j] / (i + j + 1);
  return s;
}

inline std::vector<double> axpy(double alpha, const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> r(std::max(x.size(), y.size()), 0.0);
  for (size_t k = 0; k < x.size(); ++k) r[k] += alpha * x[k];
  for (size_t k = 0; k < y.size(); ++k) r[k] += y[k];
  return r;
}

}  // namespace mgt::poly
