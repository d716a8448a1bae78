#pragma once

#include <vector>

namespace axxz {

struct GaussRule {
  std::vector<double> x, w;  // nodes and weights on [-1, 1]
};

// Gauss-Legendre nodes by Newton iteration on P_n; cached per n
const GaussRule& gauss_legendre(int n);

// integrate f over [a, b]
template <class F>
double gl_integrate(const F& f, double a, double b, int n = 256) {
  const GaussRule& g = gauss_legendre(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += g.w[i] * f(mid + half * g.x[i]);
  return s * half;
}

template <class F, class T>
T gl_integrate_t(const F& f, double a, double b, T zero, int n = 256) {
  const GaussRule& g = gauss_legendre(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  T s = zero;
  for (int i = 0; i < n; ++i) s += g.w[i] * f(mid + half * g.x[i]);
  return s * half;
}

}  // namespace axxz
