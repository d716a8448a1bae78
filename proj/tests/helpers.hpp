#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include "axxz/params.hpp"

namespace testutil {

using axxz::cplx;

const cplx kEtaF(0.75, 0.0);
const cplx kEtaAF(0.75, axxz::kPi);

// the nine imaginary inhomogeneities used for the N=9 displaced-chain runs
inline std::vector<cplx> nine_thetas() {
  return {cplx(0, 0.14), cplx(0, 0.32), cplx(0, -0.43),
          cplx(0, 0.54), cplx(0, -0.25), cplx(0, 0.63),
          cplx(0, 0.47), cplx(0, -0.78), cplx(0, 0.19)};
}

// greedy min-distance matching between two multisets of complex numbers;
// robust ordering-free comparison (plain sorts are unstable for near-ties)
inline double multiset_dist(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return 1e300;
  double worst = 0.0;
  while (!a.empty()) {
    double best = 1e300;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) {
        double d = std::abs(a[i] - b[j]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    worst = std::max(worst, best);
    a.erase(a.begin() + bi);
    b.erase(b.begin() + bj);
  }
  return worst;
}

inline double multiset_dist_d(std::vector<double> a, std::vector<double> b) {
  std::vector<cplx> ca(a.begin(), a.end()), cb(b.begin(), b.end());
  return multiset_dist(ca, cb);
}

}  // namespace testutil
