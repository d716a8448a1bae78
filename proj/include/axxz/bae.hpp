#pragma once

#include <Eigen/Dense>

#include <vector>

#include "axxz/params.hpp"

namespace axxz {

// inhomogeneous T-Q evaluation: Bethe roots are passed in the trigonometric
// variables u_j, internally lambda_j = i u_j - eta/2; throws when the
// evaluation point sits on a zero of Q (|Q(u)| < 1e-12)
cplx tq_lambda(const ModelParams& p, const std::vector<cplx>& us, cplx u);

// residue conditions making the T-Q ratio entire, one component per root,
// each normalized by the largest of its three terms; homogeneous (theta = 0)
// chains only, and coinciding roots (within 1e-10) are rejected
Eigen::VectorXcd bae_residual(const ModelParams& p,
                              const std::vector<cplx>& us);

struct BAEResult {
  std::vector<std::vector<cplx>> solutions;  // distinct root sets (u_j)
  std::vector<cplx> lambdas_probe;           // T-Q value at the probe point
  cplx probe{};                              // where lambdas_probe was taken
  int covered = 0;       // transfer-matrix levels reproduced
  int total_levels = 0;  // 2^N
};

// multi-start damped Newton on the residue conditions with dedup and a
// coverage check against the diagonalized transfer matrix; guarded to
// N <= 6 (the start count needed grows steeply with N)
BAEResult solve_bae(const ModelParams& p, int n_starts,
                    unsigned rng_seed = 12345u);

}  // namespace axxz
