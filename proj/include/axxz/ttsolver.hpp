#pragma once

#include <Eigen/Dense>
#include <vector>

#include "axxz/params.hpp"
#include "axxz/spectra.hpp"

namespace axxz {

// unknowns of the functional relation Lambda(th_j) Lambda(th_j - eta) =
// -a(th_j) d(th_j - eta); parameterized as (ln Lambda_0, z_1..z_{N-1}) so
// Newton stays scale-free in Lambda_0
struct TTSystem {
  ModelParams params;
  cplx log_lambda0{};
  std::vector<cplx> roots;  // N-1 entries
};

// the point-basis residual: component j is
//   Lambda_0^2 prod_l sinh(th_j - z_l + eta/2) sinh(th_j - z_l - eta/2)
//   + sinh^{-2N}(eta) prod_l sinh(th_j - th_l + eta) sinh(th_j - th_l - eta)
// normalized by |second term| per component
Eigen::VectorXcd tt_residual(const TTSystem& sys);

// solver-basis residual: divided differences of the degree-2N polynomial
// G(w) on the nodes e^{2 th_j}; equivalent to the point conditions at
// distinct nodes and stays nondegenerate as the th_j coalesce (th -> 0)
double tt_dd_residual(const TTSystem& sys);

// scaled divided-difference residual components and the analytic Jacobian
// with respect to (ln Lambda_0, z_1..z_{N-1}); exposed so the Jacobian can
// be cross-checked against finite differences
Eigen::VectorXcd tt_dd_vector(const TTSystem& sys);
Eigen::MatrixXcd tt_dd_jacobian(const TTSystem& sys);

struct TTReport {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

// damped Newton (analytic Jacobian, Armijo backtracking, LM fallback) on the
// divided-difference residual at the system's own thetas
TTReport tt_newton(TTSystem& sys, double tol = 1e-10, int maxit = 60);

// continuation along explicit theta waypoints with adaptive bisection
// (depth <= 12) and a root-drift guard; empty path returns the seed
TTSystem solve_tt(const TTSystem& seed,
                  const std::vector<std::vector<cplx>>& theta_path);

// |Lambda(0)^{2N} - 1|: discriminates physical solutions from the spurious
// branches the functional relation also admits at theta = 0
double tt_physicality(const TTSystem& sys);

double tt_energy(const TTSystem& sys);

RootSet tt_to_rootset(const TTSystem& sys);
TTSystem tt_from_rootset(const RootSet& rs, const ModelParams& p);

// pattern-seeded growth N-2 -> N for the lowest pair excitation in the
// ferro regime: imaginary roots by empirical rank interpolation of the
// previous pair state, pair seeded at Im = -pi/2, ln Lambda_0 extrapolated
struct GrowResult {
  bool found = false;
  TTSystem sys;
  double energy = 0.0;
  double physicality = 0.0;
};
GrowResult grow_pair_state(const TTSystem& prev_pair, double dlog_lambda0,
                           const ModelParams& target, double energy_center,
                           double energy_window = 0.35);

}  // namespace axxz
