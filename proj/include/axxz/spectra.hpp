#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "axxz/params.hpp"

namespace axxz {

// one joint eigenstate of (H, t(u0))
struct EigenRecord {
  int index = 0;
  double energy = 0.0;
  cplx lambda_u0{};
  Eigen::VectorXcd vec;  // normalized joint eigenvector
};

struct Spectrum {
  ModelParams params;
  cplx u0{};
  std::vector<EigenRecord> records;  // sorted by energy ascending
};

enum class RootType { imaginary, pair, unpaired };

struct RootTag {
  RootType type = RootType::imaginary;
  int partner = -1;  // index of the paired root, -1 otherwise
  int n = 0;         // string label, |Re z| ~ (n+1) eta/2 convention
  int n_alt = 0;     // same pair in the other printed labeling (= n+1)
};

// Lambda_0 and the N-1 zero roots in the strip Im z in [-pi/2, pi/2)
struct RootSet {
  cplx lambda0{};
  std::vector<cplx> roots;
  std::vector<RootTag> tags;      // empty until classify_roots
  double recon_residual = 0.0;    // relative, on the fresh validation grid
};

struct ClassifyReport {
  int n_imaginary = 0, n_pairs = 0, n_unpaired = 0;
};

struct FitResult {
  bool exponential = true;  // A e^{-bN} vs A N^{-b}
  double amplitude = 0.0;
  double rate = 0.0;
  double rms_residual = 0.0;  // log space
};

// Rayleigh sampler for one record: v^dag t(u) v / v^dag v
cplx lambda_at(const ModelParams& p, const Eigen::VectorXcd& vec, cplx u,
               Exec exec = Exec::parallel);

// real-symmetric eigensolve (lapack dsyevd when available, Eigen otherwise);
// eigenvalues ascending, optional vectors
void sym_eig(const Eigen::MatrixXd& H, Eigen::VectorXd& w, Eigen::MatrixXd& V,
             bool want_vectors);

// sorted H eigenvalues only (cheap route for big N)
Eigen::VectorXd energy_levels(const ModelParams& p);

// diagonalize t(u0) on the eigenspaces of H: dsyevd on H, then per
// near-degenerate energy cluster the projected t(u0) block is diagonalized
// and the cluster basis rotated.  Retries u0 + 0.013 on eigenvalue collision,
// then refines with a second probe.
Spectrum joint_eigenbasis(const ModelParams& p, cplx u0 = cplx(0.17, 0.09),
                          Exec exec = Exec::parallel);

// fit Lambda(u) = Lambda_0 prod sinh(u - z_j + eta/2) from samples on the
// imaginary axis: 4N-point grid, least-squares polynomial in e^{2u},
// companion-matrix roots, Newton polish, strip reduction
RootSet extract_roots(const ModelParams& p,
                      const std::function<cplx(cplx)>& sampler);
RootSet extract_roots(const Spectrum& s, int index,
                      Exec exec = Exec::parallel);

double energy_from_roots(const RootSet& rs, const ModelParams& p);

// topological momentum in [0, 2pi); the half-pi branch is fixed against
// -i log Lambda(0) rebuilt from the root set
double momentum_from_roots(const RootSet& rs, const ModelParams& p);

// tol <= 0 means the default 10 e^{-Re(eta) N/2}
ClassifyReport classify_roots(RootSet& rs, const ModelParams& p,
                              double tol = -1.0);

FitResult fit_decay(const std::vector<std::pair<double, double>>& data,
                    bool exponential);

}  // namespace axxz
