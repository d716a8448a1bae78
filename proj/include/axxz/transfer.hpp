#pragma once

#include <Eigen/Dense>
#include <string>

#include "axxz/params.hpp"

namespace axxz {

// dense operator on the 2^N spin space, tagged with where it came from
struct LinearOperator {
  Eigen::MatrixXcd m;
  std::string label;

  std::size_t dim() const { return (std::size_t)m.rows(); }
  bool finite() const { return m.allFinite(); }
};

// six-vertex R-matrix on aux (x) site, rows/cols ordered |a s>
Eigen::Matrix4cd r_matrix(cplx u, cplx eta);

// one MPO-style sweep: returns t(u) v without forming the dense matrix.
// cost ~ 16 * 2^N * N complex ops; exec picks the OpenMP or the serial
// reference kernel (bit-identical by construction, see tests).
Eigen::VectorXcd apply_transfer(const ModelParams& p, cplx u,
                                const Eigen::VectorXcd& v,
                                Exec exec = Exec::parallel);

// dense t(u), built column by column via apply_transfer
LinearOperator transfer_matrix(const ModelParams& p, cplx u,
                               Exec exec = Exec::parallel);

// spin Hamiltonian with the sigma^x-twisted bond; real symmetric in both regimes
Eigen::MatrixXd hamiltonian(const ModelParams& p);

// the scalar functions a(u), d(u) = a(u - eta)
std::pair<cplx, cplx> ad_functions(const ModelParams& p, cplx u);

// max over j of ||t(theta_j) t(theta_j - eta) + a(theta_j) d(theta_j - eta) Id||_max
double verify_tt_identity(const ModelParams& p, Exec exec = Exec::parallel);

}  // namespace axxz
