#include "axxz/transfer.hpp"

#include <cmath>

namespace axxz {

Eigen::Matrix4cd r_matrix(cplx u, cplx eta) {
  cplx sh = std::sinh(eta);
  if (std::abs(sh) < 1e-12)
    throw std::invalid_argument("degenerate anisotropy: sinh(eta) = 0");
  cplx a = std::sinh(u + eta) / sh;
  cplx b = std::sinh(u) / sh;
  Eigen::Matrix4cd R = Eigen::Matrix4cd::Zero();
  R(0, 0) = a;
  R(1, 1) = b;
  R(1, 2) = 1.0;
  R(2, 1) = 1.0;
  R(2, 2) = b;
  R(3, 3) = a;
  return R;
}

namespace {

// one site update of the two aux components of a monodromy column.
// out0[i] (aux 0) and out1[i] (aux 1) gather from in0/in1 with the site bit
// of i giving the outgoing physical index:
//   bit=0: out0 = a*in0           ; out1 = in0[bit->1] + b*in1
//   bit=1: out0 = b*in0 + in1[bit->0] ; out1 = a*in1
template <bool Par>
void site_sweep(const Eigen::VectorXcd& in0, const Eigen::VectorXcd& in1,
                Eigen::VectorXcd& out0, Eigen::VectorXcd& out1, cplx a, cplx b,
                std::size_t mask) {
  const std::ptrdiff_t dim = in0.size();
#pragma omp parallel for schedule(static) if (Par)
  for (std::ptrdiff_t i = 0; i < dim; ++i) {
    if (i & (std::ptrdiff_t)mask) {
      out0[i] = b * in0[i] + in1[i ^ mask];
      out1[i] = a * in1[i];
    } else {
      out0[i] = a * in0[i];
      out1[i] = in0[i ^ mask] + b * in1[i];
    }
  }
}

}  // namespace

Eigen::VectorXcd apply_transfer(const ModelParams& p, cplx u,
                                const Eigen::VectorXcd& v, Exec exec) {
  const std::size_t dim = p.dim();
  if ((std::size_t)v.size() != dim)
    throw std::invalid_argument("apply_transfer: vector has wrong dimension");
  cplx sh = std::sinh(p.eta);
  // two monodromy columns <a|T|0> and <a|T|1>; antiperiodic closure keeps
  // the off-diagonal pair W[0][1] + W[1][0]
  Eigen::VectorXcd c0a0 = v, c0a1 = Eigen::VectorXcd::Zero(dim);
  Eigen::VectorXcd c1a0 = Eigen::VectorXcd::Zero(dim), c1a1 = v;
  Eigen::VectorXcd t0(dim), t1(dim);
  for (int j = 0; j < p.n_sites; ++j) {
    cplx uu = u - p.theta(j);
    cplx a = std::sinh(uu + p.eta) / sh;
    cplx b = std::sinh(uu) / sh;
    std::size_t mask = std::size_t(1) << j;
    if (exec == Exec::parallel) {
      site_sweep<true>(c0a0, c0a1, t0, t1, a, b, mask);
      c0a0.swap(t0);
      c0a1.swap(t1);
      site_sweep<true>(c1a0, c1a1, t0, t1, a, b, mask);
      c1a0.swap(t0);
      c1a1.swap(t1);
    } else {
      site_sweep<false>(c0a0, c0a1, t0, t1, a, b, mask);
      c0a0.swap(t0);
      c0a1.swap(t1);
      site_sweep<false>(c1a0, c1a1, t0, t1, a, b, mask);
      c1a0.swap(t0);
      c1a1.swap(t1);
    }
  }
  return c1a0 + c0a1;  // W[0][1] + W[1][0]
}

LinearOperator transfer_matrix(const ModelParams& p, cplx u, Exec exec) {
  const std::ptrdiff_t dim = (std::ptrdiff_t)p.dim();
  Eigen::MatrixXcd t(dim, dim);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t c = 0; c < dim; ++c) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
    e[c] = 1.0;
    t.col(c) = apply_transfer(p, u, e, Exec::serial);
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "t(%.6g%+.6gi)", u.real(), u.imag());
  return LinearOperator{std::move(t), buf};
}

Eigen::MatrixXd hamiltonian(const ModelParams& p) {
  const std::ptrdiff_t dim = (std::ptrdiff_t)p.dim();
  const int N = p.n_sites;
  double ch = std::cosh(p.eta).real();  // imag part is 0 in both regimes
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  for (std::ptrdiff_t s = 0; s < dim; ++s) {
    double diag = 0.0;
    for (int j = 0; j < N; ++j) {
      int k = (j + 1) % N;
      int bj = (s >> j) & 1, bk = (s >> k) & 1;
      double zz = (bj == bk) ? 1.0 : -1.0;
      bool twist = (j == N - 1);
      diag += twist ? ch * zz : -ch * zz;
      // xx+yy part flips unequal neighbours; the twisted bond carries
      // -xx+yy which flips equal ones instead
      bool flips = twist ? (bj == bk) : (bj != bk);
      if (flips) {
        std::ptrdiff_t s2 = s ^ (std::ptrdiff_t(1) << j) ^ (std::ptrdiff_t(1) << k);
        H(s2, s) += -2.0;
      }
    }
    H(s, s) += diag;
  }
  return H;
}

std::pair<cplx, cplx> ad_functions(const ModelParams& p, cplx u) {
  cplx sh = std::sinh(p.eta);
  cplx a = 1.0, d = 1.0;
  for (int j = 0; j < p.n_sites; ++j) {
    a *= std::sinh(u - p.theta(j) + p.eta) / sh;
    d *= std::sinh(u - p.theta(j)) / sh;
  }
  return {a, d};
}

double verify_tt_identity(const ModelParams& p, Exec exec) {
  const std::ptrdiff_t dim = (std::ptrdiff_t)p.dim();
  double worst = 0.0;
  for (int j = 0; j < p.n_sites; ++j) {
    cplx th = p.theta(j);
    LinearOperator t1 = transfer_matrix(p, th, exec);
    LinearOperator t2 = transfer_matrix(p, th - p.eta, exec);
    cplx a = ad_functions(p, th).first;
    cplx d = ad_functions(p, th - p.eta).second;
    Eigen::MatrixXcd res = t1.m * t2.m;
    res += a * d * Eigen::MatrixXcd::Identity(dim, dim);
    worst = std::max(worst, res.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace axxz
