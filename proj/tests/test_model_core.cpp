#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "axxz/spectra.hpp"
#include "axxz/transfer.hpp"

using namespace axxz;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

namespace {

const cplx ETA_F(0.75, 0.0);
const cplx ETA_AF(0.75, kPi);

MatrixXcd kron4(const Eigen::Matrix2cd& A, const Eigen::Matrix2cd& B) {
  MatrixXcd K(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) K.block(2 * i, 2 * j, 2, 2) = A(i, j) * B;
  return K;
}

// embed a 4x4 two-body matrix into spaces (a,b) of a 3-qubit product a,b,c
MatrixXcd embed3(const Eigen::Matrix4cd& R, int a, int b) {
  MatrixXcd M = MatrixXcd::Zero(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) {
      int ra = (r >> (2 - a)) & 1, rb = (r >> (2 - b)) & 1;
      int ca = (c >> (2 - a)) & 1, cb = (c >> (2 - b)) & 1;
      int rest_r = r & ~((1 << (2 - a)) | (1 << (2 - b)));
      int rest_c = c & ~((1 << (2 - a)) | (1 << (2 - b)));
      if (rest_r != rest_c) continue;
      M(r, c) = R(2 * ra + rb, 2 * ca + cb);
    }
  return M;
}

}  // namespace

TEST_CASE("r_matrix initial condition is the permutation") {
  Eigen::Matrix4cd R = r_matrix(0.0, ETA_F);
  Eigen::Matrix4cd P = Eigen::Matrix4cd::Zero();
  P(0, 0) = P(3, 3) = P(1, 2) = P(2, 1) = 1.0;
  CHECK((R - P).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("r_matrix unitarity with the scalar phi") {
  // phi(u) = -sinh(u+eta)sinh(u-eta)/sinh^2(eta), phi(0.3) ~ 0.8629
  cplx u(0.3, 0.0);
  cplx phi = -std::sinh(u + ETA_F) * std::sinh(u - ETA_F) /
             (std::sinh(ETA_F) * std::sinh(ETA_F));
  CHECK(phi.real() == doctest::Approx(0.8629).epsilon(1e-3));
  Eigen::Matrix4cd P = Eigen::Matrix4cd::Zero();
  P(0, 0) = P(3, 3) = P(1, 2) = P(2, 1) = 1.0;
  // R_{j0}(-u) = P R_{0j}(-u) P
  Eigen::Matrix4cd lhs = r_matrix(u, ETA_F) * (P * r_matrix(-u, ETA_F) * P);
  Eigen::Matrix4cd rhs = phi * Eigen::Matrix4cd::Identity();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("r_matrix crossing and PT symmetry") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> un(-0.5, 0.5);
  Eigen::Matrix2cd sy;
  sy << 0.0, cplx(0, -1), cplx(0, 1), 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    cplx u(un(rng), un(rng));
    Eigen::Matrix4cd R = r_matrix(u, ETA_F);
    // crossing: R(u) = -sigma^y_0 R^{t0}(-u-eta) sigma^y_0
    Eigen::Matrix4cd Rt = r_matrix(-u - ETA_F, ETA_F);
    Eigen::Matrix4cd Rt0;  // partial transpose on the auxiliary space
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int s = 0; s < 2; ++s)
          for (int t = 0; t < 2; ++t)
            Rt0(2 * a + s, 2 * b + t) = Rt(2 * b + s, 2 * a + t);
    Eigen::Matrix4cd Y = kron4(sy, Eigen::Matrix2cd::Identity());
    CHECK((R + Y * Rt0 * Y).cwiseAbs().maxCoeff() <= 1e-12);
    // PT: R^{t0 tj}(u) = R(u) for the symmetric six-vertex weights
    CHECK((R - R.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("Yang-Baxter equation on three spaces") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> un(-0.6, 0.6);
  for (int rep = 0; rep < 4; ++rep) {
    cplx u1(un(rng), un(rng)), u2(un(rng), un(rng));
    MatrixXcd R12 = embed3(r_matrix(u1 - u2, ETA_F), 0, 1);
    MatrixXcd R13 = embed3(r_matrix(u1, ETA_F), 0, 2);
    MatrixXcd R23 = embed3(r_matrix(u2, ETA_F), 1, 2);
    MatrixXcd lhs = R12 * R13 * R23;
    MatrixXcd rhs = R23 * R13 * R12;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("transfer matrices commute and obey the periodicity") {
  ModelParams p(6, ETA_F);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> un(-0.4, 0.4);
  cplx u(un(rng), un(rng)), v(un(rng), un(rng));
  MatrixXcd tu = transfer_matrix(p, u).m, tv = transfer_matrix(p, v).m;
  double rel = (tu * tv - tv * tu).cwiseAbs().maxCoeff() /
               (tu.cwiseAbs().maxCoeff() * tv.cwiseAbs().maxCoeff());
  CHECK(rel <= 1e-10);

  ModelParams p5(5, ETA_F);
  MatrixXcd a = transfer_matrix(p5, cplx(0.2, 0.0)).m;
  MatrixXcd b = transfer_matrix(p5, cplx(0.2, kPi)).m;
  // (-1)^{N-1} = +1 at N=5
  CHECK((b - a).cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("transfer conjugation identity") {
  ModelParams p(4, ETA_F);
  cplx u(0.1, 0.2);
  MatrixXcd td = transfer_matrix(p, u).m.adjoint();
  MatrixXcd rhs = transfer_matrix(p, -std::conj(u) - ETA_F).m;
  double s = rhs.cwiseAbs().maxCoeff();
  CHECK((td + rhs).cwiseAbs().maxCoeff() <= 1e-12 * s);  // (-1)^{N-1} = -1
}

TEST_CASE("t(0) is a signed shift: t(0)^{2N} = Id") {
  for (cplx eta : {ETA_F, ETA_AF}) {
    ModelParams p(4, eta);
    MatrixXcd t0 = transfer_matrix(p, cplx(0.0, 0.0)).m;
    MatrixXcd acc = MatrixXcd::Identity(16, 16);
    for (int i = 0; i < 8; ++i) acc = acc * t0;
    CHECK((acc - MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("hamiltonian basics") {
  for (cplx eta : {ETA_F, ETA_AF}) {
    ModelParams p(5, eta);
    MatrixXd H = hamiltonian(p);
    CHECK(H.trace() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  // N=2 the model collapses to -2 sx sx: spectrum {-2,-2,2,2}
  ModelParams p2(2, ETA_F);
  Eigen::VectorXd w = energy_levels(p2);
  CHECK(w[0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(w[2] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(w[3] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("hamiltonian equals the transfer log-derivative") {
  // H = -2 sinh(eta) t'(0) t(0)^{-1} + N cosh(eta), t'(0) by a
  // Richardson-extrapolated central difference
  for (cplx eta : {ETA_F, ETA_AF}) {
    ModelParams p(8, eta);
    const double h = 1e-3;
    MatrixXcd tp = transfer_matrix(p, cplx(h, 0)).m;
    MatrixXcd tm = transfer_matrix(p, cplx(-h, 0)).m;
    MatrixXcd tp2 = transfer_matrix(p, cplx(2 * h, 0)).m;
    MatrixXcd tm2 = transfer_matrix(p, cplx(-2 * h, 0)).m;
    MatrixXcd dt = (8.0 * (tp - tm) - (tp2 - tm2)) / (12.0 * h);
    MatrixXcd t0 = transfer_matrix(p, cplx(0.0, 0.0)).m;
    // t'(0) and t(0) commute, so the left solve gives t'(0) t(0)^{-1}
    MatrixXcd logd = t0.partialPivLu().solve(dt);
    MatrixXcd Hfd = -2.0 * std::sinh(eta) * logd;
    Hfd += double(p.n_sites) * std::cosh(eta) *
           MatrixXcd::Identity(p.dim(), p.dim());
    MatrixXd H = hamiltonian(p);
    CHECK((Hfd - H.cast<cplx>()).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("ad_functions against a term-by-term product") {
  // the nine caption thetas truncated to six sites
  std::vector<cplx> th = {cplx(0, 0.14), cplx(0, 0.32), cplx(0, -0.43),
                          cplx(0, 0.54), cplx(0, -0.25), cplx(0, 0.63)};
  ModelParams p(6, ETA_F, th);
  cplx u(0.0, 0.3);
  auto [a, d] = ad_functions(p, u);
  cplx aref = 1.0, dref = 1.0;
  for (cplx t : th) {
    aref *= std::sinh(u - t + ETA_F) / std::sinh(ETA_F);
    dref *= std::sinh(u - t) / std::sinh(ETA_F);
  }
  CHECK(std::abs(a - aref) <= 1e-14 * std::abs(aref));
  CHECK(std::abs(d - dref) <= 1e-14 * std::abs(dref));
  // d(u) = a(u - eta) identically
  CHECK(std::abs(ad_functions(p, u + ETA_F).second - a) <= 1e-14 * std::abs(a));

  ModelParams p0(4, ETA_F);
  CHECK(std::abs(ad_functions(p0, ETA_F).second - 1.0) <= 1e-14);
  CHECK(std::abs(ad_functions(p0, cplx(0, 0)).second) <= 1e-14);
}

TEST_CASE("tt operator identity at the inhomogeneity points") {
  CHECK(verify_tt_identity(ModelParams(6, ETA_F)) <= 1e-9);
  CHECK(verify_tt_identity(ModelParams(6, ETA_AF)) <= 1e-9);
  std::vector<cplx> th = {cplx(0, 0.14), cplx(0, 0.32), cplx(0, -0.43),
                          cplx(0, 0.54), cplx(0, -0.25), cplx(0, 0.63)};
  CHECK(verify_tt_identity(ModelParams(6, ETA_F, th)) <= 1e-9);
}

TEST_CASE("apply_transfer kernels: parallel vs serial vs dense") {
  ModelParams p(7, ETA_AF, {cplx(0, 0.1), cplx(0, -0.2), cplx(0, 0.05),
                            cplx(0, 0.3), cplx(0, -0.12), cplx(0, 0.22),
                            cplx(0, 0.0)});
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  VectorXcd v(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) v[i] = cplx(nd(rng), nd(rng));
  cplx u(0.13, -0.21);
  VectorXcd a = apply_transfer(p, u, v, Exec::parallel);
  VectorXcd b = apply_transfer(p, u, v, Exec::serial);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);  // bit identical
  VectorXcd c = transfer_matrix(p, u).m * v;
  CHECK((a - c).cwiseAbs().maxCoeff() <= 1e-12 * c.cwiseAbs().maxCoeff());
}

TEST_CASE("params validation") {
  CHECK_THROWS(ModelParams(1, ETA_F).validate());
  CHECK_THROWS(ModelParams(4, cplx(0.75, 0.3)).validate());
  CHECK_THROWS(ModelParams(4, cplx(0.0, 0.0)).validate());
  ModelParams bad(4, ETA_F);
  bad.thetas[2] = cplx(0.1, 0.0);
  CHECK_THROWS(bad.validate());
  CHECK_NOTHROW(ModelParams(4, ETA_AF).validate());
  CHECK_THROWS(r_matrix(cplx(0.1, 0.0), cplx(0.0, kPi)));
}
