#pragma once

#include <complex>
#include <vector>
#include <stdexcept>
#include <cmath>
#include <string>

namespace axxz {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

enum class Regime { ferro, af };

enum class Exec { serial, parallel };

// Chain size, anisotropy and the imaginary inhomogeneity shifts.  Single
// source of truth for a run; everything downstream takes this by const ref.
struct ModelParams {
  int n_sites = 0;
  cplx eta{};
  std::vector<cplx> thetas;  // empty means all zero

  ModelParams() = default;
  ModelParams(int n, cplx e) : n_sites(n), eta(e), thetas(n, cplx(0.0, 0.0)) {}
  ModelParams(int n, cplx e, std::vector<cplx> th)
      : n_sites(n), eta(e), thetas(std::move(th)) {}

  Regime regime() const {
    return std::abs(eta.imag()) < 1e-9 ? Regime::ferro : Regime::af;
  }
  // the positive real anisotropy entering all thermodynamic formulas
  double eta_plus() const { return eta.real(); }

  std::size_t dim() const { return std::size_t(1) << n_sites; }

  void validate() const {
    if (n_sites < 2) throw std::invalid_argument("n_sites must be >= 2");
    double im = eta.imag();
    if (std::abs(im) > 1e-9 && std::abs(im - kPi) > 1e-9)
      throw std::invalid_argument("eta must be real or real + i*pi");
    if (std::abs(std::sinh(eta)) < 1e-12)
      throw std::invalid_argument("degenerate anisotropy: sinh(eta) = 0");
    if (!thetas.empty() && (int)thetas.size() != n_sites)
      throw std::invalid_argument("thetas size must equal n_sites");
    for (const cplx& th : thetas) {
      if (std::abs(th.real()) > 1e-12)
        throw std::invalid_argument("thetas must be purely imaginary");
      if (th.imag() < -kPi / 2 - 1e-12 || th.imag() >= kPi / 2)
        throw std::invalid_argument("Im(theta) must lie in [-pi/2, pi/2)");
    }
  }

  cplx theta(int j) const {  // 0-based site index
    return thetas.empty() ? cplx(0.0, 0.0) : thetas[j];
  }

  bool homogeneous() const {
    for (const cplx& th : thetas)
      if (std::abs(th) > 1e-15) return false;
    return true;
  }
};

inline double strip_reduce_im(double y) {
  // map to [-pi/2, pi/2)
  return y - kPi * std::floor((y + kPi / 2) / kPi);
}

inline cplx strip_reduce(cplx z) {
  return cplx(z.real(), strip_reduce_im(z.imag()));
}

}  // namespace axxz
