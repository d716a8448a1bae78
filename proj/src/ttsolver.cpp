#include "axxz/ttsolver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace axxz {

namespace {

using Vec = std::vector<cplx>;

Vec conv(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size() - 1, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// coefficients of p(w e^{-2 eta}) given those of p(w)
Vec shift_arg(const Vec& p, const cplx& eta) {
  Vec out(p.size());
  cplx f(1.0, 0.0);
  const cplx step = std::exp(-2.0 * eta);
  for (std::size_t k = 0; k < p.size(); ++k) {
    out[k] = p[k] * f;
    f *= step;
  }
  return out;
}

// successive synthetic division by (w - node): the remainders are the
// Newton-basis (divided-difference) coefficients on the node sequence,
// well defined for repeated nodes
Vec newton_coeffs(Vec cur, const Vec& nodes, std::size_t count) {
  Vec out(count);
  for (std::size_t j = 0; j < count; ++j) {
    const cplx r = nodes[j];
    const std::size_t d = cur.size() - 1;
    Vec q(d);
    cplx carry = cur[d];
    for (std::size_t k = d; k-- > 0;) {
      q[k] = carry;
      carry = cur[k] + r * carry;
    }
    out[j] = carry;
    cur = std::move(q);
  }
  return out;
}

struct TTPoly {
  Vec first;   // w e^{(N-1)eta} P(w) P(w e^{-2eta}); carries Lambda_0^2
  Vec second;  // A(w) D(w); independent of the unknowns
  Vec nodes;   // e^{2 th_j}
  Vec p_all;   // P(w) including the Lambda_0 factor
  std::vector<Vec> p_fac;  // per-root linear factors of P
};

Vec second_term(const ModelParams& p) {
  const int n = p.n_sites;
  const cplx eta = p.eta;
  const cplx sh = std::sinh(eta);
  Vec a{cplx(1.0, 0.0)}, d{cplx(1.0, 0.0)};
  for (int l = 0; l < n; ++l) {
    const cplx th = p.theta(l);
    a = conv(a, Vec{-std::exp(th - eta) / (2.0 * sh),
                    std::exp(eta - th) / (2.0 * sh)});
    d = conv(d, Vec{-std::exp(th + eta) / (2.0 * sh),
                    std::exp(-eta - th) / (2.0 * sh)});
  }
  return conv(a, d);
}

TTPoly build_poly(const TTSystem& sys) {
  const ModelParams& p = sys.params;
  const int n = p.n_sites;
  const cplx eta = p.eta;
  TTPoly out;
  out.p_fac.reserve(n - 1);
  Vec pw{std::exp(sys.log_lambda0)};
  for (const cplx& z : sys.roots) {
    Vec fac{-std::exp(z - eta / 2.0) / 2.0, std::exp(eta / 2.0 - z) / 2.0};
    pw = conv(pw, fac);
    out.p_fac.push_back(std::move(fac));
  }
  out.p_all = pw;
  const Vec psh = shift_arg(pw, eta);
  const Vec t1 = conv(pw, psh);
  const cplx pref = std::exp(cplx(n - 1, 0) * eta);
  out.first.assign(t1.size() + 1, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < t1.size(); ++k) out.first[k + 1] = pref * t1[k];
  out.second = second_term(p);
  out.nodes.resize(n);
  for (int j = 0; j < n; ++j) out.nodes[j] = std::exp(2.0 * p.theta(j));
  return out;
}

Eigen::VectorXd dd_scale(const TTPoly& tp, int n) {
  const Vec sdd = newton_coeffs(tp.second, tp.nodes, n);
  double geo = 0.0;
  int cnt = 0;
  for (const cplx& v : sdd) {
    const double a = std::abs(v);
    if (a > 0.0) {
      geo += std::log(a);
      ++cnt;
    }
  }
  geo = cnt ? std::exp(geo / cnt) : 1.0;
  Eigen::VectorXd s(n);
  for (int j = 0; j < n; ++j)
    s(j) = std::max(std::abs(sdd[j]), 1e-3 * geo);
  return s;
}

Eigen::VectorXcd dd_vector_scaled(const TTPoly& tp, int n,
                                  const Eigen::VectorXd& s) {
  Vec g(tp.second);
  for (std::size_t k = 0; k < tp.first.size(); ++k) g[k] += tp.first[k];
  const Vec gdd = newton_coeffs(g, tp.nodes, n);
  Eigen::VectorXcd f(n);
  for (int j = 0; j < n; ++j) f(j) = gdd[j] / s(j);
  return f;
}

struct Packed {
  Eigen::VectorXcd f;
  Eigen::MatrixXcd jac;
};

Packed residual_and_jacobian(const TTSystem& sys, bool want_jac) {
  const ModelParams& p = sys.params;
  const int n = p.n_sites;
  const cplx eta = p.eta;
  const TTPoly tp = build_poly(sys);
  const Eigen::VectorXd s = dd_scale(tp, n);
  Packed out;
  out.f = dd_vector_scaled(tp, n, s);
  if (!want_jac) return out;
  out.jac.resize(n, n);
  // d/d ln Lambda_0: the first term carries Lambda_0^2
  {
    Vec dg(tp.first.size());
    for (std::size_t k = 0; k < dg.size(); ++k) dg[k] = 2.0 * tp.first[k];
    const Vec dd = newton_coeffs(dg, tp.nodes, n);
    for (int j = 0; j < n; ++j) out.jac(j, 0) = dd[j] / s(j);
  }
  // prefix/suffix products over the P factors for the per-root derivatives
  const int m = n - 1;
  std::vector<Vec> pre(m + 1), suf(m + 1);
  pre[0] = Vec{std::exp(sys.log_lambda0)};
  for (int i = 0; i < m; ++i) pre[i + 1] = conv(pre[i], tp.p_fac[i]);
  suf[m] = Vec{cplx(1.0, 0.0)};
  for (int i = m; i-- > 0;) suf[i] = conv(tp.p_fac[i], suf[i + 1]);
  const cplx pref = std::exp(cplx(n - 1, 0) * eta);
  for (int l = 0; l < m; ++l) {
    const cplx z = sys.roots[l];
    const Vec dfac{-std::exp(z - eta / 2.0) / 2.0,
                   -std::exp(eta / 2.0 - z) / 2.0};
    const Vec dp = conv(conv(pre[l], suf[l + 1]), dfac);
    const Vec psh = shift_arg(tp.p_all, eta);
    const Vec dpsh = shift_arg(dp, eta);
    Vec dt1 = conv(dp, psh);
    const Vec t2 = conv(tp.p_all, dpsh);
    for (std::size_t k = 0; k < dt1.size(); ++k) dt1[k] += t2[k];
    Vec dg(dt1.size() + 1, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < dt1.size(); ++k) dg[k + 1] = pref * dt1[k];
    const Vec dd = newton_coeffs(dg, tp.nodes, n);
    for (int j = 0; j < n; ++j) out.jac(j, l + 1) = dd[j] / s(j);
  }
  return out;
}

void unpack(TTSystem& sys, const Eigen::VectorXcd& x) {
  sys.log_lambda0 = x(0);
  for (std::size_t l = 0; l < sys.roots.size(); ++l) sys.roots[l] = x(l + 1);
}

Eigen::VectorXcd pack(const TTSystem& sys) {
  Eigen::VectorXcd x(sys.roots.size() + 1);
  x(0) = sys.log_lambda0;
  for (std::size_t l = 0; l < sys.roots.size(); ++l) x(l + 1) = sys.roots[l];
  return x;
}

double inf_norm(const Eigen::VectorXcd& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    m = std::max(m, std::abs(v(i)));
  return m;
}

// strip-reduce the roots; each i*pi shift flips the sign of one Lambda
// factor, so fold the parity into Lambda_0
void canonicalize(TTSystem& sys) {
  long flips = 0;
  for (cplx& z : sys.roots) {
    const double y = z.imag();
    const double yr = strip_reduce_im(y);
    flips += std::lround((y - yr) / kPi);
    z = cplx(z.real(), yr);
  }
  if (flips % 2 != 0) sys.log_lambda0 += cplx(0.0, kPi);
  double im = sys.log_lambda0.imag();
  im -= 2.0 * kPi * std::floor((im + kPi) / (2.0 * kPi));
  sys.log_lambda0 = cplx(sys.log_lambda0.real(), im);
}

// max distance under greedy nearest matching; guards continuation against
// hopping to a different solution branch
double branch_drift(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const cplx& za : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(za - b[j]);
      if (d < best) {
        best = d;
        bi = j;
      }
    }
    used[bi] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

bool advance_to(TTSystem& cur, const std::vector<cplx>& target, int depth) {
  TTSystem trial = cur;
  trial.params.thetas = target;
  const TTReport rep = tt_newton(trial);
  // nearly degenerate levels keep root sets ~0.1 apart, so the guard must
  // sit well below that; legitimate per-step motion shrinks under bisection
  if (rep.converged && branch_drift(trial.roots, cur.roots) < 0.08) {
    cur = std::move(trial);
    return true;
  }
  if (depth >= 12) return false;
  std::vector<cplx> mid(target.size());
  for (std::size_t j = 0; j < target.size(); ++j)
    mid[j] = 0.5 * (cur.params.theta(j) + target[j]);
  if (!advance_to(cur, mid, depth + 1)) return false;
  return advance_to(cur, target, depth + 1);
}

std::string format_thetas(const std::vector<cplx>& th) {
  std::ostringstream os;
  os << "[";
  for (std::size_t j = 0; j < th.size(); ++j) {
    if (j) os << ", ";
    os << th[j].real() << (th[j].imag() < 0 ? "-" : "+")
       << std::abs(th[j].imag()) << "i";
  }
  os << "]";
  return os.str();
}

}  // namespace

Eigen::VectorXcd tt_residual(const TTSystem& sys) {
  const ModelParams& p = sys.params;
  const int n = p.n_sites;
  const cplx eta = p.eta;
  const cplx l0sq = std::exp(2.0 * sys.log_lambda0);
  const cplx shinv = std::pow(std::sinh(eta), -2 * n);
  Eigen::VectorXcd f(n);
  for (int j = 0; j < n; ++j) {
    const cplx th = p.theta(j);
    cplx t1 = l0sq;
    for (const cplx& z : sys.roots)
      t1 *= std::sinh(th - z + eta / 2.0) * std::sinh(th - z - eta / 2.0);
    cplx t2 = shinv;
    for (int l = 0; l < n; ++l)
      t2 *= std::sinh(th - p.theta(l) + eta) * std::sinh(th - p.theta(l) - eta);
    double s = std::abs(t2);
    if (s < 1e-300) s = 1.0;
    f(j) = (t1 + t2) / s;
  }
  return f;
}

double tt_dd_residual(const TTSystem& sys) {
  const TTPoly tp = build_poly(sys);
  const int n = sys.params.n_sites;
  const Eigen::VectorXd s = dd_scale(tp, n);
  return inf_norm(dd_vector_scaled(tp, n, s));
}

Eigen::VectorXcd tt_dd_vector(const TTSystem& sys) {
  return residual_and_jacobian(sys, false).f;
}

Eigen::MatrixXcd tt_dd_jacobian(const TTSystem& sys) {
  return residual_and_jacobian(sys, true).jac;
}

TTReport tt_newton(TTSystem& sys, double tol, int maxit) {
  const int n = sys.params.n_sites;
  if (static_cast<int>(sys.roots.size()) != n - 1)
    throw std::invalid_argument("tt_newton: need N-1 roots");
  Eigen::VectorXcd x = pack(sys);
  Packed pk = residual_and_jacobian(sys, true);
  double nrm = inf_norm(pk.f);
  TTReport rep;
  for (int it = 0; it < maxit; ++it) {
    if (nrm <= tol) break;
    const Eigen::VectorXcd dx = pk.jac.colPivHouseholderQr().solve(-pk.f);
    bool accepted = false;
    Eigen::VectorXcd xn;
    for (double lam = 1.0; lam >= 1e-8; lam *= 0.5) {
      xn = x + lam * dx;
      unpack(sys, xn);
      const double trial = inf_norm(residual_and_jacobian(sys, false).f);
      if (trial < nrm * (1.0 - 1e-4 * lam)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Levenberg fallback for the stiff spots
      const Eigen::MatrixXcd jhj = pk.jac.adjoint() * pk.jac;
      const Eigen::VectorXcd rhs = pk.jac.adjoint() * (-pk.f);
      double mu = 1e-6 * jhj.diagonal().cwiseAbs().maxCoeff();
      if (!(mu > 0.0)) mu = 1e-12;
      for (int t = 0; t < 30; ++t) {
        Eigen::MatrixXcd m = jhj;
        m.diagonal().array() += mu;
        xn = x + m.ldlt().solve(rhs);
        unpack(sys, xn);
        const double trial = inf_norm(residual_and_jacobian(sys, false).f);
        if (trial < nrm) {
          accepted = true;
          break;
        }
        mu *= 4.0;
      }
    }
    if (!accepted) {
      unpack(sys, x);
      rep.iterations = it;
      rep.residual = nrm;
      rep.converged = nrm <= tol;
      return rep;
    }
    x = xn;
    unpack(sys, x);
    pk = residual_and_jacobian(sys, true);
    nrm = inf_norm(pk.f);
    rep.iterations = it + 1;
  }
  rep.residual = nrm;
  rep.converged = nrm <= tol;
  return rep;
}

TTSystem solve_tt(const TTSystem& seed,
                  const std::vector<std::vector<cplx>>& theta_path) {
  if (theta_path.empty()) return seed;
  const int n = seed.params.n_sites;
  for (const auto& th : theta_path)
    if (static_cast<int>(th.size()) != n)
      throw std::invalid_argument("solve_tt: waypoint size mismatch");
  TTSystem cur = seed;
  cur.params.thetas = theta_path.front();
  if (inf_norm(tt_residual(cur)) > 1e-2)
    throw std::runtime_error(
        "solve_tt: seed residual above 1e-2 at path start");
  TTReport rep = tt_newton(cur);
  if (!rep.converged) {
    std::ostringstream os;
    os << "solve_tt: no convergence at path start, residual " << rep.residual;
    throw std::runtime_error(os.str());
  }
  for (std::size_t w = 1; w < theta_path.size(); ++w) {
    if (!advance_to(cur, theta_path[w], 0)) {
      std::ostringstream os;
      os << "solve_tt: continuation stalled before waypoint " << w
         << "; last good thetas " << format_thetas(cur.params.thetas);
      throw std::runtime_error(os.str());
    }
  }
  canonicalize(cur);
  return cur;
}

double tt_physicality(const TTSystem& sys) {
  cplx l0 = std::exp(sys.log_lambda0);
  for (const cplx& z : sys.roots)
    l0 *= std::sinh(sys.params.eta / 2.0 - z);
  const cplx p = std::pow(l0, 2 * sys.params.n_sites);
  const double v = std::abs(p - 1.0);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

double tt_energy(const TTSystem& sys) {
  const cplx eta = sys.params.eta;
  cplx e = cplx(sys.params.n_sites, 0) * std::cosh(eta);
  for (const cplx& z : sys.roots) {
    const cplx sh = std::sinh(z - eta / 2.0);
    if (std::abs(sh) < 1e-300)
      return std::numeric_limits<double>::quiet_NaN();
    e += 2.0 * std::sinh(eta) * std::cosh(z - eta / 2.0) / sh;
  }
  return e.real();
}

RootSet tt_to_rootset(const TTSystem& sys) {
  TTSystem c = sys;
  canonicalize(c);
  RootSet rs;
  rs.lambda0 = std::exp(c.log_lambda0);
  rs.roots = c.roots;
  rs.recon_residual = inf_norm(tt_residual(c));
  return rs;
}

TTSystem tt_from_rootset(const RootSet& rs, const ModelParams& p) {
  TTSystem sys;
  sys.params = p;
  sys.log_lambda0 = std::log(rs.lambda0);
  sys.roots = rs.roots;
  return sys;
}

GrowResult grow_pair_state(const TTSystem& prev_pair, double dlog_lambda0,
                           const ModelParams& target, double energy_center,
                           double energy_window) {
  GrowResult out;
  const int n = target.n_sites;
  // split the previous state into its imaginary band and the pair
  std::vector<double> prev_im;
  std::vector<cplx> prev_pair_roots;
  for (const cplx& z : prev_pair.roots) {
    if (std::abs(z.real()) > 0.15)
      prev_pair_roots.push_back(z);
    else
      prev_im.push_back(z.imag());
  }
  if (prev_pair_roots.size() != 2 || prev_im.empty()) return out;
  std::sort(prev_im.begin(), prev_im.end());
  const int m_old = static_cast<int>(prev_im.size());
  const int m_new = n - 3;
  // empirical rank interpolation of the imaginary band
  std::vector<cplx> seeds;
  for (int j = 0; j < m_new; ++j) {
    const double q = (j + 0.5) / m_new;
    double v;
    const double lo = 0.5 / m_old, hi = (m_old - 0.5) / m_old;
    if (q <= lo)
      v = prev_im.front();
    else if (q >= hi)
      v = prev_im.back();
    else {
      const double t = q * m_old - 0.5;
      const int i0 = static_cast<int>(std::floor(t));
      const double fr = t - i0;
      v = prev_im[i0] * (1.0 - fr) + prev_im[i0 + 1] * fr;
    }
    seeds.emplace_back(0.0, v);
  }
  const double xp_prev =
      0.5 * (std::abs(prev_pair_roots[0].real()) +
             std::abs(prev_pair_roots[1].real()));
  const double xp = std::min(0.749, xp_prev + 0.6 * (0.75 - xp_prev));
  seeds.emplace_back(xp, -kPi / 2.0);
  seeds.emplace_back(-xp, -kPi / 2.0);
  for (const double c : {1.0, 0.9, 1.1, 0.75, 1.25}) {
    TTSystem sys;
    sys.params = target;
    sys.log_lambda0 = prev_pair.log_lambda0 + cplx(dlog_lambda0 * c, 0.0);
    sys.roots = seeds;
    TTReport rep = tt_newton(sys, 1e-10, 80);
    if (!rep.converged) continue;
    canonicalize(sys);
    const double phys = tt_physicality(sys);
    if (phys > 0.15) continue;
    int pairs = 0;
    bool pattern = true;
    for (const cplx& z : sys.roots) {
      if (std::abs(z.real()) > 0.15) {
        ++pairs;
        if (std::abs(std::abs(z.imag()) - kPi / 2.0) > 0.2) pattern = false;
      }
    }
    if (pairs != 2 || !pattern) continue;
    const double e = tt_energy(sys);
    if (!(std::abs(e - energy_center) < energy_window)) continue;
    out.found = true;
    out.sys = std::move(sys);
    out.energy = e;
    out.physicality = phys;
    return out;
  }
  return out;
}

}  // namespace axxz
