#include "axxz/thermo.hpp"

#include <cmath>
#include <stdexcept>

#include "axxz/quadrature.hpp"

namespace axxz {

namespace {

constexpr double kSeriesFloor = 1e-15;
constexpr int kSeriesCap = 10000;

void check_position(double t, const char* name) {
  // strip positions; the two ends differ by a full period so both are taken
  if (!(std::abs(t) <= kPi / 2 + 1e-12))
    throw std::invalid_argument(std::string(name) +
                                " must lie in [-pi/2, pi/2]");
}

double require_eta_plus(double eta) {
  if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
  return eta;
}

cplx cot(cplx z) { return std::cos(z) / std::sin(z); }

// phase of cosh(a + i x) for real a > 0, x in [-pi/2, pi/2]; continuous, odd
// in x, zero at x = 0.  This is the reduced branch of the momentum logs.
double cosh_phase(double a, double x) {
  return std::atan2(std::sinh(a) * std::sin(x), std::cosh(a) * std::cos(x));
}

}  // namespace

ExcitationSpec ExcitationSpec::ferro_ground() {
  ExcitationSpec s;
  s.tag = ThermoCase::ferro_ground;
  return s;
}

ExcitationSpec ExcitationSpec::ferro_string(int n, double alpha) {
  ExcitationSpec s;
  s.tag = ThermoCase::ferro_excited;
  s.n = n;
  s.alpha = alpha;
  s.validate();
  return s;
}

ExcitationSpec ExcitationSpec::af_lone_root(double beta) {
  ExcitationSpec s;
  s.tag = ThermoCase::af_even;
  s.beta = beta;
  s.validate();
  return s;
}

ExcitationSpec ExcitationSpec::af_odd_ground() {
  ExcitationSpec s;
  s.tag = ThermoCase::af_odd_ground;
  return s;
}

ExcitationSpec ExcitationSpec::af_odd_pq(double p, double q) {
  ExcitationSpec s;
  s.tag = ThermoCase::af_odd_excited;
  s.p = p;
  s.q = q;
  s.validate();
  return s;
}

void ExcitationSpec::validate() const {
  if (tag == ThermoCase::ferro_excited && n < 2)
    throw std::invalid_argument("string length n must be >= 2");
  check_position(alpha, "alpha");
  check_position(beta, "beta");
  check_position(p, "p");
  check_position(q, "q");
}

KernelValues kernels(int n, double x, double eta) {
  require_eta_plus(eta);
  if (n < 0) throw std::invalid_argument("kernel index n must be >= 0");
  cplx zp(x, n * eta / 2), zm(x, -n * eta / 2);
  if (std::abs(std::sin(zp)) < 1e-12 || std::abs(std::sin(zm)) < 1e-12)
    throw std::domain_error("kernels: x within 1e-12 of a cot pole");
  if (std::abs(std::cos(zp)) < 1e-12 || std::abs(std::cos(zm)) < 1e-12)
    throw std::domain_error("kernels: x within 1e-12 of a tan pole");
  KernelValues v;
  v.a = cot(zp) + cot(zm);                      // odd in x
  v.b = cot(zm) - cot(zp);                      // even in x
  v.c = 1.0 / cot(zp) + 1.0 / cot(zm);          // odd in x
  return v;
}

cplx kernel_ft_a(int n, int k, double eta) {
  if (k == 0) return cplx(0.0, 0.0);
  double s = k > 0 ? 1.0 : -1.0;
  return cplx(0.0, -s * 2.0 * kPi * std::exp(-n * eta * std::abs(k)));
}

cplx kernel_ft_b(int n, int k, double eta) {
  return cplx(0.0, 2.0 * kPi * std::exp(-n * eta * std::abs(k)));
}

cplx kernel_ft_c(int n, int k, double eta) {
  if (k == 0) return cplx(0.0, 0.0);
  double s = k > 0 ? 1.0 : -1.0;
  double par = (std::abs(k) % 2 == 0) ? 1.0 : -1.0;
  return cplx(0.0, par * s * 2.0 * kPi * std::exp(-n * eta * std::abs(k)));
}

const cplx& DensityProfile::at(int k) const {
  if (std::abs(k) > K) throw std::out_of_range("mode index beyond truncation");
  return coef[std::size_t(k + K)];
}

DensityProfile solve_density(const ExcitationSpec& spec,
                             const std::function<cplx(int)>& sigma,
                             int n_sites, double eta_plus, int K) {
  spec.validate();
  require_eta_plus(eta_plus);
  if (n_sites < 2) throw std::invalid_argument("n_sites must be >= 2");
  if (K < 1) throw std::invalid_argument("truncation K must be >= 1");
  if (std::abs(sigma(0) - cplx(1.0, 0.0)) > 1e-12)
    throw std::invalid_argument("sigma(0) must equal 1");
  bool odd_n = n_sites % 2 != 0;
  if (spec.tag == ThermoCase::af_even && odd_n)
    throw std::invalid_argument("af_even needs an even chain");
  if ((spec.tag == ThermoCase::af_odd_ground ||
       spec.tag == ThermoCase::af_odd_excited) &&
      !odd_n)
    throw std::invalid_argument("af_odd needs an odd chain");

  DensityProfile prof;
  prof.tag = spec.tag;
  prof.n_sites = n_sites;
  prof.eta_plus = eta_plus;
  prof.K = K;
  prof.coef.assign(std::size_t(2 * K + 1), cplx(0.0, 0.0));

  const double N = n_sites;
  for (int k = -K; k <= K; ++k) {
    if (k == 0) continue;
    cplx num, den;
    switch (spec.tag) {
      case ThermoCase::ferro_ground:
      case ThermoCase::ferro_excited: {
        cplx drive(0.0, 0.0);
        if (spec.tag == ThermoCase::ferro_excited)
          drive = std::polar(1.0, -2.0 * k * spec.alpha) *
                  (kernel_ft_b(spec.n - 1, k, eta_plus) +
                   kernel_ft_b(spec.n + 1, k, eta_plus));
        num = N * kernel_ft_b(2, k, eta_plus) * sigma(k) - drive;
        den = N * kernel_ft_b(1, k, eta_plus);
        break;
      }
      default: {  // af families share one relation, distinct driving terms
        cplx drive(0.0, 0.0);
        if (spec.tag == ThermoCase::af_even)
          drive = std::polar(1.0, -2.0 * k * spec.beta);
        else if (spec.tag == ThermoCase::af_odd_excited)
          drive = std::polar(1.0, -2.0 * k * spec.p) +
                  std::polar(1.0, -2.0 * k * spec.q);
        num = N * kernel_ft_a(2, k, eta_plus) * sigma(k) +
              drive * kernel_ft_c(1, k, eta_plus);
        den = -N * (kernel_ft_c(1, k, eta_plus) + kernel_ft_c(3, k, eta_plus));
        break;
      }
    }
    if (std::abs(den) < 1e-300)
      throw std::runtime_error("solve_density: vanishing kernel coefficient");
    prof.coef[std::size_t(k + K)] = num / den;
  }

  // the zero mode is the root count over N, not a statement of the relation
  double norm = 0.0;
  switch (spec.tag) {
    case ThermoCase::ferro_ground:  norm = (N - 1.0) / N; break;
    case ThermoCase::ferro_excited: norm = (N - 3.0) / N; break;
    case ThermoCase::af_even:       norm = 0.5 - 1.0 / N; break;
    case ThermoCase::af_odd_ground: norm = (N - 1.0) / (2.0 * N); break;
    case ThermoCase::af_odd_excited: norm = (N - 3.0) / (2.0 * N); break;
  }
  prof.coef[std::size_t(K)] = cplx(norm, 0.0);
  return prof;
}

double density_at(const DensityProfile& prof, double x) {
  if (!(std::abs(x) <= kPi / 2 + 1e-9))
    throw std::invalid_argument("density_at: x outside the strip");
  cplx s(0.0, 0.0);
  for (int k = -prof.K; k <= prof.K; ++k)
    s += prof.coef[std::size_t(k + prof.K)] * std::polar(1.0, 2.0 * k * x);
  s /= kPi;
  if (std::abs(s.imag()) > 1e-12)
    throw std::runtime_error("density_at: imaginary part above 1e-12");
  return s.real();
}

double ground_energy(ThermoCase tag, const ModelParams& p) {
  double eta = require_eta_plus(p.eta_plus());
  const double N = p.n_sites;
  double sh = std::sinh(eta), ch = std::cosh(eta);

  if (tag == ThermoCase::ferro_ground) {
    if (p.regime() != Regime::ferro)
      throw std::invalid_argument("ferro ground energy needs real eta");
    return -N * ch + 2.0 * sh;
  }
  if (tag != ThermoCase::af_even && tag != ThermoCase::af_odd_ground)
    throw std::invalid_argument("ground_energy: not a ground-state case");
  if (p.regime() != Regime::af)
    throw std::invalid_argument("af ground energy needs eta = eta+ + i pi");
  if (tag == ThermoCase::af_even && p.n_sites % 2 != 0)
    throw std::invalid_argument("af_even needs an even chain");
  if (tag == ThermoCase::af_odd_ground && p.n_sites % 2 == 0)
    throw std::invalid_argument("af_odd needs an odd chain");

  // bulk series, same for both parities
  double bulk = 0.0;
  for (int k = 1; k <= kSeriesCap; ++k) {
    double term = std::exp(-2.0 * eta * k) * std::tanh(eta * k);
    bulk += term;
    if (term < kSeriesFloor) break;
  }
  double e = -4.0 * N * sh * bulk - N * ch;
  if (tag == ThermoCase::af_even) {
    // lone-root pieces at beta = 0
    double alt = 0.0;
    for (int k = 1; k <= kSeriesCap; ++k) {
      double term = std::exp(-eta * k) * std::tanh(eta * k);
      alt += (k % 2 ? term : -term);
      if (term < kSeriesFloor) break;
    }
    e += -4.0 * sh * alt + 2.0 * sh * std::tanh(eta / 2);
  }
  return e;
}

double ferro_gap(int n, double alpha, double eta, GapForm form) {
  require_eta_plus(eta);
  if (n < 2) throw std::invalid_argument("string length n must be >= 2");
  double coeff = form == GapForm::printed ? 2.0 : 1.0;
  double den = std::cosh((n - 1) * eta) - coeff * std::cos(2.0 * alpha);
  return 4.0 * std::sinh(eta) * std::sinh((n - 1) * eta) / den;
}

double af_epsilon(double t, double eta_plus) {
  double eta = require_eta_plus(eta_plus);
  double sh = std::sinh(eta);
  double series = 0.0;
  for (int k = 1; k <= kSeriesCap; ++k) {
    double env = std::exp(-eta * k) * std::tanh(eta * k);
    double term = env * std::cos(2.0 * k * t);
    series += (k % 2 ? term : -term);
    if (env < kSeriesFloor) break;
  }
  return -4.0 * sh * series +
         2.0 * sh * sh / (std::cosh(eta) + std::cos(2.0 * t));
}

double excitation_energy(const ExcitationSpec& spec, cplx eta, GapForm form) {
  spec.validate();
  switch (spec.tag) {
    case ThermoCase::ferro_ground:
    case ThermoCase::af_odd_ground:
      return 0.0;
    case ThermoCase::ferro_excited: {
      if (std::abs(eta.imag()) > 1e-9)
        throw std::invalid_argument("ferro string gap needs real eta");
      return ferro_gap(spec.n, spec.alpha, eta.real(), form);
    }
    case ThermoCase::af_even: {
      if (std::abs(eta.imag() - kPi) > 1e-9)
        throw std::invalid_argument("af gap needs eta = eta+ + i pi");
      double ep = require_eta_plus(eta.real());
      double sh = std::sinh(ep);
      double series = 0.0;
      for (int k = 1; k <= kSeriesCap; ++k) {
        double env = std::exp(-ep * k) * std::tanh(ep * k);
        double term = env * (std::cos(2.0 * k * spec.beta) - 1.0);
        series += (k % 2 ? term : -term);
        if (env < kSeriesFloor) break;
      }
      return -4.0 * sh * series -
             2.0 * sh * (std::tanh(ep / 2) -
                         sh / (std::cosh(ep) + std::cos(2.0 * spec.beta)));
    }
    case ThermoCase::af_odd_excited: {
      if (std::abs(eta.imag() - kPi) > 1e-9)
        throw std::invalid_argument("af gap needs eta = eta+ + i pi");
      double ep = require_eta_plus(eta.real());
      return af_epsilon(spec.p, ep) + af_epsilon(spec.q, ep);
    }
  }
  throw std::logic_error("unreachable");
}

double excitation_momentum(double t, double eta_plus) {
  double eta = require_eta_plus(eta_plus);
  check_position(t, "t");
  double series = 0.0;
  for (int k = 1; k <= kSeriesCap; ++k) {
    double env = std::exp(-eta * k) * std::tanh(eta * k);
    double term = env * std::sin(2.0 * k * t) / k;
    series += (k % 2 ? -term : term);
    if (env < kSeriesFloor) break;
  }
  // boundary log reduced to a phase: the ratio -cosh(it + eta/2)/cosh(it -
  // eta/2) has unit modulus, and the branch that is continuous in t with
  // value pi/2 at t = 0 is pi/2 + arg cosh(eta/2 + it)
  return series + kPi / 2 + cosh_phase(eta / 2, t);
}

double finite_momentum_limit(const ExcitationSpec& spec,
                             const DensityProfile& prof, double eta_plus,
                             int n_sites) {
  spec.validate();
  double eta = require_eta_plus(eta_plus);
  if (spec.tag != ThermoCase::af_odd_ground &&
      spec.tag != ThermoCase::af_odd_excited)
    throw std::invalid_argument("finite_momentum_limit: af-odd cases only");
  if (prof.tag != spec.tag)
    throw std::invalid_argument("finite_momentum_limit: profile/spec mismatch");

  // bulk log-ratio: the pair-root factors combine into a unit-modulus ratio
  // of cosh's, so ln reduces to 2i (phase difference) and the integrand is
  // real throughout.  The hole terms keep the profile's coefficients from
  // decaying, so the synthesized density carries modes up to 2K; a periodic
  // trapezoid rule dense enough to hit their Nyquist rate integrates the
  // truncated series exactly, where a fixed Gauss rule would alias.
  int m = std::max(2048, 4 * prof.K);
  double bulk = 0.0;
  for (int j = 0; j < m; ++j) {
    double x = -kPi / 2 + (j + 0.5) * kPi / m;
    double phase = cosh_phase(3.0 * eta / 2, x) - cosh_phase(eta / 2, x);
    bulk += phase * density_at(prof, x);
  }
  bulk *= n_sites * kPi / m;

  double boundary = 0.0;
  if (spec.tag == ThermoCase::af_odd_excited)
    boundary = (kPi / 2 + cosh_phase(eta / 2, spec.p)) +
               (kPi / 2 + cosh_phase(eta / 2, spec.q));
  return bulk + boundary;
}

}  // namespace axxz
