#include "branchlab/fragmentation.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace branchlab {

namespace {

// Below this complement the binary integrands are dropped; their total
// contribution is O(u^{1/2}) for integrands bounded by c(1 - s₁).
// Below this complement the density overflows; the dropped mass is negligible
// for every integrand that vanishes like u at 0.
constexpr double kTinyComplement = 1e-150;
constexpr std::size_t kTableCells = std::size_t{1} << 14;

void check_atom(const MassPartition& s, double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight)) throw std::invalid_argument("dislocation measure: atom weight must be positive");
  if (!s.conservative()) throw std::invalid_argument("dislocation measure: atoms must be conservative");
  if (s.size() < 2 || s[1] <= 0.0) throw std::invalid_argument("dislocation measure: atom at the trivial partition (1,0,...)");
}

double gauss_cell(const DislocationMeasure& nu, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss<double, 15>::integrate(
      [&](double u) { return nu.density(1.0 - u, u); }, a, b);
}

}  // namespace

DislocationMeasure DislocationMeasure::binary(std::string name, BinaryDensityFn density, double default_gamma) {
  if (!density) throw std::invalid_argument("binary dislocation measure: missing density");
  DislocationMeasure m;
  m.kind_ = Kind::kBinaryDensity;
  m.name_ = std::move(name);
  m.density_ = std::move(density);
  m.gamma_ = default_gamma;
  return m;
}

DislocationMeasure DislocationMeasure::point_mass(MassPartition s, double weight) {
  check_atom(s, weight);
  DislocationMeasure m;
  m.kind_ = Kind::kPointMass;
  m.name_ = "point";
  m.atoms_.emplace_back(std::move(s), weight);
  return m;
}

DislocationMeasure DislocationMeasure::mixture(std::vector<std::pair<MassPartition, double>> atoms) {
  if (atoms.empty()) throw std::invalid_argument("mixture dislocation measure: no atoms");
  for (const auto& [s, w] : atoms) check_atom(s, w);
  DislocationMeasure m;
  m.kind_ = atoms.size() == 1 ? Kind::kPointMass : Kind::kMixture;
  m.name_ = atoms.size() == 1 ? "point" : "mixture";
  m.atoms_ = std::move(atoms);
  return m;
}

DislocationMeasure DislocationMeasure::stable(double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("stable dislocation measure: alpha must lie in (1, 2)");
  DislocationMeasure m;
  m.kind_ = Kind::kStable;
  m.name_ = "stable";
  m.alpha_ = alpha;
  m.gamma_ = 1.0 - 1.0 / alpha;
  return m;
}

double DislocationMeasure::density(double x, double xc) const {
  if (kind_ != Kind::kBinaryDensity) throw std::logic_error("density: measure is not a binary density");
  if (xc < min_complement_ || xc > 0.5 || xc <= 0.0) return 0.0;
  return density_(x, xc);
}

DislocationMeasure DislocationMeasure::cut_off(double c) const {
  if (kind_ != Kind::kBinaryDensity) throw std::invalid_argument("cut_off: measure is not a binary density");
  if (!(c > 0.0 && c < 0.5)) throw std::invalid_argument("cut_off: cutoff must lie in (0, 1/2)");
  DislocationMeasure m = *this;
  m.min_complement_ = std::max(min_complement_, c);
  return m;
}

DislocationMeasure nu2() {
  return DislocationMeasure::binary(
      "nu2",
      [](double x, double xc) { return std::sqrt(2.0 / std::numbers::pi) * std::pow(x, -1.5) * std::pow(xc, -1.5); }, 0.5);
}

double alpha_theta_density(double alpha, double theta, double x, double xc) {
  double a = (alpha * xc + theta * x) * std::pow(x, -alpha - 1.0) * std::pow(xc, theta - 1.0);
  double b = (alpha * x + theta * xc) * std::pow(xc, -alpha - 1.0) * std::pow(x, theta - 1.0);
  return (a + b) / std::tgamma(1.0 - alpha);
}

DislocationMeasure nu_alpha_theta(double alpha, double theta) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("nu_alpha_theta: alpha must lie in (0, 1)");
  if (!(theta >= 0.0)) throw std::invalid_argument("nu_alpha_theta: theta must be nonnegative");
  return DislocationMeasure::binary(
      "alpha_theta", [alpha, theta](double x, double xc) { return alpha_theta_density(alpha, theta, x, xc); }, alpha);
}

DislocationMeasure nu_alpha(double alpha) { return DislocationMeasure::stable(alpha); }

IntegralResult integrate(const DislocationMeasure& nu, const MassFunction& f, double tol) {
  switch (nu.kind()) {
    case DislocationMeasure::Kind::kBinaryDensity: {
      // u = t² tames the u^{-3/2} endpoint behaviour of the densities.
      boost::math::quadrature::tanh_sinh<double> ts;
      auto g = [&](double t) {
        double u = t * t;
        if (u < kTinyComplement) return 0.0;
        return 2.0 * t * f(MassPartition::binary(1.0 - u, u)) * nu.density(1.0 - u, u);
      };
      IntegralResult r;
      double lo = nu.min_complement();
      r.value = ts.integrate(g, std::sqrt(lo), std::sqrt(0.5), tol, &r.error);
      if (!std::isfinite(r.value)) throw std::runtime_error("integrate: quadrature did not converge");
      return r;
    }
    case DislocationMeasure::Kind::kPointMass:
    case DislocationMeasure::Kind::kMixture: {
      IntegralResult r;
      for (const auto& [s, w] : nu.atoms()) r.value += w * f(s);
      return r;
    }
    case DislocationMeasure::Kind::kStable:
      break;
  }
  throw std::invalid_argument("integrate: the stable measure is integrated by Monte Carlo (nu_alpha_integral)");
}

IntegralResult kappa(const DislocationMeasure& nu, int k, double tol) {
  if (k < 1) throw std::invalid_argument("kappa: k must be positive");
  return integrate(
      nu,
      [k](const MassPartition& s) {
        // 1 - s₁^k in complement form, then the other parts.
        double v = -std::expm1(k * std::log1p(-s.one_minus_largest()));
        for (std::size_t i = 1; i < s.size(); ++i) v -= std::pow(s[i], k);
        return v;
      },
      tol);
}

IntegralResult integral_one_minus_s1(const DislocationMeasure& nu, double tol) {
  return integrate(nu, [](const MassPartition& s) { return s.one_minus_largest(); }, tol);
}

double restricted_mass(const DislocationMeasure& nu, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("restricted_mass: delta must be positive");
  switch (nu.kind()) {
    case DislocationMeasure::Kind::kBinaryDensity: {
      double lo = std::max(delta, nu.min_complement());
      if (lo >= 0.5) return 0.0;
      boost::math::quadrature::tanh_sinh<double> ts;
      return ts.integrate(
          [&](double t) {
            double u = t * t;
            return u < kTinyComplement ? 0.0 : 2.0 * t * nu.density(1.0 - u, u);
          },
          std::sqrt(lo), std::sqrt(0.5), 1e-12);
    }
    case DislocationMeasure::Kind::kPointMass:
    case DislocationMeasure::Kind::kMixture: {
      double m = 0.0;
      for (const auto& [s, w] : nu.atoms())
        if (s.one_minus_largest() >= delta) m += w;
      return m;
    }
    case DislocationMeasure::Kind::kStable:
      break;
  }
  throw std::invalid_argument("restricted_mass: not available for the stable measure");
}

RestrictedSampler::RestrictedSampler(const DislocationMeasure& nu, double delta) : nu_(nu), delta_(delta) {
  if (!(delta > 0.0 && delta <= 0.5)) throw std::invalid_argument("sample_restricted: delta must lie in (0, 1/2]");
  switch (nu.kind()) {
    case DislocationMeasure::Kind::kBinaryDensity: {
      double lo = std::max(delta, nu.min_complement());
      if (lo >= 0.5) throw std::invalid_argument("sample_restricted: zero restricted mass");
      grid_.resize(kTableCells + 1);
      cum_.assign(kTableCells + 1, 0.0);
      const double ratio = 0.5 / lo;
      for (std::size_t i = 0; i <= kTableCells; ++i)
        grid_[i] = lo * std::pow(ratio, static_cast<double>(i) / static_cast<double>(kTableCells));
      grid_.front() = lo;
      grid_.back() = 0.5;
      for (std::size_t i = 0; i < kTableCells; ++i) cum_[i + 1] = cum_[i] + gauss_cell(nu_, grid_[i], grid_[i + 1]);
      mass_ = cum_.back();
      break;
    }
    case DislocationMeasure::Kind::kPointMass:
    case DislocationMeasure::Kind::kMixture: {
      for (const auto& [s, w] : nu.atoms()) {
        if (s.one_minus_largest() >= delta) {
          mass_ += w;
          atoms_.emplace_back(s, mass_);
        }
      }
      if (atoms_.empty()) throw std::invalid_argument("sample_restricted: zero restricted mass");
      break;
    }
    case DislocationMeasure::Kind::kStable:
      throw std::invalid_argument("sample_restricted: no conditioned sampler for the stable measure");
  }
}

double RestrictedSampler::cumulative(double u) const {
  if (u <= grid_.front()) return 0.0;
  if (u >= grid_.back()) return mass_;
  auto it = std::upper_bound(grid_.begin(), grid_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - grid_.begin() - 1);
  return cum_[i] + gauss_cell(nu_, grid_[i], u);
}

double RestrictedSampler::mass_from(double d) const {
  if (d < delta_) throw std::invalid_argument("RestrictedSampler: threshold below the table threshold");
  if (!atoms_.empty()) {
    double m = 0.0, prev = 0.0;
    for (const auto& [s, c] : atoms_) {
      if (s.one_minus_largest() >= d) m += c - prev;
      prev = c;
    }
    return m;
  }
  return mass_ - cumulative(d);
}

MassPartition RestrictedSampler::sample_from(double d, Rng& rng) const {
  if (d < delta_) throw std::invalid_argument("RestrictedSampler: threshold below the table threshold");
  if (!atoms_.empty()) {
    double total = mass_from(d);
    if (!(total > 0.0)) throw std::invalid_argument("sample_restricted: zero restricted mass");
    double t = rng.uniform() * total, prev = 0.0, acc = 0.0;
    const MassPartition* last = nullptr;
    for (const auto& [s, c] : atoms_) {
      double w = c - prev;
      prev = c;
      if (s.one_minus_largest() < d) continue;
      last = &s;
      acc += w;
      if (t < acc) return s;
    }
    return *last;
  }
  // cum_ runs over u = 1 - x from the table's lower bound; draw a mass level
  // above the level of d, locate its cell, then solve inside the cell.
  const double base = cumulative(d);
  if (!(mass_ - base > 0.0)) throw std::invalid_argument("sample_restricted: zero restricted mass");
  const double target = base + rng.uniform() * (mass_ - base);
  auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cum_.begin() - 1, 0));
  i = std::min(i, kTableCells - 1);
  double a = std::max(grid_[i], d), b = grid_[i + 1];
  double need = target - (a > grid_[i] ? base : cum_[i]);
  double cell = cum_[i + 1] - (a > grid_[i] ? base : cum_[i]);
  double u = cell > 0.0 ? a + (b - a) * std::clamp(need / cell, 0.0, 1.0) : a;
  double lo = a, hi = b;
  for (int iter = 0; iter < 60; ++iter) {
    double g = gauss_cell(nu_, a, u) - need;
    if (g > 0.0) hi = u; else lo = u;
    double dens = nu_.density(1.0 - u, u);
    double next = dens > 0.0 ? u - g / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) < 1e-13 || hi - lo < 1e-13) {
      u = next;
      break;
    }
    u = next;
  }
  return MassPartition::binary(1.0 - u, u);
}

double RestrictedSampler::cdf_s1(double x) const {
  if (!atoms_.empty()) {
    double below = 0.0, prev = 0.0;
    for (const auto& [s, c] : atoms_) {
      if (s.largest() <= x) below += c - prev;
      prev = c;
    }
    return below / mass_;
  }
  return std::clamp((mass_ - cumulative(1.0 - x)) / mass_, 0.0, 1.0);
}

std::pair<MassPartition, double> sample_restricted(const DislocationMeasure& nu, double delta, Rng& rng) {
  RestrictedSampler s(nu, delta);
  return {s.sample(rng), s.mass()};
}

MassPartition StableJumps::normalized() const {
  std::vector<double> e;
  e.reserve(atoms.size());
  for (double a : atoms) e.push_back(a / total);
  return MassPartition(std::move(e));
}

StableJumps sample_stable_jumps(double alpha, double eps, Rng& rng) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("sample_stable_jumps: alpha must lie in (1, 2)");
  if (!(eps > 0.0)) throw std::invalid_argument("sample_stable_jumps: jump cutoff must be positive");
  const double g = std::tgamma(1.0 - 1.0 / alpha);
  // Tail of the intensity: Λ(x) = x^{-1/α} / Γ(1-1/α); atoms are Λ^{-1} of
  // the arrival times of a unit-rate Poisson process.
  const double gamma_stop = std::pow(eps, -1.0 / alpha) / g;
  const double expected = gamma_stop;
  if (expected > 5e7) throw ResourceError("sample_stable_jumps: jump cutoff requires too many atoms");
  StableJumps out;
  double arrival = 0.0;
  for (;;) {
    arrival += rng.exponential();
    if (arrival > gamma_stop) break;
    out.atoms.push_back(std::pow(arrival * g, -alpha));
  }
  const double c = 1.0 / (alpha * g);
  out.small_jump_mean = c * std::pow(eps, 1.0 - 1.0 / alpha) / (1.0 - 1.0 / alpha);
  out.total = out.small_jump_mean;
  // Smallest first for accuracy.
  for (auto it = out.atoms.rbegin(); it != out.atoms.rend(); ++it) out.total += *it;
  return out;
}

namespace {

MonteCarloResult mc_mean(std::size_t reps, const std::function<double(std::size_t)>& draw) {
  if (reps < 2) throw std::invalid_argument("Monte Carlo: need at least two replicates");
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    double x = draw(i);
    double d = x - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (x - mean);
  }
  MonteCarloResult r;
  r.estimate = mean;
  r.std_error = std::sqrt(m2 / static_cast<double>(reps - 1) / static_cast<double>(reps));
  r.reps = reps;
  return r;
}

}  // namespace

MonteCarloResult nu_alpha_integral(double alpha, const MassFunction& f, double eps, std::size_t reps,
                                   std::uint64_t seed) {
  const double k = alpha * alpha * std::tgamma(2.0 - 1.0 / alpha) / std::tgamma(2.0 - alpha);
  auto r = mc_mean(reps, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    StableJumps j = sample_stable_jumps(alpha, eps, rng);
    return k * j.total * f(j.normalized());
  });
  const double g = std::tgamma(1.0 - 1.0 / alpha);
  r.tail_bound = k * (1.0 / (alpha * g)) * std::pow(eps, 1.0 - 1.0 / alpha) / (1.0 - 1.0 / alpha);
  return r;
}

MonteCarloResult stable_laplace(double alpha, double lambda, double eps, std::size_t reps, std::uint64_t seed) {
  auto r = mc_mean(reps, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    return std::exp(-lambda * sample_stable_jumps(alpha, eps, rng).total);
  });
  const double g = std::tgamma(1.0 - 1.0 / alpha);
  r.tail_bound = lambda * (1.0 / (alpha * g)) * std::pow(eps, 1.0 - 1.0 / alpha) / (1.0 - 1.0 / alpha);
  return r;
}

}  // namespace branchlab
