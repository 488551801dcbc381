// Acceptance run: ten criteria, one PASS/FAIL line each. Every random stage
// uses a fixed seed, so the run is deterministic. Exit status is the number
// of failed criteria.

#include "branchlab/fragmentation.hpp"
#include "branchlab/partitions.hpp"
#include "branchlab/polya.hpp"
#include "branchlab/samplers.hpp"
#include "branchlab/splitlaws.hpp"
#include "branchlab/stats.hpp"
#include "branchlab/trees.hpp"
#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace branchlab;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

/// f(i, rng_i) for i < reps across hardware threads; rng_i is stream i of
/// the seed, so results do not depend on the thread count.
template <class R>
std::vector<R> parallel_draws(std::size_t reps, std::uint64_t seed, const std::function<R(std::size_t, Rng&)>& f) {
  std::vector<R> out(reps);
  std::atomic<std::size_t> next{0};
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < reps;) {
        Rng rng = Rng::stream(seed, i);
        out[i] = f(i, rng);
      }
    });
  for (auto& t : pool) t.join();
  return out;
}

double rel_err(double x, double target) { return std::abs(x - target) / std::abs(target); }

std::string num(double x, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, x);
  return buf;
}

// ---- 1 -------------------------------------------------------------------

Verdict counting_exactness() {
  Verdict v;
  auto t0 = std::chrono::steady_clock::now();
  auto bell = oracle::bell_numbers(8);
  std::size_t shapes = 0;
  for (int n = 1; n <= 8; ++n) {
    std::map<std::vector<int>, BigCount> brute;
    oracle::for_each_rgs(n, [&](const std::vector<int>& a) { brute[oracle::rgs_shape(a)] += 1; });
    BigCount total = 0;
    for (const auto& l : enumerate_partitions(n)) {
      BigCount c = shape_count(l);
      v.require(c == brute[l.parts()], "C_λ at " + l.str());
      total += c;
      ++shapes;
    }
    v.require(total == bell[static_cast<std::size_t>(n)], "Bell(" + std::to_string(n) + ")");
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.require(secs < 60.0, "runtime");
  v.detail << shapes << " shapes for n <= 8 exact, Bell sums exact, " << num(secs, 3) << " s";
  return v;
}

// ---- 2 -------------------------------------------------------------------

std::vector<long double> size_law_by_recursion(const std::vector<double>& xi, int nmax) {
  std::vector<long double> size(static_cast<std::size_t>(nmax) + 1, 0.0L);
  std::vector<std::vector<long double>> forest(xi.size(), std::vector<long double>(static_cast<std::size_t>(nmax) + 1, 0.0L));
  forest[0][0] = 1.0L;
  for (int n = 1; n <= nmax; ++n) {
    for (std::size_t k = 1; k < xi.size(); ++k) {
      long double s = 0.0L;
      for (int a = 1; a <= n - 1; ++a) s += size[static_cast<std::size_t>(a)] * forest[k - 1][static_cast<std::size_t>(n - 1 - a)];
      forest[k][static_cast<std::size_t>(n - 1)] = s;
    }
    long double p = 0.0L;
    for (std::size_t k = 0; k < xi.size(); ++k) p += static_cast<long double>(xi[k]) * forest[k][static_cast<std::size_t>(n - 1)];
    size[static_cast<std::size_t>(n)] = p;
  }
  return size;
}

Verdict galton_watson_identity() {
  Verdict v;
  double worst_tv = 0.0;
  long double worst_cyclic = 0.0L;
  for (const auto& xi : {OffspringLaw::binary(), OffspringLaw::poisson()}) {
    GwLaw q(xi, 64);
    for (int n = 1; n <= 7; ++n) {
      TreeLaw brute;
      double total = 0.0;
      for (const auto& p : oracle::plane_trees(n)) {
        double w = oracle::plane_gw_weight(p, xi.pmf);
        if (w == 0.0) continue;
        brute[canonicalize(p)] += w;
        total += w;
      }
      for (auto& [t, w] : brute) w /= total;
      worst_tv = std::max(worst_tv, tv_distance(exact_Q_law(q, n), brute));
    }
    // n GW(#t = n) from the tree recursion against P(S_n = -1) from the walk.
    auto by_tree = size_law_by_recursion(xi.pmf, 12);
    for (int n = 1; n <= 12; ++n) {
      long double lhs = n * by_tree[static_cast<std::size_t>(n)];
      long double rhs = q.walk_probability(n, 1);
      worst_cyclic = std::max(worst_cyclic, std::abs(lhs - rhs));
      worst_cyclic = std::max(worst_cyclic, std::abs(n * static_cast<long double>(q.tree_size_probability(n)) - rhs));
    }
  }
  v.require(worst_tv <= 1e-12, "TV <= 1e-12");
  v.require(worst_cyclic <= 1e-14L, "cyclic identity to 1e-14");
  v.detail << "max TV " << num(worst_tv, 3) << " (binary, Poisson; n <= 7), max cyclic gap "
           << num(static_cast<double>(worst_cyclic), 3) << " (n <= 12)";
  return v;
}

// ---- 3 -------------------------------------------------------------------

std::string four_digits(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

Verdict otter_tables() {
  Verdict v;
  for (int m : {kUnboundedDegree, 2}) {
    auto tab = otter_counts(m, 10);
    for (int n = 1; n <= 10; ++n)
      v.require(tab.T(n) == BigCount(enumerate_trees(n, m).size()), "T^(" + std::to_string(m) + ")_" + std::to_string(n));
  }
  for (int m : {kUnboundedDegree, 2, 3}) {
    CountTables tab(m, 41);
    for (int n = 1; n <= 40; ++n) {
      BigCount sum = 0;
      for_each_partition(n, [&](const IntPartition& l) { sum += shape_count_poly(tab, n + 1, l); });
      v.require(sum == tab.T(n + 1), "Σ S = T at n + 1 = " + std::to_string(n + 1));
    }
  }
  auto c300 = constants(CountTables(kUnboundedDegree, 300, CountTables::Forest::kNone));
  auto c400 = constants(CountTables(kUnboundedDegree, 400, CountTables::Forest::kNone));
  v.require(four_digits(c300.rho) == four_digits(c400.rho), "ρ̂ to 4 significant digits");
  double gap = std::abs(c400.psi_partial - 1.0);
  v.require(gap < c400.psi_tail_bound + 1e-3, "|ψ̃ - 1| < tail + 1e-3");
  v.detail << "counts exact (n <= 10), Σ identity exact (n <= 40, m = inf, 2, 3); ρ̂(300) = " << num(c300.rho, 10)
           << ", ρ̂(400) = " << num(c400.rho, 10) << "; |ψ̃ - 1| = " << num(gap, 4) << " < " << num(c400.psi_tail_bound, 4)
           << " + 1e-3";
  return v;
}

// ---- 4 -------------------------------------------------------------------

Verdict uniform_generation() {
  Verdict v;
  CountTables tab(kUnboundedDegree, 10);
  auto all = enumerate_trees(7);
  const std::size_t draws = 100000;
  auto ranks = parallel_draws<std::size_t>(draws, 4004, [&](std::size_t, Rng& rng) {
    Tree t = uniform_tree(tab, 7, rng);
    return static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), t) - all.begin());
  });
  std::vector<std::uint64_t> obs(all.size(), 0);
  for (auto r : ranks) ++obs[r];
  auto chi = chi_square_gof(obs, std::vector<double>(all.size(), 1.0 / static_cast<double>(all.size())));
  v.require(all.size() == 48, "48 trees");
  v.require(chi.p_value > 0.001, "χ² p > 0.001");
  std::size_t checked = 0;
  for (int m : {kUnboundedDegree, 2}) {
    CountTables t2(m, 9);
    for (int n = 1; n <= 8; ++n) {
      auto listed = enumerate_trees(n, m);
      for (std::size_t r = 0; r < listed.size(); ++r) {
        Tree t = unrank_tree(t2, n, BigCount(r));
        v.require(t == listed[r] && rank_tree(t2, t) == BigCount(r), "rank round trip");
        ++checked;
      }
    }
  }
  v.detail << "χ² = " << num(chi.statistic, 5) << ", p = " << num(chi.p_value, 4) << " over 48 trees, 1e5 draws; "
           << checked << " rank/unrank round trips exact (n <= 8)";
  return v;
}

// ---- 5 -------------------------------------------------------------------

Verdict coupling() {
  Verdict v;
  // (i) marginal of the coupled tree.
  CountTables small(kUnboundedDegree, 20);
  UniformLaw q(std::make_shared<const CountTables>(kUnboundedDegree, 20));
  double tv6 = 0.0, p7 = 0.0;
  for (int n : {6, 7}) {
    auto law = exact_Q_law(q, n);
    std::vector<Tree> support;
    for (const auto& [t, p] : law) support.push_back(t);
    auto idx = parallel_draws<std::size_t>(100000, 5000 + static_cast<std::uint64_t>(n), [&](std::size_t, Rng& rng) {
      Tree t = natural_coupling(small, uniform_tree(small, n, rng), rng).coupled;
      auto it = std::lower_bound(support.begin(), support.end(), t);
      return it != support.end() && *it == t ? static_cast<std::size_t>(it - support.begin()) : support.size();
    });
    std::vector<std::uint64_t> obs(support.size() + 1, 0);
    for (auto i : idx) ++obs[i];
    v.require(obs.back() == 0, "coupled tree outside the support");
    obs.pop_back();
    std::map<Tree, double, TreeLess> emp;
    std::vector<double> expected;
    for (std::size_t i = 0; i < support.size(); ++i) {
      emp[support[i]] = static_cast<double>(obs[i]) / 1e5;
      expected.push_back(law[support[i]]);
    }
    if (n == 6) {
      tv6 = tv_distance(emp, law);
      v.require(tv6 <= 0.01, "TV <= 0.01 at n = 6");
    } else {
      // n = 7 is the first size where the laws differ; χ² checks it too.
      p7 = chi_square_gof(obs, expected).p_value;
      v.require(p7 > 0.001, "χ² at n = 7");
    }
  }
  // (ii) height audit and (iii) large duplicates.
  CountTables tab(kUnboundedDegree, 200);
  struct Audit {
    bool ok = true;
    int j_star = 0;
  };
  auto audits = parallel_draws<Audit>(100000, 5050, [&](std::size_t, Rng& rng) {
    Tree t = uniform_tree(tab, 50, rng);
    auto out = natural_coupling(tab, t, rng);
    long dh = std::abs(static_cast<long>(t.height()) - static_cast<long>(out.coupled.height()));
    bool ok = dh <= 2L * out.j_star && out.coupled.size() == t.size() && (out.j_star > 0 || out.coupled == t);
    return Audit{ok, out.j_star};
  });
  std::size_t good = 0;
  for (const auto& a : audits) good += a.ok;
  v.require(good == audits.size(), "height bound on every coupling");
  const double cut = std::pow(200.0, 0.6);
  auto big = parallel_draws<int>(10000, 5200, [&](std::size_t, Rng& rng) {
    return natural_coupling(tab, uniform_tree(tab, 200, rng), rng).j_star;
  });
  std::size_t large = 0;
  int max_j = 0;
  for (int j : big) {
    if (j >= cut) ++large;
    max_j = std::max(max_j, j);
  }
  double freq = static_cast<double>(large) / static_cast<double>(big.size());
  v.require(freq < 1e-3, "freq(j* >= n^0.6) < 1e-3");
  v.detail << "(i) TV = " << num(tv6, 4) << " at n = 6, χ² p = " << num(p7, 4) << " at n = 7; (ii) " << good << "/"
           << audits.size() << " couplings within 2j* at n = 50; (iii) freq(j* >= " << num(cut, 4) << ") = " << freq
           << " at n = 200 (max j* = " << max_j << ")";
  return v;
}

// ---- 6 -------------------------------------------------------------------

Verdict gw_probe() {
  Verdict v;
  // (1/√(2π)) ∫₀¹ min(x, 1-x) x^{-1/2} (1-x)^{-3/2} dx, split at 1/2 and
  // with u = t² at each endpoint singularity.
  auto left = [](double t) {  // x = t², x in (0, 1/2)
    double x = t * t;
    return 2.0 * t * x * std::pow(x, -0.5) * std::pow(1.0 - x, -1.5);
  };
  auto right = [](double t) {  // 1 - x = t², x in (1/2, 1)
    double u = t * t;
    if (u == 0.0) return 2.0;
    return 2.0 * t * u * std::pow(1.0 - u, -0.5) * std::pow(u, -1.5);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double e1 = 0.0, e2 = 0.0;
  double integral = GK::integrate(left, 0.0, std::sqrt(0.5), 15, 1e-14, &e1) +
                    GK::integrate(right, 0.0, std::sqrt(0.5), 15, 1e-14, &e2);
  const double target = integral / std::sqrt(2.0 * std::numbers::pi);
  v.require(e1 + e2 < 1e-8, "quadrature to 1e-8");
  GwLaw q(OffspringLaw::binary(), 3201);
  MassFunction one = [](const MassPartition&) { return 1.0; };
  std::vector<double> errs;
  v.detail << "target " << num(target, 10) << ";";
  for (int n : {200, 800, 3200}) {
    auto r = probe_H(q, one, n, ProbeMode::kExact);
    v.require(r.mode == ProbeResult::Mode::kExact, "exact mode");
    errs.push_back(rel_err(r.estimate, target));
    v.detail << " n = " << n << ": " << num(r.estimate, 8) << " (rel err " << num(errs.back(), 3) << ")";
  }
  v.require(errs[0] > errs[1] && errs[1] > errs[2], "strictly decreasing error");
  v.require(errs[2] < 0.15, "error < 15% at n = 3200");
  return v;
}

// ---- 7 -------------------------------------------------------------------

Verdict polya_probe() {
  Verdict v;
  auto k = constants(CountTables(kUnboundedDegree, 2001, CountTables::Forest::kNone));
  // ∫_{1/2}^1 x^{-3/2} (1-x)^{-1/2} dx with 1 - x = t².
  auto g = [](double t) {
    double u = t * t;
    return 2.0 * std::pow(1.0 - u, -1.5);
  };
  double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, std::sqrt(0.5), 15, 1e-14);
  const double target = k.kappa * k.psi_partial * integral;
  v.detail << "κ̂ = " << num(k.kappa, 8) << ", ψ̃ = " << num(k.psi_partial, 8) << ", integral = " << num(integral, 10)
           << ", target " << num(target, 8) << ";";
  std::vector<double> errs;
  for (int n : {500, 2000}) {
    UniformLaw law(kUnboundedDegree, n + 1);
    const double rn = std::sqrt(static_cast<double>(n));
    auto xs = parallel_draws<double>(100000, 7000 + static_cast<std::uint64_t>(n), [&](std::size_t, Rng& rng) {
      return rn * (1.0 - static_cast<double>(law.sample(n, rng).largest()) / n);
    });
    double mean = 0.0, m2 = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    for (double x : xs) m2 += (x - mean) * (x - mean);
    double se = std::sqrt(m2 / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    errs.push_back(rel_err(mean, target));
    v.detail << " n = " << n << ": " << num(mean, 6) << " ± " << num(se, 2) << " (rel err " << num(errs.back(), 3) << ")";
    v.require(errs.back() < 0.20, "within 20% at n = " + std::to_string(n));
  }
  v.require(errs[1] <= errs[0], "error at 2000 <= error at 500");
  return v;
}

// ---- 8 -------------------------------------------------------------------

Verdict cross_model_scaling() {
  Verdict v;
  const std::size_t reps = 10000;
  auto c2 = constants(CountTables(2, 2001, CountTables::Forest::kNone)).c_m;
  // Binary GW trees have odd vertex counts.
  GwLaw gw(OffspringLaw::binary(), 8002);
  UniformLaw u_small(2, 2001), u_big(2, 8001);
  auto gw_depths = [&](int n, std::uint64_t seed) {
    const double scale = 2.0 * std::sqrt(static_cast<double>(n));
    return parallel_draws<double>(reps, seed, [&](std::size_t, Rng& rng) {
      return static_cast<double>(vertex_depth_Q(gw, n, rng)) / scale;
    });
  };
  auto uniform_depths = [&](const UniformLaw& law, int n, std::uint64_t seed) {
    const double scale = c2 * std::sqrt(static_cast<double>(n));
    return parallel_draws<double>(reps, seed, [&](std::size_t, Rng& rng) {
      return static_cast<double>(uniform_vertex_depth(law, n, rng)) / scale;
    });
  };
  auto g1 = gw_depths(2001, 8001), g4 = gw_depths(8001, 8004);
  auto u1 = uniform_depths(u_small, 2000, 8101), u4 = uniform_depths(u_big, 8000, 8104);
  double cross = ks_two_sample(g1, u1).statistic;
  double gw_stab = ks_two_sample(g1, g4).statistic;
  double u_stab = ks_two_sample(u1, u4).statistic;
  v.require(cross < 0.1, "cross-model KS < 0.1");
  v.require(gw_stab < 0.05, "GW n vs 4n KS < 0.05");
  v.require(u_stab < 0.05, "uniform n vs 4n KS < 0.05");
  v.detail << "ĉ₂ = " << num(c2, 8) << "; KS(GW, uniform) = " << num(cross, 4) << ", KS(GW 2001, 8001) = " << num(gw_stab, 4)
           << ", KS(uniform 2000, 8000) = " << num(u_stab, 4) << "; 1e4 depths each";
  return v;
}

// ---- 9 -------------------------------------------------------------------

Verdict alpha_theta_consistency() {
  Verdict v;
  const double a = 0.5, th = 0.5;
  AlphaThetaLaw q(a, th);
  auto d = *q.distribution(8);
  std::vector<IntPartition> shapes;
  for (const auto& [l, p] : d) shapes.push_back(l);
  auto idx = parallel_draws<std::size_t>(100000, 9000, [&](std::size_t, Rng& rng) {
    IntPartition l = *alpha_theta_grow(a, th, 8, rng).root_leaf_split();
    return static_cast<std::size_t>(std::find(shapes.begin(), shapes.end(), l) - shapes.begin());
  });
  std::vector<std::uint64_t> obs(shapes.size() + 1, 0);
  for (auto i : idx) ++obs[i];
  v.require(obs.back() == 0, "non-binary root split");
  obs.pop_back();
  std::vector<double> expected;
  for (const auto& [l, p] : d) expected.push_back(p);
  auto chi = chi_square_gof(obs, expected);
  v.require(chi.p_value > 0.001, "χ² p > 0.001");
  // ∫_{1/2}^1 (1-x) f_{α,θ}(x) dx with 1 - x = t².
  auto g = [&](double t) {
    if (t <= 0.0) return 0.0;
    double u = t * t;
    return 2.0 * t * u * alpha_theta_density(a, th, 1.0 - u, u);
  };
  double target = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, std::sqrt(0.5), 15, 1e-13);
  const double library = integral_one_minus_s1(nu_alpha_theta(a, th)).value;
  v.require(std::abs(library - target) < 1e-8, "library quadrature agrees with the oracle");
  MassFunction one = [](const MassPartition&) { return 1.0; };
  std::vector<double> errs;
  v.detail << "growth χ² = " << num(chi.statistic, 4) << ", p = " << num(chi.p_value, 4) << "; target " << num(target, 8) << " (library " << num(library, 10) << ");";
  for (int n : {50, 200, 800}) {
    auto r = probe_H(q, one, n);
    errs.push_back(rel_err(r.estimate, target));
    v.detail << " n = " << n << ": " << num(r.estimate, 6) << " (rel err " << num(errs.back(), 3) << ")";
  }
  v.require(errs[0] > errs[1] && errs[1] > errs[2], "decreasing relative error");
  return v;
}

// ---- 10 ------------------------------------------------------------------

Verdict propexemple_consistency() {
  Verdict v;
  auto nu = DislocationMeasure::point_mass(MassPartition({0.5, 0.5}));
  auto q = propexemple_law(nu, 1.0, 1 << 13);
  MassFunction one = [](const MassPartition&) { return 1.0; };
  const double target = (1.0 - 0.5) * 1.0;
  const int n = 1024;
  auto r = probe_H(*q, one, n, ProbeMode::kMonteCarlo, 1000000, 10001);
  double z = std::abs(r.estimate - target) / r.std_error;
  v.require(z <= 3.0, "probe within 3σ");
  auto heights = [&](int leaves, std::uint64_t seed) {
    return parallel_draws<double>(10000, seed, [&](std::size_t, Rng& rng) { return approx_continuum_tree(*q, leaves, rng).height(); });
  };
  auto h10 = heights(1 << 10, 10010), h12 = heights(1 << 12, 10012);
  double ks = ks_two_sample(h10, h12).statistic;
  v.require(ks < 0.05, "height KS < 0.05");
  v.detail << "probe at n = " << n << ": " << num(r.estimate, 6) << " ± " << num(r.std_error, 3) << " vs " << target << " ("
           << num(z, 3) << "σ); KS(height 2^10, 2^12) = " << num(ks, 4) << " over 1e4 trees each";
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {"counting exactness", counting_exactness},
      {"Galton-Watson identity", galton_watson_identity},
      {"Otter tables", otter_tables},
      {"uniform generation", uniform_generation},
      {"natural coupling", coupling},
      {"(H) probe, binary GW", gw_probe},
      {"(H) probe, Polya trees", polya_probe},
      {"cross-model scaling", cross_model_scaling},
      {"(alpha, theta) consistency", alpha_theta_consistency},
      {"Propexemple self-consistency", propexemple_consistency},
  };
  int failed = 0;
  int index = 1;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& ex) {
      v.pass = false;
      v.detail << "exception: " << ex.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", index, c.name, v.detail.str().c_str(), secs);
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
    ++index;
  }
  return failed;
}
