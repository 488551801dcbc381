#include "cli.hpp"

#include "branchlab/fragmentation.hpp"
#include "branchlab/io.hpp"
#include "branchlab/numeric.hpp"
#include "branchlab/polya.hpp"
#include "branchlab/samplers.hpp"
#include "branchlab/splitlaws.hpp"
#include "branchlab/stats.hpp"
#include "branchlab/trees.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace branchlab::cli {

namespace {

using io::ConfigError;
using io::fmt;
using io::Json;

struct Common {
  std::string format = "csv";
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::size_t reps = 0;
};

unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

std::uint64_t require_seed(const Common& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("BRANCHLAB_SEED")) {
    const std::string text(env);
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(text, &used);
      if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("BRANCHLAB_SEED", "expected a nonnegative integer, got '" + text + "'");
  }
  throw ConfigError("seed", "sampling subcommands need --seed or BRANCHLAB_SEED");
}

void check_format(const Common& c, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (c.format == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw ConfigError("format", "'" + c.format + "' is not available here (" + list + ")");
}

/// Result i of f(i, rng_i) for i < reps, rng_i = stream i of the seed. The
/// output does not depend on the worker count.
template <class R>
std::vector<R> replicate(std::size_t reps, std::uint64_t seed, unsigned workers, const std::function<R(std::size_t, Rng&)>& f) {
  std::vector<R> out(reps);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= reps) return;
      try {
        Rng rng = Rng::stream(seed, i);
        out[i] = f(i, rng);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(reps);
        return;
      }
    }
  };
  const unsigned w = static_cast<unsigned>(std::min<std::size_t>(worker_count(workers), std::max<std::size_t>(reps, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < w; ++t) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Writes to <out_dir>/<name>.<format>, or to stdout without --out.
void emit(const Common& c, std::ostream& out, const std::string& name, const std::string& body, std::string ext = "") {
  if (ext.empty()) ext = c.format;
  if (c.out_dir.empty()) {
    out << body;
    return;
  }
  std::filesystem::create_directories(c.out_dir);
  const auto path = std::filesystem::path(c.out_dir) / (name + "." + ext);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("out", "cannot write " + path.string());
  f << body;
}

// Minimal SVG 1.1 renderings; the plotted numbers are repeated in <desc>.
std::string svg_frame(const std::string& title, const std::string& desc, const std::string& body) {
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n"
    << "<title>" << title << "</title>\n<desc>" << desc << "</desc>\n"
    << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"420\" fill=\"white\"/>\n"
    << "<line x1=\"60\" y1=\"370\" x2=\"620\" y2=\"370\" stroke=\"black\"/>\n"
    << "<line x1=\"60\" y1=\"370\" x2=\"60\" y2=\"30\" stroke=\"black\"/>\n"
    << "<text x=\"320\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n"
    << body << "</svg>\n";
  return s.str();
}

std::string svg_trend(const std::string& title, const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& err) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    lo = std::min(lo, y[i] - err[i]);
    hi = std::max(hi, y[i] + err[i]);
  }
  if (hi <= lo) hi = lo + 1.0;
  const double lx = std::log(x.front()), hx = std::log(x.back());
  auto px = [&](double v) { return 60.0 + (hx > lx ? (std::log(v) - lx) / (hx - lx) : 0.5) * 540.0; };
  auto py = [&](double v) { return 370.0 - (v - lo) / (hi - lo) * 330.0; };
  std::ostringstream b, d;
  b << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) b << fmt(px(x[i])) << ',' << fmt(py(y[i])) << ' ';
  b << "\"/>\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    b << "<line x1=\"" << fmt(px(x[i])) << "\" y1=\"" << fmt(py(y[i] - err[i])) << "\" x2=\"" << fmt(px(x[i])) << "\" y2=\""
      << fmt(py(y[i] + err[i])) << "\" stroke=\"gray\"/>\n"
      << "<circle cx=\"" << fmt(px(x[i])) << "\" cy=\"" << fmt(py(y[i])) << "\" r=\"3\" fill=\"steelblue\"/>\n"
      << "<text x=\"" << fmt(px(x[i])) << "\" y=\"388\" text-anchor=\"middle\" font-size=\"10\">" << fmt(x[i]) << "</text>\n";
    d << "n=" << fmt(x[i]) << " value=" << fmt(y[i]) << " stderr=" << fmt(err[i]) << "; ";
  }
  b << "<text x=\"55\" y=\"" << fmt(py(hi)) << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(hi) << "</text>\n"
    << "<text x=\"55\" y=\"" << fmt(py(lo)) << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(lo) << "</text>\n";
  return svg_frame(title, d.str(), b.str());
}

std::string svg_histogram(const std::string& title, const std::vector<std::pair<std::string, std::vector<double>>>& series,
                          int bins) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [name, xs] : series)
    for (double v : xs) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(hi > lo)) hi = lo + 1.0;
  const double width = (hi - lo) / bins;
  std::vector<std::vector<double>> dens;
  double top = 0.0;
  for (const auto& [name, xs] : series) {
    std::vector<double> h(static_cast<std::size_t>(bins), 0.0);
    for (double v : xs) h[static_cast<std::size_t>(std::min(bins - 1, static_cast<int>((v - lo) / width)))] += 1.0;
    for (double& v : h) {
      v /= static_cast<double>(xs.size()) * width;
      top = std::max(top, v);
    }
    dens.push_back(std::move(h));
  }
  const char* colors[] = {"steelblue", "darkorange", "seagreen", "firebrick"};
  std::ostringstream b, d;
  d << "bins=" << bins << " from " << fmt(lo) << " to " << fmt(hi) << "; ";
  for (std::size_t s = 0; s < dens.size(); ++s) {
    b << "<polyline fill=\"none\" stroke=\"" << colors[s % 4] << "\" stroke-width=\"2\" points=\"";
    d << series[s].first << ":";
    for (int i = 0; i < bins; ++i) {
      const double x0 = 60.0 + 540.0 * i / bins, x1 = 60.0 + 540.0 * (i + 1) / bins;
      const double y = 370.0 - dens[s][static_cast<std::size_t>(i)] / top * 330.0;
      b << fmt(x0) << ',' << fmt(y) << ' ' << fmt(x1) << ',' << fmt(y) << ' ';
      d << ' ' << fmt(dens[s][static_cast<std::size_t>(i)]);
    }
    b << "\"/>\n<text x=\"600\" y=\"" << 45 + 15 * s << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << colors[s % 4]
      << "\">" << series[s].first << "</text>\n";
    d << "; ";
  }
  return svg_frame(title, d.str(), b.str());
}

MassFunction probe_function(const std::string& name) {
  if (name == "one") return [](const MassPartition&) { return 1.0; };
  if (name == "s1") return [](const MassPartition& s) { return s.largest(); };
  if (name == "one_minus_s1") return [](const MassPartition& s) { return s.one_minus_largest(); };
  throw ConfigError("f", "unknown test function '" + name + "' (one, s1, one_minus_s1)");
}

// ---- subcommands ----------------------------------------------------------

int cmd_enumerate(int n, const std::string& m_text, const Common& c, std::ostream& out) {
  check_format(c, {"csv", "json"});
  const int m = io::parse_degree(m_text, "m");
  if (n < 1) throw ConfigError("n", "must be positive");
  if (n > 16) throw ResourceError("enumerate: n above the enumeration cap of 16");
  const auto trees = enumerate_trees(n, m);
  std::ostringstream s;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    Json j;
    j["rank"] = i;
    j["tree"] = io::tree_json(trees[i]);
    s << j.dump() << '\n';
  }
  emit(c, out, "enumerate", s.str(), "jsonl");
  return kExitOk;
}

int cmd_counts(const std::string& m_text, int N, const Common& c, std::ostream& out) {
  check_format(c, {"csv", "json"});
  const int m = io::parse_degree(m_text, "m");
  if (N < 1) throw ConfigError("N", "must be positive");
  const CountTables tables(m, N);
  std::optional<PolyaConstants> k;
  if (N >= 100) k = constants(tables);
  auto constants_csv = [&] {
    std::ostringstream s;
    s << io::csv_line({"m", "N", "rho_raw", "rho_corrected", "rho", "kappa", "psi_partial", "psi_tail_bound", "c_m",
                       "kappa_psi"})
      << '\n'
      << io::csv_line({m_text, std::to_string(N), fmt(k->rho_raw), fmt(k->rho_corrected), fmt(k->rho), fmt(k->kappa),
                       fmt(k->psi_partial), fmt(k->psi_tail_bound), fmt(k->c_m), fmt(k->kappa * k->psi_partial)})
      << '\n';
    return s.str();
  };
  if (c.format == "json") {
    Json j = io::counts_json(tables);
    if (k) {
      j["constants"] = {{"rho_raw", k->rho_raw}, {"rho_corrected", k->rho_corrected}, {"rho", k->rho},
                        {"kappa", k->kappa},     {"psi_partial", k->psi_partial},     {"psi_tail_bound", k->psi_tail_bound},
                        {"c_m", k->c_m},         {"kappa_psi", k->kappa * k->psi_partial}};
    }
    emit(c, out, "counts", j.dump() + "\n");
    return kExitOk;
  }
  std::ostringstream s;
  s << "n,T,T_tilde\n";
  for (int n = 1; n <= N; ++n) s << n << ',' << to_decimal(tables.T(n)) << ',' << to_decimal(tables.T_tilde(n)) << '\n';
  emit(c, out, "counts", s.str());
  if (k && !c.out_dir.empty()) emit(c, out, "constants", constants_csv());
  return kExitOk;
}

int cmd_sample(const std::string& family, int n, bool markov, bool with_trees, const Common& c, std::ostream& out) {
  check_format(c, {"csv", "json"});
  const std::uint64_t seed = require_seed(c);
  if (n < 1) throw ConfigError("n", "must be positive");
  const Json spec = io::load_json_arg(family, "family");
  const SplitLawPtr law = io::parse_family(spec, n);
  std::shared_ptr<const CountTables> tables;
  if (!markov && law->family() == "uniform") {
    tables = static_cast<const UniformLaw&>(*law).tables();
    if (!tables || !tables->has_forest())
      throw ResourceError("sample: exact uniform trees need n <= " + std::to_string(CountTables::forest_cap(static_cast<const UniformLaw&>(*law).m())) +
                          "; pass --markov for the Markov branching law");
  }
  const std::size_t reps = c.reps ? c.reps : 1;
  const auto trees = replicate<Tree>(reps, seed, c.workers, [&](std::size_t, Rng& rng) {
    if (tables) return uniform_tree(*tables, n, rng);
    return law->model() == ModelKind::kLeaf ? sample_P(*law, n, rng) : sample_Q(*law, n, rng);
  });
  std::ostringstream s;
  if (c.format == "csv") s << "replicate,vertices,leaves,height,root_degree,root_split\n";
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const TreeStats st = tree_stats(trees[i]);
    if (c.format == "csv") {
      s << io::csv_line({std::to_string(i), std::to_string(st.n_vertices), std::to_string(st.n_leaves), std::to_string(st.height),
                         std::to_string(trees[i].root_degree()), st.root_split ? st.root_split->str() : ""})
        << '\n';
    } else {
      Json j = io::tree_stats_json(st);
      j["replicate"] = i;
      if (with_trees) j["tree"] = io::tree_json(trees[i]);
      s << j.dump() << '\n';
    }
  }
  emit(c, out, "sample", s.str(), c.format == "json" ? "jsonl" : "csv");
  return kExitOk;
}

int cmd_exact_law(const std::string& family, int n, const Common& c, std::ostream& out) {
  check_format(c, {"csv", "json"});
  if (n < 1) throw ConfigError("n", "must be positive");
  const SplitLawPtr law = io::parse_family(io::load_json_arg(family, "family"), n);
  const TreeLaw pmf = law->model() == ModelKind::kLeaf ? exact_P_law(*law, n) : exact_Q_law(*law, n);
  std::ostringstream s;
  if (c.format == "csv") {
    s << "tree,probability\n";
    for (const auto& [t, p] : pmf) s << io::csv_line({t.str(), fmt(p)}) << '\n';
  } else {
    for (const auto& [t, p] : pmf) s << Json{{"tree", io::tree_json(t)}, {"probability", p}}.dump() << '\n';
  }
  emit(c, out, "exact_law", s.str(), c.format == "json" ? "jsonl" : "csv");
  return kExitOk;
}

int cmd_probe(const std::string& family, const std::string& grid_text, const std::string& f_name, const std::string& mode_text,
              const Common& c, std::ostream& out) {
  check_format(c, {"csv", "json", "svg"});
  const std::vector<int> grid = parse_grid(grid_text);
  ProbeMode mode = ProbeMode::kAuto;
  if (mode_text == "exact")
    mode = ProbeMode::kExact;
  else if (mode_text == "mc")
    mode = ProbeMode::kMonteCarlo;
  else if (mode_text != "auto")
    throw ConfigError("mode", "expected auto, exact or mc");
  const MassFunction f = probe_function(f_name);
  const SplitLawPtr law = io::parse_family(io::load_json_arg(family, "family"), grid.back());
  const std::uint64_t seed = mode == ProbeMode::kExact ? 0 : require_seed(c);
  const std::size_t reps = c.reps ? c.reps : 100000;
  std::vector<ProbeResult> results;
  for (int n : grid) results.push_back(probe_H(*law, f, n, mode, reps, stream_seed(seed, static_cast<std::uint64_t>(n))));
  if (c.format == "svg") {
    std::vector<double> x, y, e;
    for (const auto& r : results) {
      x.push_back(r.n);
      y.push_back(r.estimate);
      e.push_back(r.std_error);
    }
    emit(c, out, "probe_h", svg_trend("probe " + law->family(), x, y, e));
    return kExitOk;
  }
  std::ostringstream s;
  if (c.format == "csv") s << "family,n,gamma,estimate,stderr,mode\n";
  for (const auto& r : results) {
    if (c.format == "csv")
      s << io::csv_line({law->family(), std::to_string(r.n), fmt(law->scaling().gamma), fmt(r.estimate), fmt(r.std_error),
                         to_string(r.mode)})
        << '\n';
    else
      s << Json{{"family", law->family()}, {"n", r.n}, {"gamma", law->scaling().gamma}, {"estimate", r.estimate},
                {"stderr", r.std_error}, {"mode", to_string(r.mode)}}
               .dump()
        << '\n';
  }
  emit(c, out, "probe_h", s.str(), c.format == "json" ? "jsonl" : "csv");
  return kExitOk;
}

int cmd_scaling(int n, int constants_n, const Common& c, std::ostream& out) {
  check_format(c, {"csv", "svg"});
  const std::uint64_t seed = require_seed(c);
  if (n < 3) throw ConfigError("n", "must be at least 3");
  const std::size_t reps = c.reps ? c.reps : 10000;
  // Binary GW trees have an odd number of vertices.
  const int gw_small = n | 1, gw_large = (4 * n) | 1;
  const auto gw = gw_law(OffspringLaw::binary(), gw_large + 1);
  const UniformLaw unif(2, 4 * n + 1);
  const double c2 = constants(CountTables(2, constants_n, CountTables::Forest::kNone)).c_m;
  auto depths = [&](const SplitLaw& q, int size, double scale, std::uint64_t stream) {
    return replicate<double>(reps, stream_seed(seed, stream), c.workers, [&](std::size_t, Rng& rng) {
      return static_cast<double>(vertex_depth_Q(q, size, rng)) / (scale * std::sqrt(static_cast<double>(size)));
    });
  };
  // σ = 1: GW depths over (2/σ)√n, uniform depths over c₂√n.
  const auto g1 = depths(*gw, gw_small, 2.0, 1), g4 = depths(*gw, gw_large, 2.0, 2);
  const auto u1 = depths(unif, n, c2, 3), u4 = depths(unif, 4 * n, c2, 4);
  if (c.format == "svg") {
    emit(c, out, "scaling",
         svg_histogram("rescaled vertex depth", {{"gw n", g1}, {"gw 4n", g4}, {"uniform n", u1}, {"uniform 4n", u4}}, 40));
    return kExitOk;
  }
  std::ostringstream s;
  s << "comparison,n_a,n_b,statistic,p_value\n";
  auto row = [&](const std::string& name, int na, int nb, const std::vector<double>& a, const std::vector<double>& b) {
    const TestResult r = ks_two_sample(a, b);
    s << io::csv_line({name, std::to_string(na), std::to_string(nb), fmt(r.statistic), fmt(r.p_value)}) << '\n';
  };
  row("gw_vs_uniform", gw_small, n, g1, u1);
  row("gw_n_vs_4n", gw_small, gw_large, g1, g4);
  row("uniform_n_vs_4n", n, 4 * n, u1, u4);
  emit(c, out, "scaling", s.str());
  if (!c.out_dir.empty()) {
    std::ostringstream d;
    d << "model,n,replicate,scaled_depth\n";
    auto dump = [&](const char* model, int size, const std::vector<double>& xs) {
      for (std::size_t i = 0; i < xs.size(); ++i) d << model << ',' << size << ',' << i << ',' << fmt(xs[i]) << '\n';
    };
    dump("gw", gw_small, g1);
    dump("gw", gw_large, g4);
    dump("uniform2", n, u1);
    dump("uniform2", 4 * n, u4);
    emit(c, out, "scaling_samples", d.str(), "csv");
  }
  return kExitOk;
}

int cmd_coupling(const std::string& m_text, int n, const Common& c, std::ostream& out) {
  check_format(c, {"csv", "json"});
  const std::uint64_t seed = require_seed(c);
  const int m = io::parse_degree(m_text, "m");
  if (n < 1) throw ConfigError("n", "must be positive");
  const auto tables = std::make_shared<const CountTables>(m, std::max(n, 2), CountTables::Forest::kRequire);
  const std::size_t reps = c.reps ? c.reps : 10000;
  struct Row {
    Tree coupled;
    int j_star = 0;
    bool bound_ok = true;
  };
  const auto rows = replicate<Row>(reps, seed, c.workers, [&](std::size_t, Rng& rng) {
    const CouplingOutcome o = natural_coupling(*tables, uniform_tree(*tables, n, rng), rng);
    const auto h0 = static_cast<double>(o.original.height()), h1 = static_cast<double>(o.coupled.height());
    return Row{o.coupled, o.j_star, std::abs(h0 - h1) <= 2.0 * o.j_star};
  });
  std::map<int, std::uint64_t> hist;
  std::uint64_t violations = 0;
  for (const auto& r : rows) {
    ++hist[r.j_star];
    violations += r.bound_ok ? 0 : 1;
  }
  std::optional<double> tv;
  if (n <= 9) {
    const TreeLaw exact = exact_Q_law(UniformLaw(tables), n);
    TreeLaw emp;
    for (const auto& r : rows) emp[r.coupled] += 1.0 / static_cast<double>(reps);
    tv = tv_distance(emp, exact);
  }
  if (c.format == "json") {
    Json j;
    Json h = Json::object();
    for (auto [k, v] : hist) h[std::to_string(k)] = v;
    j["j_star_histogram"] = h;
    j["height_bound_violations"] = violations;
    j["reps"] = reps;
    j["tv_to_markov_branching"] = tv ? Json(*tv) : Json(nullptr);
    emit(c, out, "coupling", j.dump() + "\n");
    return kExitOk;
  }
  std::ostringstream s;
  s << "section,key,value\n";
  for (auto [k, v] : hist) s << "j_star_histogram," << k << ',' << v << '\n';
  s << "audit,height_bound_violations," << violations << '\n';
  s << "audit,reps," << reps << '\n';
  if (tv) s << "marginal,tv_to_markov_branching," << fmt(*tv) << '\n';
  emit(c, out, "coupling", s.str());
  return kExitOk;
}

int cmd_continuum(const std::string& measure, double gamma, int n, const Common& c, std::ostream& out) {
  check_format(c, {"csv", "svg"});
  const std::uint64_t seed = require_seed(c);
  if (n < 1) throw ConfigError("n", "must be positive");
  if (!(gamma > 0.0)) throw ConfigError("gamma", "must be positive");
  const DislocationMeasure nu = io::parse_measure(io::load_json_arg(measure, "measure"));
  const auto law = propexemple_law(nu, gamma, std::max(n, 2));
  if (n < law->n0()) throw ConfigError("n", "below n0 = " + std::to_string(law->n0()) + " for this measure and gamma");
  const std::size_t reps = c.reps ? c.reps : 1000;
  struct Row {
    double height = 0.0;
    double mean_leaf_depth = 0.0;
    std::uint64_t vertices = 0;
  };
  const auto rows = replicate<Row>(reps, seed, c.workers, [&](std::size_t, Rng& rng) {
    const EdgeTree t = approx_continuum_tree(*law, n, rng);
    const auto d = t.leaf_root_distances();
    double mean = 0.0;
    for (double x : d) mean += x;
    return Row{t.height(), mean / static_cast<double>(d.size()), t.tree().size()};
  });
  if (c.format == "svg") {
    std::vector<double> h;
    for (const auto& r : rows) h.push_back(r.height);
    emit(c, out, "continuum", svg_histogram("rescaled height", {{"n=" + std::to_string(n), h}}, 40));
    return kExitOk;
  }
  std::ostringstream s;
  s << "replicate,n,height,mean_leaf_depth,vertices\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    s << i << ',' << n << ',' << fmt(rows[i].height) << ',' << fmt(rows[i].mean_leaf_depth) << ',' << rows[i].vertices << '\n';
  emit(c, out, "continuum", s.str());
  return kExitOk;
}

std::string error_json(const std::string& kind, const std::string& message, const std::string& key = "") {
  Json j;
  j["error"] = kind;
  if (!key.empty()) j["key"] = key;
  j["message"] = message;
  return j.dump();
}

}  // namespace

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> out;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError("n-grid", "'" + s + "' is not an integer");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> f;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) f.push_back(part);
    if (f.size() != 3) throw ConfigError("n-grid", "expected a:b:step");
    const int a = to_int(f[0]), b = to_int(f[1]), step = to_int(f[2]);
    if (step <= 0) throw ConfigError("n-grid", "step must be positive");
    for (int n = a; n <= b; n += step) out.push_back(n);
  } else {
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) out.push_back(to_int(part));
  }
  if (out.empty()) throw ConfigError("n-grid", "empty grid");
  if (out.front() < 1) throw ConfigError("n-grid", "sizes must be positive");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] <= out[i - 1]) throw ConfigError("n-grid", "grid must be strictly increasing");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"branchlab: Markov branching trees, Otter enumeration and scaling experiments"};
  app.require_subcommand(1);
  Common c;
  std::uint64_t seed_value = 0;
  auto add_common = [&](CLI::App* s, bool seed_option = true) {
    s->add_option("--format", c.format, "csv | json | svg (where offered)");
    s->add_option("--out", c.out_dir, "write <subcommand>.<ext> files into this directory instead of stdout");
    if (seed_option) s->add_option("--seed", seed_value, "master seed; falls back to BRANCHLAB_SEED");
    s->add_option("--workers", c.workers, "worker threads (default: available parallelism)");
  };

  int n = 0, N = 0;
  std::string m_text = "inf", family, grid, f_name = "one", mode = "auto", measure;
  double gamma = 0.0;
  std::size_t reps = 0;
  bool markov = false, with_trees = false;
  int constants_n = 2001;

  auto* e = app.add_subcommand("enumerate", "canonical trees with n vertices, degrees <= m (JSON lines: rank, tree)");
  e->add_option("n,--n", n, "vertices (<= 16)")->required();
  e->add_option("m,--m", m_text, "degree bound: integer >= 2 or inf");
  add_common(e);

  auto* k = app.add_subcommand("counts", "Otter counts T and T~ for n <= N; CSV n,T,T_tilde; constants CSV when N >= 100");
  k->add_option("m,--m", m_text, "degree bound: integer >= 2 or inf")->required();
  k->add_option("N,--N", N, "largest size")->required();
  add_common(k);

  auto* s = app.add_subcommand("sample", "tree statistics per replicate; CSV replicate,vertices,leaves,height,root_degree,root_split");
  s->add_option("family,--family", family, "family spec (JSON text or file)")->required();
  s->add_option("n,--n", n, "size: leaves (leaf model) or vertices (vertex model)")->required();
  s->add_option("reps,--reps", reps, "replicates (default 1)");
  s->add_option("seed,--seed", seed_value, "master seed; falls back to BRANCHLAB_SEED");
  s->add_flag("--markov", markov, "uniform family: draw Q^q_n instead of uniform trees");
  s->add_flag("--trees", with_trees, "json format: include the nested-list tree");
  add_common(s, false);

  auto* x = app.add_subcommand("exact-law", "exact law over trees; CSV tree,probability (leaf n <= 9, vertex n <= 12)");
  x->add_option("family,--family", family, "family spec (JSON text or file)")->required();
  x->add_option("n,--n", n, "size")->required();
  add_common(x);

  auto* p = app.add_subcommand("probe-h", "a_n Σ q_n(λ)(1-λ₁/n) f(λ/n) over an n grid; CSV family,n,gamma,estimate,stderr,mode");
  p->add_option("family,--family", family, "family spec (JSON text or file)")->required();
  p->add_option("n-grid,--n-grid", grid, "a:b:step or a,b,c")->required();
  p->add_option("--f", f_name, "one | s1 | one_minus_s1");
  p->add_option("--mode", mode, "auto | exact | mc");
  p->add_option("--reps", reps, "Monte Carlo draws (default 1e5)");
  add_common(p);

  auto* g = app.add_subcommand("scaling", "rescaled uniform-vertex depths: binary GW over 2√n vs uniform m=2 over c₂√n at n and 4n; "
                                          "CSV comparison,n_a,n_b,statistic,p_value (KS)");
  g->add_option("n,--n", n, "base size (default 2000)");
  g->add_option("--reps", reps, "samples per model and size (default 1e4)");
  g->add_option("--constants-n", constants_n, "table size for c₂ (default 2001)");
  add_common(g);

  auto* cp = app.add_subcommand("coupling", "natural coupling of uniform trees; CSV section,key,value (j* histogram, audit, TV)");
  cp->add_option("m,--m", m_text, "degree bound: integer >= 2 or inf")->required();
  cp->add_option("n,--n", n, "vertices")->required();
  cp->add_option("reps,--reps", reps, "couplings (default 1e4)");
  add_common(cp);

  auto* ct = app.add_subcommand("continuum", "approximate fragmentation trees; CSV replicate,n,height,mean_leaf_depth,vertices");
  ct->add_option("nu,--nu", measure, "measure spec (JSON text or file)")->required();
  ct->add_option("gamma,--gamma", gamma, "self-similarity index")->required();
  ct->add_option("n,--n", n, "leaves")->required();
  ct->add_option("reps,--reps", reps, "replicates (default 1000)");
  add_common(ct);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << error_json("config", ex.what()) << '\n';
    return kExitConfig;
  }
  try {
    for (auto* sub : app.get_subcommands()) {
      for (const char* name : {"--seed", "seed"}) {
        const CLI::Option* o = sub->get_option_no_throw(name);
        if (o && o->count() > 0) c.seed = seed_value;
      }
    }
    c.reps = reps;
    if (*e) return cmd_enumerate(n, m_text, c, out);
    if (*k) return cmd_counts(m_text, N, c, out);
    if (*s) return cmd_sample(family, n, markov, with_trees, c, out);
    if (*x) return cmd_exact_law(family, n, c, out);
    if (*p) return cmd_probe(family, grid, f_name, mode, c, out);
    if (*g) return cmd_scaling(n > 0 ? n : 2000, constants_n, c, out);
    if (*cp) return cmd_coupling(m_text, n, c, out);
    if (*ct) return cmd_continuum(measure, gamma, n, c, out);
  } catch (const ConfigError& ex) {
    err << error_json("config", ex.what(), ex.key()) << '\n';
    return kExitConfig;
  } catch (const ResourceError& ex) {
    err << error_json("resource", ex.what()) << '\n';
    return kExitResource;
  } catch (const std::invalid_argument& ex) {
    err << error_json("config", ex.what()) << '\n';
    return kExitConfig;
  } catch (const std::out_of_range& ex) {
    err << error_json("config", ex.what()) << '\n';
    return kExitConfig;
  } catch (const std::domain_error& ex) {
    err << error_json("config", ex.what()) << '\n';
    return kExitConfig;
  } catch (const std::bad_alloc&) {
    err << error_json("resource", "out of memory") << '\n';
    return kExitResource;
  } catch (const std::exception& ex) {
    err << error_json("internal", ex.what()) << '\n';
    return 1;
  }
  return kExitConfig;
}

}  // namespace branchlab::cli
