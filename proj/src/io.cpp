#include "branchlab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace branchlab::io {

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

namespace {

std::string sub(const std::string& key, const std::string& field) { return key + "." + field; }

const Json& require(const Json& j, const std::string& field, const std::string& key) {
  if (!j.is_object()) throw ConfigError(key, "expected a JSON object");
  auto it = j.find(field);
  if (it == j.end()) throw ConfigError(sub(key, field), "missing");
  return *it;
}

double number(const Json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError(key, "expected an integer");
  return j.get<int>();
}

double number_field(const Json& j, const std::string& field, const std::string& key) {
  return number(require(j, field, key), sub(key, field));
}

int int_field_or(const Json& j, const std::string& field, int fallback, const std::string& key) {
  auto it = j.find(field);
  return it == j.end() ? fallback : integer(*it, sub(key, field));
}

std::string string_field(const Json& j, const std::string& field, const std::string& key) {
  const Json& v = require(j, field, key);
  if (!v.is_string()) throw ConfigError(sub(key, field), "expected a string");
  return v.get<std::string>();
}

std::vector<double> number_list(const Json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw ConfigError(key, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

// Constructors report bad values as std::invalid_argument; tie them to the key.
template <class F>
auto keyed(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(key, e.what());
  }
}

OffspringLaw parse_offspring(const Json& j, const std::string& key) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "binary") return OffspringLaw::binary();
    if (name == "poisson") return OffspringLaw::poisson();
    throw ConfigError(key, "unknown offspring law '" + name + "' (binary, poisson, {\"pmf\":[..]}, {\"stable\":α})");
  }
  if (j.is_object() && j.contains("pmf")) {
    auto pmf = number_list(j["pmf"], sub(key, "pmf"));
    return keyed(sub(key, "pmf"), [&] { return OffspringLaw::from_pmf(pmf); });
  }
  if (j.is_object() && j.contains("stable")) {
    const double a = number(j["stable"], sub(key, "stable"));
    return keyed(sub(key, "stable"), [&] { return OffspringLaw::stable(a); });
  }
  throw ConfigError(key, "expected \"binary\", \"poisson\", {\"pmf\":[..]} or {\"stable\":α}");
}

}  // namespace

Json load_json_arg(const std::string& text_or_path, const std::string& key) {
  std::string text = text_or_path;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ConfigError(key, "empty value");
  if (text[first] != '{' && text[first] != '[') {
    std::ifstream in(text_or_path);
    if (!in) throw ConfigError(key, "not inline JSON and no readable file '" + text_or_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(key, std::string("malformed JSON: ") + e.what());
  }
}

DislocationMeasure parse_measure(const Json& j, const std::string& key) {
  const std::string kind = string_field(j, "kind", key);
  DislocationMeasure nu;
  if (kind == "nu2") {
    nu = nu2();
  } else if (kind == "alpha_theta") {
    const double a = number_field(j, "alpha", key), t = number_field(j, "theta", key);
    nu = keyed(key, [&] { return nu_alpha_theta(a, t); });
  } else if (kind == "point") {
    auto s = number_list(require(j, "s", key), sub(key, "s"));
    const double w = j.contains("weight") ? number(j["weight"], sub(key, "weight")) : 1.0;
    nu = keyed(sub(key, "s"), [&] { return DislocationMeasure::point_mass(MassPartition(s), w); });
  } else if (kind == "mixture") {
    const Json& atoms = require(j, "atoms", key);
    if (!atoms.is_array() || atoms.empty()) throw ConfigError(sub(key, "atoms"), "expected a nonempty array");
    std::vector<std::pair<MassPartition, double>> list;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string k = sub(key, "atoms") + "[" + std::to_string(i) + "]";
      auto s = number_list(require(atoms[i], "s", k), sub(k, "s"));
      const double w = number_field(atoms[i], "weight", k);
      list.emplace_back(keyed(sub(k, "s"), [&] { return MassPartition(s); }), w);
    }
    nu = keyed(sub(key, "atoms"), [&] { return DislocationMeasure::mixture(list); });
  } else if (kind == "stable") {
    const double a = number_field(j, "alpha", key);
    nu = keyed(sub(key, "alpha"), [&] { return nu_alpha(a); });
  } else {
    throw ConfigError(sub(key, "kind"), "unknown measure kind '" + kind + "' (nu2, alpha_theta, point, mixture, stable)");
  }
  if (j.contains("cutoff")) {
    const double c = number(j["cutoff"], sub(key, "cutoff"));
    nu = keyed(sub(key, "cutoff"), [&] { return nu.cut_off(c); });
  }
  return nu;
}

std::map<int, PartitionPmf> parse_table(const Json& rows, const std::string& key) {
  if (!rows.is_array() || rows.empty()) throw ConfigError(key, "expected a nonempty array of {\"n\", \"entries\"} rows");
  std::map<int, PartitionPmf> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string rk = key + "[" + std::to_string(r) + "]";
    const int n = integer(require(rows[r], "n", rk), sub(rk, "n"));
    const Json& entries = require(rows[r], "entries", rk);
    if (!entries.is_array()) throw ConfigError(sub(rk, "entries"), "expected an array");
    PartitionPmf row;
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const std::string ek = sub(rk, "entries") + "[" + std::to_string(e) + "]";
      const Json& parts = require(entries[e], "parts", ek);
      if (!parts.is_array()) throw ConfigError(sub(ek, "parts"), "expected an array");
      std::vector<int> p;
      for (std::size_t i = 0; i < parts.size(); ++i) p.push_back(integer(parts[i], sub(ek, "parts") + "[" + std::to_string(i) + "]"));
      const double prob = number_field(entries[e], "p", ek);
      IntPartition l = p.empty() ? IntPartition::empty() : keyed(sub(ek, "parts"), [&] { return IntPartition(p); });
      row.emplace_back(std::move(l), prob);
    }
    if (!out.emplace(n, std::move(row)).second) throw ConfigError(sub(rk, "n"), "duplicate row for n = " + std::to_string(n));
  }
  return out;
}

int parse_degree(const std::string& text, const std::string& key) {
  if (text == "inf" || text == "∞" || text == "infinity") return kUnboundedDegree;
  int m = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), m);
  if (ec != std::errc() || ptr != text.data() + text.size() || m < 2)
    throw ConfigError(key, "expected an integer >= 2 or \"inf\", got '" + text + "'");
  return m;
}

SplitLawPtr parse_family(const Json& j, int n_hint, const std::string& key) {
  const std::string family = string_field(j, "family", key);
  const int fit = std::max(n_hint + 1, 2);
  std::shared_ptr<SplitLaw> law;
  if (family == "tabulated") {
    ModelKind model = ModelKind::kLeaf;
    if (j.contains("model")) {
      const std::string m = string_field(j, "model", key);
      if (m == "vertex")
        model = ModelKind::kVertex;
      else if (m != "leaf")
        throw ConfigError(sub(key, "model"), "expected \"leaf\" or \"vertex\"");
    }
    auto table = parse_table(require(j, "table", key), sub(key, "table"));
    law = keyed(sub(key, "table"), [&] { return std::make_shared<TabulatedLaw>(std::move(table), model); });
  } else if (family == "gw") {
    OffspringLaw xi = parse_offspring(require(j, "offspring", key), sub(key, "offspring"));
    const int N = int_field_or(j, "N", fit, key);
    law = keyed(sub(key, "N"), [&] { return std::make_shared<GwLaw>(std::move(xi), N); });
  } else if (family == "alpha_theta") {
    const double a = number_field(j, "alpha", key), t = number_field(j, "theta", key);
    law = keyed(key, [&] { return std::make_shared<AlphaThetaLaw>(a, t); });
  } else if (family == "consistent") {
    const DislocationMeasure nu = parse_measure(require(j, "measure", key), sub(key, "measure"));
    const int N = int_field_or(j, "N", fit, key);
    law = keyed(key, [&] { return std::make_shared<ConsistentLaw>(nu, N); });
  } else if (family == "propexemple") {
    const DislocationMeasure nu = parse_measure(require(j, "measure", key), sub(key, "measure"));
    const double g = j.contains("gamma") ? number(j["gamma"], sub(key, "gamma")) : nu.default_gamma();
    const int max_n = int_field_or(j, "max_n", std::max(n_hint, 2), key);
    law = keyed(key, [&] { return std::make_shared<PropexempleLaw>(nu, g, max_n); });
  } else if (family == "uniform") {
    const Json& mj = require(j, "m", key);
    int m = kUnboundedDegree;
    if (mj.is_string())
      m = parse_degree(mj.get<std::string>(), sub(key, "m"));
    else
      m = parse_degree(std::to_string(integer(mj, sub(key, "m"))), sub(key, "m"));
    const int N = int_field_or(j, "N", fit, key);
    law = keyed(sub(key, "N"), [&] { return std::make_shared<UniformLaw>(m, N); });
  } else if (family == "circ") {
    SplitLawPtr base = parse_family(require(j, "base", key), n_hint, sub(key, "base"));
    if (base->model() != ModelKind::kVertex) throw ConfigError(sub(key, "base"), "circ needs a vertex-model base law");
    law = std::make_shared<CircLaw>(std::move(base));
  } else {
    throw ConfigError(sub(key, "family"),
                      "unknown family '" + family + "' (tabulated, gw, alpha_theta, consistent, propexemple, uniform, circ)");
  }
  if (j.contains("gamma_scaling") || j.contains("ell")) {
    Scaling s = law->scaling();
    if (j.contains("gamma_scaling")) s.gamma = number(j["gamma_scaling"], sub(key, "gamma_scaling"));
    if (j.contains("ell")) {
      const double ell = number(j["ell"], sub(key, "ell"));
      if (!(ell > 0.0)) throw ConfigError(sub(key, "ell"), "must be positive");
      s.ell = [ell](double) { return ell; };
    }
    keyed(sub(key, "gamma_scaling"), [&] {
      law->set_scaling(s);
      return 0;
    });
  }
  return law;
}

Json tree_json(const Tree& t) {
  // Iterative over stems, recursive over branch points.
  Json inner = Json::array();
  const std::uint64_t stem = t.stem();
  Tree core = t.subtree_at(stem);
  for (const auto& c : core.children()) inner.push_back(tree_json(c));
  for (std::uint64_t i = 0; i < stem; ++i) {
    Json wrap = Json::array();
    wrap.push_back(std::move(inner));
    inner = std::move(wrap);
  }
  return inner;
}

Json partition_json(const IntPartition& l) { return Json(l.parts()); }

Json tree_stats_json(const TreeStats& s) {
  Json j;
  j["height"] = s.height;
  j["vertices"] = s.n_vertices;
  j["leaves"] = s.n_leaves;
  j["root_split"] = s.root_split ? partition_json(*s.root_split) : Json(nullptr);
  Json deg = Json::object();
  for (auto [d, c] : s.degree_histogram) deg[std::to_string(d)] = c;
  j["degrees"] = deg;
  return j;
}

Json counts_json(const CountTables& tables) {
  Json j;
  j["m"] = tables.unbounded() ? Json("inf") : Json(tables.m());
  j["N"] = tables.N();
  Json t = Json::array(), tt = Json::array();
  for (int n = 1; n <= tables.N(); ++n) {
    t.push_back(to_decimal(tables.T(n)));
    tt.push_back(to_decimal(tables.T_tilde(n)));
  }
  j["T"] = t;
  j["T_tilde"] = tt;
  return j;
}

std::string fmt(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    const auto& f = fields[i];
    if (f.find_first_of(",\"\n") != std::string::npos) {
      out += '"';
      for (char c : f) {
        if (c == '"') out += '"';
        out += c;
      }
      out += '"';
    } else {
      out += f;
    }
  }
  return out;
}

}  // namespace branchlab::io
