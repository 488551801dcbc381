#pragma once

#include "branchlab/fragmentation.hpp"
#include "branchlab/polya.hpp"
#include "branchlab/splitlaws.hpp"
#include "branchlab/trees.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace branchlab::io {

using Json = nlohmann::json;

/// Malformed configuration; key() is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Parses inline JSON text, or reads the file it names.
Json load_json_arg(const std::string& text_or_path, const std::string& key);

/// {"kind":"nu2"} | {"kind":"alpha_theta","alpha":a,"theta":t} |
/// {"kind":"point","s":[...]} | {"kind":"stable","alpha":a}; an optional
/// "cutoff" c restricts a binary measure to s₁ <= 1 - c.
DislocationMeasure parse_measure(const Json& j, const std::string& key = "measure");

/// Family spec, keyed by "family":
///   tabulated   {"model":"leaf"|"vertex","table":[{"n":k,"entries":[{"parts":[..],"p":x}]}]}
///   gw          {"offspring":"binary"|"poisson"|{"pmf":[..]}|{"stable":α},"N":k}
///   alpha_theta {"alpha":a,"theta":t}
///   consistent  {"measure":{..},"N":k}
///   propexemple {"measure":{..},"gamma":g,"max_n":k}
///   uniform     {"m":k|"inf","N":k}
///   circ        {"base":{family spec, vertex model}}
/// plus optional "gamma_scaling" and "ell" (a positive constant) overriding
/// the scaling a_n. Table sizes left out default to fit n_hint.
SplitLawPtr parse_family(const Json& j, int n_hint, const std::string& key = "family");

/// Tabulated law rows: {"n": k, "entries": [{"parts": [..], "p": x}]}.
std::map<int, PartitionPmf> parse_table(const Json& rows, const std::string& key);

/// Nested arrays: [] is the single vertex, [[],[]] the cherry.
Json tree_json(const Tree& t);
Json tree_stats_json(const TreeStats& s);
Json partition_json(const IntPartition& l);
/// Counts as decimal strings, never floats.
Json counts_json(const CountTables& tables);

/// Degree bound from "inf" / "∞" / an integer >= 2.
int parse_degree(const std::string& text, const std::string& key);

/// Shortest round-trip decimal form, stable across runs.
std::string fmt(double x);
std::string csv_line(const std::vector<std::string>& fields);

}  // namespace branchlab::io
