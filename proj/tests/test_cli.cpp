#include "cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = branchlab::cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream s(text);
  for (std::string l; std::getline(s, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

std::string column(const std::string& line, std::size_t i) {
  std::istringstream s(line);
  std::string field;
  for (std::size_t k = 0; k <= i; ++k) std::getline(s, field, ',');
  return field;
}

}  // namespace

TEST_CASE("enumerate prints one JSON line per tree") {
  auto o = run({"enumerate", "4", "inf"});
  CHECK(o.code == 0);
  auto ls = lines(o.out);
  REQUIRE(ls.size() == 4);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    auto j = nlohmann::json::parse(ls[i]);
    CHECK(j["rank"] == i);
    CHECK(j["tree"].is_array());
  }
  CHECK(nlohmann::json::parse(ls.back())["tree"].dump() == "[[],[],[]]");
  CHECK(lines(run({"enumerate", "6", "2"}).out).size() == 11);
}

TEST_CASE("counts for binary trees") {
  auto o = run({"counts", "2", "8"});
  CHECK(o.code == 0);
  auto ls = lines(o.out);
  REQUIRE(ls.size() == 9);
  CHECK(ls.front() == "n,T,T_tilde");
  std::vector<std::string> t;
  for (std::size_t i = 1; i < ls.size(); ++i) t.push_back(column(ls[i], 1));
  CHECK(t == std::vector<std::string>{"1", "1", "2", "3", "6", "11", "23", "46"});
  auto j = run({"counts", "inf", "120", "--format", "json"});
  CHECK(j.code == 0);
  auto doc = nlohmann::json::parse(j.out);
  CHECK(doc.dump().find("115") != std::string::npos);
}

TEST_CASE("configuration errors exit 2 and name the key") {
  auto bad = run({"sample", "{\"family\":\"gw\",\"offspring\":\"trinary\"}", "5", "3", "1"});
  CHECK(bad.code == 2);
  auto e = nlohmann::json::parse(lines(bad.err).at(0));
  CHECK(e["error"] == "config");
  CHECK(e["key"].get<std::string>().find("offspring") != std::string::npos);
  auto broken = run({"sample", "{\"family\": ", "5", "3", "1"});
  CHECK(broken.code == 2);
  CHECK(nlohmann::json::parse(lines(broken.err).at(0))["key"] == "family");
  CHECK(run({"counts", "1", "8"}).code == 2);
  CHECK(run({"probe-h", "{\"family\":\"alpha_theta\",\"alpha\":0.5,\"theta\":0.5}", "50,20"}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(bad.out.empty());
}

TEST_CASE("resource caps exit 3") {
  auto o = run({"enumerate", "40", "inf"});
  CHECK(o.code == 3);
  CHECK(nlohmann::json::parse(lines(o.err).at(0))["error"] == "resource");
}

TEST_CASE("sampling needs a seed and is deterministic") {
  const std::string fam = "{\"family\":\"alpha_theta\",\"alpha\":0.5,\"theta\":0.5}";
  ::unsetenv("BRANCHLAB_SEED");
  CHECK(run({"sample", fam, "20", "5"}).code == 2);
  auto a = run({"sample", fam, "30", "50", "7", "--workers", "1"});
  auto b = run({"sample", fam, "30", "50", "--seed", "7", "--workers", "4"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(lines(a.out).size() == 51);
  ::setenv("BRANCHLAB_SEED", "7", 1);
  CHECK(run({"sample", fam, "30", "50"}).out == a.out);
  ::unsetenv("BRANCHLAB_SEED");
  auto c = run({"sample", fam, "30", "50", "8"});
  CHECK(c.out != a.out);
}

TEST_CASE("grid parsing") {
  CHECK(branchlab::cli::parse_grid("10:40:10") == std::vector<int>{10, 20, 30, 40});
  CHECK(branchlab::cli::parse_grid("5,7,100") == std::vector<int>{5, 7, 100});
  CHECK_THROWS(branchlab::cli::parse_grid("7,5"));
  CHECK_THROWS(branchlab::cli::parse_grid("1:x:2"));
}

TEST_CASE("exact-law and probe-h outputs") {
  auto x = run({"exact-law", "{\"family\":\"gw\",\"offspring\":\"binary\"}", "5"});
  CHECK(x.code == 0);
  auto ls = lines(x.out);
  double total = 0;
  for (std::size_t i = 1; i < ls.size(); ++i) total += std::stod(ls[i].substr(ls[i].rfind(',') + 1));
  CHECK(total == doctest::Approx(1.0));
  auto p = run({"probe-h", "{\"family\":\"alpha_theta\",\"alpha\":0.5,\"theta\":0.5}", "50,200", "--seed", "1"});
  CHECK(p.code == 0);
  auto pl = lines(p.out);
  REQUIRE(pl.size() == 3);
  CHECK(pl[0] == "family,n,gamma,estimate,stderr,mode");
  CHECK(column(pl[1], 5) == "exact");
}

TEST_CASE("coupling and continuum reports") {
  auto c = run({"coupling", "inf", "7", "2000", "--seed", "3"});
  CHECK(c.code == 0);
  CHECK(c.out.find("audit") != std::string::npos);
  auto ct = run({"continuum", "{\"kind\":\"point\",\"s\":[0.5,0.5]}", "1", "64", "20", "--seed", "2"});
  CHECK(ct.code == 0);
  CHECK(lines(ct.out).size() == 21);
}

TEST_CASE("files under --out") {
  auto dir = std::filesystem::temp_directory_path() / "branchlab_cli_test";
  std::filesystem::remove_all(dir);
  auto o = run({"counts", "inf", "150", "--out", dir.string()});
  CHECK(o.code == 0);
  CHECK(std::filesystem::exists(dir / "counts.csv"));
  CHECK(std::filesystem::exists(dir / "constants.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("the installed binary reports errors as one JSON line") {
  const char* bin = std::getenv("BRANCHLAB_BIN");
  if (!bin) return;
  std::string cmd = std::string(bin) + " sample '{\"family\":\"uniform\",\"m\":1}' 5 2 1 2>&1 >/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string text;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) text += buf;
  int status = ::pclose(pipe);
  CHECK(WEXITSTATUS(status) == 2);
  auto ls = lines(text);
  REQUIRE(ls.size() == 1);
  CHECK(nlohmann::json::parse(ls[0])["key"].get<std::string>().find("m") != std::string::npos);
}
