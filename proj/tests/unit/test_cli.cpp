#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "afk/cli.hpp"

#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace afk;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

bool contains(const std::string& s, const std::string& needle) {
  return s.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("analyze presets") {
  Run r = run({"analyze", "car", "--horizon", "24"});
  CHECK(r.code == exit_ok);
  CHECK(contains(r.out, "KK1 = Z_2-hat/Z"));

  Run s = run({"analyze", "--diagram", "uhf:3+", "--format", "structured"});
  REQUIRE(s.code == exit_ok);
  auto j = nlohmann::json::parse(s.out);
  CHECK(j["kk1"]["variant"] == "ProfiniteQuotient");
  CHECK(j["kk1"]["supernatural"] == "3^inf");

  CHECK(run({"analyze", "car", "--format", "structured"}).out ==
        run({"analyze", "car", "--format", "structured"}).out);
}

TEST_CASE("analyze a diagram file") {
  const std::string good = write_temp(
      "afk_cli_good.json", R"({"name":"two","kind":"explicit","dims":[[1],[2]],"maps":[[[2]]]})");
  Run r = run({"analyze", good});
  CHECK(r.code == exit_ok);
  CHECK(contains(r.out, "two"));
}

TEST_CASE("exit 1: I/O, parse and usage errors") {
  CHECK(run({"analyze", "/nonexistent/diagram.json"}).code == exit_io);
  CHECK(run({"analyze"}).code == exit_io);
  const std::string bad = write_temp("afk_cli_bad.json", "{not json");
  CHECK(run({"analyze", bad}).code == exit_io);
  CHECK(run({"analyze", "uhf:2,x"}).code == exit_io);
  CHECK(run({"frobnicate"}).code == exit_io);
  CHECK(run({"analyze", "car", "--format", "xml"}).code == exit_io);
  CHECK(run({"pair", "--diagram", "car", "--module", "x", "--class", "0:[1]"}).code == exit_io);
  CHECK(run({"pair", "--diagram", "car", "--module", "1:0", "--class", "0:[a]"}).code == exit_io);
  CHECK(run({"--help"}).code == exit_ok);
}

TEST_CASE("exit 2: validation and failed verification") {
  const std::string invalid = write_temp(
      "afk_cli_invalid.json", R"({"kind":"explicit","dims":[[1],[3]],"maps":[[[2]]]})");
  Run r = run({"analyze", invalid});
  CHECK(r.code == exit_validation);
  CHECK(contains(r.err, "validation"));
  CHECK(run({"analyze", "car", "--horizon", "0"}).code == exit_validation);
  CHECK(run({"pair", "--diagram", "car", "--module", "0:0", "--class", "2:[1]"}).code ==
        exit_validation);
  CHECK(run({"pair", "--diagram", "car", "--module", "1:0", "--class", "1:[1,1]"}).code ==
        exit_validation);
  CHECK(run({"verify", "fredholm", "--diagram", "car", "--level", "1", "--block", "3"}).code ==
        exit_validation);
}

TEST_CASE("exit 3: strict mode with horizon-certified verdicts") {
  CHECK(run({"analyze", "car", "--strict"}).code == exit_ok);
  // A singular period matrix leaves the divisibility obstruction horizon-certified.
  const std::string path = write_temp(
      "afk_cli_inexact.json",
      R"({"name":"sing","kind":"stationary","matrix":[[1,1],[1,1]],"depth":6})");
  CHECK(run({"analyze", path}).code == exit_ok);
  CHECK(run({"analyze", path, "--strict"}).code == exit_inexact);
}

TEST_CASE("exit 4: cost guards") {
  CHECK(run({"verify", "fredholm", "--diagram", "car", "--level", "9"}).code == exit_cost_guard);
  CHECK(run({"verify", "fredholm", "--diagram", "car", "--max-k", "13"}).code == exit_cost_guard);
  CHECK(run({"verify", "pullback", "--diagram", "car", "--level", "8"}).code == exit_cost_guard);
  CHECK(run({"analyze", "car", "--horizon", "5000"}).code == exit_cost_guard);
  CHECK(run({"pair", "--diagram", "car", "--module", "9:0", "--class", "9:[1]"}).code ==
        exit_cost_guard);
}

TEST_CASE("verify fredholm and pullback") {
  Run f = run({"verify", "fredholm", "--diagram", "car", "--level", "3", "--max-k", "5"});
  CHECK(f.code == exit_ok);
  CHECK(contains(f.out, "verified"));
  Run p = run({"verify", "pullback", "--diagram", "car", "--level", "2", "--format", "structured"});
  REQUIRE(p.code == exit_ok);
  auto j = nlohmann::json::parse(p.out);
  CHECK(j["naturality"][0]["pullback_pairing"] == "2");
  CHECK(j["witnesses"][0]["found"] == true);
  CHECK(run({"verify", "pullback", "--diagram", "uhf:2,3+", "--level", "1"}).code == exit_ok);
}

TEST_CASE("pair and limits") {
  Run p = run({"pair", "--diagram", "car", "--module", "3:0", "--class", "1:[1]"});
  CHECK(p.code == exit_ok);
  CHECK(contains(p.out, "module pulled back from level 3 to level 1"));
  CHECK(contains(p.out, "\n4\n"));
  CHECK(run({"pair", "--diagram", "car", "--module", "2:0", "--class", "2:[3]", "--k", "2"}).out ==
        "3\n");

  Run l = run({"limits", "--tower", "khom", "--diagram", "car", "--horizon", "8"});
  CHECK(l.code == exit_ok);
  CHECK(contains(l.out, "Z ⊋ 2Z ⊋ 4Z ⊋ 8Z ⊋ 16Z ⊋ 32Z ⊋ 64Z ⊋ 128Z ⊋ 256Z"));
  CHECK(contains(l.out, "Mittag-Leffler: fails"));
  Run k = run({"limits", "--tower", "k0", "--diagram", "uhf:6+"});
  CHECK(contains(k.out, "Z[1/6]"));
  CHECK(run({"limits", "--tower", "bogus", "--diagram", "car"}).code == exit_io);
}
