#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "fsl/common.hpp"
#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
  json doc() const { return json::parse(out); }
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = fsl::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  auto file = std::filesystem::temp_directory_path() / name;
  std::ofstream(file) << text;
  return file;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config text parsing") {
  auto m = fsl::cli::parse_config_text("# comment\n\nk = 3\n samples=500 \n");
  CHECK(m.size() == 2);
  CHECK(m["k"] == "3");
  CHECK(m["samples"] == "500");
  CHECK_THROWS_AS(fsl::cli::parse_config_text("no equals sign\n"), fsl::ValidationError);
}

TEST_CASE("config hash is stable and order independent") {
  std::map<std::string, std::string> a{{"x", "1"}, {"y", "2"}}, b{{"y", "2"}, {"x", "1"}};
  const auto h = fsl::cli::config_hash("rank", a);
  CHECK(h.size() == 16);
  CHECK(h == fsl::cli::config_hash("rank", b));
  CHECK(h != fsl::cli::config_hash("moebius", a));
  a["x"] = "3";
  CHECK(h != fsl::cli::config_hash("rank", a));
}

TEST_CASE("flags override the config file, which overrides defaults") {
  auto cfg = write_temp("fsl_test_cfg.txt", "k = 3\nsamples = 2000\n");
  auto r = run({"--config", cfg.string(), "indicators", "--samples", "1000"});
  REQUIRE(r.code == 0);
  auto d = r.doc();
  CHECK(d["command"] == "indicators");
  CHECK(d["config"]["k"] == "3");
  CHECK(d["config"]["samples"] == "1000");
  CHECK(d["config"]["group"] == "su2");
  CHECK(d["config_hash"].get<std::string>().size() == 16);
  CHECK(d["modules"].size() == 10);
  std::filesystem::remove(cfg);
}

TEST_CASE("unknown config keys and bad input exit with 2") {
  auto cfg = write_temp("fsl_test_bad_cfg.txt", "bogus = 1\n");
  CHECK(run({"--config", cfg.string(), "rank"}).code == 2);
  std::filesystem::remove(cfg);
  CHECK(run({"no-such-command"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"density", "--preset", "nope"}).code == 2);
  CHECK(run({"zeros", "--d", "5", "--T", "0"}).code == 2);
  CHECK(run({"zeros", "--d", "9"}).code == 2);
  CHECK(run({"rank", "--x", "abc"}).code == 2);
}

TEST_CASE("a failing zero-count audit exits with 3") {
  auto r = run({"zeros", "--d", "-7", "--T", "20", "--audit-slack", "-100", "--cache-dir", ""});
  CHECK(r.code == 3);
  CHECK(r.err.find("audit") != std::string::npos);
}

TEST_CASE("results do not depend on the worker count") {
  const std::vector<std::vector<std::string>> cases = {
      {"indicators", "--samples", "20000", "--k", "2"},
      {"rmt", "--family", "usp", "--n", "10", "--samples", "300"},
      {"vertical", "--family", "f2", "--p", "11", "--x", "20000"},
      {"rank", "--x", "300"},
      {"moebius", "--x", "20,40"},
      {"cubic", "--disc-max", "5000", "--prime-min", "5", "--prime-max", "60"},
  };
  for (const auto& args : cases) {
    auto with_workers = [&](const char* w) {
      std::vector<std::string> a = {"--workers", w, "--seed", "7"};
      a.insert(a.end(), args.begin(), args.end());
      return run(a);
    };
    auto a = with_workers("1"), b = with_workers("3");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK_MESSAGE(a.doc()["result"] == b.doc()["result"], args[0]);
  }
}

TEST_CASE("seed changes Monte Carlo output") {
  auto a = run({"--seed", "1", "indicators", "--samples", "5000"});
  auto b = run({"--seed", "2", "indicators", "--samples", "5000"});
  CHECK(a.doc()["result"] != b.doc()["result"]);
  CHECK(a.doc()["config_hash"] != b.doc()["config_hash"]);
}

TEST_CASE("CSV and JSON side outputs") {
  auto csv = std::filesystem::temp_directory_path() / "fsl_test_out.csv";
  auto js = std::filesystem::temp_directory_path() / "fsl_test_out.json";
  auto r = run({"--csv", csv.string(), "--json", js.string(), "cubic", "--disc-max", "2000", "--prime-min", "5",
                "--prime-max", "40"});
  REQUIRE(r.code == 0);
  std::ifstream is(csv);
  std::string first;
  std::getline(is, first);
  CHECK(first.rfind("#", 0) == 0);
  std::ifstream ij(js);
  std::stringstream buf;
  buf << ij.rdbuf();
  CHECK(json::parse(buf.str()) == r.doc());
  std::filesystem::remove(csv);
  std::filesystem::remove(js);
}

TEST_CASE("every subcommand answers --help") {
  for (const char* cmd : {"indicators", "vertical", "st-average", "rank", "root-numbers", "moebius", "zeros", "density",
                          "rmt", "universal-gl1", "cubic", "wd", "report"})
    CHECK_MESSAGE(run({cmd, "--help"}).code == 0, cmd);
}

TEST_CASE("weil-deligne data from a curve") {
  auto r = run({"wd", "--curve", "-7,6", "--p", "5"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["result"]["conductor"] == "1");
}

}
