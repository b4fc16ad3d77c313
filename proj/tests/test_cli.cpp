#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

using json = nlohmann::json;

namespace {

std::string binary() {
  const char* env = std::getenv("MASALAB_BIN");
  return env ? env : "./masalab";
}

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + binary() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf;
  while (std::size_t got = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), got);
  const int rc = pclose(pipe);
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = "/tmp/masalab_cli_test_" + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("rankone build staircase matches the recurrence") {
  const auto r = run("rankone build --preset staircase -K 3");
  CHECK(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["height"] == 27);
}

TEST_CASE("group st on the free group certifies an empty exceptional set") {
  const auto model = write_temp("f2.json", R"({"kind":"free","rank":2,"marked":["a"]})");
  const auto r = run("group st --in " + model + " --F 'b;b^-1' --radius 8 --ebound 8");
  CHECK(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["verdict"] == "holds_with_E");
  CHECK(j["E"].empty());
}

TEST_CASE("measure wiener recovers the atom energy") {
  json mu;
  mu["atoms"] = json::array({json::array({"0/1", 0.5})});
  mu["density"] = {{"grid", 1024}, {"samples", std::vector<double>(1024, 0.5)}};
  const auto path = write_temp("mix.json", mu.dump());
  const auto r = run("measure wiener --in " + path + " --horizon 10000");
  CHECK(r.status == 0);
  const json j = json::parse(r.out);
  const double terminal = j["terminal"].get<double>();
  CHECK(std::abs(terminal - 0.25) < 0.0025);
}

TEST_CASE("identical config yields byte-identical output") {
  const auto model = write_temp("f2.json", R"({"kind":"free","rank":2,"marked":["a"]})");
  const std::string cmd = "masa summability --in " + model + " --xi1 u_b --xi2 u_b --v a --seed 7";
  const auto r1 = run(cmd);
  const auto r2 = run(cmd);
  CHECK(r1.status == 0);
  CHECK(r1.out == r2.out);

  const auto c1 = run("rankone correlate --preset staircase -K 5 --horizon 20 --mc 5000 --seed 3");
  const auto c2 = run("rankone correlate --preset staircase -K 5 --horizon 20 --mc 5000 --seed 3");
  CHECK(c1.out == c2.out);
}

TEST_CASE("csv output is emitted for tabular subcommands") {
  const auto r = run("rankone correlate --preset staircase -K 4 --horizon 10 --format csv");
  CHECK(r.status == 0);
  CHECK(r.out.find("m,c") != std::string::npos);
  CHECK(r.out.find('.') != std::string::npos);
  CHECK(r.out.find(',') != std::string::npos);
}

TEST_CASE("output lands in --out files") {
  const std::string path = "/tmp/masalab_cli_test_out.json";
  std::remove(path.c_str());
  const auto r = run("rankone build --preset staircase -K 2 --out " + path);
  CHECK(r.status == 0);
  std::ifstream in(path);
  json j;
  in >> j;
  CHECK(j["height"] == 7);
}

TEST_CASE("precondition violations exit 1") {
  const auto model = write_temp("f2.json", R"({"kind":"free","rank":2,"marked":["a"]})");
  // F intersects the marked subgroup
  CHECK(run("group st --in " + model + " --F 'a' --radius 4").status == 1);
  // malformed input file
  const auto broken = write_temp("broken.json", "{not json");
  CHECK(run("group st --in " + broken + " --F 'b' --radius 4").status == 1);
  // missing input file
  CHECK(run("measure wiener --in /tmp/masalab_does_not_exist.json").status == 1);
}

TEST_CASE("budget exhaustion exits 2") {
  const auto r = run("rankone build --preset staircase -K 8", "SML_BUDGET=1000 ");
  CHECK(r.status == 2);
  const auto model = write_temp("f2.json", R"({"kind":"free","rank":2,"marked":["a"]})");
  const auto ball = run("group icc --in " + model + " --radius 12", "SML_BUDGET=500 ");
  CHECK(ball.status == 2);
}

TEST_CASE("json inputs round trip through the model printer") {
  const auto model = write_temp(
      "sd.json", R"({"kind":"semidirect","matrix":[[2,1],[1,1]],"marked":"acting_Z"})");
  const auto r = run("group kg --in " + model + " --g '((1,0),0)' --radius 4");
  CHECK(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j.contains("pairs"));
}
