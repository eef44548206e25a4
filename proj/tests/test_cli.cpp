#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = hcb::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

/// Row of a CSV whose first column equals key.
std::string row_for(const std::string& csv, const std::string& key) {
  for (const auto& line : lines(csv)) {
    if (line.rfind(key + ",", 0) == 0) return line;
  }
  return {};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "hcb_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("corr square-wave route") {
  const auto r = run({"corr", "--M", "2", "--a", "1/4", "--b", "1/4", "--phi", "xc-1/2", "--psi", "xc-1/2",
                      "--method", "squarewave", "--n-max", "64"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  CHECK(ls.front().rfind("n,value,method,err", 0) == 0);
  CHECK(row_for(r.out, "1").rfind("1,0.041666666666666", 0) == 0);
  CHECK(ls.back().rfind("# config=", 0) == 0);
  CHECK(ls.back().find("version=0.1.0") != std::string::npos);
  CHECK(ls.size() == 67);
}

TEST_CASE("corr exact mode carries rationals") {
  const auto r = run({"corr", "--phi", "staircase-4", "--psi", "staircase-4", "--n-max", "2", "--mode", "exact"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).front().find("exact") != std::string::npos);
  CHECK(row_for(r.out, "0").find("5/16") != std::string::npos);
}

TEST_CASE("ruin-transition") {
  const auto r = run({"ruin-transition", "--l", "2", "--lp", "2", "--n", "4"});
  REQUIRE(r.code == 0);
  CHECK(row_for(r.out, "4").rfind("4,2,2,0.3125,", 0) == 0);
}

TEST_CASE("ruin") {
  const auto r = run({"ruin", "--l", "1", "--n-max", "2", "--mode", "exact"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("2,1,1/4") != std::string::npos);
}

TEST_CASE("orbit") {
  const auto r = run({"orbit", "--x", "0.1,0.3,0.5", "--n", "2", "--mode", "exact"});
  REQUIRE(r.code == 0);
  CHECK(row_for(r.out, "2").rfind("2,3/5,23/40,1/8", 0) == 0);
  CHECK(row_for(r.out, "0").find("alpha1") != std::string::npos);
}

TEST_CASE("apply-op and slope read files") {
  const auto in = temp_file("chi.json", R"({"breakpoints": ["0", "1/2", "1"], "values": ["1", "-1"]})");
  const auto r = run({"apply-op", "--in", in.string(), "--op", "p0", "--n", "2"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.contains("breakpoints"));

  const auto corr = run({"corr", "--n-max", "256"});
  REQUIRE(corr.code == 0);
  const auto csv = temp_file("corr.csv", corr.out);
  const auto s = run({"slope", "--in", csv.string(), "--n-lo", "32", "--n-hi", "256"});
  REQUIRE(s.code == 0);
  const auto fit = nlohmann::json::parse(s.out);
  CHECK(fit["slope"].get<double>() < -1.3);
  CHECK(fit["slope"].get<double>() > -1.7);
  CHECK(fit["plateau_tail"].size() == 5);
}

TEST_CASE("Monte Carlo output is independent of threads") {
  const std::vector<std::string> base{"corr",   "--method", "mc",     "--n-list", "0,2", "--samples",
                                      "20000",  "--seed",   "17",     "--batches", "10"};
  auto one = base;
  one.insert(one.end(), {"--threads", "1"});
  auto two = base;
  two.insert(two.end(), {"--threads", "2"});
  const auto a = run(one), b = run(two);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"corr", "--method", "mc"}).code == 2);
  CHECK(run({"corr", "--method", "mc", "--seed", "1", "--mode", "exact"}).code == 2);
  CHECK(run({"corr", "--phi", "xu*xc"}).code == 2);
  CHECK(run({"orbit"}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"corr", "--a", "1/2"}).code == 2);
  CHECK(run({"apply-op", "--in", "/nonexistent/file.json", "--op", "p0"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("verify-identities") {
  const auto r = run({"verify-identities", "--n", "2", "--count", "2"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.is_object());
}

TEST_CASE("footer hash depends on the configuration only") {
  const auto a = run({"ruin", "--n-max", "3"});
  const auto b = run({"ruin", "--n-max", "3"});
  const auto c = run({"ruin", "--n-max", "4"});
  CHECK(lines(a.out).back() == lines(b.out).back());
  CHECK(lines(a.out).back() != lines(c.out).back());
}
