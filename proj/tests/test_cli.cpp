#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "convsdf/field_io.hpp"
#include "oracles.hpp"

using namespace convsdf;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("convsdf_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) {
    fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    std::string cmd = std::string("\"") + CONVSDF_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                      err.string() + "\"";
    int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  fs::path write(const std::string& name, const std::string& text) {
    fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

bool single_error_line(const std::string& err, const std::string& kind) {
  return err.rfind("error: " + kind + ": ", 0) == 0 && err.find('\n') == err.size() - 1;
}

}  // namespace

TEST_F(Cli, UsageErrorsExitTwo) {
  auto r = run("dt --min 0 0 --max 1 1 --spacing 0.1");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(single_error_line(r.err, "usage")) << r.err;
  r = run("");
  EXPECT_EQ(r.code, 2);
  r = run("dt --bogus");
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, ValidationErrorsExitTwo) {
  auto pts = write("p.csv", "0.5,0.5\n");
  auto r = run("--out " + (dir_ / "o").string() + " dt --min 0 0 --max 1 1 --spacing 0.1 --tau -1 --points " +
               pts.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(single_error_line(r.err, "validation")) << r.err;
  auto bad = write("bad.csv", "0.5,0.5\n0.1,zz\n");
  r = run("dt --min 0 0 --max 1 1 --spacing 0.1 --points " + bad.string());
  EXPECT_EQ(r.code, 2);
  r = run("experiment example9");
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, PrecisionErrorExitsThree) {
  auto pts = write("p.csv", "0,0\n");
  auto r = run("--out " + (dir_ / "o").string() +
               " dt --min 0 0 --max 1 1 --spacing 0.015625 --tau 1e-3 --precision f64 --points " + pts.string());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("error: precision: "), std::string::npos) << r.err;
  EXPECT_EQ(r.err.back(), '\n');
}

TEST_F(Cli, SingleSourceFftMatchesExact) {
  auto pts = write("p.csv", "x,y\n0.25,0.5\n");
  std::string grid = " --min 0 0 --max 1 1 --spacing 0.03125 --tau 1e-2 --points " + pts.string();
  ASSERT_EQ(run("--out " + (dir_ / "e").string() + " dt --method exact" + grid).code, 0);
  ASSERT_EQ(run("--out " + (dir_ / "f").string() + " dt --method fft --precision big:256" + grid).code, 0);
  auto r = read_field((dir_ / "e" / "R.eik").string());
  auto s = read_field((dir_ / "f" / "S.eik").string());
  ASSERT_TRUE(r.field.grid() == s.field.grid());
  for (std::size_t i = 0; i < r.field.size(); ++i) EXPECT_NEAR(s.field[i], r.field[i], 1e-12);
  EXPECT_EQ(s.header["name"], "S");
  EXPECT_EQ(s.header["precision"], "big:256");
}

TEST_F(Cli, ConfigFileAndInfo) {
  auto pts = write("p.csv", "0.2,0.2\n0.7,0.4\n");
  auto cfg = write("c.json", nlohmann::json{{"out", (dir_ / "c").string()},
                                            {"dt",
                                             {{"min", {0, 0}},
                                              {"max", {1, 1}},
                                              {"counts", {17, 17}},
                                              {"tau", 5e-2},
                                              {"method", "direct"},
                                              {"points", pts.string()}}}}
                                 .dump());
  auto r = run("--config " + cfg.string() + " dt");
  ASSERT_EQ(r.code, 0) << r.err;
  auto f = read_field((dir_ / "c" / "S.eik").string());
  EXPECT_EQ(f.field.grid().counts(), (std::vector<std::size_t>{17, 17}));
  r = run("info " + (dir_ / "c" / "S.eik").string());
  ASSERT_EQ(r.code, 0);
  auto h = nlohmann::json::parse(r.out);
  EXPECT_EQ(h["name"], "S");
  EXPECT_EQ(h["grid"]["counts"][0], 17);
}

TEST_F(Cli, SignMatchesRayCast) {
  std::mt19937_64 rng(5);
  GridSpec g({0.0, 0.0}, 1.0 / 64, {65, 65});
  auto poly = oracle::star_polygon(rng, {0.5, 0.5, 0}, 0.15, 0.4, 0.5 / 64);
  std::ostringstream csv;
  csv.precision(17);
  for (const auto& p : poly) csv << p[0] << ',' << p[1] << '\n';
  auto curve = write("curve.csv", csv.str());
  auto r = run("--out " + (dir_ / "s").string() + " sign --min 0 0 --max 1 1 --spacing 0.015625 --curve " +
               curve.string());
  ASSERT_EQ(r.code, 0) << r.err;
  auto inside = read_field((dir_ / "s" / "inside.eik").string());
  auto summary = nlohmann::json::parse(slurp(dir_ / "s" / "sign.json"));
  std::size_t count = 0, band = 0, agree = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    bool in = inside.field[i] > 0.5;
    count += in;
    Point x = g.position(i);
    if (oracle::boundary_distance(poly, x) <= g.spacing()) continue;
    ++band;
    agree += in == oracle::inside_polygon(poly, x);
  }
  EXPECT_EQ(summary["interior_nodes"], count);
  EXPECT_GE(double(agree) / double(band), 0.999);
  EXPECT_TRUE(fs::exists(dir_ / "s" / "mu.eik"));
  EXPECT_TRUE(fs::exists(dir_ / "s" / "inside.csv"));
}

TEST_F(Cli, ExperimentIsDeterministic) {
  std::string args = " experiment example5 --seed 3";
  ASSERT_EQ(run("--out " + (dir_ / "a").string() + args).code, 0);
  ASSERT_EQ(run("--out " + (dir_ / "b").string() + args).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "example5.json"), slurp(dir_ / "b" / "example5.json"));
  EXPECT_EQ(slurp(dir_ / "a" / "example5.csv"), slurp(dir_ / "b" / "example5.csv"));
  auto j = nlohmann::json::parse(slurp(dir_ / "a" / "example5.json"));
  EXPECT_EQ(j["config"]["seed"], 3);
  EXPECT_EQ(j["results"].size(), 3u);
}
