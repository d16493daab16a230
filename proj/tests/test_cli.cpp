// Drives the rdl_cli binary end to end and checks the tables it writes.

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "rdl/rdl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "rdl_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string config(const std::string& name) { return std::string(RDL_CONFIG_DIR) + "/" + name + ".json"; }

std::string out(const std::string& name) { return (work_dir() / name).string(); }

int run(const std::string& args) {
  const std::string cmd = std::string(RDL_CLI_PATH) + " " + args + " >" + out("stdout.txt") + " 2>" + out("stderr.txt");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_config(const std::string& name, const std::string& dest, const std::string& extra = "") {
  return run("--config " + config(name) + " --out " + out(dest) + " " + extra);
}

std::string write_config(const std::string& name, const json& j) {
  const auto p = out(name + ".json");
  std::ofstream(p) << j.dump();
  return p;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Csv {
  json config;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw std::runtime_error("no column " + name);
  }
  double num(std::size_t row, const std::string& name) const { return std::strtod(rows[row][col(name)].c_str(), nullptr); }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

Csv read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("missing " + path);
  Csv csv;
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "# schema: v1");
  std::getline(is, line);
  EXPECT_EQ(line.rfind("# config: ", 0), 0u);
  csv.config = json::parse(line.substr(10));
  std::getline(is, line);
  csv.columns = split(line);
  while (std::getline(is, line)) {
    csv.rows.push_back(split(line));
    EXPECT_EQ(csv.rows.back().size(), csv.columns.size());
  }
  return csv;
}

}  // namespace

TEST(Cli, Fig2Tables) {
  ASSERT_EQ(run_config("fig2", "fig2", "--seed 3"), 0);
  const auto d = read_csv(out("fig2_density.csv"));
  EXPECT_EQ(d.config.at("seed"), 3);
  EXPECT_EQ(d.config.at("command"), "fig2");
  const double h = d.num(1, "alpha_im") - d.num(0, "alpha_im");
  for (const char* c : {"p_true", "p_ea", "p_vh"}) {
    double mass = 0.0;
    for (std::size_t i = 0; i < d.rows.size(); ++i) mass += d.num(i, c) * h * h;
    EXPECT_NEAR(mass, 1.0, 1e-4) << c;
  }
  const auto ch = read_csv(out("fig2_charfn.csv"));
  for (std::size_t i = 0; i < ch.rows.size(); ++i) {
    const double b2 = std::pow(ch.num(i, "beta_re"), 2) + std::pow(ch.num(i, "beta_im"), 2);
    const double lam = ch.num(i, "lambda_re");
    EXPECT_NEAR(ch.num(i, "lambda_ea_re"), lam * std::exp(-std::exp(-4.0) * b2), 1e-15);
    EXPECT_NEAR(ch.num(i, "lambda_vh_re"), lam * std::exp(-b2), 1e-15);
  }
  const auto mc = read_csv(out("fig2_mc.csv"));
  for (std::size_t i = 0; i < mc.rows.size(); ++i) {
    const double lam = mc.num(i, "lambda_re");
    EXPECT_LE(std::abs(mc.num(i, "ea_hat_re") - lam), 5 * mc.num(i, "ea_se") + 1e-12) << i;
    EXPECT_LE(std::abs(mc.num(i, "vh_hat_re") - lam), 5 * mc.num(i, "vh_se") + 1e-12) << i;
  }
}

TEST(Cli, AdvantageValidity) {
  ASSERT_EQ(run_config("advantage", "adv.csv"), 0);
  const auto a = read_csv(out("adv.csv"));
  EXPECT_EQ(a.columns, rdl::bounds_columns());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i][a.col("valid_flags")], "0");
    EXPECT_NEAR(a.num(i, "log10_ratio"), a.num(i, "log10_N_lower") - a.num(i, "log10_N_upper"), 1e-12);
  }

  ASSERT_EQ(run_config("advantage_sigma", "adv_sigma.csv"), 0);
  const auto s = read_csv(out("adv_sigma.csv"));
  for (std::size_t i = 0; i < s.rows.size(); ++i)
    EXPECT_EQ(s.rows[i][s.col("valid_flags")], s.num(i, "kappa") == 3.0 ? "4" : "0") << i;
  EXPECT_EQ(run_config("advantage_sigma", "strict.csv", "--strict"), 3);
  EXPECT_FALSE(fs::exists(out("strict.csv")));

  // r = inf: the upper bound loses its n dependence.
  const auto p = write_config("adv_inf", {{"command", "advantage"}, {"n", {8, 20, 60}}, {"r", {"inf"}}, {"scheme", json::object()}});
  ASSERT_EQ(run("--config " + p + " --out " + out("adv_inf.csv")), 0);
  const auto inf = read_csv(out("adv_inf.csv"));
  const double expected = std::log10(8.0 * std::log(12.0) / 0.04);
  for (std::size_t i = 0; i < inf.rows.size(); ++i) EXPECT_NEAR(inf.num(i, "log10_N_upper"), expected, 1e-12);
}

TEST(Cli, ComplexityTailNoise) {
  ASSERT_EQ(run_config("complexity", "cx.csv", "--strict"), 0);
  const auto cx = read_csv(out("cx.csv"));
  for (std::size_t i = 0; i < cx.rows.size(); ++i) {
    EXPECT_LE(cx.num(i, "failure_rate"), cx.num(i, "delta"));
    EXPECT_EQ(static_cast<std::uint64_t>(cx.num(i, "N")),
              rdl::hoeffding_N(0.2, 1.0 / 3.0, cx.num(i, "r_eff"), cx.num(i, "beta_norm_sq")));
  }

  ASSERT_EQ(run_config("tail", "tail.csv", "--strict"), 0);
  const auto t = read_csv(out("tail.csv"));
  EXPECT_GE(t.rows.size(), 35u);
  EXPECT_EQ(t.rows.front()[0], "8");
  EXPECT_EQ(t.rows.back()[0], "14000");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_LE(t.num(i, "tail"), 0.5);
    EXPECT_LE(t.num(i, "tail"), t.num(i, "bound"));
  }

  ASSERT_EQ(run_config("noise", "noise.csv"), 0);
  const auto n = read_csv(out("noise.csv"));
  EXPECT_EQ(n.columns, rdl::noise_columns());
  std::size_t clean = 0;
  for (std::size_t i = 0; i < n.rows.size(); ++i) {
    if (n.num(i, "delta_deg") == 0.0 && n.num(i, "theta_deg") == 0.0) {
      ++clean;
      const double g = rdl::noiseless_g_sq(n.num(i, "beta_norm_sq"), 1.5);
      EXPECT_NEAR(n.num(i, "g_sq"), g, 1e-13 * g);
    }
    EXPECT_NEAR(n.num(i, "g_sq") * n.num(i, "overhead"), 1.0, 1e-12);
  }
  EXPECT_EQ(clean, 2u * 14u);  // one noiseless row per shape and |β|²
}

TEST(Cli, GameFormats) {
  ASSERT_EQ(run_config("game", "game.csv"), 0);
  const auto g = read_csv(out("game.csv"));
  ASSERT_EQ(g.rows.size(), 1u);
  EXPECT_EQ(g.rows[0][g.col("N")], "463");
  EXPECT_GE(g.num(0, "success_rate"), 0.58 - 3 * std::sqrt(0.58 * 0.42 / 400));
  ASSERT_EQ(run_config("game", "game.json", "--format json"), 0);
  const auto j = json::parse(slurp(out("game.json")));
  for (const char* k : {"schema", "config", "rounds", "N", "success_rate", "ci_low", "ci_high", "in_range_fraction"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j.at("success_rate").get<double>(), g.num(0, "success_rate"));
}

TEST(Cli, SampleThenEstimate) {
  ASSERT_EQ(run_config("sample", "outcomes.bin", "--seed 9"), 0);
  const auto s = rdl::read_outcomes(out("outcomes.bin"));
  EXPECT_EQ(s.size(), 5000u);
  EXPECT_EQ(s.seed, 9u);
  EXPECT_EQ(s.chunk_size, 1000u);
  ASSERT_EQ(run_config("estimate", "est.csv", "--input " + out("outcomes.bin")), 0);
  const auto e = read_csv(out("est.csv"));
  ASSERT_EQ(e.rows.size(), 3u);
  EXPECT_EQ(e.config.at("outcome_header").at("N"), 5000);
  const auto direct = rdl::estimate_lambda(s, rdl::ComplexVec{rdl::cplx{0.5, 0.1}, rdl::cplx{-0.2, 0.3}});
  EXPECT_EQ(e.num(0, "lambda_re"), direct.lambda_hat.real());
  EXPECT_EQ(e.num(0, "lambda_im"), direct.lambda_hat.imag());
  EXPECT_EQ(e.num(1, "lambda_re"), 1.0);
}

TEST(Cli, ByteIdenticalAcrossThreadCounts) {
  for (const char* name : {"fig2", "advantage", "complexity", "tail", "noise", "game", "sample"}) {
    ASSERT_EQ(run_config(name, std::string(name) + "_t1", "--threads 1"), 0) << name;
    ASSERT_EQ(run_config(name, std::string(name) + "_t3", "--threads 3"), 0) << name;
    if (std::string(name) == "fig2") {
      for (const char* part : {"_density.csv", "_charfn.csv", "_mc.csv"})
        EXPECT_EQ(slurp(out(std::string("fig2_t1") + part)), slurp(out(std::string("fig2_t3") + part))) << part;
    } else {
      EXPECT_EQ(slurp(out(std::string(name) + "_t1")), slurp(out(std::string(name) + "_t3"))) << name;
    }
  }
  ASSERT_EQ(run_config("estimate", "est_t1", "--threads 1 --input " + out("sample_t1")), 0);
  ASSERT_EQ(run_config("estimate", "est_t3", "--threads 3 --input " + out("sample_t3")), 0);
  EXPECT_EQ(slurp(out("est_t1")), slurp(out("est_t3")));
  // And across repeated runs.
  ASSERT_EQ(run_config("game", "game_again", "--threads 2"), 0);
  EXPECT_EQ(slurp(out("game_t1")), slurp(out("game_again")));
}

TEST(Cli, SeedSelectsStream) {
  ASSERT_EQ(run_config("game", "seed_a", "--seed 5"), 0);
  ASSERT_EQ(run_config("game", "seed_b", "--seed 6"), 0);
  EXPECT_NE(slurp(out("seed_a")), slurp(out("seed_b")));
  const auto p = write_config("seeded", {{"command", "game"}, {"N", 50}, {"rounds", 200}, {"seed", 5}});
  ASSERT_EQ(run("--config " + p + " --out " + out("seed_c")), 0);
  ASSERT_EQ(run("--config " + p + " --seed 5 --out " + out("seed_d")), 0);
  EXPECT_EQ(slurp(out("seed_c")), slurp(out("seed_d")));
}

TEST(Cli, ExitCodes) {
  for (const char* bad : {"bad_field", "bad_value", "bad_json", "bad_command"})
    EXPECT_EQ(run_config(bad, "bad.csv"), 2) << bad;
  EXPECT_EQ(run("--config " + config("tail")), 2);  // --out missing
  EXPECT_EQ(run("--config " + config("tail") + " --out " + out("x") + " --format xml"), 2);
  EXPECT_EQ(run("--config /nonexistent.json --out " + out("x")), 2);
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run_config("estimate", "est_missing", "--input " + out("no_such_file")), 2);
  const auto p = write_config("bad_path", {{"command", "game"}, {"scheme", {{"T_a", 1.5}}}});
  EXPECT_EQ(run("--config " + p + " --out " + out("x")), 2);
  EXPECT_NE(slurp(out("stderr.txt")).find("config.scheme.T_a"), std::string::npos);
  // A Hoeffding N that cannot be represented is a numeric error.
  const auto big = write_config("big_n", {{"command", "complexity"},
                                          {"channel", {{"preset", "depolarizing"}, {"n", 1}, {"sigma", 0.3}}},
                                          {"scheme", {{"r", 0.0}}},
                                          {"beta_norm_sq", {40.0}}});
  EXPECT_EQ(run("--config " + big + " --out " + out("x")), 3);
}
