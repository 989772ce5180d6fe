#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "mrhet/gcq.hpp"
#include "mrhet/summary_data.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using testutil::TempDir;
using testutil::write_file;

namespace {

const char* cli_path() { return std::getenv("MRHET_CLI"); }

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string demo_tsv() {
  std::string s = "snp\tbeta_x_1\tse_x_1\tbeta_y\tse_y\n";
  mrhet::Rng rng(2718);
  for (int i = 0; i < 15; ++i) {
    const double bx = 0.5 + 0.1 * i;
    const double sy = 0.08;
    double by = 0.5 * bx + 0.03 * rng.normal();
    if (i == 12) by += 2.0;  // one clear outlier
    char buf[160];
    std::snprintf(buf, sizeof(buf), "rs%d\t%.6f\t0.010000\t%.6f\t%.6f\n", 1000 + i, bx, by, sy);
    s += buf;
  }
  return s;
}

// Reads a CSV produced by the tool, skipping the manifest comment line.
std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

#define REQUIRE_CLI()                                    \
  if (!cli_path()) {                                     \
    GTEST_SKIP() << "MRHET_CLI not set; CLI tests skipped"; \
  }

TEST(Cli, MissingDataFlagExitsTwoWithUsage) {
  REQUIRE_CLI();
  TempDir tmp;
  const auto err = tmp.path("err.txt");
  const int code = run(std::string(cli_path()) + " analyze --exposures 1 --out " + tmp.path("o").string() +
                       " 2> " + err.string());
  EXPECT_EQ(code, 2);
  const auto text = testutil::read_file(err);
  EXPECT_NE(text.find("--data"), std::string::npos);
  EXPECT_NE(text.find("Usage"), std::string::npos);
}

TEST(Cli, UnknownPresetExitsTwo) {
  REQUIRE_CLI();
  TempDir tmp;
  const int code = run(std::string(cli_path()) + " simulate --preset bogus --out " + tmp.path("o").string() +
                       " 2> /dev/null");
  EXPECT_EQ(code, 2);
}

TEST(Cli, InvalidDataExitsTwo) {
  REQUIRE_CLI();
  TempDir tmp;
  write_file(tmp.path("bad.tsv"), "snp\tbeta_x_1\tse_x_1\tbeta_y\tse_y\nrs1\t1\t0\t1\t0.1\n");
  const int code = run(std::string(cli_path()) + " analyze --data " + tmp.path("bad.tsv").string() +
                       " --exposures 1 --method full --out " + tmp.path("o").string() + " 2> " +
                       tmp.path("err.txt").string());
  EXPECT_EQ(code, 2);
  EXPECT_NE(testutil::read_file(tmp.path("err.txt")).find("NonPositiveSE"), std::string::npos);
}

TEST(Cli, CollinearExposuresExitThree) {
  REQUIRE_CLI();
  TempDir tmp;
  std::string tsv = "snp\tbeta_x_1\tbeta_x_2\tse_x_1\tse_x_2\tbeta_y\tse_y\n";
  for (int i = 0; i < 6; ++i) {
    const double b = 0.5 + i;
    tsv += "rs" + std::to_string(i) + "\t" + std::to_string(b) + "\t" + std::to_string(2 * b) +
           "\t0.1\t0.1\t1.0\t0.2\n";
  }
  write_file(tmp.path("col.tsv"), tsv);
  const int code = run(std::string(cli_path()) + " analyze --data " + tmp.path("col.tsv").string() +
                       " --exposures 2 --method full --out " + tmp.path("o").string() + " 2> " +
                       tmp.path("err.txt").string());
  EXPECT_EQ(code, 3);
  EXPECT_NE(testutil::read_file(tmp.path("err.txt")).find("RankDeficient"), std::string::npos);
}

TEST(Cli, AnalyzeAllMatchesLibraryAndWritesOutputs) {
  REQUIRE_CLI();
  TempDir tmp;
  write_file(tmp.path("demo.tsv"), demo_tsv());
  const auto out = tmp.path("out");
  const int code = run(std::string(cli_path()) + " analyze --data " + tmp.path("demo.tsv").string() +
                       " --exposures 1 --method all --seed 11 --out " + out.string() + " > /dev/null");
  ASSERT_EQ(code, 0);
  EXPECT_TRUE(fs::exists(out / "estimates.csv"));
  EXPECT_TRUE(fs::exists(out / "outliers.csv"));
  EXPECT_TRUE(fs::exists(out / "radial_plot.csv"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));

  const auto data = mrhet::load_dataset(tmp.path("demo.tsv"), 1);
  const auto gcq = mrhet::detect_outliers_gcq(data);
  const auto rows = read_csv(out / "estimates.csv");
  ASSERT_GE(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "method");
  bool found_gcq = false;
  for (const auto& r : rows) {
    if (r[0] == "gcq") {
      found_gcq = true;
      EXPECT_NEAR(std::stod(r[2]), gcq.refit.theta(0), 1e-9);
      EXPECT_NEAR(std::stod(r[3]), gcq.refit.se(0), 1e-9);
    }
  }
  EXPECT_TRUE(found_gcq);

  // flagged outlier appears in outliers.csv with flag 1 for the standard method
  const auto orows = read_csv(out / "outliers.csv");
  bool rs1012_flagged = false;
  for (const auto& r : orows)
    if (r[0] == "standard" && r[1] == "rs1012" && r[4] == "1") rs1012_flagged = true;
  EXPECT_TRUE(rs1012_flagged);
}

TEST(Cli, SimulateQuickIsByteDeterministic) {
  REQUIRE_CLI();
  TempDir tmp;
  const std::string base = std::string(cli_path()) + " simulate --preset uni10 --quick --seed 7 --methods full,standard,gcq";
  ASSERT_EQ(run(base + " --threads 1 --out " + tmp.path("a").string() + " > /dev/null"), 0);
  ASSERT_EQ(run(base + " --threads 1 --out " + tmp.path("b").string() + " > /dev/null"), 0);
  ASSERT_EQ(run(base + " --threads 4 --out " + tmp.path("c").string() + " > /dev/null"), 0);
  const auto a = testutil::read_file(tmp.path("a") / "metrics.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, testutil::read_file(tmp.path("b") / "metrics.csv"));
  EXPECT_EQ(a, testutil::read_file(tmp.path("c") / "metrics.csv"));
}

TEST(Cli, ConfigFileDrivesSimulation) {
  REQUIRE_CLI();
  TempDir tmp;
  write_file(tmp.path("cfg.txt"),
             "# tiny directional setting\n"
             "n_individuals = 2000\n"
             "n_snps = 30\n"
             "n_exposures = 1\n"
             "outlier_fraction = 0.1\n"
             "causal_effects = 0.2\n"
             "outlier_dist = uniform\n"
             "outlier_param1 = 1.8\n"
             "outlier_param2 = 3.5\n"
             "n_runs = 4\n"
             "seed = 5\n"
             "methods = full, gcq\n");
  const auto out = tmp.path("out");
  ASSERT_EQ(run(std::string(cli_path()) + " simulate --config " + tmp.path("cfg.txt").string() + " --out " +
                out.string() + " > /dev/null"),
            0);
  const auto rows = read_csv(out / "metrics.csv");
  ASSERT_FALSE(rows.empty());
  ASSERT_EQ(rows[0].size(), 3u);  // measure, full, gcq
  EXPECT_EQ(rows[0][1], "full");
  EXPECT_EQ(rows[0][2], "gcq");
  const auto manifest = testutil::read_file(out / "manifest.json");
  EXPECT_NE(manifest.find("\"seed\": 5"), std::string::npos);

  write_file(tmp.path("bad.txt"), "nonsense_key = 1\n");
  EXPECT_EQ(run(std::string(cli_path()) + " simulate --config " + tmp.path("bad.txt").string() + " --out " +
                tmp.path("o2").string() + " 2> /dev/null"),
            2);
}
