#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(OAMKIT_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const char* name) { return std::string(OAMKIT_DATA_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Value of column `col` in the CSV row whose first field is `key`.
double cell(const std::string& csv, const std::string& key, int col) {
  std::stringstream rows(csv);
  std::string line;
  while (std::getline(rows, line)) {
    std::stringstream cells(line);
    std::string c;
    std::getline(cells, c, ',');
    if (c != key) continue;
    for (int i = 0; i < col; ++i) std::getline(cells, c, ',');
    return std::stod(c);
  }
  return NAN;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("oamkit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, AnalyzeEqualPopulations) {
  const auto r = run("analyze --pancake " + data("equal_thirds.json"));
  ASSERT_EQ(r.code, 0);
  for (const char* n : {"0", "1", "2"}) EXPECT_NEAR(cell(r.out, n, 2), 1.0 / 3.0, 1e-12);
  EXPECT_NE(r.out.find("# grid=512,512,"), std::string::npos);
  EXPECT_NE(r.out.find("# nmax="), std::string::npos);
}

TEST_F(Cli, AnalyzeSuppressedP1) {
  const auto r = run("analyze --pancake " + data("p1_suppressed.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_LT(cell(r.out, "1", 2), 1e-12);
}

TEST_F(Cli, AnalyzeGaussian) {
  const auto r = run("analyze --pancake " + data("gaussian.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_DOUBLE_EQ(cell(r.out, "0", 2), 1.0);
  EXPECT_TRUE(std::isnan(cell(r.out, "1", 2)));
}

TEST_F(Cli, AnalyzeCrossCheckFailsOnMismatchedField) {
  ASSERT_EQ(run("render --pancake " + data("p0_suppressed.json") + " --out " + dir.string()).code, 0);
  const auto field = (dir / "field.oamf").string();
  EXPECT_EQ(run("analyze --pancake " + data("p0_suppressed.json") + " --field " + field).code, 0);
  EXPECT_EQ(run("analyze --pancake " + data("equal_thirds.json") + " --field " + field).code, 3);
}

TEST_F(Cli, AnalyzeFieldFile) {
  ASSERT_EQ(run("render --necklace " + data("necklace_d0.json") + " --out " + dir.string()).code, 0);
  const auto r = run("analyze --field " + (dir / "field.oamf").string() + " --nmax 4");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(cell(r.out, "1", 2), 1.0, 1e-9);
}

TEST_F(Cli, NecklaceSuite) {
  const auto r = run("necklace --necklace " + data("necklace_d1.json") + " --suite --out " + dir.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(cell(r.out, "0", 1), 1.0);
  EXPECT_EQ(cell(r.out, "1", 1), 1.0);
  EXPECT_EQ(cell(r.out, "2", 1), 3.0);
  EXPECT_EQ(cell(r.out, "6", 1), 3.0);
  for (const char* d : {"0", "1", "2", "6"}) {
    EXPECT_EQ(cell(r.out, d, 2), 1.0);
    EXPECT_LT(cell(r.out, d, 3), 1e-10);
  }
  EXPECT_TRUE(fs::exists(dir / "d2w0_dislocations.csv"));
  EXPECT_TRUE(fs::exists(dir / "d6w0_spectrum.csv"));
}

TEST_F(Cli, DesignEqualTarget) {
  const auto out = (dir / "design.json").string();
  ASSERT_EQ(run("design --target " + data("target_equal_n2.json") + " --seed 4 --out " + out).code, 0);
  const auto text = slurp(out);
  EXPECT_NE(text.find("\"converged\": true"), std::string::npos);
  EXPECT_NE(text.find("\"run\""), std::string::npos);
}

TEST_F(Cli, DesignFailsWhenTooFewEvaluations) {
  EXPECT_EQ(run("design --target " + data("target_uniform_n10.json") + " --starts 1 --max-iter 30").code, 3);
}

TEST_F(Cli, DesignRejectsBadTarget) {
  std::ofstream(dir / "bad.json") << R"({"N": 2, "weights": {"0": 0.5, "1": 0.6}})";
  EXPECT_EQ(run("design --target " + (dir / "bad.json").string()).code, 2);
}

TEST_F(Cli, RenderIsDeterministic) {
  const auto a = dir / "a", b = dir / "b";
  ASSERT_EQ(run("render --pancake " + data("n10_uniform.json") + " --what amplitude --grid 128,128,12 --out " + a.string()).code, 0);
  ASSERT_EQ(run("render --pancake " + data("n10_uniform.json") + " --what amplitude --grid 128,128,12 --out " + b.string()).code, 0);
  EXPECT_EQ(slurp(a / "amplitude.csv"), slurp(b / "amplitude.csv"));
  EXPECT_EQ(slurp(a / "field.oamf"), slurp(b / "field.oamf"));
}

TEST_F(Cli, RenderRejectsUnknownQuantity) {
  EXPECT_EQ(run("render --pancake " + data("gaussian.json") + " --what intensity --out " + dir.string()).code, 2);
}

TEST_F(Cli, RenderRejectsClippingGrid) {
  EXPECT_EQ(run("render --pancake " + data("p2_suppressed.json") + " --grid 64,64,4 --out " + dir.string()).code, 2);
}

TEST_F(Cli, ScanFindsP4Minimum) {
  const auto r = run("scan --pancake " + data("n10_scan.json") + " --index 0 --steps 720");
  ASSERT_EQ(r.code, 0);
  std::stringstream rows(r.out);
  std::string line;
  std::getline(rows, line);
  EXPECT_EQ(line.rfind("phi,P_0,P_1", 0), 0u);
  double lo = INFINITY, hi = 0.0;
  while (std::getline(rows, line)) {
    if (line[0] == '#') continue;
    std::stringstream cells(line);
    std::string c;
    for (int i = 0; i <= 5; ++i) std::getline(cells, c, ',');
    lo = std::min(lo, std::stod(c));
    hi = std::max(hi, std::stod(c));
  }
  EXPECT_LT(lo, 1e-3 * hi);
}

TEST_F(Cli, ScanRejectsUnknownParameter) {
  EXPECT_EQ(run("scan --pancake " + data("n10_uniform.json") + " --param w0").code, 2);
}

TEST_F(Cli, PropagateToRayleighRange) {
  // w0 = 1, lambda = 0.5: z_R = 2 pi
  const auto r = run("propagate --pancake " + data("equal_thirds.json") +
                     " --z 6.283185307179586 --wavelength 0.5 --out " + dir.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(dir / "field.oamf"));
  EXPECT_TRUE(fs::exists(dir / "analytic.oamf"));
  const auto after = slurp(dir / "spectrum_after.csv");
  for (const char* n : {"0", "1", "2"}) EXPECT_NEAR(cell(after, n, 2), 1.0 / 3.0, 1e-3 / 3.0);
}

TEST_F(Cli, PropagateRequiresWavelength) {
  EXPECT_EQ(run("propagate --pancake " + data("equal_thirds.json") + " --z 1 --out " + dir.string()).code, 2);
  EXPECT_EQ(run("propagate --pancake " + data("equal_thirds.json") + " --z 1 --wavelength -1 --out " + dir.string()).code, 2);
}

TEST_F(Cli, SidebandLines) {
  const auto r = run("sidebands --pancake " + data("p0_suppressed.json") + " --omega 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(std::isnan(cell(r.out, "0", 1)));
  EXPECT_DOUBLE_EQ(cell(r.out, "1", 1), 2.0);
  EXPECT_DOUBLE_EQ(cell(r.out, "2", 1), 4.0);
  EXPECT_NEAR(cell(r.out, "1", 2), 0.5, 1e-15);
  EXPECT_NEAR(cell(r.out, "2", 2), 0.5, 1e-15);
}

TEST_F(Cli, SidebandRoundTrip) {
  const auto r = run("sidebands --weights 0:0.2,1:0.5,3:0.3 --signal --out " + dir.string());
  ASSERT_EQ(r.code, 0);
  const auto rec = slurp(dir / "recovered.csv");
  EXPECT_NEAR(cell(rec, "3", 1), 0.3, 1e-9);
  EXPECT_NEAR(cell(rec, "2", 1), 0.0, 1e-9);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("analyze --pancake /nonexistent.json").code, 4);
  std::ofstream(dir / "broken.json") << "{";
  EXPECT_EQ(run("analyze --pancake " + (dir / "broken.json").string()).code, 2);
  std::ofstream(dir / "junk.oamf") << "nope";
  EXPECT_EQ(run("analyze --field " + (dir / "junk.oamf").string()).code, 4);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("analyze --pancake " + data("equal_thirds.json") + " --origin 1").code, 2);
}
