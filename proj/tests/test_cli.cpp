#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "mobius/cli.hpp"
#include "mobius/errors.hpp"
#include "mobius/io.hpp"
#include "mobius/verify.hpp"

using namespace mobius;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mobius_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    std::vector<const char*> argv{"mobius"};
    for (auto& a : args) argv.push_back(a.c_str());
    out_.str({});
    err_.str({});
    return cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  fs::path write(const std::string& name, const std::string& text) {
    auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  std::string read(const fs::path& p) { return io::read_file(p); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST(Io, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(NAN), "nan");
  EXPECT_EQ(io::format_double(-INFINITY), "-inf");
}

TEST(Io, SystemJsonRoundTrip) {
  std::mt19937_64 rng(62);
  for (int i = 0; i < 50; ++i) {
    auto s = random_system(rng, 1 + i % 5);
    auto back = io::parse_system(io::dump(io::to_json(s)));
    ASSERT_EQ(back.size(), s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
      EXPECT_EQ(back[k].position.x, s[k].position.x);
      EXPECT_EQ(back[k].position.y, s[k].position.y);
      EXPECT_EQ(back[k].strength, s[k].strength);
      EXPECT_EQ(back[k].label, s[k].label);
    }
  }
}

TEST(Io, SchemaViolations) {
  EXPECT_THROW(io::parse_system("{"), ValidationError);
  EXPECT_THROW(io::parse_system("[]"), ValidationError);
  EXPECT_THROW(io::parse_system(R"({"vortices":[],"extra":1})"), ValidationError);
  EXPECT_THROW(io::parse_system(R"({"vortices":[{"x":0,"y":0}]})"), ValidationError);
  EXPECT_THROW(io::parse_system(R"({"vortices":[{"x":0,"y":0,"gamma":"1"}]})"), ValidationError);
  EXPECT_THROW(io::parse_system(R"({"vortices":[{"x":0,"y":0,"gamma":1,"z":2}]})"),
               ValidationError);
  auto s = io::parse_system(R"({"vortices":[{"x":7.0,"y":0.5,"gamma":1}]})");
  EXPECT_NEAR(s[0].position.x, 7.0 - 2 * kPi, 1e-15);
}

TEST(Io, TableFormats) {
  io::Table t{{"a", "b"}, {{1.5, std::string("x")}, {NAN, std::string("y")}}};
  EXPECT_EQ(t.to_csv(), "a,b\n1.5,x\nnan,y\n");
  auto j = t.to_json();
  EXPECT_EQ(j[0]["a"], 1.5);
  EXPECT_TRUE(j[1]["a"].is_null());
}

TEST_F(CliTest, SimulateSingleVortexKeepsItsHeight) {
  auto sys = write("one.json", R"({"vortices":[{"x":0.5,"y":0.7,"gamma":1,"label":"a"}]})");
  ASSERT_EQ(run({"--out", dir_.string(), "simulate", "--system", sys.string(), "--t-end", "10"}),
            cli::kOk)
      << err_.str();
  std::istringstream csv(read(dir_ / "trajectory.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "t,label,x,y,gamma");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_NE(line.find(",a,"), std::string::npos);
    EXPECT_NE(line.find(",0.7,1"), std::string::npos) << line;
  }
  EXPECT_EQ(rows, 101);
  EXPECT_TRUE(fs::exists(dir_ / "flips.csv"));
  auto diag = io::json::parse(read(dir_ / "diagnostics.json"));
  EXPECT_EQ(diag["max_abs_phi_drift"], 0.0);
  auto final_sys = io::read_system(dir_ / "final.json");
  EXPECT_EQ(final_sys[0].position.y, 0.7);
}

TEST_F(CliTest, SimulateStreetPairDriftsRigidly) {
  auto sys = write("street.json",
                   R"({"vortices":[{"x":0,"y":0.5,"gamma":1},{"x":0,"y":-0.5,"gamma":-1}]})");
  ASSERT_EQ(run({"--out", dir_.string(), "--format", "json", "simulate", "--system", sys.string(),
                 "--t-end", "5", "--dt", "0.5"}),
            cli::kOk);
  auto rows = io::json::parse(read(dir_ / "trajectory.json"));
  const double drift = 1.0 / (2.0 * kPi * std::tanh(1.0));
  for (const auto& r : rows)
    EXPECT_NEAR(r["x"].get<double>(), std::fmod(drift * r["t"].get<double>(), kPi), 1e-8);
}

TEST_F(CliTest, MalformedJsonWritesNothing) {
  auto sys = write("bad.json", R"({"vortices":[{"x":0.5,)");
  auto out = dir_ / "out";
  EXPECT_EQ(run({"--out", out.string(), "simulate", "--system", sys.string()}), cli::kValidation);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_FALSE(err_.str().empty());
}

TEST_F(CliTest, MissingInputIsAnIoError) {
  EXPECT_EQ(run({"--out", dir_.string(), "simulate", "--system", (dir_ / "none.json").string()}),
            cli::kIo);
}

TEST_F(CliTest, CollisionExitCode) {
  auto sys = write("close.json",
                   R"({"vortices":[{"x":1,"y":0.05,"gamma":1},{"x":1,"y":-0.05,"gamma":1}]})");
  auto out = dir_ / "out";
  EXPECT_EQ(run({"--out", out.string(), "simulate", "--system", sys.string(), "--collision-radius",
                 "0.2"}),
            cli::kCollision);
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, FixedEquilibria) {
  ASSERT_EQ(run({"--out", dir_.string(), "equilibria", "fixed", "--g1", "2", "--g2", "1"}),
            cli::kOk);
  auto j = io::json::parse(read(dir_ / "fixed.json"));
  ASSERT_EQ(j["branches"].size(), 2u);
  for (const auto& b : j["branches"]) {
    EXPECT_EQ(b["result"]["kind"], "fixed");
    EXPECT_NEAR(b["momentum"].get<double>(),
                2 * b["y1"].get<double>() + b["y2"].get<double>(), 1e-14);
    auto s = io::system_from_json(io::json{{"vortices", b["result"]["vortices"]}});
    EXPECT_EQ(s.size(), 2u);
  }
  EXPECT_EQ(run({"--out", dir_.string(), "equilibria", "fixed", "--g1", "1", "--g2", "1"}),
            cli::kValidation);
}

TEST_F(CliTest, RingEquilibrium) {
  ASSERT_EQ(run({"--out", dir_.string(), "equilibria", "nring", "--n", "5", "--y", "1"}), cli::kOk);
  auto j = io::json::parse(read(dir_ / "nring.json"));
  EXPECT_NEAR(j["xi"].get<double>(), 5.0 * std::tanh(5.0) / (4.0 * kPi), 1e-15);
  EXPECT_EQ(j["result"]["kind"], "relative");
  EXPECT_EQ(j["result"]["vortices"].size(), 5u);
}

TEST_F(CliTest, EquatorialEquilibrium) {
  ASSERT_EQ(run({"--out", dir_.string(), "equilibria", "equatorial", "--strengths", "1,-1,1"}),
            cli::kOk);
  auto j = io::json::parse(read(dir_ / "equatorial.json"));
  EXPECT_LE(j["solutions"][0]["residual"].get<double>(), 1e-10);
}

TEST_F(CliTest, ReducedCritical) {
  ASSERT_EQ(run({"--out", dir_.string(), "reduced", "critical", "--g1", "2", "--g2", "1", "--c",
                 "1"}),
            cli::kOk);
  auto j = io::json::parse(read(dir_ / "critical.json"));
  int saddles = 0;
  for (const auto& c : j["dx_zero"]) saddles += c["kind"] == "saddle";
  EXPECT_GE(saddles, 2);
}

TEST_F(CliTest, ReducedOrbitNearTheSingularPoint) {
  ASSERT_EQ(run({"--out", dir_.string(), "reduced", "orbit", "--g1", "2", "--g2", "1", "--c", "1",
                 "--dx", "0.1", "--y1", "0.4"}),
            cli::kOk);
  auto j = io::json::parse(read(dir_ / "orbit.json"));
  EXPECT_EQ(j["orbit_type"], "I");
  EXPECT_TRUE(fs::exists(dir_ / "orbit_samples.csv"));
}

TEST_F(CliTest, ReducedOrbitJsonTablesDoNotClobberTheReport) {
  ASSERT_EQ(run({"--out", dir_.string(), "--format", "json", "reduced", "orbit", "--dx", "0.6",
                 "--y1", "0.2", "--c", "0.5"}),
            cli::kOk);
  EXPECT_TRUE(io::json::parse(read(dir_ / "orbit.json")).contains("orbit_type"));
  auto rows = io::json::parse(read(dir_ / "orbit_samples.json"));
  ASSERT_TRUE(rows.is_array());
  EXPECT_TRUE(rows.at(0).contains("dx"));
}

TEST_F(CliTest, ReducedScanGrid) {
  ASSERT_EQ(run({"--out", dir_.string(), "reduced", "scan", "--c", "1", "--grid", "400x400"}),
            cli::kOk);
  std::istringstream csv(read(dir_ / "portrait.csv"));
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  EXPECT_EQ(line, "dx,y1,H");
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 400 * 400);
  auto meta = io::json::parse(read(dir_ / "scan.json"));
  EXPECT_EQ(meta["entries"].size(), 1u);
}

TEST_F(CliTest, ReducedScanSweep) {
  ASSERT_EQ(run({"--out", dir_.string(), "reduced", "scan", "--g1", "2,3", "--c", "0,1", "--grid",
                 "20x20"}),
            cli::kOk);
  auto meta = io::json::parse(read(dir_ / "scan.json"));
  EXPECT_EQ(meta["entries"].size(), 4u);
  EXPECT_TRUE(fs::exists(dir_ / "portrait_3.csv"));
  EXPECT_EQ(run({"--out", dir_.string(), "reduced", "scan", "--grid", "20by20"}), cli::kValidation);
}

TEST_F(CliTest, Streamfield) {
  auto sys = write("one.json", R"({"vortices":[{"x":1,"y":0,"gamma":1}]})");
  ASSERT_EQ(run({"--out", dir_.string(), "streamfield", "--system", sys.string(), "--grid",
                 "10x5"}),
            cli::kOk);
  std::istringstream csv(read(dir_ / "streamfield.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 51);
}

TEST_F(CliTest, VerifyPassesAndMutationFails) {
  EXPECT_EQ(run({"--out", dir_.string(), "verify"}), cli::kOk);
  auto j = io::json::parse(out_.str());
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(run({"--out", dir_.string(), "verify", "--mutate-ring"}), cli::kVerifyFailed);
  EXPECT_EQ(run({"--out", dir_.string(), "--tol", "1e-6", "verify"}), cli::kVerifyFailed);
}

TEST_F(CliTest, OutputIsDeterministic) {
  auto sys = write("three.json",
                   R"({"vortices":[{"x":0.2,"y":0.3,"gamma":1},{"x":1.1,"y":-0.4,"gamma":-0.7},)"
                   R"({"x":2.5,"y":0.9,"gamma":1.3}]})");
  auto a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run({"--out", a.string(), "simulate", "--system", sys.string()}), cli::kOk);
  ASSERT_EQ(run({"--out", b.string(), "simulate", "--system", sys.string()}), cli::kOk);
  for (auto name : {"trajectory.csv", "flips.csv", "diagnostics.json", "final.json"})
    EXPECT_EQ(read(a / name), read(b / name)) << name;
}

TEST_F(CliTest, ConfigFile) {
  auto sys = write("one.json", R"({"vortices":[{"x":1,"y":0.2,"gamma":1}]})");
  auto cfg = write("run.toml", "[simulate]\nsystem = \"" + sys.string() + "\"\nt-end = 1\n");
  auto out = dir_ / "cfg";
  ASSERT_EQ(run({"--out", out.string(), "--config", cfg.string(), "simulate"}), cli::kOk)
      << err_.str();
  EXPECT_TRUE(fs::exists(out / "trajectory.csv"));
  auto bad = write("bad.toml", "[simulate]\nsystem = \"x\"\nunknown = 3\n");
  EXPECT_EQ(run({"--config", bad.string(), "simulate"}), cli::kValidation);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}), cli::kValidation);
  EXPECT_EQ(run({"--format", "xml", "verify"}), cli::kValidation);
  EXPECT_EQ(run({"--help"}), cli::kOk);
}
