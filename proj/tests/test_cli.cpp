#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("selberg_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string cache() const { return (dir_ / "table.csv").string(); }

  CliRun run(const std::string& args, bool with_cache = true) const {
    std::string cmd = std::string(SELBERG_BIN) + (with_cache ? " --cache " + cache() : "") + " " + args + " 2>/dev/null";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf;
    for (std::size_t n; (n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0;) out.append(buf.data(), n);
    int status = ::pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
  }

  nlohmann::json json(const std::string& args) const {
    auto r = run(args);
    EXPECT_EQ(r.code, 0) << args;
    return nlohmann::json::parse(r.out);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, Pell) {
  auto a = json("pell 5");
  EXPECT_EQ(a["t"], "3");
  EXPECT_EQ(a["u"], "1");
  auto b = json("pell 5 --j 2");
  EXPECT_EQ(b["t"], "7");
  EXPECT_EQ(b["u"], "3");
  EXPECT_EQ(run("pell 7").code, 2);
  EXPECT_EQ(json("pell 1621")["u"], "577903134597288688851375");
}

TEST_F(Cli, ClassNumber) {
  EXPECT_EQ(json("classnum 5")["h"], 1);
  EXPECT_EQ(run("classnum --range 5 13").out, "{\"D\":5,\"h\":1}\n{\"D\":8,\"h\":1}\n{\"D\":12,\"h\":2}\n{\"D\":13,\"h\":1}\n");
  EXPECT_EQ(run("--format csv classnum --range 5 13").out, "D,h\n5,1\n8,1\n12,2\n13,1\n");
  EXPECT_EQ(run("classnum 16").code, 2);
}

TEST_F(Cli, Multiplicity) {
  EXPECT_EQ(json("mult --group γ0 --level 2 --t 6 --u 2")["M"], "3");
  auto full = json("mult --group γfull --level 2 --t 6 --u 2");
  EXPECT_EQ(full["M"], "6");
  EXPECT_EQ(full["index"], 6);
  // 3 = -2 mod 5: the trace condition holds and two cosets are fixed
  EXPECT_EQ(json("mult --group γ1 --level 5 --t 3 --u 1")["M"], "2");
  EXPECT_EQ(json("mult --group γ1 --level 5 --t 4 --u 1")["M"], "0");
  EXPECT_EQ(json("mult --group gamma0 --level 6 --t 6 --u 2")["factors"], "2^1=3;3^1=0");
  EXPECT_EQ(run("mult --group γ0 --level 6 --t 6 --u 4").code, 2);
  EXPECT_EQ(run("mult --group nope --level 6 --t 6 --u 2").code, 2);
}

TEST_F(Cli, Counts) {
  auto a = json("count --group sl2 --x 7");
  EXPECT_EQ(a["pi_hat"], "1");
  EXPECT_EQ(a["pi"], "1");
  auto b = json("count --group γ0 --level 2 --x 7");
  EXPECT_EQ(b["pi_hat"], "0");
  EXPECT_EQ(b["pi"], "0");
  auto w = json("count --group sl2 --x 6 --window 1");
  EXPECT_EQ(w["window"], "1");
  EXPECT_EQ(w["within_bound"], true);
  EXPECT_EQ(run("count --x 3").code, 2);
}

TEST_F(Cli, ClassSums) {
  EXPECT_EQ(json("classsum --p 5 --x 3")["sum"], "1");
  auto e = json("classsum --p 3 --x 10 --estimate-c");
  EXPECT_NEAR(e["bracket_low"].get<double>(), 1.0 / 3, 1e-14);
  EXPECT_EQ(e["bracket_high"], 0.375);
  EXPECT_NEAR(e["predicted"].get<double>(), 9.0 / 26, 1e-14);
  EXPECT_EQ(run("classsum --p 2 --x 10").code, 2);
}

TEST_F(Cli, FormatsCarrySameData) {
  auto j = run("count --group γ1 --level 5 --x 1000 --window 100");
  auto c = run("--format csv count --group γ1 --level 5 --x 1000 --window 100");
  auto rec = nlohmann::ordered_json::parse(j.out);
  std::string header, values;
  for (auto& [k, v] : rec.items()) {
    header += (header.empty() ? "" : ",") + k;
    values += (values.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
  }
  EXPECT_EQ(c.out, header + "\n" + values + "\n");
}

TEST_F(Cli, TableDeterminismAndRecovery) {
  auto a = json("table --build --cutoff 1e5");
  auto first = fs::path(cache());
  std::string bytes_a = (std::ostringstream() << std::ifstream(first).rdbuf()).str();
  auto b = json("table --build --cutoff 1e5");
  std::string bytes_b = (std::ostringstream() << std::ifstream(first).rdbuf()).str();
  EXPECT_EQ(a["checksum"], b["checksum"]);
  EXPECT_EQ(bytes_a, bytes_b);
  EXPECT_EQ(json("table --info"), a);

  // Flip one digit in the body: rebuilt with a warning, same checksum.
  std::string broken = bytes_a;
  broken[broken.size() - 2] = broken[broken.size() - 2] == '1' ? '2' : '1';
  std::ofstream(first, std::ios::trunc) << broken;
  EXPECT_EQ(json("table --info"), a);
  EXPECT_EQ((std::ostringstream() << std::ifstream(first).rdbuf()).str(), bytes_a);

  std::ofstream(first, std::ios::trunc) << "not a table\n";
  EXPECT_EQ(json("count --x 100")["pi"], "22");
}

TEST_F(Cli, CacheUnwritableExitsFour) {
  std::ofstream(dir_ / "file") << "x";
  auto r = run("--cache " + (dir_ / "file" / "t.csv").string() + " count --x 100", false);
  EXPECT_EQ(r.code, 4);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(Cli, EnvironmentSelectsCache) {
  std::string env = (dir_ / "env.csv").string();
  std::string cmd = "SELBERG_CACHE=" + env + " " + SELBERG_BIN + " count --x 50 >/dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(env));
}

TEST_F(Cli, VerifyExitCodes) {
  EXPECT_EQ(run("verify --suite forms").code, 0);
  EXPECT_EQ(run("verify --suite mult --budget 0.001").code, 3);
  EXPECT_EQ(run("verify --suite nope").code, 2);
}
