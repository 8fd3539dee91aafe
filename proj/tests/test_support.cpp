#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "selberg/analytic.hpp"
#include "selberg/cache.hpp"
#include "selberg/output.hpp"

using namespace selberg;

TEST(Analytic, FundamentalDiscriminants) {
  for (i64 D : {5, 8, 12, 13, 17, 21, 24, 28, 29}) EXPECT_TRUE(analytic::is_fundamental_discriminant(D)) << D;
  for (i64 D : {20, 32, 45, 48, 16, 7, 9}) EXPECT_FALSE(analytic::is_fundamental_discriminant(D)) << D;
  EXPECT_THROW(analytic::character_table(20), DomainError);
}

TEST(Analytic, CharacterIsKronecker) {
  auto chi = analytic::character_table(5);
  EXPECT_EQ(chi, (std::vector<int>{0, 1, -1, -1, 1}));
  auto chi8 = analytic::character_table(8);
  EXPECT_EQ(chi8, (std::vector<int>{0, 1, 0, -1, 0, -1, 0, 1}));
  // periodic and multiplicative against the prime rule
  auto chi12 = analytic::character_table(12);
  for (i64 n = 1; n < 12; ++n)
    if (intarith::is_prime(n)) {
      EXPECT_EQ(chi12[n], intarith::discriminant_character(12, n)) << n;
    }
}

TEST(Analytic, LValues) {
  const double phi = (1 + std::sqrt(5.0)) / 2;
  EXPECT_NEAR(analytic::l_one(5), 2 * std::log(phi) / std::sqrt(5.0), 5e-5);
  EXPECT_NEAR(analytic::l_one(8), std::log(1 + std::sqrt(2.0)) / std::sqrt(2.0), 5e-5);
  auto c = analytic::check_class_number_formula(229);  // h+ = 3
  EXPECT_EQ(c.h, 3);
  EXPECT_LT(c.rel_error, 1e-4);
}

TEST(Output, JsonAndCsv) {
  output::OutputRecord r;
  r.add("D", i64{1621}).add("u", BigInt("577903134597288688851375")).add("x", Rational(3, 2));
  r.add("log", 0.1 + 0.2).add("ok", true).add("name", "a,\"b\"");
  EXPECT_EQ(output::json_line(r),
            R"({"D":1621,"u":"577903134597288688851375","x":"3/2","log":0.3,"ok":true,"name":"a,\"b\""})");
  std::ostringstream csv;
  output::write(csv, {r, r}, output::Format::Csv);
  const std::string row = "1621,577903134597288688851375,3/2,0.3,true,\"a,\"\"b\"\"\"\n";
  EXPECT_EQ(csv.str(), "D,u,x,log,ok,name\n" + row + row);
  std::ostringstream empty;
  output::write(empty, {}, output::Format::Csv);
  EXPECT_EQ(empty.str(), "");
  output::OutputRecord other;
  other.add("E", 1);
  std::ostringstream bad;
  EXPECT_THROW(output::write(bad, {r, other}, output::Format::Csv), InternalError);
}

TEST(Cache, PathPrecedence) {
  ::setenv("SELBERG_CACHE", "/env/t.csv", 1);
  ::setenv("XDG_DATA_HOME", "/xdg", 1);
  EXPECT_EQ(cache::resolve_path(std::string("/flag.csv")), "/flag.csv");
  EXPECT_EQ(cache::resolve_path(std::nullopt), "/env/t.csv");
  ::unsetenv("SELBERG_CACHE");
  EXPECT_EQ(cache::resolve_path(std::nullopt), "/xdg/selberg/table.csv");
  ::unsetenv("XDG_DATA_HOME");
  ::setenv("HOME", "/home/me", 1);
  EXPECT_EQ(cache::resolve_path(std::nullopt), "/home/me/.local/share/selberg/table.csv");
}
