#include <gtest/gtest.h>

#include <filesystem>

#include "selberg/class_sweep.hpp"
#include "selberg/forms.hpp"
#include "selberg/table.hpp"

using namespace selberg;
using zeta::DiscriminantTable;

namespace {

const DiscriminantTable& small_table() {
  static const DiscriminantTable tab = DiscriminantTable::build(Rational(1'000'000));
  return tab;
}

}  // namespace

TEST(Sweep, MatchesCycleClassNumbers) {
  const i64 t_max = 400;
  auto swept = sweep::class_number_sweep(t_max);
  for (i64 t = 3; t <= t_max; ++t) {
    auto fiber = pell::trace_fiber(t);
    auto got = swept.fiber(t);
    ASSERT_EQ(got.size(), fiber.members.size()) << t;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].u, fiber.members[i].u);
      EXPECT_EQ(got[i].D, fiber.members[i].D);
      EXPECT_EQ(got[i].j, fiber.members[i].j);
      EXPECT_EQ(got[i].h, forms::class_number(got[i].D)) << "D=" << got[i].D;
    }
  }
}

TEST(Table, SmallCutoffContents) {
  auto tab = DiscriminantTable::build(Rational(100));
  for (i64 D : {5, 8, 12}) {
    auto* r = tab.find(D);
    ASSERT_NE(r, nullptr) << D;
    auto fund = pell::fundamental_solution(D);
    EXPECT_EQ(r->t1, fund.t);
    EXPECT_EQ(r->u1, fund.u);
    EXPECT_EQ(r->h, forms::class_number(D));
    EXPECT_NEAR(r->log_eps, pell::log_epsilon(pell::QuadUnit::of(fund)), 1e-14);
  }
  EXPECT_NEAR(tab.find(5)->log_eps, std::log(2.618033988749895), 1e-12);
  EXPECT_NEAR(tab.find(8)->log_eps, std::log(5.82842712474619), 1e-12);
  EXPECT_NEAR(tab.find(12)->log_eps, std::log(3.732050807568877), 1e-12);
  EXPECT_EQ(tab.find(13), nullptr);  // eps(13) ~ 3.30, square above 10
  EXPECT_NE(tab.find(21), nullptr);  // eps(21) ~ 4.79
}

TEST(Table, EveryDiscriminantBelowCutoffPresent) {
  const auto& tab = small_table();
  std::size_t expected = 0;
  for (i64 D = 5; D < 4000; ++D) {
    if (!intarith::is_in_frakD(D)) continue;
    auto fund = pell::fundamental_solution(D);
    bool inside = pell::unit_below(fund.t, fund.u, D, Rational(1000));
    EXPECT_EQ(tab.find(D) != nullptr, inside) << D;
    if (inside) {
      ++expected;
      EXPECT_EQ(tab.find(D)->h, forms::class_number(D)) << D;
    }
  }
  std::size_t below = 0;
  for (const auto& r : tab.records()) below += r.D < 4000;
  EXPECT_EQ(below, expected);
}

TEST(Table, EmptyCutoff) {
  for (Rational c : {Rational(0), Rational(6), Rational(68, 10)}) {
    auto tab = DiscriminantTable::build(c);
    EXPECT_TRUE(tab.records().empty());
    EXPECT_EQ(tab.max_trace(), 2);
    EXPECT_TRUE(tab.fiber(3).empty());
  }
}

TEST(Table, RoundTripAndDeterminism) {
  auto a = DiscriminantTable::build(Rational(50'000));
  auto b = DiscriminantTable::build(Rational(50'000));
  std::string text = zeta::serialize(a);
  EXPECT_EQ(text, zeta::serialize(b));
  auto back = zeta::deserialize(text);
  EXPECT_EQ(zeta::serialize(back), text);
  ASSERT_EQ(back.records().size(), a.records().size());
  for (i64 t = 3; t <= a.max_trace(); ++t) ASSERT_EQ(back.fiber(t).size(), a.fiber(t).size());
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Table, CorruptionDetected) {
  std::string text = zeta::serialize(DiscriminantTable::build(Rational(10'000)));
  auto flip = text;
  flip[flip.size() - 3] = flip[flip.size() - 3] == '1' ? '2' : '1';
  EXPECT_THROW(zeta::deserialize(flip), CacheError);
  EXPECT_THROW(zeta::deserialize(text.substr(0, text.size() / 2)), CacheError);
  EXPECT_THROW(zeta::deserialize("garbage\n"), CacheError);
  EXPECT_THROW(zeta::deserialize(""), CacheError);
  // Valid checksum over an inconsistent row still fails validation.
  std::string body = "D,h,t1,u1,log_eps\n5,1,3,2,0.962423650119206\n";
  std::string forged = std::string(zeta::kTableMagic) + " cutoff=100 records=1 checksum=" + zeta::fnv1a64(body) + "\n" + body;
  EXPECT_THROW(zeta::deserialize(forged), CacheError);
}

TEST(Table, FileRoundTrip) {
  auto dir = std::filesystem::temp_directory_path() / ("selberg_table_test_" + std::to_string(::getpid()));
  auto path = dir / "t.csv";
  auto tab = DiscriminantTable::build(Rational(20'000));
  zeta::write_table(path, tab);
  auto back = zeta::read_table(path);
  EXPECT_EQ(zeta::checksum(back), zeta::checksum(tab));
  std::filesystem::remove_all(dir);
}
