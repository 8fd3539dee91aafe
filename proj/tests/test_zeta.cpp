#include <gtest/gtest.h>

#include <cmath>

#include "selberg/zeta.hpp"

using namespace selberg;
using namespace selberg::zeta;
using mult::CongruenceGroup;

namespace {

const DiscriminantTable& table() {
  static const DiscriminantTable tab = DiscriminantTable::build(Rational(1'000'000));
  return tab;
}

std::vector<CongruenceGroup> groups() {
  return {CongruenceGroup::sl2(),           CongruenceGroup::gamma0(2),     CongruenceGroup::gamma0(6),
          CongruenceGroup::gamma1(5),       CongruenceGroup::gamma1(4),     CongruenceGroup::gamma_full(3),
          CongruenceGroup::gamma_full(2),   CongruenceGroup::gamma0(9)};
}

const double kEps3 = (3 + std::sqrt(5.0)) / 2;

}  // namespace

TEST(Terms, Examples) {
  auto terms = enumerate_terms(table(), CongruenceGroup::sl2(), Rational(7));
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_EQ(terms[0].t, 3);
  EXPECT_EQ(terms[0].u, 1);
  EXPECT_EQ(terms[0].D, 5);
  EXPECT_EQ(terms[0].j, 1);
  EXPECT_EQ(terms[0].h, 1);
  EXPECT_EQ(terms[0].M, 1);

  EXPECT_TRUE(enumerate_terms(table(), CongruenceGroup::gamma0(2), Rational(7)).empty());
  auto zeros = enumerate_terms(table(), CongruenceGroup::gamma0(2), Rational(7), true);
  ASSERT_EQ(zeros.size(), 1u);
  EXPECT_EQ(zeros[0].M, 0);
  EXPECT_EQ(zeros[0].weight, 0);

  auto g2 = enumerate_terms(table(), CongruenceGroup::gamma0(2), Rational(14));
  ASSERT_EQ(g2.size(), 1u);
  EXPECT_EQ(g2[0].t, 4);
  EXPECT_EQ(g2[0].D, 12);
  EXPECT_EQ(g2[0].M * g2[0].h, 2);

  EXPECT_THROW(enumerate_terms(table(), CongruenceGroup::sl2(), Rational(4)), DomainError);
  EXPECT_THROW(enumerate_terms(table(), CongruenceGroup::sl2(), Rational(10'000'000)), ResourceError);
}

TEST(Terms, InvariantsHold) {
  for (const auto& g : groups())
    for (const auto& term : enumerate_terms(table(), g, Rational(100'000), true)) {
      auto sol = pell::nth_solution(term.D, term.j);
      ASSERT_EQ(sol.t, term.t);
      ASSERT_EQ(sol.u, term.u);
      ASSERT_GE(term.M, 0);
      ASSERT_LE(term.M, mult::index(g));
    }
}

TEST(Counts, Examples) {
  auto sl2 = CongruenceGroup::sl2();
  EXPECT_EQ(pi_hat(table(), sl2, Rational(7)), 1);
  EXPECT_EQ(pi_hat(table(), sl2, Rational(6)), 0);
  EXPECT_EQ(pi_hat(table(), CongruenceGroup::gamma0(2), Rational(14)), 2);
  EXPECT_EQ(pi(table(), sl2, Rational(7)), 1);
  for (const auto& g : groups())
    for (Rational x : {Rational(41, 10), Rational(5), Rational(6)}) EXPECT_EQ(pi(table(), g, x), 0);
  EXPECT_EQ(window_count(table(), sl2, Rational(6), Rational(1)), 1);
  EXPECT_EQ(window_count(table(), sl2, Rational(7), Rational(6)), 0);  // eps(4)^2 ~ 13.93
  EXPECT_THROW(window_count(table(), sl2, Rational(10), Rational(11)), DomainError);
}

TEST(Counts, InversionIdentityExact) {
  for (const auto& g : groups())
    for (Rational x : {Rational(100), Rational(1000), Rational(10000)}) {
      Rational sum = 0;
      for (i64 j = 1; pell::max_trace_power_below(x, 2 * j) >= 3; ++j) sum += pi_root(table(), g, x, j) / j;
      EXPECT_EQ(sum, pi_hat(table(), g, x)) << g.name() << " x=" << x;
    }
}

TEST(Counts, TermwiseBoundAndPowerGap) {
  auto sl2 = CongruenceGroup::sl2();
  for (const auto& g : groups())
    for (Rational x : {Rational(100), Rational(1000), Rational(10000), Rational(100000)}) {
      Rational ph = pi_hat(table(), g, x), p = pi(table(), g, x);
      EXPECT_LE(ph, mult::index(g) * pi_hat(table(), sl2, x)) << g.name();
      EXPECT_GE(ph - p, 0);
      // The gap is at most the weight of proper-power terms.
      Rational powers = 0;
      for (const auto& term : enumerate_terms(table(), g, x))
        if (term.j > 1) powers += term.M * term.h / term.j;
      EXPECT_LE(ph - p, powers + pi_hat_root(table(), g, x, 2)) << g.name();
    }
}

TEST(Counts, MonotoneInX) {
  for (const auto& g : groups()) {
    Rational prev_hat = 0, prev = 0;
    for (i64 x = 5; x <= 20000; x = x * 3 / 2) {
      Rational ph = pi_hat(table(), g, Rational(x)), p = pi(table(), g, Rational(x));
      EXPECT_GE(ph, prev_hat);
      EXPECT_GE(p, prev);
      prev_hat = ph, prev = p;
    }
  }
}

TEST(LogDeriv, Examples) {
  auto v = log_deriv(table(), CongruenceGroup::sl2(), 2.0, Rational(7));
  double le = std::log(kEps3);
  double expected = 2 * le / (1 - std::pow(kEps3, -2)) * std::pow(kEps3, -4);
  EXPECT_NEAR(v.value, expected, 1e-10);
  EXPECT_GT(v.tail_estimate, 0);
  EXPECT_EQ(log_deriv(table(), CongruenceGroup::gamma0(2), 2.0, Rational(7)).value, 0);
  EXPECT_THROW(log_deriv(table(), CongruenceGroup::sl2(), 1.0, Rational(7)), DomainError);
  for (const auto& g : groups()) {
    double a = log_deriv(table(), g, 1.5, Rational(1000)).value;
    double b = log_deriv(table(), g, 1.5, Rational(10000)).value;
    EXPECT_GE(b, a);
  }
}

TEST(LogDeriv, MatchesDiscriminantOrdering) {
  // Same series summed by D (all powers) and by trace, restricted to D <= 200.
  const i64 d_max = 200;
  double by_d = sl2_log_deriv_by_discriminant(2.0, d_max);
  auto by_t = log_deriv(table(), CongruenceGroup::sl2(), 2.0, Rational(1'000'000), d_max);
  // Missing terms have eps^{2j} >= 10^6, each below 2 log eps / 10^12 times h.
  EXPECT_NEAR(by_d, by_t.value, 1e-6 * by_d);
}

TEST(Product, Examples) {
  double eps5 = kEps3;
  EXPECT_NEAR(sl2_product_partial(2.0, 5, 0), 1 - std::pow(eps5, -4), 1e-15);
  double prev = 1;
  for (i64 d : {5, 50, 200, 800}) {
    double z = sl2_product_partial(2.0, d, 20);
    EXPECT_GT(z, 0);
    EXPECT_LT(z, prev);
    prev = z;
  }
}

TEST(Product, DerivativeMatchesLogDeriv) {
  const i64 d_max = 300;
  const double s = 1.8, h = 1e-5;
  double fd = (sl2_log_product_partial(s + h, d_max, 200) - sl2_log_product_partial(s - h, d_max, 200)) / (2 * h);
  EXPECT_NEAR(fd, sl2_log_deriv_by_discriminant(s, d_max), 1e-6);
}

TEST(ClassSum, Examples) {
  DiscriminantFilter five{FilterKind::PDividesD, 5};
  EXPECT_EQ(class_sum(table(), five, Rational(3)), 1);
  EXPECT_EQ(class_sum(table(), five, Rational(2)), 0);
  EXPECT_THROW(class_sum(table(), five, Rational(1)), DomainError);
  for (i64 p : {3, 5, 7})
    for (Rational x : {Rational(100), Rational(1000)}) {
      Rational s1 = class_sum(table(), {FilterKind::Set1, p}, x, Weights::JWeighted);
      Rational s2 = class_sum(table(), {FilterKind::Set2, p}, x, Weights::JWeighted);
      EXPECT_LE(s2, s1);
      for (i64 j = 1; j <= 3; ++j) {
        Rational a = class_sum(table(), {FilterKind::Set1, p, j}, x);
        Rational b = class_sum(table(), {FilterKind::Set2, p, j}, x);
        Rational c = class_sum(table(), {FilterKind::Set2r, p, j, 2}, x);
        EXPECT_LE(b, a);
        EXPECT_GE(c, 0);
      }
    }
}

TEST(ClassSum, DirectRecount) {
  // p | D, eps(D) < x, recomputed per D from the continued fraction.
  const i64 p = 3;
  const Rational x(300);
  Rational direct = 0;
  for (i64 D = 5; D < 100000; ++D) {
    if (D % p != 0 || !intarith::is_in_frakD(D)) continue;
    auto fund = pell::fundamental_solution(D);
    if (pell::unit_below(fund.t, fund.u, D, x)) direct += table().find(D)->h;
  }
  EXPECT_EQ(class_sum(table(), {FilterKind::PDividesD, p}, x), direct);
}

TEST(ClassSum, Set2rMembership) {
  DiscriminantFilter f{FilterKind::Set2r, 3, 1, 2};
  EXPECT_TRUE(f.admits(12, 1));    // 3 || 12, 9 does not divide 1
  EXPECT_FALSE(f.admits(45, 1));   // 9 | 45
  EXPECT_FALSE(f.admits(12, 9));   // 9 | u
  EXPECT_TRUE(f.admits(12, 3));
  DiscriminantFilter s1{FilterKind::Set1, 3}, s2{FilterKind::Set2, 3};
  EXPECT_TRUE(s1.admits(5, 3));
  EXPECT_FALSE(s2.admits(5, 3));
  EXPECT_FALSE(s2.admits(12, 3));
}

TEST(Cp, BracketAndPrediction) {
  auto e3 = estimate_Cp(table(), 3, Rational(10));
  EXPECT_DOUBLE_EQ(e3.bracket_low, 1.0 / 3);
  EXPECT_DOUBLE_EQ(e3.bracket_high, 3.0 / 8);
  EXPECT_NEAR(e3.predicted, 9.0 / 26, 1e-15);
  auto e5 = estimate_Cp(table(), 5, Rational(10));
  EXPECT_DOUBLE_EQ(e5.bracket_low, 0.2);
  EXPECT_DOUBLE_EQ(e5.bracket_high, 5.0 / 24);
  EXPECT_NEAR(e5.predicted, 25.0 / 124, 1e-15);
  EXPECT_EQ(estimate_Cp(table(), 3, Rational(2)).ratio, 0);
  EXPECT_THROW(estimate_Cp(table(), 2, Rational(10)), DomainError);
  EXPECT_THROW(estimate_Cp(table(), 9, Rational(10)), DomainError);
}

TEST(Identity, HoldsExactly) {
  for (i64 p : {3, 5, 7})
    for (Rational x : {Rational(2), Rational(100), Rational(1000)}) {
      auto rep = padic_identity_check(table(), p, x);
      EXPECT_TRUE(rep.holds()) << "p=" << p << " x=" << x << " " << rep.lhs_set1 << " vs " << rep.rhs_set1;
    }
  auto empty = padic_identity_check(table(), 3, Rational(2));
  EXPECT_EQ(empty.lhs_set1, 0);
  EXPECT_EQ(empty.rhs_set1, 0);
  EXPECT_GT(padic_identity_check(table(), 3, Rational(100)).lhs_set1, 0);
  EXPECT_THROW(padic_identity_check(table(), 2, Rational(100)), DomainError);
}
