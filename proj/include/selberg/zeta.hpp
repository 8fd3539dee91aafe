#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "selberg/error.hpp"
#include "selberg/forms.hpp"
#include "selberg/intarith.hpp"
#include "selberg/multiplicity.hpp"
#include "selberg/numeric.hpp"
#include "selberg/pell.hpp"
#include "selberg/table.hpp"

namespace selberg::zeta {

using mult::CongruenceGroup;

// One summand of the trace-indexed log-derivative series; weight multiplies eps(t)^{-2s}.
struct GeodesicTerm {
  i64 t, u, D, j, h;
  Rational M;
  double weight;
};

namespace detail {

// Largest trace whose unit satisfies eps(t)^n < x, checked against the table.
inline i64 trace_limit(const DiscriminantTable& tab, const Rational& x, i64 n) {
  const i64 t = pell::max_trace_power_below(x, n);
  if (t > tab.max_trace())
    throw ResourceError("discriminant table cutoff " + to_string(tab.norm_cutoff()) + " is too small for x = " +
                        to_string(x));
  return t;
}

inline void require_above_four(const Rational& x) {
  if (x <= 4) throw DomainError("cutoff x must exceed 4");
}

}  // namespace detail

inline std::vector<GeodesicTerm> enumerate_terms(const DiscriminantTable& tab, const CongruenceGroup& g,
                                                 const Rational& x, bool include_zero = false) {
  detail::require_above_four(x);
  std::vector<GeodesicTerm> out;
  const i64 t_lim = detail::trace_limit(tab, x, 2);
  for (i64 t = 3; t <= t_lim; ++t) {
    const double log_eps = pell::log_epsilon_trace(t);
    const double shape = 2 * log_eps / -std::expm1(-2 * log_eps);
    for (const auto& e : tab.fiber(t)) {
      Rational m = mult::M(g, t, e.u).value;
      if (m == 0 && !include_zero) continue;
      const double w = to_double(m) * static_cast<double>(e.h) / static_cast<double>(e.j) * shape;
      out.push_back({t, e.u, e.D, e.j, e.h, m, w});
    }
  }
  return out;
}

// Sum of M h / j over terms with eps(t)^(2k) < x, i.e. pi_hat at x^(1/k).
inline Rational pi_hat_root(const DiscriminantTable& tab, const CongruenceGroup& g, const Rational& x, i64 k) {
  Rational total = 0;
  const i64 t_lim = detail::trace_limit(tab, x, 2 * k);
  for (i64 t = 3; t <= t_lim; ++t)
    for (const auto& e : tab.fiber(t)) {
      Rational m = mult::M(g, t, e.u).value;
      if (m != 0) total += m * e.h / e.j;
    }
  return total;
}

inline Rational pi_hat(const DiscriminantTable& tab, const CongruenceGroup& g, const Rational& x) {
  detail::require_above_four(x);
  return pi_hat_root(tab, g, x, 1);
}

// pi at x^(1/k) by Moebius inversion of pi_hat.
inline Rational pi_root(const DiscriminantTable& tab, const CongruenceGroup& g, const Rational& x, i64 k) {
  Rational total = 0;
  for (i64 j = 1; pell::max_trace_power_below(x, 2 * k * j) >= 3; ++j)
    if (int mu = intarith::moebius(j); mu != 0) total += Rational(mu, j) * pi_hat_root(tab, g, x, k * j);
  if (!is_integer(total) || total < 0)
    throw InternalError("prime geodesic count is not a nonnegative integer: " + to_string(total));
  return total;
}

inline Rational pi(const DiscriminantTable& tab, const CongruenceGroup& g, const Rational& x) {
  detail::require_above_four(x);
  return pi_root(tab, g, x, 1);
}

inline Rational window_count(const DiscriminantTable& tab, const CongruenceGroup& g, const Rational& x,
                             const Rational& y) {
  if (y <= 0 || y > x) throw DomainError("window requires 0 < y <= x");
  return pi(tab, g, x + y) - pi(tab, g, x);
}

struct SeriesValue {
  double value;
  double tail_estimate;  // heuristic: index(g) X^(1-s)/(s-1), not a proven bound
};

// Partial sum over terms with eps(t)^2 < x; optionally only D <= d_max.
inline SeriesValue log_deriv(const DiscriminantTable& tab, const CongruenceGroup& g, double s, const Rational& x,
                             std::optional<i64> d_max = std::nullopt) {
  if (!(s > 1)) throw DomainError("log_deriv requires real s > 1");
  detail::require_above_four(x);
  double sum = 0;
  for (const auto& term : enumerate_terms(tab, g, x)) {
    if (d_max && term.D > *d_max) continue;
    sum += term.weight * std::exp(-2 * s * pell::log_epsilon_trace(term.t));
  }
  const double X = to_double(x);
  const double tail = static_cast<double>(mult::index(g)) * std::pow(X, 1 - s) / (s - 1);
  return {sum, tail};
}

// log of the SL2(Z) Euler product over D <= d_max, n <= n_max, computed per D from
// the cycle class number and the continued-fraction unit.
inline double sl2_log_product_partial(double s, i64 d_max, i64 n_max) {
  if (!(s > 1)) throw DomainError("product requires real s > 1");
  double log_z = 0;
  for (i64 D = 5; D <= d_max; ++D) {
    if (!intarith::is_in_frakD(D)) continue;
    const double le = pell::log_epsilon(pell::QuadUnit::of(pell::fundamental_solution(D)));
    const double h = static_cast<double>(forms::class_number(D));
    for (i64 n = 0; n <= n_max; ++n) log_z += h * std::log1p(-std::exp(-2 * (s + static_cast<double>(n)) * le));
  }
  return log_z;
}

inline double sl2_product_partial(double s, i64 d_max, i64 n_max) {
  return std::exp(sl2_log_product_partial(s, d_max, n_max));
}

// sum over D <= d_max and all j of h 2 log eps eps^{-2js} / (1 - eps^{-2j}), per D.
inline double sl2_log_deriv_by_discriminant(double s, i64 d_max) {
  if (!(s > 1)) throw DomainError("requires real s > 1");
  double sum = 0;
  for (i64 D = 5; D <= d_max; ++D) {
    if (!intarith::is_in_frakD(D)) continue;
    const double le = pell::log_epsilon(pell::QuadUnit::of(pell::fundamental_solution(D)));
    const double h = static_cast<double>(forms::class_number(D));
    for (i64 j = 1;; ++j) {
      const double jd = static_cast<double>(j);
      const double term = h * 2 * le * std::exp(-2 * jd * s * le) / -std::expm1(-2 * jd * le);
      sum += term;
      if (term < 1e-18 * sum) break;
    }
  }
  return sum;
}

// ---- class-number sums over subsets of the discriminant set ----------------

enum class FilterKind { All, PDividesD, Set1, Set2, Set2r };

struct DiscriminantFilter {
  FilterKind kind = FilterKind::All;
  i64 p = 0;
  i64 j = 1;
  int r = 1;

  // Membership of (D, j) where u is u_j(D).
  bool admits(i64 D, i64 u) const {
    switch (kind) {
      case FilterKind::All: return true;
      case FilterKind::PDividesD: return D % p == 0;
      case FilterKind::Set1: return D % p == 0 || u % p == 0;
      case FilterKind::Set2: return D % p == 0 && u % p != 0;
      case FilterKind::Set2r: return D % p == 0 && (D / p) % p != 0 && u % intarith::ipow(p, r) != 0;
    }
    return false;
  }
};

enum class Weights { Plain, JWeighted };

// Plain: sum of h(D) over D admitted at index filter.j with eps(D)^j < x.
// JWeighted: sum over all j >= 1 of j^-1 h(D) over D admitted at j with eps(D)^j < x.
inline Rational class_sum(const DiscriminantTable& tab, const DiscriminantFilter& f, const Rational& x,
                          Weights w = Weights::Plain) {
  if (x <= 1) throw DomainError("class_sum requires x > 1");
  if (f.kind != FilterKind::All && !intarith::is_prime(f.p)) throw DomainError("filter prime must be prime");
  Rational total = 0;
  const i64 t_lim = detail::trace_limit(tab, x, 1);
  for (i64 t = 3; t <= t_lim; ++t)
    for (const auto& e : tab.fiber(t)) {
      if (w == Weights::Plain && e.j != f.j) continue;
      if (!f.admits(e.D, e.u)) continue;
      total += w == Weights::Plain ? Rational(e.h) : Rational(e.h, e.j);
    }
  return total;
}

struct CpEstimate {
  Rational sum;
  double ratio;
  double bracket_low, bracket_high;
  double predicted;
};

inline CpEstimate estimate_Cp(const DiscriminantTable& tab, i64 p, const Rational& x) {
  if (p < 3 || !intarith::is_prime(p)) throw DomainError("C(p) estimate needs an odd prime");
  Rational sum = class_sum(tab, {FilterKind::PDividesD, p}, x);
  const double xd = to_double(x);
  const double pd = static_cast<double>(p);
  return {sum, to_double(sum) * std::log(xd) / (xd * xd), 1 / pd, pd / (pd * pd - 1), pd * pd / (pd * pd * pd - 1)};
}

struct IdentityReport {
  Rational lhs_set1, rhs_set1, lhs_set2, rhs_set2;
  bool holds() const { return lhs_set1 == rhs_set1 && lhs_set2 == rhs_set2; }
};

// j-weighted class sums over the two p-adic subsets against the Gamma1(p) and
// Gamma(p) counting functions at x^2.
inline IdentityReport padic_identity_check(const DiscriminantTable& tab, i64 p, const Rational& x) {
  if (p < 3 || !intarith::is_prime(p)) throw DomainError("identity check needs an odd prime");
  IdentityReport rep;
  rep.lhs_set1 = class_sum(tab, {FilterKind::Set1, p}, x, Weights::JWeighted);
  rep.lhs_set2 = class_sum(tab, {FilterKind::Set2, p}, x, Weights::JWeighted);
  const Rational x2 = x * x;
  Rational g1 = 0, gp = 0;
  if (x2 > 4) {
    g1 = pi_hat(tab, CongruenceGroup::gamma1(p), x2);
    gp = pi_hat(tab, CongruenceGroup::gamma_full(p), x2);
  }
  rep.rhs_set1 = Rational(2, p - 1) * (g1 - gp / (p + 1));
  rep.rhs_set2 = Rational(2, p - 1) * (g1 - gp / p);
  return rep;
}

}  // namespace selberg::zeta
