#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "selberg/error.hpp"
#include "selberg/forms.hpp"
#include "selberg/intarith.hpp"
#include "selberg/numeric.hpp"

namespace selberg::mult {

using forms::MatrixClass;
using intarith::PrimePower;

enum class Family { Gamma0, Gamma1, GammaFull };

struct CongruenceGroup {
  Family family = Family::Gamma0;
  i64 level = 1;
  std::vector<PrimePower> factors;

  static CongruenceGroup make(Family family, i64 level) {
    if (level < 1) throw DomainError("congruence level must be positive");
    CongruenceGroup g{family, level, {}};
    if (level > 1) g.factors = intarith::factorize(level).factors;
    return g;
  }
  static CongruenceGroup gamma0(i64 n) { return make(Family::Gamma0, n); }
  static CongruenceGroup gamma1(i64 n) { return make(Family::Gamma1, n); }
  static CongruenceGroup gamma_full(i64 n) { return make(Family::GammaFull, n); }
  static CongruenceGroup sl2() { return make(Family::Gamma0, 1); }

  bool is_sl2() const { return level == 1; }

  std::string name() const {
    if (is_sl2()) return "SL2(Z)";
    const char* stem = family == Family::Gamma0 ? "Gamma0" : family == Family::Gamma1 ? "Gamma1" : "Gamma";
    return std::string(stem) + "(" + std::to_string(level) + ")";
  }

  // Membership of a matrix reduced mod the level.
  bool contains(i64 a, i64 b, i64 c, i64 d) const {
    const i64 n = level;
    auto zero = [n](i64 v) { return intarith::mod(v, n) == 0; };
    auto same_sign_unit = [&] { return (zero(a - 1) && zero(d - 1)) || (zero(a + 1) && zero(d + 1)); };
    switch (family) {
      case Family::Gamma0: return zero(c);
      case Family::Gamma1: return zero(c) && same_sign_unit();
      case Family::GammaFull: return zero(b) && zero(c) && same_sign_unit();
    }
    return false;
  }
};

enum class Provenance { ClosedForm, Oracle };

struct MultiplicityValue {
  Rational value;
  Provenance provenance = Provenance::ClosedForm;
};

inline i64 index(const CongruenceGroup& g) {
  const i64 n = g.level;
  if (n == 1) return 1;
  Rational v = n;
  switch (g.family) {
    case Family::Gamma0:
      for (const auto& pp : g.factors) v *= Rational(pp.p + 1, pp.p);
      break;
    case Family::Gamma1:
    case Family::GammaFull:
      if (n == 2) return g.family == Family::Gamma1 ? 3 : 6;
      v = g.family == Family::Gamma1 ? Rational(n * n, 2) : Rational(n * n * n, 2);
      for (const auto& pp : g.factors) v *= Rational(pp.p * pp.p - 1, pp.p * pp.p);
      break;
  }
  ensure(is_integer(v), "group index is not an integer");
  return static_cast<i64>(boost::multiprecision::numerator(v));
}

namespace detail {

struct LocalData {
  i64 d;  // (t^2 - 4)/u^2
  int k;  // min(v_p(u), r)
};

inline LocalData local(i64 p, int r, i64 t, i64 u) {
  const i64 disc = t * t - 4;
  if (t < 3 || u < 1 || disc % (u * u) != 0 || !intarith::is_in_frakD(disc / (u * u)))
    throw DomainError("(t, u) does not define an admissible discriminant");
  return {disc / (u * u), std::min(intarith::valuation(p, u), r)};
}

// Points of P^1(Z/2^e) fixed by a matrix whose off-diagonal part is primitive
// and whose discriminant is d.
inline i64 fixed_points_2(int e, i64 d) {
  const int top = e + 2;
  const int v = intarith::valuation(2, d);
  if (v >= top) return i64{1} << (top / 2 - 1);
  if (v % 2 != 0) return 0;
  const int m = v / 2;
  const i64 odd = d >> v;
  const int f = top - 2 * m;
  i64 c = 0;
  if (f == 1) c = 1;
  else if (f == 2) c = intarith::mod(odd, 4) == 1 ? 2 : 0;
  else c = intarith::mod(odd, 8) == 1 ? 4 : 0;
  return c * (i64{1} << m) / 2;
}

}  // namespace detail

// Trace of the permutation action on SL2(Z)/Gamma0(p^r) for any matrix with
// invariants (t, u).
inline i64 L0(i64 p, int r, i64 t, i64 u) {
  const auto [d, k] = detail::local(p, r, t, u);
  if (k >= r) return intarith::ipow(p, r - 1) * (p + 1);
  if (p == 2) return (i64{1} << k) * detail::fixed_points_2(r - k, d);
  const int ell = intarith::valuation(p, d);
  if (ell >= r - k) return intarith::ipow(p, (r + k) / 2);
  if (ell % 2 == 0 && intarith::kronecker(d / intarith::ipow(p, ell), p) == 1)
    return 2 * intarith::ipow(p, ell / 2 + k);
  return 0;
}

// The case table for L0 exactly as printed, rows in order, first match wins.
// Agrees with L0 for odd p and for 2 and 4; differs for higher powers of 2.
inline i64 L0_published(i64 p, int r, i64 t, i64 u) {
  if (p != 2) return L0(p, r, t, u);
  const auto [d, k] = detail::local(p, r, t, u);
  const int vu = intarith::valuation(2, u);
  if (r == 1) {
    if (vu >= 1) return 3;
    return d % 4 == 0 ? 1 : 0;
  }
  if (vu >= r) return 3 * (i64{1} << (r - 1));
  const int vd = intarith::valuation(2, d);
  if (vu == r - 1 || (vu == r - 2 && vd >= 3)) return i64{1} << (r - 1);
  if (vd >= r - k && k <= r - 3) return i64{1} << ((r + k) / 2);
  if (vd % 2 == 0 && intarith::mod(d >> vd, 8) == 1) {
    const int m = vd / 2;
    if (1 < 2 * m && 2 * m < r - k - 2) return i64{1} << (m + k + 2);
    if (m == (r - k - 1) / 2) return i64{1} << (m + k + 1);
  }
  return 0;
}

// The Gamma1 local factor as printed: p^{2r-2}(p^2-1) when p^r | u,
// p^{r+k-1}(p-1) when p^k || u, k <= r-1 and p^{r-k} | d, otherwise 0.
inline i64 L1(i64 p, int r, i64 t, i64 u) {
  const auto [d, k] = detail::local(p, r, t, u);
  if (k >= r) return intarith::ipow(p, 2 * r - 2) * (p * p - 1);
  if (intarith::valuation(p, d) >= r - k) return intarith::ipow(p, r + k - 1) * (p - 1);
  return 0;
}

// Points of P^1(Z/p^r) fixed by a matrix of invariants (t, u) whose eigenvalue
// on the fixed line is sign (mod p^r); zero unless t = 2 sign mod p^r.
inline i64 signed_fixed_points(i64 p, int r, i64 t, i64 u, int sign) {
  const auto [d, k] = detail::local(p, r, t, u);
  const i64 q = intarith::ipow(p, r);
  const i64 s = t - 2 * sign;
  if (intarith::mod(s, q) != 0) return 0;
  const int w = intarith::valuation(p, u);
  const int sigma = intarith::valuation(p, s);
  int alpha;
  if (p != 2) alpha = std::min(w, sigma);
  else if (sigma < w) alpha = sigma - 1;
  else if (sigma == w) alpha = d % 2 == 0 ? w - 1 : w;
  else alpha = d % 2 != 0 ? w - 1 : w;
  const int beta = sigma - alpha;
  if (alpha >= r) return intarith::ipow(p, r - 1) * (p + 1);
  if (beta >= r) return intarith::ipow(p, alpha);
  return 0;
}

inline Rational gamma1_multiplicity(const CongruenceGroup& g, i64 t, i64 u) {
  Rational total = 0;
  for (int sign : {1, -1}) {
    if (intarith::mod(t - 2 * sign, g.level) != 0) continue;
    i64 prod = 1;
    for (const auto& [p, r] : g.factors) prod *= signed_fixed_points(p, r, t, u, sign);
    total += prod;
  }
  return total * Rational(intarith::euler_phi(g.level), 2);
}

// gamma in Gamma(N) up to sign: N | u and the scalar part (t - N (d u/N mod 2))/2
// is +-1 mod N.
inline bool in_principal_congruence(i64 n, i64 t, i64 u) {
  if (u % n != 0) return false;
  const i64 d = (t * t - 4) / (u * u);
  const i64 s = t - n * intarith::mod(d * (u / n), 2);
  return intarith::mod(s - 2, 2 * n) == 0 || intarith::mod(s + 2, 2 * n) == 0;
}

inline MultiplicityValue M(const CongruenceGroup& g, i64 t, i64 u) {
  detail::local(2, 1, t, u);
  if (g.is_sl2()) return {1};
  switch (g.family) {
    case Family::Gamma0: {
      i64 prod = 1;
      for (const auto& [p, r] : g.factors) prod *= L0(p, r, t, u);
      return {prod};
    }
    case Family::Gamma1: {
      if (g.level == 2) return M(CongruenceGroup::gamma0(2), t, u);
      Rational v = gamma1_multiplicity(g, t, u);
      ensure(is_integer(v), "Gamma1 multiplicity is not integral");
      return {v};
    }
    case Family::GammaFull:
      if (g.level == 2) return {u % 2 == 0 ? 6 : 0};
      return {in_principal_congruence(g.level, t, u) ? index(g) : 0};
  }
  return {0};
}

// The three multiplicity formulas exactly as printed.
inline MultiplicityValue M_published(const CongruenceGroup& g, i64 t, i64 u) {
  detail::local(2, 1, t, u);
  if (g.is_sl2()) return {1};
  const i64 n = g.level;
  const bool t_pm2 = intarith::mod(t - 2, n) == 0 || intarith::mod(t + 2, n) == 0;
  switch (g.family) {
    case Family::Gamma0: {
      i64 prod = 1;
      for (const auto& [p, r] : g.factors) prod *= L0_published(p, r, t, u);
      return {prod};
    }
    case Family::Gamma1: {
      if (n == 2) return M_published(CongruenceGroup::gamma0(2), t, u);
      if (!t_pm2) return {0};
      i64 prod = 1;
      for (const auto& [p, r] : g.factors) prod *= L1(p, r, t, u);
      return {Rational(prod, 2)};
    }
    case Family::GammaFull:
      if (n == 2) return {u % 2 == 0 ? 6 : 0};
      return {(t_pm2 && u % n == 0) ? index(g) : 0};
  }
  return {0};
}

struct LocalFactor {
  PrimePower pp;
  Rational value;
};

// Per-prime factors behind M: L0 for Gamma0; for Gamma1 the fixed-point counts of
// each prime power summed over the signs allowed by t mod N (M is phi(N)/2 times
// the sign-wise product); empty for Gamma(N).
inline std::vector<LocalFactor> local_factors(const CongruenceGroup& g, i64 t, i64 u) {
  std::vector<LocalFactor> out;
  if (g.is_sl2() || g.family == Family::GammaFull) return out;
  for (const auto& pp : g.factors) {
    if (g.family == Family::Gamma0 || g.level == 2) {
      out.push_back({pp, L0(pp.p, pp.r, t, u)});
      continue;
    }
    Rational v = 0;
    for (int sign : {1, -1})
      if (intarith::mod(t - 2 * sign, g.level) == 0) v += signed_fixed_points(pp.p, pp.r, t, u, sign);
    out.push_back({pp, v});
  }
  return out;
}

// Coset representatives of SL2(Z)/Gamma0(p^r) as exact integer matrices.
struct CosetSystem {
  CongruenceGroup group;
  std::vector<MatrixClass> representatives;
};

inline CosetSystem coset_reps_gamma0(i64 p, int r) {
  if (!intarith::is_prime(p) || r < 1) throw DomainError("coset_reps_gamma0 needs a prime power");
  const i64 q = intarith::ipow(p, r);
  if (q > intarith::kExhaustionBound) throw ResourceError("coset system above exhaustion bound");
  CosetSystem sys{CongruenceGroup::gamma0(q), {}};
  for (i64 m = 0; m < q; ++m) sys.representatives.push_back({1, 0, m, 1});
  for (i64 l = 0; l < q / p; ++l) sys.representatives.push_back({l * p, -1, 1, 0});
  return sys;
}

inline MatrixClass inverse(const MatrixClass& g) { return {g.g22, -g.g12, -g.g21, g.g11}; }

// Any two representatives lie in different cosets and the count equals the index.
inline bool is_complete_system(const CosetSystem& sys) {
  const auto& reps = sys.representatives;
  if (static_cast<i64>(reps.size()) != index(sys.group)) return false;
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i + 1; j < reps.size(); ++j) {
      MatrixClass h = inverse(reps[i]) * reps[j];
      if (sys.group.contains(h.g11, h.g12, h.g21, h.g22)) return false;
    }
  return true;
}

// Counts m mod p^r with g12 m^2 + (g11 - g22) m - g21 = 0 and l mod p^{r-1} with
// p^2 g21 l^2 + p (g11 - g22) l - g12 = 0, both modulo p^r.
inline i64 induced_trace_oracle_prime_power(i64 p, int r, const MatrixClass& g) {
  const i64 first = intarith::count_congruence_roots(g.g12, g.g11 - g.g22, -g.g21, p, r);
  const i64 q = intarith::ipow(p, r);
  i64 second = 0;
  for (i64 l = 0; l < q / p; ++l) {
    i128 v = static_cast<i128>(p) * p * g.g21 * l * l + static_cast<i128>(p) * (g.g11 - g.g22) * l - g.g12;
    if (v % q == 0) ++second;
  }
  return first + second;
}

}  // namespace selberg::mult
