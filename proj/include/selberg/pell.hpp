#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "selberg/error.hpp"
#include "selberg/intarith.hpp"
#include "selberg/numeric.hpp"

namespace selberg::pell {

// One positive solution of t^2 - D u^2 = 4; carries eps(D)^j = (t + u sqrt D)/2.
struct PellSolution {
  i64 D = 0;
  i64 j = 0;
  BigInt t;
  BigInt u;
  friend bool operator==(const PellSolution&, const PellSolution&) = default;
};

// (t + u sqrt D)/2 with norm 1.
struct QuadUnit {
  BigInt t;
  BigInt u;
  i64 D = 0;

  static QuadUnit of(const PellSolution& s) { return {s.t, s.u, s.D}; }

  QuadUnit operator*(const QuadUnit& o) const {
    ensure(D == o.D, "QuadUnit product across discriminants");
    return {(t * o.t + D * u * o.u) / 2, (t * o.u + u * o.t) / 2, D};
  }
  BigInt norm4() const { return t * t - D * u * u; }
};

struct FiberMember {
  i64 u;
  i64 D;
  i64 j;
  friend bool operator==(const FiberMember&, const FiberMember&) = default;
};

struct TraceFiber {
  i64 t = 0;
  std::vector<FiberMember> members;
};

inline void require_frakD(i64 D) {
  if (auto why = intarith::frakD_violation(D); !why.empty()) throw DomainError("D not admissible: " + why);
}

// Continued fraction of (P0 + sqrt D)/2 with P0 = D mod 2. The convergent p/q gives
// t = 2p - P0 q, u = q with t^2 - D u^2 = (-1)^(n+1) 2 Q_{n+1}, so the first step
// with Q = 2 yields the smallest solution of norm +4 or -4.
inline PellSolution fundamental_solution(i64 D) {
  require_frakD(D);
  const i64 p0 = D % 2;
  const i64 s = intarith::isqrt(D).root;
  i64 P = p0, Q = 2;
  BigInt p_prev = 1, p_prev2 = 0, q_prev = 0, q_prev2 = 1;
  for (;;) {
    i64 a = (P + s) / Q;
    BigInt p = a * p_prev + p_prev2;
    BigInt q = a * q_prev + q_prev2;
    p_prev2 = std::exchange(p_prev, p);
    q_prev2 = std::exchange(q_prev, q);
    P = a * Q - P;
    Q = (D - P * P) / Q;
    if (Q != 2) continue;
    BigInt t = 2 * p - p0 * q;
    BigInt n = t * t - D * q * q;
    if (n == 4) return {D, 1, t, q};
    ensure(n == -4, "continued fraction norm identity violated");
    return {D, 1, (t * t + D * q * q) / 2, t * q};
  }
}

inline PellSolution next_solution(const PellSolution& fund, const PellSolution& cur) {
  return {cur.D, cur.j + 1, (fund.t * cur.t + cur.D * fund.u * cur.u) / 2,
          (fund.t * cur.u + fund.u * cur.t) / 2};
}

inline PellSolution nth_solution(const PellSolution& fund, i64 j) {
  if (j < 1) throw DomainError("solution index must be positive");
  PellSolution cur = fund;
  while (cur.j < j) cur = next_solution(fund, cur);
  return cur;
}

inline PellSolution nth_solution(i64 D, i64 j) {
  if (j < 1) throw DomainError("solution index must be positive");
  return nth_solution(fundamental_solution(D), j);
}

// Lucas pair (V_n, U_n) for the unit eps(t): eps(t)^n = (V_n + U_n sqrt(t^2-4))/2.
inline std::pair<BigInt, BigInt> lucas(i64 t, i64 n) {
  BigInt v0 = 2, v1 = t, u0 = 0, u1 = 1;
  if (n == 0) return {v0, u0};
  for (i64 k = 1; k < n; ++k) {
    BigInt v2 = t * v1 - v0, u2 = t * u1 - u0;
    v0 = std::move(v1), v1 = std::move(v2);
    u0 = std::move(u1), u1 = std::move(u2);
  }
  return {v1, u1};
}

namespace detail {

// V_j(t0) and U_j(t0) in 64 bits, or nullopt-like sentinel (-1) when V exceeds cap.
inline std::pair<i64, i64> lucas_capped(i64 t0, i64 j, i64 cap) {
  i128 v0 = 2, v1 = t0, u0 = 0, u1 = 1;
  for (i64 k = 1; k < j; ++k) {
    i128 v2 = t0 * v1 - v0, u2 = t0 * u1 - u0;
    if (v2 > cap) return {-1, -1};
    v0 = v1, v1 = v2, u0 = u1, u1 = u2;
  }
  return {static_cast<i64>(v1), static_cast<i64>(u1)};
}

}  // namespace detail

// Largest j such that eps(t) is the j-th power of a unit (t0 + u0 sqrt d)/2 of the
// order of discriminant d = (t^2-4)/u^2. Such a unit has trace V_j(t0) = t and
// u = U_j(t0) u0, which pins t0 by monotonicity.
inline i64 power_index(i64 t, i64 u) {
  const i64 d = (t * t - 4) / (u * u);
  i64 jmax = 1;
  for (i128 v = 3, prev = 2; v <= t; ++jmax) {
    i128 nv = 3 * v - prev;
    prev = v, v = nv;
  }
  for (i64 j = jmax; j >= 2; --j) {
    i64 lo = 3, hi = t;
    while (lo < hi) {
      i64 mid = lo + (hi - lo) / 2;
      auto [v, _] = detail::lucas_capped(mid, j, t);
      if (v == -1 || v >= t) hi = mid; else lo = mid + 1;
    }
    auto [v, uj] = detail::lucas_capped(lo, j, t);
    if (v != t || u % uj != 0) continue;
    i64 u0 = u / uj;
    if (static_cast<i128>(u0) * u0 * d == static_cast<i128>(lo) * lo - 4) return j;
  }
  return 1;
}

inline i64 solution_index(i64 t, i64 u) {
  if (t < 3 || u < 1) throw DomainError("solution_index requires t >= 3 and u >= 1");
  i64 disc = t * t - 4;
  if (disc % (u * u) != 0) throw DomainError("u^2 does not divide t^2 - 4");
  require_frakD(disc / (u * u));
  return power_index(t, u);
}

inline TraceFiber trace_fiber(i64 t) {
  if (t < 3) throw DomainError("trace_fiber requires t >= 3");
  TraceFiber fiber{t, {}};
  const i64 disc = t * t - 4;
  // u^2 | (t-2)(t+2): collect the prime powers of both factors.
  std::vector<intarith::PrimePower> parts;
  auto absorb = [&](i64 n) {
    if (n < 2) return;
    for (const auto& pp : intarith::factorize(n).factors) {
      auto it = std::find_if(parts.begin(), parts.end(), [&](const auto& q) { return q.p == pp.p; });
      if (it == parts.end()) parts.push_back(pp); else it->r += pp.r;
    }
  };
  absorb(t - 2);
  absorb(t + 2);
  std::vector<i64> us{1};
  for (const auto& [p, r] : parts) {
    std::size_t n = us.size();
    i64 pk = 1;
    for (int k = 1; 2 * k <= r; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < n; ++i) us.push_back(us[i] * pk);
    }
  }
  std::sort(us.begin(), us.end());
  for (i64 u : us) {
    i64 d = disc / (u * u);
    if (!intarith::is_in_frakD(d)) continue;
    fiber.members.push_back({u, d, power_index(t, u)});
  }
  return fiber;
}

inline double log_epsilon(const QuadUnit& q) {
  ensure(q.t >= 3, "log_epsilon requires t >= 3");
  // log(t) - log 2 + log1p(u sqrt(D) / t), with the ratio taken at reduced precision.
  std::size_t bits = boost::multiprecision::msb(q.t) + 1;
  std::size_t shift = bits > 200 ? bits - 200 : 0;
  double ratio = std::sqrt(static_cast<double>(q.D)) *
                 Rational(q.u >> shift, q.t >> shift).convert_to<double>();
  return log_big(q.t) - std::log(2.0) + std::log1p(std::min(ratio, 1.0));
}

inline double log_epsilon_trace(i64 t) {
  double dt = static_cast<double>(t);
  return std::log((dt + std::sqrt((dt - 2) * (dt + 2))) / 2);
}

// (t + u sqrt D)/2 < x, decided exactly: t + u sqrt D < 2x.
inline bool unit_below(const BigInt& t, const BigInt& u, i64 D, const Rational& x) {
  const BigInt& q = boost::multiprecision::denominator(x);
  BigInt gap = 2 * boost::multiprecision::numerator(x) - t * q;  // q (2x - t)
  if (gap <= 0) return false;
  return u * u * D * q * q < gap * gap;
}

// eps(t)^n < x for the unit of trace t.
inline bool trace_power_below(i64 t, i64 n, const Rational& x) {
  auto [v, w] = lucas(t, n);
  return unit_below(v, w, t * t - 4, x);
}

// Largest t >= 2 with eps(t)^n < x; eps(2) = 1 so t = 2 means "no hyperbolic trace".
inline i64 max_trace_power_below(const Rational& x, i64 n) {
  if (n < 1) throw DomainError("exponent must be positive");
  if (x <= 1) return 2;
  double root = std::exp(std::log(to_double(x)) / static_cast<double>(n));
  i64 t = std::max<i64>(2, static_cast<i64>(root + 1.0 / root));
  while (t > 2 && !trace_power_below(t, n, x)) --t;
  while (trace_power_below(t + 1, n, x)) ++t;
  return t;
}

}  // namespace selberg::pell
