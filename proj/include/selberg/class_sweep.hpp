#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

#include "selberg/error.hpp"
#include "selberg/intarith.hpp"
#include "selberg/numeric.hpp"
#include "selberg/pell.hpp"

namespace selberg::sweep {

// h(d_{t,u}) for one member of U(t).
struct FiberClass {
  i64 u;
  i64 D;
  i64 j;
  i64 h;
  friend bool operator==(const FiberClass&, const FiberClass&) = default;
};

struct SweepResult {
  i64 t_max = 2;
  std::vector<std::size_t> offsets{0};  // fiber of t is [offsets[t-3], offsets[t-2])
  std::vector<FiberClass> classes;

  std::span<const FiberClass> fiber(i64 t) const {
    if (t < 3 || t > t_max) return {};
    auto i = static_cast<std::size_t>(t - 3);
    return std::span(classes).subspan(offsets[i], offsets[i + 1] - offsets[i]);
  }
};

namespace detail {

struct Accumulator {
  double log_sum = 0;  // sum of log(M) - log(a), or the exact log of theta for small t
  double inv_sum = 0;  // sum of 1/M, for the first-order correction
};

inline constexpr i64 kExactWeightBelow = 1000;

// U(t) with power indices, using a smallest-prime-factor table for t +- 2.
inline std::vector<pell::FiberMember> fiber_members(i64 t, const std::vector<std::int32_t>& spf) {
  std::vector<std::pair<i64, int>> parts;
  auto absorb = [&](i64 n) {
    while (n > 1) {
      i64 p = spf[static_cast<std::size_t>(n)];
      int r = 0;
      while (n % p == 0) n /= p, ++r;
      auto it = std::find_if(parts.begin(), parts.end(), [&](const auto& q) { return q.first == p; });
      if (it == parts.end()) parts.emplace_back(p, r); else it->second += r;
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
  std::vector<pell::FiberMember> out;
  const i64 disc = t * t - 4;
  for (i64 u : us) {
    const i64 d = disc / (u * u);
    if (!intarith::is_in_frakD(d)) continue;
    out.push_back({u, d, u == 1 ? 1 : pell::power_index(t, u)});
  }
  return out;
}

inline std::vector<i64> prime_divisors(i64 n) {
  std::vector<i64> out;
  for (i64 p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace detail

// Narrow class numbers of every order with a unit of trace t <= t_max.
//
// The reduced forms (a, b, c) with a > 0 and discriminant t^2 - 4 are exactly
// a = a, b = M - m, c = -(mM - 1)/a with m + M = t, m <= a < M and a | mM - 1.
// Along a rho-cycle the numbers (b + sqrt D)/2|a| multiply to the totally
// positive fundamental unit, so summing their logs over a > 0 gives
//   sum over g in U(t) of h(d_{t,g}) log eps(t) / (2 j(t,g)).
// The orders of discriminant d_{t,g} all share eps(t), and the conductor formula
//   h(t^2-4) = h(d_{t,g}) g prod_{q | g} (1 - chi_{d_{t,g}}(q)/q) / j(t,g)
// splits that sum into the individual class numbers.
inline SweepResult class_number_sweep(i64 t_max) {
  SweepResult out;
  if (t_max < 3) return out;
  out.t_max = t_max;
  const auto T = static_cast<std::size_t>(t_max);

  std::vector<std::int32_t> spf(T + 3, 0);
  for (std::size_t i = 2; i < spf.size(); ++i)
    if (spf[i] == 0)
      for (std::size_t k = i; k < spf.size(); k += i)
        if (spf[k] == 0) spf[k] = static_cast<std::int32_t>(i);

  struct Recip { double log, inv; };
  std::vector<Recip> of(T + 1);
  std::vector<double> shift(T + 1);
  for (std::size_t n = 1; n <= T; ++n) {
    of[n] = {std::log(static_cast<double>(n)), 1.0 / static_cast<double>(n)};
    const double t = static_cast<double>(n);
    shift[n] = n >= 3 ? 2.0 / (t + std::sqrt((t - 2) * (t + 2))) : 0.0;  // eps(t)^-1
  }

  std::vector<detail::Accumulator> acc(T + 1);
  auto add_forms = [&](i64 m, i64 a, i64 M) {
    const double log_a = of[static_cast<std::size_t>(a)].log;
    for (; m + M <= t_max && m + M < detail::kExactWeightBelow; M += a) {
      const auto t = static_cast<std::size_t>(m + M);
      acc[t].log_sum += std::log(static_cast<double>(M) - shift[t]) - log_a;
    }
    for (; m + M <= t_max; M += a) {
      const Recip& r = of[static_cast<std::size_t>(M)];
      detail::Accumulator& dst = acc[static_cast<std::size_t>(m + M)];
      dst.log_sum += r.log - log_a;
      dst.inv_sum += r.inv;
    }
  };
  add_forms(1, 1, 2);
  // Stern-Brocot walk over m/a in (0, 1): the node between m1/a1 and m2/a2 has
  // m a1 - a m1 = 1, so the least M = 1/m mod a is a1.
  struct Node { std::int32_t m1, a1, m2, a2; };
  std::vector<Node> stack{{0, 1, 1, 1}};
  while (!stack.empty()) {
    const Node n = stack.back();
    stack.pop_back();
    const i64 m = n.m1 + n.m2, a = n.a1 + n.a2;
    if (m + a + 1 > t_max) continue;
    add_forms(m, a, n.a1 + a);
    const auto mi = static_cast<std::int32_t>(m), ai = static_cast<std::int32_t>(a);
    stack.push_back({n.m1, n.a1, mi, ai});
    stack.push_back({mi, ai, n.m2, n.a2});
  }

  out.offsets.assign(1, 0);
  for (i64 t = 3; t <= t_max; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    const double weight = acc[ti].log_sum - shift[ti] * acc[ti].inv_sum;
    const double log_eps = pell::log_epsilon_trace(t);
    const auto members = detail::fiber_members(t, spf);

    struct Ratio { i128 num, den; };  // h(d_g) = h(t^2-4) num/den
    std::vector<Ratio> ratios;
    double scale = 0;
    for (const auto& mem : members) {
      i128 num = mem.j, den = mem.u;
      for (i64 p : detail::prime_divisors(mem.u)) {
        num *= p;
        den *= p - intarith::discriminant_character(mem.D, p);
      }
      const i128 g = std::gcd(static_cast<i64>(num), static_cast<i64>(den));
      ratios.push_back({num / g, den / g});
      scale += static_cast<double>(num) / static_cast<double>(den) / static_cast<double>(mem.j);
    }
    const double h_top = 2 * weight / (log_eps * scale);
    const i64 h_rounded = std::llround(h_top);
    if (h_rounded < 1 || std::abs(h_top - static_cast<double>(h_rounded)) > 1e-4) {
      std::ostringstream msg;
      msg << "class number sweep: non-integral h for t=" << t << " (" << h_top << ")";
      throw InternalError(msg.str());
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      const i128 num = static_cast<i128>(h_rounded) * ratios[i].num;
      if (num % ratios[i].den != 0) {
        throw InternalError("class number sweep: conductor formula not integral at t=" + std::to_string(t) +
                            ", u=" + std::to_string(members[i].u));
      }
      out.classes.push_back({members[i].u, members[i].D, members[i].j, static_cast<i64>(num / ratios[i].den)});
    }
    out.offsets.push_back(out.classes.size());
  }
  return out;
}

}  // namespace selberg::sweep
