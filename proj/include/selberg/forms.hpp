#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "selberg/error.hpp"
#include "selberg/intarith.hpp"
#include "selberg/numeric.hpp"

namespace selberg::forms {

// a x^2 + b x y + c y^2
struct QuadraticForm {
  i64 a = 0, b = 0, c = 0;

  i64 disc() const { return b * b - 4 * a * c; }
  bool primitive() const { return std::gcd(std::gcd(a, b), c) == 1; }
  friend auto operator<=>(const QuadraticForm&, const QuadraticForm&) = default;
};

struct MatrixClass {
  i64 g11 = 1, g12 = 0, g21 = 0, g22 = 1;

  i64 trace() const { return g11 + g22; }
  i64 det() const { return g11 * g22 - g12 * g21; }
  i64 u() const { return std::gcd(std::gcd(g21, g12), g22 - g11); }
  i64 disc() const { return (trace() * trace() - 4) / (u() * u()); }
  bool hyperbolic() const { return std::abs(trace()) > 2; }
  MatrixClass operator*(const MatrixClass& o) const {
    return {g11 * o.g11 + g12 * o.g21, g11 * o.g12 + g12 * o.g22,
            g21 * o.g11 + g22 * o.g21, g21 * o.g12 + g22 * o.g22};
  }
  friend auto operator<=>(const MatrixClass&, const MatrixClass&) = default;
};

namespace detail {

inline void require_indefinite(i64 D) {
  if (D <= 0 || intarith::is_square(D))
    throw DomainError("form discriminant must be positive and nonsquare");
}

inline i64 sq(i64 v) { return v * v; }

}  // namespace detail

// 0 < b < sqrt D and sqrt D - b < 2|a| < sqrt D + b, by comparing squares.
inline bool is_reduced(const QuadraticForm& f) {
  const i64 D = f.disc();
  detail::require_indefinite(D);
  if (f.b <= 0 || detail::sq(f.b) >= D) return false;
  const i64 twice_a = 2 * std::abs(f.a);
  if (detail::sq(twice_a + f.b) <= D) return false;
  const i64 gap = twice_a - f.b;
  return gap <= 0 || detail::sq(gap) < D;
}

// (a, b, c) -> (c, b', (b'^2 - D)/4c) with b' = -b mod 2|c| normalized into
// (-|c|, |c|] when |c| > sqrt D and into (sqrt D - 2|c|, sqrt D) otherwise.
inline QuadraticForm rho_step(const QuadraticForm& f) {
  const i64 D = f.disc();
  detail::require_indefinite(D);
  const i64 s = intarith::isqrt(D).root;
  const i64 width = 2 * std::abs(f.c);
  const i64 low = detail::sq(f.c) > D ? -std::abs(f.c) : s - width;  // b' in (low, low + width]
  const i64 b = low + 1 + intarith::mod(-f.b - low - 1, width);
  return {f.c, b, (b * b - D) / (4 * f.c)};
}

inline QuadraticForm reduce(QuadraticForm f, i64 max_steps = 1'000'000) {
  for (i64 i = 0; !is_reduced(f); ++i) {
    if (i >= max_steps) throw ResourceError("reduction did not terminate");
    f = rho_step(f);
  }
  return f;
}

// All primitive reduced forms of discriminant D, in lexicographic order.
inline std::vector<QuadraticForm> reduced_forms(i64 D) {
  detail::require_indefinite(D);
  std::vector<QuadraticForm> out;
  const i64 s = intarith::isqrt(D).root;
  for (i64 b = (D % 2 == 0 ? 2 : 1); b <= s; b += 2) {
    const i64 n = (D - b * b) / 4;  // = -a c > 0
    for (i64 d = 1; d * d <= n; ++d) {
      if (n % d != 0) continue;
      for (i64 a0 : {d, n / d}) {
        for (i64 a : {a0, -a0}) {
          QuadraticForm f{a, b, -n / a};
          if (f.primitive() && is_reduced(f)) out.push_back(f);
        }
        if (d * d == n) break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Reduced forms partitioned into rho-cycles; each cycle starts at its smallest form.
inline std::vector<std::vector<QuadraticForm>> class_cycles(i64 D) {
  if (auto why = intarith::frakD_violation(D); !why.empty()) throw DomainError("D not admissible: " + why);
  const auto forms = reduced_forms(D);
  std::map<QuadraticForm, bool> seen;
  for (const auto& f : forms) seen[f] = false;
  std::vector<std::vector<QuadraticForm>> cycles;
  for (const auto& start : forms) {
    if (seen[start]) continue;
    std::vector<QuadraticForm> cycle;
    QuadraticForm f = start;
    do {
      auto it = seen.find(f);
      ensure(it != seen.end() && !it->second, "rho_step left the reduced set or merged cycles");
      it->second = true;
      cycle.push_back(f);
      f = rho_step(f);
    } while (f != start);
    cycles.push_back(std::move(cycle));
  }
  return cycles;
}

inline i64 class_number(i64 D) { return static_cast<i64>(class_cycles(D).size()); }

inline std::vector<QuadraticForm> class_representatives(i64 D) {
  std::vector<QuadraticForm> reps;
  for (const auto& cycle : class_cycles(D)) reps.push_back(cycle.front());
  return reps;
}

inline QuadraticForm matrix_to_form(const MatrixClass& g) {
  if (g.det() != 1) throw DomainError("matrix must have determinant 1");
  if (g.trace() < 3) throw DomainError("matrix must be hyperbolic with trace >= 3");
  const i64 u = g.u();
  return {g.g21 / u, (g.g22 - g.g11) / u, -g.g12 / u};
}

inline MatrixClass form_to_matrix(const QuadraticForm& f, i64 t, i64 u) {
  const i64 bu = f.b * u;
  ensure((t - bu) % 2 == 0, "form_to_matrix: t and b u have different parity");
  MatrixClass g{(t - bu) / 2, -f.c * u, f.a * u, (t + bu) / 2};
  ensure(g.det() == 1 && g.trace() == t && g.u() == u, "form_to_matrix: invalid matrix");
  return g;
}

namespace detail {

struct MatrixHash {
  std::size_t operator()(const MatrixClass& m) const {
    std::size_t h = 1469598103934665603ull;
    for (i64 v : {m.g11, m.g12, m.g21, m.g22}) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

}  // namespace detail

// Conjugacy classes of SL2(Z) with trace t and gcd invariant u, counted among
// matrices with entries in [-bound, bound] linked by conjugation with S and T.
inline i64 hyperbolic_class_count_oracle(i64 t, i64 u, i64 bound) {
  if (t < 3 || u < 1 || (t * t - 4) % (u * u) != 0 || !intarith::is_in_frakD((t * t - 4) / (u * u)))
    throw DomainError("hyperbolic_class_count_oracle: d_{t,u} not admissible");
  std::vector<MatrixClass> nodes;
  std::unordered_map<MatrixClass, std::size_t, detail::MatrixHash> index;
  for (i64 x = -bound; x <= bound; ++x) {
    if (std::abs(t - x) > bound) continue;
    const i64 n = x * (t - x) - 1;  // = y z
    const i64 an = std::abs(n);
    for (i64 y0 = 1; y0 <= std::min(an, bound); ++y0) {
      if (an % y0 != 0) continue;
      for (i64 y : {y0, -y0}) {
        MatrixClass g{x, y, n / y, t - x};
        if (std::abs(g.g21) > bound || g.u() != u) continue;
        index.emplace(g, nodes.size());
        nodes.push_back(g);
      }
    }
  }
  std::vector<std::size_t> parent(nodes.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  i64 components = static_cast<i64>(nodes.size());
  auto link = [&](std::size_t i, const MatrixClass& m) {
    auto it = index.find(m);
    if (it == index.end()) return;
    std::size_t a = find(i), b = find(it->second);
    if (a != b) parent[a] = b, --components;
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto [a, b, c, d] = nodes[i];
    link(i, {a - c, a + b - c - d, c, c + d});  // T^-1 g T
    link(i, {a + c, b - a + d - c, c, d - c});  // T g T^-1
    link(i, {d, -c, -b, a});                    // S^-1 g S
  }
  return components;
}

// Doubles the bound until two consecutive counts agree.
inline i64 hyperbolic_class_count(i64 t, i64 u, i64 start_bound = 50, i64 max_bound = 1 << 14) {
  i64 previous = -1;
  for (i64 bound = start_bound; bound <= max_bound; bound *= 2) {
    i64 count = hyperbolic_class_count_oracle(t, u, bound);
    if (count == previous) return count;
    previous = count;
  }
  throw ResourceError("conjugacy orbit count did not stabilize");
}

}  // namespace selberg::forms
