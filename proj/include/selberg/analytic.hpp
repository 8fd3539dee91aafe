#pragma once

#include <cmath>
#include <vector>

#include "selberg/error.hpp"
#include "selberg/forms.hpp"
#include "selberg/intarith.hpp"
#include "selberg/pell.hpp"

namespace selberg::analytic {

inline bool is_squarefree(i64 n) {
  for (const auto& pp : intarith::factorize(n).factors)
    if (pp.r > 1) return false;
  return true;
}

inline bool is_fundamental_discriminant(i64 D) {
  if (!intarith::is_in_frakD(D)) return false;
  if (D % 4 == 1) return is_squarefree(D);
  const i64 m = D / 4;
  return (m % 4 == 2 || m % 4 == 3) && is_squarefree(m);
}

// chi_D(n) for n = 0..D-1, multiplicative from its values at primes.
inline std::vector<int> character_table(i64 D) {
  if (!is_fundamental_discriminant(D)) throw DomainError("not a fundamental discriminant: " + std::to_string(D));
  const auto n = static_cast<std::size_t>(D);
  std::vector<i64> spf(n, 0);
  std::vector<int> chi(n, 0);
  if (D > 1) chi[1] = 1;
  for (std::size_t k = 2; k < n; ++k) {
    if (spf[k] == 0) {
      for (std::size_t m = k; m < n; m += k)
        if (spf[m] == 0) spf[m] = static_cast<i64>(k);
      chi[k] = intarith::discriminant_character(D, static_cast<i64>(k));
    } else {
      chi[k] = chi[static_cast<std::size_t>(spf[k])] * chi[k / static_cast<std::size_t>(spf[k])];
    }
  }
  return chi;
}

// L(1, chi_D) from partial sums S_N, averaged over one full period N in (X, X + D].
inline double l_one(i64 D, i64 periods = 50) {
  const auto chi = character_table(D);
  const i64 X = periods * D;
  double s = 0;
  for (i64 k = 1; k <= X; ++k)
    if (int c = chi[static_cast<std::size_t>(k % D)]) s += c / static_cast<double>(k);
  double tail = 0;
  for (i64 k = X + 1; k <= X + D; ++k)
    if (int c = chi[static_cast<std::size_t>(k % D)])
      tail += c / static_cast<double>(k) * static_cast<double>(X + D - k + 1);
  return s + tail / static_cast<double>(D);
}

struct ClassNumberCheck {
  i64 D;
  i64 h;
  double h_log_eps;
  double sqrt_d_l;
  double rel_error;
};

inline ClassNumberCheck check_class_number_formula(i64 D) {
  const auto fund = pell::fundamental_solution(D);
  const i64 h = forms::class_number(D);
  const double lhs = static_cast<double>(h) * pell::log_epsilon(pell::QuadUnit::of(fund));
  const double rhs = std::sqrt(static_cast<double>(D)) * l_one(D);
  return {D, h, lhs, rhs, std::abs(lhs - rhs) / rhs};
}

}  // namespace selberg::analytic
