#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "selberg/error.hpp"
#include "selberg/numeric.hpp"

namespace selberg::intarith {

inline constexpr i64 kFactorBound = 1'000'000'000'000;  // trial division limit
inline constexpr i64 kExhaustionBound = 1'000'000;      // brute-force residue limit

struct PrimePower {
  i64 p;
  int r;
  i64 value() const {
    i64 v = 1;
    for (int i = 0; i < r; ++i) v *= p;
    return v;
  }
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

struct Factorization {
  i64 value = 1;
  std::vector<PrimePower> factors;
};

inline i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline i64 ipow(i64 base, int exp) {
  i64 v = 1;
  while (exp-- > 0) v *= base;
  return v;
}

inline i64 mulmod(i64 a, i64 b, i64 m) {
  return static_cast<i64>(static_cast<i128>(mod(a, m)) * mod(b, m) % m);
}

struct SqrtResult {
  i64 root;
  bool exact;
  friend bool operator==(const SqrtResult&, const SqrtResult&) = default;
};

inline SqrtResult isqrt(i64 n) {
  if (n < 0) throw DomainError("isqrt of negative integer");
  i64 r = static_cast<i64>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<i128>(r) * r > n) --r;
  while (static_cast<i128>(r + 1) * (r + 1) <= n) ++r;
  return {r, static_cast<i128>(r) * r == n};
}

inline BigInt isqrt(const BigInt& n) {
  if (n < 0) throw DomainError("isqrt of negative integer");
  return boost::multiprecision::sqrt(n);
}

inline bool is_square(i64 n) { return n >= 0 && isqrt(n).exact; }

inline int valuation(i64 p, i64 a) {
  if (a == 0) throw DomainError("infinite valuation: a = 0");
  if (p < 2) throw DomainError("valuation base must be a prime");
  int k = 0;
  while (a % p == 0) {
    a /= p;
    ++k;
  }
  return k;
}

inline int valuation(i64 p, const BigInt& a) {
  if (a == 0) throw DomainError("infinite valuation: a = 0");
  int k = 0;
  BigInt q = a;
  while (q % p == 0) {
    q /= p;
    ++k;
  }
  return k;
}

inline bool is_prime(i64 n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (i64 d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

// Jacobi symbol for odd positive n; callers outside this header reach it only
// through the prime-bottom entry points below.
inline int jacobi_odd(i64 a, i64 n) {
  a = mod(a, n);
  int sign = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      if (i64 r = n % 8; r == 3 || r == 5) sign = -sign;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) sign = -sign;
    a %= n;
  }
  return n == 1 ? sign : 0;
}

inline int kronecker(i64 a, i64 n) {
  if (n == 2 || !is_prime(n)) throw DomainError("kronecker: bottom argument must be an odd prime");
  return jacobi_odd(a, n);
}

// Character of the discriminant d at the prime q: Legendre for odd q, the mod-8
// rule at q = 2.
inline int discriminant_character(i64 d, i64 q) {
  if (q == 2) {
    if (d % 2 == 0) return 0;
    i64 r = mod(d, 8);
    return (r == 1 || r == 7) ? 1 : -1;
  }
  return jacobi_odd(d, q);
}

inline bool is_in_frakD(i64 D) {
  if (D <= 0) return false;
  if (i64 r = D % 4; r != 0 && r != 1) return false;
  return !is_square(D);
}

// Names the first defining predicate that D violates, or "" if D is admissible.
inline std::string frakD_violation(i64 D) {
  if (D <= 0) return std::to_string(D) + " is not positive";
  if (i64 r = D % 4; r != 0 && r != 1) return std::to_string(D) + " is not 0 or 1 mod 4";
  if (is_square(D)) return std::to_string(D) + " is a perfect square";
  return "";
}

inline Factorization factorize(i64 n) {
  if (n < 2) throw DomainError("factorize: n must be at least 2");
  if (n > kFactorBound) throw ResourceError("factorize: n exceeds trial-division bound 10^12");
  Factorization f{n, {}};
  for (i64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    int r = 0;
    while (n % p == 0) {
      n /= p;
      ++r;
    }
    f.factors.push_back({p, r});
  }
  if (n > 1) f.factors.push_back({n, 1});
  return f;
}

inline int moebius(i64 n) {
  if (n == 1) return 1;
  int sign = 1;
  for (const auto& [p, r] : factorize(n).factors) {
    if (r > 1) return 0;
    sign = -sign;
  }
  return sign;
}

inline i64 euler_phi(i64 n) {
  if (n == 1) return 1;
  i64 phi = n;
  for (const auto& pp : factorize(n).factors) phi = phi / pp.p * (pp.p - 1);
  return phi;
}

// Number of m in Z/p^e with A m^2 + B m + C = 0 mod p^e, by exhaustion.
inline i64 count_congruence_roots(i64 A, i64 B, i64 C, i64 p, int e,
                                  i64 bound = kExhaustionBound) {
  if (e < 0) throw DomainError("count_congruence_roots: negative exponent");
  if (!is_prime(p)) throw DomainError("count_congruence_roots: modulus base must be prime");
  i64 q = 1;
  for (int i = 0; i < e; ++i) {
    if (q > bound / p) throw ResourceError("count_congruence_roots: p^e above exhaustion bound");
    q *= p;
  }
  if (q == 1) return 1;
  A = mod(A, q), B = mod(B, q), C = mod(C, q);
  i64 count = 0;
  for (i64 m = 0; m < q; ++m) {
    i128 v = (static_cast<i128>(A) * m % q * m + static_cast<i128>(B) * m + C) % q;
    if (v == 0) ++count;
  }
  return count;
}

}  // namespace selberg::intarith
