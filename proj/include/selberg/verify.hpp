#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selberg/analytic.hpp"
#include "selberg/class_sweep.hpp"
#include "selberg/error.hpp"
#include "selberg/forms.hpp"
#include "selberg/multiplicity.hpp"
#include "selberg/pell.hpp"
#include "selberg/sl2_mod.hpp"
#include "selberg/table.hpp"
#include "selberg/zeta.hpp"

namespace selberg::verify {

using mult::CongruenceGroup;

class BudgetExhausted : public ResourceError {
 public:
  using ResourceError::ResourceError;
};

class Deadline {
 public:
  Deadline() = default;
  explicit Deadline(double seconds)
      : end_(std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                    std::chrono::duration<double>(seconds))) {}
  void check() const {
    if (end_ && std::chrono::steady_clock::now() > *end_) throw BudgetExhausted("verification budget exhausted");
  }

 private:
  std::optional<std::chrono::steady_clock::time_point> end_;
};

struct CheckResult {
  std::string name;
  i64 cases = 0;
  i64 failures = 0;
  std::string first_failure;
  bool informational = false;  // differences are reported, never counted as failure
  double seconds = 0;

  bool ok() const { return informational || failures == 0; }
  void record(bool pass, const std::function<std::string()>& what) {
    ++cases;
    if (pass) return;
    if (failures++ == 0) first_failure = what();
  }
  std::string summary() const {
    std::string s = name + ": " + std::to_string(failures) + (informational ? " differences / " : " mismatches / ") +
                    std::to_string(cases) + " cases";
    if (!first_failure.empty()) s += " (first: " + first_failure + ")";
    return s;
  }
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool ok() const {
    for (const auto& c : checks)
      if (!c.ok()) return false;
    return true;
  }
};

namespace detail {

template <class F>
CheckResult timed(std::string name, F&& body) {
  CheckResult r;
  r.name = std::move(name);
  auto start = std::chrono::steady_clock::now();
  body(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline std::string tu(i64 t, i64 u) { return "t=" + std::to_string(t) + " u=" + std::to_string(u); }

// One matrix per form class for every (t, u) with t in [3, t_max].
template <class F>
void for_each_class_matrix(i64 t_max, const Deadline& dl, F&& f) {
  for (i64 t = 3; t <= t_max; ++t) {
    dl.check();
    for (const auto& m : pell::trace_fiber(t).members) {
      std::vector<forms::MatrixClass> classes;
      for (const auto& form : forms::class_representatives(m.D)) classes.push_back(forms::form_to_matrix(form, t, m.u));
      f(t, m.u, classes);
    }
  }
}

}  // namespace detail

// Smallest u in [1, bound] with D u^2 + 4 a square, as (t, u).
inline std::optional<std::pair<i64, i64>> search_fundamental(i64 D, i64 bound) {
  for (i64 u = 1; u <= bound; ++u) {
    const i128 n = static_cast<i128>(D) * u * u + 4;
    if (n > std::numeric_limits<i64>::max()) return std::nullopt;
    if (auto r = intarith::isqrt(static_cast<i64>(n)); r.exact) return std::pair{r.root, u};
  }
  return std::nullopt;
}

// ---- pell --------------------------------------------------------------------

inline CheckResult pell_norms(i64 d_max, i64 j_max, const Deadline& dl = {}) {
  return detail::timed("Pell norm t^2 - D u^2 = 4 for D <= " + std::to_string(d_max) + ", j <= " + std::to_string(j_max),
                       [&](CheckResult& r) {
                         for (i64 D = 5; D <= d_max; ++D) {
                           if (!intarith::is_in_frakD(D)) continue;
                           if (D % 256 == 0) dl.check();
                           auto fund = pell::fundamental_solution(D);
                           for (auto s = fund; s.j <= j_max; s = pell::next_solution(fund, s))
                             r.record(s.t * s.t - D * s.u * s.u == 4 && s.t >= 3 && s.u >= 1,
                                      [&] { return "D=" + std::to_string(D) + " j=" + std::to_string(s.j); });
                         }
                       });
}

// Where the search terminates it must find the continued-fraction solution; where
// it does not, the continued-fraction u must exceed the bound.
inline CheckResult pell_search(i64 d_below, i64 bound, const Deadline& dl = {}) {
  return detail::timed("fundamental solution vs exhaustive search, D < " + std::to_string(d_below) + ", u <= " +
                           std::to_string(bound),
                       [&](CheckResult& r) {
                         for (i64 D = 5; D < d_below; ++D) {
                           if (!intarith::is_in_frakD(D)) continue;
                           dl.check();
                           auto fund = pell::fundamental_solution(D);
                           auto found = search_fundamental(D, bound);
                           bool pass = found ? fund.t == found->first && fund.u == found->second : fund.u > bound;
                           r.record(pass, [&] { return "D=" + std::to_string(D); });
                         }
                       });
}

inline CheckResult pell_fibers(i64 t_max, const Deadline& dl = {}) {
  return detail::timed("trace fibers are Pell solutions at their index, t <= " + std::to_string(t_max),
                       [&](CheckResult& r) {
                         for (i64 t = 3; t <= t_max; ++t) {
                           if (t % 64 == 0) dl.check();
                           for (const auto& m : pell::trace_fiber(t).members) {
                             auto s = pell::nth_solution(m.D, m.j);
                             r.record(s.t == t && s.u == m.u, [&] { return detail::tu(t, m.u); });
                           }
                         }
                       });
}

inline CheckResult pell_log_scaling(i64 d_max, i64 j_max, const Deadline& dl = {}) {
  return detail::timed("log eps(D)^j = j log eps(D), D <= " + std::to_string(d_max), [&](CheckResult& r) {
    for (i64 D = 5; D <= d_max; ++D) {
      if (!intarith::is_in_frakD(D)) continue;
      if (D % 256 == 0) dl.check();
      auto fund = pell::fundamental_solution(D);
      const double base = pell::log_epsilon(pell::QuadUnit::of(fund));
      for (auto s = pell::next_solution(fund, fund); s.j <= j_max; s = pell::next_solution(fund, s)) {
        const double v = pell::log_epsilon(pell::QuadUnit::of(s));
        r.record(std::abs(v - static_cast<double>(s.j) * base) <= 1e-9 * v,
                 [&] { return "D=" + std::to_string(D) + " j=" + std::to_string(s.j); });
      }
    }
  });
}

// ---- forms -------------------------------------------------------------------

inline CheckResult forms_conjugacy(i64 t_max, const Deadline& dl = {}) {
  return detail::timed("hyperbolic class count vs class number, t <= " + std::to_string(t_max), [&](CheckResult& r) {
    for (i64 t = 3; t <= t_max; ++t)
      for (const auto& m : pell::trace_fiber(t).members) {
        dl.check();
        r.record(forms::hyperbolic_class_count(t, m.u) == forms::class_number(m.D), [&] { return detail::tu(t, m.u); });
      }
  });
}

inline CheckResult forms_sweep(i64 t_max, const Deadline& dl = {}) {
  return detail::timed("class-number sweep vs reduced-form cycles, t <= " + std::to_string(t_max), [&](CheckResult& r) {
    auto swept = sweep::class_number_sweep(t_max);
    for (i64 t = 3; t <= t_max; ++t) {
      if (t % 32 == 0) dl.check();
      for (const auto& c : swept.fiber(t))
        r.record(c.h == forms::class_number(c.D), [&] { return "D=" + std::to_string(c.D); });
    }
  });
}

// ---- multiplicities ------------------------------------------------------------

inline const std::vector<std::pair<i64, int>>& acceptance_prime_powers() {
  static const std::vector<std::pair<i64, int>> v = {{2, 1}, {2, 2}, {2, 3}, {2, 4}, {3, 1}, {3, 2}, {3, 3},
                                                     {5, 1}, {5, 2}, {7, 1}, {7, 2}, {11, 1}, {13, 1}};
  return v;
}

// Per (p^r, t, u): the closed form equals the oracle on every class, and the oracle
// is constant across classes.
inline CheckResult mult_prime_power_oracle(i64 t_max, const std::vector<std::pair<i64, int>>& levels,
                                           const Deadline& dl = {}) {
  return detail::timed("L0 oracle sweep", [&](CheckResult& r) {
    detail::for_each_class_matrix(t_max, dl, [&](i64 t, i64 u, const std::vector<forms::MatrixClass>& classes) {
      for (auto [p, e] : levels) {
        const i64 closed = mult::L0(p, e, t, u);
        bool pass = true;
        for (const auto& g : classes) pass = pass && mult::induced_trace_oracle_prime_power(p, e, g) == closed;
        r.record(pass, [&] { return std::to_string(p) + "^" + std::to_string(e) + " " + detail::tu(t, u); });
      }
    });
  });
}

inline CheckResult mult_general_oracle(const std::vector<CongruenceGroup>& groups, i64 t_max, const Deadline& dl = {}) {
  std::string names;
  for (const auto& g : groups) names += (names.empty() ? "" : ",") + g.name();
  return detail::timed("M closed form vs coset oracle [" + names + "], t <= " + std::to_string(t_max),
                       [&](CheckResult& r) {
                         for (const auto& g : groups) {
                           mult::InducedTraceOracle oracle(g);
                           detail::for_each_class_matrix(
                               t_max, dl, [&](i64 t, i64 u, const std::vector<forms::MatrixClass>& classes) {
                                 const Rational closed = mult::M(g, t, u).value;
                                 bool pass = true;
                                 for (const auto& gamma : classes) pass = pass && oracle(gamma) == closed;
                                 r.record(pass, [&] { return g.name() + " " + detail::tu(t, u); });
                               });
                         }
                       });
}

// Where the printed local table and group formulas disagree with the verified values.
inline std::vector<CheckResult> mult_published_differences(i64 t_max, const Deadline& dl = {}) {
  std::vector<CheckResult> out;
  out.push_back(detail::timed("printed L0 table vs verified L0", [&](CheckResult& r) {
    r.informational = true;
    for (i64 t = 3; t <= t_max; ++t) {
      dl.check();
      for (const auto& m : pell::trace_fiber(t).members)
        for (auto [p, e] : acceptance_prime_powers())
          r.record(mult::L0_published(p, e, t, m.u) == mult::L0(p, e, t, m.u), [&] {
            return std::to_string(p) + "^" + std::to_string(e) + " " + detail::tu(t, m.u) +
                   " printed=" + std::to_string(mult::L0_published(p, e, t, m.u)) +
                   " verified=" + std::to_string(mult::L0(p, e, t, m.u));
          });
    }
  }));
  std::vector<CongruenceGroup> groups;
  for (i64 n : {2, 3, 4, 5, 6, 7, 8, 9, 12})
    for (auto g : {CongruenceGroup::gamma0(n), CongruenceGroup::gamma1(n), CongruenceGroup::gamma_full(n)})
      groups.push_back(g);
  out.push_back(detail::timed("printed M formulas vs verified M", [&](CheckResult& r) {
    r.informational = true;
    for (i64 t = 3; t <= t_max; ++t) {
      dl.check();
      for (const auto& m : pell::trace_fiber(t).members)
        for (const auto& g : groups) {
          Rational printed = mult::M_published(g, t, m.u).value, verified = mult::M(g, t, m.u).value;
          r.record(printed == verified, [&] {
            return g.name() + " " + detail::tu(t, m.u) + " printed=" + to_string(printed) +
                   " verified=" + to_string(verified);
          });
        }
    }
  }));
  return out;
}

// ---- zeta --------------------------------------------------------------------

inline CheckResult zeta_identity(const zeta::DiscriminantTable& tab, const std::vector<i64>& primes,
                                 const std::vector<Rational>& xs) {
  return detail::timed("j-weighted class sums vs Gamma1(p), Gamma(p) counts (exact)", [&](CheckResult& r) {
    for (i64 p : primes)
      for (const auto& x : xs) {
        auto rep = zeta::padic_identity_check(tab, p, x);
        r.record(rep.holds(), [&] {
          return "p=" + std::to_string(p) + " x=" + to_string(x) + ": " + to_string(rep.lhs_set1) + " vs " +
                 to_string(rep.rhs_set1) + ", " + to_string(rep.lhs_set2) + " vs " + to_string(rep.rhs_set2);
        });
      }
  });
}

inline std::vector<CongruenceGroup> sample_groups() {
  return {CongruenceGroup::sl2(),         CongruenceGroup::gamma0(2),     CongruenceGroup::gamma0(6),
          CongruenceGroup::gamma1(5),     CongruenceGroup::gamma_full(3), CongruenceGroup::gamma1(4),
          CongruenceGroup::gamma0(9),     CongruenceGroup::gamma_full(2)};
}

inline CheckResult zeta_inversion(const zeta::DiscriminantTable& tab, const std::vector<CongruenceGroup>& groups,
                                  const std::vector<Rational>& xs, const Deadline& dl = {}) {
  return detail::timed("sum_j pi(x^(1/j))/j = pi_hat(x) (exact)", [&](CheckResult& r) {
    for (const auto& g : groups)
      for (const auto& x : xs) {
        dl.check();
        Rational sum = 0;
        for (i64 j = 1; pell::max_trace_power_below(x, 2 * j) >= 3; ++j) sum += zeta::pi_root(tab, g, x, j) / j;
        r.record(sum == zeta::pi_hat(tab, g, x), [&] { return g.name() + " x=" + to_string(x); });
      }
  });
}

inline CheckResult zeta_termwise_bound(const zeta::DiscriminantTable& tab, const std::vector<CongruenceGroup>& groups,
                                       const std::vector<Rational>& xs, const Deadline& dl = {}) {
  return detail::timed("pi_hat(G) <= index(G) pi_hat(SL2(Z)) (exact)", [&](CheckResult& r) {
    for (const auto& x : xs) {
      const Rational base = zeta::pi_hat(tab, CongruenceGroup::sl2(), x);
      for (const auto& g : groups) {
        dl.check();
        const Rational v = zeta::pi_hat(tab, g, x);
        r.record(v >= 0 && v <= mult::index(g) * base, [&] { return g.name() + " x=" + to_string(x); });
      }
    }
  });
}

struct AnalyticSummary {
  CheckResult check;
  i64 below_1pct = 0;
  double worst = 0;
};

// At least 99% of fundamental D below d_max within 1%, all within 5%.
inline AnalyticSummary analytic_class_number(i64 d_max, const Deadline& dl = {}) {
  AnalyticSummary s;
  s.check = detail::timed("h log eps vs sqrt(D) L(1, chi_D), fundamental D < " + std::to_string(d_max),
                          [&](CheckResult& r) {
                            for (i64 D = 5; D < d_max; ++D) {
                              if (!analytic::is_fundamental_discriminant(D)) continue;
                              if (D % 64 == 1) dl.check();
                              auto c = analytic::check_class_number_formula(D);
                              s.worst = std::max(s.worst, c.rel_error);
                              if (c.rel_error < 0.01) ++s.below_1pct;
                              r.record(c.rel_error < 0.05, [&] { return "D=" + std::to_string(D); });
                            }
                            if (100 * s.below_1pct < 99 * r.cases) {
                              ++r.failures;
                              if (r.first_failure.empty()) r.first_failure = "fewer than 99% within 1%";
                            }
                          });
  return s;
}

// ---- suites ------------------------------------------------------------------

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> v = {"pell", "forms", "mult", "zeta"};
  return v;
}

inline SuiteReport run_suite(const std::string& name, const Deadline& dl = {}) {
  SuiteReport rep{name, {}};
  auto& c = rep.checks;
  if (name == "pell") {
    c.push_back(pell_norms(10'000, 5, dl));
    c.push_back(pell_search(500, 1'000'000, dl));
    c.push_back(pell_fibers(2000, dl));
    c.push_back(pell_log_scaling(2000, 5, dl));
  } else if (name == "forms") {
    c.push_back(forms_conjugacy(8, dl));
    c.push_back(forms_sweep(1000, dl));
  } else if (name == "mult") {
    c.push_back(mult_prime_power_oracle(200, acceptance_prime_powers(), dl));
    std::vector<CongruenceGroup> groups;
    for (i64 n : {2, 3, 4, 5, 6, 8, 9, 12}) {
      groups.push_back(CongruenceGroup::gamma0(n));
      groups.push_back(CongruenceGroup::gamma_full(n));
    }
    for (i64 n : {3, 4, 5, 7, 9}) groups.push_back(CongruenceGroup::gamma1(n));
    c.push_back(mult_general_oracle(groups, 80, dl));
    for (auto& d : mult_published_differences(200, dl)) c.push_back(std::move(d));
  } else if (name == "zeta") {
    dl.check();
    auto tab = zeta::DiscriminantTable::build(Rational(1'000'000));
    c.push_back(zeta_identity(tab, {3, 5, 7}, {Rational(100), Rational(1000)}));
    c.push_back(zeta_inversion(tab, sample_groups(), {Rational(100), Rational(1000), Rational(10000)}, dl));
    c.push_back(zeta_termwise_bound(tab, sample_groups(), {Rational(1000), Rational(100000)}, dl));
    c.push_back(analytic_class_number(5000, dl).check);
  } else {
    throw DomainError("unknown suite: " + name);
  }
  return rep;
}

}  // namespace selberg::verify
