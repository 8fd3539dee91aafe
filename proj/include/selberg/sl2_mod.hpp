#pragma once

#include <array>
#include <vector>

#include "selberg/error.hpp"
#include "selberg/forms.hpp"
#include "selberg/intarith.hpp"
#include "selberg/multiplicity.hpp"

namespace selberg::mult {

inline constexpr i64 kMaxModularLevel = 30;

// SL2(Z/N) as an explicit element list; entries are stored reduced into [0, N).
class SL2ModN {
 public:
  using Element = std::array<i64, 4>;  // a, b, c, d

  explicit SL2ModN(i64 n) : n_(n) {
    if (n < 2) throw DomainError("SL2(Z/N) needs N >= 2");
    if (n > kMaxModularLevel) throw ResourceError("SL2(Z/N) enumeration limited to N <= 30");
    for (i64 a = 0; a < n; ++a)
      for (i64 b = 0; b < n; ++b)
        for (i64 c = 0; c < n; ++c)
          for (i64 d = 0; d < n; ++d)
            if (intarith::mod(a * d - b * c, n) == 1 % n) elements_.push_back({a, b, c, d});
  }

  i64 level() const { return n_; }
  const std::vector<Element>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }

  Element reduce(const forms::MatrixClass& g) const {
    return {intarith::mod(g.g11, n_), intarith::mod(g.g12, n_), intarith::mod(g.g21, n_),
            intarith::mod(g.g22, n_)};
  }
  Element mul(const Element& x, const Element& y) const {
    return {(x[0] * y[0] + x[1] * y[2]) % n_, (x[0] * y[1] + x[1] * y[3]) % n_,
            (x[2] * y[0] + x[3] * y[2]) % n_, (x[2] * y[1] + x[3] * y[3]) % n_};
  }
  Element inv(const Element& x) const {
    return {x[3], intarith::mod(-x[1], n_), intarith::mod(-x[2], n_), x[0]};
  }
  std::size_t code(const Element& x) const {
    return static_cast<std::size_t>(((x[0] * n_ + x[1]) * n_ + x[2]) * n_ + x[3]);
  }

 private:
  i64 n_;
  std::vector<Element> elements_;
};

inline SL2ModN sl2_modN(i64 n) { return SL2ModN(n); }

// Trace of the permutation representation of SL2(Z) on the cosets of a
// congruence subgroup, read off from the finite quotient SL2(Z/N).
class InducedTraceOracle {
 public:
  explicit InducedTraceOracle(const CongruenceGroup& g) : group_(g), sl2_(std::max<i64>(g.level, 2)) {
    std::vector<SL2ModN::Element> sub;
    for (const auto& x : sl2_.elements())
      if (member(x)) sub.push_back(x);
    std::vector<bool> taken(static_cast<std::size_t>(sl2_.level() * sl2_.level() * sl2_.level() * sl2_.level()));
    for (const auto& x : sl2_.elements()) {
      if (taken[sl2_.code(x)]) continue;
      reps_.push_back(x);
      for (const auto& h : sub) taken[sl2_.code(sl2_.mul(x, h))] = true;
    }
    ensure(static_cast<i64>(reps_.size()) == index(group_), "coset count differs from group index");
  }

  std::size_t coset_count() const { return reps_.size(); }

  i64 operator()(const forms::MatrixClass& gamma) const {
    const auto g = sl2_.reduce(gamma);
    i64 count = 0;
    for (const auto& x : reps_)
      if (member(sl2_.mul(sl2_.mul(sl2_.inv(x), g), x))) ++count;
    return count;
  }

 private:
  bool member(const SL2ModN::Element& x) const {
    return group_.is_sl2() || group_.contains(x[0], x[1], x[2], x[3]);
  }

  CongruenceGroup group_;
  SL2ModN sl2_;
  std::vector<SL2ModN::Element> reps_;
};

inline MultiplicityValue induced_trace_oracle_general(const CongruenceGroup& g, const forms::MatrixClass& gamma) {
  return {InducedTraceOracle(g)(gamma), Provenance::Oracle};
}

}  // namespace selberg::mult
