// Command-line front end: Pell units, class numbers, multiplicities, geodesic
// counts, class-number sums, verification suites and the discriminant cache.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "selberg/cache.hpp"
#include "selberg/forms.hpp"
#include "selberg/multiplicity.hpp"
#include "selberg/output.hpp"
#include "selberg/pell.hpp"
#include "selberg/verify.hpp"
#include "selberg/zeta.hpp"

using namespace selberg;
using mult::CongruenceGroup;
using output::OutputRecord;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kDomain = 2, kBudget = 3, kCache = 4 };

void note(const std::string& msg) { std::cerr << "selberg: " << msg << '\n'; }

Rational parse_real(const std::string& flag, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const std::exception&) {
    throw DomainError(flag + ": not a number: " + text);
  }
}

CongruenceGroup parse_group(const std::string& name, std::optional<i64> level) {
  static const std::vector<std::pair<std::vector<std::string>, std::optional<mult::Family>>> names = {
      {{"sl2", "SL2", "sl2z", "SL2Z"}, std::nullopt},
      {{"γ0", "Γ0", "g0", "gamma0", "Gamma0"}, mult::Family::Gamma0},
      {{"γ1", "Γ1", "g1", "gamma1", "Gamma1"}, mult::Family::Gamma1},
      {{"γfull", "Γfull", "γ", "Γ", "gfull", "gamma", "Gamma", "full"}, mult::Family::GammaFull},
  };
  for (const auto& [aliases, family] : names)
    for (const auto& a : aliases) {
      if (a != name) continue;
      if (!family) {
        if (level && *level != 1) throw DomainError("SL2(Z) has level 1");
        return CongruenceGroup::sl2();
      }
      if (!level) throw DomainError("--level is required for group " + name);
      return CongruenceGroup::make(*family, *level);
    }
  throw DomainError("unknown group: " + name);
}

struct Context {
  output::Format format = output::Format::Json;
  std::optional<std::string> cache_flag;
  std::vector<OutputRecord> records;

  zeta::DiscriminantTable table(const Rational& needed) const {
    auto path = cache::resolve_path(cache_flag);
    return cache::load_or_build(path, needed, note);
  }
};

// ---- commands ----------------------------------------------------------------

void cmd_pell(Context& ctx, i64 D, std::optional<i64> j) {
  auto fund = pell::fundamental_solution(D);
  auto s = pell::nth_solution(fund, j.value_or(1));
  ctx.records.push_back(OutputRecord{}
                            .add("D", s.D)
                            .add("j", s.j)
                            .add("t", s.t)
                            .add("u", s.u)
                            .add("log_eps", pell::log_epsilon(pell::QuadUnit::of(s))));
}

void cmd_classnum(Context& ctx, std::optional<i64> D, const std::vector<i64>& range) {
  auto emit = [&](i64 d) { ctx.records.push_back(OutputRecord{}.add("D", d).add("h", forms::class_number(d))); };
  if (D && !range.empty()) throw DomainError("give either D or --range, not both");
  if (D) return emit(*D);
  if (range.size() != 2 || range[0] > range[1]) throw DomainError("--range needs A <= B");
  for (i64 d = range[0]; d <= range[1]; ++d)
    if (intarith::is_in_frakD(d)) emit(d);
}

void cmd_mult(Context& ctx, const CongruenceGroup& g, i64 t, i64 u) {
  if (t < 3 || u < 1) throw DomainError("need t >= 3 and u >= 1");
  auto m = mult::M(g, t, u);
  std::string factors;
  for (const auto& f : mult::local_factors(g, t, u))
    factors += (factors.empty() ? "" : ";") + std::to_string(f.pp.p) + "^" + std::to_string(f.pp.r) + "=" +
               to_string(f.value);
  const i64 d = (t * t - 4) / (u * u);
  ctx.records.push_back(OutputRecord{}
                            .add("group", g.name())
                            .add("level", g.level)
                            .add("index", mult::index(g))
                            .add("t", t)
                            .add("u", u)
                            .add("D", d)
                            .add("j", pell::solution_index(t, u))
                            .add("M", m.value)
                            .add("factors", factors));
}

void cmd_count(Context& ctx, const CongruenceGroup& g, const Rational& x, std::optional<Rational> y) {
  if (x <= 4) throw DomainError("--x must exceed 4");
  const Rational top = y ? x + *y : x;
  auto tab = ctx.table(top);
  OutputRecord rec;
  rec.add("group", g.name()).add("index", mult::index(g)).add("x", x);
  rec.add("pi_hat", zeta::pi_hat(tab, g, x)).add("pi", zeta::pi(tab, g, x));
  if (y) {
    const auto sl2 = CongruenceGroup::sl2();
    const Rational hat_window = zeta::pi_hat(tab, g, top) - zeta::pi_hat(tab, g, x);
    const Rational sl2_window = zeta::pi_hat(tab, sl2, top) - zeta::pi_hat(tab, sl2, x);
    rec.add("y", *y)
        .add("window", zeta::window_count(tab, g, x, *y))
        .add("pi_hat_window", hat_window)
        .add("bound", mult::index(g) * sl2_window)
        .add("within_bound", hat_window <= mult::index(g) * sl2_window);
  }
  ctx.records.push_back(std::move(rec));
}

void cmd_classsum(Context& ctx, i64 p, const Rational& x, const std::string& set, i64 j, int r, bool estimate) {
  if (p < 3 || !intarith::is_prime(p)) throw DomainError("--p must be an odd prime");
  auto tab = ctx.table(x * x);
  zeta::DiscriminantFilter f{zeta::FilterKind::PDividesD, p, j, r};
  auto weights = zeta::Weights::JWeighted;
  if (set == "plain") f.kind = zeta::FilterKind::PDividesD, weights = zeta::Weights::Plain;
  else if (set == "1") f.kind = zeta::FilterKind::Set1;
  else if (set == "2") f.kind = zeta::FilterKind::Set2;
  else if (set == "2r") f.kind = zeta::FilterKind::Set2r;
  else throw DomainError("--set must be plain, 1, 2 or 2r");
  OutputRecord rec;
  rec.add("p", p).add("x", x).add("set", set).add("sum", zeta::class_sum(tab, f, x, weights));
  if (estimate) {
    auto e = zeta::estimate_Cp(tab, p, x);
    rec.add("ratio", e.ratio)
        .add("bracket_low", e.bracket_low)
        .add("bracket_high", e.bracket_high)
        .add("predicted", e.predicted);
  }
  ctx.records.push_back(std::move(rec));
}

int cmd_verify(Context& ctx, const std::string& suite, std::optional<double> budget) {
  verify::Deadline dl = budget ? verify::Deadline(*budget) : verify::Deadline();
  std::vector<std::string> suites = suite == "all" ? verify::suite_names() : std::vector<std::string>{suite};
  bool ok = true;
  try {
    for (const auto& s : suites) {
      auto rep = verify::run_suite(s, dl);
      for (const auto& c : rep.checks) {
        note("[" + s + "] " + c.summary());
        ctx.records.push_back(OutputRecord{}
                                  .add("suite", s)
                                  .add("check", c.name)
                                  .add("cases", c.cases)
                                  .add("mismatches", c.failures)
                                  .add("informational", c.informational)
                                  .add("first", c.first_failure)
                                  .add("status", c.ok() ? "pass" : "FAIL"));
      }
      ok = ok && rep.ok();
    }
  } catch (const verify::BudgetExhausted& e) {
    output::write(std::cout, ctx.records, ctx.format);
    ctx.records.clear();
    note(e.what());
    return kBudget;
  }
  return ok ? kOk : kVerifyFailed;
}

void table_record(Context& ctx, const std::filesystem::path& path, const zeta::DiscriminantTable& tab) {
  ctx.records.push_back(OutputRecord{}
                            .add("path", path.string())
                            .add("cutoff", tab.norm_cutoff())
                            .add("max_trace", tab.max_trace())
                            .add("records", static_cast<i64>(tab.records().size()))
                            .add("checksum", zeta::checksum(tab)));
}

void cmd_table(Context& ctx, bool build, std::optional<std::string> cutoff_text, bool info) {
  if (build == info) throw DomainError("table needs exactly one of --build or --info");
  const auto path = cache::resolve_path(ctx.cache_flag);
  if (build) {
    const Rational cutoff = cutoff_text ? parse_real("--cutoff", *cutoff_text) : cache::default_cutoff();
    if (cutoff < 0) throw DomainError("--cutoff must be nonnegative");
    note("building discriminant table up to norm " + to_string(cutoff));
    return table_record(ctx, path, cache::rebuild(path, cutoff));
  }
  if (cutoff_text) throw DomainError("--cutoff applies to --build only");
  if (!std::filesystem::exists(path)) throw DomainError("no cache at " + path.string());
  try {
    return table_record(ctx, path, zeta::read_table(path));
  } catch (const CacheError& e) {
    note("cache " + path.string() + " is corrupt (" + e.what() + "); rebuilding");
  }
  Rational cutoff = cache::default_cutoff();
  if (auto text = zeta::read_file(path)) {
    auto header = zeta::parse_header(text->substr(0, text->find('\n')));
    if (header) cutoff = header->cutoff;
  }
  table_record(ctx, path, cache::rebuild(path, cutoff));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selberg zeta functions of congruence subgroups: exact arithmetic and geodesic counts"};
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx;
  std::string format = "json";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--cache", ctx.cache_flag, "Discriminant table path (else SELBERG_CACHE, else data dir)");

  i64 D = 0;
  std::optional<i64> j;
  auto* pell = app.add_subcommand("pell", "Pell solution t^2 - D u^2 = 4");
  pell->add_option("D", D)->required();
  pell->add_option("--j", j, "Solution index (default 1)");

  std::optional<i64> cn_D;
  std::vector<i64> range;
  auto* classnum = app.add_subcommand("classnum", "Narrow class number");
  classnum->add_option("D", cn_D);
  classnum->add_option("--range", range)->expected(2);

  std::string group = "sl2";
  std::optional<i64> level;
  i64 t = 0, u = 0;
  auto* mult = app.add_subcommand("mult", "Multiplicity M(t, u) with per-prime factors");
  mult->add_option("--group", group)->required();
  mult->add_option("--level", level);
  mult->add_option("--t", t)->required();
  mult->add_option("--u", u)->required();

  std::string x_text;
  std::optional<std::string> window;
  auto* count = app.add_subcommand("count", "Weighted and prime geodesic counts");
  count->add_option("--group", group);
  count->add_option("--level", level);
  count->add_option("--x", x_text)->required();
  count->add_option("--window", window);

  i64 p = 0, set_j = 1;
  int set_r = 1;
  std::string set = "plain";
  bool estimate = false;
  auto* classsum = app.add_subcommand("classsum", "Class-number sums over p-adic subsets");
  classsum->add_option("--p", p)->required();
  classsum->add_option("--x", x_text)->required();
  classsum->add_option("--set", set, "plain, 1, 2 or 2r");
  classsum->add_option("--j", set_j, "Unit power for --set plain");
  classsum->add_option("--r", set_r, "Exponent for --set 2r");
  classsum->add_flag("--estimate-c", estimate);

  std::string suite = "all";
  std::optional<double> budget;
  auto* verify_cmd = app.add_subcommand("verify", "Oracle and identity suites");
  verify_cmd->add_option("--suite", suite)->check(CLI::IsMember({"pell", "forms", "mult", "zeta", "all"}));
  verify_cmd->add_option("--budget", budget, "Seconds");

  bool build = false, info = false;
  std::optional<std::string> cutoff;
  auto* table = app.add_subcommand("table", "Discriminant table cache");
  table->add_flag("--build", build);
  table->add_flag("--info", info);
  table->add_option("--cutoff", cutoff, "Norm cutoff: all D with eps(D)^2 below it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return e.get_exit_code() == 0 ? kOk : kDomain;
  }
  ctx.format = format == "csv" ? output::Format::Csv : output::Format::Json;

  int code = kOk;
  try {
    if (*pell) cmd_pell(ctx, D, j);
    else if (*classnum) cmd_classnum(ctx, cn_D, range);
    else if (*mult) cmd_mult(ctx, parse_group(group, level), t, u);
    else if (*count)
      cmd_count(ctx, parse_group(group, level), parse_real("--x", x_text),
                window ? std::optional(parse_real("--window", *window)) : std::nullopt);
    else if (*classsum) cmd_classsum(ctx, p, parse_real("--x", x_text), set, set_j, set_r, estimate);
    else if (*verify_cmd) code = cmd_verify(ctx, suite, budget);
    else if (*table) cmd_table(ctx, build, cutoff, info);
  } catch (const DomainError& e) {
    note(e.what());
    return kDomain;
  } catch (const CacheError& e) {
    note(e.what());
    return kCache;
  } catch (const ResourceError& e) {
    note(e.what());
    return kBudget;
  } catch (const std::exception& e) {
    note(std::string("internal error: ") + e.what());
    return kVerifyFailed;
  }
  output::write(std::cout, ctx.records, ctx.format);
  return code;
}
