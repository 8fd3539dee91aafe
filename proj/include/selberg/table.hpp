#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include "selberg/class_sweep.hpp"
#include "selberg/error.hpp"
#include "selberg/numeric.hpp"
#include "selberg/pell.hpp"

namespace selberg::zeta {

struct DiscriminantRecord {
  i64 D = 0;
  i64 h = 0;
  BigInt t1;
  BigInt u1;
  double log_eps = 0;
  friend bool operator==(const DiscriminantRecord&, const DiscriminantRecord&) = default;
};

// One (D, j) pair whose unit eps(D)^j has trace t.
struct FiberEntry {
  i64 u;
  i64 D;
  i64 j;
  i64 h;
};

// All D in the discriminant set with eps(D)^2 < norm_cutoff, indexed both by D
// and by the trace of every power eps(D)^j below the cutoff.
class DiscriminantTable {
 public:
  DiscriminantTable() = default;

  static DiscriminantTable from_records(Rational norm_cutoff, std::vector<DiscriminantRecord> records) {
    DiscriminantTable tab;
    tab.cutoff_ = std::move(norm_cutoff);
    tab.t_max_ = pell::max_trace_power_below(tab.cutoff_, 2);
    std::sort(records.begin(), records.end(), [](const auto& x, const auto& y) { return x.D < y.D; });
    tab.records_ = std::move(records);
    std::vector<std::vector<FiberEntry>> by_trace(static_cast<std::size_t>(std::max<i64>(tab.t_max_ - 2, 0)));
    for (std::size_t i = 0; i < tab.records_.size(); ++i) {
      const auto& rec = tab.records_[i];
      if (i > 0 && tab.records_[i - 1].D == rec.D) throw CacheError("duplicate discriminant " + std::to_string(rec.D));
      if (!intarith::is_in_frakD(rec.D) || rec.h < 1 || rec.t1 * rec.t1 - rec.D * rec.u1 * rec.u1 != 4)
        throw CacheError("invalid record for D=" + std::to_string(rec.D));
      if (rec.t1 > tab.t_max_) throw CacheError("record beyond cutoff: D=" + std::to_string(rec.D));
      const pell::PellSolution fund{rec.D, 1, rec.t1, rec.u1};
      for (auto s = fund; s.t <= tab.t_max_; s = pell::next_solution(fund, s)) {
        const i64 t = s.t.convert_to<i64>();
        by_trace[static_cast<std::size_t>(t - 3)].push_back({s.u.convert_to<i64>(), rec.D, s.j, rec.h});
      }
    }
    tab.offsets_.assign(1, 0);
    for (auto& fiber : by_trace) {
      std::sort(fiber.begin(), fiber.end(), [](const auto& x, const auto& y) { return x.u < y.u; });
      tab.entries_.insert(tab.entries_.end(), fiber.begin(), fiber.end());
      tab.offsets_.push_back(tab.entries_.size());
    }
    return tab;
  }

  // Class numbers from the trace sweep; every D must reappear consistently at
  // each power of its unit.
  static DiscriminantTable build(const Rational& norm_cutoff) {
    const i64 t_max = pell::max_trace_power_below(norm_cutoff, 2);
    const auto swept = sweep::class_number_sweep(t_max);
    std::vector<DiscriminantRecord> records;
    for (i64 t = 3; t <= t_max; ++t)
      for (const auto& c : swept.fiber(t))
        if (c.j == 1) records.push_back({c.D, c.h, t, c.u, round15(pell::log_epsilon({t, c.u, c.D}))});
    auto tab = from_records(norm_cutoff, std::move(records));
    for (i64 t = 3; t <= t_max; ++t) {
      auto expected = swept.fiber(t);
      auto got = tab.fiber(t);
      bool same = expected.size() == got.size();
      for (std::size_t i = 0; same && i < got.size(); ++i)
        same = got[i].u == expected[i].u && got[i].D == expected[i].D && got[i].j == expected[i].j &&
               got[i].h == expected[i].h;
      ensure(same, "sweep fiber inconsistent with record powers at t=" + std::to_string(t));
    }
    return tab;
  }

  const Rational& norm_cutoff() const { return cutoff_; }
  i64 max_trace() const { return t_max_; }
  std::span<const DiscriminantRecord> records() const { return records_; }

  std::span<const FiberEntry> fiber(i64 t) const {
    if (t < 3 || t > t_max_) return {};
    auto i = static_cast<std::size_t>(t - 3);
    return std::span(entries_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }

  const DiscriminantRecord* find(i64 D) const {
    auto it = std::lower_bound(records_.begin(), records_.end(), D, [](const auto& r, i64 d) { return r.D < d; });
    return it != records_.end() && it->D == D ? &*it : nullptr;
  }

  // Whether every series term with unit power below x (norm scale) is present.
  bool covers(const Rational& x) const { return x <= cutoff_; }

 private:
  Rational cutoff_ = 0;
  i64 t_max_ = 2;
  std::vector<DiscriminantRecord> records_;
  std::vector<std::size_t> offsets_{0};
  std::vector<FiberEntry> entries_;
};

// ---- persistence -----------------------------------------------------------

inline constexpr const char* kTableMagic = "# selberg-table v1";

inline std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) h = (h ^ c) * 1099511628211ull;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string table_body(const DiscriminantTable& tab) {
  std::string body = "D,h,t1,u1,log_eps\n";
  for (const auto& r : tab.records())
    body += std::to_string(r.D) + "," + std::to_string(r.h) + "," + r.t1.str() + "," + r.u1.str() + "," +
            format_real(r.log_eps) + "\n";
  return body;
}

inline std::string checksum(const DiscriminantTable& tab) { return fnv1a64(table_body(tab)); }

inline std::string serialize(const DiscriminantTable& tab) {
  std::string body = table_body(tab);
  return std::string(kTableMagic) + " cutoff=" + to_string(tab.norm_cutoff()) +
         " records=" + std::to_string(tab.records().size()) + " checksum=" + fnv1a64(body) + "\n" + body;
}

struct TableHeader {
  Rational cutoff;
  std::size_t records = 0;
  std::string checksum;
};

inline std::optional<TableHeader> parse_header(const std::string& line) {
  std::istringstream in(line);
  std::string hash, magic, version;
  in >> hash >> magic >> version;
  if (hash + " " + magic + " " + version != kTableMagic) return std::nullopt;
  TableHeader h;
  bool cutoff = false, records = false, sum = false;
  for (std::string field; in >> field;) {
    auto eq = field.find('=');
    if (eq == std::string::npos) return std::nullopt;
    std::string key = field.substr(0, eq), value = field.substr(eq + 1);
    try {
      if (key == "cutoff") h.cutoff = parse_rational(value), cutoff = true;
      else if (key == "records") h.records = std::stoul(value), records = true;
      else if (key == "checksum") h.checksum = value, sum = true;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (!cutoff || !records || !sum) return std::nullopt;
  return h;
}

// Throws CacheError on any structural, checksum or consistency failure.
inline DiscriminantTable deserialize(const std::string& text) {
  auto nl = text.find('\n');
  if (nl == std::string::npos) throw CacheError("cache file has no header line");
  auto header = parse_header(text.substr(0, nl));
  if (!header) throw CacheError("unrecognized cache header");
  std::string body = text.substr(nl + 1);
  if (fnv1a64(body) != header->checksum) throw CacheError("cache checksum mismatch");
  std::istringstream in(body);
  std::string line;
  if (!std::getline(in, line) || line != "D,h,t1,u1,log_eps") throw CacheError("cache column header mismatch");
  std::vector<DiscriminantRecord> records;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::istringstream row(line);
    for (std::string c; std::getline(row, c, ',');) cols.push_back(c);
    if (cols.size() != 5) throw CacheError("malformed cache row: " + line);
    try {
      records.push_back({std::stoll(cols[0]), std::stoll(cols[1]), BigInt(cols[2]), BigInt(cols[3]),
                         std::stod(cols[4])});
    } catch (const std::exception&) {
      throw CacheError("malformed cache row: " + line);
    }
  }
  if (records.size() != header->records) throw CacheError("cache record count mismatch");
  auto tab = DiscriminantTable::from_records(header->cutoff, std::move(records));
  if (serialize(tab) != text) throw CacheError("cache is not in canonical form");
  return tab;
}

// Advisory lock on "<path>.lock" held for the lifetime of the object.
class FileLock {
 public:
  FileLock(const std::filesystem::path& path, bool exclusive) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    fd_ = ::open((path.string() + ".lock").c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ >= 0) ::flock(fd_, exclusive ? LOCK_EX : LOCK_SH);
  }
  ~FileLock() {
    if (fd_ >= 0) ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

inline void write_table(const std::filesystem::path& path, const DiscriminantTable& tab) {
  FileLock lock(path, true);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << serialize(tab);
    if (!out) throw CacheError("cannot write cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline DiscriminantTable read_table(const std::filesystem::path& path) {
  FileLock lock(path, false);
  auto text = read_file(path);
  if (!text) throw CacheError("cannot read cache file " + path.string());
  return deserialize(*text);
}

}  // namespace selberg::zeta
