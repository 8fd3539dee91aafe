#pragma once

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "selberg/error.hpp"
#include "selberg/table.hpp"

namespace selberg::cache {

namespace fs = std::filesystem;

// --cache, then SELBERG_CACHE, then the XDG data directory.
inline fs::path resolve_path(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("SELBERG_CACHE"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_DATA_HOME"); xdg && *xdg) return fs::path(xdg) / "selberg" / "table.csv";
  if (const char* home = std::getenv("HOME"); home && *home)
    return fs::path(home) / ".local" / "share" / "selberg" / "table.csv";
  return fs::path("selberg-table.csv");
}

inline const Rational& default_cutoff() {
  static const Rational c(1'000'000);
  return c;
}

using Warn = std::function<void(const std::string&)>;

// Build, persist, and read back; a table that does not survive the round trip
// raises CacheError.
inline zeta::DiscriminantTable rebuild(const fs::path& path, const Rational& cutoff) {
  auto tab = zeta::DiscriminantTable::build(cutoff);
  try {
    zeta::write_table(path, tab);
  } catch (const fs::filesystem_error& e) {
    throw CacheError(std::string("cannot write cache: ") + e.what());
  }
  auto back = zeta::read_table(path);
  if (zeta::checksum(back) != zeta::checksum(tab)) throw CacheError("cache changed while being written");
  return back;
}

// A table covering needed, from the cache when possible. A missing or too small
// cache is rebuilt silently, a corrupt one with a warning.
inline zeta::DiscriminantTable load_or_build(const fs::path& path, const Rational& needed, const Warn& warn) {
  Rational target = needed < default_cutoff() ? default_cutoff() : needed;
  if (fs::exists(path)) {
    try {
      auto tab = zeta::read_table(path);
      if (tab.covers(needed)) return tab;
      if (target < tab.norm_cutoff()) target = tab.norm_cutoff();
    } catch (const CacheError& e) {
      warn("cache " + path.string() + " is corrupt (" + e.what() + "); rebuilding");
    }
  }
  return rebuild(path, target);
}

}  // namespace selberg::cache
