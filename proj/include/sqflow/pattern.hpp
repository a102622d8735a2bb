#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sqflow/field.hpp"

namespace sqflow {

/// Nozzle firing map: n x n boolean grid (the low-resolution image).
class DropPattern {
 public:
  DropPattern() = default;
  explicit DropPattern(int n) : grid_(n) {}
  explicit DropPattern(BoolGrid g) : grid_(std::move(g)) {}

  int n() const { return grid_.n(); }
  bool on(int r, int c) const { return grid_.get(r, c); }
  void set(int r, int c, bool v) { grid_.set(r, c, v); }
  int count() const { return grid_.count(); }
  const BoolGrid& grid() const { return grid_; }

  /// Row-major 0-based indices of On pixels, strictly increasing.
  std::vector<uint32_t> on_indices() const;
  static DropPattern from_indices(const std::vector<uint32_t>& idx, int n = 20);

  bool operator==(const DropPattern&) const = default;

 private:
  BoolGrid grid_;
};

/// Uniform sample of `category` distinct On pixels; deterministic in seed.
/// Throws std::invalid_argument unless 1 <= category <= n*n.
DropPattern make_pattern_random(int category, uint64_t seed, int n = 20);

/// Text format: n lines of n characters in {0,1}.
DropPattern parse_pattern_text(const std::string& text, int n = 20);
DropPattern load_pattern_file(const std::filesystem::path& file, int n = 20);
std::string pattern_to_text(const DropPattern& dp);

inline DropPattern rotate_cw(const DropPattern& dp) { return DropPattern(rotate_cw(dp.grid())); }

}  // namespace sqflow
