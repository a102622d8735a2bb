#include "sqflow/pattern.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sqflow/rng.hpp"

namespace sqflow {

std::vector<uint32_t> DropPattern::on_indices() const {
  std::vector<uint32_t> idx;
  const int n = grid_.n();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (grid_.get(r, c)) idx.push_back(static_cast<uint32_t>(r * n + c));
  return idx;
}

DropPattern DropPattern::from_indices(const std::vector<uint32_t>& idx, int n) {
  DropPattern dp(n);
  for (uint32_t i : idx) {
    if (i >= static_cast<uint32_t>(n) * n)
      throw std::invalid_argument("pattern index out of range: " + std::to_string(i));
    dp.set(static_cast<int>(i) / n, static_cast<int>(i) % n, true);
  }
  return dp;
}

DropPattern make_pattern_random(int category, uint64_t seed, int n) {
  const int total = n * n;
  if (category < 1 || category > total)
    throw std::invalid_argument("category must lie in [1, " + std::to_string(total) +
                                "], got " + std::to_string(category));
  // Partial Fisher-Yates over the first `category` slots.
  std::vector<int> cells(total);
  std::iota(cells.begin(), cells.end(), 0);
  Rng rng(seed);
  DropPattern dp(n);
  for (int k = 0; k < category; ++k) {
    const int j = k + static_cast<int>(rng.next_below(static_cast<uint64_t>(total - k)));
    std::swap(cells[k], cells[j]);
    dp.set(cells[k] / n, cells[k] % n, true);
  }
  return dp;
}

DropPattern parse_pattern_text(const std::string& text, int n) {
  DropPattern dp(n);
  std::istringstream in(text);
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= n) throw std::invalid_argument("pattern has more than " + std::to_string(n) + " rows");
    if (static_cast<int>(line.size()) != n)
      throw std::invalid_argument("pattern row " + std::to_string(row) + " must have " +
                                  std::to_string(n) + " characters");
    for (int c = 0; c < n; ++c) {
      if (line[c] != '0' && line[c] != '1')
        throw std::invalid_argument("pattern characters must be 0 or 1");
      dp.set(row, c, line[c] == '1');
    }
    ++row;
  }
  if (row != n) throw std::invalid_argument("pattern must have " + std::to_string(n) + " rows");
  return dp;
}

DropPattern load_pattern_file(const std::filesystem::path& file, int n) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open pattern file: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pattern_text(buf.str(), n);
}

std::string pattern_to_text(const DropPattern& dp) {
  std::string out;
  const int n = dp.n();
  out.reserve(static_cast<size_t>(n) * (n + 1));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) out.push_back(dp.on(r, c) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

}  // namespace sqflow
