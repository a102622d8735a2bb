#include "sqflow/dataset_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sqflow/inverse_baseline.hpp"
#include "sqflow/rng.hpp"

namespace sqflow {

namespace fs = std::filesystem;

void DatasetPartition::append(const DatasetPartition& other) {
  t.insert(t.end(), other.t.begin(), other.t.end());
  h.insert(h.end(), other.h.begin(), other.h.end());
  dp.insert(dp.end(), other.dp.begin(), other.dp.end());
  vof.insert(vof.end(), other.vof.begin(), other.vof.end());
}

void DatasetPartition::validate(uint32_t dp_cells, uint32_t vof_cells) const {
  if (t.size() != h.size() || t.size() != dp.size() || t.size() != vof.size())
    throw std::invalid_argument("partition: column length mismatch");
  auto check_rows = [](const std::vector<std::vector<uint32_t>>& rows, uint32_t bound,
                       const char* name) {
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) {
        if (row[i] >= bound)
          throw std::invalid_argument(std::string(name) + ": index out of range");
        if (i > 0 && row[i] <= row[i - 1])
          throw std::invalid_argument(std::string(name) + ": indices must strictly increase");
      }
    }
  };
  check_rows(dp, dp_cells, "dp");
  check_rows(vof, vof_cells, "vof");
}

DatasetPartition partition_from_snapshots(const std::vector<Snapshot>& snaps) {
  DatasetPartition p;
  p.t.reserve(snaps.size());
  p.h.reserve(snaps.size());
  p.dp.reserve(snaps.size());
  p.vof.reserve(snaps.size());
  for (const Snapshot& s : snaps) {
    p.t.push_back(s.t);
    p.h.push_back(s.h);
    p.dp.push_back(s.dp.on_indices());
    p.vof.push_back(s.imprint.on_indices());
  }
  return p;
}

namespace {

std::string format_scalar(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.8e", v);
  return buf;
}

void write_scalar_file(const fs::path& file, const std::vector<double>& col) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  for (double v : col) out << format_scalar(v) << '\n';
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

void write_index_file(const fs::path& file, const std::vector<std::vector<uint32_t>>& rows) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::vector<std::string> read_lines(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<double> parse_scalar_file(const fs::path& file) {
  std::vector<double> out;
  for (const std::string& line : read_lines(file)) {
    if (line.empty()) throw std::runtime_error(file.string() + ": empty scalar row");
    char* end = nullptr;
    double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0')
      throw std::runtime_error(file.string() + ": malformed number '" + line + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::vector<uint32_t>> parse_index_file(const fs::path& file) {
  std::vector<std::vector<uint32_t>> rows;
  for (const std::string& line : read_lines(file)) {
    std::vector<uint32_t> row;
    if (!line.empty()) {
      size_t pos = 0;
      while (pos <= line.size()) {
        size_t comma = line.find(',', pos);
        std::string tok = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
        if (tok.empty()) throw std::runtime_error(file.string() + ": empty index token");
        char* end = nullptr;
        unsigned long v = std::strtoul(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0')
          throw std::runtime_error(file.string() + ": malformed index '" + tok + "'");
        row.push_back(static_cast<uint32_t>(v));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_partition(const DatasetPartition& p, const fs::path& dir) {
  p.validate();
  fs::create_directories(dir);
  write_scalar_file(dir / "t.csv", p.t);
  write_scalar_file(dir / "h.csv", p.h);
  write_index_file(dir / "dp.csv", p.dp);
  write_index_file(dir / "vof.csv", p.vof);
}

DatasetPartition read_partition(const fs::path& dir) {
  DatasetPartition p;
  p.t = parse_scalar_file(dir / "t.csv");
  p.h = parse_scalar_file(dir / "h.csv");
  p.dp = parse_index_file(dir / "dp.csv");
  p.vof = parse_index_file(dir / "vof.csv");
  p.validate();
  return p;
}

static bool is_partition_dir(const fs::path& dir) {
  return fs::exists(dir / "t.csv") && fs::exists(dir / "h.csv") && fs::exists(dir / "dp.csv") &&
         fs::exists(dir / "vof.csv");
}

DatasetPartition compile_root(const fs::path& root) {
  if (!fs::exists(root)) throw std::runtime_error("no such directory: " + root.string());
  std::vector<fs::path> dirs;
  if (is_partition_dir(root)) dirs.push_back(root);
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_directory() && is_partition_dir(entry.path())) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end(),
            [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
  DatasetPartition all;
  for (const fs::path& d : dirs) all.append(read_partition(d));
  return all;
}

DatasetPartition coverage_filter(const DatasetPartition& p, int window,
                                 double max_local_coverage, int image_n) {
  if (window <= 0 || window > image_n)
    throw std::invalid_argument("coverage_filter: window must lie in [1, image side]");
  p.validate();
  const int n = image_n;
  const double limit = max_local_coverage * window * window;
  std::vector<int> sat(static_cast<size_t>(n + 1) * (n + 1));
  DatasetPartition out;
  for (size_t row = 0; row < p.size(); ++row) {
    // Summed-area table of the On pixels.
    std::fill(sat.begin(), sat.end(), 0);
    std::vector<uint8_t> img(static_cast<size_t>(n) * n, 0);
    for (uint32_t idx : p.vof[row]) img[idx] = 1;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        sat[(r + 1) * (n + 1) + (c + 1)] = img[r * n + c] + sat[r * (n + 1) + (c + 1)] +
                                           sat[(r + 1) * (n + 1) + c] - sat[r * (n + 1) + c];
    bool keep = true;
    for (int r = 0; r + window <= n && keep; ++r) {
      for (int c = 0; c + window <= n; ++c) {
        const int sum = sat[(r + window) * (n + 1) + (c + window)] -
                        sat[r * (n + 1) + (c + window)] - sat[(r + window) * (n + 1) + c] +
                        sat[r * (n + 1) + c];
        if (static_cast<double>(sum) > limit) {
          keep = false;
          break;
        }
      }
    }
    if (keep) {
      out.t.push_back(p.t[row]);
      out.h.push_back(p.h[row]);
      out.dp.push_back(p.dp[row]);
      out.vof.push_back(p.vof[row]);
    }
  }
  return out;
}

namespace {

std::pair<double, double> log_mean_std(const std::vector<double>& xs, const char* name) {
  if (xs.size() < 2)
    throw std::invalid_argument(std::string("compute_norm_stats: need >= 2 examples for ") + name);
  double mu = 0.0;
  for (double x : xs) {
    if (!(x > 0.0))
      throw std::invalid_argument(std::string("compute_norm_stats: non-positive ") + name);
    mu += std::log(x);
  }
  mu /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) {
    const double d = std::log(x) - mu;
    var += d * d;
  }
  var /= static_cast<double>(xs.size());  // population variance
  const double sigma = std::sqrt(var);
  if (!(sigma > 0.0))
    throw std::invalid_argument(std::string("compute_norm_stats: zero variance in ") + name);
  return {mu, sigma};
}

}  // namespace

NormStats compute_norm_stats(const DatasetPartition& training) {
  NormStats s;
  std::tie(s.mu_t, s.sigma_t) = log_mean_std(training.t, "t");
  std::tie(s.mu_h, s.sigma_h) = log_mean_std(training.h, "h");
  return s;
}

double normalize(double x, double mu, double sigma) {
  if (!(x > 0.0)) throw std::invalid_argument("normalize: value must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("normalize: sigma must be positive");
  return (std::log(x) - mu) / sigma;
}

double denormalize(double y, double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("denormalize: sigma must be positive");
  return std::exp(mu + sigma * y);
}

LeakageReport leakage_check(const std::vector<const DatasetPartition*>& splits) {
  std::map<std::vector<uint32_t>, std::vector<size_t>> seen;
  for (size_t s = 0; s < splits.size(); ++s) {
    for (const auto& row : splits[s]->dp) {
      auto& where = seen[row];
      if (where.empty() || where.back() != s) where.push_back(s);
    }
  }
  LeakageReport rep;
  for (auto& [pattern, where] : seen) {
    if (where.size() > 1) rep.violations.push_back(LeakageViolation{pattern, where});
  }
  return rep;
}

std::string LeakageReport::to_string(const std::vector<std::string>& split_names) const {
  if (passed()) return "leakage check passed: no droplet pattern shared across splits\n";
  std::ostringstream out;
  out << "leakage check FAILED: " << violations.size() << " shared droplet pattern(s)\n";
  for (const auto& v : violations) {
    out << "  pattern [";
    for (size_t i = 0; i < v.dp.size(); ++i) out << (i ? "," : "") << v.dp[i];
    out << "] in splits:";
    for (size_t s : v.splits) {
      if (s < split_names.size())
        out << ' ' << split_names[s];
      else
        out << ' ' << s;
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::string sim_dir_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "sim_%04d", index);
  return buf;
}

}  // namespace

GenerateSummary generate_category(int category, int n_sims, uint64_t seed,
                                  const SimParams& params, const fs::path& out_root, int jobs) {
  params.validate();
  if (n_sims <= 0) throw std::invalid_argument("generate_category: n_sims must be positive");
  const fs::path cat_dir = out_root / std::to_string(category);
  fs::create_directories(cat_dir);

  struct SimOutcome {
    bool ok = false;
    std::string error;
    size_t examples = 0;
    size_t dp_count = 0;
    double min_recall = 1.0;
  };
  std::vector<SimOutcome> outcomes(static_cast<size_t>(n_sims));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < n_sims; i = next.fetch_add(1)) {
      SimOutcome& oc = outcomes[static_cast<size_t>(i)];
      try {
        const DropPattern dp =
            make_pattern_random(category, derive_seed(seed, static_cast<uint64_t>(i)),
                                params.nozzle_n);
        RunResult rr = run(dp, params);
        DatasetPartition part = partition_from_snapshots(rr.snapshots);
        write_partition(part, cat_dir / sim_dir_name(i));
        oc.examples = part.size();
        oc.dp_count = static_cast<size_t>(dp.count());
        // Self-check: the non-trainable max-pool baseline must keep every
        // firing nozzle recalled on generated data.
        for (const Snapshot& s : rr.snapshots) {
          const PixelScores scores = crude_predict(s.imprint);
          const MetricsReport m = confusion(scores, s.dp, 0.5);
          oc.min_recall = std::min(oc.min_recall, m.recall);
        }
        oc.ok = true;
      } catch (const std::exception& e) {
        oc.error = e.what();
      }
    }
  };

  const int nthreads = std::max(1, std::min(jobs, n_sims));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  GenerateSummary sum;
  sum.category = category;
  sum.simulations = n_sims;
  double dp_weighted = 0.0;
  for (int i = 0; i < n_sims; ++i) {
    const SimOutcome& oc = outcomes[static_cast<size_t>(i)];
    if (!oc.ok) {
      sum.failures.emplace_back(i, oc.error);
      continue;
    }
    sum.examples += oc.examples;
    dp_weighted += static_cast<double>(oc.dp_count) * static_cast<double>(oc.examples);
    sum.min_crude_recall = std::min(sum.min_crude_recall, oc.min_recall);
  }
  sum.mean_dp = sum.examples > 0 ? dp_weighted / static_cast<double>(sum.examples) : 0.0;
  return sum;
}

SplitRecipe load_split_recipe(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open recipe file: " + file.string());
  SplitRecipe recipe;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto notspace = line.find_first_not_of(" \t\r");
    if (notspace == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(file.string() + ":" + std::to_string(lineno) +
                                  ": expected <split>.<category>=<fraction>");
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    auto dot = key.find('.');
    if (dot == std::string::npos)
      throw std::invalid_argument(file.string() + ":" + std::to_string(lineno) +
                                  ": key must look like train.5");
    const std::string split = key.substr(0, dot);
    const int category = std::stoi(key.substr(dot + 1));
    const double frac = std::stod(line.substr(eq + 1));
    if (frac < 0.0 || frac > 1.0)
      throw std::invalid_argument(file.string() + ":" + std::to_string(lineno) +
                                  ": fraction must lie in [0,1]");
    if (split == "train") recipe.train[category] = frac;
    else if (split == "val" || split == "validation") recipe.val[category] = frac;
    else if (split == "test") recipe.test[category] = frac;
    else
      throw std::invalid_argument(file.string() + ":" + std::to_string(lineno) +
                                  ": unknown split '" + split + "'");
  }
  return recipe;
}

SplitResult assemble_splits(const fs::path& root, const SplitRecipe& recipe) {
  // Categories mentioned by any split, ascending.
  std::map<int, std::array<double, 3>> fracs;
  for (const auto& [cat, f] : recipe.train) fracs[cat][0] = f;
  for (const auto& [cat, f] : recipe.val) fracs[cat][1] = f;
  for (const auto& [cat, f] : recipe.test) fracs[cat][2] = f;

  SplitResult out;
  for (const auto& [cat, f] : fracs) {
    if (f[0] + f[1] + f[2] > 1.0 + 1e-12)
      throw std::invalid_argument("split fractions for category " + std::to_string(cat) +
                                  " sum to more than 1");
    const fs::path cat_dir = root / std::to_string(cat);
    if (!fs::exists(cat_dir))
      throw std::runtime_error("no data for category " + std::to_string(cat) + " under " +
                               root.string());
    std::vector<fs::path> sims;
    for (const auto& entry : fs::directory_iterator(cat_dir))
      if (entry.is_directory() && is_partition_dir(entry.path())) sims.push_back(entry.path());
    std::sort(sims.begin(), sims.end(), [](const fs::path& a, const fs::path& b) {
      return a.generic_string() < b.generic_string();
    });
    const double n = static_cast<double>(sims.size());
    const size_t b0 = static_cast<size_t>(std::floor(n * f[0] + 0.5));
    const size_t b1 = b0 + static_cast<size_t>(std::floor(n * f[1] + 0.5));
    const size_t b2 = b1 + static_cast<size_t>(std::floor(n * f[2] + 0.5));
    for (size_t i = 0; i < sims.size(); ++i) {
      if (i < b0) out.train.append(read_partition(sims[i]));
      else if (i < b1) out.val.append(read_partition(sims[i]));
      else if (i < std::min(b2, sims.size())) out.test.append(read_partition(sims[i]));
    }
  }
  return out;
}

}  // namespace sqflow
