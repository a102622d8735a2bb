#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sqflow/params.hpp"
#include "sqflow/sim_driver.hpp"

namespace sqflow {

/// Aligned dataset columns, matching the four-file CSV layout:
/// t.csv / h.csv hold one scalar per row, dp.csv / vof.csv hold the
/// 0-based row-major indices of the On pixels (strictly increasing).
struct DatasetPartition {
  std::vector<double> t;                    // s
  std::vector<double> h;                    // m
  std::vector<std::vector<uint32_t>> dp;    // indices < 400
  std::vector<std::vector<uint32_t>> vof;   // indices < 25600

  size_t size() const { return t.size(); }
  void append(const DatasetPartition& other);
  /// Throws std::invalid_argument on length mismatch, non-increasing rows,
  /// or out-of-range indices (bounds dp_cells / vof_cells).
  void validate(uint32_t dp_cells = 400, uint32_t vof_cells = 25600) const;
};

DatasetPartition partition_from_snapshots(const std::vector<Snapshot>& snaps);

/// Writes t.csv, h.csv, dp.csv, vof.csv into `dir` (created if needed).
/// Scalars use scientific notation with 9 significant digits.
void write_partition(const DatasetPartition& p, const std::filesystem::path& dir);
DatasetPartition read_partition(const std::filesystem::path& dir);

/// Concatenates every partition directory found under `root` (any depth),
/// in lexicographic path order. A directory qualifies when it holds all
/// four CSV files. `root` itself may be a partition directory.
DatasetPartition compile_root(const std::filesystem::path& root);

/// Removes examples whose vof image contains any fully-interior window of
/// `window` x `window` pixels with On-fraction strictly above
/// `max_local_coverage`.
DatasetPartition coverage_filter(const DatasetPartition& p, int window = 72,
                                 double max_local_coverage = 0.90, int image_n = 160);

/// Mean / population standard deviation of ln(t) and ln(h) over a training
/// partition. Throws on fewer than two rows, non-positive values, or zero
/// variance.
struct NormStats {
  double mu_t = 0.0, sigma_t = 0.0;
  double mu_h = 0.0, sigma_h = 0.0;
};

NormStats compute_norm_stats(const DatasetPartition& training);
double normalize(double x, double mu, double sigma);
double denormalize(double y, double mu, double sigma);

/// Rows that share a dp index-list across different splits.
struct LeakageViolation {
  std::vector<uint32_t> dp;
  std::vector<size_t> splits;  // indices into the checked list
};

struct LeakageReport {
  std::vector<LeakageViolation> violations;
  bool passed() const { return violations.empty(); }
  std::string to_string(const std::vector<std::string>& split_names = {}) const;
};

LeakageReport leakage_check(const std::vector<const DatasetPartition*>& splits);

/// Batch generation: n_sims seeded simulations of one category, one
/// partition directory per simulation under <out_root>/<category>/sim_NNNN.
struct GenerateSummary {
  int category = 0;
  int simulations = 0;
  size_t examples = 0;
  double mean_dp = 0.0;          // mean On count over examples
  double min_crude_recall = 1.0; // engine self-check of the max-pool baseline
  std::vector<std::pair<int, std::string>> failures;  // sim index, message
};

GenerateSummary generate_category(int category, int n_sims, uint64_t seed,
                                  const SimParams& params, const std::filesystem::path& out_root,
                                  int jobs = 1);

/// Split recipe: fraction of each category's simulations assigned to the
/// train / val / test splits, from a key=value file with lines like
/// "train.1 = 0.125". Simulations are assigned by consecutive index ranges
/// in lexicographic directory order, so splits never share a simulation.
struct SplitRecipe {
  std::map<int, double> train, val, test;
};

SplitRecipe load_split_recipe(const std::filesystem::path& file);

struct SplitResult {
  DatasetPartition train, val, test;
};

SplitResult assemble_splits(const std::filesystem::path& root, const SplitRecipe& recipe);

}  // namespace sqflow
