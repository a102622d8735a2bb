#pragma once

#include <string>
#include <vector>

#include "sqflow/core_grid.hpp"
#include "sqflow/pattern.hpp"

namespace sqflow {

/// Per-nozzle droplet likelihood on the pattern grid, values in [0,1].
struct PixelScores {
  int n = 0;
  std::vector<double> s;  // row-major n*n
  double at(int r, int c) const { return s[static_cast<size_t>(r) * n + c]; }
};

/// Non-trainable inverse baseline: three successive 2x2 max-poolings with
/// stride 2 map the 160x160 imprint to 20x20 binary scores (equivalent to
/// an 8x8 block-OR). Throws unless the image side is divisible by 8.
PixelScores crude_predict(const ImprintImage& img);

struct MetricsReport {
  double threshold = 0.5;
  long tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0;  // 1 when nothing is predicted positive
  double recall = 0.0;
  double f1 = 0.0;
  double auc_pr = -1.0;  // < 0 when not computed

  std::string to_kv_text() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

/// Pixel confusion counts and P/R/F1 at a threshold (score >= threshold is
/// predicted On). Single example or micro-averaged over aligned lists.
MetricsReport confusion(const PixelScores& pred, const DropPattern& truth, double threshold);
MetricsReport confusion_micro(const std::vector<PixelScores>& preds,
                              const std::vector<DropPattern>& truths, double threshold);

/// Area under the precision-recall curve over all pixels pooled, swept
/// across the distinct score values (equal scores flip together), using
/// step-wise summation sum_k (R_k - R_{k-1}) * P_k. Throws when no
/// positive pixel exists.
double auc_pr(const std::vector<PixelScores>& preds, const std::vector<DropPattern>& truths);

/// One micro-averaged report per threshold in `grid`.
std::vector<MetricsReport> threshold_sweep(const std::vector<PixelScores>& preds,
                                           const std::vector<DropPattern>& truths,
                                           const std::vector<double>& grid);

}  // namespace sqflow
