#include "sqflow/inverse_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace sqflow {

namespace {

std::vector<uint8_t> maxpool2(const std::vector<uint8_t>& in, int n) {
  const int m = n / 2;
  std::vector<uint8_t> out(static_cast<size_t>(m) * m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      const uint8_t a = in[static_cast<size_t>(2 * r) * n + 2 * c];
      const uint8_t b = in[static_cast<size_t>(2 * r) * n + 2 * c + 1];
      const uint8_t d = in[static_cast<size_t>(2 * r + 1) * n + 2 * c];
      const uint8_t e = in[static_cast<size_t>(2 * r + 1) * n + 2 * c + 1];
      out[static_cast<size_t>(r) * m + c] = std::max(std::max(a, b), std::max(d, e));
    }
  return out;
}

}  // namespace

PixelScores crude_predict(const ImprintImage& img) {
  const int n = img.n();
  if (n % 8 != 0) throw std::invalid_argument("crude_predict: image side must be divisible by 8");
  std::vector<uint8_t> level(img.wet.data(), img.wet.data() + img.wet.size());
  int side = n;
  for (int k = 0; k < 3; ++k) {
    level = maxpool2(level, side);
    side /= 2;
  }
  PixelScores out;
  out.n = side;
  out.s.resize(level.size());
  for (size_t i = 0; i < level.size(); ++i) out.s[i] = level[i] ? 1.0 : 0.0;
  return out;
}

namespace {

void accumulate_confusion(const PixelScores& pred, const DropPattern& truth, double threshold,
                          MetricsReport& m) {
  if (pred.n != truth.n())
    throw std::invalid_argument("confusion: prediction and truth shapes differ");
  const int n = pred.n;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const bool p = pred.at(r, c) >= threshold;
      const bool t = truth.on(r, c);
      if (p && t) ++m.tp;
      else if (p && !t) ++m.fp;
      else if (!p && t) ++m.fn;
      else ++m.tn;
    }
}

void finalize_metrics(MetricsReport& m) {
  m.precision = (m.tp + m.fp > 0) ? static_cast<double>(m.tp) / (m.tp + m.fp) : 1.0;
  m.recall = (m.tp + m.fn > 0) ? static_cast<double>(m.tp) / (m.tp + m.fn) : 1.0;
  m.f1 = (m.precision + m.recall > 0.0)
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
}

}  // namespace

MetricsReport confusion(const PixelScores& pred, const DropPattern& truth, double threshold) {
  MetricsReport m;
  m.threshold = threshold;
  accumulate_confusion(pred, truth, threshold, m);
  finalize_metrics(m);
  return m;
}

MetricsReport confusion_micro(const std::vector<PixelScores>& preds,
                              const std::vector<DropPattern>& truths, double threshold) {
  if (preds.size() != truths.size())
    throw std::invalid_argument("confusion_micro: list sizes differ");
  MetricsReport m;
  m.threshold = threshold;
  for (size_t i = 0; i < preds.size(); ++i)
    accumulate_confusion(preds[i], truths[i], threshold, m);
  finalize_metrics(m);
  return m;
}

double auc_pr(const std::vector<PixelScores>& preds, const std::vector<DropPattern>& truths) {
  if (preds.empty() || preds.size() != truths.size())
    throw std::invalid_argument("auc_pr: empty or mismatched inputs");
  // Pool all pixels as (score, label).
  std::vector<std::pair<double, uint8_t>> pool;
  long positives = 0;
  for (size_t i = 0; i < preds.size(); ++i) {
    const PixelScores& ps = preds[i];
    const DropPattern& dp = truths[i];
    if (ps.n != dp.n()) throw std::invalid_argument("auc_pr: shape mismatch");
    for (int r = 0; r < ps.n; ++r)
      for (int c = 0; c < ps.n; ++c) {
        const uint8_t lab = dp.on(r, c) ? 1 : 0;
        positives += lab;
        pool.emplace_back(ps.at(r, c), lab);
      }
  }
  if (positives == 0) throw std::invalid_argument("auc_pr: no positive pixel");

  std::sort(pool.begin(), pool.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  // Sweep thresholds at the distinct scores; ties flip together.
  double area = 0.0;
  double prev_recall = 0.0;
  long tp = 0, predicted = 0;
  size_t i = 0;
  while (i < pool.size()) {
    const double score = pool[i].first;
    while (i < pool.size() && pool[i].first == score) {
      tp += pool[i].second;
      ++predicted;
      ++i;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(predicted);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return area;
}

std::vector<MetricsReport> threshold_sweep(const std::vector<PixelScores>& preds,
                                           const std::vector<DropPattern>& truths,
                                           const std::vector<double>& grid) {
  std::vector<MetricsReport> out;
  out.reserve(grid.size());
  for (double th : grid) out.push_back(confusion_micro(preds, truths, th));
  return out;
}

std::string MetricsReport::to_kv_text() const {
  std::ostringstream s;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", threshold);
  s << "threshold=" << buf << '\n';
  if (auc_pr >= 0.0) {
    std::snprintf(buf, sizeof(buf), "%.6f", auc_pr);
    s << "auc_pr=" << buf << '\n';
  }
  std::snprintf(buf, sizeof(buf), "%.6f", precision);
  s << "precision=" << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%.6f", recall);
  s << "recall=" << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%.6f", f1);
  s << "f1=" << buf << '\n';
  s << "tp=" << tp << "\nfp=" << fp << "\nfn=" << fn << "\ntn=" << tn << '\n';
  return s.str();
}

std::string MetricsReport::csv_header() { return "threshold,precision,recall,f1,tp,fp,fn,tn"; }

std::string MetricsReport::to_csv_row() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%ld,%ld,%ld,%ld", threshold, precision,
                recall, f1, tp, fp, fn, tn);
  return buf;
}

}  // namespace sqflow
