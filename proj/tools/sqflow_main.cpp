// sqflow command line: forward simulation, dataset generation and
// preprocessing, baseline evaluation, and rendering.
//
// Exit codes: 0 success, 2 usage / invalid input, 1 runtime failure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "sqflow/dataset_io.hpp"
#include "sqflow/inverse_baseline.hpp"
#include "sqflow/pgm.hpp"
#include "sqflow/sim_driver.hpp"

namespace fs = std::filesystem;
using namespace sqflow;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SimParams resolve_params(const std::string& params_file) {
  SimParams p;
  if (!params_file.empty()) {
    p = load_params_file(params_file);
  } else {
    p.derive_grid();
    p.validate();
  }
  return p;
}

int resolve_jobs(int jobs) {
  if (jobs < 1) throw UsageError("--jobs must be at least 1");
  if (const char* cap = std::getenv("SQFLOW_THREADS")) {
    const int c = std::atoi(cap);
    if (c >= 1) jobs = std::min(jobs, c);
  }
  return jobs;
}

std::string format_si(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.8e", v);
  return buf;
}

int cmd_simulate(const std::string& pattern_file, std::optional<int> category,
                 std::optional<uint64_t> seed, const std::string& params_file,
                 const std::string& out_dir, bool render) {
  const SimParams params = resolve_params(params_file);
  DropPattern dp;
  if (!pattern_file.empty()) {
    dp = load_pattern_file(pattern_file, params.nozzle_n);
    if (dp.count() == 0) throw UsageError("pattern file has no On pixel");
  } else if (category.has_value()) {
    if (!seed.has_value()) throw UsageError("--category requires --seed");
    dp = make_pattern_random(*category, *seed, params.nozzle_n);
  } else {
    throw UsageError("either --pattern or --category must be given");
  }

  RunResult rr = run(dp, params);
  DatasetPartition part = partition_from_snapshots(rr.snapshots);
  write_partition(part, out_dir);
  if (render) {
    for (size_t i = 0; i < rr.snapshots.size(); ++i) {
      const Snapshot& s = rr.snapshots[i];
      char name[32];
      std::snprintf(name, sizeof(name), "sn_%03zu.pgm", i);
      char comment[96];
      std::snprintf(comment, sizeof(comment), "t=%.8e s h=%.8e m", s.t, s.h);
      write_pgm(fs::path(out_dir) / name, s.imprint.n(), s.imprint.n(),
                render_imprint(s.imprint), comment);
    }
  }
  std::cout << "examples=" << part.size() << " termination=" << to_string(rr.status.reason)
            << " final_t=" << format_si(rr.status.final_t)
            << " final_h=" << format_si(rr.status.final_h) << '\n';
  return 0;
}

int cmd_generate(int category, int sims, uint64_t seed, const std::string& out_root, int jobs,
                 const std::string& params_file) {
  const SimParams params = resolve_params(params_file);
  GenerateSummary sum =
      generate_category(category, sims, seed, params, out_root, resolve_jobs(jobs));
  char mean[32];
  std::snprintf(mean, sizeof(mean), "%.2f", sum.mean_dp);
  std::cout << "category=" << sum.category << " simulations=" << sum.simulations
            << " examples=" << sum.examples << " mean_dp=" << mean
            << " min_crude_recall=" << sum.min_crude_recall << '\n';
  if (!sum.failures.empty()) {
    std::cerr << sum.failures.size() << " simulation(s) failed:\n";
    for (const auto& [idx, msg] : sum.failures)
      std::cerr << "  sim " << idx << ": " << msg << '\n';
    return 1;
  }
  return 0;
}

int cmd_filter(const std::string& in_root, const std::string& out_dir, int window,
               double max_coverage) {
  DatasetPartition all = compile_root(in_root);
  DatasetPartition kept = coverage_filter(all, window, max_coverage);
  write_partition(kept, out_dir);
  std::cout << "examples_in=" << all.size() << " examples_out=" << kept.size() << '\n';
  return 0;
}

int cmd_stats(const std::string& train_dir) {
  const NormStats s = compute_norm_stats(compile_root(train_dir));
  std::cout << "mu_t=" << format_si(s.mu_t) << '\n'
            << "sigma_t=" << format_si(s.sigma_t) << '\n'
            << "mu_h=" << format_si(s.mu_h) << '\n'
            << "sigma_h=" << format_si(s.sigma_h) << '\n';
  return 0;
}

int cmd_baseline(const std::string& dataset_dir, double threshold, bool sweep) {
  DatasetPartition data = compile_root(dataset_dir);
  if (data.size() == 0) throw UsageError("dataset is empty: " + dataset_dir);
  std::vector<PixelScores> preds;
  std::vector<DropPattern> truths;
  preds.reserve(data.size());
  truths.reserve(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    preds.push_back(crude_predict(ImprintImage::from_indices(data.vof[i])));
    truths.push_back(DropPattern::from_indices(data.dp[i]));
  }
  if (sweep) {
    std::vector<double> grid;
    for (int k = 0; k <= 20; ++k) grid.push_back(k / 20.0);
    std::cout << MetricsReport::csv_header() << '\n';
    for (const MetricsReport& m : threshold_sweep(preds, truths, grid))
      std::cout << m.to_csv_row() << '\n';
    return 0;
  }
  MetricsReport m = confusion_micro(preds, truths, threshold);
  m.auc_pr = auc_pr(preds, truths);
  std::cout << m.to_kv_text();
  return 0;
}

int cmd_render(const std::string& dataset_dir, size_t row, const std::string& out_file,
               const std::string& dp_out) {
  DatasetPartition data = compile_root(dataset_dir);
  if (row >= data.size())
    throw UsageError("row " + std::to_string(row) + " out of range (dataset has " +
                     std::to_string(data.size()) + " examples)");
  const ImprintImage img = ImprintImage::from_indices(data.vof[row]);
  char comment[96];
  std::snprintf(comment, sizeof(comment), "t=%.8e s h=%.8e m", data.t[row], data.h[row]);
  write_pgm(out_file, img.n(), img.n(), render_imprint(img), comment);
  if (!dp_out.empty()) {
    const DropPattern dp = DropPattern::from_indices(data.dp[row]);
    write_pgm(dp_out, img.n(), img.n(),
              render_overlay(img, dp, img.n() / dp.n()), comment);
  }
  return 0;
}

int cmd_split(const std::string& root, const std::string& recipe_file,
              const std::string& out_dir) {
  const SplitRecipe recipe = load_split_recipe(recipe_file);
  SplitResult splits = assemble_splits(root, recipe);
  write_partition(splits.train, fs::path(out_dir) / "train");
  write_partition(splits.val, fs::path(out_dir) / "val");
  write_partition(splits.test, fs::path(out_dir) / "test");
  const LeakageReport rep =
      leakage_check({&splits.train, &splits.val, &splits.test});
  std::cout << "train=" << splits.train.size() << " val=" << splits.val.size()
            << " test=" << splits.test.size() << '\n'
            << rep.to_string({"train", "val", "test"});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"squeeze-flow simulation engine and dataset toolchain"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one simulation and write a partition");
  std::string sim_pattern, sim_params, sim_out;
  int sim_category = 0;
  uint64_t sim_seed = 0;
  bool sim_render = false;
  bool sim_has_category = false, sim_has_seed = false;
  sim->add_option("--pattern", sim_pattern, "pattern file (nozzle_n lines of 0/1)");
  sim->add_option("--category", sim_category, "On-pixel count for a random pattern")
      ->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { sim_has_category = true; });
  sim->add_option("--seed", sim_seed, "random seed for --category")
      ->each([&](const std::string&) { sim_has_seed = true; });
  sim->add_option("--params", sim_params, "key=value parameter file");
  sim->add_option("--out", sim_out, "output partition directory")->required();
  sim->add_flag("--render", sim_render, "write one PGM per snapshot");

  // generate
  auto* gen = app.add_subcommand("generate", "seeded batch generation for one category");
  int gen_category = 0, gen_sims = 0, gen_jobs = 1;
  uint64_t gen_seed = 0;
  std::string gen_out, gen_params;
  gen->add_option("--category", gen_category, "On-pixel count")->required();
  gen->add_option("--sims", gen_sims, "number of simulations")->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "base seed")->required();
  gen->add_option("--out", gen_out, "dataset root directory")->required();
  gen->add_option("--jobs", gen_jobs, "parallel simulations (capped by SQFLOW_THREADS)");
  gen->add_option("--params", gen_params, "key=value parameter file");

  // filter
  auto* flt = app.add_subcommand("filter", "drop examples with large local liquid coverage");
  std::string flt_in, flt_out;
  int flt_window = 72;
  double flt_max = 0.90;
  flt->add_option("--in", flt_in, "input dataset root")->required();
  flt->add_option("--out", flt_out, "output partition directory")->required();
  flt->add_option("--window", flt_window, "interrogation window side");
  flt->add_option("--max-coverage", flt_max, "maximum local On-fraction");

  // stats
  auto* sts = app.add_subcommand("stats", "log-normalization statistics of a training set");
  std::string sts_train;
  sts->add_option("--train", sts_train, "training dataset root")->required();

  // baseline
  auto* bas = app.add_subcommand("baseline", "evaluate the max-pool inverse baseline");
  std::string bas_dataset;
  double bas_threshold = 0.5;
  bool bas_sweep = false;
  bas->add_option("--dataset", bas_dataset, "dataset root")->required();
  bas->add_option("--threshold", bas_threshold, "classification threshold");
  bas->add_flag("--sweep", bas_sweep, "print a CSV threshold sweep instead");

  // render
  auto* ren = app.add_subcommand("render", "render one dataset example as PGM");
  std::string ren_dataset, ren_out, ren_dp;
  size_t ren_row = 0;
  ren->add_option("--dataset", ren_dataset, "dataset root")->required();
  ren->add_option("--row", ren_row, "example index")->required();
  ren->add_option("--out", ren_out, "output PGM file")->required();
  ren->add_option("--dp-out", ren_dp, "optional droplet-pattern overlay PGM");

  // split
  auto* spl = app.add_subcommand("split", "assemble train/val/test splits from a recipe");
  std::string spl_root, spl_recipe, spl_out;
  spl->add_option("--root", spl_root, "dataset root")->required();
  spl->add_option("--recipe", spl_recipe, "split recipe file")->required();
  spl->add_option("--out", spl_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(sim_pattern,
                          sim_has_category ? std::optional<int>(sim_category) : std::nullopt,
                          sim_has_seed ? std::optional<uint64_t>(sim_seed) : std::nullopt,
                          sim_params, sim_out, sim_render);
    if (gen->parsed())
      return cmd_generate(gen_category, gen_sims, gen_seed, gen_out, gen_jobs, gen_params);
    if (flt->parsed()) return cmd_filter(flt_in, flt_out, flt_window, flt_max);
    if (sts->parsed()) return cmd_stats(sts_train);
    if (bas->parsed()) return cmd_baseline(bas_dataset, bas_threshold, bas_sweep);
    if (ren->parsed()) return cmd_render(ren_dataset, ren_row, ren_out, ren_dp);
    if (spl->parsed()) return cmd_split(spl_root, spl_recipe, spl_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
