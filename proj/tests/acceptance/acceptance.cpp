// Acceptance suite: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; otherwise only the listed criterion numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lsboost/datagen.hpp"
#include "lsboost/gbm.hpp"
#include "lsboost/io.hpp"
#include "lsboost/metrics.hpp"
#include "lsboost/train.hpp"
#include "oracles.hpp"

using namespace lsboost;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  std::iota(r.begin(), r.end(), std::size_t{0});
  return r;
}

// Datasets and runs shared by criteria 1-3.
struct HaltingRun {
  TrainResult result;
  double worst_penalty = -INFINITY;
  double inv_m = 0.0;
};

const std::vector<HaltingRun>& halting_runs() {
  static const std::vector<HaltingRun> runs = [] {
    std::vector<HaltingRun> out;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(seed);
      const Dataset data = oracles::random_dataset(rng, 500, 3);
      TrainConfig cfg;
      cfg.alpha = 0.02;
      cfg.bound_B = 1.0;
      cfg.oracle = OracleSpec::stump();
      const ResolvedConfig rc = resolve(cfg);
      HaltingRun run{TrainResult{LevelSetModel(rc.grid, 3, WeakHypothesis::constant(0)), {}}};
      run.inv_m = 1.0 / rc.grid.m();
      const auto labels = data.labels();
      auto observer = [&](const RoundTrace& t) {
        for (std::size_t i = 0; i < labels.size(); ++i) {
          const double a = t.rounded[i] - labels[i];
          const double b = t.unrounded[i] - labels[i];
          run.worst_penalty = std::max(run.worst_penalty, a * a - b * b);
        }
      };
      run.result = train(data, cfg, std::nullopt, observer);
      out.push_back(std::move(run));
    }
    return out;
  }();
  return runs;
}

Outcome criterion1() {
  Outcome o;
  int worst = 0;
  for (const auto& run : halting_runs()) {
    worst = std::max(worst, run.result.report.rounds_executed);
    if (run.result.report.rounds_executed > 100 || run.result.report.halt != HaltReason::Converged) o.pass = false;
  }
  o.detail = "max rounds executed " + std::to_string(worst) + " over 20 runs (bound 100)";
  return o;
}

Outcome criterion2() {
  Outcome o;
  std::size_t checked = 0;
  for (const auto& run : halting_runs()) {
    const TrainReport& rep = run.result.report;
    const double threshold = rep.alpha / (2.0 * rep.bound_B);
    const auto kept = rep.retained();
    for (std::size_t t = 1; t < kept.size(); ++t, ++checked)
      if (!(kept[t - 1].mse - kept[t].mse >= threshold)) o.pass = false;
    // the final, discarded round is the one that fell short
    const auto& last = rep.records.back();
    if (last.retained || !(kept.back().mse - last.mse < threshold)) o.pass = false;
  }
  o.detail = std::to_string(checked) + " retained rounds checked exactly";
  return o;
}

Outcome criterion3() {
  Outcome o;
  double worst_margin = -INFINITY;
  for (const auto& run : halting_runs()) {
    if (run.worst_penalty > run.inv_m) o.pass = false;
    worst_margin = std::max(worst_margin, run.worst_penalty - run.inv_m);
  }
  o.detail = "max penalty - 1/m = " + fmt("%.3e", worst_margin);
  return o;
}

Outcome criterion4() {
  Outcome o;
  double worst_probe = -INFINITY;
  double worst_msce = 0.0;
  int runs = 0;
  const OracleSpec learners[] = {OracleSpec::constant(), OracleSpec::linear(), OracleSpec::stump()};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const Dataset data = oracles::random_dataset(rng, 300, 2);
    for (double alpha : {0.02, 0.05}) {
      for (const auto& learner : learners) {
        TrainConfig cfg;
        cfg.alpha = alpha;
        cfg.bound_B = 1.0;
        cfg.oracle = learner;
        const TrainResult r = train(data, cfg);
        if (r.report.halt != HaltReason::Converged) o.pass = false;
        const double probe = probe_round(r.model, data, cfg);
        const double msce = calibration_error(r.model, data).k2;
        if (!(probe < alpha / 2.0)) o.pass = false;
        if (!(msce <= alpha + 1e-12)) o.pass = false;
        worst_probe = std::max(worst_probe, probe / (alpha / 2.0));
        worst_msce = std::max(worst_msce, msce / alpha);
        ++runs;
      }
    }
  }
  o.detail = std::to_string(runs) + " runs; max probe/threshold " + fmt("%.4f", worst_probe) + ", max msce/alpha " +
             fmt("%.4f", worst_msce);
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Grid grid(20);

  int improvers = 0;
  double worst_rel = 0.0;
  while (improvers < 100) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<double> h(n), y(n);
    for (auto& v : h) v = sym(rng);
    for (auto& v : y) v = unit(rng);
    const double v = grid.value(static_cast<int>(rng() % 21));
    double violation = 0.0, second = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      violation += h[i] * (y[i] - v);
      second += h[i] * h[i];
    }
    violation /= static_cast<double>(n);
    second /= static_cast<double>(n);
    if (!(violation > 1e-6)) continue;
    const Improver imp = build_improver(h, y, v);
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = v + imp.eta * h[i];
    double realized = 0.0;
    for (std::size_t i = 0; i < n; ++i) realized += (v - y[i]) * (v - y[i]) - (g[i] - y[i]) * (g[i] - y[i]);
    realized /= static_cast<double>(n);
    const double expected = violation * violation / second;
    const double rel = std::abs(realized - expected) / expected;
    worst_rel = std::max(worst_rel, rel);
    if (!(rel <= 1e-9)) o.pass = false;
    ++improvers;
  }

  int certified = 0;
  while (certified < 1000) {
    const std::size_t n = 1 + rng() % 20;
    std::vector<double> h(n), y(n);
    for (auto& v : h) v = sym(rng);
    for (auto& v : y) v = unit(rng);
    double ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= static_cast<double>(n);
    double improvement = 0.0, corr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      improvement += (ybar - y[i]) * (ybar - y[i]) - (h[i] - y[i]) * (h[i] - y[i]);
      corr += h[i] * (y[i] - ybar);
    }
    improvement /= static_cast<double>(n);
    corr /= static_cast<double>(n);
    if (!(improvement > 0.0)) continue;
    const ViolationCertificate cert = violation_from_improvement(h, y);
    if (!cert.holds || !(corr >= improvement / 2.0) || !(cert.correlation >= cert.improvement / 2.0)) o.pass = false;
    ++certified;
  }
  o.detail = "100 improvers (max rel err " + fmt("%.2e", worst_rel) + "), 1000 certificates";
  return o;
}

struct C0Setup {
  SyntheticSample train;
  SyntheticSample test;
  TrainConfig config;
};

const C0Setup& c0_setup() {
  static const C0Setup s = [] {
    SyntheticSample fit_set = sample_surface(SurfaceSpec{Surface::C0, 100000, 1, 0.0, 1});
    SyntheticSample held_out = sample_surface(SurfaceSpec{Surface::C0, 20000, 2, 0.0, 1}, fit_set.normalization);
    C0Setup c{std::move(fit_set), std::move(held_out), {}};
    c.config.levels_m = 100;
    c.config.bound_B = 1.0;
    c.config.oracle = OracleSpec::stump();
    return c;
  }();
  return s;
}

Outcome criterion6() {
  Outcome o;
  const C0Setup& s = c0_setup();
  const TrainResult r = train(s.train.data, s.config);
  const auto labels = s.test.data.labels();
  const double test_mse = mse(predict_all(r.model, s.test.data), labels);
  const double mean = std::accumulate(labels.begin(), labels.end(), 0.0) / static_cast<double>(labels.size());
  double best_const = 0.0;
  for (double y : labels) best_const += (y - mean) * (y - mean);
  best_const /= static_cast<double>(labels.size());
  o.pass = test_mse <= 0.01 && test_mse <= best_const / 10.0;
  o.detail = "held-out mse " + fmt("%.5f", test_mse) + " (target <= 0.01), best constant " + fmt("%.5f", best_const) +
             ", rounds kept " + std::to_string(r.model.rounds().size()) + ", first-round gain " +
             fmt("%.5f", r.report.records.size() > 1 ? r.report.records[0].mse - r.report.records[1].mse : 0.0) +
             " vs threshold " + fmt("%.4f", r.report.threshold);
  return o;
}

Outcome criterion7() {
  Outcome o;
  const SyntheticSample c1 = sample_surface(SurfaceSpec{Surface::C1, 50000, 3, 0.0, 1});

  GBConfig gbc;
  gbc.oracle = OracleSpec::linear();
  gbc.rounds = 10;
  gbc.learning_rate = 1.0;
  const GBResult gb = gb_train(c1.data, gbc);
  double spread = 0.0;
  for (int t = 1; t <= 10; ++t) spread = std::max(spread, std::abs(gb.records[t].mse - gb.records[1].mse));
  const bool gb_ok = spread <= 1e-10;

  TrainConfig cfg;
  cfg.alpha = 0.002;
  cfg.bound_B = 1.0;
  cfg.oracle = OracleSpec::linear();
  const TrainResult ls = train(c1.data, cfg);
  const auto kept = ls.report.retained();
  int improving = 0;
  std::string gains;
  for (std::size_t t = 1; t < ls.report.records.size(); ++t) {
    const double gain = ls.report.records[t - 1].mse - ls.report.records[t].mse;
    gains += (gains.empty() ? "" : ", ") + fmt("%.5f", gain);
    if (t < kept.size() && gain >= ls.report.threshold) ++improving;
  }
  const bool ls_ok = improving >= 3;
  o.pass = gb_ok && ls_ok;
  o.detail = std::string("GB mse spread ") + fmt("%.2e", spread) + (gb_ok ? " (ok)" : " (FAIL)") +
             "; LSBoost improving rounds " + std::to_string(improving) + " (need 3), per-round gains [" + gains +
             "] vs threshold " + fmt("%.4f", ls.report.threshold);
  return o;
}

Outcome criterion8() {
  Outcome o;
  const C0Setup& s = c0_setup();
  std::vector<std::string> files;
  for (int threads : {1, 8}) {
    TrainConfig cfg = s.config;
    cfg.thread_count = threads;
    TrainResult r = train(s.train.data, cfg);
    io::ModelMetadata meta;
    meta.feature_names = {"x1", "x2"};
    meta.normalization = s.train.normalization;
    meta.alpha = r.report.alpha;
    meta.bound_B = r.report.bound_B;
    meta.oracle = cfg.oracle.to_string();
    meta.dataset_fingerprint = io::fingerprint(s.train.data);
    files.push_back(io::serialize_model(io::ModelFile{std::move(r.model), meta}));
  }
  o.pass = files[0] == files[1];
  o.detail = "threads 1 vs 8: " + std::to_string(files[0].size()) + " bytes, " + (o.pass ? "identical" : "differ");
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  const char* learners[] = {"constant", "linear", "stump", "tree:2"};
  for (int trial = 0; trial < 200; ++trial) {
    const Dataset data = oracles::random_dataset(rng, 20 + rng() % 200, 1 + rng() % 3);
    TrainConfig cfg;
    cfg.levels_m = 2 + static_cast<int>(rng() % 30);
    cfg.oracle = OracleSpec::parse(learners[rng() % 4]);
    const TrainResult r = train(data, cfg);
    std::vector<double> h(data.size());
    for (double& v : h) v = sym(rng);
    const CalibrationReport rep =
        multicalibration_error(r.model, data, std::vector<std::vector<double>>{h}).per_function[0];
    const int m = r.model.grid().m();
    const double tol = 1e-12;
    if (!(rep.k2 <= rep.k1 + tol && rep.k1 <= std::sqrt(rep.k2) + tol && rep.kinf <= rep.k1 + tol &&
          rep.k1 <= (m + 1) * rep.kinf + tol))
      o.pass = false;
  }
  o.detail = "200 (model, dataset, h) triples";
  return o;
}

Outcome criterion10() {
  Outcome o;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_gap = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    const std::size_t d = 1 + rng() % 3;
    std::vector<double> x(n * d), y(n);
    // coarse feature values so that ties and repeated thresholds occur
    for (double& v : x) v = std::floor(unit(rng) * 8.0) / 8.0;
    for (double& v : y) v = unit(rng);
    const Dataset data(x, y, d);
    const WeakHypothesis h = fit(OracleSpec::stump(), data, all_rows(n));
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = h(data.row(i)) - y[i];
      sse += r * r;
    }
    const oracles::BruteSplit best = oracles::brute_force_stump(x, d, y);
    const double gap = std::abs(sse - best.sse);
    worst_gap = std::max(worst_gap, gap);
    if (!(gap <= 1e-12 * std::max(1.0, best.sse))) o.pass = false;
  }

  double worst_rel = 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng() % 5;
    const std::size_t n = 10 * (d + 1) + rng() % 100;
    std::vector<double> x(n * d), y(n);
    for (double& v : x) v = normal(rng);
    for (double& v : y) v = unit(rng);
    const Dataset data(x, y, d);
    const WeakHypothesis h = fit(OracleSpec::linear(), data, all_rows(n));
    std::vector<double> r(n);
    double rnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = y[i] - h(data.row(i));
      rnorm += r[i] * r[i];
    }
    rnorm = std::sqrt(rnorm);
    // columns: intercept, then each feature
    for (std::size_t j = 0; j <= d; ++j) {
      double dot = 0.0, cnorm = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double c = j == 0 ? 1.0 : x[i * d + j - 1];
        dot += c * r[i];
        cnorm += c * c;
      }
      const double rel = std::abs(dot) / (std::sqrt(cnorm) * rnorm);
      worst_rel = std::max(worst_rel, rel);
      if (!(rel <= 1e-8)) o.pass = false;
    }
  }
  o.detail = "stump max sse gap " + fmt("%.2e", worst_gap) + "; OLS max relative |X'r| " + fmt("%.2e", worst_rel);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"halting bound", criterion1},
      {"monotone descent", criterion2},
      {"rounding penalty", criterion3},
      {"convergence certificate", criterion4},
      {"improver / certificate round trip", criterion5},
      {"Bayes recovery on C0", criterion6},
      {"linear stagnation vs LSBoost progress", criterion7},
      {"parallel determinism", criterion8},
      {"metric sandwiches", criterion9},
      {"oracle exactness", criterion10},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 2;
    }
    selected.insert(k);
  }
  int failures = 0;
  for (std::size_t k = 1; k <= criteria.size(); ++k) {
    if (!selected.empty() && !selected.count(static_cast<int>(k))) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu (%s): %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", k, criteria[k - 1].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
