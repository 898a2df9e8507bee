#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "lsboost/datagen.hpp"
#include "lsboost/error.hpp"
#include "lsboost/gbm.hpp"
#include "lsboost/io.hpp"
#include "lsboost/metrics.hpp"
#include "lsboost/train.hpp"

namespace lsboost::cli {
namespace {

using nlohmann::json;

struct Preprocess {
  std::string label = "y";
  double cap = 0.0;
  CLI::Option* cap_opt = nullptr;
  std::string rescale = "auto";

  void add(CLI::App* app, bool label_required) {
    auto* l = app->add_option("--label", label, "Label column");
    if (label_required) l->required();
    cap_opt = app->add_option("--cap", cap, "Clamp labels at this value before rescaling");
    app->add_option("--rescale", rescale, "Label rescaling: auto|minmax|none")->capture_default_str();
  }
  io::PreprocessSpec spec() const {
    io::PreprocessSpec s;
    s.label = label;
    if (cap_opt->count()) s.cap = cap;
    s.rescale = io::parse_rescale(rescale);
    return s;
  }
};

struct TrainArgs {
  std::string data;
  Preprocess pre;
  double alpha = 0.0;
  CLI::Option* alpha_opt = nullptr;
  double bound = 1.0;
  int levels = 0;
  CLI::Option* levels_opt = nullptr;
  std::string learner;
  std::size_t min_level_size = 1;
  std::size_t min_leaf = 1;
  int threads = 1;
  int max_rounds = 0;
  CLI::Option* max_rounds_opt = nullptr;
  std::string model_out;
  std::string report_out;

  // Options shared by train and compare.
  void add_core(CLI::App* app, bool label_required) {
    app->add_option("--data", data, "Training CSV")->required();
    pre.add(app, label_required);
    alpha_opt = app->add_option("--alpha", alpha, "Target multicalibration error in (0,1)");
    app->add_option("--bound", bound, "Bound B on max h(x)^2")->required();
    levels_opt = app->add_option("--levels", levels, "Grid size m (defaults to ceil(2B/alpha))");
    app->add_option("--learner", learner, "constant|linear|stump|tree:D")->required();
    app->add_option("--min-level-size", min_level_size, "Skip level sets with fewer rows");
    app->add_option("--min-leaf", min_leaf, "Minimum rows per tree leaf");
    app->add_option("--threads", threads, "Worker threads for per-level fits");
    max_rounds_opt = app->add_option("--max-rounds", max_rounds, "Stop after this many rounds");
  }

  TrainConfig config() const {
    TrainConfig c;
    if (alpha_opt->count()) c.alpha = alpha;
    if (levels_opt->count()) c.levels_m = levels;
    if (max_rounds_opt->count()) c.max_rounds = max_rounds;
    c.bound_B = bound;
    c.oracle = OracleSpec::parse(learner);
    c.oracle.min_leaf = min_leaf;
    c.min_level_size = min_level_size;
    c.thread_count = threads;
    return c;
  }
};

json calibration_json(const CalibrationReport& r) {
  return {{"k2", r.k2}, {"k1", r.k1}, {"kinf", r.kinf}};
}

io::ModelFile make_model_file(const LevelSetModel& model, const io::LoadedData& loaded, const std::string& label,
                              const TrainConfig& config, const TrainReport& report) {
  io::ModelMetadata md;
  md.label = label;
  md.feature_names = loaded.feature_names;
  md.normalization = loaded.normalization;
  md.alpha = report.alpha;
  md.bound_B = report.bound_B;
  md.oracle = config.oracle.to_string();
  md.min_level_size = config.min_level_size;
  md.dataset_fingerprint = io::fingerprint(loaded.data);
  return {model, md};
}

io::LoadedData load_for_model(const io::ModelFile& file, const std::string& path) {
  return io::load_with(io::read_csv(path), file.metadata.label, file.metadata.feature_names,
                       file.metadata.normalization);
}

json sidecar_json(const SurfaceSpec& spec, const Normalization& norm) {
  json j = {{"generator", std::string(kGeneratorName)},
            {"surface", to_string(spec.surface)},
            {"n", spec.n},
            {"seed", spec.seed},
            {"noise_sd", spec.noise_sd},
            {"min", norm.min},
            {"max", norm.max}};
  return j;
}

Normalization read_sidecar(const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
    Normalization n;
    n.min = j.at("min").get<double>();
    n.max = j.at("max").get<double>();
    return n;
  } catch (const json::exception& e) {
    throw DataError("bad normalization file '" + path + "': " + e.what());
  }
}

int cmd_synth(const SurfaceSpec& spec, const std::string& out_path, const std::string& reuse_path,
              std::ostream& out) {
  std::optional<Normalization> reuse;
  if (!reuse_path.empty()) reuse = read_sidecar(reuse_path);
  const SyntheticSample s = sample_surface(spec, reuse);
  std::string csv = "x1,x2,y\n";
  for (std::size_t i = 0; i < s.data.size(); ++i) {
    csv += io::format_double(s.data.feature(i, 0)) + "," + io::format_double(s.data.feature(i, 1)) + "," +
           io::format_double(s.data.label(i)) + "\n";
  }
  io::write_text(out_path, csv);
  io::write_text(out_path + ".norm.json", sidecar_json(spec, s.normalization).dump(1) + "\n");
  out << json{{"rows", s.data.size()}, {"out", out_path}, {"min", s.normalization.min}, {"max", s.normalization.max}}.dump()
      << "\n";
  return 0;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const TrainConfig config = a.config();
  resolve(config);  // usage errors before touching the data
  const io::LoadedData loaded = io::load_csv(a.data, a.pre.spec());
  TrainResult result = train(loaded.data, config);
  io::write_model(a.model_out, make_model_file(result.model, loaded, a.pre.label, config, result.report));
  io::write_text(a.report_out, io::report_csv(result.report));
  const auto kept = result.report.retained();
  out << json{{"rounds_executed", result.report.rounds_executed},
              {"rounds_kept", result.model.rounds().size()},
              {"halt", to_string(result.report.halt)},
              {"m", result.model.grid().m()},
              {"alpha", result.report.alpha},
              {"mse", kept.back().mse},
              {"msce", kept.back().msce}}
             .dump()
      << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, const std::string& out_path) {
  const io::ModelFile file = io::read_model(model_path);
  const io::CsvTable table = io::read_csv(data_path);
  const std::size_t d = file.metadata.feature_names.size();
  const std::vector<double> features = io::feature_matrix(table, file.metadata.feature_names);
  std::string csv = "row,prediction\n";
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const double p = file.model.predict(std::span<const double>(features.data() + i * d, d));
    csv += std::to_string(i) + "," + io::format_double(p) + "\n";
  }
  io::write_text(out_path, csv);
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path, std::ostream& out) {
  const io::ModelFile file = io::read_model(model_path);
  const io::LoadedData loaded = load_for_model(file, data_path);
  const auto preds = predict_all(file.model, loaded.data);
  const CalibrationReport cal = calibration_error(file.model, loaded.data);
  out << json{{"n", loaded.data.size()},
              {"m", file.model.grid().m()},
              {"mse", mse(preds, loaded.data.labels())},
              {"msce", cal.k2},
              {"k1", cal.k1},
              {"kinf", cal.kinf}}
             .dump()
      << "\n";
  return 0;
}

int cmd_audit(const std::string& model_path, const std::string& data_path, const std::string& groups_path,
              std::ostream& out) {
  const io::ModelFile file = io::read_model(model_path);
  const io::LoadedData loaded = load_for_model(file, data_path);
  const io::CsvTable groups = io::read_csv(groups_path);
  if (groups.rows() != loaded.data.size())
    throw DataError("groups file has " + std::to_string(groups.rows()) + " rows, data has " +
                    std::to_string(loaded.data.size()));
  if (groups.header.empty()) throw DataError("groups file has no columns");
  const MulticalibrationResult res = multicalibration_error(file.model, loaded.data, groups.columns);
  json functions = json::array();
  for (std::size_t c = 0; c < groups.header.size(); ++c) {
    json f = calibration_json(res.per_function[c]);
    f["name"] = groups.header[c];
    functions.push_back(f);
  }
  out << json{{"functions", functions},
              {"worst",
               {{"function", groups.header[res.worst_function]},
                {"level", res.worst_level},
                {"value", file.model.grid().value(res.worst_level)},
                {"weighted_violation", res.worst_weighted_violation}}}}
             .dump()
      << "\n";
  return 0;
}

struct CompareArgs {
  TrainArgs train;
  int gb_rounds = 100;
  double gb_lr = 0.1;
  std::string out;
  std::string test;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  const TrainConfig config = a.train.config();
  const ResolvedConfig rc = resolve(config);
  const io::LoadedData loaded = io::load_csv(a.train.data, a.train.pre.spec());
  const TrainResult ls = train(loaded.data, config);

  GBConfig gbc;
  gbc.oracle = config.oracle;
  gbc.rounds = a.gb_rounds;
  gbc.learning_rate = a.gb_lr;
  gbc.calibration_m = rc.grid.m();
  const GBResult gb = gb_train(loaded.data, gbc);

  std::optional<io::LoadedData> test;
  if (!a.test.empty())
    test = io::load_with(io::read_csv(a.test), a.train.pre.label, loaded.feature_names, loaded.normalization);

  const auto kept = ls.report.retained();
  const std::size_t ls_last = kept.size() - 1;
  const std::size_t gb_last = gb.records.size() - 1;
  const std::size_t rows = std::max(ls_last, gb_last);

  std::string csv = "round,lsboost_mse,lsboost_msce,gb_mse,gb_msce,lsboost_active,gb_active";
  if (test) csv += ",lsboost_test_mse,lsboost_test_msce,gb_test_mse,gb_test_msce";
  csv += "\n";
  for (std::size_t t = 0; t <= rows; ++t) {
    const auto& l = kept[std::min(t, ls_last)];
    const auto& g = gb.records[std::min(t, gb_last)];
    csv += std::to_string(t) + "," + io::format_double(l.mse) + "," + io::format_double(l.msce) + "," +
           io::format_double(g.mse) + "," + io::format_double(g.msce) + "," + (t <= ls_last ? "1" : "0") + "," +
           (t <= gb_last ? "1" : "0");
    if (test) {
      const LevelSetModel prefix = ls.model.prefix(std::min(t, ls_last));
      const auto levels = predict_levels(prefix, test->data);
      const Grid& grid = prefix.grid();
      std::vector<double> gp(test->data.size());
      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] = gb.model.predict(test->data.row(i), std::min(t, gb_last));
      csv += "," + io::format_double(level_mse(levels, grid, test->data.labels())) + "," +
             io::format_double(calibration_report(levels, grid, test->data.labels()).k2) + "," +
             io::format_double(mse(gp, test->data.labels())) + "," +
             io::format_double(binned_calibration(gp, test->data.labels(), grid).k2);
    }
    csv += "\n";
  }
  io::write_text(a.out, csv);
  out << json{{"lsboost_rounds", ls_last}, {"gb_rounds", gb_last}, {"lsboost_mse", kept.back().mse},
              {"gb_mse", gb.records.back().mse}}
             .dump()
      << "\n";
  return 0;
}

struct CheckArgs {
  std::string data;
  Preprocess pre;
  std::string subset_col;
  double gamma = 0.0;
  std::string learner;
  std::string comparison;
};

int cmd_check_wl(const CheckArgs& a, std::ostream& out) {
  const OracleSpec oracle = OracleSpec::parse(a.learner);
  std::optional<OracleSpec> comparison;
  if (!a.comparison.empty()) comparison = OracleSpec::parse(a.comparison);
  const io::CsvTable table = io::read_csv(a.data);
  io::PreprocessSpec spec = a.pre.spec();
  if (a.subset_col == spec.label) throw UsageError("subset column must differ from the label column");
  spec.exclude.push_back(a.subset_col);
  const io::LoadedData loaded = io::load_table(table, spec);
  const auto& groups = table.columns[table.column_index(a.subset_col)];

  std::map<double, std::vector<std::size_t>> subsets;
  for (std::size_t i = 0; i < groups.size(); ++i) subsets[groups[i]].push_back(i);
  json verdicts = json::array();
  bool all = true;
  for (const auto& [value, rows] : subsets) {
    const WeakLearningAudit r = check_weak_learning(loaded.data, rows, oracle, a.gamma, comparison);
    all = all && r.satisfied();
    verdicts.push_back({{"subset", value},
                        {"size", r.subset_size},
                        {"mass", r.mass},
                        {"const_err", r.const_err},
                        {"benchmark_err", r.benchmark_err},
                        {"oracle_err", r.oracle_err},
                        {"premise", r.premise},
                        {"conclusion", r.conclusion},
                        {"satisfied", r.satisfied()}});
  }
  out << json{{"gamma", a.gamma}, {"subsets", verdicts}, {"all_satisfied", all}}.dump() << "\n";
  return 0;
}

void report_error(std::ostream& err, const char* kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Level-set boosting for multicalibrated regression", "lsboost"};
  app.require_subcommand(1);

  SurfaceSpec synth;
  std::string synth_surface = "c0";
  std::string synth_out;
  std::string synth_reuse;
  auto* s = app.add_subcommand("synth", "Sample a synthetic surface dataset");
  s->add_option("--surface", synth_surface, "c0|c1")->required();
  s->add_option("--n", synth.n, "Rows")->required();
  s->add_option("--seed", synth.seed, "Generator seed")->required();
  s->add_option("--out", synth_out, "Output CSV")->required();
  s->add_option("--noise-sd", synth.noise_sd, "Gaussian label noise");
  s->add_option("--normalization", synth_reuse, "Reuse label constants from a .norm.json sidecar");
  s->add_option("--threads", synth.threads, "Sampling threads");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a level-set boosted model");
  tr.add_core(t, true);
  t->add_option("--model-out", tr.model_out, "Model JSON output")->required();
  t->add_option("--report-out", tr.report_out, "Per-round report CSV")->required();

  std::string p_model, p_data, p_out;
  auto* p = app.add_subcommand("predict", "Write predictions for a CSV");
  p->add_option("--model", p_model)->required();
  p->add_option("--data", p_data)->required();
  p->add_option("--out", p_out)->required();

  std::string e_model, e_data;
  auto* e = app.add_subcommand("eval", "Print MSE and calibration metrics as JSON");
  e->add_option("--model", e_model)->required();
  e->add_option("--data", e_data)->required();

  std::string a_model, a_data, a_groups;
  auto* a = app.add_subcommand("audit", "Multicalibration audit against tabulated functions");
  a->add_option("--model", a_model)->required();
  a->add_option("--data", a_data)->required();
  a->add_option("--groups", a_groups, "CSV whose columns are h values per row")->required();

  CompareArgs cmp;
  auto* c = app.add_subcommand("compare", "LSBoost vs gradient boosting per-round table");
  cmp.train.add_core(c, false);
  c->add_option("--gb-rounds", cmp.gb_rounds)->required();
  c->add_option("--gb-lr", cmp.gb_lr)->required();
  c->add_option("--out", cmp.out)->required();
  c->add_option("--test", cmp.test, "Held-out CSV for out-of-sample columns");

  CheckArgs ck;
  auto* w = app.add_subcommand("check-wl", "Empirical weak-learning audit per subset");
  w->add_option("--data", ck.data)->required();
  ck.pre.add(w, false);
  w->add_option("--subset-col", ck.subset_col)->required();
  w->add_option("--gamma", ck.gamma)->required();
  w->add_option("--learner", ck.learner)->required();
  w->add_option("--comparison", ck.comparison);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& ex) {
    report_error(err, "usage", ex.what());
    return 2;
  }

  try {
    if (s->parsed()) {
      synth.surface = parse_surface(synth_surface);
      return cmd_synth(synth, synth_out, synth_reuse, out);
    }
    if (t->parsed()) return cmd_train(tr, out);
    if (p->parsed()) return cmd_predict(p_model, p_data, p_out);
    if (e->parsed()) return cmd_eval(e_model, e_data, out);
    if (a->parsed()) return cmd_audit(a_model, a_data, a_groups, out);
    if (c->parsed()) return cmd_compare(cmp, out);
    if (w->parsed()) return cmd_check_wl(ck, out);
  } catch (const Error& ex) {
    switch (ex.kind()) {
      case ErrorKind::Usage: report_error(err, "usage", ex.what()); return 2;
      case ErrorKind::Data: report_error(err, "data", ex.what()); return 3;
      case ErrorKind::Oracle: report_error(err, "oracle", ex.what()); return 4;
    }
  } catch (const std::exception& ex) {
    report_error(err, "data", ex.what());
    return 3;
  }
  report_error(err, "usage", "no subcommand");
  return 2;
}

}  // namespace lsboost::cli
