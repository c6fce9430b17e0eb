// Copyright 2026 The Issue Triage Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: training, batch prediction, evaluation studies,
// explanations, accuracy monitoring, the drift simulation and the HTTP
// service.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <fmt/format.h>
#include <json.hpp>

#include "triage/classify.hpp"
#include "triage/corpus.hpp"
#include "triage/driftmon.hpp"
#include "triage/error.hpp"
#include "triage/evalharness.hpp"
#include "triage/explain.hpp"
#include "triage/service.hpp"
#include "triage/textpipe.hpp"

namespace {

using namespace triage;
using nlohmann::json;

// Reads either a JSON object or CLI11's key=value format. Keys may use '_'
// or '-'; nested JSON objects address subcommands.
class JsonOrIniConfig : public CLI::ConfigINI {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    const std::string text((std::istreambuf_iterator<char>(input)),
                           std::istreambuf_iterator<char>());
    std::vector<CLI::ConfigItem> items;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
      flatten(json::parse(text), {}, items);
    } else {
      std::istringstream in(text);
      items = CLI::ConfigINI::from_config(in);
    }
    for (auto& item : items) std::replace(item.name.begin(), item.name.end(), '_', '-');
    return items;
  }

 private:
  static void flatten(const json& object, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : object.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        flatten(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      const auto scalar = [](const json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
      };
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

struct Common {
  std::string stopwords;
  std::string model = "linear_svc";
  std::uint64_t seed = 42;
  int knn_k = 5;
  int explain_k = 6;
  int explain_samples = 1000;
  double penalty = drift::DetectorConfig::calibrated().penalty;
  std::size_t min_segment = drift::DetectorConfig::calibrated().min_segment;
};

text::StopWords stop_words(const Common& c) {
  return c.stopwords.empty() ? text::StopWords::english()
                             : text::StopWords::load(c.stopwords);
}

classify::FitConfig fit_config(const Common& c) {
  classify::FitConfig f;
  f.seed = c.seed;
  f.knn_k = c.knn_k;
  return f;
}

explain::ExplainerConfig explainer_config(const Common& c) {
  explain::ExplainerConfig e;
  e.k = c.explain_k;
  e.n_samples = c.explain_samples;
  e.seed = c.seed;
  return e;
}

std::vector<corpus::IssueReport> load_reports(const std::string& path) {
  auto result = corpus::load_corpus(path);
  for (const auto& d : result.diagnostics) {
    std::cerr << fmt::format("{}:{}: skipped: {}\n", path, d.line, d.message);
  }
  return std::move(result.reports);
}

// Writes to `path`, or to stdout when it is empty or "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, fmt::format("cannot write '{}'", path));
  fn(out);
}

// ---- subcommands ------------------------------------------------------------

struct TrainArgs {
  std::string corpus, as_of, out;
  int window = 12;
};

void run_train(const Common& c, const TrainArgs& a) {
  service::TrainJobConfig job;
  job.spec = classify::parse_spec(c.model);
  job.fit = fit_config(c);
  job.window_months = a.window;
  const auto artifact = service::train_job(a.corpus, parse_month(a.as_of),
                                           stop_words(c), a.out, job);
  std::cout << fmt::format("trained {} on {}..{}: {} teams, {} terms -> {}\n",
                           artifact.descriptor,
                           format_month(artifact.training_start),
                           format_month(artifact.training_end),
                           artifact.model->classes().size(),
                           artifact.vocabulary.size(), a.out);
}

struct PredictArgs {
  std::string artifact, input, output;
};

void run_predict(const PredictArgs& a) {
  const auto artifact = service::load_artifact(a.artifact);
  const auto reports = load_reports(a.input);
  with_output(a.output, [&](std::ostream& out) {
    for (const auto& r : reports) {
      const auto x = text::vectorize(text::preprocess(r, artifact.stop_words),
                                     artifact.vocabulary);
      json line = {{"report_id", r.id}, {"predicted_team", nullptr}};
      if (x.empty()) {
        line["error"] = std::string(to_string(ErrorCode::kAssignmentImpossible));
      } else {
        line["predicted_team"] = artifact.model->predict(x).name();
      }
      out << line.dump() << '\n';
    }
  });
}

struct EvaluateArgs {
  std::string corpus;
  std::vector<std::string> models;
  double test_fraction = 0.2;
  int folds = 10;
  std::string deployment_day;
  int window_months = 2;
  double reports_per_month = -1.0;
  double seconds_per_assignment = 30.0;
};

void run_evaluate(const Common& c, const EvaluateArgs& a) {
  const auto closed = corpus::filter_closed(load_reports(a.corpus));
  std::vector<TeamId> labels;
  for (const auto& r : closed) labels.push_back(corpus::ground_truth(r));
  const auto split = eval::stratified_split(labels, a.test_fraction, c.seed);
  std::vector<corpus::IssueReport> train, test;
  for (auto i : split.train) train.push_back(closed[i]);
  for (auto i : split.test) test.push_back(closed[i]);

  auto models = a.models;
  if (models.empty()) {
    for (auto kind : classify::all_kinds()) {
      models.emplace_back(classify::to_string(kind));
    }
  }
  std::vector<eval::HoldoutReport> reports;
  for (const auto& m : models) {
    reports.push_back(eval::evaluate_holdout(classify::parse_spec(m), train,
                                             test, stop_words(c), a.folds,
                                             fit_config(c)));
  }
  std::cout << fmt::format("{} training / {} test reports\n", split.train.size(),
                           split.test.size());
  eval::write_holdout_table(std::cout, reports);

  if (!a.deployment_day.empty()) {
    const auto times = eval::solution_time_report(
        closed, parse_day(a.deployment_day), a.window_months);
    std::cout << fmt::format(
        "solution time: {:.2f} days before ({} reports), {:.2f} days after "
        "({} reports)\n",
        times.mean_days_before, times.n_before, times.mean_days_after,
        times.n_after);
  }
  if (a.reports_per_month >= 0.0) {
    std::cout << fmt::format(
        "effort saved: {:.2f} person-months per year\n",
        eval::effort_report(a.reports_per_month, a.seconds_per_assignment));
  }
}

struct WindowsArgs {
  std::string corpus, protocol = "sliding", output, aggregate;
  int max_delta = 12;
};

void run_windows(const Common& c, const WindowsArgs& a) {
  const auto reports = load_reports(a.corpus);
  std::vector<eval::Protocol> protocols;
  if (a.protocol == "both") {
    protocols = {eval::Protocol::kSliding, eval::Protocol::kCumulative};
  } else {
    protocols = {eval::parse_protocol(a.protocol)};
  }
  eval::WindowStudyConfig config;
  config.max_delta = a.max_delta;
  config.fit = fit_config(c);
  std::vector<eval::WindowResult> all;
  for (auto protocol : protocols) {
    const auto results = eval::window_study(
        reports, protocol, classify::parse_spec(c.model), stop_words(c), config);
    all.insert(all.end(), results.begin(), results.end());
    const auto trend = eval::accuracy_trend(results);
    std::cerr << fmt::format(
        "{}: {} models, accuracy slope per month {:+.4f} (p = {:.3g})\n",
        eval::to_string(protocol), results.size(), trend.slope, trend.p_value);
  }
  with_output(a.output, [&](std::ostream& out) { eval::write_window_csv(out, all); });
  if (!a.aggregate.empty()) {
    with_output(a.aggregate, [&](std::ostream& out) {
      out << "protocol,";
      bool header = true;
      for (auto protocol : protocols) {
        std::vector<eval::WindowResult> subset;
        for (const auto& r : all) {
          if (r.protocol == protocol) subset.push_back(r);
        }
        std::ostringstream block;
        eval::write_delta_csv(block, eval::aggregate_by_delta(subset));
        std::string line;
        std::istringstream lines(block.str());
        std::getline(lines, line);
        if (header) out << line << '\n';
        header = false;
        while (std::getline(lines, line)) {
          out << eval::to_string(protocol) << ',' << line << '\n';
        }
      }
    });
  }
}

struct ExplainArgs {
  std::string artifact, input, id, format = "text", output;
  bool top2 = false;
};

void run_explain(const Common& c, const ExplainArgs& a) {
  const auto artifact = service::load_artifact(a.artifact);
  const auto config = explainer_config(c);
  const auto reports = load_reports(a.input);
  with_output(a.output, [&](std::ostream& out) {
    const auto emit = [&](const explain::Explanation& e) {
      if (a.format == "json") {
        out << explain::to_json(e).dump() << '\n';
      } else {
        explain::render_text(out, e);
      }
    };
    for (const auto& r : reports) {
      if (!a.id.empty() && r.id != a.id) continue;
      const auto tokens = text::preprocess(r, artifact.stop_words);
      try {
        if (a.top2) {
          const auto [first, second] =
              explain::explain_top2(r.id, tokens, artifact.vocabulary,
                                    *artifact.model, config);
          emit(first);
          emit(second);
        } else {
          emit(explain::explain(r.id, tokens, artifact.vocabulary,
                                *artifact.model, config));
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNothingToExplain) throw;
        std::cerr << fmt::format("{}: {}\n", r.id, e.what());
      }
    }
  });
}

struct MonitorArgs {
  std::string log, series, output;
  std::size_t min_history = 0;
};

eval::AccuracySeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, fmt::format("cannot read '{}'", path));
  eval::AccuracySeries series;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.starts_with("day")) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::kFormatError, fmt::format("bad series line '{}'", line));
    }
    series.push_back({parse_day(trim(std::string_view(line).substr(0, comma))),
                      std::stod(line.substr(comma + 1)), 1});
  }
  return series;
}

void run_monitor(const Common& c, const MonitorArgs& a) {
  eval::AccuracySeries series;
  if (!a.series.empty()) {
    series = read_series_csv(a.series);
  } else {
    if (!std::filesystem::exists(a.log)) {
      throw Error(ErrorCode::kIoError, fmt::format("no log at '{}'", a.log));
    }
    series = eval::daily_accuracy(service::AssignmentLog(a.log).outcomes());
  }
  drift::DetectorConfig config{c.penalty, c.min_segment,
                               std::max(a.min_history, 2 * c.min_segment)};
  drift::OnlineDetector detector(config);
  std::size_t offset = 0;  // series index of the detector's first point
  std::size_t alerts = 0;
  with_output(a.output, [&](std::ostream& out) {
    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto alert = detector.push(series[i].accuracy);
      if (!alert) continue;
      ++alerts;
      const std::size_t boundary = offset + alert->boundary;
      out << json{{"day", format_day(series[i].day)},
                  {"boundary", format_day(series[boundary].day)},
                  {"pre_mean", alert->pre_mean},
                  {"post_mean", alert->post_mean}}
                 .dump()
          << '\n';
      // Watch the days after the alert as a new regime. Replaying from the
      // boundary would carry pre-drop days along when it landed early.
      detector.reset();
      offset = i + 1;
    }
  });
  std::cerr << fmt::format("{} days, {} alerts\n", series.size(), alerts);
}

struct SimulateArgs {
  std::size_t repetitions = 1000;
  std::vector<double> drops{0.20, 0.15, 0.10, 0.05};
  std::string out_dir;
  double base_mean = 0.85, base_std = 0.025;
  std::size_t days_before = 100, days_after = 100;
};

void run_simulate(const Common& c, const SimulateArgs& a) {
  drift::DriftSimConfig base;
  base.repetitions = a.repetitions;
  base.seed = c.seed;
  base.base_mean = a.base_mean;
  base.base_std = a.base_std;
  base.n_days_before = a.days_before;
  base.n_days_after = a.days_after;
  const drift::DetectorConfig detector{c.penalty, c.min_segment, 2 * c.min_segment};
  const auto cells = drift::run_simulation_study(base, a.drops, detector);
  for (auto mode : {drift::DropMode::kSudden, drift::DropMode::kGradual}) {
    const std::string name(drift::to_string(mode));
    if (a.out_dir.empty()) {
      std::cout << "# " << name << '\n';
      drift::write_study_csv(std::cout, cells, mode);
    } else {
      std::filesystem::create_directories(a.out_dir);
      with_output((std::filesystem::path(a.out_dir) / (name + ".csv")).string(),
                  [&](std::ostream& out) { drift::write_study_csv(out, cells, mode); });
    }
  }
}

struct ServeArgs {
  std::string artifact, log, host = "127.0.0.1";
  int port = 8080;
  std::size_t min_history = 0;
};

httplib::Server* g_server = nullptr;

void run_serve(const Common& c, const ServeArgs& a) {
  service::ServiceConfig config;
  config.log_path = a.log;
  config.artifact_path = a.artifact;
  config.detector = {c.penalty, c.min_segment,
                     std::max(a.min_history, 2 * c.min_segment)};
  config.explainer = explainer_config(c);
  service::Service svc(config);
  if (!a.artifact.empty() && std::filesystem::exists(a.artifact)) {
    svc.install(std::make_shared<const service::ModelArtifact>(
        service::load_artifact(a.artifact)));
  }
  const auto words = stop_words(c);
  httplib::Server server;
  service::mount_routes(server, svc, words);
  g_server = &server;
  std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
  std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
  std::cerr << fmt::format("listening on {}:{}\n", a.host, a.port);
  if (!server.listen(a.host, a.port)) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot listen on {}:{}", a.host, a.port));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Issue report triage: train, assign, explain and monitor"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonOrIniConfig>());
  app.set_config("--config", "", "key=value or JSON file with option defaults");

  Common common;
  app.add_option("--stopwords", common.stopwords, "stop-word file, one per line");
  app.add_option("--model", common.model,
                 "classifier kind or ensemble, e.g. SELECTED-3:linear_svc_calibrated,knn,multinomial_nb")
      ->capture_default_str();
  app.add_option("--seed", common.seed)->capture_default_str();
  app.add_option("--knn-k", common.knn_k)->capture_default_str();
  app.add_option("--explain-k", common.explain_k, "terms per explanation")
      ->capture_default_str();
  app.add_option("--explain-samples", common.explain_samples)->capture_default_str();
  app.add_option("--penalty", common.penalty, "change-point penalty")
      ->capture_default_str();
  app.add_option("--min-segment", common.min_segment)->capture_default_str();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "fit on the trailing months and save an artifact");
  train_cmd->add_option("--corpus", train.corpus)->required();
  train_cmd->add_option("--as-of", train.as_of, "YYYY-MM; trains on the months before")->required();
  train_cmd->add_option("--out", train.out)->required();
  train_cmd->add_option("--window", train.window, "training months")->capture_default_str();

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "assign every report in a JSONL file");
  predict_cmd->add_option("--artifact", predict.artifact)->required();
  predict_cmd->add_option("--input", predict.input)->required();
  predict_cmd->add_option("--output", predict.output);

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "cross validation and held-out metrics per model");
  evaluate_cmd->add_option("--corpus", evaluate.corpus)->required();
  evaluate_cmd->add_option("--models", evaluate.models, "specs to compare (default: every kind)");
  evaluate_cmd->add_option("--test-fraction", evaluate.test_fraction)->capture_default_str();
  evaluate_cmd->add_option("--folds", evaluate.folds)->capture_default_str();
  evaluate_cmd->add_option("--deployment-day", evaluate.deployment_day,
                           "YYYY-MM-DD; also report solution times around it");
  evaluate_cmd->add_option("--solution-window", evaluate.window_months)->capture_default_str();
  evaluate_cmd->add_option("--reports-per-month", evaluate.reports_per_month,
                           "also report the manual effort saved");
  evaluate_cmd->add_option("--seconds-per-assignment", evaluate.seconds_per_assignment)
      ->capture_default_str();

  WindowsArgs windows;
  auto* windows_cmd = app.add_subcommand("windows", "sliding or cumulative window study");
  windows_cmd->add_option("--corpus", windows.corpus)->required();
  windows_cmd->add_option("--protocol", windows.protocol)
      ->check(CLI::IsMember({"sliding", "cumulative", "both"}))
      ->capture_default_str();
  windows_cmd->add_option("--max-delta", windows.max_delta)->capture_default_str();
  windows_cmd->add_option("--output", windows.output, "per-model CSV (default stdout)");
  windows_cmd->add_option("--aggregate", windows.aggregate, "mean accuracy per delta CSV");

  ExplainArgs explain_args;
  auto* explain_cmd = app.add_subcommand("explain", "term-weight explanations of assignments");
  explain_cmd->add_option("--artifact", explain_args.artifact)->required();
  explain_cmd->add_option("--input", explain_args.input)->required();
  explain_cmd->add_option("--id", explain_args.id, "only this report");
  explain_cmd->add_option("--format", explain_args.format)
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  explain_cmd->add_flag("--top2", explain_args.top2, "also explain the runner-up team");
  explain_cmd->add_option("--output", explain_args.output);

  MonitorArgs monitor;
  auto* monitor_cmd = app.add_subcommand("monitor", "change-point alerts on daily accuracy");
  auto* log_opt = monitor_cmd->add_option("--log", monitor.log, "service assignment log");
  auto* series_opt = monitor_cmd->add_option("--series", monitor.series, "CSV of day,accuracy");
  log_opt->excludes(series_opt);
  monitor_cmd->add_option("--min-history", monitor.min_history, "days before the first decision");
  monitor_cmd->add_option("--output", monitor.output, "alert JSONL (default stdout)");

  SimulateArgs simulate;
  auto* simulate_cmd = app.add_subcommand("simulate-drift", "detection-time study on simulated accuracy");
  simulate_cmd->add_option("--repetitions", simulate.repetitions)->capture_default_str();
  simulate_cmd->add_option("--drops", simulate.drops)->capture_default_str();
  simulate_cmd->add_option("--base-mean", simulate.base_mean)->capture_default_str();
  simulate_cmd->add_option("--base-std", simulate.base_std)->capture_default_str();
  simulate_cmd->add_option("--days-before", simulate.days_before)->capture_default_str();
  simulate_cmd->add_option("--days-after", simulate.days_after)->capture_default_str();
  simulate_cmd->add_option("--out-dir", simulate.out_dir, "write sudden.csv and gradual.csv here");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP assignment service");
  serve_cmd->add_option("--artifact", serve.artifact, "model to load and retrain into");
  serve_cmd->add_option("--log", serve.log, "assignment log (JSONL)");
  serve_cmd->add_option("--host", serve.host)->capture_default_str();
  serve_cmd->add_option("--port", serve.port)->capture_default_str();
  serve_cmd->add_option("--min-history", serve.min_history, "days before drift decisions");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train_cmd) run_train(common, train);
    if (*predict_cmd) run_predict(predict);
    if (*evaluate_cmd) run_evaluate(common, evaluate);
    if (*windows_cmd) run_windows(common, windows);
    if (*explain_cmd) run_explain(common, explain_args);
    if (*monitor_cmd) {
      if (monitor.log.empty() && monitor.series.empty()) {
        throw Error(ErrorCode::kInvalidInput, "monitor needs --log or --series");
      }
      run_monitor(common, monitor);
    }
    if (*simulate_cmd) run_simulate(common, simulate);
    if (*serve_cmd) run_serve(common, serve);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
