#include "relproj/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "relproj/errors.hpp"
#include "relproj/ttest.hpp"

namespace relproj {

using json = nlohmann::json;

const char* algorithm_name(Algorithm a) {
  return a == Algorithm::kBaseline ? "baseline" : "threshold";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "baseline") return Algorithm::kBaseline;
  if (name == "threshold") return Algorithm::kThreshold;
  throw Error("unknown algorithm '" + name + "' (want baseline or threshold)");
}

YearMetrics metrics_from_counts(int year, long long tp, long long fp, long long fn,
                                long long oov_queries) {
  YearMetrics m;
  m.year = year;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.oov_queries = oov_queries;
  m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f1 = m.precision + m.recall == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

RelationModel fit_relation_model(const EmbeddingModel& embeddings,
                                 const YearlyRelationSet& gold, int k, Scalar ridge) {
  std::size_t dropped = 0;
  const TrainingSet train = build_training_set(embeddings, gold.conflict_pairs(), &dropped);
  if (dropped > 0)
    std::cerr << "period " << gold.year << ": dropped " << dropped
              << " training pair(s) with out-of-vocabulary tokens\n";
  if (train.pair_count() == 0)
    throw Error("period " + std::to_string(gold.year) + ": no usable training pairs");

  RelationModel model;
  model.projection =
      solve_projection(train, ridge, embeddings.label() + ":" + std::to_string(gold.year));
  model.radius = compute_radius(train, model.projection);
  model.k = k;
  model.trained_period = std::to_string(gold.year);
  return model;
}

namespace {

struct Counts {
  long long tp = 0, fp = 0, fn = 0, oov = 0;
};

Counts score_locations(const RelationModel& model, const EmbeddingModel& embeddings,
                       const std::vector<const std::pair<const Token, std::set<Token>>*>& slice,
                       Algorithm algorithm, const EvalOptions& options) {
  Counts c;
  for (const auto* entry : slice) {
    const Token& location = entry->first;
    const std::set<Token>& targets = entry->second;
    if (!embeddings.contains(location)) {
      ++c.oov;
      c.fn += static_cast<long long>(targets.size());
      continue;
    }
    const Prediction pred = algorithm == Algorithm::kThreshold
                                ? predict(model, embeddings, location, options.stoplist)
                                : predict_baseline(model, embeddings, location, options.stoplist);
    long long hits = 0;
    for (const auto& cand : pred.candidates) {
      if (targets.count(cand.token))
        ++hits;
      else
        ++c.fp;
    }
    c.tp += hits;
    c.fn += static_cast<long long>(targets.size()) - hits;
  }
  return c;
}

unsigned worker_count(const EvalOptions& options, std::size_t jobs) {
  unsigned n = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  // No point spinning threads for a handful of locations.
  const unsigned by_jobs = static_cast<unsigned>(std::max<std::size_t>(1, jobs / 16));
  return std::min(n, by_jobs);
}

}  // namespace

YearMetrics evaluate_year(const RelationModel& model, const EmbeddingModel& embeddings,
                          const YearlyRelationSet& gold, Algorithm algorithm,
                          const EvalOptions& options) {
  if (model.projection.dim != embeddings.dim())
    throw Error("evaluate_year: projection dimension " + std::to_string(model.projection.dim) +
                " != model dimension " + std::to_string(embeddings.dim()));

  std::vector<const std::pair<const Token, std::set<Token>>*> locations;
  locations.reserve(gold.entries.size());
  for (const auto& entry : gold.entries) locations.push_back(&entry);

  const unsigned workers = worker_count(options, locations.size());
  Counts total;
  if (workers <= 1) {
    total = score_locations(model, embeddings, locations, algorithm, options);
  } else {
    const std::size_t chunk = (locations.size() + workers - 1) / workers;
    std::vector<std::future<Counts>> futures;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      if (begin >= locations.size()) break;
      const std::size_t end = std::min(locations.size(), begin + chunk);
      std::vector<const std::pair<const Token, std::set<Token>>*> slice(
          locations.begin() + static_cast<std::ptrdiff_t>(begin),
          locations.begin() + static_cast<std::ptrdiff_t>(end));
      futures.push_back(std::async(std::launch::async, [&, slice = std::move(slice)] {
        return score_locations(model, embeddings, slice, algorithm, options);
      }));
    }
    for (auto& f : futures) {
      const Counts c = f.get();
      total.tp += c.tp;
      total.fp += c.fp;
      total.fn += c.fn;
      total.oov += c.oov;
    }
  }
  return metrics_from_counts(gold.year, total.tp, total.fp, total.fn, total.oov);
}

namespace {

std::map<int, const YearlyRelationSet*> index_gold(const std::vector<YearlyRelationSet>& gold) {
  std::map<int, const YearlyRelationSet*> by_year;
  for (const auto& set : gold) {
    if (!by_year.emplace(set.year, &set).second)
      throw Error("duplicate gold data for period " + std::to_string(set.year));
  }
  return by_year;
}

void finish_averages(ExperimentReport& report) {
  if (report.per_year.empty()) return;
  const double n = static_cast<double>(report.per_year.size());
  for (const auto& m : report.per_year) {
    report.averages.precision += m.precision;
    report.averages.recall += m.recall;
    report.averages.f1 += m.f1;
  }
  report.averages.precision /= n;
  report.averages.recall /= n;
  report.averages.f1 /= n;
}

}  // namespace

ExperimentReport run_diachronic(const std::map<int, EmbeddingModel>& models,
                                const std::vector<YearlyRelationSet>& gold,
                                const EvalOptions& options, Algorithm algorithm) {
  ExperimentReport report;
  report.mode = "diachronic";
  report.algorithm = algorithm_name(algorithm);
  report.k = options.k;

  const auto by_year = index_gold(gold);
  for (const auto& [year, train_gold] : by_year) {
    auto next_gold = by_year.find(year + 1);
    if (next_gold == by_year.end()) continue;
    auto train_model = models.find(year);
    auto test_model = models.find(year + 1);
    if (train_model == models.end() || test_model == models.end()) continue;

    RelationModel model;
    try {
      model = fit_relation_model(train_model->second, *train_gold, options.k, options.ridge);
    } catch (const Error& e) {
      std::cerr << "skipping pair " << year << "->" << year + 1 << ": " << e.what() << '\n';
      continue;
    }
    report.per_year.push_back(
        evaluate_year(model, test_model->second, *next_gold->second, algorithm, options));
  }
  if (report.per_year.empty())
    throw Error("run_diachronic: fewer than 2 usable periods (no consecutive year pair with "
                "models, gold data and training pairs)");
  finish_averages(report);
  return report;
}

ExperimentReport run_synchronic(const std::map<int, EmbeddingModel>& models,
                                const std::vector<YearlyRelationSet>& gold,
                                const EvalOptions& options, Algorithm algorithm) {
  ExperimentReport report;
  report.mode = "synchronic";
  report.algorithm = algorithm_name(algorithm);
  report.k = options.k;

  const auto by_year = index_gold(gold);
  for (const auto& [year, year_gold] : by_year) {
    auto model_it = models.find(year);
    if (model_it == models.end()) continue;

    RelationModel model;
    try {
      model = fit_relation_model(model_it->second, *year_gold, options.k, options.ridge);
    } catch (const Error& e) {
      std::cerr << "skipping period " << year << ": " << e.what() << '\n';
      continue;
    }
    report.per_year.push_back(
        evaluate_year(model, model_it->second, *year_gold, algorithm, options));
  }
  if (report.per_year.size() < 2)
    throw Error("run_synchronic: fewer than 2 usable periods");
  finish_averages(report);
  return report;
}

ExperimentReport run_recall_at_k(const std::map<int, EmbeddingModel>& models,
                                 const std::vector<YearlyRelationSet>& gold,
                                 const std::vector<int>& k_values, const EvalOptions& options) {
  if (k_values.empty()) throw Error("run_recall_at_k: no k values");
  for (int k : k_values)
    if (k < 1) throw Error("run_recall_at_k: k values must be >= 1");
  const int max_k = *std::max_element(k_values.begin(), k_values.end());

  ExperimentReport report;
  report.mode = "recall_at_k";
  report.algorithm = "baseline";
  report.k = max_k;
  report.k_values = k_values;

  const auto by_year = index_gold(gold);
  for (const auto& [year, train_gold] : by_year) {
    auto next_gold = by_year.find(year + 1);
    if (next_gold == by_year.end()) continue;
    auto train_model = models.find(year);
    auto test_model = models.find(year + 1);
    if (train_model == models.end() || test_model == models.end()) continue;

    RelationModel model;
    try {
      model = fit_relation_model(train_model->second, *train_gold, max_k, options.ridge);
    } catch (const Error& e) {
      std::cerr << "skipping pair " << year << "->" << year + 1 << ": " << e.what() << '\n';
      continue;
    }

    const EmbeddingModel& embeddings = test_model->second;
    RecallYear ry;
    ry.year = year + 1;
    std::vector<long long> hits(k_values.size(), 0);
    for (const auto& [location, targets] : next_gold->second->entries) {
      if (targets.empty()) continue;  // replication mode queries conflict locations only
      if (!embeddings.contains(location)) {
        ++ry.oov_queries;
        continue;
      }
      const Prediction pred = predict_baseline(model, embeddings, location, options.stoplist);
      // First index (in ascending distance order) at which a gold target
      // appears, if any.
      std::size_t first_hit = pred.candidates.size();
      for (std::size_t i = 0; i < pred.candidates.size(); ++i) {
        if (targets.count(pred.candidates[i].token)) {
          first_hit = i;
          break;
        }
      }
      ++ry.queries;
      for (std::size_t j = 0; j < k_values.size(); ++j)
        if (first_hit < static_cast<std::size_t>(k_values[j])) ++hits[j];
    }
    if (ry.queries == 0) {
      std::cerr << "skipping pair " << year << "->" << year + 1
                << ": no evaluable conflict locations\n";
      continue;
    }
    ry.recall.resize(k_values.size());
    for (std::size_t j = 0; j < k_values.size(); ++j)
      ry.recall[j] = static_cast<double>(hits[j]) / static_cast<double>(ry.queries);
    report.recall_per_year.push_back(std::move(ry));
  }
  if (report.recall_per_year.empty())
    throw Error("run_recall_at_k: fewer than 2 usable periods");

  report.recall_averages.assign(k_values.size(), 0.0);
  for (const auto& ry : report.recall_per_year)
    for (std::size_t j = 0; j < k_values.size(); ++j) report.recall_averages[j] += ry.recall[j];
  for (auto& v : report.recall_averages) v /= static_cast<double>(report.recall_per_year.size());
  return report;
}

SignificanceTest compare_runs(const ExperimentReport& run, const ExperimentReport& baseline) {
  if (run.per_year.size() != baseline.per_year.size())
    throw Error("compare_runs: runs cover different numbers of years");
  std::vector<double> pa, pb, ra, rb, fa, fb;
  for (std::size_t i = 0; i < run.per_year.size(); ++i) {
    if (run.per_year[i].year != baseline.per_year[i].year)
      throw Error("compare_runs: runs cover different years");
    pa.push_back(run.per_year[i].precision);
    pb.push_back(baseline.per_year[i].precision);
    ra.push_back(run.per_year[i].recall);
    rb.push_back(baseline.per_year[i].recall);
    fa.push_back(run.per_year[i].f1);
    fb.push_back(baseline.per_year[i].f1);
  }
  SignificanceTest sig;
  sig.versus = baseline.algorithm;
  const TTestResult p = paired_t_test(pa, pb);
  const TTestResult r = paired_t_test(ra, rb);
  const TTestResult f = paired_t_test(fa, fb);
  sig.precision_t = p.t;
  sig.precision_p = p.p;
  sig.recall_t = r.t;
  sig.recall_p = r.p;
  sig.f1_t = f.t;
  sig.f1_p = f.p;
  return sig;
}

namespace {

json year_metrics_to_json(const YearMetrics& m) {
  return json{{"period", m.year},       {"tp", m.tp},
              {"fp", m.fp},             {"fn", m.fn},
              {"precision", m.precision}, {"recall", m.recall},
              {"f1", m.f1},             {"oov_queries", m.oov_queries}};
}

YearMetrics year_metrics_from_json(const json& j) {
  YearMetrics m;
  m.year = j.at("period").get<int>();
  m.tp = j.at("tp").get<long long>();
  m.fp = j.at("fp").get<long long>();
  m.fn = j.at("fn").get<long long>();
  m.precision = j.at("precision").get<double>();
  m.recall = j.at("recall").get<double>();
  m.f1 = j.at("f1").get<double>();
  m.oov_queries = j.at("oov_queries").get<long long>();
  return m;
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  json j;
  j["mode"] = report.mode;
  j["algorithm"] = report.algorithm;
  if (report.mode == "recall_at_k") {
    j["k_values"] = report.k_values;
    json years = json::array();
    for (const auto& ry : report.recall_per_year) {
      years.push_back(json{{"period", ry.year},
                           {"queries", ry.queries},
                           {"oov_queries", ry.oov_queries},
                           {"recall", ry.recall}});
    }
    j["per_year"] = std::move(years);
    j["averages"] = report.recall_averages;
    return j.dump(2);
  }
  j["k"] = report.k;
  json years = json::array();
  for (const auto& m : report.per_year) years.push_back(year_metrics_to_json(m));
  j["per_year"] = std::move(years);
  j["averages"] = json{{"precision", report.averages.precision},
                       {"recall", report.averages.recall},
                       {"f1", report.averages.f1}};
  if (report.significance) {
    const auto& s = *report.significance;
    j["significance"] = json{
        {"versus", s.versus},
        {"precision", {{"t", s.precision_t}, {"p", s.precision_p}}},
        {"recall", {{"t", s.recall_t}, {"p", s.recall_p}}},
        {"f1", {{"t", s.f1_t}, {"p", s.f1_p}}}};
  }
  return j.dump(2);
}

ExperimentReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("report: bad JSON: ") + e.what());
  }
  ExperimentReport report;
  report.mode = j.at("mode").get<std::string>();
  report.algorithm = j.at("algorithm").get<std::string>();
  if (report.mode == "recall_at_k") {
    report.k_values = j.at("k_values").get<std::vector<int>>();
    report.k = report.k_values.empty()
                   ? 0
                   : *std::max_element(report.k_values.begin(), report.k_values.end());
    for (const auto& y : j.at("per_year")) {
      RecallYear ry;
      ry.year = y.at("period").get<int>();
      ry.queries = y.at("queries").get<long long>();
      ry.oov_queries = y.at("oov_queries").get<long long>();
      ry.recall = y.at("recall").get<std::vector<double>>();
      report.recall_per_year.push_back(std::move(ry));
    }
    report.recall_averages = j.at("averages").get<std::vector<double>>();
    return report;
  }
  report.k = j.at("k").get<int>();
  for (const auto& y : j.at("per_year")) report.per_year.push_back(year_metrics_from_json(y));
  report.averages.precision = j.at("averages").at("precision").get<double>();
  report.averages.recall = j.at("averages").at("recall").get<double>();
  report.averages.f1 = j.at("averages").at("f1").get<double>();
  if (j.contains("significance")) {
    SignificanceTest s;
    const auto& sj = j["significance"];
    s.versus = sj.at("versus").get<std::string>();
    s.precision_t = sj.at("precision").at("t").get<double>();
    s.precision_p = sj.at("precision").at("p").get<double>();
    s.recall_t = sj.at("recall").at("t").get<double>();
    s.recall_p = sj.at("recall").at("p").get<double>();
    s.f1_t = sj.at("f1").at("t").get<double>();
    s.f1_p = sj.at("f1").at("p").get<double>();
    report.significance = s;
  }
  return report;
}

void save_report(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write report: " + path);
  out << report_to_json(report) << '\n';
  if (!out) throw Error("write failed: " + path);
}

ExperimentReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open report: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return report_from_json(buf.str());
}

std::string format_report_table(const ExperimentReport& report) {
  std::ostringstream out;
  char line[256];
  if (report.mode == "recall_at_k") {
    out << "mode: recall_at_k\n";
    out << "year        queries";
    for (int k : report.k_values) {
      std::snprintf(line, sizeof line, "%8s", ("@" + std::to_string(k)).c_str());
      out << line;
    }
    out << '\n';
    for (const auto& ry : report.recall_per_year) {
      std::snprintf(line, sizeof line, "%-8d %10lld", ry.year, ry.queries);
      out << line;
      for (double r : ry.recall) {
        std::snprintf(line, sizeof line, "%8.3f", r);
        out << line;
      }
      out << '\n';
    }
    out << "average             ";
    for (double r : report.recall_averages) {
      std::snprintf(line, sizeof line, "%8.3f", r);
      out << line;
    }
    out << '\n';
    return out.str();
  }

  out << "mode: " << report.mode << "  algorithm: " << report.algorithm << "  k=" << report.k
      << '\n';
  out << "year        tp     fp     fn  precision  recall      f1  oov\n";
  for (const auto& m : report.per_year) {
    std::snprintf(line, sizeof line, "%-8d %5lld  %5lld  %5lld     %6.4f  %6.4f  %6.4f  %3lld\n",
                  m.year, m.tp, m.fp, m.fn, m.precision, m.recall, m.f1, m.oov_queries);
    out << line;
  }
  std::snprintf(line, sizeof line, "average                          %6.4f  %6.4f  %6.4f\n",
                report.averages.precision, report.averages.recall, report.averages.f1);
  out << line;
  if (report.significance) {
    const auto& s = *report.significance;
    std::snprintf(line, sizeof line,
                  "paired t-test vs %s: precision t=%.4f p=%.4g | recall t=%.4f p=%.4g | "
                  "f1 t=%.4f p=%.4g\n",
                  s.versus.c_str(), s.precision_t, s.precision_p, s.recall_t, s.recall_p, s.f1_t,
                  s.f1_p);
    out << line;
  }
  return out.str();
}

}  // namespace relproj
