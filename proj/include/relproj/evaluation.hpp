#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "relproj/dataset.hpp"
#include "relproj/embedding.hpp"
#include "relproj/relation_model.hpp"
#include "relproj/types.hpp"

namespace relproj {

enum class Algorithm { kBaseline, kThreshold };

const char* algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct YearMetrics {
  int year = 0;
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long oov_queries = 0;
};

// precision/recall/f1 from raw counts; zero denominators yield 0.
YearMetrics metrics_from_counts(int year, long long tp, long long fp, long long fn,
                                long long oov_queries);

struct MetricAverages {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct SignificanceTest {
  std::string versus;  // algorithm the run was compared against
  double precision_t = 0.0, precision_p = 1.0;
  double recall_t = 0.0, recall_p = 1.0;
  double f1_t = 0.0, f1_p = 1.0;
};

// Per-year hit rates for the recall@k replication mode.
struct RecallYear {
  int year = 0;
  long long queries = 0;  // evaluated conflict locations
  long long oov_queries = 0;
  std::vector<double> recall;  // aligned with ExperimentReport::k_values
};

struct ExperimentReport {
  std::string mode;       // diachronic | synchronic | recall_at_k
  std::string algorithm;  // baseline | threshold
  int k = 2;

  // Precision/recall/F1 modes. Averages are arithmetic means over years
  // (macro), never recomputed from pooled counts.
  std::vector<YearMetrics> per_year;
  MetricAverages averages;
  std::optional<SignificanceTest> significance;

  // recall_at_k mode.
  std::vector<int> k_values;
  std::vector<RecallYear> recall_per_year;
  std::vector<double> recall_averages;
};

struct EvalOptions {
  int k = 2;
  Scalar ridge = 1e-8;
  // Extra tokens never proposed as candidates (off by default).
  std::unordered_set<Token> stoplist;
  // 0 = auto (hardware concurrency); 1 = serial.
  unsigned threads = 0;
};

// Fits the projection and radius on one year's conflict pairs against the
// matching model. Throws if the year has no usable pairs; out-of-vocabulary
// pairs are dropped with a note on stderr.
RelationModel fit_relation_model(const EmbeddingModel& embeddings,
                                 const YearlyRelationSet& gold, int k, Scalar ridge);

// Scores every location of `gold` against the model's predictions. OOV
// locations are skipped, counted, and their gold targets become false
// negatives. Locations are scored concurrently; counts are aggregated
// deterministically.
YearMetrics evaluate_year(const RelationModel& model, const EmbeddingModel& embeddings,
                          const YearlyRelationSet& gold, Algorithm algorithm,
                          const EvalOptions& options = {});

// Train on year n, test on year n+1, over every numerically consecutive year
// pair with models and gold on both sides. Needs at least one usable pair.
ExperimentReport run_diachronic(const std::map<int, EmbeddingModel>& models,
                                const std::vector<YearlyRelationSet>& gold,
                                const EvalOptions& options, Algorithm algorithm);

// Train and test on the same year, for every year with a model, gold data
// and usable pairs. Needs at least 2 usable years.
ExperimentReport run_synchronic(const std::map<int, EmbeddingModel>& models,
                                const std::vector<YearlyRelationSet>& gold,
                                const EvalOptions& options, Algorithm algorithm);

// Replication protocol: conflict locations only, a query scores a hit at k
// when any gold target appears among the k nearest neighbors of the
// projected point; no radius filter.
ExperimentReport run_recall_at_k(const std::map<int, EmbeddingModel>& models,
                                 const std::vector<YearlyRelationSet>& gold,
                                 const std::vector<int>& k_values, const EvalOptions& options);

// Paired t-tests (precision, recall, F1) between two runs over the same
// years.
SignificanceTest compare_runs(const ExperimentReport& run, const ExperimentReport& baseline);

// JSON round-trip and the stdout table.
std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);
void save_report(const ExperimentReport& report, const std::string& path);
ExperimentReport load_report(const std::string& path);
std::string format_report_table(const ExperimentReport& report);

}  // namespace relproj
