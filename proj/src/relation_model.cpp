#include "relproj/relation_model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace relproj {

Scalar radius_from_distances(const std::vector<Scalar>& distances) {
  if (distances.empty()) throw Error("radius_from_distances: empty distance sample");
  const Scalar n = static_cast<Scalar>(distances.size());
  Scalar mean = 0.0;
  for (Scalar d : distances) mean += d;
  mean /= n;
  Scalar var = 0.0;
  for (Scalar d : distances) var += (d - mean) * (d - mean);
  var /= n;  // population variance: well-defined for a single pair
  return mean + std::sqrt(var);
}

Scalar compute_radius(const TrainingSet& train, const ProjectionMatrix& T) {
  if (train.pair_count() < 1) throw Error("compute_radius: empty training set");
  std::vector<Scalar> distances;
  distances.reserve(static_cast<std::size_t>(train.pair_count()));
  for (Eigen::Index i = 0; i < train.pair_count(); ++i) {
    const Vec projected = project(T, train.sources.row(i).transpose());
    distances.push_back(cosine_distance(projected, train.targets.row(i).transpose()));
  }
  return radius_from_distances(distances);
}

namespace {

Prediction predict_impl(const RelationModel& model, const EmbeddingModel& embeddings,
                        const Token& query, const std::unordered_set<Token>& exclude,
                        bool apply_radius) {
  if (model.projection.dim != embeddings.dim())
    throw Error("predict: projection dimension " + std::to_string(model.projection.dim) +
                " != model dimension " + std::to_string(embeddings.dim()));
  if (model.k < 1) throw Error("predict: k must be >= 1");

  Prediction out;
  out.query = query;
  out.projected_point = project(model.projection, embeddings.vector(query));

  auto effective_exclude = exclude;
  effective_exclude.insert(query);
  // An exhausted vocabulary yields the empty prediction, not an error.
  std::size_t excluded_in_vocab = 0;
  for (const auto& t : effective_exclude)
    if (embeddings.contains(t)) ++excluded_in_vocab;
  if (excluded_in_vocab >= embeddings.size()) return out;

  out.candidates = embeddings.nearest_neighbors(out.projected_point, model.k, effective_exclude);
  if (apply_radius) {
    std::erase_if(out.candidates,
                  [&](const Neighbor& c) { return c.distance > model.radius; });
  }
  return out;
}

}  // namespace

Prediction predict(const RelationModel& model, const EmbeddingModel& embeddings,
                   const Token& query, const std::unordered_set<Token>& exclude) {
  return predict_impl(model, embeddings, query, exclude, true);
}

Prediction predict_baseline(const RelationModel& model, const EmbeddingModel& embeddings,
                            const Token& query, const std::unordered_set<Token>& exclude) {
  return predict_impl(model, embeddings, query, exclude, false);
}

void save_relation_model(const RelationModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write relation model: " + path);
  write_projection(out, model.projection);
  out.precision(std::numeric_limits<Scalar>::max_digits10);
  out << "radius=" << model.radius << " k=" << model.k << " period=" << model.trained_period
      << '\n';
  if (!out) throw Error("write failed: " + path);
}

RelationModel load_relation_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open relation model: " + path);
  RelationModel model;
  model.projection = read_projection(in, path);

  std::string footer;
  if (!std::getline(in, footer)) throw FormatError(path + ": missing footer line");
  std::istringstream fs(footer);
  std::string field;
  bool saw_radius = false, saw_k = false, saw_period = false;
  while (fs >> field) {
    if (field.rfind("radius=", 0) == 0) {
      const std::string v = field.substr(7);
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), model.radius);
      if (ec != std::errc() || p != v.data() + v.size())
        throw FormatError(path + ": bad radius '" + v + "'");
      saw_radius = true;
    } else if (field.rfind("k=", 0) == 0) {
      model.k = std::stoi(field.substr(2));
      saw_k = true;
    } else if (field.rfind("period=", 0) == 0) {
      model.trained_period = field.substr(7);
      saw_period = true;
    } else {
      throw FormatError(path + ": unknown footer field '" + field + "'");
    }
  }
  if (!saw_radius || !saw_k || !saw_period)
    throw FormatError(path + ": footer must carry radius=, k= and period=");
  if (model.radius < 0.0 || model.k < 1) throw FormatError(path + ": invalid footer values");
  return model;
}

}  // namespace relproj
