#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "relproj/embedding.hpp"
#include "relproj/projection.hpp"
#include "relproj/types.hpp"

namespace relproj {

// The deployable predictor: a learned projection plus the cosine radius of
// the admissible hypersphere and the candidate cap k.
struct RelationModel {
  ProjectionMatrix projection;
  Scalar radius = 0.0;  // cosine-distance threshold, in [0, 2]
  int k = 1;
  std::string trained_period;
};

// Candidates for one query, sorted by ascending distance. May be empty; an
// empty candidate list is a valid prediction, not an error.
struct Prediction {
  Token query;
  std::vector<Neighbor> candidates;
  Vec projected_point;
};

// mean + population standard deviation of a distance sample. Defined for a
// single element (sigma = 0).
Scalar radius_from_distances(const std::vector<Scalar>& distances);

// Cosine radius per the training data: for every pair, the cosine distance
// between the projected source and the true target, aggregated as
// mean + population sigma.
Scalar compute_radius(const TrainingSet& train, const ProjectionMatrix& T);

// Projects the query vector, takes the k nearest neighbors (the query itself
// and `exclude` never appear), then drops every candidate farther than the
// radius. Truncation happens before the radius filter.
Prediction predict(const RelationModel& model, const EmbeddingModel& embeddings,
                   const Token& query, const std::unordered_set<Token>& exclude = {});

// As predict but without the radius filter: always min(k, available)
// candidates.
Prediction predict_baseline(const RelationModel& model, const EmbeddingModel& embeddings,
                            const Token& query, const std::unordered_set<Token>& exclude = {});

// Relation-model file: the projection serialization followed by one footer
// line "radius=<float> k=<int> period=<label>".
void save_relation_model(const RelationModel& model, const std::string& path);
RelationModel load_relation_model(const std::string& path);

}  // namespace relproj
