#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "relproj/embedding.hpp"
#include "relproj/errors.hpp"
#include "relproj/types.hpp"

namespace relproj {

// One gold (source, target) example of the relation in a given year.
struct RelationPair {
  Token source;
  Token target;
  int year = 0;
};

inline bool operator==(const RelationPair& a, const RelationPair& b) {
  return a.source == b.source && a.target == b.target && a.year == b.year;
}

// Row-aligned source/target vectors extracted from an embedding model.
struct TrainingSet {
  Mat sources;  // p x d
  Mat targets;  // p x d
  std::vector<RelationPair> pairs;

  Eigen::Index pair_count() const { return sources.rows(); }
  Eigen::Index dim() const { return sources.cols(); }
};

// Learned d x d linear relation map, applied with the row-vector convention
// projected = v * T.
struct ProjectionMatrix {
  Eigen::Index dim = 0;
  Mat matrix;              // d x d
  std::string trained_on;  // model/period label, informational
  Eigen::Index pair_count = 0;
};

// Builds a TrainingSet from the given pairs, looking both tokens up in
// `model`. Pairs with either token out of vocabulary are skipped;
// `dropped_out` (when non-null) receives how many. Rows keep the input
// pair order.
TrainingSet build_training_set(const EmbeddingModel& model,
                               const std::vector<RelationPair>& pairs,
                               std::size_t* dropped_out = nullptr);

// Least-squares fit of T minimizing |X T - Y|_F via the normal equations
// (X'X + ridge I) T = X'Y, solved by Cholesky with an LDLT fallback.
// ridge = 0 requires X to have full column rank; a rank-deficient system
// raises RankError instead of returning a garbage solution.
Mat solve_projection(const Mat& sources, const Mat& targets, Scalar ridge);

ProjectionMatrix solve_projection(const TrainingSet& train, Scalar ridge,
                                  std::string trained_on = "");

// projected = v * T (row-vector convention).
template <typename Derived>
Vec project(const Mat& matrix, const Eigen::MatrixBase<Derived>& v) {
  if (v.size() != matrix.rows())
    throw Error("project: vector dimension " + std::to_string(v.size()) +
                " != matrix dimension " + std::to_string(matrix.rows()));
  return matrix.transpose() * v;
}

template <typename Derived>
Vec project(const ProjectionMatrix& T, const Eigen::MatrixBase<Derived>& v) {
  return project(T.matrix, v);
}

// Orthogonal map Q minimizing |A Q - B|_F over the anchor rows, where A and B
// are the anchor vectors in `a` and `b`. Q = U V' from the SVD of A'B.
// Anchors are processed in sorted order, so the result is deterministic.
ProjectionMatrix procrustes_align(const EmbeddingModel& a, const EmbeddingModel& b,
                                  const std::set<Token>& anchor_vocab);

// Text serialization: header "d p label" then d rows of d components.
// Components round-trip doubles exactly. The stream overloads are used by
// formats that embed a projection (the relation-model file).
void write_projection(std::ostream& out, const ProjectionMatrix& T);
ProjectionMatrix read_projection(std::istream& in, const std::string& origin);
void save_projection(const ProjectionMatrix& T, const std::string& path);
ProjectionMatrix load_projection(const std::string& path);

}  // namespace relproj
