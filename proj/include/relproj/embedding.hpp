#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "relproj/errors.hpp"
#include "relproj/types.hpp"

namespace relproj {

// Cosine distance 1 - (u.v)/(|u||v|), clamped to [0, 2] against rounding.
// Neither argument needs unit norm. Throws on dimension mismatch or a
// zero-norm input.
template <typename DerivedU, typename DerivedV>
Scalar cosine_distance(const Eigen::MatrixBase<DerivedU>& u,
                       const Eigen::MatrixBase<DerivedV>& v) {
  if (u.size() != v.size())
    throw Error("cosine_distance: dimension mismatch (" + std::to_string(u.size()) +
                " vs " + std::to_string(v.size()) + ")");
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw Error("cosine_distance: zero-norm input");
  const Scalar d = 1.0 - u.dot(v) / (nu * nv);
  return d < 0.0 ? 0.0 : (d > 2.0 ? 2.0 : d);
}

struct Neighbor {
  Token token;
  Scalar distance;
};

inline bool operator==(const Neighbor& a, const Neighbor& b) {
  return a.token == b.token && a.distance == b.distance;
}

// Immutable vocabulary -> unit-vector map. Rows are re-normalized to L2 norm
// 1 on construction; lookups and nearest-neighbor scans are const and safe to
// run from many threads at once.
class EmbeddingModel {
 public:
  // Takes ownership of the vocabulary and row matrix. Rows are re-normalized;
  // duplicate tokens and zero rows are rejected.
  EmbeddingModel(std::vector<Token> vocab, Mat vectors, std::string label);

  // Reads the word2vec text format: a "V D" header followed by exactly V
  // lines of "token v1 ... vD". Strict: no comment or metadata lines, no
  // missing or extra rows. `label` defaults to the file stem.
  static EmbeddingModel load_word2vec_text(const std::string& path, std::string label = "");

  // Inverse of load_word2vec_text; components are written with enough digits
  // to round-trip doubles exactly.
  void save_word2vec_text(const std::string& path) const;

  Eigen::Index dim() const { return vectors_.cols(); }
  std::size_t size() const { return vocab_.size(); }
  const std::string& label() const { return label_; }
  const std::vector<Token>& vocab() const { return vocab_; }
  const Mat& vectors() const { return vectors_; }

  bool contains(const Token& t) const { return index_.count(t) != 0; }

  // Unit vector for `t`; throws OovError if absent.
  Vec vector(const Token& t) const;

  // Up to k tokens closest to `query` by cosine distance, excluding the given
  // set. Ascending distance, ties broken by lexicographic token order. The
  // query need not be unit length. Throws if every token is excluded.
  std::vector<Neighbor> nearest_neighbors(const Vec& query, int k,
                                          const std::unordered_set<Token>& exclude = {}) const;

 private:
  std::vector<Token> vocab_;
  std::unordered_map<Token, Eigen::Index> index_;
  Mat vectors_;
  std::string label_;
};

}  // namespace relproj
