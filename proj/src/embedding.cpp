#include "relproj/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace relproj {

EmbeddingModel::EmbeddingModel(std::vector<Token> vocab, Mat vectors, std::string label)
    : vocab_(std::move(vocab)), vectors_(std::move(vectors)), label_(std::move(label)) {
  if (vectors_.cols() < 1) throw Error("EmbeddingModel: dimension must be >= 1");
  if (static_cast<Eigen::Index>(vocab_.size()) != vectors_.rows())
    throw Error("EmbeddingModel: vocabulary/matrix row count mismatch");
  index_.reserve(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    auto [it, inserted] = index_.emplace(vocab_[i], static_cast<Eigen::Index>(i));
    if (!inserted) throw Error("EmbeddingModel: duplicate token '" + vocab_[i] + "'");
  }
  for (Eigen::Index r = 0; r < vectors_.rows(); ++r) {
    const Scalar n = vectors_.row(r).norm();
    if (n == 0.0 || !std::isfinite(n))
      throw Error("EmbeddingModel: zero or non-finite vector for token '" + vocab_[r] + "'");
    vectors_.row(r) /= n;
  }
}

Vec EmbeddingModel::vector(const Token& t) const {
  auto it = index_.find(t);
  if (it == index_.end()) throw OovError(t);
  return vectors_.row(it->second).transpose();
}

std::vector<Neighbor> EmbeddingModel::nearest_neighbors(
    const Vec& query, int k, const std::unordered_set<Token>& exclude) const {
  if (k < 1) throw Error("nearest_neighbors: k must be >= 1");
  if (query.size() != dim())
    throw Error("nearest_neighbors: query dimension " + std::to_string(query.size()) +
                " != model dimension " + std::to_string(dim()));
  const Scalar qnorm = query.norm();
  if (qnorm == 0.0) throw Error("nearest_neighbors: zero-norm query");

  std::vector<std::pair<Scalar, Eigen::Index>> scored;
  scored.reserve(vocab_.size());
  for (Eigen::Index r = 0; r < vectors_.rows(); ++r) {
    if (!exclude.empty() && exclude.count(vocab_[r])) continue;
    // Same arithmetic as cosine_distance so results agree exactly with a
    // per-pair oracle.
    scored.emplace_back(cosine_distance(query, vectors_.row(r).transpose()), r);
  }
  if (scored.empty()) throw Error("nearest_neighbors: effective vocabulary is empty");

  const auto cmp = [this](const std::pair<Scalar, Eigen::Index>& a,
                          const std::pair<Scalar, Eigen::Index>& b) {
    if (a.first != b.first) return a.first < b.first;
    return vocab_[a.second] < vocab_[b.second];
  };
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), cmp);

  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i)
    out.push_back({vocab_[scored[i].second], scored[i].first});
  return out;
}

namespace {

Scalar parse_component(const std::string& field, const std::string& path, std::size_t lineno) {
  Scalar value;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw FormatError(path + ":" + std::to_string(lineno) + ": bad float '" + field + "'");
  return value;
}

}  // namespace

EmbeddingModel EmbeddingModel::load_word2vec_text(const std::string& path, std::string label) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file: " + path);
  if (label.empty()) label = std::filesystem::path(path).stem().string();

  std::string line;
  if (!std::getline(in, line)) throw FormatError(path + ": empty file");
  long long v = 0, d = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> v >> d) || (hs >> extra))
      throw FormatError(path + ": malformed header '" + line + "'");
  }
  if (v <= 0 || d <= 0)
    throw FormatError(path + ": header counts must be positive, got " + std::to_string(v) +
                      " " + std::to_string(d));

  std::vector<Token> vocab;
  vocab.reserve(static_cast<std::size_t>(v));
  Mat vectors(v, d);
  std::string field;
  for (long long r = 0; r < v; ++r) {
    if (!std::getline(in, line))
      throw FormatError(path + ": expected " + std::to_string(v) + " rows, found " +
                        std::to_string(r));
    const std::size_t lineno = static_cast<std::size_t>(r) + 2;
    std::istringstream ls(line);
    if (!(ls >> field)) throw FormatError(path + ":" + std::to_string(lineno) + ": blank row");
    vocab.push_back(field);
    for (long long c = 0; c < d; ++c) {
      if (!(ls >> field))
        throw FormatError(path + ":" + std::to_string(lineno) + ": row has fewer than " +
                          std::to_string(d) + " components");
      vectors(r, c) = parse_component(field, path, lineno);
    }
    if (ls >> field)
      throw FormatError(path + ":" + std::to_string(lineno) + ": row has more than " +
                        std::to_string(d) + " components");
  }
  // Strict format: nothing after the last row but optional trailing newline.
  while (std::getline(in, line)) {
    if (!line.empty())
      throw FormatError(path + ": trailing content after " + std::to_string(v) + " rows");
  }
  return EmbeddingModel(std::move(vocab), std::move(vectors), std::move(label));
}

void EmbeddingModel::save_word2vec_text(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write embedding file: " + path);
  out.precision(std::numeric_limits<Scalar>::max_digits10);
  out << vocab_.size() << ' ' << dim() << '\n';
  for (std::size_t r = 0; r < vocab_.size(); ++r) {
    out << vocab_[r];
    for (Eigen::Index c = 0; c < dim(); ++c) out << ' ' << vectors_(static_cast<Eigen::Index>(r), c);
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

}  // namespace relproj
