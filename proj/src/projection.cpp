#include "relproj/projection.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace relproj {

TrainingSet build_training_set(const EmbeddingModel& model,
                               const std::vector<RelationPair>& pairs,
                               std::size_t* dropped_out) {
  std::vector<const RelationPair*> kept;
  kept.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (model.contains(p.source) && model.contains(p.target))
      kept.push_back(&p);
  }
  if (dropped_out) *dropped_out = pairs.size() - kept.size();

  TrainingSet ts;
  ts.sources.resize(static_cast<Eigen::Index>(kept.size()), model.dim());
  ts.targets.resize(static_cast<Eigen::Index>(kept.size()), model.dim());
  ts.pairs.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    ts.sources.row(static_cast<Eigen::Index>(i)) = model.vector(kept[i]->source).transpose();
    ts.targets.row(static_cast<Eigen::Index>(i)) = model.vector(kept[i]->target).transpose();
    ts.pairs.push_back(*kept[i]);
  }
  return ts;
}

Mat solve_projection(const Mat& sources, const Mat& targets, Scalar ridge) {
  if (sources.rows() != targets.rows() || sources.cols() != targets.cols())
    throw Error("solve_projection: source/target shape mismatch");
  if (sources.rows() < 1) throw Error("solve_projection: empty training set");
  if (ridge < 0.0) throw Error("solve_projection: ridge must be >= 0");

  const Eigen::Index d = sources.cols();
  if (ridge == 0.0) {
    // X'X is singular exactly when X lacks full column rank; report that
    // instead of handing back whatever the factorization produces.
    Eigen::ColPivHouseholderQR<Mat> qr(sources);
    if (qr.rank() < d)
      throw RankError("solve_projection: X'X is singular (rank " + std::to_string(qr.rank()) +
                      " < " + std::to_string(d) + "); use ridge > 0");
  }

  Mat gram = sources.transpose() * sources;
  gram.diagonal().array() += ridge;
  const Mat rhs = sources.transpose() * targets;

  Mat solution;
  Eigen::LLT<Mat> llt(gram);
  if (llt.info() == Eigen::Success) {
    solution = llt.solve(rhs);
  } else {
    Eigen::LDLT<Mat> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
      throw RankError("solve_projection: normal equations could not be factorized");
    solution = ldlt.solve(rhs);
  }
  if (!solution.allFinite())
    throw RankError("solve_projection: non-finite solution (rank-deficient system?)");
  return solution;
}

ProjectionMatrix solve_projection(const TrainingSet& train, Scalar ridge,
                                  std::string trained_on) {
  ProjectionMatrix T;
  T.matrix = solve_projection(train.sources, train.targets, ridge);
  T.dim = T.matrix.rows();
  T.pair_count = train.pair_count();
  T.trained_on = std::move(trained_on);
  return T;
}

ProjectionMatrix procrustes_align(const EmbeddingModel& a, const EmbeddingModel& b,
                                  const std::set<Token>& anchor_vocab) {
  if (anchor_vocab.empty()) throw Error("procrustes_align: empty anchor set");
  if (a.dim() != b.dim())
    throw Error("procrustes_align: models have different dimensions (" +
                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");

  const Eigen::Index d = a.dim();
  Mat A(static_cast<Eigen::Index>(anchor_vocab.size()), d);
  Mat B(static_cast<Eigen::Index>(anchor_vocab.size()), d);
  Eigen::Index r = 0;
  for (const auto& t : anchor_vocab) {
    A.row(r) = a.vector(t).transpose();  // throws OovError if an anchor is missing
    B.row(r) = b.vector(t).transpose();
    ++r;
  }

  Eigen::BDCSVD<Mat> svd(A.transpose() * B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat Q = svd.matrixU() * svd.matrixV().transpose();

  const Scalar dev = (Q.transpose() * Q - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev > 1e-6)
    throw Error("procrustes_align: result deviates from orthogonality by " + std::to_string(dev));

  ProjectionMatrix out;
  out.dim = d;
  out.matrix = std::move(Q);
  out.trained_on = a.label() + "->" + b.label();
  out.pair_count = static_cast<Eigen::Index>(anchor_vocab.size());
  return out;
}

void write_projection(std::ostream& out, const ProjectionMatrix& T) {
  const auto prec = out.precision(std::numeric_limits<Scalar>::max_digits10);
  out << T.dim << ' ' << T.pair_count << ' ' << T.trained_on << '\n';
  for (Eigen::Index i = 0; i < T.dim; ++i) {
    for (Eigen::Index j = 0; j < T.dim; ++j) {
      if (j) out << ' ';
      out << T.matrix(i, j);
    }
    out << '\n';
  }
  out.precision(prec);
}

namespace {

Scalar parse_double(const std::string& s, const std::string& origin) {
  Scalar v;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError(origin + ": bad float '" + s + "'");
  return v;
}

}  // namespace

ProjectionMatrix read_projection(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(origin + ": empty file");

  ProjectionMatrix T;
  {
    std::istringstream hs(line);
    long long d = 0, p = 0;
    if (!(hs >> d >> p)) throw FormatError(origin + ": malformed header '" + line + "'");
    if (d <= 0 || p <= 0) throw FormatError(origin + ": nonpositive header counts");
    T.dim = static_cast<Eigen::Index>(d);
    T.pair_count = static_cast<Eigen::Index>(p);
    std::getline(hs, T.trained_on);
    // Label is the remainder of the header line, trimmed.
    const auto first = T.trained_on.find_first_not_of(" \t");
    T.trained_on = first == std::string::npos ? "" : T.trained_on.substr(first);
  }
  T.matrix.resize(T.dim, T.dim);
  std::string field;
  for (Eigen::Index i = 0; i < T.dim; ++i) {
    if (!std::getline(in, line))
      throw FormatError(origin + ": expected " + std::to_string(T.dim) + " matrix rows");
    std::istringstream ls(line);
    for (Eigen::Index j = 0; j < T.dim; ++j) {
      if (!(ls >> field)) throw FormatError(origin + ": short matrix row " + std::to_string(i));
      T.matrix(i, j) = parse_double(field, origin);
    }
    if (ls >> field) throw FormatError(origin + ": long matrix row " + std::to_string(i));
  }
  if (!T.matrix.allFinite()) throw FormatError(origin + ": non-finite matrix entries");
  return T;
}

void save_projection(const ProjectionMatrix& T, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write projection file: " + path);
  write_projection(out, T);
  if (!out) throw Error("write failed: " + path);
}

ProjectionMatrix load_projection(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open projection file: " + path);
  ProjectionMatrix T = read_projection(in, path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) throw FormatError(path + ": trailing content after matrix rows");
  }
  return T;
}

}  // namespace relproj
