#include "relproj/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

#include <Eigen/QR>

#include "relproj/errors.hpp"

namespace relproj {

double Rng::uniform() {
  // 53 random bits -> [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error("Rng::below: n must be positive");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

Vec Rng::gaussian_vector(Eigen::Index d) {
  Vec v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = normal();
  return v;
}

Vec Rng::unit_vector(Eigen::Index d) {
  Vec v = gaussian_vector(d);
  Scalar n = v.norm();
  while (n < 1e-12) {  // astronomically unlikely, but keep the contract total
    v = gaussian_vector(d);
    n = v.norm();
  }
  return v / n;
}

Mat Rng::gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
  return m;
}

Mat Rng::random_orthogonal(Eigen::Index d) {
  const Mat g = gaussian_matrix(d, d);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  return q;
}

std::size_t Rng::sample_pmf(const std::vector<double>& pmf) {
  double total = 0.0;
  for (double p : pmf) {
    if (p < 0.0) throw Error("sample_pmf: negative mass");
    total += p;
  }
  if (total <= 0.0) throw Error("sample_pmf: zero total mass");
  double x = uniform() * total;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    x -= pmf[i];
    if (x < 0.0) return i;
  }
  return pmf.size() - 1;
}

namespace {

void validate(const SyntheticConfig& config) {
  if (config.dim < 1) throw Error("synthetic: dim must be >= 1");
  if (config.n_locations < 1) throw Error("synthetic: need at least one location");
  if (config.n_groups < 0 || config.years < 1) throw Error("synthetic: bad counts");
  if (config.groups_per_location.empty()) throw Error("synthetic: empty groups_per_location pmf");
  const std::size_t max_groups = config.groups_per_location.size() - 1;
  if (max_groups > static_cast<std::size_t>(config.n_groups))
    throw Error("synthetic: groups_per_location allows " + std::to_string(max_groups) +
                " groups per location but only " + std::to_string(config.n_groups) +
                " groups exist");
  if (config.noise_sigma < 0.0 || config.drift_sigma < 0.0)
    throw Error("synthetic: sigmas must be >= 0");
  if (config.relation_matrix.size() != 0 &&
      (config.relation_matrix.rows() != config.dim || config.relation_matrix.cols() != config.dim))
    throw Error("synthetic: relation_matrix must be dim x dim");
}

}  // namespace

SyntheticData generate(const SyntheticConfig& config) {
  validate(config);
  Rng rng(config.seed);

  const Eigen::Index d = config.dim;
  const int n_loc = config.n_locations;
  const int n_grp = config.n_groups;
  const int n_dst = config.n_distractors >= 0 ? config.n_distractors : 100 * (n_loc + n_grp);

  std::vector<Token> vocab;
  vocab.reserve(static_cast<std::size_t>(n_loc + n_grp + n_dst));
  for (int i = 0; i < n_loc; ++i) vocab.push_back("loc_" + std::to_string(i));
  for (int j = 0; j < n_grp; ++j) vocab.push_back("grp_" + std::to_string(j));
  for (int m = 0; m < n_dst; ++m) vocab.push_back("dst_" + std::to_string(m));

  // Locations keep their vectors across years; the relation drifts instead.
  Mat locations(n_loc, d);
  for (int i = 0; i < n_loc; ++i) locations.row(i) = rng.unit_vector(d).transpose();

  Mat relation = config.relation_matrix.size() != 0 ? config.relation_matrix
                                                    : rng.random_orthogonal(d);

  SyntheticData data;
  for (int y = 0; y < config.years; ++y) {
    const int year = config.start_year + y;
    if (y > 0 && config.drift_sigma > 0.0)
      relation += config.drift_sigma * rng.gaussian_matrix(d, d);
    data.planted.emplace(year, relation);

    // Gold assignment: each location draws its group count, then takes
    // unused groups from a per-year shuffled pool.
    std::vector<int> pool(static_cast<std::size_t>(n_grp));
    for (int j = 0; j < n_grp; ++j) pool[static_cast<std::size_t>(j)] = j;
    rng.shuffle(pool);
    std::size_t next_group = 0;

    YearlyRelationSet year_gold;
    year_gold.year = year;
    std::vector<int> assigned_location(static_cast<std::size_t>(n_grp), -1);
    for (int i = 0; i < n_loc; ++i) {
      const std::size_t want = rng.sample_pmf(config.groups_per_location);
      std::set<Token> targets;
      for (std::size_t g = 0; g < want; ++g) {
        if (next_group >= pool.size())
          throw Error("synthetic: group pool exhausted in year " + std::to_string(year) +
                      "; raise n_groups");
        const int grp = pool[next_group++];
        assigned_location[static_cast<std::size_t>(grp)] = i;
        targets.insert("grp_" + std::to_string(grp));
      }
      year_gold.entries.emplace("loc_" + std::to_string(i), std::move(targets));
    }

    Mat vectors(n_loc + n_grp + n_dst, d);
    vectors.topRows(n_loc) = locations;
    for (int j = 0; j < n_grp; ++j) {
      const int owner = assigned_location[static_cast<std::size_t>(j)];
      Vec v;
      if (owner >= 0) {
        // Noise is added before normalization so group vectors live on the
        // sphere like every other token.
        v = (locations.row(owner) * relation).transpose();
        if (config.noise_sigma > 0.0) v += config.noise_sigma * rng.gaussian_vector(d);
        const Scalar n = v.norm();
        if (n < 1e-12) throw Error("synthetic: degenerate group vector");
        v /= n;
      } else {
        v = rng.unit_vector(d);
      }
      vectors.row(n_loc + j) = v.transpose();
    }
    for (int m = 0; m < n_dst; ++m) vectors.row(n_loc + n_grp + m) = rng.unit_vector(d).transpose();

    data.models.emplace(year,
                        EmbeddingModel(vocab, std::move(vectors), "synth_" + std::to_string(year)));
    data.gold.push_back(std::move(year_gold));
  }
  return data;
}

void write_synthetic(const SyntheticData& data, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  for (const auto& [year, model] : data.models)
    model.save_word2vec_text((dir / (std::to_string(year) + ".vec")).string());
  save_relations(data.gold, (dir / "relations.jsonl").string());
}

}  // namespace relproj
