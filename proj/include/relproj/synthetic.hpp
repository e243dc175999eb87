#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "relproj/dataset.hpp"
#include "relproj/embedding.hpp"
#include "relproj/types.hpp"

namespace relproj {

// Small deterministic RNG front-end. mt19937_64 output is pinned by the
// standard, and the transforms below avoid std::*_distribution, whose
// sequences vary across library implementations. Generated fixtures are
// therefore bit-identical everywhere for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double normal();   // standard normal via Box-Muller
  std::uint64_t below(std::uint64_t n);  // uniform in [0, n)

  Vec gaussian_vector(Eigen::Index d);
  Vec unit_vector(Eigen::Index d);
  Mat gaussian_matrix(Eigen::Index rows, Eigen::Index cols);
  // Haar-ish orthogonal matrix: QR of a Gaussian matrix with the R diagonal
  // sign fixed.
  Mat random_orthogonal(Eigen::Index d);

  // Index draw from an (unnormalized) probability mass function.
  std::size_t sample_pmf(const std::vector<double>& pmf);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

struct SyntheticConfig {
  Eigen::Index dim = 16;
  int n_locations = 60;
  int n_groups = 120;
  // < 0 means the documented default of 100x the gold vocabulary.
  int n_distractors = -1;
  // pmf over the number of groups a location gets in a year; index 0 is the
  // peaceful mass.
  std::vector<double> groups_per_location = {0.5, 0.3, 0.2};
  int years = 3;
  int start_year = 2010;
  // Planted relation for the first year; empty means a seeded random
  // orthogonal map (which keeps the noise-free construction exactly linear).
  Mat relation_matrix;
  double noise_sigma = 0.0;
  double drift_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  std::map<int, EmbeddingModel> models;
  std::vector<YearlyRelationSet> gold;
  std::map<int, Mat> planted;  // relation matrix per year
};

// Plants a linear relation in a family of yearly embedding spaces:
//  - location vectors are fixed across years, sampled on the unit sphere;
//  - each year's active group sits at normalize(location * T_year + noise),
//    each group serving at most one location per year;
//  - inactive groups and distractors are re-sampled uniformly per year;
//  - T drifts by an additive Gaussian perturbation of scale drift_sigma.
// Tokens are named loc_<i>, grp_<j>, dst_<m>. Deterministic given the seed.
SyntheticData generate(const SyntheticConfig& config);

// Writes models as <out_dir>/<year>.vec plus <out_dir>/relations.jsonl, in
// the exact formats the loaders consume.
void write_synthetic(const SyntheticData& data, const std::string& out_dir);

}  // namespace relproj
