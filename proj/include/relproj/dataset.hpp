#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "relproj/projection.hpp"
#include "relproj/types.hpp"

namespace relproj {

// Gold relations for one year. `entries` is keyed by the full location
// universe: a peaceful location maps to the empty set. Every token is
// normalized.
struct YearlyRelationSet {
  int year = 0;
  std::map<Token, std::set<Token>> entries;

  // All locations, conflict or peaceful; identical across the years of one
  // dataset by construction.
  std::set<Token> location_universe() const;
  std::size_t conflict_location_count() const;
  std::size_t pair_count() const;

  // Flattened (source, target, year) records for the conflict locations, in
  // sorted order.
  std::vector<RelationPair> conflict_pairs() const;
};

bool operator==(const YearlyRelationSet& a, const YearlyRelationSet& b);

struct DatasetStats {
  long long locations = 0;
  long long insurgents = 0;
  long long conflict_pairs = 0;  // unique (location, group) pairs across years
  std::optional<double> new_pairs_share;  // needs >= 2 consecutive years
  double conflict_locations_share = 0.0;
  double insurgents_per_location = 0.0;
};

// Reads line-delimited JSON records {"year": int, "location": str,
// "groups": [str, ...]} (groups may be empty). Tokens are normalized on
// ingest. Returns one set per distinct year, sorted by year; every set
// carries the union of locations seen in any year. Duplicate
// (year, location) records are merged when their groups agree and rejected
// when they conflict.
std::vector<YearlyRelationSet> load_relations(const std::string& path);

// Inverse of load_relations: one record per (year, location), including
// empty-group records, sorted by (year, location).
void save_relations(const std::vector<YearlyRelationSet>& sets, const std::string& path);

// Per-year corpus frequencies, "token<TAB>count" lines. Tokens are
// normalized; counts of raw forms that collapse to one token accumulate.
std::map<Token, long long> load_counts(const std::string& path);

// Drops targets below min_count in their year's corpus and empties the
// target set of any location below min_count that year. The location
// universe is re-derived: a location survives if it reaches min_count in at
// least one year. Missing counts are treated as 0 (logged to stderr).
std::vector<YearlyRelationSet> frequency_filter(
    const std::vector<YearlyRelationSet>& sets,
    const std::map<int, std::map<Token, long long>>& counts_by_year, long long min_count);

// Aggregate statistics; new_pairs_share is only present when at least one
// numerically consecutive year pair exists.
DatasetStats compute_stats(const std::vector<YearlyRelationSet>& sets);

std::string stats_to_json(const DatasetStats& stats);

}  // namespace relproj
