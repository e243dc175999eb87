#include "relproj/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "relproj/errors.hpp"
#include "relproj/token.hpp"

namespace relproj {

using json = nlohmann::json;

std::set<Token> YearlyRelationSet::location_universe() const {
  std::set<Token> out;
  for (const auto& [loc, _] : entries) out.insert(loc);
  return out;
}

std::size_t YearlyRelationSet::conflict_location_count() const {
  std::size_t n = 0;
  for (const auto& [_, targets] : entries)
    if (!targets.empty()) ++n;
  return n;
}

std::size_t YearlyRelationSet::pair_count() const {
  std::size_t n = 0;
  for (const auto& [_, targets] : entries) n += targets.size();
  return n;
}

std::vector<RelationPair> YearlyRelationSet::conflict_pairs() const {
  std::vector<RelationPair> out;
  for (const auto& [loc, targets] : entries)
    for (const auto& t : targets) out.push_back({loc, t, year});
  return out;
}

bool operator==(const YearlyRelationSet& a, const YearlyRelationSet& b) {
  return a.year == b.year && a.entries == b.entries;
}

std::vector<YearlyRelationSet> load_relations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open relations file: " + path);

  std::map<int, std::map<Token, std::set<Token>>> by_year;
  std::set<Token> universe;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": bad JSON: " + e.what());
    }
    if (!rec.is_object() || !rec.contains("year") || !rec.contains("location") ||
        !rec.contains("groups") || !rec["year"].is_number_integer() ||
        !rec["location"].is_string() || !rec["groups"].is_array())
      throw FormatError(path + ":" + std::to_string(lineno) +
                        ": record needs integer 'year', string 'location', array 'groups'");

    const int year = rec["year"].get<int>();
    Token location;
    std::set<Token> groups;
    try {
      location = normalize_token(rec["location"].get<std::string>());
      for (const auto& g : rec["groups"]) {
        if (!g.is_string())
          throw Error("groups must be strings");
        groups.insert(normalize_token(g.get<std::string>()));
      }
    } catch (const Error& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (groups.count(location))
      throw FormatError(path + ":" + std::to_string(lineno) + ": location '" + location +
                        "' listed as its own group");

    auto& year_entries = by_year[year];
    auto [it, inserted] = year_entries.emplace(location, groups);
    if (!inserted && it->second != groups)
      throw FormatError(path + ":" + std::to_string(lineno) + ": duplicate record for (" +
                        std::to_string(year) + ", " + location + ") with conflicting groups");
    universe.insert(location);
  }
  if (by_year.empty()) throw FormatError(path + ": no records");

  std::vector<YearlyRelationSet> out;
  out.reserve(by_year.size());
  for (auto& [year, entries] : by_year) {
    YearlyRelationSet set;
    set.year = year;
    for (const auto& loc : universe) {
      auto it = entries.find(loc);
      set.entries[loc] = it == entries.end() ? std::set<Token>{} : std::move(it->second);
    }
    out.push_back(std::move(set));
  }
  return out;
}

void save_relations(const std::vector<YearlyRelationSet>& sets, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write relations file: " + path);
  for (const auto& set : sets) {
    for (const auto& [loc, targets] : set.entries) {
      json rec;
      rec["year"] = set.year;
      rec["location"] = loc;
      rec["groups"] = targets;
      out << rec.dump() << '\n';
    }
  }
  if (!out) throw Error("write failed: " + path);
}

std::map<Token, long long> load_counts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open counts file: " + path);
  std::map<Token, long long> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw FormatError(path + ":" + std::to_string(lineno) + ": expected 'token<TAB>count'");
    long long count = 0;
    try {
      count = std::stoll(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": bad count");
    }
    if (count < 0)
      throw FormatError(path + ":" + std::to_string(lineno) + ": negative count");
    out[normalize_token(line.substr(0, tab))] += count;
  }
  return out;
}

namespace {

long long count_of(const std::map<Token, long long>& counts, const Token& t,
                   std::size_t* misses) {
  auto it = counts.find(t);
  if (it == counts.end()) {
    if (misses) ++*misses;
    return 0;
  }
  return it->second;
}

}  // namespace

std::vector<YearlyRelationSet> frequency_filter(
    const std::vector<YearlyRelationSet>& sets,
    const std::map<int, std::map<Token, long long>>& counts_by_year, long long min_count) {
  if (min_count < 0) throw Error("frequency_filter: min_count must be >= 0");
  static const std::map<Token, long long> no_counts;

  // A location stays in the universe if it clears the threshold somewhere.
  std::set<Token> surviving;
  for (const auto& set : sets) {
    auto cit = counts_by_year.find(set.year);
    const auto& counts = cit == counts_by_year.end() ? no_counts : cit->second;
    for (const auto& [loc, _] : set.entries)
      if (count_of(counts, loc, nullptr) >= min_count) surviving.insert(loc);
  }

  std::vector<YearlyRelationSet> out;
  out.reserve(sets.size());
  for (const auto& set : sets) {
    auto cit = counts_by_year.find(set.year);
    const auto& counts = cit == counts_by_year.end() ? no_counts : cit->second;
    std::size_t misses = 0;

    YearlyRelationSet filtered;
    filtered.year = set.year;
    for (const auto& [loc, targets] : set.entries) {
      if (!surviving.count(loc)) continue;
      std::set<Token> kept;
      if (count_of(counts, loc, &misses) >= min_count) {
        for (const auto& t : targets)
          if (count_of(counts, t, &misses) >= min_count) kept.insert(t);
      }
      filtered.entries.emplace(loc, std::move(kept));
    }
    if (misses > 0)
      std::cerr << "frequency_filter: year " << set.year << ": " << misses
                << " token(s) without counts, treated as 0\n";
    out.push_back(std::move(filtered));
  }
  return out;
}

DatasetStats compute_stats(const std::vector<YearlyRelationSet>& sets) {
  if (sets.empty()) throw Error("compute_stats: empty dataset");

  DatasetStats stats;
  std::set<Token> insurgents;
  std::set<std::pair<Token, Token>> unique_pairs;
  std::size_t conflict_loc_instances = 0;
  std::size_t pair_instances = 0;
  double share_sum = 0.0;

  std::map<int, std::set<std::pair<Token, Token>>> pairs_by_year;
  for (const auto& set : sets) {
    auto& year_pairs = pairs_by_year[set.year];
    for (const auto& [loc, targets] : set.entries) {
      if (!targets.empty()) ++conflict_loc_instances;
      for (const auto& t : targets) {
        insurgents.insert(t);
        unique_pairs.emplace(loc, t);
        year_pairs.emplace(loc, t);
        ++pair_instances;
      }
    }
    const std::size_t universe = set.entries.size();
    share_sum += universe == 0 ? 0.0
                               : static_cast<double>(set.conflict_location_count()) /
                                     static_cast<double>(universe);
  }

  stats.locations = static_cast<long long>(sets.front().entries.size());
  stats.insurgents = static_cast<long long>(insurgents.size());
  stats.conflict_pairs = static_cast<long long>(unique_pairs.size());
  stats.conflict_locations_share = share_sum / static_cast<double>(sets.size());
  stats.insurgents_per_location =
      conflict_loc_instances == 0
          ? 0.0
          : static_cast<double>(pair_instances) / static_cast<double>(conflict_loc_instances);

  // New-pairs share over numerically consecutive year pairs: of the pairs
  // active in year n+1, the fraction unseen in year n.
  long long new_pairs = 0, next_pairs = 0;
  bool any_consecutive = false;
  for (const auto& [year, pairs] : pairs_by_year) {
    auto next = pairs_by_year.find(year + 1);
    if (next == pairs_by_year.end()) continue;
    any_consecutive = true;
    next_pairs += static_cast<long long>(next->second.size());
    for (const auto& pr : next->second)
      if (!pairs.count(pr)) ++new_pairs;
  }
  if (any_consecutive && next_pairs > 0)
    stats.new_pairs_share = static_cast<double>(new_pairs) / static_cast<double>(next_pairs);
  else if (any_consecutive)
    stats.new_pairs_share = 0.0;
  return stats;
}

std::string stats_to_json(const DatasetStats& stats) {
  json j;
  j["locations"] = stats.locations;
  j["insurgents"] = stats.insurgents;
  j["conflict_pairs"] = stats.conflict_pairs;
  if (stats.new_pairs_share) j["new_pairs_share"] = *stats.new_pairs_share;
  j["conflict_locations_share"] = stats.conflict_locations_share;
  j["insurgents_per_location"] = stats.insurgents_per_location;
  return j.dump(2);
}

}  // namespace relproj
