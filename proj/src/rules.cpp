#include "readmit/rules.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <map>
#include <set>

#include "readmit/csv.hpp"
#include "readmit/error.hpp"

namespace readmit {

namespace {

using Bits = std::vector<std::uint64_t>;

struct ItemUniverse {
  std::vector<Item> items;
  std::vector<Bits> tids;
};

ItemUniverse build_universe(const FeatureSchema& schema, std::span<const EncounterVector> rows) {
  const std::size_t words = (rows.size() + 63) / 64;
  ItemUniverse u;
  std::map<Item, std::size_t> index;
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (schema[f].kind != FeatureKind::kNominal) continue;
    for (std::size_t c = 0; c + 1 < schema.cardinality(f); ++c) {  // last code is the other bucket
      index[{f, c}] = u.items.size();
      u.items.push_back({f, c});
      u.tids.emplace_back(words, 0);
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t f = 0; f < schema.size(); ++f) {
      if (schema[f].kind != FeatureKind::kNominal) continue;
      const auto it = index.find({f, static_cast<std::size_t>(rows[i].features[f])});
      if (it != index.end()) u.tids[it->second][i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }
  return u;
}

std::size_t popcount(const Bits& b) {
  std::size_t n = 0;
  for (const auto w : b) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<ItemSet> apriori(const FeatureSchema& schema, std::span<const EncounterVector> rows,
                             const MiningParams& params) {
  if (params.min_support < 1) throw UsageError("rules: min_support must be >= 1");
  std::vector<ItemSet> out;
  if (params.max_len < 1 || rows.empty()) return out;
  const auto u = build_universe(schema, rows);

  struct Frequent {
    std::vector<std::size_t> ids;  // indices into the universe, ascending
    Bits tids;
  };
  std::vector<Frequent> level;
  for (std::size_t i = 0; i < u.items.size(); ++i) {
    if (popcount(u.tids[i]) >= params.min_support) level.push_back({{i}, u.tids[i]});
  }

  auto emit = [&](const std::vector<Frequent>& sets) {
    for (const auto& s : sets) {
      ItemSet is;
      for (const auto id : s.ids) is.items.push_back(u.items[id]);
      is.support = popcount(s.tids);
      out.push_back(std::move(is));
    }
  };
  emit(level);

  for (std::size_t k = 2; k <= params.max_len && level.size() > 1; ++k) {
    std::set<std::vector<std::size_t>> previous;
    for (const auto& s : level) previous.insert(s.ids);
    std::vector<Frequent> next;
    Bits scratch;
    for (std::size_t a = 0; a < level.size(); ++a) {
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        const auto& x = level[a].ids;
        const auto& y = level[b].ids;
        if (!std::equal(x.begin(), x.end() - 1, y.begin())) break;  // level is sorted, prefixes are contiguous
        if (u.items[x.back()].feature == u.items[y.back()].feature) continue;
        std::vector<std::size_t> cand = x;
        cand.push_back(y.back());
        // Downward closure: every (k-1)-subset must be frequent.
        bool pruned = false;
        for (std::size_t drop = 0; drop + 2 < cand.size() && !pruned; ++drop) {
          std::vector<std::size_t> sub;
          for (std::size_t m = 0; m < cand.size(); ++m) {
            if (m != drop) sub.push_back(cand[m]);
          }
          pruned = !previous.contains(sub);
        }
        if (pruned) continue;
        scratch = level[a].tids;
        const auto& other = u.tids[y.back()];
        for (std::size_t w = 0; w < scratch.size(); ++w) scratch[w] &= other[w];
        if (popcount(scratch) >= params.min_support) next.push_back({std::move(cand), scratch});
      }
    }
    emit(next);
    level = std::move(next);
  }
  return out;
}

}  // namespace

std::vector<ItemSet> mine_frequent(const Dataset& data, const MiningParams& params) {
  return apriori(*data.schema, data.rows, params);
}

std::string_view to_string(RuleClass c) {
  switch (c) {
    case RuleClass::kUnder30: return "<30";
    case RuleClass::kOver30: return ">30";
    case RuleClass::kNo: return "NO";
    case RuleClass::kReadmitted: return "READMITTED";
  }
  return "?";
}

std::optional<RuleClass> parse_rule_class(std::string_view text) {
  for (const auto c : {RuleClass::kUnder30, RuleClass::kOver30, RuleClass::kNo, RuleClass::kReadmitted}) {
    if (to_string(c) == text) return c;
  }
  if (text == "lt30") return RuleClass::kUnder30;
  if (text == "gt30") return RuleClass::kOver30;
  if (text == "no") return RuleClass::kNo;
  if (text == "readmitted") return RuleClass::kReadmitted;
  return std::nullopt;
}

bool in_rule_class(Readmitted r, RuleClass c) {
  switch (c) {
    case RuleClass::kUnder30: return r == Readmitted::kUnder30;
    case RuleClass::kOver30: return r == Readmitted::kOver30;
    case RuleClass::kNo: return r == Readmitted::kNo;
    case RuleClass::kReadmitted: return r != Readmitted::kNo;
  }
  return false;
}

std::vector<ItemSet> mine_class_sensitive(const Dataset& data, RuleClass cls, const MiningParams& params) {
  std::vector<EncounterVector> subset;
  for (const auto& row : data.rows) {
    if (in_rule_class(row.readmitted, cls)) subset.push_back(row);
  }
  if (subset.empty()) throw DataError("rules: no encounters in class " + std::string(to_string(cls)));
  return apriori(*data.schema, subset, params);
}

std::vector<ClassRuleStats> class_stats(std::span<const ItemSet> itemsets, const Dataset& data) {
  const auto u = build_universe(*data.schema, data.rows);
  std::map<Item, std::size_t> index;
  for (std::size_t i = 0; i < u.items.size(); ++i) index[u.items[i]] = i;
  const std::size_t words = (data.rows.size() + 63) / 64;
  std::array<Bits, 3> outcome;
  outcome.fill(Bits(words, 0));
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    outcome[static_cast<std::size_t>(data.rows[i].readmitted)][i / 64] |= std::uint64_t{1} << (i % 64);
  }

  std::vector<ClassRuleStats> out;
  Bits scratch(words);
  for (const auto& set : itemsets) {
    ClassRuleStats s;
    s.items = set.items;
    std::fill(scratch.begin(), scratch.end(), ~std::uint64_t{0});
    bool known = true;
    for (const auto& it : set.items) {
      const auto found = index.find(it);
      if (found == index.end()) {
        known = false;
        break;
      }
      const auto& tids = u.tids[found->second];
      for (std::size_t w = 0; w < words; ++w) scratch[w] &= tids[w];
    }
    if (!known) continue;
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t w = 0; w < words; ++w) {
        s.class_matches[c] += static_cast<std::size_t>(std::popcount(scratch[w] & outcome[c][w]));
      }
      s.total_matches += s.class_matches[c];
    }
    if (s.total_matches > 0) out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const ClassRuleStats& a, const ClassRuleStats& b) {
    // a.lt30 / a.total < b.lt30 / b.total, compared exactly
    const auto lhs = a.class_matches[0] * b.total_matches;
    const auto rhs = b.class_matches[0] * a.total_matches;
    if (lhs != rhs) return lhs < rhs;
    if (a.total_matches != b.total_matches) return a.total_matches > b.total_matches;
    return a.items < b.items;
  });
  return out;
}

std::vector<ItemSet> merge_itemsets(std::span<const std::vector<ItemSet>> lists) {
  std::vector<ItemSet> out;
  std::set<std::vector<Item>> seen;
  for (const auto& list : lists) {
    for (const auto& s : list) {
      if (seen.insert(s.items).second) out.push_back(s);
    }
  }
  return out;
}

std::optional<std::vector<Item>> parse_items(const FeatureSchema& schema,
                                             std::span<const std::pair<std::string, std::string>> items) {
  std::vector<Item> out;
  for (const auto& [name, value] : items) {
    const auto f = schema.find(name);
    if (!f || schema[*f].kind != FeatureKind::kNominal) return std::nullopt;
    const auto code = schema.exact_code_of(*f, value);
    if (!code) return std::nullopt;
    out.push_back({*f, *code});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string format_items(const FeatureSchema& schema, std::span<const Item> items) {
  std::string out;
  for (const auto& it : items) {
    if (!out.empty()) out += "; ";
    out += schema[it.feature].name + "=" + schema[it.feature].values[it.code];
  }
  return out;
}

std::string rules_csv(const FeatureSchema& schema, std::span<const ClassRuleStats> rules) {
  std::string out = "itemset,pct_lt30,pct_gt30,pct_no,total_matches\n";
  char buf[160];
  for (const auto& r : rules) {
    std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%.4f,%zu\n", 100 * r.fraction(Readmitted::kUnder30),
                  100 * r.fraction(Readmitted::kOver30), 100 * r.fraction(Readmitted::kNo), r.total_matches);
    out += csv::escape_field(format_items(schema, r.items));
    out += buf;
  }
  return out;
}

nlohmann::json rules_json(const FeatureSchema& schema, std::span<const ClassRuleStats> rules, std::size_t population) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rules) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& it : r.items) {
      items.push_back({{"feature", schema[it.feature].name}, {"value", schema[it.feature].values[it.code]}});
    }
    out.push_back({{"itemset", format_items(schema, r.items)},
                   {"items", std::move(items)},
                   {"total_matches", r.total_matches},
                   {"support", static_cast<double>(r.total_matches) / static_cast<double>(population)},
                   {"class_matches", {{"<30", r.class_matches[0]}, {">30", r.class_matches[1]}, {"NO", r.class_matches[2]}}},
                   // itemset => outcome confidence, in percent of matches
                   {"pct", {{"<30", 100 * r.fraction(Readmitted::kUnder30)},
                            {">30", 100 * r.fraction(Readmitted::kOver30)},
                            {"NO", 100 * r.fraction(Readmitted::kNo)}}},
                   {"confidence", {{"<30", r.fraction(Readmitted::kUnder30)},
                                   {">30", r.fraction(Readmitted::kOver30)},
                                   {"NO", r.fraction(Readmitted::kNo)}}}});
  }
  return out;
}

}  // namespace readmit
