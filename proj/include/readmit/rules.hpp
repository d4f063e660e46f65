#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "readmit/dataset.hpp"

namespace readmit {

/// feature = value for a nominal feature; `code` indexes the schema vocabulary.
struct Item {
  std::size_t feature = 0;
  std::size_t code = 0;

  auto operator<=>(const Item&) const = default;
};

struct ItemSet {
  /// Sorted by (feature, code); at most one item per feature.
  std::vector<Item> items;
  std::size_t support = 0;
};

struct MiningParams {
  std::size_t min_support = 100;
  std::size_t max_len = 4;
};

/// Apriori over the nominal features of `data` (numeric features and the reserved
/// other value never form items). Returns every itemset with at most max_len
/// items and support >= min_support, ordered by length then items.
std::vector<ItemSet> mine_frequent(const Dataset& data, const MiningParams& params);

/// The class populations rules can be mined from.
enum class RuleClass { kUnder30, kOver30, kNo, kReadmitted };

std::string_view to_string(RuleClass c);
std::optional<RuleClass> parse_rule_class(std::string_view text);
bool in_rule_class(Readmitted r, RuleClass c);

/// Apriori restricted to the encounters of one class. Support counts refer to
/// that subset. Throws DataError when the class has no encounters.
std::vector<ItemSet> mine_class_sensitive(const Dataset& data, RuleClass cls, const MiningParams& params);

struct ClassRuleStats {
  std::vector<Item> items;
  std::size_t total_matches = 0;
  /// Matches per outcome: <30, >30, NO.
  std::array<std::size_t, 3> class_matches{};

  double fraction(Readmitted r) const {
    return static_cast<double>(class_matches[static_cast<std::size_t>(r)]) / static_cast<double>(total_matches);
  }
};

/// Matches and outcome mix of each itemset over all of `data`, sorted by ascending
/// share of "<30" (ties: more matches first, then items). Itemsets with no match
/// are dropped.
std::vector<ClassRuleStats> class_stats(std::span<const ItemSet> itemsets, const Dataset& data);

/// Union of itemsets by item list, keeping the first occurrence's support.
std::vector<ItemSet> merge_itemsets(std::span<const std::vector<ItemSet>> lists);

/// Looks up a conjunction written as names and values, e.g. {{"insulin", "No"}}.
std::optional<std::vector<Item>> parse_items(const FeatureSchema& schema,
                                             std::span<const std::pair<std::string, std::string>> items);

std::string format_items(const FeatureSchema& schema, std::span<const Item> items);

/// "itemset,pct_lt30,pct_gt30,pct_no,total_matches" rows.
std::string rules_csv(const FeatureSchema& schema, std::span<const ClassRuleStats> rules);
nlohmann::json rules_json(const FeatureSchema& schema, std::span<const ClassRuleStats> rules, std::size_t population);

}  // namespace readmit
