#include "pmfrank/analytics.h"

#include <set>

#include "pmfrank/errors.h"

namespace pmfrank {
namespace {

struct ClickSets {
  std::set<std::string> displayed;
  std::set<std::string> clicked;
};

ClickSets click_sets(const Dataset& dataset, const ItemIndex& index) {
  ClickSets sets;
  for (const SessionRecord& s : dataset.sessions) {
    for (const std::string& id : s.displayed) {
      if (!index.contains(id)) {
        throw DomainError("session " + s.session_id + " references missing item " + id);
      }
      sets.displayed.insert(id);
    }
    for (const std::string& id : s.clicked) sets.clicked.insert(id);
  }
  return sets;
}

const ItemRecord& item_at(const Dataset& dataset, const ItemIndex& index,
                          const std::string& id) {
  const auto it = index.find(id);
  if (it == index.end()) throw DomainError("missing item " + id);
  return dataset.items[it->second];
}

std::size_t resolved_type(const ItemRecord& item) {
  if (item.display_type == DisplayType::kUnknown) {
    throw UnresolvedTypeError("item " + item.item_id + " has no resolved display type");
  }
  return type_index(item.display_type);
}

TypeDistribution normalize(const PerType<std::size_t>& counts) {
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  if (total == 0) return std::nullopt;
  PerType<double> p{};
  for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
    p[t] = static_cast<double>(counts[t]) / static_cast<double>(total);
  }
  return p;
}

bool in_scope(const std::string& id, ItemScope scope, const ClickSets& sets) {
  switch (scope) {
    case ItemScope::kAll:
      return true;
    case ItemScope::kDisplayed:
      return sets.displayed.contains(id);
    case ItemScope::kClicked:
      return sets.clicked.contains(id);
    case ItemScope::kUnclicked:
      return sets.displayed.contains(id) && !sets.clicked.contains(id);
  }
  return false;
}

Bucketer edge_buckets(std::vector<std::int64_t> edges,
                      std::int64_t ItemRecord::*field) {
  return [edges = std::move(edges), field](const ItemRecord& item) -> std::string {
    const std::int64_t v = item.*field;
    if (edges.empty()) return "all";
    if (v < edges.front()) return "<" + std::to_string(edges.front());
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      if (v < edges[i + 1]) {
        return "[" + std::to_string(edges[i]) + "," + std::to_string(edges[i + 1]) + ")";
      }
    }
    return ">=" + std::to_string(edges.back());
  };
}

}  // namespace

DistributionShift distribution_shift(const Dataset& dataset) {
  const ItemIndex index = build_item_index(dataset);
  const ClickSets sets = click_sets(dataset, index);
  DistributionShift shift;
  for (const std::string& id : sets.displayed) {
    const std::size_t t = resolved_type(item_at(dataset, index, id));
    ++shift.displayed_counts[t];
    if (sets.clicked.contains(id)) {
      ++shift.clicked_counts[t];
    } else {
      ++shift.unclicked_counts[t];
    }
  }
  shift.displayed = normalize(shift.displayed_counts);
  shift.clicked = normalize(shift.clicked_counts);
  shift.unclicked = normalize(shift.unclicked_counts);
  return shift;
}

ConversionTable conversion_rates(const Dataset& dataset) {
  const ItemIndex index = build_item_index(dataset);
  const ClickSets sets = click_sets(dataset, index);
  ConversionTable table;
  for (const std::string& id : sets.displayed) {
    const ItemRecord& item = item_at(dataset, index, id);
    const std::size_t t = resolved_type(item);
    const std::size_t g = sets.clicked.contains(id) ? kClicked : kUnclicked;
    ++table.total[t][g];
    if (item.sold) ++table.sold[t][g];
  }
  for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
    for (std::size_t g = 0; g < 2; ++g) {
      if (table.total[t][g] > 0) {
        table.rate[t][g] = static_cast<double>(table.sold[t][g]) /
                           static_cast<double>(table.total[t][g]);
      }
    }
  }
  return table;
}

WatchTable avg_watch(const Dataset& dataset) {
  WatchTable table;
  PerType<std::array<double, kNumSellerClasses>> sums{};
  for (const ItemRecord& item : dataset.items) {
    const std::size_t t = resolved_type(item);
    const auto s = static_cast<std::size_t>(item.seller_class);
    sums[t][s] += static_cast<double>(item.watch_count);
    ++table.count[t][s];
  }
  for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
    for (std::size_t s = 0; s < kNumSellerClasses; ++s) {
      if (table.count[t][s] > 0) {
        table.mean[t][s] = sums[t][s] / static_cast<double>(table.count[t][s]);
      }
    }
  }
  return table;
}

std::map<std::string, TypeDistribution> grouped_distribution(
    const Dataset& dataset, const Bucketer& bucketer, ItemScope scope,
    std::span<const std::string> declared) {
  const ItemIndex index = build_item_index(dataset);
  const ClickSets sets = click_sets(dataset, index);
  std::map<std::string, PerType<std::size_t>> counts;
  for (const std::string& label : declared) counts.try_emplace(label);
  for (const ItemRecord& item : dataset.items) {
    if (!in_scope(item.item_id, scope, sets)) continue;
    ++counts[bucketer(item)][resolved_type(item)];
  }
  std::map<std::string, TypeDistribution> out;
  for (const auto& [label, c] : counts) out.emplace(label, normalize(c));
  return out;
}

Bucketer price_segments(std::vector<std::int64_t> edges) {
  return edge_buckets(std::move(edges), &ItemRecord::price_cents);
}

Bucketer seller_buckets() {
  return [](const ItemRecord& item) {
    return std::string(seller_class_name(item.seller_class));
  };
}

Bucketer watch_bands(std::vector<std::int64_t> edges) {
  return edge_buckets(std::move(edges), &ItemRecord::watch_count);
}

}  // namespace pmfrank
