#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pmfrank/types.h"

namespace pmfrank {

// Behavioural aggregations over a dataset. Click groups are item level: an
// item is "clicked" if any session clicked it and "unclicked" if it was
// displayed somewhere but never clicked. Every item involved must have a
// resolved display type (UnresolvedTypeError otherwise) and every session
// item must exist (DomainError otherwise).

// Proportions over Person/Mannequin/Flat; unset when the group is empty.
using TypeDistribution = std::optional<PerType<double>>;

struct DistributionShift {
  TypeDistribution displayed;
  TypeDistribution clicked;
  TypeDistribution unclicked;
  PerType<std::size_t> displayed_counts{};
  PerType<std::size_t> clicked_counts{};
  PerType<std::size_t> unclicked_counts{};
};

DistributionShift distribution_shift(const Dataset& dataset);

enum ClickGroup : std::size_t { kClicked = 0, kUnclicked = 1 };

// Sell-through fraction per (type, click group). Unset cells had no items.
struct ConversionTable {
  PerType<std::array<std::optional<double>, 2>> rate{};
  PerType<std::array<std::size_t, 2>> sold{};
  PerType<std::array<std::size_t, 2>> total{};
};

ConversionTable conversion_rates(const Dataset& dataset);

// Mean watch count per (type, seller class) over all items.
struct WatchTable {
  PerType<std::array<std::optional<double>, kNumSellerClasses>> mean{};
  PerType<std::array<std::size_t, kNumSellerClasses>> count{};
};

WatchTable avg_watch(const Dataset& dataset);

enum class ItemScope { kAll, kDisplayed, kClicked, kUnclicked };

using Bucketer = std::function<std::string(const ItemRecord&)>;

// Type distribution inside each bucket of the items in scope. Buckets named
// in `declared` appear even when empty (with an unset distribution).
std::map<std::string, TypeDistribution> grouped_distribution(
    const Dataset& dataset, const Bucketer& bucketer,
    ItemScope scope = ItemScope::kAll,
    std::span<const std::string> declared = {});

// Labels "[lo,hi)" for consecutive ascending edges in cents, with "<e0" and
// ">=e_last" for the tails.
Bucketer price_segments(std::vector<std::int64_t> edges);
Bucketer seller_buckets();
Bucketer watch_bands(std::vector<std::int64_t> edges);

}  // namespace pmfrank
