#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pmfrank {

// Image display types. Index order (Person, Mannequin, Flat) is also the
// tie-break order everywhere a deterministic choice among types is needed.
enum class DisplayType : std::uint8_t {
  kPerson = 0,
  kMannequin = 1,
  kFlat = 2,
  kUnknown = 3,
};

inline constexpr std::size_t kNumDisplayTypes = 3;

inline constexpr std::array<DisplayType, kNumDisplayTypes> kDisplayTypes = {
    DisplayType::kPerson, DisplayType::kMannequin, DisplayType::kFlat};

template <typename T>
using PerType = std::array<T, kNumDisplayTypes>;

// Throws UnresolvedTypeError for kUnknown.
std::size_t type_index(DisplayType type);
DisplayType type_from_index(std::size_t index);

// Single-letter codes used in files: P, M, F, U.
char display_type_code(DisplayType type);
std::optional<DisplayType> parse_display_type(std::string_view code);
std::string_view display_type_name(DisplayType type);

enum class SellerClass : std::uint8_t { kCasual = 0, kTop = 1 };

inline constexpr std::size_t kNumSellerClasses = 2;

std::string_view seller_class_name(SellerClass seller);
std::optional<SellerClass> parse_seller_class(std::string_view name);

// L1-normalized visual-word histogram of one image.
//
// descriptor_count is the number of local descriptors that were quantized
// into the histogram. It is unset for histograms that did not come from
// quantization (ingested or simulated); those must still be either all-zero
// or L1-normalized.
struct BowHistogram {
  std::vector<double> bins;
  std::optional<std::size_t> descriptor_count;

  std::size_t dimension() const { return bins.size(); }
  double mass() const;
  bool all_zero() const;
};

struct ItemRecord {
  std::string item_id;
  DisplayType display_type = DisplayType::kUnknown;
  std::int64_t price_cents = 0;
  SellerClass seller_class = SellerClass::kCasual;
  std::int64_t watch_count = 0;
  bool sold = false;
  std::optional<std::string> feature_ref;
};

// One search impression. clicked is a subset of displayed and purchased a
// subset of clicked; both are stored in display order.
struct SessionRecord {
  std::string session_id;
  std::vector<std::string> displayed;
  std::vector<std::string> clicked;
  std::vector<std::string> purchased;
};

// Immutable once built; safe for concurrent reads.
struct Dataset {
  std::vector<ItemRecord> items;
  std::vector<SessionRecord> sessions;
  std::map<std::string, BowHistogram> features;

  bool empty() const {
    return items.empty() && sessions.empty() && features.empty();
  }
};

// item_id -> position in Dataset::items. On duplicate ids the first wins.
using ItemIndex = std::unordered_map<std::string, std::size_t>;
ItemIndex build_item_index(const Dataset& dataset);

}  // namespace pmfrank
