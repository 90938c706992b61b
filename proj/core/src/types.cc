#include "pmfrank/types.h"

#include <algorithm>
#include <numeric>

#include "pmfrank/errors.h"

namespace pmfrank {

std::size_t type_index(DisplayType type) {
  if (type == DisplayType::kUnknown) {
    throw UnresolvedTypeError("display type is Unknown");
  }
  return static_cast<std::size_t>(type);
}

DisplayType type_from_index(std::size_t index) {
  if (index >= kNumDisplayTypes) {
    throw BoundsError("display type index " + std::to_string(index) +
                      " out of range");
  }
  return kDisplayTypes[index];
}

char display_type_code(DisplayType type) {
  switch (type) {
    case DisplayType::kPerson:
      return 'P';
    case DisplayType::kMannequin:
      return 'M';
    case DisplayType::kFlat:
      return 'F';
    case DisplayType::kUnknown:
      break;
  }
  return 'U';
}

std::optional<DisplayType> parse_display_type(std::string_view code) {
  if (code == "P") return DisplayType::kPerson;
  if (code == "M") return DisplayType::kMannequin;
  if (code == "F") return DisplayType::kFlat;
  if (code == "U") return DisplayType::kUnknown;
  return std::nullopt;
}

std::string_view display_type_name(DisplayType type) {
  switch (type) {
    case DisplayType::kPerson:
      return "Person";
    case DisplayType::kMannequin:
      return "Mannequin";
    case DisplayType::kFlat:
      return "Flat";
    case DisplayType::kUnknown:
      break;
  }
  return "Unknown";
}

std::string_view seller_class_name(SellerClass seller) {
  return seller == SellerClass::kTop ? "top" : "casual";
}

std::optional<SellerClass> parse_seller_class(std::string_view name) {
  if (name == "casual") return SellerClass::kCasual;
  if (name == "top") return SellerClass::kTop;
  return std::nullopt;
}

double BowHistogram::mass() const {
  return std::accumulate(bins.begin(), bins.end(), 0.0);
}

bool BowHistogram::all_zero() const {
  return std::all_of(bins.begin(), bins.end(),
                     [](double v) { return v == 0.0; });
}

ItemIndex build_item_index(const Dataset& dataset) {
  ItemIndex index;
  index.reserve(dataset.items.size());
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    index.emplace(dataset.items[i].item_id, i);
  }
  return index;
}

}  // namespace pmfrank
