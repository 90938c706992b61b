#include "pmfrank/validate.h"

#include <cmath>
#include <set>
#include <unordered_set>

namespace pmfrank {
namespace {

void check_items(const Dataset& dataset, ValidationReport& report) {
  std::unordered_set<std::string> seen;
  for (const ItemRecord& item : dataset.items) {
    if (item.item_id.empty()) {
      report.violations.push_back(
          {"", "item-id-nonempty", "item with empty item_id"});
    } else if (!seen.insert(item.item_id).second) {
      report.violations.push_back({item.item_id, "item-id-unique",
                                   "duplicate item_id " + item.item_id});
    }
    if (item.price_cents < 0) {
      report.violations.push_back(
          {item.item_id, "price-nonnegative",
           "item " + item.item_id + " has negative price_cents " +
               std::to_string(item.price_cents)});
    }
    if (item.watch_count < 0) {
      report.violations.push_back(
          {item.item_id, "watch-count-nonnegative",
           "item " + item.item_id + " has negative watch_count " +
               std::to_string(item.watch_count)});
    }
    if (item.feature_ref && !dataset.features.contains(*item.feature_ref)) {
      report.violations.push_back({item.item_id, "feature-ref-resolves",
                                   "item " + item.item_id +
                                       " references missing feature " +
                                       *item.feature_ref});
    }
  }
}

void check_sessions(const Dataset& dataset, const ItemIndex& index,
                    ValidationReport& report) {
  for (const SessionRecord& session : dataset.sessions) {
    const std::string& sid = session.session_id;
    if (session.displayed.empty()) {
      report.violations.push_back(
          {sid, "session-nonempty", "session " + sid + " displays no items"});
    }
    std::set<std::string> displayed;
    for (const std::string& id : session.displayed) {
      if (!displayed.insert(id).second) {
        report.violations.push_back(
            {sid, "displayed-unique",
             "session " + sid + " displays " + id + " more than once"});
      }
      if (!index.contains(id)) {
        report.violations.push_back(
            {sid, "item-exists",
             "session " + sid + " references missing item " + id});
      }
    }
    std::set<std::string> clicked;
    for (const std::string& id : session.clicked) {
      if (!clicked.insert(id).second) {
        report.violations.push_back(
            {sid, "clicked-unique",
             "session " + sid + " lists click on " + id + " more than once"});
      }
      if (!displayed.contains(id)) {
        report.violations.push_back(
            {sid, "clicked-subset-displayed",
             "session " + sid + " clicked item " + id +
                 " that was not displayed"});
      }
    }
    std::set<std::string> purchased;
    for (const std::string& id : session.purchased) {
      if (!purchased.insert(id).second) {
        report.violations.push_back({sid, "purchased-unique",
                                     "session " + sid + " lists purchase of " +
                                         id + " more than once"});
      }
      if (!clicked.contains(id)) {
        report.violations.push_back(
            {sid, "purchased-subset-clicked",
             "session " + sid + " purchased item " + id +
                 " that was not clicked"});
      }
    }
  }
}

void check_features(const Dataset& dataset, ValidationReport& report) {
  for (const auto& [id, hist] : dataset.features) {
    bool negative = false;
    for (double v : hist.bins) {
      if (!(v >= 0.0) || !std::isfinite(v)) negative = true;
    }
    if (negative) {
      report.violations.push_back(
          {id, "histogram-nonnegative",
           "histogram for " + id + " has a negative or non-finite bin"});
      continue;
    }
    const bool zero = hist.all_zero();
    if (hist.descriptor_count && *hist.descriptor_count == 0 && !zero) {
      report.violations.push_back(
          {id, "histogram-empty-zero",
           "histogram for " + id + " has no descriptors but nonzero bins"});
    } else if (!zero &&
               std::abs(hist.mass() - 1.0) >= kHistogramMassTolerance) {
      report.violations.push_back(
          {id, "histogram-l1-normalized",
           "histogram for " + id + " is not L1-normalized"});
    }
  }
}

}  // namespace

ValidationReport validate(const Dataset& dataset) {
  ValidationReport report;
  const ItemIndex index = build_item_index(dataset);
  check_items(dataset, report);
  check_sessions(dataset, index, report);
  check_features(dataset, report);
  return report;
}

}  // namespace pmfrank
