#include "pmfrank/rerank.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "linear_svm.h"
#include "pmfrank/errors.h"

namespace pmfrank {
namespace {

RankedList stable_rank(const SessionRecord& session,
                       const std::vector<double>& scores) {
  RankedList list;
  list.items.reserve(session.displayed.size());
  for (std::size_t i = 0; i < session.displayed.size(); ++i) {
    list.items.push_back({session.displayed[i], scores[i], i});
  }
  std::stable_sort(list.items.begin(), list.items.end(),
                   [](const RankedItem& a, const RankedItem& b) {
                     return a.score > b.score;
                   });
  return list;
}

void check_canonical(const WeightVector& omega) {
  if (omega.omega.size() != kNumDisplayTypes || !omega.is_canonical()) {
    throw NormalizationError(
        "re-ranking needs canonical weights (three positive entries, Person = 1)");
  }
}

}  // namespace

std::vector<std::string> RankedList::item_ids() const {
  std::vector<std::string> ids;
  ids.reserve(items.size());
  for (const RankedItem& item : items) ids.push_back(item.item_id);
  return ids;
}

double logistic(double x, SigmoidMode mode) {
  const double z = mode == SigmoidMode::kIncreasing ? x : -x;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<std::size_t> top_preferred_types(const WeightVector& omega, int rho) {
  if (rho < 1 || rho > static_cast<int>(kNumDisplayTypes)) {
    throw DomainError("rho must be in [1, 3], got " + std::to_string(rho));
  }
  std::vector<std::size_t> order(omega.omega.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return omega.omega[a] > omega.omega[b];
  });
  order.resize(static_cast<std::size_t>(rho));
  return order;
}

double attractiveness_score(const ClassScores& scores, const WeightVector& omega,
                            const RerankConfig& cfg) {
  check_canonical(omega);
  const std::vector<std::size_t> top = top_preferred_types(omega, cfg.rho);
  switch (cfg.method) {
    case RerankMethod::kPmfs: {
      double s = 0.0;
      for (std::size_t t : top) s += omega.omega[t] * scores[t];
      return s;
    }
    case RerankMethod::kPmfp: {
      double s = 0.0;
      for (std::size_t t : top) {
        s += omega.omega[t] * logistic(scores[t], cfg.sigmoid_mode);
      }
      return s;
    }
    case RerankMethod::kPmfl: {
      const std::size_t winner = type_index(argmax_type(scores));
      const bool preferred = std::find(top.begin(), top.end(), winner) != top.end();
      return preferred ? omega.omega[winner] : 0.0;
    }
  }
  return 0.0;
}

RankedList rerank(const SessionRecord& session,
                  const std::map<std::string, ClassScores>& scores,
                  const WeightVector& omega, const RerankConfig& cfg) {
  check_canonical(omega);
  std::vector<double> values;
  values.reserve(session.displayed.size());
  for (const std::string& id : session.displayed) {
    const auto it = scores.find(id);
    if (it == scores.end()) {
      throw IncompleteInputError("no classifier scores for item " + id +
                                 " in session " + session.session_id);
    }
    values.push_back(attractiveness_score(it->second, omega, cfg));
  }
  return stable_rank(session, values);
}

std::vector<int> preference_levels(const SessionRecord& session, LevelRule rule) {
  const std::set<std::string> clicked(session.clicked.begin(), session.clicked.end());
  const std::set<std::string> purchased(session.purchased.begin(),
                                        session.purchased.end());
  const bool purchase_aware =
      rule == LevelRule::kPurchaseAware ||
      (rule == LevelRule::kAuto && !session.purchased.empty());
  std::vector<int> levels;
  levels.reserve(session.displayed.size());
  for (const std::string& id : session.displayed) {
    if (!clicked.contains(id)) {
      levels.push_back(-1);
    } else if (purchase_aware) {
      levels.push_back(purchased.contains(id) ? 1 : 0);
    } else {
      levels.push_back(1);
    }
  }
  return levels;
}

PreferencePairs make_preference_pairs(const SessionRecord& session,
                                      LevelRule rule) {
  const std::vector<int> d = preference_levels(session, rule);
  PreferencePairs pairs;
  const auto& ids = session.displayed;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (d[i] > d[j]) {
        pairs.ordered.emplace_back(ids[i], ids[j]);
      } else if (d[j] > d[i]) {
        pairs.ordered.emplace_back(ids[j], ids[i]);
      } else {
        pairs.unordered.emplace_back(ids[i], ids[j]);
      }
    }
  }
  return pairs;
}

RankFeature ranksvm_features(const ClassScores& scores, DisplayType label) {
  RankFeature f{};
  f[type_index(label)] = 1.0;
  for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
    f[3 + t] = scores[t];
    f[6 + t] = logistic(scores[t], SigmoidMode::kDecreasing);
  }
  return f;
}

std::vector<FeaturePair> collect_feature_pairs(
    const PreferencePairs& pairs,
    const std::map<std::string, RankFeature>& features) {
  auto lookup = [&](const std::string& id) -> const RankFeature& {
    const auto it = features.find(id);
    if (it == features.end()) {
      throw IncompleteInputError("no ranking features for item " + id);
    }
    return it->second;
  };
  std::vector<FeaturePair> out;
  out.reserve(pairs.ordered.size());
  for (const auto& [hi, lo] : pairs.ordered) out.push_back({lookup(hi), lookup(lo)});
  return out;
}

RankModel ranksvm_train(std::span<const FeaturePair> pairs,
                        const RankSvmConfig& cfg) {
  if (pairs.empty()) throw NoPairsError("rankSVM needs at least one ordered pair");
  if (!(cfg.c > 0.0)) throw DomainError("rankSVM C must be positive");
  std::vector<RankFeature> diffs(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (std::size_t j = 0; j < kRankFeatureDim; ++j) {
      diffs[p][j] = pairs[p].higher[j] - pairs[p].lower[j];
    }
  }
  detail::HingeProblem problem;
  problem.cost = cfg.c;
  problem.bias = false;
  problem.labels.assign(diffs.size(), 1.0);
  for (const RankFeature& d : diffs) problem.rows.emplace_back(d);
  const detail::HingeSolution sol =
      detail::solve_hinge(problem, {cfg.tolerance, cfg.max_epochs, cfg.seed});

  RankModel model;
  model.c = cfg.c;
  std::copy(sol.weights.begin(), sol.weights.end(), model.weights.begin());
  model.dual_objective = sol.dual_objective;
  model.primal_objective = sol.primal_objective;
  return model;
}

double ranksvm_score(const RankModel& model, const RankFeature& feature) {
  double s = 0.0;
  for (std::size_t j = 0; j < kRankFeatureDim; ++j) s += model.weights[j] * feature[j];
  return s;
}

RankedList ranksvm_rerank(const SessionRecord& session, const RankModel& model,
                          const std::map<std::string, RankFeature>& features) {
  std::vector<double> values;
  values.reserve(session.displayed.size());
  for (const std::string& id : session.displayed) {
    const auto it = features.find(id);
    if (it == features.end()) {
      throw IncompleteInputError("no ranking features for item " + id +
                                 " in session " + session.session_id);
    }
    values.push_back(ranksvm_score(model, it->second));
  }
  return stable_rank(session, values);
}

}  // namespace pmfrank
