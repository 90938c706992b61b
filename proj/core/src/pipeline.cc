#include "pmfrank/pipeline.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pmfrank/errors.h"
#include "pmfrank/kernel.h"
#include "pmfrank/rng.h"

namespace pmfrank {
namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

std::string method_name(const char* base, int rho) {
  return std::string(base) + "^" + std::to_string(rho);
}

}  // namespace

ObservationSet observations_from_dataset(const Dataset& dataset) {
  const auto idx = all_indices(dataset.sessions.size());
  return observations_from_dataset(dataset, idx);
}

ObservationSet observations_from_dataset(const Dataset& dataset,
                                         std::span<const std::size_t> sessions) {
  const ItemIndex index = build_item_index(dataset);
  ObservationSet obs;
  obs.reserve(sessions.size());
  for (std::size_t s : sessions) {
    const SessionRecord& session = dataset.sessions.at(s);
    auto type_of = [&](const std::string& id) {
      const auto it = index.find(id);
      if (it == index.end()) {
        throw DomainError("session " + session.session_id + " references missing item " + id);
      }
      return type_index(dataset.items[it->second].display_type);
    };
    Observation o;
    o.urn.gamma.assign(kNumDisplayTypes, 0);
    o.eta.assign(kNumDisplayTypes, 0);
    for (const std::string& id : session.displayed) ++o.urn.gamma[type_of(id)];
    for (const std::string& id : session.clicked) ++o.eta[type_of(id)];
    o.urn.n_hat = static_cast<int>(session.clicked.size());
    obs.push_back(std::move(o));
  }
  return obs;
}

std::map<std::string, ClassScores> label_scores(const Dataset& dataset) {
  std::map<std::string, ClassScores> scores;
  for (const ItemRecord& item : dataset.items) {
    if (item.display_type == DisplayType::kUnknown) continue;
    ClassScores s;
    s.values[type_index(item.display_type)] = 1.0;
    scores.emplace(item.item_id, s);
  }
  return scores;
}

std::map<std::string, ClassScores> classify_items(const Dataset& dataset,
                                                  const LinearModel& model) {
  std::map<std::string, ClassScores> scores;
  for (const auto& [id, h] : dataset.features) {
    scores.emplace(id, score(model, approx_map(h, model.kernel)));
  }
  return scores;
}

std::map<std::string, RankFeature> rank_features(
    const Dataset& dataset, const std::map<std::string, ClassScores>& scores) {
  std::map<std::string, RankFeature> features;
  for (const ItemRecord& item : dataset.items) {
    const auto it = scores.find(item.item_id);
    if (it == scores.end()) continue;
    const DisplayType label = item.display_type == DisplayType::kUnknown
                                  ? argmax_type(it->second)
                                  : item.display_type;
    features.emplace(item.item_id, ranksvm_features(it->second, label));
  }
  return features;
}

SessionSplit split_sessions(std::size_t count, double train_fraction,
                            std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("split.train_fraction must lie strictly between 0 and 1");
  }
  auto idx = all_indices(count);
  Rng rng(seed);
  shuffle(idx.begin(), idx.end(), rng);
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(count)));
  SessionSplit split;
  split.train.assign(idx.begin(), idx.begin() + n_train);
  split.test.assign(idx.begin() + n_train, idx.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<MetricReport> compare_methods(
    const Dataset& dataset, const std::map<std::string, ClassScores>& scores,
    std::span<const std::size_t> sessions, const WeightVector& omega,
    const std::optional<RankModel>& rank_model, const ComparisonOptions& options) {
  const RerankConfig pmfp{RerankMethod::kPmfp, options.rho, options.sigmoid_mode};
  const RerankConfig pmfs{RerankMethod::kPmfs, options.rho, options.sigmoid_mode};
  const RerankConfig pmfl{RerankMethod::kPmfl, 3, options.sigmoid_mode};
  std::map<std::string, RankFeature> features;
  if (rank_model) features = rank_features(dataset, scores);

  std::vector<std::vector<int>> rel_p, rel_s, rel_l, rel_svm, rel_display;
  for (std::size_t s : sessions) {
    const SessionRecord& session = dataset.sessions.at(s);
    auto rel = [&](const RankedList& list) {
      const auto ids = list.item_ids();
      return relevance_in_order(session, ids);
    };
    rel_p.push_back(rel(rerank(session, scores, omega, pmfp)));
    rel_s.push_back(rel(rerank(session, scores, omega, pmfs)));
    rel_l.push_back(rel(rerank(session, scores, omega, pmfl)));
    if (rank_model) rel_svm.push_back(rel(ranksvm_rerank(session, *rank_model, features)));
    rel_display.push_back(relevance_in_order(session, session.displayed));
  }

  std::vector<MetricReport> reports;
  reports.push_back(evaluate_rankings(method_name("PMFP", options.rho), rel_p));
  reports.push_back(evaluate_rankings(method_name("PMFS", options.rho), rel_s));
  reports.push_back(evaluate_rankings("PMFL", rel_l));
  if (rank_model) reports.push_back(evaluate_rankings("rankSVM", rel_svm));
  MetricReport random =
      random_baseline(rel_display, options.random_trials, options.random_seed);
  random.method = "random";
  reports.push_back(std::move(random));
  return reports;
}

std::vector<FeaturePair> training_pairs(const Dataset& dataset,
                                        std::span<const std::size_t> sessions,
                                        const std::map<std::string, RankFeature>& features,
                                        LevelRule rule, PairPool pool) {
  std::vector<FeaturePair> pairs;
  if (pool == PairPool::kSession) {
    for (std::size_t s : sessions) {
      const auto fp = collect_feature_pairs(
          make_preference_pairs(dataset.sessions.at(s), rule), features);
      pairs.insert(pairs.end(), fp.begin(), fp.end());
    }
    return pairs;
  }
  // Levels stay session-local; only the pairing crosses sessions.
  std::vector<std::pair<int, std::string>> pooled;
  for (std::size_t s : sessions) {
    const SessionRecord& session = dataset.sessions.at(s);
    const std::vector<int> levels = preference_levels(session, rule);
    for (std::size_t i = 0; i < levels.size(); ++i) {
      pooled.emplace_back(levels[i], session.displayed[i]);
    }
  }
  PreferencePairs all;
  for (const auto& [hi_level, hi] : pooled) {
    for (const auto& [lo_level, lo] : pooled) {
      if (hi_level > lo_level) all.ordered.emplace_back(hi, lo);
    }
  }
  return collect_feature_pairs(all, features);
}

ProtocolResult run_protocol(const Dataset& dataset,
                            const std::map<std::string, ClassScores>& scores,
                            const ProtocolOptions& options) {
  ProtocolResult result;
  result.split = split_sessions(dataset.sessions.size(), options.train_fraction,
                                options.split_seed);
  result.weights = estimate_weights(
      observations_from_dataset(dataset, result.split.train), options.estimation);

  const auto features = rank_features(dataset, scores);
  const auto pairs = training_pairs(dataset, result.split.train, features,
                                    options.level_rule, options.pair_pool);
  result.rank_model = ranksvm_train(pairs, options.ranksvm);
  result.reports = compare_methods(dataset, scores, result.split.test,
                                   result.weights.weights, result.rank_model,
                                   options.comparison);
  return result;
}

}  // namespace pmfrank
