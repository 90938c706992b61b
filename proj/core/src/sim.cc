#include "pmfrank/sim.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>

#include "pmfrank/errors.h"
#include "pmfrank/rng.h"

namespace pmfrank {
namespace {

// Stream offsets keep session and feature draws independent.
constexpr std::uint64_t kFeatureStream = 0x5eed'feed'0000'0000ULL;

int draw_click_total(const ClickLaw& law, int session_size, Rng& rng) {
  if (law.kind == ClickLaw::Kind::kFixed) return law.fixed;
  // Inverse CDF over k in [1, n] with weights lambda^k / k!.
  std::vector<double> log_w(static_cast<std::size_t>(session_size));
  double hi = -INFINITY;
  for (int k = 1; k <= session_size; ++k) {
    log_w[k - 1] = k * std::log(law.lambda) - std::lgamma(k + 1.0);
    hi = std::max(hi, log_w[k - 1]);
  }
  double total = 0.0;
  for (double& w : log_w) total += (w = std::exp(w - hi));
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  for (int k = 1; k <= session_size; ++k) {
    acc += log_w[k - 1];
    if (u < acc) return k;
  }
  return session_size;
}

BowHistogram draw_dirichlet(const std::vector<double>& alpha, Rng& rng) {
  BowHistogram h;
  h.bins.resize(alpha.size());
  double sum = 0.0;
  while (sum <= 0.0) {
    sum = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      std::gamma_distribution<double> g(alpha[j], 1.0);
      h.bins[j] = g(rng);
      sum += h.bins[j];
    }
  }
  for (double& b : h.bins) b /= sum;
  return h;
}

std::string session_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%06zu", i);
  return buf;
}

void check_feature_spec(const FeatureSpec& spec) {
  const std::size_t dim = spec.concentrations[0].size();
  if (dim == 0) throw ConfigError("feature spec needs a positive dimension");
  for (const auto& alpha : spec.concentrations) {
    if (alpha.size() != dim) throw ConfigError("feature concentrations differ in length");
    for (double a : alpha) {
      if (!(a > 0.0) || !std::isfinite(a)) {
        throw ConfigError("Dirichlet concentrations must be positive");
      }
    }
  }
}

}  // namespace

FeatureSpec well_separated_features(std::size_t dimension, double dominant,
                                    double background) {
  FeatureSpec spec;
  for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
    spec.concentrations[t].assign(dimension, background);
    const std::size_t lo = t * dimension / kNumDisplayTypes;
    const std::size_t hi = (t + 1) * dimension / kNumDisplayTypes;
    for (std::size_t j = lo; j < hi; ++j) spec.concentrations[t][j] = dominant;
  }
  return spec;
}

FeatureSpec identical_features(std::size_t dimension, double concentration) {
  FeatureSpec spec;
  for (auto& alpha : spec.concentrations) alpha.assign(dimension, concentration);
  return spec;
}

void check_sim_config(const SimConfig& cfg) {
  int n = 0;
  for (int c : cfg.per_type_counts) {
    if (c < 0) throw ConfigError("per_type_counts entries must be nonnegative");
    n += c;
  }
  if (n <= 0) throw ConfigError("sessions must display at least one item");
  if (cfg.clicks.kind == ClickLaw::Kind::kFixed) {
    if (cfg.clicks.fixed < 0 || cfg.clicks.fixed > n) {
      throw ConfigError("fixed click count " + std::to_string(cfg.clicks.fixed) +
                        " outside [0, " + std::to_string(n) + "]");
    }
  } else if (!(cfg.clicks.lambda > 0.0) || !std::isfinite(cfg.clicks.lambda)) {
    throw ConfigError("truncated Poisson click rate must be positive");
  }
  if (cfg.true_omega.omega.size() != kNumDisplayTypes) {
    throw ConfigError("true_omega needs three weights");
  }
  for (double w : cfg.true_omega.omega) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ConfigError("true_omega weights must be positive");
    }
  }
  if (cfg.features) check_feature_spec(*cfg.features);
}

Dataset simulate_sessions(const SimConfig& cfg) {
  check_sim_config(cfg);
  const int n = std::accumulate(cfg.per_type_counts.begin(),
                                cfg.per_type_counts.end(), 0);
  UrnConfig urn;
  urn.gamma.assign(cfg.per_type_counts.begin(), cfg.per_type_counts.end());

  std::map<int, UrnSampler> samplers;
  auto sampler_for = [&](int n_hat) -> const UrnSampler& {
    auto it = samplers.find(n_hat);
    if (it == samplers.end()) {
      UrnConfig u = urn;
      u.n_hat = n_hat;
      it = samplers.emplace(n_hat, UrnSampler(u, cfg.true_omega)).first;
    }
    return it->second;
  };

  Dataset data;
  data.items.reserve(cfg.n_sessions * static_cast<std::size_t>(n));
  data.sessions.reserve(cfg.n_sessions);
  for (std::size_t s = 0; s < cfg.n_sessions; ++s) {
    Rng rng(derive_seed(cfg.seed, s));
    const std::string sid = session_id(s);

    std::vector<DisplayType> slots;
    for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
      slots.insert(slots.end(), static_cast<std::size_t>(cfg.per_type_counts[t]),
                   kDisplayTypes[t]);
    }
    shuffle(slots.begin(), slots.end(), rng);

    const int n_hat = draw_click_total(cfg.clicks, n, rng);
    const std::vector<int> eta = sampler_for(n_hat)(rng);

    std::vector<bool> clicked(slots.size(), false);
    for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
      std::vector<std::size_t> positions;
      for (std::size_t p = 0; p < slots.size(); ++p) {
        if (slots[p] == kDisplayTypes[t]) positions.push_back(p);
      }
      shuffle(positions.begin(), positions.end(), rng);
      for (int c = 0; c < eta[t]; ++c) clicked[positions[c]] = true;
    }

    SessionRecord session;
    session.session_id = sid;
    for (std::size_t p = 0; p < slots.size(); ++p) {
      ItemRecord item;
      item.item_id = sid + "-" + std::to_string(p);
      item.display_type = slots[p];
      item.price_cents = 500 + static_cast<std::int64_t>(uniform_below(rng, 19500));
      item.seller_class = uniform01(rng) < 0.3 ? SellerClass::kTop : SellerClass::kCasual;
      item.watch_count = static_cast<std::int64_t>(uniform_below(rng, 7));
      item.sold = uniform01(rng) < (clicked[p] ? 0.45 : 0.25);
      session.displayed.push_back(item.item_id);
      if (clicked[p]) {
        session.clicked.push_back(item.item_id);
        if (item.sold) session.purchased.push_back(item.item_id);
      }
      if (cfg.features) {
        data.features.emplace(
            item.item_id,
            draw_dirichlet(cfg.features->concentrations[type_index(slots[p])], rng));
        item.feature_ref = item.item_id;
      }
      data.items.push_back(std::move(item));
    }
    data.sessions.push_back(std::move(session));
  }
  return data;
}

LabeledFeatures simulate_features(const SimConfig& cfg) {
  if (!cfg.features) throw ConfigError("simulate_features needs a feature spec");
  check_feature_spec(*cfg.features);
  LabeledFeatures out;
  for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
    Rng rng(derive_seed(cfg.seed ^ kFeatureStream, t));
    for (std::size_t i = 0; i < cfg.features->samples_per_type; ++i) {
      out.histograms.push_back(draw_dirichlet(cfg.features->concentrations[t], rng));
      out.labels.push_back(kDisplayTypes[t]);
    }
  }
  return out;
}

Dataset labeled_features_dataset(const LabeledFeatures& features,
                                 const std::string& prefix) {
  Dataset data;
  for (std::size_t i = 0; i < features.histograms.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%06zu", i);
    ItemRecord item;
    item.item_id = prefix + buf;
    item.display_type = features.labels[i];
    item.feature_ref = item.item_id;
    data.features.emplace(item.item_id, features.histograms[i]);
    data.items.push_back(std::move(item));
  }
  return data;
}

}  // namespace pmfrank
