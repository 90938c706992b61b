#include "pmfrank/cli/run_config.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <sstream>

#include "pmfrank/errors.h"

namespace pmfrank::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<std::int64_t> to_int(const std::string& s) {
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(trim(part));
  return parts;
}

using Check = std::function<bool(const std::string&)>;

Check positive_double() {
  return [](const std::string& v) {
    const auto d = to_double(v);
    return d && *d > 0.0 && std::isfinite(*d);
  };
}
Check auto_or_positive_double() {
  return [](const std::string& v) { return v == "auto" || positive_double()(v); };
}
Check int_at_least(std::int64_t lo) {
  return [lo](const std::string& v) {
    const auto i = to_int(v);
    return i && *i >= lo;
  };
}
Check seed() {
  return [](const std::string& v) {
    std::uint64_t s = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
    return ec == std::errc() && p == v.data() + v.size() && !v.empty();
  };
}
Check one_of(std::vector<std::string> choices) {
  return [choices](const std::string& v) {
    return std::find(choices.begin(), choices.end(), v) != choices.end();
  };
}
Check fraction() {
  return [](const std::string& v) {
    const auto d = to_double(v);
    return d && *d > 0.0 && *d < 1.0;
  };
}
Check triple(Check element) {
  return [element](const std::string& v) {
    const auto parts = split(v, ',');
    if (parts.size() != 3) return false;
    for (const auto& p : parts) {
      if (!element(p)) return false;
    }
    return true;
  };
}
Check click_law() {
  return [](const std::string& v) {
    const auto colon = v.find(':');
    if (colon == std::string::npos) return false;
    const std::string kind = v.substr(0, colon);
    const std::string arg = v.substr(colon + 1);
    if (kind == "fixed") return int_at_least(0)(arg);
    if (kind == "poisson") return positive_double()(arg);
    return false;
  };
}

struct KeySpec {
  const char* default_value;
  Check check;
  const char* help;
};

const std::map<std::string, KeySpec>& key_specs() {
  static const auto* specs = new std::map<std::string, KeySpec>{
      {"kernel.order", {"3", int_at_least(0), "integer >= 0"}},
      {"kernel.period", {"auto", auto_or_positive_double(), "auto or positive real"}},
      {"kernel.gamma", {"1", positive_double(), "positive real"}},
      {"svm.lambda", {"auto", auto_or_positive_double(), "auto (1/N) or positive real"}},
      {"svm.seed", {"0", seed(), "unsigned integer"}},
      {"svm.tolerance", {"0.001", positive_double(), "positive real"}},
      {"svm.max_epochs", {"1000", int_at_least(1), "integer >= 1"}},
      {"svm.positives_per_class", {"450", int_at_least(1), "integer >= 1"}},
      {"rerank.method", {"pmfl", one_of({"pmfp", "pmfs", "pmfl", "ranksvm"}),
                         "pmfp, pmfs, pmfl or ranksvm"}},
      {"rerank.rho", {"3", one_of({"1", "2", "3"}), "1, 2 or 3"}},
      {"rerank.sigmoid_mode", {"increasing", one_of({"increasing", "decreasing"}),
                               "increasing or decreasing"}},
      {"rerank.level_rule", {"auto", one_of({"auto", "purchase", "click"}),
                             "auto, purchase or click"}},
      {"ranksvm.c", {"1", positive_double(), "positive real"}},
      {"ranksvm.seed", {"0", seed(), "unsigned integer"}},
      {"ranksvm.pairs", {"session", one_of({"session", "global"}), "session or global"}},
      {"sim.n_sessions", {"484", int_at_least(1), "integer >= 1"}},
      {"sim.per_type_counts", {"3,3,3", triple(int_at_least(0)), "three integers >= 0"}},
      {"sim.clicks", {"fixed:2", click_law(), "fixed:<k> or poisson:<lambda>"}},
      {"sim.omega", {"1,0.5217,0.2341", triple(positive_double()), "three positive reals"}},
      {"sim.seed", {"0", seed(), "unsigned integer"}},
      {"sim.features", {"none", one_of({"none", "separated", "identical"}),
                        "none, separated or identical"}},
      {"sim.feature_dim", {"60", int_at_least(3), "integer >= 3"}},
      {"sim.samples_per_type", {"600", int_at_least(1), "integer >= 1"}},
      {"split.train_fraction", {"0.75", fraction(), "real in (0, 1)"}},
      {"split.seed", {"0", seed(), "unsigned integer"}},
      {"estimate.method", {"exact_mle", one_of({"exact_mle", "moment"}),
                           "exact_mle or moment"}},
      {"estimate.tolerance", {"1e-08", positive_double(), "positive real"}},
      {"eval.random_trials", {"10", int_at_least(10), "integer >= 10"}},
      {"eval.random_seed", {"0", seed(), "unsigned integer"}},
      {"vocab.k", {"1000", int_at_least(1), "integer >= 1"}},
      {"vocab.seed", {"0", seed(), "unsigned integer"}},
      {"vocab.max_iters", {"100", int_at_least(1), "integer >= 1"}},
      {"features.bin_sizes", {"4,6,8", triple(int_at_least(1)), "three integers >= 1"}},
      {"features.step", {"4", int_at_least(1), "integer >= 1"}},
      {"features.flat_threshold", {"0.0001", positive_double(), "positive real"}},
  };
  return *specs;
}

std::array<double, 3> doubles3(const std::string& v) {
  const auto parts = split(v, ',');
  return {*to_double(parts[0]), *to_double(parts[1]), *to_double(parts[2])};
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& [key, spec] : key_specs()) values_[key] = spec.default_value;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = key_specs().find(key);
  if (it == key_specs().end()) throw ConfigError("unknown config key '" + key + "'");
  const std::string v = trim(value);
  if (!it->second.check(v)) {
    throw ConfigError("config key '" + key + "': expected " + it->second.help +
                      ", got '" + v + "'");
  }
  values_[key] = v;
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

void RunConfig::load(std::istream& in, const std::string& name) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": expected key = value");
    }
    try {
      set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void RunConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : values_) j[k] = v;
  return j;
}

double RunConfig::get_double(const std::string& key) const { return *to_double(get(key)); }
std::int64_t RunConfig::get_int(const std::string& key) const { return *to_int(get(key)); }
std::uint64_t RunConfig::get_seed(const std::string& key) const {
  const std::string& v = get(key);
  std::uint64_t s = 0;
  std::from_chars(v.data(), v.data() + v.size(), s);
  return s;
}

KernelMapConfig RunConfig::kernel() const {
  KernelMapConfig k;
  k.order = static_cast<int>(get_int("kernel.order"));
  if (get("kernel.period") != "auto") k.period = get_double("kernel.period");
  k.gamma = get_double("kernel.gamma");
  return k;
}

TrainConfig RunConfig::train() const {
  TrainConfig t;
  if (get("svm.lambda") != "auto") t.regularization = get_double("svm.lambda");
  t.tolerance = get_double("svm.tolerance");
  t.max_epochs = static_cast<int>(get_int("svm.max_epochs"));
  t.seed = get_seed("svm.seed");
  t.positives_per_class = static_cast<std::size_t>(get_int("svm.positives_per_class"));
  return t;
}

RerankConfig RunConfig::rerank() const {
  RerankConfig r;
  const std::string& m = get("rerank.method");
  r.method = m == "pmfp" ? RerankMethod::kPmfp
             : m == "pmfs" ? RerankMethod::kPmfs
                           : RerankMethod::kPmfl;
  r.rho = static_cast<int>(get_int("rerank.rho"));
  r.sigmoid_mode = get("rerank.sigmoid_mode") == "decreasing" ? SigmoidMode::kDecreasing
                                                           : SigmoidMode::kIncreasing;
  return r;
}

RankSvmConfig RunConfig::ranksvm() const {
  RankSvmConfig r;
  r.c = get_double("ranksvm.c");
  r.seed = get_seed("ranksvm.seed");
  return r;
}

LevelRule RunConfig::level_rule() const {
  const std::string& v = get("rerank.level_rule");
  if (v == "purchase") return LevelRule::kPurchaseAware;
  if (v == "click") return LevelRule::kClickOnly;
  return LevelRule::kAuto;
}

SimConfig RunConfig::sim() const {
  SimConfig s;
  s.n_sessions = static_cast<std::size_t>(get_int("sim.n_sessions"));
  const auto counts = doubles3(get("sim.per_type_counts"));
  for (std::size_t t = 0; t < 3; ++t) s.per_type_counts[t] = static_cast<int>(counts[t]);
  const std::string& law = get("sim.clicks");
  const std::string arg = law.substr(law.find(':') + 1);
  s.clicks = law.starts_with("fixed:") ? ClickLaw::fixed_count(static_cast<int>(*to_int(arg)))
                                       : ClickLaw::truncated_poisson(*to_double(arg));
  const auto omega = doubles3(get("sim.omega"));
  s.true_omega.omega.assign(omega.begin(), omega.end());
  s.seed = get_seed("sim.seed");
  const auto dim = static_cast<std::size_t>(get_int("sim.feature_dim"));
  if (get("sim.features") == "separated") s.features = well_separated_features(dim);
  if (get("sim.features") == "identical") s.features = identical_features(dim);
  if (s.features) {
    s.features->samples_per_type = static_cast<std::size_t>(get_int("sim.samples_per_type"));
  }
  return s;
}

EstimationMethod RunConfig::estimation() const {
  return get("estimate.method") == "moment" ? EstimationMethod::kMoment
                                            : EstimationMethod::kExactMle;
}

EstimationOptions RunConfig::estimation_options() const {
  EstimationOptions o;
  o.tolerance = get_double("estimate.tolerance");
  return o;
}

ProtocolOptions RunConfig::protocol() const {
  ProtocolOptions p;
  p.train_fraction = get_double("split.train_fraction");
  p.split_seed = get_seed("split.seed");
  p.estimation = estimation();
  p.level_rule = level_rule();
  p.pair_pool = get("ranksvm.pairs") == "global" ? PairPool::kGlobal : PairPool::kSession;
  p.ranksvm = ranksvm();
  const RerankConfig r = rerank();
  p.comparison.rho = r.rho;
  p.comparison.sigmoid_mode = r.sigmoid_mode;
  p.comparison.random_trials = static_cast<int>(get_int("eval.random_trials"));
  p.comparison.random_seed = get_seed("eval.random_seed");
  return p;
}

DenseDescriptorConfig RunConfig::descriptors() const {
  DenseDescriptorConfig d;
  const auto bins = doubles3(get("features.bin_sizes"));
  for (std::size_t i = 0; i < 3; ++i) d.bin_sizes[i] = static_cast<int>(bins[i]);
  d.step = static_cast<int>(get_int("features.step"));
  d.flat_threshold = get_double("features.flat_threshold");
  return d;
}

}  // namespace pmfrank::cli
