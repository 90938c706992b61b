#include "pmfrank/cli/cli.h"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pmfrank/cli/run_config.h"
#include "pmfrank/errors.h"
#include "pmfrank/hash.h"
#include "pmfrank/image.h"
#include "pmfrank/io.h"
#include "pmfrank/pipeline.h"
#include "pmfrank/sim.h"
#include "pmfrank/validate.h"

namespace pmfrank::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// Records inputs, outputs and config of one command. Keys come out sorted;
// the only nondeterministic values live under "timing".
class Manifest {
 public:
  Manifest(std::string command, const RunConfig& cfg)
      : command_(std::move(command)),
        config_(cfg.to_json()),
        start_(std::chrono::steady_clock::now()),
        started_at_(std::time(nullptr)) {}

  void input(const fs::path& path) {
    if (fs::is_directory(path)) {
      for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().filename() != "manifest.json") {
          inputs_[entry.path().string()] = fnv1a64_hex(read_text_file(entry.path()));
        }
      }
    } else {
      inputs_[path.string()] = fnv1a64_hex(read_text_file(path));
    }
  }
  void output(const fs::path& path, const std::string& bytes) {
    write_text_file(path, bytes);
    outputs_[path.string()] = fnv1a64_hex(bytes);
  }
  void seed(const std::string& key, std::uint64_t value) { seeds_[key] = value; }
  json& extra() { return extra_; }

  void write(const fs::path& path) const {
    json j;
    j["command"] = command_;
    j["config"] = config_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    j["seeds"] = seeds_;
    j["results"] = extra_;
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start_)
                            .count();
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&started_at_));
    j["timing"] = {{"started_at", stamp}, {"wall_seconds", wall}};
    write_text_file(path, j.dump(2) + "\n");
  }

 private:
  std::string command_;
  json config_;
  json inputs_ = json::object();
  json outputs_ = json::object();
  json seeds_ = json::object();
  json extra_ = json::object();
  std::chrono::steady_clock::time_point start_;
  std::time_t started_at_;
};

struct Context {
  RunConfig cfg;
  std::ostream& out;
  std::ostream& err;
};

void require(const fs::path& path, const std::string& what, const std::string& hint) {
  if (!fs::exists(path)) {
    throw Error("missing " + what + ": " + path.string() + " not found (" + hint + ")");
  }
}

Dataset load_bundle(const fs::path& dir) {
  require(dir / "bundle.json", "dataset bundle",
          "create it with `pmfrank ingest` or `pmfrank simulate`");
  return read_dataset_bundle(dir);
}

json load_json(const fs::path& path, const std::string& what, const std::string& hint) {
  require(path, what, hint);
  return read_json_file(path);
}

template <typename Write>
std::string render(Write&& write) {
  std::ostringstream ss;
  write(ss);
  return ss.str();
}

std::string omega_line(const WeightVector& w) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "omega P=%.6f M=%.6f F=%.6f", w.omega[0],
                w.omega[1], w.omega[2]);
  return buf;
}

std::map<std::string, ClassScores> load_scores(const std::string& path,
                                               const Dataset& data) {
  if (path.empty()) return label_scores(data);
  require(path, "score file", "create it with `pmfrank classify`");
  std::ifstream in(path, std::ios::binary);
  return read_scores_jsonl(in, path);
}

// ---------------------------------------------------------------- commands

struct IngestArgs {
  std::string items, sessions, features, out;
};

int cmd_ingest(Context& ctx, const IngestArgs& a) {
  Manifest m("ingest", ctx.cfg);
  m.input(a.items);
  m.input(a.sessions);
  if (!a.features.empty()) m.input(a.features);
  const Dataset data = read_dataset_files(a.items, a.sessions, a.features);
  const ValidationReport report = validate(data);
  for (const Violation& v : report.violations) {
    ctx.out << "violation " << v.rule << " [" << v.subject << "]: " << v.message << "\n";
  }
  ctx.out << "items=" << data.items.size() << " sessions=" << data.sessions.size()
          << " features=" << data.features.size()
          << " violations=" << report.violations.size() << "\n";
  if (!report.ok()) return kExitFailure;
  write_dataset_bundle(data, a.out);
  for (const char* f : {"items.csv", "sessions.jsonl", "features.jsonl", "bundle.json"}) {
    m.output(fs::path(a.out) / f, read_text_file(fs::path(a.out) / f));
  }
  m.write(fs::path(a.out) / "manifest.json");
  return kExitOk;
}

void record_bundle(Manifest& m, const Dataset& data, const fs::path& dir) {
  write_dataset_bundle(data, dir);
  for (const char* f : {"items.csv", "sessions.jsonl", "features.jsonl", "bundle.json"}) {
    m.output(dir / f, read_text_file(dir / f));
  }
}

struct SimulateArgs {
  std::string out, labeled_out;
};

int cmd_simulate(Context& ctx, const SimulateArgs& a) {
  Manifest m("simulate", ctx.cfg);
  const SimConfig sim = ctx.cfg.sim();
  m.seed("sim.seed", sim.seed);
  if (!a.labeled_out.empty() && !sim.features) {
    throw ConfigError("--labeled-out needs sim.features set to separated or identical");
  }
  const Dataset data = simulate_sessions(sim);
  record_bundle(m, data, a.out);
  if (!a.labeled_out.empty()) {
    const Dataset labeled = labeled_features_dataset(simulate_features(sim), "lab");
    record_bundle(m, labeled, a.labeled_out);
  }
  m.extra()["sessions"] = data.sessions.size();
  m.extra()["items"] = data.items.size();
  m.write(fs::path(a.out) / "manifest.json");
  ctx.out << "simulated " << data.sessions.size() << " sessions, "
          << data.items.size() << " items\n";
  return kExitOk;
}

struct ExtractArgs {
  std::vector<std::string> images;
  std::string out, vocab, features_out;
};

int cmd_extract(Context& ctx, const ExtractArgs& a) {
  Manifest m("extract-features", ctx.cfg);
  if (!a.vocab.empty() && a.features_out.empty()) {
    throw ConfigError("--vocab needs --features-out");
  }
  std::vector<NamedDescriptors> sets;
  for (const std::string& path : a.images) {
    require(path, "image", "pass existing binary PGM files");
    m.input(path);
    sets.emplace_back(fs::path(path).stem().string(),
                      dense_descriptors(read_pgm_file(path), ctx.cfg.descriptors()));
  }
  m.output(a.out, render([&](std::ostream& o) { write_descriptors_jsonl(o, sets); }));
  if (!a.vocab.empty()) {
    m.input(a.vocab);
    const Vocabulary vocab = vocabulary_from_json(
        load_json(a.vocab, "vocabulary", "create it with `pmfrank build-vocab`"), a.vocab);
    std::map<std::string, BowHistogram> hist;
    for (const auto& [name, set] : sets) hist[name] = quantize(set, vocab);
    m.output(a.features_out,
             render([&](std::ostream& o) { write_features_jsonl(o, hist); }));
  }
  m.extra()["images"] = sets.size();
  m.write(a.out + ".manifest.json");
  ctx.out << "extracted descriptors from " << sets.size() << " images\n";
  return kExitOk;
}

struct VocabArgs {
  std::vector<std::string> descriptors;
  std::string out;
};

int cmd_build_vocab(Context& ctx, const VocabArgs& a) {
  Manifest m("build-vocab", ctx.cfg);
  std::vector<DescriptorSet> sets;
  for (const std::string& path : a.descriptors) {
    require(path, "descriptor file", "create it with `pmfrank extract-features`");
    m.input(path);
    std::ifstream in(path, std::ios::binary);
    for (auto& [name, set] : read_descriptors_jsonl(in, path)) sets.push_back(std::move(set));
  }
  const auto k = static_cast<std::size_t>(ctx.cfg.get_int("vocab.k"));
  const auto seed = ctx.cfg.get_seed("vocab.seed");
  m.seed("vocab.seed", seed);
  const Vocabulary vocab = build_vocabulary(
      sets, k, seed, static_cast<int>(ctx.cfg.get_int("vocab.max_iters")));
  m.output(a.out, to_json(vocab).dump() + "\n");
  m.write(a.out + ".manifest.json");
  ctx.out << "vocabulary k=" << vocab.k() << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string data, out;
};

int cmd_train(Context& ctx, const TrainArgs& a) {
  Manifest m("train-classifier", ctx.cfg);
  const Dataset data = load_bundle(a.data);
  m.input(a.data);
  const KernelMapConfig kernel = ctx.cfg.kernel();
  std::vector<MappedFeature> mapped;
  std::vector<DisplayType> labels;
  for (const ItemRecord& item : data.items) {
    if (item.display_type == DisplayType::kUnknown || !item.feature_ref) continue;
    mapped.push_back(approx_map(data.features.at(*item.feature_ref), kernel));
    labels.push_back(item.display_type);
  }
  const TrainConfig train = ctx.cfg.train();
  m.seed("svm.seed", train.seed);
  const TrainTestSplit split = split_per_class(labels, train.positives_per_class, train.seed);
  auto pick = [](const auto& v, const std::vector<std::size_t>& idx) {
    std::remove_cvref_t<decltype(v)> out;
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
  };
  LinearModel model = train_ova(pick(mapped, split.train), pick(labels, split.train), train);
  model.kernel = kernel;
  m.output(a.out, to_json(model).dump() + "\n");
  m.extra()["train_examples"] = split.train.size();
  m.extra()["test_examples"] = split.test.size();
  ctx.out << "trained on " << split.train.size() << " examples";
  if (!split.test.empty()) {
    const double acc = evaluate_accuracy(model, pick(mapped, split.test),
                                         pick(labels, split.test));
    m.extra()["test_accuracy"] = acc;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "; held-out accuracy %.4f on %zu", acc,
                  split.test.size());
    ctx.out << buf;
  }
  ctx.out << "\n";
  m.write(a.out + ".manifest.json");
  return kExitOk;
}

struct ClassifyArgs {
  std::string model, data, out, resolved_out;
};

int cmd_classify(Context& ctx, const ClassifyArgs& a) {
  Manifest m("classify", ctx.cfg);
  const LinearModel model = linear_model_from_json(
      load_json(a.model, "classifier model", "create it with `pmfrank train-classifier`"),
      a.model);
  m.input(a.model);
  Dataset data = load_bundle(a.data);
  m.input(a.data);
  const auto scores = classify_items(data, model);
  m.output(a.out, render([&](std::ostream& o) { write_scores_jsonl(o, scores); }));
  if (!a.resolved_out.empty()) {
    for (ItemRecord& item : data.items) {
      const auto it = scores.find(item.item_id);
      if (item.display_type == DisplayType::kUnknown && it != scores.end()) {
        item.display_type = argmax_type(it->second);
      }
    }
    record_bundle(m, data, a.resolved_out);
  }
  m.write(a.out + ".manifest.json");
  ctx.out << "classified " << scores.size() << " items\n";
  return kExitOk;
}

struct EstimateArgs {
  std::string data, observations, out;
};

int cmd_estimate(Context& ctx, const EstimateArgs& a) {
  Manifest m("estimate-weights", ctx.cfg);
  ObservationSet obs;
  if (!a.observations.empty()) {
    require(a.observations, "observation file", "pass an existing JSON lines file");
    m.input(a.observations);
    std::ifstream in(a.observations, std::ios::binary);
    obs = read_observations_jsonl(in, a.observations);
  } else {
    obs = observations_from_dataset(load_bundle(a.data));
    m.input(a.data);
  }
  const EstimationMethod method = ctx.cfg.estimation();
  const EstimationResult r =
      estimate_weights(obs, method, ctx.cfg.estimation_options());
  m.output(a.out, weights_to_json(r, method).dump(2) + "\n");
  m.write(a.out + ".manifest.json");
  ctx.out << omega_line(r.weights) << "\n";
  return kExitOk;
}

struct RerankArgs {
  std::string data, weights, scores, rank_model, out;
};

int cmd_rerank(Context& ctx, const RerankArgs& a) {
  Manifest m("rerank", ctx.cfg);
  const Dataset data = load_bundle(a.data);
  m.input(a.data);
  const auto scores = load_scores(a.scores, data);
  if (!a.scores.empty()) m.input(a.scores);
  const bool use_svm = ctx.cfg.get("rerank.method") == "ranksvm";
  std::optional<RankModel> rank_model;
  WeightVector omega;
  if (use_svm) {
    if (a.rank_model.empty()) {
      throw Error("missing rank model: rerank.method=ranksvm needs --rank-model "
                  "(create one with `pmfrank evaluate`)");
    }
    rank_model = rank_model_from_json(
        load_json(a.rank_model, "rank model", "create it with `pmfrank evaluate`"),
        a.rank_model);
    m.input(a.rank_model);
  } else {
    if (a.weights.empty()) {
      throw Error("missing weights: PMF re-ranking needs --weights "
                  "(create them with `pmfrank estimate-weights`)");
    }
    omega = weights_from_json(
        load_json(a.weights, "weights", "create them with `pmfrank estimate-weights`"),
        a.weights);
    m.input(a.weights);
  }
  const RerankConfig cfg = ctx.cfg.rerank();
  const auto features = use_svm ? rank_features(data, scores)
                                : std::map<std::string, RankFeature>{};
  const std::string text = render([&](std::ostream& o) {
    for (const SessionRecord& s : data.sessions) {
      const RankedList list = use_svm ? ranksvm_rerank(s, *rank_model, features)
                                      : rerank(s, scores, omega, cfg);
      ordered_json j;
      j["session_id"] = s.session_id;
      ordered_json items = ordered_json::array();
      for (const RankedItem& item : list.items) {
        items.push_back({{"item_id", item.item_id}, {"score", item.score}});
      }
      j["ranking"] = std::move(items);
      o << j.dump() << '\n';
    }
  });
  m.output(a.out, text);
  m.write(a.out + ".manifest.json");
  ctx.out << "re-ranked " << data.sessions.size() << " sessions\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string data, scores, out;
  std::vector<std::string> methods;
};

std::string method_key(const std::string& name) {
  std::string key;
  for (char c : name) {
    if (c == '^') break;
    key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return key;
}

int cmd_evaluate(Context& ctx, const EvaluateArgs& a) {
  Manifest m("evaluate", ctx.cfg);
  const std::set<std::string> known = {"pmfp", "pmfs", "pmfl", "ranksvm", "random"};
  for (const std::string& method : a.methods) {
    if (!known.contains(method)) {
      throw ConfigError("unknown method '" + method +
                        "'; expected pmfp, pmfs, pmfl, ranksvm or random");
    }
  }
  const Dataset data = load_bundle(a.data);
  m.input(a.data);
  const auto scores = load_scores(a.scores, data);
  if (!a.scores.empty()) m.input(a.scores);
  const ProtocolOptions options = ctx.cfg.protocol();
  m.seed("split.seed", options.split_seed);
  m.seed("ranksvm.seed", options.ranksvm.seed);
  m.seed("eval.random_seed", options.comparison.random_seed);
  const ProtocolResult result = run_protocol(data, scores, options);

  const std::set<std::string> wanted(a.methods.begin(), a.methods.end());
  std::ostringstream csv;
  csv << "method,subset,k,ndcg,stderr,sessions\n";
  ordered_json methods = ordered_json::array();
  for (const MetricReport& r : result.reports) {
    if (!wanted.empty() && !wanted.contains(method_key(r.method))) continue;
    for (std::size_t k = 1; k <= r.k_max(); ++k) {
      char row[160];
      std::snprintf(row, sizeof(row), "%s,test,%zu,%.6f,%.6f,%zu\n", r.method.c_str(), k,
                    r.ndcg[k - 1], r.std_error[k - 1], r.session_count);
      csv << row;
    }
    ordered_json j;
    j["method"] = r.method;
    j["k_max"] = r.k_max();
    j["sessions"] = r.session_count;
    j["excluded_sessions"] = r.excluded_sessions;
    j["ndcg"] = r.ndcg;
    j["std_error"] = r.std_error;
    methods.push_back(std::move(j));
  }
  ordered_json summary;
  summary["subset"] = "test";
  summary["train_sessions"] = result.split.train.size();
  summary["test_sessions"] = result.split.test.size();
  summary["omega"] = result.weights.weights.omega;
  summary["methods"] = std::move(methods);

  const fs::path dir(a.out);
  m.output(dir / "ndcg.csv", csv.str());
  m.output(dir / "summary.json", summary.dump(2) + "\n");
  m.output(dir / "weights.json",
           weights_to_json(result.weights, options.estimation).dump(2) + "\n");
  m.output(dir / "rank_model.json", to_json(result.rank_model).dump(2) + "\n");
  m.write(dir / "manifest.json");
  ctx.out << csv.str();
  return kExitOk;
}

void log_config(const Context& ctx) {
  ctx.err << "resolved config:";
  for (const auto& [k, v] : ctx.cfg.values()) ctx.err << ' ' << k << '=' << v;
  ctx.err << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pmfrank: display-type classification, preference estimation and "
               "attractiveness re-ranking"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::vector<std::string> overrides;
  bool quiet = false;
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--set", overrides, "override one key, key=value (repeatable)");
  app.add_flag("-q,--quiet", quiet, "do not log the resolved config");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "validate raw files into a dataset bundle");
  c_ingest->add_option("--items", ingest.items, "items.csv")->required();
  c_ingest->add_option("--sessions", ingest.sessions, "sessions.jsonl")->required();
  c_ingest->add_option("--features", ingest.features, "features.jsonl");
  c_ingest->add_option("--out", ingest.out, "bundle directory")->required();

  SimulateArgs simulate;
  auto* c_sim = app.add_subcommand("simulate", "simulate click sessions from the choice model");
  c_sim->add_option("--out", simulate.out, "bundle directory")->required();
  c_sim->add_option("--labeled-out", simulate.labeled_out,
                    "bundle directory for a labeled feature corpus");

  ExtractArgs extract;
  auto* c_extract = app.add_subcommand("extract-features", "dense descriptors from PGM images");
  c_extract->add_option("images", extract.images, "binary PGM files")->required();
  c_extract->add_option("--out", extract.out, "descriptors.jsonl")->required();
  c_extract->add_option("--vocab", extract.vocab, "vocabulary for quantization");
  c_extract->add_option("--features-out", extract.features_out, "features.jsonl");

  VocabArgs vocab;
  auto* c_vocab = app.add_subcommand("build-vocab", "k-means visual vocabulary");
  c_vocab->add_option("--descriptors", vocab.descriptors, "descriptor files")->required();
  c_vocab->add_option("--out", vocab.out, "vocabulary.json")->required();

  TrainArgs train;
  auto* c_train = app.add_subcommand("train-classifier", "one-vs-all display-type classifier");
  c_train->add_option("--data", train.data, "labeled bundle with features")->required();
  c_train->add_option("--out", train.out, "model.json")->required();

  ClassifyArgs classify;
  auto* c_classify = app.add_subcommand("classify", "score items with a trained classifier");
  c_classify->add_option("--model", classify.model, "model.json")->required();
  c_classify->add_option("--data", classify.data, "bundle")->required();
  c_classify->add_option("--out", classify.out, "scores.jsonl")->required();
  c_classify->add_option("--resolved-out", classify.resolved_out,
                         "bundle with Unknown types replaced by predictions");

  EstimateArgs estimate;
  auto* c_estimate = app.add_subcommand("estimate-weights", "estimate per-type preference odds");
  auto* o_data = c_estimate->add_option("--data", estimate.data, "bundle");
  auto* o_obs = c_estimate->add_option("--observations", estimate.observations,
                                       "observations.jsonl");
  o_data->excludes(o_obs);
  c_estimate->add_option("--out", estimate.out, "weights.json")->required();

  RerankArgs rerank_args;
  auto* c_rerank = app.add_subcommand("rerank", "re-rank every session");
  c_rerank->add_option("--data", rerank_args.data, "bundle")->required();
  c_rerank->add_option("--weights", rerank_args.weights, "weights.json");
  c_rerank->add_option("--scores", rerank_args.scores, "scores.jsonl (default: labels)");
  c_rerank->add_option("--rank-model", rerank_args.rank_model, "rank_model.json");
  c_rerank->add_option("--out", rerank_args.out, "rankings.jsonl")->required();

  EvaluateArgs evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "compare re-rankers by nDCG on a held-out split");
  c_eval->add_option("--data", evaluate.data, "bundle")->required();
  c_eval->add_option("--scores", evaluate.scores, "scores.jsonl (default: labels)");
  c_eval->add_option("--method", evaluate.methods,
                     "report only these methods (pmfp, pmfs, pmfl, ranksvm, random)");
  c_eval->add_option("--out", evaluate.out, "report directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (c_estimate->parsed() && estimate.data.empty() && estimate.observations.empty()) {
    err << "usage error: estimate-weights needs --data or --observations\n";
    return kExitUsage;
  }

  Context ctx{RunConfig(), out, err};
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config file " + config_path);
      ctx.cfg.load(in, config_path);
    }
    for (const std::string& o : overrides) ctx.cfg.apply_override(o);
    if (!quiet) log_config(ctx);

    if (c_ingest->parsed()) return cmd_ingest(ctx, ingest);
    if (c_sim->parsed()) return cmd_simulate(ctx, simulate);
    if (c_extract->parsed()) return cmd_extract(ctx, extract);
    if (c_vocab->parsed()) return cmd_build_vocab(ctx, vocab);
    if (c_train->parsed()) return cmd_train(ctx, train);
    if (c_classify->parsed()) return cmd_classify(ctx, classify);
    if (c_estimate->parsed()) return cmd_estimate(ctx, estimate);
    if (c_rerank->parsed()) return cmd_rerank(ctx, rerank_args);
    if (c_eval->parsed()) return cmd_evaluate(ctx, evaluate);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace pmfrank::cli
