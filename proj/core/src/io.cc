#include "pmfrank/io.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pmfrank/errors.h"

namespace pmfrank {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Reads one line, dropping a trailing CR.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

// Splits a CSV line, honouring double-quoted fields with "" escapes.
std::vector<std::string> split_csv(const std::string& line, const std::string& file,
                                   std::size_t lineno) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"' && fields.back().empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError(file, lineno, "line", "unterminated quote");
  return fields;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::int64_t parse_int(const std::string& s, const std::string& file,
                       std::size_t lineno, const std::string& field) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(file, lineno, field, "expected an integer, got '" + s + "'");
  }
  return v;
}

json parse_json_line(const std::string& line, const std::string& file,
                     std::size_t lineno) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw ParseError(file, lineno, "line", "expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ParseError(file, lineno, "line", e.what());
  }
}

// Typed field access with errors that name the field.
template <typename T>
T field(const json& j, const char* key, const std::string& file, std::size_t lineno) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(file, lineno, key, "missing");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(file, lineno, key, e.what());
  }
}

std::vector<std::string> id_list(const json& j, const char* key,
                                 const std::string& file, std::size_t lineno) {
  return field<std::vector<std::string>>(j, key, file, lineno);
}

void expect_format(const json& j, const char* format, const std::string& name) {
  const auto f = field<std::string>(j, "format", name, 1);
  if (f != format) {
    throw ParseError(name, 1, "format", "expected '" + std::string(format) + "', got '" + f + "'");
  }
  const auto v = field<int>(j, "version", name, 1);
  if (v != 1) throw ParseError(name, 1, "version", "unsupported version " + std::to_string(v));
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::string type_key(std::size_t t) {
  return std::string(1, display_type_code(kDisplayTypes[t]));
}

}  // namespace

std::vector<ItemRecord> read_items_csv(std::istream& in, const std::string& name) {
  std::vector<ItemRecord> items;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (next_line(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    if (!header_seen) {
      if (line != kItemsHeader) {
        throw ParseError(name, lineno, "header",
                         "expected '" + std::string(kItemsHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto f = split_csv(line, name, lineno);
    if (f.size() != 6) {
      throw ParseError(name, lineno, "line",
                       "expected 6 fields, got " + std::to_string(f.size()));
    }
    ItemRecord item;
    item.item_id = f[0];
    const auto type = parse_display_type(f[1]);
    if (!type) {
      throw ParseError(name, lineno, "display_type", "expected P, M, F or U, got '" + f[1] + "'");
    }
    item.display_type = *type;
    item.price_cents = parse_int(f[2], name, lineno, "price_cents");
    const auto seller = parse_seller_class(f[3]);
    if (!seller) {
      throw ParseError(name, lineno, "seller_class", "expected casual or top, got '" + f[3] + "'");
    }
    item.seller_class = *seller;
    item.watch_count = parse_int(f[4], name, lineno, "watch_count");
    if (f[5] != "0" && f[5] != "1") {
      throw ParseError(name, lineno, "sold", "expected 0 or 1, got '" + f[5] + "'");
    }
    item.sold = f[5] == "1";
    items.push_back(std::move(item));
  }
  return items;
}

void write_items_csv(std::ostream& out, std::span<const ItemRecord> items) {
  out << kItemsHeader << '\n';
  for (const ItemRecord& item : items) {
    out << csv_field(item.item_id) << ',' << display_type_code(item.display_type)
        << ',' << item.price_cents << ',' << seller_class_name(item.seller_class)
        << ',' << item.watch_count << ',' << (item.sold ? '1' : '0') << '\n';
  }
}

std::vector<SessionRecord> read_sessions_jsonl(std::istream& in,
                                               const std::string& name) {
  std::vector<SessionRecord> sessions;
  std::string line;
  std::size_t lineno = 0;
  while (next_line(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const json j = parse_json_line(line, name, lineno);
    SessionRecord s;
    s.session_id = field<std::string>(j, "session_id", name, lineno);
    s.displayed = id_list(j, "displayed", name, lineno);
    s.clicked = id_list(j, "clicked", name, lineno);
    s.purchased = j.contains("purchased") ? id_list(j, "purchased", name, lineno)
                                          : std::vector<std::string>{};
    sessions.push_back(std::move(s));
  }
  return sessions;
}

void write_sessions_jsonl(std::ostream& out,
                          std::span<const SessionRecord> sessions) {
  for (const SessionRecord& s : sessions) {
    ordered_json j;
    j["session_id"] = s.session_id;
    j["displayed"] = s.displayed;
    j["clicked"] = s.clicked;
    j["purchased"] = s.purchased;
    out << j.dump() << '\n';
  }
}

std::map<std::string, BowHistogram> read_features_jsonl(std::istream& in,
                                                        const std::string& name) {
  std::map<std::string, BowHistogram> features;
  std::string line;
  std::size_t lineno = 0;
  while (next_line(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const json j = parse_json_line(line, name, lineno);
    const auto id = field<std::string>(j, "item_id", name, lineno);
    BowHistogram h;
    h.bins = field<std::vector<double>>(j, "bins", name, lineno);
    if (!features.emplace(id, std::move(h)).second) {
      throw ParseError(name, lineno, "item_id", "duplicate histogram for '" + id + "'");
    }
  }
  return features;
}

void write_features_jsonl(std::ostream& out,
                          const std::map<std::string, BowHistogram>& features) {
  for (const auto& [id, h] : features) {
    ordered_json j;
    j["item_id"] = id;
    j["bins"] = h.bins;
    out << j.dump() << '\n';
  }
}

Dataset read_dataset_files(const std::filesystem::path& items,
                           const std::filesystem::path& sessions,
                           const std::filesystem::path& features) {
  Dataset data;
  {
    auto in = open_in(items);
    data.items = read_items_csv(in, items.string());
  }
  {
    auto in = open_in(sessions);
    data.sessions = read_sessions_jsonl(in, sessions.string());
  }
  if (!features.empty()) {
    auto in = open_in(features);
    data.features = read_features_jsonl(in, features.string());
  }
  for (ItemRecord& item : data.items) {
    if (data.features.contains(item.item_id)) item.feature_ref = item.item_id;
  }
  return data;
}

void write_dataset_bundle(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream items, sessions, features;
  write_items_csv(items, dataset.items);
  write_sessions_jsonl(sessions, dataset.sessions);
  write_features_jsonl(features, dataset.features);
  write_text_file(dir / "items.csv", items.str());
  write_text_file(dir / "sessions.jsonl", sessions.str());
  write_text_file(dir / "features.jsonl", features.str());
  ordered_json meta;
  meta["format"] = "pmfrank.dataset";
  meta["version"] = kBundleVersion;
  write_text_file(dir / "bundle.json", meta.dump(2) + "\n");
}

Dataset read_dataset_bundle(const std::filesystem::path& dir) {
  const auto meta_path = dir / "bundle.json";
  if (!std::filesystem::exists(meta_path)) {
    throw Error("missing dataset bundle: " + meta_path.string() +
                " not found (run `pmfrank ingest` or `pmfrank simulate` first)");
  }
  const json meta = read_json_file(meta_path);
  const auto version = field<int>(meta, "version", meta_path.string(), 1);
  if (version != kBundleVersion) {
    throw ParseError(meta_path.string(), 1, "version",
                     "unsupported bundle version " + std::to_string(version));
  }
  return read_dataset_files(dir / "items.csv", dir / "sessions.jsonl",
                            dir / "features.jsonl");
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 1, "document", e.what());
  }
}

ordered_json to_json(const LinearModel& model) {
  ordered_json j;
  j["format"] = "pmfrank.linear_model";
  j["version"] = 1;
  j["dimension"] = model.dimension;
  j["kernel"] = {{"order", model.kernel.order},
                 {"period", model.kernel.resolved_period()},
                 {"gamma", model.kernel.gamma}};
  ordered_json classes;
  for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
    classes[type_key(t)] = {{"weights", model.weights[t]},
                            {"bias", model.bias[t]},
                            {"epochs", model.trace.epochs[t]},
                            {"converged", model.trace.converged[t]},
                            {"primal_objective", model.trace.primal_objective[t]}};
  }
  j["classes"] = std::move(classes);
  j["config_hash"] = model.config_hash;
  j["seed"] = model.seed;
  return j;
}

LinearModel linear_model_from_json(const json& j, const std::string& name) {
  expect_format(j, "pmfrank.linear_model", name);
  LinearModel m;
  m.dimension = field<std::size_t>(j, "dimension", name, 1);
  const auto kernel = field<json>(j, "kernel", name, 1);
  m.kernel.order = field<int>(kernel, "order", name, 1);
  m.kernel.period = field<double>(kernel, "period", name, 1);
  m.kernel.gamma = field<double>(kernel, "gamma", name, 1);
  const auto classes = field<json>(j, "classes", name, 1);
  for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
    const auto c = field<json>(classes, type_key(t).c_str(), name, 1);
    m.weights[t] = field<std::vector<double>>(c, "weights", name, 1);
    m.bias[t] = field<double>(c, "bias", name, 1);
    m.trace.epochs[t] = c.value("epochs", 0);
    m.trace.converged[t] = c.value("converged", false);
    m.trace.primal_objective[t] = c.value("primal_objective", 0.0);
    if (m.weights[t].size() != m.dimension) {
      throw ParseError(name, 1, "weights", "length differs from dimension");
    }
  }
  m.config_hash = field<std::string>(j, "config_hash", name, 1);
  m.seed = field<std::uint64_t>(j, "seed", name, 1);
  return m;
}

ordered_json to_json(const Vocabulary& vocab) {
  ordered_json j;
  j["format"] = "pmfrank.vocabulary";
  j["version"] = 1;
  j["k"] = vocab.k();
  j["dimension"] = vocab.dimension();
  j["training_seed"] = vocab.training_seed;
  j["centers"] = vocab.centers;
  return j;
}

Vocabulary vocabulary_from_json(const json& j, const std::string& name) {
  expect_format(j, "pmfrank.vocabulary", name);
  Vocabulary v;
  v.training_seed = field<std::uint64_t>(j, "training_seed", name, 1);
  v.centers = field<std::vector<std::vector<double>>>(j, "centers", name, 1);
  if (v.centers.empty()) throw ParseError(name, 1, "centers", "empty vocabulary");
  for (const auto& c : v.centers) {
    if (c.size() != v.centers.front().size()) {
      throw ParseError(name, 1, "centers", "centers differ in dimension");
    }
  }
  return v;
}

ordered_json to_json(const RankModel& model) {
  ordered_json j;
  j["format"] = "pmfrank.rank_model";
  j["version"] = 1;
  j["layout"] = model.layout;
  j["C"] = model.c;
  j["weights"] = model.weights;
  j["primal_objective"] = model.primal_objective;
  return j;
}

RankModel rank_model_from_json(const json& j, const std::string& name) {
  expect_format(j, "pmfrank.rank_model", name);
  RankModel m;
  m.layout = field<std::string>(j, "layout", name, 1);
  if (m.layout != RankModel{}.layout) {
    throw ParseError(name, 1, "layout", "unknown feature layout '" + m.layout + "'");
  }
  m.c = field<double>(j, "C", name, 1);
  const auto w = field<std::vector<double>>(j, "weights", name, 1);
  if (w.size() != kRankFeatureDim) {
    throw ParseError(name, 1, "weights", "expected " + std::to_string(kRankFeatureDim) + " weights");
  }
  std::copy(w.begin(), w.end(), m.weights.begin());
  m.primal_objective = j.value("primal_objective", 0.0);
  return m;
}

ordered_json weights_to_json(const EstimationResult& result, EstimationMethod method) {
  ordered_json j;
  j["format"] = "pmfrank.weights";
  j["version"] = 1;
  j["method"] = method == EstimationMethod::kExactMle ? "exact_mle" : "moment";
  ordered_json omega;
  for (std::size_t t = 0; t < result.weights.omega.size(); ++t) {
    omega[type_key(t)] = result.weights.omega[t];
  }
  j["omega"] = std::move(omega);
  j["iterations"] = result.iterations;
  j["residual_norm"] = result.residual_norm;
  j["log_likelihood"] = result.log_likelihood;
  return j;
}

WeightVector weights_from_json(const json& j, const std::string& name) {
  expect_format(j, "pmfrank.weights", name);
  const auto omega = field<json>(j, "omega", name, 1);
  WeightVector w;
  for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
    w.omega.push_back(field<double>(omega, type_key(t).c_str(), name, 1));
  }
  return w;
}

void write_descriptors_jsonl(std::ostream& out,
                             std::span<const NamedDescriptors> sets) {
  for (const auto& [image, set] : sets) {
    ordered_json j;
    j["image"] = image;
    ordered_json list = ordered_json::array();
    for (const Descriptor& d : set.descriptors) {
      list.push_back({{"x", d.x}, {"y", d.y}, {"scale", d.scale}, {"values", d.values}});
    }
    j["descriptors"] = std::move(list);
    out << j.dump() << '\n';
  }
}

std::vector<NamedDescriptors> read_descriptors_jsonl(std::istream& in,
                                                     const std::string& name) {
  std::vector<NamedDescriptors> sets;
  std::string line;
  std::size_t lineno = 0;
  while (next_line(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const json j = parse_json_line(line, name, lineno);
    NamedDescriptors entry;
    entry.first = field<std::string>(j, "image", name, lineno);
    for (const json& d : field<json>(j, "descriptors", name, lineno)) {
      Descriptor desc;
      desc.x = field<double>(d, "x", name, lineno);
      desc.y = field<double>(d, "y", name, lineno);
      desc.scale = field<int>(d, "scale", name, lineno);
      desc.values = field<std::vector<double>>(d, "values", name, lineno);
      entry.second.descriptors.push_back(std::move(desc));
    }
    sets.push_back(std::move(entry));
  }
  return sets;
}

void write_scores_jsonl(std::ostream& out,
                        const std::map<std::string, ClassScores>& scores) {
  for (const auto& [id, s] : scores) {
    ordered_json j;
    j["item_id"] = id;
    j["predicted"] = std::string(1, display_type_code(argmax_type(s)));
    j["scores"] = s.values;
    out << j.dump() << '\n';
  }
}

std::map<std::string, ClassScores> read_scores_jsonl(std::istream& in,
                                                     const std::string& name) {
  std::map<std::string, ClassScores> scores;
  std::string line;
  std::size_t lineno = 0;
  while (next_line(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const json j = parse_json_line(line, name, lineno);
    const auto id = field<std::string>(j, "item_id", name, lineno);
    const auto v = field<std::vector<double>>(j, "scores", name, lineno);
    if (v.size() != kNumDisplayTypes) {
      throw ParseError(name, lineno, "scores", "expected 3 scores");
    }
    ClassScores s;
    std::copy(v.begin(), v.end(), s.values.begin());
    if (!scores.emplace(id, s).second) {
      throw ParseError(name, lineno, "item_id", "duplicate scores for '" + id + "'");
    }
  }
  return scores;
}

void write_observations_jsonl(std::ostream& out, const ObservationSet& obs) {
  for (const Observation& o : obs) {
    ordered_json j;
    j["gamma"] = o.urn.gamma;
    j["n_hat"] = o.urn.n_hat;
    j["eta"] = o.eta;
    out << j.dump() << '\n';
  }
}

ObservationSet read_observations_jsonl(std::istream& in, const std::string& name) {
  ObservationSet obs;
  std::string line;
  std::size_t lineno = 0;
  while (next_line(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const json j = parse_json_line(line, name, lineno);
    Observation o;
    o.urn.gamma = field<std::vector<int>>(j, "gamma", name, lineno);
    o.eta = field<std::vector<int>>(j, "eta", name, lineno);
    o.urn.n_hat = j.contains("n_hat") ? field<int>(j, "n_hat", name, lineno)
                                      : [&] {
                                          int s = 0;
                                          for (int e : o.eta) s += e;
                                          return s;
                                        }();
    obs.push_back(std::move(o));
  }
  return obs;
}

}  // namespace pmfrank
