#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pmfrank/choice_model.h"
#include "pmfrank/classifier.h"
#include "pmfrank/features.h"
#include "pmfrank/rerank.h"
#include "pmfrank/types.h"

namespace pmfrank {

// Dataset files. Readers throw ParseError naming file, 1-based line and
// field. Writers are deterministic: the same data always yields the same
// bytes, and reading then writing reproduces the input of a writer.
//
//   items.csv        item_id,display_type,price_cents,seller_class,watch_count,sold
//   sessions.jsonl   {"session_id":..,"displayed":[..],"clicked":[..],"purchased":[..]}
//   features.jsonl   {"item_id":..,"bins":[..]}
inline constexpr const char* kItemsHeader =
    "item_id,display_type,price_cents,seller_class,watch_count,sold";

std::vector<ItemRecord> read_items_csv(std::istream& in, const std::string& name);
void write_items_csv(std::ostream& out, std::span<const ItemRecord> items);

std::vector<SessionRecord> read_sessions_jsonl(std::istream& in,
                                               const std::string& name);
void write_sessions_jsonl(std::ostream& out,
                          std::span<const SessionRecord> sessions);

std::map<std::string, BowHistogram> read_features_jsonl(std::istream& in,
                                                        const std::string& name);
void write_features_jsonl(std::ostream& out,
                          const std::map<std::string, BowHistogram>& features);

// Reads the three files; items with a histogram get feature_ref = item_id.
// An empty features path means no features.
Dataset read_dataset_files(const std::filesystem::path& items,
                           const std::filesystem::path& sessions,
                           const std::filesystem::path& features);

// A bundle is a directory holding items.csv, sessions.jsonl, features.jsonl
// and bundle.json with the format version.
inline constexpr int kBundleVersion = 1;
void write_dataset_bundle(const Dataset& dataset, const std::filesystem::path& dir);
Dataset read_dataset_bundle(const std::filesystem::path& dir);

// Whole-file helpers. read_text_file throws Error when the file is missing.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json_file(const std::filesystem::path& path);

// Versioned artifact documents. The from_json readers throw ParseError with
// the given name as file.
nlohmann::ordered_json to_json(const LinearModel& model);
LinearModel linear_model_from_json(const nlohmann::json& j, const std::string& name);

nlohmann::ordered_json to_json(const Vocabulary& vocab);
Vocabulary vocabulary_from_json(const nlohmann::json& j, const std::string& name);

nlohmann::ordered_json to_json(const RankModel& model);
RankModel rank_model_from_json(const nlohmann::json& j, const std::string& name);

nlohmann::ordered_json weights_to_json(const EstimationResult& result,
                                       EstimationMethod method);
WeightVector weights_from_json(const nlohmann::json& j, const std::string& name);

// One line per image: {"image":..,"descriptors":[{"x","y","scale","values"}]}.
using NamedDescriptors = std::pair<std::string, DescriptorSet>;
void write_descriptors_jsonl(std::ostream& out,
                             std::span<const NamedDescriptors> sets);
std::vector<NamedDescriptors> read_descriptors_jsonl(std::istream& in,
                                                     const std::string& name);

// {"item_id":..,"predicted":"P|M|F","scores":[P,M,F]} per line, in id order.
void write_scores_jsonl(std::ostream& out,
                        const std::map<std::string, ClassScores>& scores);
std::map<std::string, ClassScores> read_scores_jsonl(std::istream& in,
                                                     const std::string& name);

// {"gamma":[..],"n_hat":k,"eta":[..]} per line.
void write_observations_jsonl(std::ostream& out, const ObservationSet& obs);
ObservationSet read_observations_jsonl(std::istream& in, const std::string& name);

}  // namespace pmfrank
