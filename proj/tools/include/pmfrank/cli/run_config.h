#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pmfrank/choice_model.h"
#include "pmfrank/classifier.h"
#include "pmfrank/features.h"
#include "pmfrank/kernel.h"
#include "pmfrank/pipeline.h"
#include "pmfrank/rerank.h"
#include "pmfrank/sim.h"

namespace pmfrank::cli {

// Flat key=value configuration with a fixed key set. Every key has a
// default; set() rejects unknown keys and malformed values with ConfigError.
class RunConfig {
 public:
  RunConfig();

  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;

  // Lines of "key = value"; '#' starts a comment.
  void load(std::istream& in, const std::string& name);
  // "key=value".
  void apply_override(const std::string& assignment);

  const std::map<std::string, std::string>& values() const { return values_; }
  nlohmann::json to_json() const;

  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_seed(const std::string& key) const;

  // Typed views of the key groups.
  KernelMapConfig kernel() const;
  TrainConfig train() const;
  RerankConfig rerank() const;
  RankSvmConfig ranksvm() const;
  LevelRule level_rule() const;
  SimConfig sim() const;
  EstimationMethod estimation() const;
  EstimationOptions estimation_options() const;
  ProtocolOptions protocol() const;
  DenseDescriptorConfig descriptors() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace pmfrank::cli
