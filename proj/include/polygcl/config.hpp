#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polygcl/probe.hpp"
#include "polygcl/trainer.hpp"

namespace polygcl {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DataFormat { kCanonical, kRaw };

struct ExperimentConfig {
  std::uint64_t seed = 0;
  DataFormat data_format = DataFormat::kCanonical;
  std::filesystem::path data_path;  // canonical JSON
  std::filesystem::path content_path;
  std::filesystem::path cites_path;
  bool row_normalize = false;
  std::uint64_t split_seed = 0;
  TrainConfig train;
  ProbeConfig probe;
  std::filesystem::path output_dir = "out";
  int hecheck_nodes = 6;
};

// Every recognised dotted key, in echo order.
const std::vector<std::string>& config_keys();
std::string_view config_key_help(std::string_view key);

// Applies one key=value assignment. Throws ConfigError on unknown keys or
// unparsable values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

// Parses "key = value" lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

// Canonical key=value rendering, one entry per key in `config_keys()` order.
std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& cfg);
std::string config_echo_text(const ExperimentConfig& cfg);

// Seeds propagated from the master seed into the subsystem configs.
void propagate_seed(ExperimentConfig& cfg);

// Paths exist, probabilities valid, etc.; throws ConfigError.
void validate(const ExperimentConfig& cfg, bool needs_data = true);

}  // namespace polygcl
