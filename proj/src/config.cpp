#include "polygcl/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace polygcl {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(std::string(key) + ": expected true/false, got '" + std::string(v) + "'");
}

struct KeySpec {
  std::string name;
  std::string help;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define POLYGCL_DOUBLE_KEY(NAME, HELP, FIELD)                                          \
  KeySpec {                                                                            \
    NAME, HELP,                                                                        \
        [](ExperimentConfig& c, std::string_view v) { c.FIELD = parse_double(NAME, v); }, \
        [](const ExperimentConfig& c) { return format_double(c.FIELD); }               \
  }

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"seed", "master seed; subsystem streams derive from it",
       [](ExperimentConfig& c, std::string_view v) { c.seed = parse_int<std::uint64_t>("seed", v); },
       [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      {"data.format", "canonical | raw",
       [](ExperimentConfig& c, std::string_view v) {
         if (v == "canonical") {
           c.data_format = DataFormat::kCanonical;
         } else if (v == "raw") {
           c.data_format = DataFormat::kRaw;
         } else {
           throw ConfigError("data.format: expected canonical or raw, got '" + std::string(v) + "'");
         }
       },
       [](const ExperimentConfig& c) {
         return std::string(c.data_format == DataFormat::kCanonical ? "canonical" : "raw");
       }},
      {"data.path", "canonical JSON graph",
       [](ExperimentConfig& c, std::string_view v) { c.data_path = std::string(v); },
       [](const ExperimentConfig& c) { return c.data_path.string(); }},
      {"data.content", "raw content file",
       [](ExperimentConfig& c, std::string_view v) { c.content_path = std::string(v); },
       [](const ExperimentConfig& c) { return c.content_path.string(); }},
      {"data.cites", "raw cites file",
       [](ExperimentConfig& c, std::string_view v) { c.cites_path = std::string(v); },
       [](const ExperimentConfig& c) { return c.cites_path.string(); }},
      {"data.row_normalize", "L1-normalize feature rows",
       [](ExperimentConfig& c, std::string_view v) { c.row_normalize = parse_bool("data.row_normalize", v); },
       [](const ExperimentConfig& c) { return std::string(c.row_normalize ? "true" : "false"); }},
      {"data.split_seed", "seed of the train/val/test split when the data carries none",
       [](ExperimentConfig& c, std::string_view v) {
         c.split_seed = parse_int<std::uint64_t>("data.split_seed", v);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.split_seed); }},
      {"model.hidden", "hidden width",
       [](ExperimentConfig& c, std::string_view v) { c.train.hidden = parse_int<Index>("model.hidden", v); },
       [](const ExperimentConfig& c) { return std::to_string(c.train.hidden); }},
      {"model.out", "embedding width",
       [](ExperimentConfig& c, std::string_view v) { c.train.out = parse_int<Index>("model.out", v); },
       [](const ExperimentConfig& c) { return std::to_string(c.train.out); }},
      {"model.activation", "square | relu | half_square",
       [](ExperimentConfig& c, std::string_view v) {
         const auto a = activation_from_name(v);
         if (!a) throw ConfigError("model.activation: unknown activation '" + std::string(v) + "'");
         c.train.activation = *a;
       },
       [](const ExperimentConfig& c) { return std::string(activation_name(c.train.activation)); }},
      {"loss.kind", "poly | grace",
       [](ExperimentConfig& c, std::string_view v) {
         const auto k = loss_kind_from_name(v);
         if (!k) throw ConfigError("loss.kind: unknown loss '" + std::string(v) + "'");
         c.train.loss.kind = *k;
       },
       [](const ExperimentConfig& c) { return std::string(loss_kind_name(c.train.loss.kind)); }},
      POLYGCL_DOUBLE_KEY("loss.margin", "margin m of the polynomial loss", train.loss.margin),
      POLYGCL_DOUBLE_KEY("loss.lambda", "embedding L2 weight of the polynomial loss", train.loss.lambda),
      POLYGCL_DOUBLE_KEY("loss.temperature", "temperature of the grace loss", train.loss.temperature),
      POLYGCL_DOUBLE_KEY("augment.edge_drop_1", "edge drop probability, view 1", train.augment.edge_drop_1),
      POLYGCL_DOUBLE_KEY("augment.edge_drop_2", "edge drop probability, view 2", train.augment.edge_drop_2),
      POLYGCL_DOUBLE_KEY("augment.feat_mask_1", "feature column mask probability, view 1", train.augment.feat_mask_1),
      POLYGCL_DOUBLE_KEY("augment.feat_mask_2", "feature column mask probability, view 2", train.augment.feat_mask_2),
      {"train.epochs", "pre-training epochs",
       [](ExperimentConfig& c, std::string_view v) { c.train.epochs = parse_int<int>("train.epochs", v); },
       [](const ExperimentConfig& c) { return std::to_string(c.train.epochs); }},
      POLYGCL_DOUBLE_KEY("train.lr", "Adam learning rate", train.adam.lr),
      POLYGCL_DOUBLE_KEY("train.weight_decay", "weight decay", train.adam.weight_decay),
      POLYGCL_DOUBLE_KEY("train.beta1", "Adam beta1", train.adam.beta1),
      POLYGCL_DOUBLE_KEY("train.beta2", "Adam beta2", train.adam.beta2),
      POLYGCL_DOUBLE_KEY("train.eps", "Adam epsilon", train.adam.eps),
      {"train.decoupled_weight_decay", "AdamW-style decay instead of L2 in the gradient",
       [](ExperimentConfig& c, std::string_view v) {
         c.train.adam.decoupled_weight_decay = parse_bool("train.decoupled_weight_decay", v);
       },
       [](const ExperimentConfig& c) {
         return std::string(c.train.adam.decoupled_weight_decay ? "true" : "false");
       }},
      POLYGCL_DOUBLE_KEY("train.grad_clip", "global gradient norm clip (0 = off)", train.grad_clip),
      POLYGCL_DOUBLE_KEY("probe.lr", "probe Adam learning rate", probe.lr),
      {"probe.epochs", "probe epochs",
       [](ExperimentConfig& c, std::string_view v) { c.probe.epochs = parse_int<int>("probe.epochs", v); },
       [](const ExperimentConfig& c) { return std::to_string(c.probe.epochs); }},
      POLYGCL_DOUBLE_KEY("probe.l2", "probe weight L2", probe.l2),
      {"probe.standardize", "standardize embeddings before probing",
       [](ExperimentConfig& c, std::string_view v) { c.probe.standardize = parse_bool("probe.standardize", v); },
       [](const ExperimentConfig& c) { return std::string(c.probe.standardize ? "true" : "false"); }},
      {"output.dir", "directory for reports, checkpoints and tables",
       [](ExperimentConfig& c, std::string_view v) { c.output_dir = std::string(v); },
       [](const ExperimentConfig& c) { return c.output_dir.string(); }},
      {"hecheck.nodes", "node count of the dummy graph used by hecheck",
       [](ExperimentConfig& c, std::string_view v) { c.hecheck_nodes = parse_int<int>("hecheck.nodes", v); },
       [](const ExperimentConfig& c) { return std::to_string(c.hecheck_nodes); }},
  };
  return specs;
}

#undef POLYGCL_DOUBLE_KEY

const KeySpec* find_key(std::string_view key) {
  for (const KeySpec& k : key_specs()) {
    if (k.name == key) return &k;
  }
  return nullptr;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const KeySpec& k : key_specs()) out.push_back(k.name);
    return out;
  }();
  return keys;
}

std::string_view config_key_help(std::string_view key) {
  const KeySpec* k = find_key(key);
  return k ? std::string_view(k->help) : std::string_view();
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const KeySpec* k = find_key(trim(key));
  if (!k) throw ConfigError("unknown config key '" + std::string(key) + "'");
  k->set(cfg, trim(value));
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    out.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentConfig cfg;
  for (const auto& [key, value] : parse_config_text(buf.str())) {
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  return cfg;
}

std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const KeySpec& k : key_specs()) out.emplace_back(k.name, k.get(cfg));
  return out;
}

std::string config_echo_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_echo(cfg)) out += k + " = " + v + "\n";
  return out;
}

void propagate_seed(ExperimentConfig& cfg) {
  cfg.train.seed = cfg.seed;
  cfg.train.augment.seed = cfg.seed;
  cfg.probe.seed = cfg.seed;
}

void validate(const ExperimentConfig& cfg, bool needs_data) {
  try {
    validate(cfg.train);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.probe.epochs < 0 || !(cfg.probe.lr > 0.0) || !(cfg.probe.l2 >= 0.0)) {
    throw ConfigError("probe settings out of range");
  }
  if (cfg.hecheck_nodes < 2) throw ConfigError("hecheck.nodes must be >= 2");
  if (!needs_data) return;
  auto require = [](const std::filesystem::path& p, const char* key) {
    if (p.empty()) throw ConfigError(std::string(key) + " is not set");
    if (!std::filesystem::exists(p)) {
      throw ConfigError(std::string(key) + ": file not found: " + p.string());
    }
  };
  if (cfg.data_format == DataFormat::kCanonical) {
    require(cfg.data_path, "data.path");
  } else {
    require(cfg.content_path, "data.content");
    require(cfg.cites_path, "data.cites");
  }
}

}  // namespace polygcl
