#include "polygcl/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

#include "polygcl/errors.hpp"
#include "polygcl/rng.hpp"

namespace polygcl {
namespace {

using nlohmann::json;

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == '\t' || line[pos] == ' ' ||
                                 line[pos] == '\r')) {
      ++pos;
    }
    if (pos >= line.size()) break;
    const std::size_t end = line.find_first_of("\t \r", pos);
    const std::size_t stop = end == std::string_view::npos ? line.size() : end;
    fields.push_back(line.substr(pos, stop - pos));
    pos = stop;
  }
  return fields;
}

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line,
                          const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

template <typename T>
std::vector<T> index_list(const json& j, const char* key) {
  if (!j.is_array()) {
    throw ParseError(std::string("masks.") + key + " must be an array");
  }
  return j.get<std::vector<T>>();
}

}  // namespace

std::vector<Edge> canonical_edges(std::vector<Edge> edges, IngestStats* stats) {
  std::vector<Edge> out;
  out.reserve(edges.size());
  for (Edge e : edges) {
    if (e.u == e.v) {
      if (stats) ++stats->self_loops;
      continue;
    }
    if (e.u > e.v) std::swap(e.u, e.v);
    out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  const auto last = std::unique(out.begin(), out.end());
  if (stats) stats->duplicates += static_cast<Index>(out.end() - last);
  out.erase(last, out.end());
  return out;
}

void validate(const Graph& g) {
  const Index n = g.topology.num_nodes;
  if (n <= 0) throw ParseError("graph has no nodes");
  if (g.features.rows() != n) {
    throw ParseError("feature matrix has " + std::to_string(g.features.rows()) +
                     " rows, expected " + std::to_string(n));
  }
  if (static_cast<Index>(g.labels.size()) != n) {
    throw ParseError("labels has " + std::to_string(g.labels.size()) +
                     " entries, expected " + std::to_string(n));
  }
  if (g.num_classes <= 0) throw ParseError("num_classes must be positive");
  for (std::size_t i = 0; i < g.labels.size(); ++i) {
    if (g.labels[i] < 0 || g.labels[i] >= g.num_classes) {
      throw ParseError("label of node " + std::to_string(i) + " is " +
                       std::to_string(g.labels[i]) + ", outside [0, " +
                       std::to_string(g.num_classes) + ")");
    }
  }
  for (const Edge& e : g.topology.edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
      throw ParseError("edge (" + std::to_string(e.u) + ", " +
                       std::to_string(e.v) + ") references a node outside [0, " +
                       std::to_string(n) + ")");
    }
    if (e.u == e.v) {
      throw ParseError("self-loop on node " + std::to_string(e.u));
    }
  }
  if (!g.features.allFinite()) throw ParseError("non-finite feature value");
}

void validate(const SplitMasks& masks, Index num_nodes) {
  std::vector<char> seen(static_cast<std::size_t>(num_nodes), 0);
  for (const auto* part : {&masks.train, &masks.val, &masks.test}) {
    for (const Index i : *part) {
      if (i < 0 || i >= num_nodes) {
        throw ParseError("mask index " + std::to_string(i) + " out of range");
      }
      if (seen[static_cast<std::size_t>(i)]++) {
        throw ParseError("node " + std::to_string(i) +
                         " appears in more than one mask slot");
      }
    }
  }
}

Graph load_content_cites(const std::filesystem::path& content_path,
                         const std::filesystem::path& cites_path,
                         IngestStats* stats) {
  IngestStats local;
  IngestStats& st = stats ? *stats : local;

  std::unordered_map<std::string, Index> id_to_node;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> label_names;
  {
    std::ifstream in = open_input(content_path);
    std::string line;
    std::size_t line_no = 0;
    std::size_t num_features = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto fields = split_fields(line);
      if (fields.empty()) continue;
      if (fields.size() < 2) fail_at(content_path, line_no, "expected id, features and label");
      const std::size_t f = fields.size() - 2;
      if (rows.empty()) {
        num_features = f;
      } else if (f != num_features) {
        fail_at(content_path, line_no,
                "row has " + std::to_string(f) + " features, expected " +
                    std::to_string(num_features));
      }
      std::vector<double> row(f);
      for (std::size_t k = 0; k < f; ++k) {
        const std::string_view tok = fields[k + 1];
        const auto [ptr, ec] =
            std::from_chars(tok.data(), tok.data() + tok.size(), row[k]);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
          fail_at(content_path, line_no,
                  "feature " + std::to_string(k) + " is not a number: '" +
                      std::string(tok) + "'");
        }
      }
      const std::string id(fields.front());
      if (!id_to_node.emplace(id, static_cast<Index>(rows.size())).second) {
        fail_at(content_path, line_no, "duplicate node id '" + id + "'");
      }
      rows.push_back(std::move(row));
      label_names.emplace_back(fields.back());
    }
  }
  if (rows.empty()) throw ParseError(content_path.string() + ": empty graph");

  Graph g;
  const Index n = static_cast<Index>(rows.size());
  g.topology.num_nodes = n;
  g.features.resize(n, static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < row.size(); ++k) {
      g.features(i, static_cast<Index>(k)) = row[k];
    }
  }
  std::set<std::string> classes(label_names.begin(), label_names.end());
  std::map<std::string, int> class_index;
  for (const auto& name : classes) {
    class_index.emplace(name, static_cast<int>(class_index.size()));
  }
  g.num_classes = static_cast<int>(class_index.size());
  g.labels.reserve(label_names.size());
  for (const auto& name : label_names) g.labels.push_back(class_index.at(name));

  std::vector<Edge> edges;
  {
    std::ifstream in = open_input(cites_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto fields = split_fields(line);
      if (fields.empty()) continue;
      if (fields.size() != 2) fail_at(cites_path, line_no, "expected two ids");
      const auto a = id_to_node.find(std::string(fields[0]));
      const auto b = id_to_node.find(std::string(fields[1]));
      if (a == id_to_node.end() || b == id_to_node.end()) {
        ++st.dropped_unknown;
        continue;
      }
      edges.push_back({a->second, b->second});
    }
  }
  g.topology.edges = canonical_edges(std::move(edges), &st);
  validate(g);
  return g;
}

CanonicalGraph load_canonical(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  CanonicalGraph out;
  Graph& g = out.graph;
  try {
    for (const char* key : {"num_nodes", "num_classes", "edges", "features", "labels"}) {
      if (!j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
    }
    g.topology.num_nodes = j.at("num_nodes").get<Index>();
    g.num_classes = j.at("num_classes").get<int>();
    if (g.topology.num_nodes <= 0) throw ParseError("num_nodes must be positive");

    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) {
        throw ParseError("each edge must be a pair [u, v]");
      }
      edges.push_back({e[0].get<Index>(), e[1].get<Index>()});
    }
    for (const Edge& e : edges) {
      if (e.u == e.v) throw ParseError("self-loop on node " + std::to_string(e.u));
    }
    g.topology.edges = canonical_edges(std::move(edges));

    const auto& feats = j.at("features");
    if (!feats.is_array()) throw ParseError("features must be an array of rows");
    const Index rows = static_cast<Index>(feats.size());
    const Index cols = rows > 0 ? static_cast<Index>(feats[0].size()) : 0;
    g.features.resize(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      const auto& row = feats[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
        throw ParseError("feature row " + std::to_string(r) + " has wrong length");
      }
      for (Index c = 0; c < cols; ++c) {
        g.features(r, c) = row[static_cast<std::size_t>(c)].get<double>();
      }
    }
    g.labels = j.at("labels").get<std::vector<int>>();

    if (j.contains("masks") && !j.at("masks").is_null()) {
      const auto& m = j.at("masks");
      SplitMasks masks;
      for (const char* key : {"train", "val", "test"}) {
        if (!m.contains(key)) throw ParseError(std::string("masks missing '") + key + "'");
      }
      masks.train = index_list<Index>(m.at("train"), "train");
      masks.val = index_list<Index>(m.at("val"), "val");
      masks.test = index_list<Index>(m.at("test"), "test");
      out.masks = std::move(masks);
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": schema violation: " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    validate(g);
    if (out.masks) validate(*out.masks, g.topology.num_nodes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return out;
}

void save_canonical(const std::filesystem::path& path, const Graph& g,
                    const std::optional<SplitMasks>& masks) {
  validate(g);
  json j;
  j["num_nodes"] = g.topology.num_nodes;
  j["num_classes"] = g.num_classes;
  json edges = json::array();
  for (const Edge& e : g.topology.edges) edges.push_back({e.u, e.v});
  j["edges"] = std::move(edges);
  json feats = json::array();
  for (Index r = 0; r < g.features.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < g.features.cols(); ++c) row.push_back(g.features(r, c));
    feats.push_back(std::move(row));
  }
  j["features"] = std::move(feats);
  j["labels"] = g.labels;
  if (masks) {
    j["masks"] = {{"train", masks->train}, {"val", masks->val}, {"test", masks->test}};
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

SplitMasks make_split(const Graph& g, std::uint64_t seed, const SplitSizes& sizes) {
  const Index n = g.num_nodes();
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(derive_seed(seed, "split"));
  shuffle(order, rng);

  std::vector<Index> per_class(static_cast<std::size_t>(g.num_classes), 0);
  for (const int label : g.labels) ++per_class[static_cast<std::size_t>(label)];
  for (int c = 0; c < g.num_classes; ++c) {
    if (per_class[static_cast<std::size_t>(c)] < sizes.train_per_class) {
      throw std::invalid_argument(
          "class " + std::to_string(c) + " has " +
          std::to_string(per_class[static_cast<std::size_t>(c)]) +
          " nodes, need at least " + std::to_string(sizes.train_per_class) +
          " for the training split");
    }
  }
  const Index needed =
      sizes.train_per_class * g.num_classes + sizes.val + sizes.test;
  if (n < needed) {
    throw std::invalid_argument("graph has " + std::to_string(n) +
                                " nodes, split needs " + std::to_string(needed));
  }

  SplitMasks masks;
  std::vector<Index> taken(static_cast<std::size_t>(g.num_classes), 0);
  std::vector<Index> rest;
  rest.reserve(order.size());
  for (const Index node : order) {
    const auto c = static_cast<std::size_t>(g.labels[static_cast<std::size_t>(node)]);
    if (taken[c] < sizes.train_per_class) {
      ++taken[c];
      masks.train.push_back(node);
    } else {
      rest.push_back(node);
    }
  }
  masks.val.assign(rest.begin(), rest.begin() + sizes.val);
  masks.test.assign(rest.begin() + sizes.val, rest.begin() + sizes.val + sizes.test);
  return masks;
}

}  // namespace polygcl
