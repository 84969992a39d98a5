#include "regx/dataset_io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "regx/errors.hpp"
#include "regx/text_io.hpp"

namespace regx {

namespace {

using io::Json;

void append_ints(std::string& out, const std::vector<int>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  out += ']';
}

std::string header_line(const GraphDataset& ds) {
  std::string out = "{\"dataset_name\":" + io::quote(ds.name) +
                    ",\"seed\":" + std::to_string(ds.seed) +
                    ",\"generator_version\":" + io::quote(ds.generator_version) +
                    ",\"splits\":{\"train\":";
  append_ints(out, ds.splits.train);
  out += ",\"explainer_train\":";
  append_ints(out, ds.splits.explainer_train);
  out += ",\"explainer_test\":";
  append_ints(out, ds.splits.explainer_test);
  out += "}}";
  return out;
}

std::string graph_line(const Graph& g) {
  const auto& x = g.features();
  std::string out = "{\"id\":" + std::to_string(g.id()) +
                    ",\"n\":" + std::to_string(g.num_nodes()) +
                    ",\"d\":" + std::to_string(g.feature_dim()) +
                    ",\"label\":" + io::format_real(g.label()) + ",\"x\":[";
  bool first = true;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (!first) out += ',';
      first = false;
      out += io::format_real(x(i, j));
    }
  }
  out += "],\"edges\":[";
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    if (k) out += ',';
    out += '[' + std::to_string(g.edges()[k].u) + ',' +
           std::to_string(g.edges()[k].v) + ']';
  }
  out += "],\"gt_edges\":";
  if (g.gt_mask()) {
    out += '[';
    bool firstgt = true;
    for (const auto& e : g.edges()) {
      const double w = (*g.gt_mask())(e.u, e.v);
      if (w == 0.0) continue;
      if (!firstgt) out += ',';
      firstgt = false;
      out += '[' + std::to_string(e.u) + ',' + std::to_string(e.v) + ',' +
             io::format_real(w) + ']';
    }
    out += ']';
  } else {
    out += "null";
  }
  if (!g.node_weights().empty()) {
    out += ",\"node_weights\":";
    io::append_reals(out, g.node_weights());
  }
  out += '}';
  return out;
}

std::vector<int> int_list(const Json& j) {
  std::vector<int> out;
  for (const auto& v : j) out.push_back(v.get<int>());
  return out;
}

Graph parse_graph(const Json& j) {
  const int id = j.at("id").get<int>();
  const int n = j.at("n").get<int>();
  const int d = j.at("d").get<int>();
  if (n <= 0 || d < 0) {
    throw ParseError("graph " + std::to_string(id) + " has invalid shape");
  }
  const auto& xs = j.at("x");
  if (xs.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(d)) {
    throw ParseError("graph " + std::to_string(id) + ": x has " +
                     std::to_string(xs.size()) + " entries, expected n*d");
  }
  Matrix x(n, d);
  std::size_t k = 0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < d; ++c) x(r, c) = xs[k++].get<double>();
  }
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (e.size() != 2) throw ParseError("edge entry must be [i, j]");
    edges.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  std::optional<EdgeMask> gt;
  if (const auto it = j.find("gt_edges"); it != j.end() && !it->is_null()) {
    Matrix m = Matrix::Zero(n, n);
    for (const auto& e : *it) {
      if (e.size() != 3) throw ParseError("gt_edges entry must be [i, j, w]");
      const int a = e[0].get<int>();
      const int b = e[1].get<int>();
      if (a < 0 || b < 0 || a >= n || b >= n) {
        throw ParseError("gt edge index out of range");
      }
      m(a, b) = e[2].get<double>();
      m(b, a) = m(a, b);
    }
    gt = EdgeMask(std::move(m));
  }
  std::vector<double> node_weights;
  if (const auto it = j.find("node_weights"); it != j.end()) {
    node_weights = it->get<std::vector<double>>();
  }
  return Graph::from_edges(id, std::move(x), edges, j.at("label").get<double>(),
                           std::move(gt), std::move(node_weights));
}

}  // namespace

std::string serialize_dataset(const GraphDataset& ds) {
  std::string out = header_line(ds);
  out += '\n';
  for (const auto& g : ds.graphs) {
    out += graph_line(g);
    out += '\n';
  }
  return out;
}

GraphDataset parse_dataset(const std::vector<std::string>& lines,
                           const std::string& source,
                           bool recompute_invalid_splits) {
  GraphDataset ds;
  bool have_header = false;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto& line = lines[ln];
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(ln + 1);
    try {
      const Json j = Json::parse(line);
      if (!have_header) {
        ds.name = j.at("dataset_name").get<std::string>();
        ds.seed = j.at("seed").get<std::uint64_t>();
        ds.generator_version = j.at("generator_version").get<std::string>();
        const auto& s = j.at("splits");
        ds.splits.train = int_list(s.at("train"));
        ds.splits.explainer_train = int_list(s.at("explainer_train"));
        ds.splits.explainer_test = int_list(s.at("explainer_test"));
        have_header = true;
      } else {
        ds.graphs.push_back(parse_graph(j));
      }
    } catch (const Json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const Error& e) {
      throw ParseError(where + ": invalid graph record: " + e.what());
    }
  }
  if (!have_header) {
    throw ParseError(source + ": missing header record");
  }
  const int n = static_cast<int>(ds.graphs.size());
  try {
    check_splits(ds.splits, n);
  } catch (const ValidationError& e) {
    if (!recompute_invalid_splits) {
      throw ParseError(source + ": header splits: " + e.what());
    }
    ds.splits = default_splits(n);
  }
  return ds;
}

void write_dataset(const GraphDataset& ds, const std::filesystem::path& path) {
  io::write_file(path, serialize_dataset(ds));
}

GraphDataset read_dataset(const std::filesystem::path& path,
                          bool recompute_invalid_splits) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open dataset " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::move(line));
  return parse_dataset(lines, path.string(), recompute_invalid_splits);
}

std::string serialize_explanations(const std::vector<Explanation>& expls) {
  std::string out;
  for (const auto& e : expls) {
    out += "{\"graph_id\":" + std::to_string(e.graph_id()) + ",\"edges\":[";
    for (std::size_t k = 0; k < e.scores().size(); ++k) {
      const auto& s = e.scores()[k];
      if (k) out += ',';
      out += '[' + std::to_string(s.i) + ',' + std::to_string(s.j) + ',' +
             io::format_real(s.weight) + ']';
    }
    out += "]}\n";
  }
  return out;
}

void write_explanations(const std::vector<Explanation>& expls,
                        const std::filesystem::path& path) {
  io::write_file(path, serialize_explanations(expls));
}

std::vector<Explanation> read_explanations(const std::filesystem::path& path,
                                           const GraphDataset& ds) {
  std::unordered_map<int, const Graph*> by_id;
  for (const auto& g : ds.graphs) by_id.emplace(g.id(), &g);
  std::vector<Explanation> out;
  for (const auto& j : io::read_json_lines(path)) {
    try {
      const int gid = j.at("graph_id").get<int>();
      const auto it = by_id.find(gid);
      if (it == by_id.end()) {
        throw ParseError("explanation refers to unknown graph " +
                         std::to_string(gid));
      }
      const Graph& g = *it->second;
      Matrix m = Matrix::Zero(g.num_nodes(), g.num_nodes());
      for (const auto& e : j.at("edges")) {
        const int a = e.at(0).get<int>();
        const int b = e.at(1).get<int>();
        if (a < 0 || b < 0 || a >= g.num_nodes() || b >= g.num_nodes()) {
          throw ParseError("explanation edge out of range");
        }
        m(a, b) = e.at(2).get<double>();
        m(b, a) = m(a, b);
      }
      out.emplace_back(g, EdgeMask(std::move(m)));
    } catch (const Json::exception& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace regx
