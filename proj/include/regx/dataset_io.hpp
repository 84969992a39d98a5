#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "regx/graph.hpp"

namespace regx {

// Dataset file: line-delimited JSON. Line 1 is a header
//   {"dataset_name", "seed", "generator_version", "splits"}
// and every following line is one graph
//   {"id", "n", "d", "label", "x", "edges", "gt_edges"[, "node_weights"]}
// with x flattened row-major, edges as [i, j] (i < j) and gt_edges as
// [i, j, w] for the non-zero ground-truth entries (null when the graph has no
// ground truth). Reals are written with 17 significant digits.

std::string serialize_dataset(const GraphDataset& ds);
/// With recompute_invalid_splits, header splits that do not fit the graph
/// count are replaced by default_splits instead of raising ParseError.
GraphDataset parse_dataset(const std::vector<std::string>& lines,
                           const std::string& source = "<memory>",
                           bool recompute_invalid_splits = false);

void write_dataset(const GraphDataset& ds, const std::filesystem::path& path);
GraphDataset read_dataset(const std::filesystem::path& path,
                          bool recompute_invalid_splits = false);

// Explanation records: {"graph_id", "edges": [[i, j, w], ...]}.
std::string serialize_explanations(const std::vector<Explanation>& expls);
void write_explanations(const std::vector<Explanation>& expls,
                        const std::filesystem::path& path);

/// Rebuilds explanations against the graphs of `ds` they refer to.
std::vector<Explanation> read_explanations(const std::filesystem::path& path,
                                           const GraphDataset& ds);

}  // namespace regx
