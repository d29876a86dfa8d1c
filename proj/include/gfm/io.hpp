#pragma once

// File boundary: CSV ingestion, graph export (json/graphml/dot) and the
// benchmark CSV writers.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gfm/bench.hpp"
#include "gfm/pipeline.hpp"

namespace gfm {

/// Header row of p names, then n numeric rows. Columns are mean-centered.
/// Constant columns are accepted with a warning written to `warnings`.
Data ingest_csv(const std::filesystem::path& path, std::ostream& warnings);
Data parse_csv(std::string_view text, std::ostream& warnings);

enum class GraphFormat { kJson, kGraphml, kDot };

std::string_view to_string(GraphFormat f);
GraphFormat parse_graph_format(std::string_view name);

/// Edges are the upper-triangle entries of `result.adjacency`, emitted in
/// lexicographic (i, j) order with their signed conditional correlation.
std::string render_graph(const LearnResult& result,
                         const std::vector<std::string>& names,
                         const ModelConfig& cfg, GraphFormat format);

void export_graph(const LearnResult& result,
                  const std::vector<std::string>& names,
                  const ModelConfig& cfg, GraphFormat format,
                  const std::filesystem::path& path);

struct GraphDocument {
  std::vector<std::string> names;
  BoolMatrix adjacency;
  Matrix weights;  // cond_corr on edges, 0 elsewhere
};

/// Parses a JSON export back.
GraphDocument read_graph_json(const std::filesystem::path& path);

std::string render_auc_csv(const BenchReport& report);
std::string render_curve_csv(const BenchReport& report);
std::string render_sensitivity_csv(const std::vector<SensitivityRow>& rows);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace gfm
