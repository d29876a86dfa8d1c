#include "gfm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace gfm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line, std::size_t column,
                              const std::string& what) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) +
                                          ", column " + std::to_string(column) +
                                          ": " + what);
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Data parse_csv(std::string_view text, std::ostream& warnings) {
  std::vector<std::string> names;
  std::vector<double> values;
  std::size_t line_no = 0, rows = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (names.empty()) {
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (fields[c].empty()) parse_error(line_no, c + 1, "empty column name");
        names.emplace_back(fields[c]);
      }
      if (names.size() < 2) parse_error(line_no, 1, "need at least 2 columns");
      continue;
    }
    if (fields.size() != names.size()) {
      parse_error(line_no, std::min(fields.size(), names.size()) + 1,
                  "expected " + std::to_string(names.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string_view f = fields[c];
      double v = 0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) {
        parse_error(line_no, c + 1, "not a number: '" + std::string(f) + "'");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteValue,
                    "line " + std::to_string(line_no) + ", column " +
                        std::to_string(c + 1) + ": non-finite value");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (names.empty()) throw Error(ErrorCode::kParseError, "missing header row");
  if (rows < 2) {
    throw Error(ErrorCode::kTooFewRows,
                "need at least 2 data rows, got " + std::to_string(rows));
  }
  const Index n = Index(rows), p = Index(names.size());
  Matrix x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                            Eigen::RowMajor>>(values.data(), n, p);
  x.rowwise() -= x.colwise().mean();
  for (Index j = 0; j < p; ++j) {
    if (x.col(j).cwiseAbs().maxCoeff() == 0.0) {
      warnings << "warning: column '" << names[std::size_t(j)]
               << "' is constant\n";
    }
  }
  return Data(std::move(x), std::move(names));
}

Data ingest_csv(const std::filesystem::path& path, std::ostream& warnings) {
  return parse_csv(read_file(path), warnings);
}

std::string_view to_string(GraphFormat f) {
  switch (f) {
    case GraphFormat::kJson: return "json";
    case GraphFormat::kGraphml: return "graphml";
    case GraphFormat::kDot: return "dot";
  }
  return "unknown";
}

GraphFormat parse_graph_format(std::string_view name) {
  for (GraphFormat f : {GraphFormat::kJson, GraphFormat::kGraphml, GraphFormat::kDot}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorCode::kUsage, "unknown format '" + std::string(name) + "'");
}

std::string render_graph(const LearnResult& result,
                         const std::vector<std::string>& names,
                         const ModelConfig& cfg, GraphFormat format) {
  const Index p = result.adjacency.rows();
  if (Index(names.size()) != p) {
    throw Error(ErrorCode::kInvalidArgument, "one name per node required");
  }
  struct Edge {
    Index i, j;
    double w;
  };
  std::vector<Edge> edges;
  for (Index i = 0; i < p; ++i)
    for (Index j = i + 1; j < p; ++j)
      if (result.adjacency(i, j)) edges.push_back({i, j, result.cond_corr(i, j)});

  std::string out;
  switch (format) {
    case GraphFormat::kJson: {
      nlohmann::ordered_json doc;
      doc["nodes"] = names;
      auto& e = doc["edges"] = nlohmann::ordered_json::array();
      for (const Edge& ed : edges) e.push_back({ed.i, ed.j, ed.w});
      doc["model"] = {{"kind", to_string(cfg.model)},
                      {"nu", cfg.generator.is_gaussian() ? nlohmann::ordered_json()
                                                         : nlohmann::ordered_json(cfg.generator.nu)},
                      {"rank", cfg.rank},
                      {"lambda", cfg.penalty.lambda},
                      {"epsilon", cfg.penalty.epsilon},
                      {"tol", cfg.tol}};
      const Vector d = result.theta.diagonal();
      const std::vector<double> diag(d.data(), d.data() + p);
      doc["theta_diagonal"] = diag;
      const auto& tr = result.trace;
      doc["trace"] = {{"status", to_string(tr.status)},
                      {"iterations", std::max(0, tr.iterations())}};
      if (tr.records.empty()) {
        doc["trace"]["final_objective"] = nullptr;
        doc["trace"]["final_grad_norm"] = nullptr;
      } else {
        doc["trace"]["final_objective"] = tr.last().objective;
        doc["trace"]["final_grad_norm"] = tr.last().grad_norm;
      }
      out = doc.dump(2) + "\n";
      break;
    }
    case GraphFormat::kGraphml: {
      out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
      out += "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
      out += "  <key id=\"name\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n";
      out += "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n";
      out += "  <graph id=\"G\" edgedefault=\"undirected\">\n";
      for (Index i = 0; i < p; ++i) {
        out += "    <node id=\"n" + std::to_string(i) + "\"><data key=\"name\">" +
               xml_escape(names[std::size_t(i)]) + "</data></node>\n";
      }
      for (const Edge& ed : edges) {
        out += "    <edge source=\"n" + std::to_string(ed.i) + "\" target=\"n" +
               std::to_string(ed.j) + "\"><data key=\"weight\">" + num(ed.w) +
               "</data></edge>\n";
      }
      out += "  </graph>\n</graphml>\n";
      break;
    }
    case GraphFormat::kDot: {
      out += "graph G {\n";
      for (Index i = 0; i < p; ++i) out += "  " + dot_quote(names[std::size_t(i)]) + ";\n";
      for (const Edge& ed : edges) {
        char label[32];
        std::snprintf(label, sizeof label, "%.3f", ed.w);
        out += "  " + dot_quote(names[std::size_t(ed.i)]) + " -- " +
               dot_quote(names[std::size_t(ed.j)]) + " [weight=" + num(ed.w) +
               ", label=\"" + label + "\"];\n";
      }
      out += "}\n";
      break;
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  f.write(text.data(), std::streamsize(text.size()));
  f.close();
  if (!f) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

void export_graph(const LearnResult& result,
                  const std::vector<std::string>& names,
                  const ModelConfig& cfg, GraphFormat format,
                  const std::filesystem::path& path) {
  write_text(path, render_graph(result, names, cfg, format));
}

GraphDocument read_graph_json(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  GraphDocument g;
  try {
    g.names = doc.at("nodes").get<std::vector<std::string>>();
    const Index p = Index(g.names.size());
    g.adjacency = BoolMatrix::Constant(p, p, false);
    g.weights = Matrix::Zero(p, p);
    for (const auto& e : doc.at("edges")) {
      const Index i = e.at(0).get<Index>(), j = e.at(1).get<Index>();
      if (i < 0 || j < 0 || i >= p || j >= p || i == j) {
        throw Error(ErrorCode::kParseError, "edge index out of range");
      }
      g.adjacency(i, j) = g.adjacency(j, i) = true;
      g.weights(i, j) = g.weights(j, i) = e.at(2).get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  return g;
}

std::string render_auc_csv(const BenchReport& report) {
  std::string out = "model,trial,auc\n";
  for (const auto& m : report.models)
    for (std::size_t t = 0; t < m.aucs.size(); ++t)
      out += m.label + "," + std::to_string(t) + "," + num(m.aucs[t]) + "\n";
  return out;
}

std::string render_curve_csv(const BenchReport& report) {
  std::string out = "model,fpr,mean_tpr\n";
  for (const auto& m : report.models)
    for (std::size_t g = 0; g < report.fpr_grid.size(); ++g)
      out += m.label + "," + num(report.fpr_grid[g]) + "," + num(m.mean_tpr[g]) + "\n";
  return out;
}

std::string render_sensitivity_csv(const std::vector<SensitivityRow>& rows) {
  std::string out = "model,lambda,rank,mean_auc,stderr,failures\n";
  for (const auto& r : rows) {
    out += r.label + "," + num(r.lambda) + "," + std::to_string(r.rank) + "," +
           num(r.mean_auc) + "," + num(r.stderr_auc) + "," +
           std::to_string(r.failures) + "\n";
  }
  return out;
}

}  // namespace gfm
