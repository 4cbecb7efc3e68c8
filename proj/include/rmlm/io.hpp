#pragma once

// Text formats: CSV matrices, JSON model files and DOT graphs. Node labels
// are 1-based in every format.

#include "rmlm/core.hpp"
#include "rmlm/graph.hpp"
#include "rmlm/mlcm.hpp"

#include <json.hpp>

#include <cerrno>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace rmlm::io {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw InvalidInput("cannot parse '" + t + "' as a number at " + where);
  return v;
}

}  // namespace detail

/// Rows of comma-separated numbers; blank lines and lines starting with '#'
/// are skipped.
inline Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(t);
    std::string cell;
    while (std::getline(ss, cell, ','))
      row.push_back(detail::parse_double(cell, "line " + std::to_string(lineno) + ", column " +
                                                   std::to_string(row.size() + 1)));
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidInput("line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                         " entries, expected " + std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("matrix file contains no rows");
  Matrix m(Eigen::Index(rows.size()), Eigen::Index(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(Eigen::Index(r), Eigen::Index(c)) = rows[r][c];
  return m;
}

inline Matrix parse_matrix_csv(const std::string& text) {
  std::istringstream in(text);
  return read_matrix_csv(in);
}

/// Full precision: reading back yields the identical matrix.
inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
}

inline std::string matrix_csv(const Matrix& m) {
  std::ostringstream out;
  write_matrix_csv(out, m);
  return out.str();
}

/// "1,3,2" -> {0, 2, 1}. Entries must lie in 1..d.
inline std::vector<Node> parse_node_list(const std::string& text, std::size_t d) {
  std::vector<Node> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const std::string t = detail::trim(cell);
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || v < 1 || std::size_t(v) > d)
      throw InvalidInput("node list entry '" + t + "' is not a node in 1.." + std::to_string(d));
    out.push_back(Node(v - 1));
  }
  if (out.empty()) throw InvalidInput("node list is empty");
  return out;
}

inline nlohmann::json model_to_json(const WeightedModel& m) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : m.dag().edges()) edges.push_back({e.from + 1, e.to + 1, m.weight(e.from, e.to)});
  std::vector<double> scales;
  for (Node i = 0; i < m.size(); ++i) scales.push_back(m.weight(i, i));
  return {{"alpha", m.alpha()}, {"d", m.size()}, {"edges", edges}, {"noise_scales", scales}};
}

inline WeightedModel model_from_json(const nlohmann::json& j) {
  try {
    const double alpha = j.at("alpha").get<double>();
    const auto d = j.at("d").get<std::size_t>();
    rmlm::detail::require(d >= 1, "model must have at least one node");
    const auto& scales = j.at("noise_scales");
    rmlm::detail::require(scales.is_array() && scales.size() == d,
                          "noise_scales must list one value per node");
    Matrix c = Matrix::Zero(Eigen::Index(d), Eigen::Index(d));
    for (std::size_t i = 0; i < d; ++i) c(Eigen::Index(i), Eigen::Index(i)) = scales[i].get<double>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      rmlm::detail::require(e.is_array() && e.size() == 3, "each edge must be [from, to, weight]");
      const auto k = e[0].get<long>(), i = e[1].get<long>();
      rmlm::detail::require(k >= 1 && i >= 1 && std::size_t(k) <= d && std::size_t(i) <= d,
                            "edge endpoint outside 1.." + std::to_string(d));
      edges.push_back({Node(k - 1), Node(i - 1)});
      c(Eigen::Index(k - 1), Eigen::Index(i - 1)) = e[2].get<double>();
    }
    return WeightedModel(Dag(d, std::move(edges)), std::move(c), alpha);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed model file: ") + e.what());
  }
}

inline WeightedModel read_model_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

inline void write_model_json(std::ostream& out, const WeightedModel& m) { out << model_to_json(m).dump(2) << '\n'; }

/// DOT digraph; edge labels carry weights with 6 significant digits.
inline void write_dot(std::ostream& out, const Dag& g, const std::optional<Matrix>& weights = std::nullopt) {
  out << "digraph rmlm {\n";
  for (Node i = 0; i < g.size(); ++i) out << "  " << i + 1 << ";\n";
  for (const Edge& e : g.edges()) {
    out << "  " << e.from + 1 << " -> " << e.to + 1;
    if (weights) out << " [label=\"" << format_double((*weights)(Eigen::Index(e.from), Eigen::Index(e.to)), 6) << "\"]";
    out << ";\n";
  }
  out << "}\n";
}

inline void write_dot(std::ostream& out, const WeightedModel& m) { write_dot(out, m.dag(), m.coefficients()); }

}  // namespace rmlm::io
