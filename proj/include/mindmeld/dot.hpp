#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "mindmeld/json_util.hpp"
#include "mindmeld/mindmap.hpp"

namespace mindmeld {

/// Shortest fixed-point text on the 1e-9 grid: 2 -> "2", 0.1 -> "0.1".
inline std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.9f", json_util::quantize(value));
  std::string text(buffer);
  if (auto dot = text.find('.'); dot != std::string::npos) {
    text.erase(text.find_last_not_of('0') + 1);
    if (text.back() == '.') text.pop_back();
  }
  if (text == "-0") text = "0";
  return text;
}

namespace detail {

inline std::string dot_quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

/// Undirected DOT graph, nodes and edges sorted by label for stable output.
inline std::string to_dot(const MindMap& map) {
  if (map.empty()) return "graph G { }\n";

  std::vector<const EntityCell*> cells;
  for (const auto& [id, cell] : map.cells()) cells.push_back(&cell);
  std::sort(cells.begin(), cells.end(), [](const EntityCell* x, const EntityCell* y) { return x->label < y->label; });

  std::vector<std::tuple<Label, Label, double>> edges;
  for (const auto& [k, edge] : map.associations()) {
    Label a = map.cell(edge.a)->label;
    Label b = map.cell(edge.b)->label;
    if (b < a) std::swap(a, b);
    edges.emplace_back(std::move(a), std::move(b), edge.weight);
  }
  std::sort(edges.begin(), edges.end());

  std::string out = "graph G {\n";
  for (const EntityCell* cell : cells) {
    std::string quoted = detail::dot_quote(cell->label);
    std::string caption = quoted.substr(0, quoted.size() - 1) + "\\nact=" + format_number(cell->activation) + "\"";
    out += "  " + quoted + " [label=" + caption + "];\n";
  }
  for (const auto& [a, b, weight] : edges) {
    out += "  " + detail::dot_quote(a) + " -- " + detail::dot_quote(b) + " [weight=" + format_number(weight) + "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace mindmeld
