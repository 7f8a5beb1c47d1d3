#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <string>

#include "qamht/errors.hpp"
#include "qamht/graph.hpp"

namespace qamht {

nlohmann::json to_json(const WeightedGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : g.edges()) edges.push_back({a, b});
  return {{"n", g.size()}, {"weights", g.weights()}, {"edges", std::move(edges)}};
}

WeightedGraph graph_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    auto weights = j.at("weights").get<std::vector<double>>();
    if (weights.size() != n) {
      throw InputError("graph JSON: \"weights\" has " + std::to_string(weights.size()) +
                       " entries but n = " + std::to_string(n));
    }
    std::vector<Edge> edges;
    for (const auto& e : j.value("edges", nlohmann::json::array())) {
      if (!e.is_array() || e.size() != 2) {
        throw InputError("graph JSON: every edge must be a pair [i, j]");
      }
      edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
    }
    return WeightedGraph(std::move(weights), std::move(edges));
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("graph JSON: ") + ex.what());
  }
}

namespace {

[[noreturn]] void dimacs_error(std::size_t line, const std::string& what) {
  throw InputError("graph text line " + std::to_string(line) + ": " + what);
}

template <class T>
T parse_token(const std::string& tok, std::size_t line) {
  T value{};
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) dimacs_error(line, "cannot parse '" + tok + "'");
  return value;
}

// Line and column of a byte offset, for JSON error messages.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

WeightedGraph parse_graph_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  std::size_t n = 0;
  bool have_header = false;
  std::vector<double> weights;
  std::vector<bool> weighted;
  std::vector<Edge> edges;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty() || tok[0] == "c") continue;
    if (tok[0] == "p") {
      // Accept "p <n> <m>" and "p <format> <n> <m>".
      if (have_header) dimacs_error(line, "duplicate 'p' line");
      if (tok.size() == 3) {
        n = parse_token<std::size_t>(tok[1], line);
      } else if (tok.size() == 4) {
        n = parse_token<std::size_t>(tok[2], line);
      } else {
        dimacs_error(line, "expected 'p [format] <n> <m>'");
      }
      have_header = true;
      weights.assign(n, 1.0);
      weighted.assign(n, false);
      continue;
    }
    if (!have_header) dimacs_error(line, "'" + tok[0] + "' before the 'p' line");
    if (tok[0] == "n" || tok[0] == "v") {
      if (tok.size() != 3) dimacs_error(line, "expected 'n <i> <w>'");
      const auto i = parse_token<std::size_t>(tok[1], line);
      if (i < 1 || i > n) dimacs_error(line, "vertex " + tok[1] + " outside [1," + std::to_string(n) + "]");
      weights[i - 1] = parse_token<double>(tok[2], line);
      weighted[i - 1] = true;
    } else if (tok[0] == "e") {
      if (tok.size() != 3) dimacs_error(line, "expected 'e <i> <j>'");
      const auto a = parse_token<std::size_t>(tok[1], line);
      const auto b = parse_token<std::size_t>(tok[2], line);
      if (a < 1 || a > n || b < 1 || b > n) dimacs_error(line, "edge endpoint outside [1," + std::to_string(n) + "]");
      edges.emplace_back(a - 1, b - 1);
    } else {
      dimacs_error(line, "unknown line type '" + tok[0] + "'");
    }
  }
  if (!have_header) throw InputError("graph text: missing 'p' line");
  if (auto it = std::find(weighted.begin(), weighted.end(), false); it != weighted.end()) {
    throw InputError("graph text: vertex " + std::to_string(it - weighted.begin() + 1) +
                     " has no 'n' weight line");
  }
  return WeightedGraph(std::move(weights), std::move(edges));
}

WeightedGraph parse_graph(std::string_view text) {
  const auto first = std::find_if(text.begin(), text.end(),
                                  [](char c) { return !std::isspace(static_cast<unsigned char>(c)); });
  if (first != text.end() && *first == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
      const auto [line, col] = locate(text, ex.byte);
      throw InputError("graph JSON line " + std::to_string(line) + ", column " + std::to_string(col) +
                       ": " + ex.what());
    }
    return graph_from_json(j);
  }
  return parse_graph_dimacs(text);
}

std::string to_dimacs(const WeightedGraph& g) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << "p " << g.size() << ' ' << g.edges().size() << '\n';
  for (Vertex v = 0; v < g.size(); ++v) out << "n " << v + 1 << ' ' << g.weight(v) << '\n';
  for (const auto& [a, b] : g.edges()) out << "e " << a + 1 << ' ' << b + 1 << '\n';
  return out.str();
}

}  // namespace qamht
