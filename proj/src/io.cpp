#include "latsort/io.hpp"

#include <charconv>
#include <fstream>
#include "json.hpp"
#include <sstream>

namespace latsort {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string json_quote(const std::string& s) { return json(s).dump(); }

void append_array(std::string& out, const std::vector<double>& values) {
  out.push_back('[');
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(',');
    out += format_double(values[i]);
  }
  out.push_back(']');
}

namespace {

void append_rows(std::string& out, const std::vector<Token>& rows) {
  out.push_back('[');
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out.push_back(',');
    append_array(out, rows[i]);
  }
  out.push_back(']');
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::vector<Token> rows_from_json(const json& arr) {
  if (!arr.is_array()) throw Error("expected an array of arrays");
  std::vector<Token> rows;
  rows.reserve(arr.size());
  for (const auto& r : arr) {
    if (!r.is_array()) throw Error("expected an array of numbers");
    Token t;
    t.reserve(r.size());
    for (const auto& v : r) {
      if (!v.is_number()) throw Error("non-numeric token component");
      t.push_back(v.get<double>());
    }
    rows.push_back(std::move(t));
  }
  return rows;
}

template <class F>
void for_each_line(std::istream& in, const std::string& source, F&& f) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      f(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(where(source, lineno) + "malformed line: " + e.what());
    } catch (const Error& e) {
      throw Error(where(source, lineno) + e.what());
    }
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<TokenSet> parse_token_sets(std::istream& in, const std::string& source) {
  std::vector<TokenSet> sets;
  for_each_line(in, source, [&](const json& obj) {
    if (!obj.is_object() || !obj.contains("tokens")) throw Error("missing \"tokens\"");
    std::string id;
    if (obj.contains("id")) id = obj.at("id").get<std::string>();
    sets.emplace_back(rows_from_json(obj.at("tokens")), std::move(id));
  });
  return sets;
}

std::vector<TokenSet> read_token_sets(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_token_sets(in, path.string());
}

std::string token_set_line(const TokenSet& set) {
  std::string out = "{";
  if (!set.id().empty()) out += "\"id\":" + json_quote(set.id()) + ",";
  out += "\"tokens\":";
  append_rows(out, set.tokens());
  out += "}";
  return out;
}

void write_token_sets(const std::filesystem::path& path, const std::vector<TokenSet>& sets) {
  std::string content;
  for (const auto& s : sets) content += token_set_line(s) + "\n";
  write_text(path, content);
}

std::string sequence_line(const SortedSequence& seq, const std::string& id) {
  std::string out = "{";
  if (!id.empty()) out += "\"id\":" + json_quote(id) + ",";
  out += "\"tokens\":";
  append_rows(out, seq.rows);
  if (seq.keys) {
    out += ",\"keys\":";
    append_array(out, *seq.keys);
  }
  if (!seq.order.empty()) {
    out += ",\"order\":[";
    for (std::size_t i = 0; i < seq.order.size(); ++i) {
      if (i) out.push_back(',');
      out += std::to_string(seq.order[i]);
    }
    out += "]";
  }
  out += "}";
  return out;
}

void write_sequences(const std::filesystem::path& path, const std::vector<SortedSequence>& seqs,
                     const std::vector<std::string>& ids) {
  std::string content;
  for (std::size_t i = 0; i < seqs.size(); ++i)
    content += sequence_line(seqs[i], i < ids.size() ? ids[i] : std::string{}) + "\n";
  write_text(path, content);
}

std::vector<Graph> parse_graphs(std::istream& in, const std::string& source) {
  std::vector<Graph> graphs;
  for_each_line(in, source, [&](const json& obj) {
    if (!obj.is_object() || !obj.contains("nodes") || !obj.contains("edges"))
      throw Error("graph line needs \"nodes\" and \"edges\"");
    std::vector<Edge> edges;
    for (const auto& e : obj.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw Error("edge must be a [u, v] pair");
      edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
    }
    const bool directed = obj.value("directed", false);
    graphs.emplace_back(rows_from_json(obj.at("nodes")), std::move(edges), directed);
  });
  return graphs;
}

std::vector<Graph> read_graphs(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_graphs(in, path.string());
}

std::string graph_line(const Graph& g) {
  std::string out = "{\"nodes\":";
  append_rows(out, g.nodes());
  out += ",\"edges\":[";
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    if (i) out.push_back(',');
    out += "[" + std::to_string(g.edges()[i].first) + "," +
           std::to_string(g.edges()[i].second) + "]";
  }
  out += "],\"directed\":";
  out += g.directed() ? "true" : "false";
  out += "}";
  return out;
}

void write_graphs(const std::filesystem::path& path, const std::vector<Graph>& graphs) {
  std::string content;
  for (const auto& g : graphs) content += graph_line(g) + "\n";
  write_text(path, content);
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace latsort
