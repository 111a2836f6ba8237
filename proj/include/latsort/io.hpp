#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "latsort/types.hpp"

namespace latsort {

/// Decimal form with 17 significant digits; reading it back gives the
/// identical double.
std::string format_double(double v);

/// JSON string literal for `s`, quotes included.
std::string json_quote(const std::string& s);

/// Appends `[v0,v1,...]` using `format_double`.
void append_array(std::string& out, const std::vector<double>& values);

// Token-set file: JSON lines, {"id": string (optional), "tokens": [[f,...],...]}.
std::vector<TokenSet> parse_token_sets(std::istream& in, const std::string& source = "<stream>");
std::vector<TokenSet> read_token_sets(const std::filesystem::path& path);
std::string token_set_line(const TokenSet& set);
void write_token_sets(const std::filesystem::path& path, const std::vector<TokenSet>& sets);

// Sorted-sequence file: token-set lines plus "keys" (when present) and
// "order" (source indices). Readable as a token-set file.
std::string sequence_line(const SortedSequence& seq, const std::string& id = {});
void write_sequences(const std::filesystem::path& path, const std::vector<SortedSequence>& seqs,
                     const std::vector<std::string>& ids = {});

// Graph file: JSON lines, {"nodes": [[f,...],...], "edges": [[u,v],...], "directed": bool}.
std::vector<Graph> parse_graphs(std::istream& in, const std::string& source = "<stream>");
std::vector<Graph> read_graphs(const std::filesystem::path& path);
std::string graph_line(const Graph& g);
void write_graphs(const std::filesystem::path& path, const std::vector<Graph>& graphs);

/// Writes `content` to `path`, throwing on failure.
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace latsort
