#pragma once

// Plain-text key/value configuration.
//
//   # comment
//   n_sites  = 7
//   lambda   = 1
//   pattern  = matryoshka          # perfect_transfer | matryoshka | custom
//   j_x      = 0, 1.5, 0, 1.5      # custom only, n_sites-1 entries
//   j_y      = 1.5, 0, 1.5, 0      # custom only
//   b_fields = 0, 0, 0, 0, 0       # n_sites entries, optional (defaults to zeros)
//
// Whitespace around keys and values is ignored, '#' starts a comment,
// duplicate keys are rejected.

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "chain.hpp"
#include "errors.hpp"

namespace matryoshka {

using KeyValues = std::map<std::string, std::string>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& key) {
  text = detail::trim(text);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v))
    throw ValidationError("key '" + key + "': '" + std::string(text) + "' is not a finite number");
  return v;
}

inline int parse_int(std::string_view text, const std::string& key) {
  text = detail::trim(text);
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ValidationError("key '" + key + "': '" + std::string(text) + "' is not an integer");
  return v;
}

inline std::vector<double> parse_double_list(std::string_view text, const std::string& key) {
  std::vector<double> out;
  text = detail::trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_double(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start), key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string format_double_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

inline KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ValidationError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key(detail::trim(line.substr(0, eq)));
    if (key.empty()) throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
    if (kv.count(key)) throw ValidationError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    kv.emplace(std::move(key), std::string(detail::trim(line.substr(eq + 1))));
  }
  return kv;
}

inline KeyValues read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

inline constexpr const char* kChainKeys[] = {"n_sites", "lambda", "pattern", "j_x", "j_y", "b_fields"};

inline bool is_chain_key(const std::string& key) {
  for (const char* k : kChainKeys)
    if (key == k) return true;
  return false;
}

// Builds a ChainSpec from the chain keys in kv. Other keys are left for the
// caller; use chain_spec_from_text when the text holds only chain keys.
inline ChainSpec chain_spec_from_keys(const KeyValues& kv) {
  ChainSpec spec;
  spec.fields_b.clear();
  auto it = kv.find("n_sites");
  if (it == kv.end()) throw ValidationError("config is missing 'n_sites'");
  spec.n_sites = parse_int(it->second, "n_sites");
  if ((it = kv.find("lambda")) != kv.end()) spec.lambda = parse_double(it->second, "lambda");
  if ((it = kv.find("pattern")) != kv.end()) spec.pattern = parse_pattern(it->second);
  if ((it = kv.find("j_x")) != kv.end()) spec.custom_j_x = parse_double_list(it->second, "j_x");
  if ((it = kv.find("j_y")) != kv.end()) spec.custom_j_y = parse_double_list(it->second, "j_y");
  if (spec.pattern != CouplingPattern::Custom && (!spec.custom_j_x.empty() || !spec.custom_j_y.empty()))
    throw ValidationError("j_x/j_y are only accepted with pattern = custom");
  if ((it = kv.find("b_fields")) != kv.end()) spec.fields_b = parse_double_list(it->second, "b_fields");
  if (spec.fields_b.empty() && spec.n_sites > 0) spec.fields_b.assign(static_cast<std::size_t>(spec.n_sites), 0.0);
  spec.validate();
  return spec;
}

inline ChainSpec chain_spec_from_text(std::string_view text) {
  const auto kv = parse_key_values(text);
  for (const auto& [key, value] : kv)
    if (!is_chain_key(key)) throw ValidationError("unknown config key '" + key + "'");
  return chain_spec_from_keys(kv);
}

inline std::string chain_spec_to_text(const ChainSpec& spec) {
  spec.validate();
  std::string out;
  out += "n_sites = " + std::to_string(spec.n_sites) + "\n";
  out += "lambda = " + format_double(spec.lambda) + "\n";
  out += "pattern = " + std::string(pattern_name(spec.pattern)) + "\n";
  if (spec.pattern == CouplingPattern::Custom) {
    out += "j_x = " + format_double_list(spec.custom_j_x) + "\n";
    out += "j_y = " + format_double_list(spec.custom_j_y) + "\n";
  }
  out += "b_fields = " + format_double_list(spec.fields_b) + "\n";
  return out;
}

}  // namespace matryoshka
