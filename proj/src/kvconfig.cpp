#include "fwmbs/kvconfig.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <span>
#include <sstream>

#include "fwmbs/errors.hpp"

namespace fwmbs::kv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Strip a trailing '#' comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct UnitFactor {
  std::string_view unit;
  double factor;
};

constexpr UnitFactor kLength[] = {{"nm", 1e-9}, {"um", 1e-6}, {"mm", 1e-3}, {"cm", 1e-2}, {"m", 1.0}};
constexpr UnitFactor kPower[] = {{"nW", 1e-9}, {"uW", 1e-6}, {"mW", 1e-3}, {"W", 1.0}};
constexpr UnitFactor kGamma[] = {{"/W/m", 1.0}, {"1/(W*m)", 1.0}, {"/W/km", 1e-3}};
constexpr UnitFactor kKerr[] = {{"m2/W", 1.0}, {"cm2/W", 1e-4}};
constexpr UnitFactor kLoss[] = {{"dB/m", 1.0}, {"dB/cm", 100.0}};
constexpr UnitFactor kPhase[] = {{"rad", 1.0}, {"mrad", 1e-3}};

std::span<const UnitFactor> units_for(Dimension d) {
  switch (d) {
    case Dimension::Length: return kLength;
    case Dimension::Power: return kPower;
    case Dimension::Gamma: return kGamma;
    case Dimension::KerrIndex: return kKerr;
    case Dimension::LossDbPerM: return kLoss;
    case Dimension::Phase: return kPhase;
  }
  return {};
}

std::string unit_list(Dimension d) {
  std::string out;
  for (const auto& u : units_for(d)) {
    if (!out.empty()) out += ", ";
    out += u.unit;
  }
  return out;
}

}  // namespace

const Entry* Section::find(std::string_view key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

const Section* Document::find(std::string_view name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

Document parse(std::string_view text, std::string source_name) {
  Document doc;
  doc.source = std::move(source_name);
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  Section* current = nullptr;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(doc.source, line_no, "unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!valid_identifier(name))
        throw ParseError(doc.source, line_no, "invalid section name '" + std::string(name) + "'");
      if (doc.find(name))
        throw ParseError(doc.source, line_no, "duplicate section '" + std::string(name) + "'");
      doc.sections.push_back({std::string(name), line_no, {}});
      current = &doc.sections.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(doc.source, line_no, "expected 'key = value'");
    if (!current) throw ParseError(doc.source, line_no, "key outside of any [section]");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!valid_identifier(key))
      throw ParseError(doc.source, line_no, "invalid key '" + std::string(key) + "'");
    if (value.empty())
      throw ParseError(doc.source, line_no, "missing value for '" + std::string(key) + "'");
    if (current->find(key))
      throw ParseError(doc.source, line_no,
                       "duplicate key '" + std::string(key) + "' in [" + current->name + "]");
    current->entries.push_back({std::string(key), std::string(value), line_no});
  }
  return doc;
}

Document load_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path.string());
}

double as_number(const Document& doc, const Entry& e) {
  if (auto v = to_double(e.value)) return *v;
  throw ParseError(doc.source, e.line, "'" + e.key + "' must be a number, got '" + e.value + "'");
}

long as_integer(const Document& doc, const Entry& e) {
  long v = 0;
  const auto s = trim(e.value);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(doc.source, e.line, "'" + e.key + "' must be an integer, got '" + e.value + "'");
  return v;
}

std::vector<double> as_number_list(const Document& doc, const Entry& e) {
  std::string_view s = e.value;
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw ParseError(doc.source, e.line, "'" + e.key + "' must be a list like [a, b]");
  s = trim(s.substr(1, s.size() - 2));
  std::vector<double> out;
  if (s.empty()) return out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    auto v = to_double(item);
    if (!v)
      throw ParseError(doc.source, e.line,
                       "'" + e.key + "' list item '" + std::string(item) + "' is not a number");
    out.push_back(*v);
    if (comma == std::string_view::npos) break;
    s = s.substr(comma + 1);
  }
  return out;
}

std::string as_string(const Document& doc, const Entry& e) {
  std::string_view s = e.value;
  if (s.size() >= 2 && s.front() == '"') {
    if (s.back() != '"') throw ParseError(doc.source, e.line, "unterminated string for '" + e.key + "'");
    return std::string(s.substr(1, s.size() - 2));
  }
  if (s.find_first_of(" \t[]\"") != std::string_view::npos)
    throw ParseError(doc.source, e.line, "'" + e.key + "' must be a single word or quoted string");
  return std::string(s);
}

double as_quantity(const Document& doc, const Entry& e, Dimension dim) {
  const std::string_view s = trim(e.value);
  // split at the first whitespace: "<number> <unit>"
  const auto sp = s.find_first_of(" \t");
  if (sp == std::string_view::npos)
    throw ParseError(doc.source, e.line,
                     "'" + e.key + "' needs an explicit unit (one of: " + unit_list(dim) + ")");
  const auto num = to_double(s.substr(0, sp));
  if (!num)
    throw ParseError(doc.source, e.line, "'" + e.key + "' has a malformed number '" +
                                             std::string(s.substr(0, sp)) + "'");
  const auto unit = trim(s.substr(sp));
  for (const auto& u : units_for(dim))
    if (u.unit == unit) return *num * u.factor;
  throw ParseError(doc.source, e.line,
                   "'" + e.key + "' has unit '" + std::string(unit) +
                       "'; expected one of: " + unit_list(dim));
}

std::optional<double> as_quantity_or_auto(const Document& doc, const Entry& e, Dimension dim) {
  if (trim(e.value) == "auto") return std::nullopt;
  return as_quantity(doc, e, dim);
}

void reject_unknown(const Document& doc, const Section& s,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& e : s.entries)
    if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end())
      throw ParseError(doc.source, e.line, "unknown field '" + e.key + "' in [" + s.name + "]");
}

}  // namespace fwmbs::kv
