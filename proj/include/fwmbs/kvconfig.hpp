#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fwmbs::kv {

// Sectioned key-value text format shared by the material database and the
// run configuration:
//
//   # comment (also after values)
//   [section]
//   key = value
//
// A value is a quoted string, a bare token (number, word, number+unit), or a
// bracketed comma-separated list of numbers. Keys are unique per section and
// section names unique per document.

struct Entry {
  std::string key;
  std::string value;  // raw text, trimmed, comment stripped
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;

  const Entry* find(std::string_view key) const;
};

struct Document {
  std::string source;  // file name used in error messages
  std::vector<Section> sections;

  const Section* find(std::string_view name) const;
};

Document parse(std::string_view text, std::string source_name);
Document load_file(const std::filesystem::path& path);

/// Physical dimension of a quantity with a mandatory unit suffix.
enum class Dimension { Length, Power, Gamma, KerrIndex, LossDbPerM, Phase };

double as_number(const Document& doc, const Entry& e);
std::vector<double> as_number_list(const Document& doc, const Entry& e);
std::string as_string(const Document& doc, const Entry& e);
/// Parses "<number> <unit>" and converts to SI. The unit is mandatory.
double as_quantity(const Document& doc, const Entry& e, Dimension dim);
/// Quantity or the bare word "auto" (returns nullopt).
std::optional<double> as_quantity_or_auto(const Document& doc, const Entry& e, Dimension dim);
long as_integer(const Document& doc, const Entry& e);

/// Throws ParseError naming the first key not in `allowed`.
void reject_unknown(const Document& doc, const Section& s,
                    std::initializer_list<std::string_view> allowed);

}  // namespace fwmbs::kv
