#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fwmbs/cmt.hpp"
#include "fwmbs/design.hpp"
#include "fwmbs/modesolver.hpp"
#include "fwmbs/ssfm.hpp"

// Output files. Every CSV starts with "# key=value" comment lines
// (schema_version, config_hash, generator) followed by the column header.
// Numbers are printed with 12 significant digits in %g style, so identical
// inputs produce byte-identical files.

namespace fwmbs {

inline constexpr int kSchemaVersion = 1;

std::string tool_version();

/// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// 12 significant digits; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v);

void write_profile_csv(std::ostream& os, const DispersionProfile& profile,
                       std::string_view config_hash);
void write_curve_csv(std::ostream& os, std::span<const CurvePoint> curve,
                     std::string_view config_hash);
void write_spectrum_csv(std::ostream& os, std::span<const SpectrumLine> spectrum,
                        std::string_view config_hash);

nlohmann::json to_json(const GridBuild& g);
nlohmann::json to_json(const RunLog& log);
nlohmann::json to_json(const ExperimentResult& r);
nlohmann::json to_json(const DesignTarget& t);
nlohmann::json to_json(const DesignReport& r);

/// Fixed-width table with one row per report: emitter, width, ZDW, pump
/// powers.
std::string design_table(std::span<const DesignReport> reports);

/// Writes the whole string or throws InputError naming the path.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace fwmbs
