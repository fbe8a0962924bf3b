#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fwmbs {

struct SellmeierTerm {
  double b;        // dimensionless oscillator strength
  double c_um2;    // resonance wavelength squared, um^2
};

struct SellmeierModel {
  std::string name;
  std::vector<SellmeierTerm> terms;
  double lambda_min;  // meters
  double lambda_max;  // meters
};

struct ConstantIndexModel {
  std::string name;
  double n;
  double lambda_min;
  double lambda_max;
};

using MaterialModel = std::variant<SellmeierModel, ConstantIndexModel>;

/// Validates a model; throws DomainError describing the first violation.
void validate(const MaterialModel& m);

double refractive_index(const MaterialModel& m, double lambda_m);

/// Immutable after construction; lookups are case-sensitive.
class MaterialDb {
 public:
  MaterialDb() = default;
  /// Throws DomainError on a duplicate id or an invalid model.
  void add(MaterialModel model);

  bool contains(std::string_view id) const;
  const MaterialModel& get(std::string_view id) const;
  std::vector<std::string> ids() const;
  std::size_t size() const { return models_.size(); }

  std::string source;  // provenance of the loaded file, for manifests
  std::string content_hash;

 private:
  std::map<std::string, MaterialModel, std::less<>> models_;
};

MaterialDb parse_material_db(std::string_view text, std::string source_name);
MaterialDb load_material_db(const std::filesystem::path& path);

/// n(lambda) for a material id; errors on unknown id, out-of-range
/// wavelength, or proximity to a Sellmeier pole.
double refractive_index(const MaterialDb& db, std::string_view material, double lambda_m);

/// Default database location: $FWMBS_MATERIALS if set, else the bundled file.
std::filesystem::path default_materials_path();

}  // namespace fwmbs
