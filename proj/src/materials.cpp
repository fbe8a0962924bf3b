#include "fwmbs/materials.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fwmbs/errors.hpp"
#include "fwmbs/export.hpp"
#include "fwmbs/kvconfig.hpp"

namespace fwmbs {

namespace {

constexpr double kPoleGuard = 1e-6;  // relative distance |lambda^2 - C| / C

double sellmeier_n2(const SellmeierModel& m, double lambda_m) {
  const double l2 = (lambda_m * 1e6) * (lambda_m * 1e6);
  double n2 = 1.0;
  for (const auto& t : m.terms) {
    if (std::abs(l2 - t.c_um2) < kPoleGuard * t.c_um2)
      throw DomainError(m.name + ": wavelength " + std::to_string(lambda_m * 1e9) +
                        " nm sits on a Sellmeier pole");
    n2 += t.b * l2 / (l2 - t.c_um2);
  }
  return n2;
}

const std::string& model_name(const MaterialModel& m) {
  return std::visit([](const auto& v) -> const std::string& { return v.name; }, m);
}

}  // namespace

void validate(const MaterialModel& model) {
  std::visit(
      [](const auto& m) {
        if (!(m.lambda_min > 0.0) || !(m.lambda_min < m.lambda_max))
          throw DomainError(m.name + ": validity range must satisfy 0 < lambda_min < lambda_max");
      },
      model);
  if (const auto* c = std::get_if<ConstantIndexModel>(&model)) {
    if (!(c->n >= 1.0) || !std::isfinite(c->n))
      throw DomainError(c->name + ": constant index must be finite and >= 1");
    return;
  }
  const auto& s = std::get<SellmeierModel>(model);
  if (s.terms.empty()) throw DomainError(s.name + ": Sellmeier model needs at least one term");
  const double l2_min = std::pow(s.lambda_min * 1e6, 2);
  const double l2_max = std::pow(s.lambda_max * 1e6, 2);
  for (const auto& t : s.terms) {
    if (!std::isfinite(t.b) || !std::isfinite(t.c_um2))
      throw DomainError(s.name + ": non-finite Sellmeier coefficient");
    if (t.c_um2 >= l2_min && t.c_um2 <= l2_max)
      throw DomainError(s.name + ": Sellmeier pole inside the validity range");
  }
  // n^2 > 1 across the range, sampled densely in wavelength.
  constexpr int kSamples = 512;
  for (int i = 0; i <= kSamples; ++i) {
    const double lam = s.lambda_min + (s.lambda_max - s.lambda_min) * i / kSamples;
    if (!(sellmeier_n2(s, lam) > 1.0))
      throw DomainError(s.name + ": n^2 <= 1 at " + std::to_string(lam * 1e9) + " nm");
  }
}

double refractive_index(const MaterialModel& model, double lambda_m) {
  return std::visit(
      [lambda_m](const auto& m) -> double {
        if (!(lambda_m >= m.lambda_min && lambda_m <= m.lambda_max))
          throw DomainError(m.name + ": wavelength " + std::to_string(lambda_m * 1e9) +
                            " nm outside validity range [" + std::to_string(m.lambda_min * 1e9) +
                            ", " + std::to_string(m.lambda_max * 1e9) + "] nm");
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, ConstantIndexModel>) {
          return m.n;
        } else {
          return std::sqrt(sellmeier_n2(m, lambda_m));
        }
      },
      model);
}

void MaterialDb::add(MaterialModel model) {
  validate(model);
  std::string id = model_name(model);
  if (models_.contains(id)) throw DomainError("duplicate material '" + id + "'");
  models_.emplace(std::move(id), std::move(model));
}

bool MaterialDb::contains(std::string_view id) const { return models_.find(id) != models_.end(); }

const MaterialModel& MaterialDb::get(std::string_view id) const {
  auto it = models_.find(id);
  if (it == models_.end()) throw DomainError("unknown material '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> MaterialDb::ids() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : models_) out.push_back(k);
  return out;
}

MaterialDb parse_material_db(std::string_view text, std::string source_name) {
  const auto doc = kv::parse(text, std::move(source_name));
  MaterialDb db;
  db.source = doc.source;
  db.content_hash = sha256_hex(text);
  for (const auto& sec : doc.sections) {
    const auto need = [&](std::string_view key) -> const kv::Entry& {
      if (const auto* e = sec.find(key)) return *e;
      throw ParseError(doc.source, sec.line,
                       "material [" + sec.name + "] is missing field '" + std::string(key) + "'");
    };
    const auto kind = kv::as_string(doc, need("kind"));
    const auto& range_e = need("range_nm");
    const auto range = kv::as_number_list(doc, range_e);
    if (range.size() != 2)
      throw ParseError(doc.source, range_e.line, "range_nm must have exactly two entries");
    if (!(range[0] < range[1]))
      throw ParseError(doc.source, range_e.line,
                       "range_nm for [" + sec.name + "] must satisfy lambda_min < lambda_max");

    try {
      if (kind == "sellmeier") {
        kv::reject_unknown(doc, sec, {"kind", "B", "C_um2", "range_nm", "source"});
        const auto& be = need("B");
        const auto b = kv::as_number_list(doc, be);
        const auto c = kv::as_number_list(doc, need("C_um2"));
        if (b.empty()) throw ParseError(doc.source, be.line, "[" + sec.name + "] has an empty term list");
        if (b.size() != c.size())
          throw ParseError(doc.source, be.line, "[" + sec.name + "] B and C_um2 differ in length");
        SellmeierModel m{sec.name, {}, range[0] * 1e-9, range[1] * 1e-9};
        for (std::size_t i = 0; i < b.size(); ++i) m.terms.push_back({b[i], c[i]});
        db.add(std::move(m));
      } else if (kind == "constant") {
        kv::reject_unknown(doc, sec, {"kind", "n", "range_nm", "source"});
        db.add(ConstantIndexModel{sec.name, kv::as_number(doc, need("n")), range[0] * 1e-9,
                                  range[1] * 1e-9});
      } else {
        throw ParseError(doc.source, need("kind").line,
                         "unknown kind '" + kind + "' (expected sellmeier or constant)");
      }
    } catch (const DomainError& e) {
      throw ParseError(doc.source, sec.line, e.what());
    }
  }
  return db;
}

MaterialDb load_material_db(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open material file '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_material_db(ss.str(), path.string());
}

double refractive_index(const MaterialDb& db, std::string_view material, double lambda_m) {
  return refractive_index(db.get(material), lambda_m);
}

std::filesystem::path default_materials_path() {
  if (const char* env = std::getenv("FWMBS_MATERIALS"); env && *env) return env;
  return FWMBS_DEFAULT_MATERIALS;
}

}  // namespace fwmbs
