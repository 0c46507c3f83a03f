#include "cpvsoil/cell_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include <fmt/format.h>

#include "cpvsoil/error.hpp"
#include "cpvsoil/io.hpp"

#ifndef CPVSOIL_SHARE_DIR
#define CPVSOIL_SHARE_DIR "data"
#endif

namespace cpvsoil {

namespace fs = std::filesystem;
using nlohmann::json;

Spectrum eqe_to_sr(const Spectrum& eqe) {
  if (eqe.kind() != SpectrumKind::QuantumEfficiency) {
    throw Error(ErrorKind::UnitMismatch,
                fmt::format("EQE conversion needs QuantumEfficiency, got {}",
                            to_string(eqe.kind())));
  }
  constexpr double amps_per_watt_per_nm =
      1e-9 * kElementaryCharge / (kPlanck * kSpeedOfLight);
  auto wl = eqe.wavelengths();
  auto q = eqe.values();
  std::vector<double> sr(wl.size());
  for (std::size_t i = 0; i < wl.size(); ++i) {
    sr[i] = q[i] * wl[i] * amps_per_watt_per_nm;
  }
  return Spectrum(std::vector<double>(wl.begin(), wl.end()), std::move(sr),
                  SpectrumKind::SpectralResponse);
}

namespace {

void require_kind(const Spectrum& s, SpectrumKind kind, std::string_view role) {
  if (s.kind() != kind) {
    throw Error(ErrorKind::UnitMismatch,
                fmt::format("{} must be {} [{}], got {} [{}]", role,
                            to_string(kind), units_of(kind), to_string(s.kind()),
                            s.units()));
  }
}

void require_covers(const Spectrum& s, const Waveband& band, std::string_view role) {
  if (!s.covers(band)) {
    throw Error(ErrorKind::BandOutOfSupport,
                fmt::format("{} support [{}, {}] does not cover band '{}' [{}, {}]",
                            role, s.support_min(), s.support_max(), band.name,
                            band.lambda_min_nm, band.lambda_max_nm));
  }
}

}  // namespace

CellModel::CellModel(std::string name, std::vector<Junction> junctions,
                     Spectrum reference_spectrum)
    : name_(std::move(name)),
      junctions_(std::move(junctions)),
      reference_(std::move(reference_spectrum)) {
  if (junctions_.size() < 2) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("cell '{}' needs at least two junctions", name_));
  }
  require_kind(reference_, SpectrumKind::Irradiance, "reference spectrum");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  bool any_eligible = false;
  for (std::size_t i = 0; i < junctions_.size(); ++i) {
    const Junction& j = junctions_[i];
    for (std::size_t k = 0; k < i; ++k) {
      if (junctions_[k].name == j.name) {
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("duplicate junction name '{}'", j.name));
      }
    }
    require_kind(j.sr, SpectrumKind::SpectralResponse,
                 fmt::format("spectral response of '{}'", j.name));
    if (!j.sr.covers(j.band)) {
      throw Error(ErrorKind::BandCoverage,
                  fmt::format("spectral response of '{}' spans [{}, {}] nm but "
                              "its band is [{}, {}] nm",
                              j.name, j.sr.support_min(), j.sr.support_max(),
                              j.band.lambda_min_nm, j.band.lambda_max_nm));
    }
    if (std::any_of(j.sr.values().begin(), j.sr.values().end(),
                    [](double v) { return v < 0.0; })) {
      throw Error(ErrorKind::InvalidSpectrum,
                  fmt::format("spectral response of '{}' has negative values",
                              j.name));
    }
    if (!reference_.covers(j.band)) {
      throw Error(ErrorKind::BandCoverage,
                  fmt::format("reference spectrum does not cover band of '{}'",
                              j.name));
    }
    lo = std::min(lo, j.band.lambda_min_nm);
    hi = std::max(hi, j.band.lambda_max_nm);
    any_eligible = any_eligible || j.limiting_eligible;
  }
  if (!any_eligible) {
    throw Error(ErrorKind::NoEligibleJunction,
                fmt::format("cell '{}' has no limiting-eligible junction", name_));
  }
  full_band_ = Waveband("MJ", lo, hi);
  reference_currents_.reserve(junctions_.size());
  for (const Junction& j : junctions_) {
    reference_currents_.push_back(jsc_junction(reference_, j));
  }
}

std::size_t CellModel::index_of(std::string_view junction_name) const {
  for (std::size_t i = 0; i < junctions_.size(); ++i) {
    if (junctions_[i].name == junction_name) return i;
  }
  throw Error(ErrorKind::UnknownJunction,
              fmt::format("cell '{}' has no junction '{}'", name_, junction_name));
}

double jsc_junction(const Spectrum& irradiance, const Junction& junction) {
  require_kind(irradiance, SpectrumKind::Irradiance, "irradiance");
  require_covers(irradiance, junction.band, "irradiance");
  return integrate(pointwise_product(irradiance, junction.sr), junction.band);
}

double jsc_junction(const Spectrum& irradiance, const Junction& junction,
                    const Spectrum& tau) {
  require_kind(irradiance, SpectrumKind::Irradiance, "irradiance");
  require_kind(tau, SpectrumKind::Transmittance, "soiling transmittance");
  require_covers(irradiance, junction.band, "irradiance");
  require_covers(tau, junction.band, "soiling transmittance");
  if (auto c = constant_value(tau, junction.band.lambda_min_nm, junction.band.lambda_max_nm)) {
    return *c * jsc_junction(irradiance, junction);
  }
  return integrate(pointwise_product(irradiance, tau, junction.sr), junction.band);
}

CellCurrent limiting_current(std::span<const Junction> junctions,
                             std::span<const double> currents) {
  CellCurrent out;
  bool found = false;
  for (std::size_t i = 0; i < junctions.size(); ++i) {
    if (!junctions[i].limiting_eligible) continue;
    if (!found || currents[i] < out.value) {
      out.value = currents[i];
      out.limiting = junctions[i].name;
      out.tie = false;
      found = true;
    } else if (currents[i] == out.value) {
      out.tie = true;
    }
  }
  if (!found) {
    throw Error(ErrorKind::NoEligibleJunction, "no limiting-eligible junction");
  }
  return out;
}

namespace {

template <typename Current>
CellCurrent min_current(std::span<const Junction> junctions, Current&& current) {
  std::vector<double> currents(junctions.size(), 0.0);
  for (std::size_t i = 0; i < junctions.size(); ++i) {
    if (junctions[i].limiting_eligible) currents[i] = current(junctions[i]);
  }
  return limiting_current(junctions, currents);
}

}  // namespace

CellCurrent jsc_cell(const Spectrum& irradiance, std::span<const Junction> junctions) {
  return min_current(junctions, [&](const Junction& j) {
    return jsc_junction(irradiance, j);
  });
}

CellCurrent jsc_cell(const Spectrum& irradiance, std::span<const Junction> junctions,
                     const Spectrum& tau) {
  return min_current(junctions, [&](const Junction& j) {
    return jsc_junction(irradiance, j, tau);
  });
}

CellCurrent jsc_cell(const Spectrum& irradiance, const CellModel& cell) {
  return jsc_cell(irradiance, cell.junctions());
}

CellCurrent jsc_cell(const Spectrum& irradiance, const CellModel& cell,
                     const Spectrum& tau) {
  return jsc_cell(irradiance, cell.junctions(), tau);
}

fs::path share_dir() {
  if (const char* env = std::getenv("CPVSOIL_SHARE_DIR"); env && *env) {
    return fs::path(env);
  }
  return fs::path(CPVSOIL_SHARE_DIR);
}

fs::path default_reference_spectrum_path() {
  return share_dir() / "reference" / "astm_g173_03_direct.csv";
}

namespace {

Waveband parse_band(const json& j, const std::string& name) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorKind::ParseError,
                fmt::format("band of '{}' must be [min_nm, max_nm]", name));
  }
  return Waveband(name, j[0].get<double>(), j[1].get<double>());
}

Spectrum load_response(const json& jj, const Waveband& band, const fs::path& base) {
  int sources = int(jj.contains("sr_file")) + int(jj.contains("eqe_file")) +
                int(jj.contains("boxcar_sr"));
  if (sources != 1) {
    throw Error(ErrorKind::ParseError,
                fmt::format("junction '{}' needs exactly one of sr_file, "
                            "eqe_file, boxcar_sr", band.name));
  }
  if (jj.contains("boxcar_sr")) {
    return Spectrum::constant(jj.at("boxcar_sr").get<double>(), band.lambda_min_nm,
                              band.lambda_max_nm, SpectrumKind::SpectralResponse);
  }
  if (jj.contains("eqe_file")) {
    Spectrum eqe = read_spectrum_csv(base / jj.at("eqe_file").get<std::string>());
    return eqe_to_sr(eqe);
  }
  Spectrum sr = read_spectrum_csv(base / jj.at("sr_file").get<std::string>());
  if (sr.kind() != SpectrumKind::SpectralResponse) {
    throw Error(ErrorKind::UnitMismatch,
                fmt::format("sr_file of '{}' has kind {}", band.name,
                            to_string(sr.kind())));
  }
  return sr;
}

}  // namespace

CellModel load_cell(const json& config, const fs::path& base_dir,
                    const CellLoadOptions& options) {
  try {
    std::string name = config.value("name", std::string("cell"));

    fs::path ref_path;
    if (options.reference_spectrum) {
      ref_path = *options.reference_spectrum;
    } else if (config.contains("reference_spectrum")) {
      ref_path = base_dir / config.at("reference_spectrum").get<std::string>();
    } else {
      ref_path = default_reference_spectrum_path();
    }
    if (!fs::exists(ref_path)) {
      throw Error(ErrorKind::MissingReferenceSpectrum,
                  fmt::format("reference spectrum {} not found", ref_path.string()));
    }
    Spectrum reference = read_spectrum_csv(ref_path);

    if (!config.contains("junctions") || !config.at("junctions").is_array()) {
      throw Error(ErrorKind::ParseError, "cell config lacks a junctions array");
    }
    std::vector<Junction> junctions;
    for (const json& jj : config.at("junctions")) {
      std::string jname = jj.at("name").get<std::string>();
      Waveband band = parse_band(jj.at("band_nm"), jname);
      Spectrum sr = load_response(jj, band, base_dir);
      bool eligible = jj.value("limiting_eligible", true);
      junctions.push_back(Junction{jname, band, std::move(sr), eligible});
    }

    CellModel cell(std::move(name), std::move(junctions), std::move(reference));

    if (config.contains("full_band_nm")) {
      Waveband declared = parse_band(config.at("full_band_nm"), "MJ");
      if (declared != cell.full_band()) {
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("full_band_nm [{}, {}] disagrees with the junction "
                                "bands, which span [{}, {}]",
                                declared.lambda_min_nm, declared.lambda_max_nm,
                                cell.full_band().lambda_min_nm,
                                cell.full_band().lambda_max_nm));
      }
    }
    if (config.contains("reference_currents_a_m2")) {
      const json& stated = config.at("reference_currents_a_m2");
      for (std::size_t i = 0; i < cell.junctions().size(); ++i) {
        const std::string& jname = cell.junctions()[i].name;
        if (!stated.contains(jname)) continue;
        double want = stated.at(jname).get<double>();
        double got = cell.reference_currents()[i];
        if (std::abs(want - got) > 1e-9 * std::abs(got)) {
          throw Error(ErrorKind::ReferenceCurrentMismatch,
                      fmt::format("stated reference current of '{}' is {} A/m2, "
                                  "recomputed {}", jname, want, got));
        }
      }
    }
    return cell;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, fmt::format("cell config: {}", e.what()));
  }
}

CellModel load_cell(const fs::path& config_path, const CellLoadOptions& options) {
  std::string text = read_file(config_path);
  json config;
  try {
    config = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError,
                fmt::format("{}: {}", config_path.string(), e.what()));
  }
  return load_cell(config, config_path.parent_path(), options);
}

json cell_summary_json(const CellModel& cell) {
  json out;
  out["name"] = cell.name();
  out["full_band_nm"] = {cell.full_band().lambda_min_nm, cell.full_band().lambda_max_nm};
  json js = json::array();
  for (std::size_t i = 0; i < cell.junctions().size(); ++i) {
    const Junction& j = cell.junctions()[i];
    js.push_back({{"name", j.name},
                  {"band_nm", {j.band.lambda_min_nm, j.band.lambda_max_nm}},
                  {"limiting_eligible", j.limiting_eligible},
                  {"reference_current_a_m2", cell.reference_currents()[i]}});
  }
  out["junctions"] = js;
  return out;
}

}  // namespace cpvsoil
