#include "cpvsoil/metrics.hpp"

#include <algorithm>
#include <optional>

#include <fmt/format.h>

#include "cpvsoil/error.hpp"
#include "cpvsoil/io.hpp"

namespace cpvsoil {

SoilingTransmittance soiling_transmittance(const Spectrum& soiled,
                                           const Spectrum& control) {
  if (soiled.kind() != SpectrumKind::Transmittance ||
      control.kind() != SpectrumKind::Transmittance) {
    throw Error(ErrorKind::UnitMismatch,
                "soiling transmittance needs two Transmittance scans");
  }
  const std::reference_wrapper<const Spectrum> pair[] = {soiled, control};
  std::vector<double> grid = overlap_grid(pair);
  std::vector<double> ratio(grid.size());
  SoilingTransmittance out{Spectrum::constant(1.0, grid.front(), grid.back(),
                                              SpectrumKind::Transmittance)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double c = control.value_at(grid[i]);
    if (c < kControlFloor) {
      throw Error(ErrorKind::ControlBelowFloor,
                  fmt::format("control transmittance {} at {} nm is below {}", c,
                              grid[i], kControlFloor));
    }
    ratio[i] = soiled.value_at(grid[i]) / c;
    if (ratio[i] > 1.0 + kTransmittanceTolerance) {
      ++out.clamped_samples;
    } else if (ratio[i] > 1.0) {
      ++out.noisy_samples;
    }
  }
  out.tau = Spectrum::clamped_transmittance(std::move(grid), std::move(ratio)).spectrum;
  return out;
}

namespace {

void require_kind(const Spectrum& s, SpectrumKind kind, std::string_view role) {
  if (s.kind() != kind) {
    throw Error(ErrorKind::UnitMismatch,
                fmt::format("{} must be {}, got {}", role, to_string(kind),
                            to_string(s.kind())));
  }
}

double broadband(const Spectrum& irradiance, const Waveband& band) {
  return integrate(irradiance, band);
}

double broadband(const Spectrum& irradiance, const Waveband& band,
                 const Spectrum& tau) {
  if (!tau.covers(band)) {
    throw Error(ErrorKind::BandOutOfSupport,
                fmt::format("tau [{}, {}] does not cover [{}, {}]", tau.support_min(),
                            tau.support_max(), band.lambda_min_nm,
                            band.lambda_max_nm));
  }
  if (auto c = constant_value(tau, band.lambda_min_nm, band.lambda_max_nm)) {
    return *c * broadband(irradiance, band);
  }
  return integrate(pointwise_product(irradiance, tau), band);
}

double checked_ratio(double num, double den, ErrorKind kind, std::string_view what) {
  if (den == 0.0) {
    throw Error(kind, fmt::format("{}: denominator is zero", what));
  }
  return num / den;
}

// (a * c) / (b * d), all four required nonzero. Equal pairs cancel exactly.
double matching_ratio(double a, double b, double c, double d) {
  if (a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0) {
    throw Error(ErrorKind::ZeroCurrent, "zero junction current in matching ratio");
  }
  return (a * c) / (b * d);
}

// tau = scale * shape with max(shape) = 1. Ratios are taken on the shape and
// multiplied by the scale afterwards, so a flat tau gives ratios of exactly
// one before scaling.
struct SplitTau {
  double scale = 1.0;
  Spectrum shape;
};

SplitTau split(const Spectrum& tau) {
  require_kind(tau, SpectrumKind::Transmittance, "tau");
  auto v = tau.values();
  double peak = *std::max_element(v.begin(), v.end());
  if (peak == 0.0) return {1.0, tau};
  std::vector<double> shape(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) shape[i] = v[i] / peak;
  return {peak, Spectrum(std::vector<double>(tau.wavelengths().begin(),
                                             tau.wavelengths().end()),
                         std::move(shape), SpectrumKind::Transmittance)};
}

std::pair<std::size_t, std::size_t> pair_indexes(std::span<const Junction> junctions,
                                                 const JunctionPair& pair) {
  std::optional<std::size_t> num, den;
  for (std::size_t i = 0; i < junctions.size(); ++i) {
    if (junctions[i].name == pair.numerator) num = i;
    if (junctions[i].name == pair.denominator) den = i;
  }
  if (!num || !den) {
    throw Error(ErrorKind::UnknownJunction,
                fmt::format("junction pair {}/{} not found", pair.numerator,
                            pair.denominator));
  }
  return {*num, *den};
}

}  // namespace

double sratio(const Spectrum& irradiance, const CellModel& cell, const Spectrum& tau) {
  SplitTau t = split(tau);
  CellCurrent soiled = jsc_cell(irradiance, cell, t.shape);
  CellCurrent clean = jsc_cell(irradiance, cell);
  return t.scale * checked_ratio(soiled.value, clean.value, ErrorKind::ZeroCleanCurrent,
                                 "sratio");
}

double bsratio(const Spectrum& irradiance, const CellModel& cell, const Spectrum& tau) {
  require_kind(irradiance, SpectrumKind::Irradiance, "irradiance");
  SplitTau t = split(tau);
  return t.scale * checked_ratio(broadband(irradiance, cell.full_band(), t.shape),
                                 broadband(irradiance, cell.full_band()),
                                 ErrorKind::ZeroDenominator, "bsratio");
}

double ssratio(const Spectrum& irradiance, const CellModel& cell, const Spectrum& tau) {
  return sratio(irradiance, cell, tau) / bsratio(irradiance, cell, tau);
}

double smr(const Spectrum& irradiance, const CellModel& cell, const JunctionPair& pair) {
  auto [i, j] = pair_indexes(cell.junctions(), pair);
  const auto& ref = cell.reference_currents();
  return matching_ratio(jsc_junction(irradiance, cell.junctions()[i]),
                        jsc_junction(irradiance, cell.junctions()[j]), ref[j], ref[i]);
}

double smr(const Spectrum& irradiance, const CellModel& cell, const Spectrum& tau,
           const JunctionPair& pair) {
  auto [i, j] = pair_indexes(cell.junctions(), pair);
  SplitTau t = split(tau);
  const auto& ref = cell.reference_currents();
  return matching_ratio(jsc_junction(irradiance, cell.junctions()[i], t.shape),
                        jsc_junction(irradiance, cell.junctions()[j], t.shape), ref[j],
                        ref[i]);
}

double smratio(const Spectrum& irradiance, std::span<const Junction> junctions,
               const Spectrum& tau, const JunctionPair& pair) {
  auto [i, j] = pair_indexes(junctions, pair);
  SplitTau t = split(tau);
  return matching_ratio(jsc_junction(irradiance, junctions[i], t.shape),
                        jsc_junction(irradiance, junctions[j], t.shape),
                        jsc_junction(irradiance, junctions[j]),
                        jsc_junction(irradiance, junctions[i]));
}

double smratio(const Spectrum& irradiance, const CellModel& cell, const Spectrum& tau,
               const JunctionPair& pair) {
  return smratio(irradiance, cell.junctions(), tau, pair);
}

double ast(const Spectrum& tau, const Waveband& band) {
  require_kind(tau, SpectrumKind::Transmittance, "tau");
  double area = integrate(tau, band);
  if (auto c = constant_value(tau, band.lambda_min_nm, band.lambda_max_nm)) return *c;
  return area / band.width();
}

double IndexReport::ast_of(std::string_view band) const {
  for (const auto& [name, value] : ast) {
    if (name == band) return value;
  }
  throw Error(ErrorKind::InvalidArgument, fmt::format("no AST for band '{}'", band));
}

CurrentTotals::CurrentTotals(const CellModel& cell, const Spectrum& tau)
    : cell_(&cell),
      tau_(&tau),
      clean_(cell.junctions().size(), 0.0),
      shaped_(cell.junctions().size(), 0.0) {
  SplitTau t = split(tau);
  scale_ = t.scale;
  shape_ = std::move(t.shape);
}

void CurrentTotals::add(const Spectrum& irradiance) {
  require_kind(irradiance, SpectrumKind::Irradiance, "irradiance");
  auto junctions = cell_->junctions();
  for (std::size_t i = 0; i < junctions.size(); ++i) {
    clean_[i] += jsc_junction(irradiance, junctions[i]);
    shaped_[i] += jsc_junction(irradiance, junctions[i], *shape_);
  }
  broadband_clean_ += broadband(irradiance, cell_->full_band());
  broadband_shaped_ += broadband(irradiance, cell_->full_band(), *shape_);
  ++records_;
}

std::vector<double> CurrentTotals::soiled() const {
  std::vector<double> out(shaped_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale_ * shaped_[i];
  return out;
}

IndexReport CurrentTotals::report(const JunctionPair& pair) const {
  if (records_ == 0) {
    throw Error(ErrorKind::NoSpectralRecords, "no irradiance records accumulated");
  }
  const CellModel& cell = *cell_;
  auto junctions = cell.junctions();
  IndexReport r;

  // The scale is positive, so the shaped currents share the soiled argmin.
  CellCurrent clean = limiting_current(junctions, clean_);
  CellCurrent soiled = limiting_current(junctions, shaped_);
  r.limiting_cleaned = clean.limiting;
  r.limiting_soiled = soiled.limiting;
  r.limiting_cleaned_tie = clean.tie;
  r.limiting_soiled_tie = soiled.tie;
  r.sratio = scale_ * checked_ratio(soiled.value, clean.value, ErrorKind::ZeroCleanCurrent,
                                    "sratio");
  r.bsratio = scale_ * checked_ratio(broadband_shaped_, broadband_clean_,
                                     ErrorKind::ZeroDenominator, "bsratio");
  r.ssratio = r.sratio / r.bsratio;

  auto [i, j] = pair_indexes(junctions, pair);
  const auto& ref = cell.reference_currents();
  r.smr_cleaned = matching_ratio(clean_[i], clean_[j], ref[j], ref[i]);
  r.smr_soiled = matching_ratio(shaped_[i], shaped_[j], ref[j], ref[i]);
  r.smratio = matching_ratio(shaped_[i], shaped_[j], clean_[j], clean_[i]);

  for (const Junction& jn : junctions) {
    r.ast.emplace_back(jn.name, ast(*tau_, jn.band));
  }
  r.ast.emplace_back(cell.full_band().name, ast(*tau_, cell.full_band()));
  return r;
}

IndexReport index_report(const Spectrum& irradiance, const CellModel& cell,
                         const Spectrum& tau, const JunctionPair& pair) {
  CurrentTotals totals(cell, tau);
  totals.add(irradiance);
  return totals.report(pair);
}

nlohmann::ordered_json to_json(const IndexReport& r) {
  nlohmann::ordered_json j;
  j["sratio"] = r.sratio;
  j["bsratio"] = r.bsratio;
  j["ssratio"] = r.ssratio;
  j["smr_cleaned"] = r.smr_cleaned;
  j["smr_soiled"] = r.smr_soiled;
  j["smratio"] = r.smratio;
  for (const auto& [band, value] : r.ast) j["ast_" + band] = value;
  j["limiting_cleaned"] = r.limiting_cleaned;
  j["limiting_soiled"] = r.limiting_soiled;
  j["limiting_cleaned_tie"] = r.limiting_cleaned_tie;
  j["limiting_soiled_tie"] = r.limiting_soiled_tie;
  return j;
}

std::vector<std::string> csv_columns(const IndexReport& r) {
  std::vector<std::string> cols;
  const auto j = to_json(r);
  for (const auto& [key, value] : j.items()) cols.push_back(key);
  return cols;
}

std::string to_csv(const IndexReport& r) {
  std::string header;
  std::string row;
  const auto j = to_json(r);
  for (const auto& [key, value] : j.items()) {
    if (!header.empty()) {
      header += ',';
      row += ',';
    }
    header += key;
    if (value.is_number()) row += format_number(value.get<double>());
    else if (value.is_boolean()) row += value.get<bool>() ? "true" : "false";
    else row += value.get<std::string>();
  }
  return header + "\n" + row + "\n";
}

}  // namespace cpvsoil
