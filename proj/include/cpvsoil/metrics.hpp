#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cpvsoil/cell_model.hpp"
#include "cpvsoil/spectrum.hpp"

namespace cpvsoil {

/// Control-coupon transmittance below this marks a corrupted scan.
inline constexpr double kControlFloor = 0.05;

struct SoilingTransmittance {
  Spectrum tau;
  /// Samples above 1 but within tolerance, kept as measured.
  std::size_t noisy_samples = 0;
  /// Samples above 1 + kTransmittanceTolerance, clamped to that bound.
  std::size_t clamped_samples = 0;
};

/// Soiled-coupon over control-coupon transmittance on the union grid of the
/// two scans. Throws Error(UnitMismatch), Error(NoOverlap),
/// Error(ControlBelowFloor).
SoilingTransmittance soiling_transmittance(const Spectrum& soiled,
                                           const Spectrum& control);

/// Soiled over clean stack current.
double sratio(const Spectrum& irradiance, const CellModel& cell, const Spectrum& tau);

/// Irradiance-weighted transmittance over the cell's full band.
double bsratio(const Spectrum& irradiance, const CellModel& cell, const Spectrum& tau);

/// sratio / bsratio: the part of the soiling loss caused by the shape of tau.
double ssratio(const Spectrum& irradiance, const CellModel& cell, const Spectrum& tau);

/// Ordered junction pair for matching ratios; numerator over denominator.
struct JunctionPair {
  std::string numerator = "top";
  std::string denominator = "mid";
};

/// Current ratio of the pair normalised by the same ratio under the cell's
/// reference spectrum. Without tau this is the clean value, with tau the
/// soiled one. Throws Error(ZeroCurrent), Error(UnknownJunction).
double smr(const Spectrum& irradiance, const CellModel& cell,
           const JunctionPair& pair = {});
double smr(const Spectrum& irradiance, const CellModel& cell, const Spectrum& tau,
           const JunctionPair& pair = {});

/// Soiled over clean SMR, computed as
/// (J_soiled^num / J_soiled^den) * (J_clean^den / J_clean^num), so the
/// reference currents cancel and are never used.
double smratio(const Spectrum& irradiance, const CellModel& cell, const Spectrum& tau,
               const JunctionPair& pair = {});
double smratio(const Spectrum& irradiance, std::span<const Junction> junctions,
               const Spectrum& tau, const JunctionPair& pair = {});

/// Mean of tau over the band.
double ast(const Spectrum& tau, const Waveband& band);

struct IndexReport {
  double sratio = 0.0;
  double bsratio = 0.0;
  double ssratio = 0.0;
  double smr_cleaned = 0.0;
  double smr_soiled = 0.0;
  double smratio = 0.0;
  /// Per junction band in cell order, then the full band under "MJ".
  std::vector<std::pair<std::string, double>> ast;
  std::string limiting_cleaned;
  std::string limiting_soiled;
  bool limiting_cleaned_tie = false;
  bool limiting_soiled_tie = false;

  /// Throws Error(InvalidArgument) for an unknown band name.
  double ast_of(std::string_view band) const;
};

/// Currents and broadband sums accumulated over one or more irradiance
/// records for a fixed tau. A single record reproduces the instantaneous
/// indexes exactly; several records give daily current-weighted indexes.
class CurrentTotals {
public:
  CurrentTotals(const CellModel& cell, const Spectrum& tau);

  void add(const Spectrum& irradiance);
  std::size_t records() const noexcept { return records_; }

  std::span<const double> clean() const noexcept { return clean_; }
  std::vector<double> soiled() const;

  IndexReport report(const JunctionPair& pair = {}) const;

private:
  const CellModel* cell_;
  const Spectrum* tau_;
  // tau = scale_ * shape_, max(shape_) = 1
  double scale_ = 1.0;
  std::optional<Spectrum> shape_;
  std::vector<double> clean_;
  std::vector<double> shaped_;
  double broadband_clean_ = 0.0;
  double broadband_shaped_ = 0.0;
  std::size_t records_ = 0;
};

/// Every index for one irradiance record.
IndexReport index_report(const Spectrum& irradiance, const CellModel& cell,
                         const Spectrum& tau, const JunctionPair& pair = {});

/// Flat object; the AST entries appear as `ast_<band>`.
nlohmann::ordered_json to_json(const IndexReport& report);
/// Column names of the one-row CSV, matching the flat JSON keys.
std::vector<std::string> csv_columns(const IndexReport& report);
std::string to_csv(const IndexReport& report);

}  // namespace cpvsoil
