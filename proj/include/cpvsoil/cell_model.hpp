#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cpvsoil/spectrum.hpp"

namespace cpvsoil {

// Exact SI values (2019 redefinition).
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kPlanck = 6.62607015e-34;             // J s
inline constexpr double kSpeedOfLight = 299792458.0;          // m/s

/// SR(λ) = EQE(λ) · λ · q / (h · c), with λ converted from nm to m.
Spectrum eqe_to_sr(const Spectrum& eqe);

struct Junction {
  std::string name;
  Waveband band;
  Spectrum sr;  // SpectralResponse, A/W
  /// Whether this subcell may set the stack current. Germanium bottom cells
  /// carry a large current excess and are excluded by default.
  bool limiting_eligible = true;
};

/// Ordered junction stack plus its rating spectrum. Immutable after
/// construction; the reference currents are always recomputed from the
/// reference spectrum.
class CellModel {
public:
  /// Throws Error(InvalidArgument) for fewer than two or duplicate
  /// junctions, Error(BandCoverage) if an SR or the reference spectrum does
  /// not cover a band, Error(InvalidSpectrum) for negative or mis-kinded SR,
  /// Error(NoEligibleJunction) when no junction may limit.
  CellModel(std::string name, std::vector<Junction> junctions,
            Spectrum reference_spectrum);

  const std::string& name() const noexcept { return name_; }
  std::span<const Junction> junctions() const noexcept { return junctions_; }
  const Waveband& full_band() const noexcept { return full_band_; }
  const Spectrum& reference_spectrum() const noexcept { return reference_; }
  /// Per junction, A/m2, in junction order.
  std::span<const double> reference_currents() const noexcept {
    return reference_currents_;
  }

  /// Index of the named junction; throws Error(UnknownJunction).
  std::size_t index_of(std::string_view junction_name) const;
  const Junction& junction(std::string_view junction_name) const {
    return junctions_[index_of(junction_name)];
  }

private:
  std::string name_;
  std::vector<Junction> junctions_;
  Waveband full_band_;
  Spectrum reference_;
  std::vector<double> reference_currents_;
};

/// Short-circuit current density of one junction in A/m2: the integral of
/// E·SR (or E·tau·SR when tau is given) over the junction band.
double jsc_junction(const Spectrum& irradiance, const Junction& junction);
double jsc_junction(const Spectrum& irradiance, const Junction& junction,
                    const Spectrum& tau);

struct CellCurrent {
  double value = 0.0;
  std::string limiting;
  /// Another eligible junction produced exactly the same current.
  bool tie = false;
};

/// Minimum over limiting-eligible junctions, first junction winning ties.
/// Throws Error(NoEligibleJunction).
CellCurrent jsc_cell(const Spectrum& irradiance, std::span<const Junction> junctions);
CellCurrent jsc_cell(const Spectrum& irradiance, std::span<const Junction> junctions,
                     const Spectrum& tau);
CellCurrent jsc_cell(const Spectrum& irradiance, const CellModel& cell);
CellCurrent jsc_cell(const Spectrum& irradiance, const CellModel& cell,
                     const Spectrum& tau);

/// Picks the minimum of per-junction currents among eligible junctions.
CellCurrent limiting_current(std::span<const Junction> junctions,
                             std::span<const double> currents);

/// Bundled ASTM G-173-03 direct+circumsolar table. `CPVSOIL_SHARE_DIR`
/// overrides the install-time data directory.
std::filesystem::path share_dir();
std::filesystem::path default_reference_spectrum_path();

struct CellLoadOptions {
  /// Takes precedence over the config's `reference_spectrum` entry.
  std::optional<std::filesystem::path> reference_spectrum;
};

/// Loads a JSON cell config. Relative paths resolve against `base_dir`.
CellModel load_cell(const nlohmann::json& config,
                    const std::filesystem::path& base_dir,
                    const CellLoadOptions& options = {});
CellModel load_cell(const std::filesystem::path& config_path,
                    const CellLoadOptions& options = {});

nlohmann::json cell_summary_json(const CellModel& cell);

}  // namespace cpvsoil
