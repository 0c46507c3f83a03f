#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cpvsoil {

/// What a sampled spectral quantity represents. The kind fixes the units.
enum class SpectrumKind {
  Irradiance,         // W/m2/nm
  Transmittance,      // dimensionless
  SpectralResponse,   // A/W
  QuantumEfficiency,  // dimensionless, electrons per photon
  CurrentDensity,     // A/m2/nm, irradiance times spectral response
};

std::string_view to_string(SpectrumKind kind) noexcept;
std::string_view units_of(SpectrumKind kind) noexcept;
SpectrumKind parse_spectrum_kind(std::string_view text);

/// Transmittance samples may exceed 1 by this much before they count as
/// nonphysical.
inline constexpr double kTransmittanceTolerance = 0.02;

/// Closed wavelength interval in nm.
struct Waveband {
  std::string name;
  double lambda_min_nm = 0.0;
  double lambda_max_nm = 0.0;

  Waveband() = default;
  Waveband(std::string name, double lambda_min_nm, double lambda_max_nm);

  double width() const noexcept { return lambda_max_nm - lambda_min_nm; }
  bool contains(const Waveband& other) const noexcept {
    return other.lambda_min_nm >= lambda_min_nm &&
           other.lambda_max_nm <= lambda_max_nm;
  }

  friend bool operator==(const Waveband&, const Waveband&) = default;
};

/// A function of wavelength sampled on a strictly increasing grid and
/// interpreted as piecewise linear between samples. Immutable once built.
class Spectrum {
public:
  /// Throws Error(InvalidSpectrum) if the grid is not strictly increasing,
  /// has fewer than two points, the lengths differ, any value is not finite,
  /// or a Transmittance lies outside [0, 1 + kTransmittanceTolerance].
  Spectrum(std::vector<double> wavelengths_nm, std::vector<double> values,
           SpectrumKind kind);

  /// Same as the constructor, but Transmittance values above
  /// 1 + kTransmittanceTolerance are clamped to that bound and counted.
  /// Negative transmittance is still rejected.
  struct Clamped;
  static Clamped clamped_transmittance(std::vector<double> wavelengths_nm,
                                       std::vector<double> values);

  /// Constant function on [lambda_min, lambda_max] sampled at its end points.
  static Spectrum constant(double value, double lambda_min_nm,
                           double lambda_max_nm, SpectrumKind kind);

  std::span<const double> wavelengths() const noexcept { return wavelengths_; }
  std::span<const double> values() const noexcept { return values_; }
  SpectrumKind kind() const noexcept { return kind_; }
  std::string_view units() const noexcept { return units_of(kind_); }
  std::size_t size() const noexcept { return values_.size(); }

  double support_min() const noexcept { return wavelengths_.front(); }
  double support_max() const noexcept { return wavelengths_.back(); }
  bool covers(double lambda_min_nm, double lambda_max_nm) const noexcept {
    return lambda_min_nm >= support_min() && lambda_max_nm <= support_max();
  }
  bool covers(const Waveband& band) const noexcept {
    return covers(band.lambda_min_nm, band.lambda_max_nm);
  }

  /// Linear interpolation; throws Error(GridOutOfSupport) outside support.
  double value_at(double lambda_nm) const;

  /// Copy with every value multiplied by `factor`, keeping the kind.
  Spectrum scaled(double factor) const;

  /// Copy carrying a different kind. Values are re-validated for that kind.
  Spectrum with_kind(SpectrumKind kind) const;

  friend bool operator==(const Spectrum&, const Spectrum&) = default;

private:
  std::vector<double> wavelengths_;
  std::vector<double> values_;
  SpectrumKind kind_;
};

struct Spectrum::Clamped {
  Spectrum spectrum;
  std::size_t clamped_samples = 0;
};

/// Piecewise-linear interpolation of `s` at every grid point. No
/// extrapolation: throws Error(GridOutOfSupport) if the grid leaves the
/// support, Error(InvalidSpectrum) if the grid is not strictly increasing.
Spectrum resample(const Spectrum& s, std::span<const double> grid);

/// Trapezoidal integral of `s` over `band`, with the band end points
/// inserted by interpolation. Throws Error(BandOutOfSupport).
double integrate(const Spectrum& s, const Waveband& band);
double integrate(const Spectrum& s, double lambda_min_nm, double lambda_max_nm);

/// The common value when `s` is constant on [lo, hi], including the samples
/// bracketing both ends. Constant factors are pulled out of integrals so that
/// flat transmittance scales currents exactly, whatever its grid.
std::optional<double> constant_value(const Spectrum& s, double lambda_min_nm,
                                     double lambda_max_nm);

/// Union of the sample grids of `factors`, restricted to their common
/// overlap. Throws Error(NoOverlap) when the overlap is empty or a point.
std::vector<double> overlap_grid(
    std::span<const std::reference_wrapper<const Spectrum>> factors);

/// Kind of a product of two factors: a Transmittance factor leaves the other
/// kind unchanged, Irradiance times SpectralResponse is CurrentDensity, any
/// other pairing throws Error(UnitMismatch).
SpectrumKind product_kind(SpectrumKind a, SpectrumKind b);

/// Product of all factors on overlap_grid(factors), each resampled first.
Spectrum pointwise_product(
    std::span<const std::reference_wrapper<const Spectrum>> factors);
Spectrum pointwise_product(const Spectrum& a, const Spectrum& b);
Spectrum pointwise_product(const Spectrum& a, const Spectrum& b,
                           const Spectrum& c);

// Spectrum files: a `# kind=<Kind> units=<units>` line, the header
// `wavelength_nm,value`, then ascending rows.
Spectrum read_spectrum_csv(std::istream& in, std::string_view source = "<stream>");
Spectrum read_spectrum_csv(const std::filesystem::path& path);
void write_spectrum_csv(std::ostream& out, const Spectrum& s);
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s);

}  // namespace cpvsoil
