#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "cpvsoil/cell_model.hpp"
#include "cpvsoil/pipeline.hpp"
#include "cpvsoil/spectrum.hpp"

namespace cpvsoil {

/// tau(lambda) = exp(-k * (lambda_ref / lambda)^alpha). A stand-in shape for
/// dust attenuation, not a fit to any measured curve.
struct SoilingModel {
  double k = 0.0;
  double alpha = 1.0;
  double lambda_ref_nm = 550.0;
};

/// Evenly spaced grid from lo to hi; the last point is hi even when the
/// step does not divide the span.
std::vector<double> uniform_grid(double lambda_min_nm, double lambda_max_nm,
                                 double step_nm);

Spectrum synth_tau(const SoilingModel& model, std::span<const double> grid);

/// Reference resampled onto `grid`, multiplied by (lambda_ref / lambda)^tilt
/// and rescaled so its integral over the grid equals the resampled
/// reference's. Positive tilt is blue-rich.
Spectrum synth_spectrum(const Spectrum& reference, double tilt,
                        std::span<const double> grid, double lambda_ref_nm = 550.0);
/// Same on the reference's own grid; tilt 0 returns the reference.
Spectrum synth_spectrum(const Spectrum& reference, double tilt,
                        double lambda_ref_nm = 550.0);

struct RainEvent {
  int week = 0;
  double wash_fraction = 0.0;
  double rainfall_mm = 0.0;
};

struct CloudyDay {
  int week = 0;
  int offset_days = 0;  // relative to the scan date, -1..1
};

struct CampaignScenario {
  int weeks = 52;
  Date start_date{std::chrono::year(2019), std::chrono::January, std::chrono::day(7)};
  double initial_k = 0.0;
  double deposition_per_week = 0.01;
  double alpha = 1.2;
  double lambda_ref_nm = 550.0;
  std::vector<RainEvent> rain_weeks;
  double spectrum_tilt = 0.0;
  /// Weekly tilt adds amplitude * sin(2 pi (week - 1) / 52).
  double tilt_seasonal_amplitude = 0.0;
  /// Multiplicative Gaussian noise per scan sample.
  double noise_sigma = 0.002;
  /// Multiplicative Gaussian gain per whole scan.
  double gain_sigma = 0.0;
  double scan_step_nm = 5.0;
  double spectrum_step_nm = 10.0;
  std::vector<CloudyDay> cloudy_days;
  std::vector<int> spectral_hours{8, 9, 10, 11, 12, 13, 14, 15, 16};
  std::optional<double> pm10_ugm3;
  std::optional<double> pm25_ugm3;
  std::uint64_t seed = 1;
};

/// Reads a scenario document. Missing fields keep their defaults.
/// Throws Error(EmptyScenario) for weeks = 0 and Error(InvalidArgument) for
/// out-of-range values.
CampaignScenario parse_scenario(const nlohmann::json& doc);
CampaignScenario load_scenario(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const CampaignScenario& scenario);

/// Soiling depth per week: k_w = (k_{w-1} + deposition) * (1 - wash_w),
/// starting from initial_k.
std::vector<double> k_trajectory(const CampaignScenario& scenario);

struct SynthCampaign {
  std::vector<WeeklyMeasurement> weeks;
  std::vector<FieldDay> days;
  std::vector<double> k;      // per week
  std::vector<double> tilt;   // per week
};

/// Triplicate coupon scans on [300, 2000] nm and three field days (scan day
/// and its neighbours) per week. Deterministic for a given seed; each week
/// draws from its own sub-seed.
SynthCampaign synth_campaign(const CampaignScenario& scenario, const CellModel& cell);

/// Writes a directory that load_campaign_dir reads back, plus truth.csv and
/// scenario.json.
void write_campaign_dir(const std::filesystem::path& dir,
                        const CampaignScenario& scenario, const SynthCampaign& campaign);

}  // namespace cpvsoil
