#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cpvsoil/cell_model.hpp"
#include "cpvsoil/metrics.hpp"
#include "cpvsoil/spectrum.hpp"
#include "cpvsoil/stats.hpp"

namespace cpvsoil {

using Date = std::chrono::year_month_day;
using Timestamp = std::chrono::sys_seconds;

/// Parses `YYYY-MM-DD`; throws Error(ParseError).
Date parse_date(std::string_view text);
std::string format_date(Date date);
/// Parses `YYYY-MM-DDTHH:MM[:SS][Z]` as local solar time.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);
Date date_of(Timestamp t);
Date add_days(Date date, int days);

/// Weekly coupon scans: three soiled/control replicate pairs.
struct WeeklyMeasurement {
  int week_id = 0;
  Date scan_date{};
  std::vector<Spectrum> soiled_scans;
  std::vector<Spectrum> control_scans;
};

/// One 5-minute field record. Context fields may be missing.
struct FieldRecord {
  Timestamp time{};
  double dni_wm2 = 0.0;
  double gni_wm2 = 0.0;
  double ghi_wm2 = 0.0;
  double dhi_wm2 = 0.0;
  std::optional<double> rainfall_mm;
  std::optional<double> pm10;
  std::optional<double> pm25;
  std::shared_ptr<const Spectrum> spectral_dni;
};

struct FieldDay {
  Date date{};
  std::vector<FieldRecord> records;
};

/// Throws Error(InvalidArgument) for unordered timestamps, records from
/// another date, or negative irradiance.
void check_field_day(const FieldDay& day);

enum class Aggregation {
  /// Indexes from the spectral record nearest 12:00.
  Noon,
  /// Junction currents and broadband sums added over every spectral record
  /// of the day before any ratio is taken.
  DailyCurrentWeighted,
};

std::string_view to_string(Aggregation mode) noexcept;
Aggregation parse_aggregation(std::string_view text);

struct PipelineOptions {
  Aggregation aggregation = Aggregation::DailyCurrentWeighted;
  /// Replicate AST_MJ spread (max - min, absolute) above which a week is
  /// dropped.
  double max_replicate_spread = 0.01;
  /// Days with sum(DNI) / sum(GNI) below this are cloudy.
  double cloudy_threshold = 0.75;
  /// Every coupon scan must cover this band.
  Waveband scan_band{"scan", 300.0, 2000.0};
  JunctionPair pair{};
};

struct WeekValidation {
  /// Mean of the replicate tau curves when accepted.
  std::optional<Spectrum> tau;
  /// Empty when accepted, otherwise SpreadExceeded or ScanCoverage.
  std::string rejection;
  std::vector<double> replicate_ast_mj;
  double spread = 0.0;
  std::size_t noisy_samples = 0;
  std::size_t clamped_samples = 0;

  bool accepted() const noexcept { return rejection.empty(); }
};

/// Soiling transmittance per replicate, AST over the full band, spread rule.
/// Throws Error(IncompleteReplicates) unless there are exactly three pairs.
WeekValidation validate_week(const WeeklyMeasurement& week, const CellModel& cell,
                             const PipelineOptions& options = {});

/// Mean of curves on the union of their grids over the common overlap.
Spectrum mean_spectrum(std::span<const Spectrum> curves);

/// sum(DNI) / sum(GNI) over records with GNI > 0 below the threshold.
/// Throws Error(NoIrradianceRecords) when no record has GNI > 0.
bool is_cloudy(const FieldDay& day, double threshold = 0.75);

struct DaySelection {
  const FieldDay* day = nullptr;
  int offset_days = 0;
};

/// The scan day when clear, else the clear neighbour within one day
/// (previous day first). A day without irradiance counts as unusable.
/// Throws Error(NoClearDay).
DaySelection select_spectra(Date scan_date, std::span<const FieldDay> days,
                            double cloudy_threshold = 0.75);

/// Index of the spectral record nearest 12:00 (earlier wins a tie).
/// Throws Error(NoSpectralRecords).
std::size_t noon_record(const FieldDay& day);

/// Indexes for an accepted tau on one field day under the given mode.
/// Also returns how many spectral records were used.
std::pair<IndexReport, std::size_t> day_report(const FieldDay& day,
                                               const CellModel& cell,
                                               const Spectrum& tau,
                                               const PipelineOptions& options);

struct WeekResult {
  int week_id = 0;
  Date scan_date{};
  bool accepted = false;
  std::string rejection_reason;
  std::string rejection_detail;
  std::vector<double> replicate_ast_mj;
  double replicate_spread = 0.0;
  std::size_t noisy_samples = 0;
  std::size_t clamped_samples = 0;
  std::optional<Spectrum> tau;
  /// AST per band whenever tau is known, even for rejected weeks.
  std::vector<std::pair<std::string, double>> ast_by_band;
  std::optional<Date> spectra_date;
  std::size_t spectral_records = 0;
  std::optional<IndexReport> report;
};

struct SummaryStat {
  std::string name;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

struct CampaignResult {
  std::vector<WeekResult> weekly;  // ordered by week_id
  std::vector<SummaryStat> summary;
  /// AST band names in report order (junction bands, then MJ).
  std::vector<std::string> bands;
  Aggregation aggregation = Aggregation::DailyCurrentWeighted;

  std::size_t accepted_count() const noexcept;
  /// (week_id, value) of an index over accepted weeks; `ast_<band>` names
  /// select band AST values.
  std::vector<std::pair<int, double>> series(std::string_view index) const;
};

/// Runs every week independently; a failing week becomes a rejection with
/// the error kind as its reason and never aborts the campaign.
CampaignResult run_campaign(std::span<const WeeklyMeasurement> weeks,
                            std::span<const FieldDay> days, const CellModel& cell,
                            const PipelineOptions& options = {});

/// OLS of AST_MJ against week index over accepted weeks in
/// [first_week, last_week]. Throws Error(TooFewPoints).
FitResult soiling_rate_fit(const CampaignResult& result, int first_week, int last_week);

struct NamedFit {
  std::string key;  // "<y>~<x>"
  std::optional<FitResult> fit;
  std::string error;
};

/// sratio, bsratio, ssratio, smratio and the band AST ratios of the pair
/// numerator, each fitted against AST_MJ over accepted weeks.
std::vector<NamedFit> campaign_fits(const CampaignResult& result, const CellModel& cell,
                                    const JunctionPair& pair = {});

// Campaign directories: `weeks.csv` (week_id,scan_date) plus scans named
// `scans/week<NN>_<soiled|control>_<1|2|3>.csv`, or a `manifest.json`
// listing scan paths per week; field days as `field/<YYYY-MM-DD>.csv`.
struct CampaignData {
  std::vector<WeeklyMeasurement> weeks;
  std::vector<FieldDay> days;
};

/// Throws Error(NoWeeksFound) when the directory holds no weeks.
CampaignData load_campaign_dir(const std::filesystem::path& dir);

FieldDay read_field_csv(const std::filesystem::path& path);
void write_field_csv(const std::filesystem::path& path, const FieldDay& day,
                     std::span<const std::string> spectrum_files);

nlohmann::ordered_json to_json(const CampaignResult& result,
                               std::span<const NamedFit> fits);
nlohmann::ordered_json to_json(std::span<const NamedFit> fits);
std::string weekly_csv(const CampaignResult& result);

/// Writes campaign.json, weekly.csv and fits.json atomically.
void write_campaign_outputs(const std::filesystem::path& out_dir,
                            const CampaignResult& result,
                            std::span<const NamedFit> fits);

}  // namespace cpvsoil
