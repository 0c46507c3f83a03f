#include "cpvsoil/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "cpvsoil/error.hpp"
#include "cpvsoil/io.hpp"

namespace cpvsoil {

namespace fs = std::filesystem;
namespace chr = std::chrono;
using ojson = nlohmann::ordered_json;

namespace {

std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

Date parse_date(std::string_view text) {
  auto bad = [&] {
    return Error(ErrorKind::ParseError, fmt::format("bad date '{}'", text));
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  auto y = parse_int(text.substr(0, 4));
  auto m = parse_int(text.substr(5, 2));
  auto d = parse_int(text.substr(8, 2));
  if (!y || !m || !d) throw bad();
  Date date{chr::year(*y), chr::month(static_cast<unsigned>(*m)),
            chr::day(static_cast<unsigned>(*d))};
  if (!date.ok()) throw bad();
  return date;
}

std::string format_date(Date date) {
  return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(date.year()),
                     static_cast<unsigned>(date.month()),
                     static_cast<unsigned>(date.day()));
}

Timestamp parse_timestamp(std::string_view text) {
  auto bad = [&] {
    return Error(ErrorKind::ParseError, fmt::format("bad timestamp '{}'", text));
  };
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  if (text.size() != 16 && text.size() != 19) throw bad();
  if (text[10] != 'T' || text[13] != ':') throw bad();
  Date date = parse_date(text.substr(0, 10));
  auto hh = parse_int(text.substr(11, 2));
  auto mm = parse_int(text.substr(14, 2));
  std::optional<int> ss = 0;
  if (text.size() == 19) {
    if (text[16] != ':') throw bad();
    ss = parse_int(text.substr(17, 2));
  }
  if (!hh || !mm || !ss || *hh < 0 || *hh > 23 || *mm < 0 || *mm > 59 || *ss < 0 ||
      *ss > 59) {
    throw bad();
  }
  return chr::sys_days(date) + chr::hours(*hh) + chr::minutes(*mm) + chr::seconds(*ss);
}

std::string format_timestamp(Timestamp t) {
  auto day = chr::floor<chr::days>(t);
  chr::hh_mm_ss hms(t - day);
  return fmt::format("{}T{:02}:{:02}:{:02}", format_date(Date(day)),
                     hms.hours().count(), hms.minutes().count(),
                     hms.seconds().count());
}

Date date_of(Timestamp t) { return Date(chr::floor<chr::days>(t)); }

Date add_days(Date date, int days) {
  return Date(chr::sys_days(date) + chr::days(days));
}

void check_field_day(const FieldDay& day) {
  for (std::size_t i = 0; i < day.records.size(); ++i) {
    const FieldRecord& r = day.records[i];
    if (date_of(r.time) != day.date) {
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("record {} is not on {}", format_timestamp(r.time),
                              format_date(day.date)));
    }
    if (i > 0 && !(r.time > day.records[i - 1].time)) {
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("timestamps not strictly increasing at {}",
                              format_timestamp(r.time)));
    }
    for (double v : {r.dni_wm2, r.gni_wm2, r.ghi_wm2, r.dhi_wm2}) {
      if (!(v >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("negative irradiance at {}",
                                format_timestamp(r.time)));
      }
    }
    if (r.spectral_dni && r.spectral_dni->kind() != SpectrumKind::Irradiance) {
      throw Error(ErrorKind::UnitMismatch,
                  fmt::format("spectral record at {} is not Irradiance",
                              format_timestamp(r.time)));
    }
  }
}

std::string_view to_string(Aggregation mode) noexcept {
  return mode == Aggregation::Noon ? "noon" : "daily";
}

Aggregation parse_aggregation(std::string_view text) {
  if (text == "noon") return Aggregation::Noon;
  if (text == "daily") return Aggregation::DailyCurrentWeighted;
  throw Error(ErrorKind::InvalidArgument,
              fmt::format("aggregation must be noon or daily, got '{}'", text));
}

Spectrum mean_spectrum(std::span<const Spectrum> curves) {
  std::vector<std::reference_wrapper<const Spectrum>> refs(curves.begin(), curves.end());
  std::vector<double> grid = overlap_grid(refs);
  std::vector<double> sum(grid.size(), 0.0);
  for (const Spectrum& c : curves) {
    Spectrum r = resample(c, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) sum[i] += r.values()[i];
  }
  for (double& v : sum) v /= static_cast<double>(curves.size());
  return Spectrum(std::move(grid), std::move(sum), curves.front().kind());
}

WeekValidation validate_week(const WeeklyMeasurement& week, const CellModel& cell,
                             const PipelineOptions& options) {
  if (week.soiled_scans.size() != 3 || week.control_scans.size() != 3) {
    throw Error(ErrorKind::IncompleteReplicates,
                fmt::format("week {} has {} soiled and {} control scans, needs 3 "
                            "pairs", week.week_id, week.soiled_scans.size(),
                            week.control_scans.size()));
  }
  WeekValidation out;
  for (const auto* scans : {&week.soiled_scans, &week.control_scans}) {
    for (const Spectrum& s : *scans) {
      if (!s.covers(options.scan_band)) {
        out.rejection = "ScanCoverage";
        return out;
      }
    }
  }
  std::vector<Spectrum> taus;
  for (std::size_t r = 0; r < 3; ++r) {
    SoilingTransmittance st =
        soiling_transmittance(week.soiled_scans[r], week.control_scans[r]);
    out.noisy_samples += st.noisy_samples;
    out.clamped_samples += st.clamped_samples;
    out.replicate_ast_mj.push_back(ast(st.tau, cell.full_band()));
    taus.push_back(std::move(st.tau));
  }
  auto [lo, hi] =
      std::minmax_element(out.replicate_ast_mj.begin(), out.replicate_ast_mj.end());
  out.spread = *hi - *lo;
  if (out.spread > options.max_replicate_spread) {
    out.rejection = "SpreadExceeded";
    return out;
  }
  out.tau = mean_spectrum(taus);
  return out;
}

bool is_cloudy(const FieldDay& day, double threshold) {
  double dni = 0.0;
  double gni = 0.0;
  bool any = false;
  for (const FieldRecord& r : day.records) {
    if (r.gni_wm2 > 0.0) {
      dni += r.dni_wm2;
      gni += r.gni_wm2;
      any = true;
    }
  }
  if (!any) {
    throw Error(ErrorKind::NoIrradianceRecords,
                fmt::format("no GNI > 0 records on {}", format_date(day.date)));
  }
  return dni / gni < threshold;
}

DaySelection select_spectra(Date scan_date, std::span<const FieldDay> days,
                            double cloudy_threshold) {
  auto clear_day = [&](int offset) -> const FieldDay* {
    Date want = add_days(scan_date, offset);
    for (const FieldDay& d : days) {
      if (d.date != want) continue;
      try {
        return is_cloudy(d, cloudy_threshold) ? nullptr : &d;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::NoIrradianceRecords) return nullptr;
        throw;
      }
    }
    return nullptr;
  };
  for (int offset : {0, -1, 1}) {
    if (const FieldDay* d = clear_day(offset)) return {d, offset};
  }
  throw Error(ErrorKind::NoClearDay,
              fmt::format("no clear day within one day of {}", format_date(scan_date)));
}

std::size_t noon_record(const FieldDay& day) {
  const auto noon = chr::sys_days(day.date) + chr::hours(12);
  std::optional<std::size_t> best;
  chr::seconds best_gap{};
  for (std::size_t i = 0; i < day.records.size(); ++i) {
    if (!day.records[i].spectral_dni) continue;
    auto gap = chr::abs(day.records[i].time - noon);
    if (!best || gap < best_gap) {
      best = i;
      best_gap = gap;
    }
  }
  if (!best) {
    throw Error(ErrorKind::NoSpectralRecords,
                fmt::format("no spectral records on {}", format_date(day.date)));
  }
  return *best;
}

std::pair<IndexReport, std::size_t> day_report(const FieldDay& day,
                                               const CellModel& cell,
                                               const Spectrum& tau,
                                               const PipelineOptions& options) {
  CurrentTotals totals(cell, tau);
  if (options.aggregation == Aggregation::Noon) {
    totals.add(*day.records[noon_record(day)].spectral_dni);
  } else {
    for (const FieldRecord& r : day.records) {
      if (r.spectral_dni) totals.add(*r.spectral_dni);
    }
    if (totals.records() == 0) {
      throw Error(ErrorKind::NoSpectralRecords,
                  fmt::format("no spectral records on {}", format_date(day.date)));
    }
  }
  return {totals.report(options.pair), totals.records()};
}

std::size_t CampaignResult::accepted_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      weekly.begin(), weekly.end(), [](const WeekResult& w) { return w.accepted; }));
}

namespace {

std::optional<double> index_value(const IndexReport& r, std::string_view index) {
  if (index == "sratio") return r.sratio;
  if (index == "bsratio") return r.bsratio;
  if (index == "ssratio") return r.ssratio;
  if (index == "smr_cleaned") return r.smr_cleaned;
  if (index == "smr_soiled") return r.smr_soiled;
  if (index == "smratio") return r.smratio;
  if (index.starts_with("ast_")) {
    for (const auto& [band, v] : r.ast) {
      if (band == index.substr(4)) return v;
    }
  }
  return std::nullopt;
}

std::vector<std::string> index_names(std::span<const std::string> bands) {
  std::vector<std::string> names{"sratio",      "bsratio",    "ssratio",
                                 "smr_cleaned", "smr_soiled", "smratio"};
  for (const std::string& b : bands) names.push_back("ast_" + b);
  return names;
}

}  // namespace

std::vector<std::pair<int, double>> CampaignResult::series(std::string_view index) const {
  std::vector<std::pair<int, double>> out;
  for (const WeekResult& w : weekly) {
    if (!w.accepted) continue;
    auto v = index_value(*w.report, index);
    if (!v) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("unknown index '{}'", index));
    }
    out.emplace_back(w.week_id, *v);
  }
  return out;
}

CampaignResult run_campaign(std::span<const WeeklyMeasurement> weeks,
                            std::span<const FieldDay> days, const CellModel& cell,
                            const PipelineOptions& options) {
  CampaignResult result;
  result.aggregation = options.aggregation;
  for (const Junction& j : cell.junctions()) result.bands.push_back(j.name);
  result.bands.push_back(cell.full_band().name);

  std::vector<const WeeklyMeasurement*> order;
  for (const WeeklyMeasurement& w : weeks) order.push_back(&w);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) {
    return a->week_id < b->week_id;
  });

  for (const WeeklyMeasurement* week : order) {
    WeekResult wr;
    wr.week_id = week->week_id;
    wr.scan_date = week->scan_date;
    try {
      WeekValidation v = validate_week(*week, cell, options);
      wr.replicate_ast_mj = v.replicate_ast_mj;
      wr.replicate_spread = v.spread;
      wr.noisy_samples = v.noisy_samples;
      wr.clamped_samples = v.clamped_samples;
      if (!v.accepted()) {
        wr.rejection_reason = v.rejection;
        wr.rejection_detail =
            v.rejection == "SpreadExceeded"
                ? fmt::format("replicate AST_MJ spread {} exceeds {}", v.spread,
                              options.max_replicate_spread)
                : fmt::format("a scan does not cover [{}, {}] nm",
                              options.scan_band.lambda_min_nm,
                              options.scan_band.lambda_max_nm);
      } else {
        wr.tau = std::move(v.tau);
        for (const Junction& j : cell.junctions()) {
          wr.ast_by_band.emplace_back(j.name, ast(*wr.tau, j.band));
        }
        wr.ast_by_band.emplace_back(cell.full_band().name,
                                    ast(*wr.tau, cell.full_band()));
        DaySelection sel = select_spectra(week->scan_date, days, options.cloudy_threshold);
        wr.spectra_date = sel.day->date;
        auto [report, used] = day_report(*sel.day, cell, *wr.tau, options);
        wr.report = std::move(report);
        wr.spectral_records = used;
        wr.accepted = true;
      }
    } catch (const Error& e) {
      wr.accepted = false;
      wr.report.reset();
      wr.rejection_reason = std::string(to_string(e.kind()));
      wr.rejection_detail = e.what();
    }
    result.weekly.push_back(std::move(wr));
  }

  for (const std::string& name : index_names(result.bands)) {
    SummaryStat s;
    s.name = name;
    auto values = result.series(name);
    if (!values.empty()) {
      s.min = std::numeric_limits<double>::infinity();
      s.max = -s.min;
      double sum = 0.0;
      for (const auto& [week, v] : values) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
      }
      s.n = values.size();
      s.mean = sum / static_cast<double>(s.n);
    }
    result.summary.push_back(s);
  }
  return result;
}

FitResult soiling_rate_fit(const CampaignResult& result, int first_week, int last_week) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [week, v] : result.series("ast_MJ")) {
    if (week >= first_week && week <= last_week) {
      x.push_back(static_cast<double>(week));
      y.push_back(v);
    }
  }
  if (x.size() < 3) {
    throw Error(ErrorKind::TooFewPoints,
                fmt::format("{} accepted weeks in [{}, {}], need 3", x.size(),
                            first_week, last_week));
  }
  return linfit(x, y);
}

std::vector<NamedFit> campaign_fits(const CampaignResult& result, const CellModel& cell,
                                    const JunctionPair& pair) {
  std::vector<double> x;
  for (const auto& [week, v] : result.series("ast_MJ")) x.push_back(v);

  std::vector<std::pair<std::string, std::vector<double>>> ys;
  for (const char* name : {"sratio", "bsratio", "ssratio", "smratio"}) {
    std::vector<double> y;
    for (const auto& [week, v] : result.series(name)) y.push_back(v);
    ys.emplace_back(name, std::move(y));
  }
  const std::string num = "ast_" + pair.numerator;
  auto num_series = result.series(num);
  for (const Junction& j : cell.junctions()) {
    if (j.name == pair.numerator) continue;
    auto den_series = result.series("ast_" + j.name);
    std::vector<double> y;
    for (std::size_t i = 0; i < num_series.size(); ++i) {
      y.push_back(num_series[i].second / den_series[i].second);
    }
    ys.emplace_back(fmt::format("{}/ast_{}", num, j.name), std::move(y));
  }

  std::vector<NamedFit> fits;
  for (auto& [name, y] : ys) {
    NamedFit f;
    f.key = name + "~ast_MJ";
    try {
      f.fit = linfit(x, y);
    } catch (const Error& e) {
      f.error = std::string(to_string(e.kind()));
    }
    fits.push_back(std::move(f));
  }
  return fits;
}

// ---------------------------------------------------------------------------
// Files

namespace {

const char* const kFieldHeader =
    "timestamp_iso8601,dni_wm2,gni_wm2,ghi_wm2,dhi_wm2,rainfall_mm,pm10,pm25,"
    "spectrum_file";

using SpectrumCache = std::map<fs::path, std::shared_ptr<const Spectrum>>;

FieldDay read_field_csv_cached(const fs::path& path, SpectrumCache& cache) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::FileNotFound,
                fmt::format("cannot open field file {}", path.string()));
  }
  auto fail = [&](std::size_t line, const std::string& what) {
    return Error(ErrorKind::ParseError,
                 fmt::format("{}:{}: {}", path.string(), line, what));
  };
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || trim(line) != kFieldHeader) {
    throw fail(1, fmt::format("header must be '{}'", kFieldHeader));
  }
  FieldDay day;
  bool dated = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cols = split_csv(line);
    if (cols.size() != 9) throw fail(line_no, "expected 9 columns");
    FieldRecord r;
    try {
      r.time = parse_timestamp(cols[0]);
    } catch (const Error& e) {
      throw fail(line_no, e.what());
    }
    double* required[] = {&r.dni_wm2, &r.gni_wm2, &r.ghi_wm2, &r.dhi_wm2};
    for (std::size_t c = 0; c < 4; ++c) {
      auto v = parse_double(cols[c + 1]);
      if (!v) throw fail(line_no, fmt::format("bad irradiance '{}'", cols[c + 1]));
      *required[c] = *v;
    }
    std::optional<double>* optional[] = {&r.rainfall_mm, &r.pm10, &r.pm25};
    for (std::size_t c = 0; c < 3; ++c) {
      if (cols[c + 5].empty()) continue;
      auto v = parse_double(cols[c + 5]);
      if (!v) throw fail(line_no, fmt::format("bad number '{}'", cols[c + 5]));
      *optional[c] = *v;
    }
    if (!cols[8].empty()) {
      fs::path sp = path.parent_path() / std::string(cols[8]);
      auto& slot = cache[sp];
      if (!slot) slot = std::make_shared<const Spectrum>(read_spectrum_csv(sp));
      r.spectral_dni = slot;
    }
    if (!dated) {
      day.date = date_of(r.time);
      dated = true;
    }
    day.records.push_back(std::move(r));
  }
  if (!dated) {
    // An empty day is named after its file.
    day.date = parse_date(path.stem().string());
  }
  check_field_day(day);
  return day;
}

std::vector<Spectrum> read_scans(const std::vector<fs::path>& paths) {
  std::vector<Spectrum> out;
  for (const fs::path& p : paths) out.push_back(read_spectrum_csv(p));
  return out;
}

}  // namespace

FieldDay read_field_csv(const fs::path& path) {
  SpectrumCache cache;
  return read_field_csv_cached(path, cache);
}

void write_field_csv(const fs::path& path, const FieldDay& day,
                     std::span<const std::string> spectrum_files) {
  std::string out = std::string(kFieldHeader) + "\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
  };
  for (std::size_t i = 0; i < day.records.size(); ++i) {
    const FieldRecord& r = day.records[i];
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", format_timestamp(r.time),
                       format_number(r.dni_wm2), format_number(r.gni_wm2),
                       format_number(r.ghi_wm2), format_number(r.dhi_wm2),
                       opt(r.rainfall_mm), opt(r.pm10), opt(r.pm25),
                       i < spectrum_files.size() ? spectrum_files[i] : std::string());
  }
  write_file_atomic(path, out);
}

CampaignData load_campaign_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::FileNotFound,
                fmt::format("data directory {} not found", dir.string()));
  }
  CampaignData data;
  fs::path field_dir = dir / "field";

  if (fs::exists(dir / "manifest.json")) {
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
      if (manifest.contains("field_dir")) {
        field_dir = dir / manifest.at("field_dir").get<std::string>();
      }
      for (const auto& w : manifest.at("weeks")) {
        WeeklyMeasurement m;
        m.week_id = w.at("week_id").get<int>();
        m.scan_date = parse_date(w.at("scan_date").get<std::string>());
        std::vector<fs::path> soiled, control;
        for (const auto& p : w.at("soiled")) soiled.push_back(dir / p.get<std::string>());
        for (const auto& p : w.at("control")) control.push_back(dir / p.get<std::string>());
        m.soiled_scans = read_scans(soiled);
        m.control_scans = read_scans(control);
        data.weeks.push_back(std::move(m));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::ParseError, fmt::format("manifest.json: {}", e.what()));
    }
  } else if (fs::exists(dir / "weeks.csv")) {
    std::istringstream in(read_file(dir / "weeks.csv"));
    std::string line;
    std::getline(in, line);
    if (trim(line) != "week_id,scan_date") {
      throw Error(ErrorKind::ParseError, "weeks.csv header must be 'week_id,scan_date'");
    }
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto cols = split_csv(line);
      auto id = cols.size() == 2 ? parse_int(cols[0]) : std::nullopt;
      if (!id) {
        throw Error(ErrorKind::ParseError, fmt::format("weeks.csv: bad row '{}'", line));
      }
      WeeklyMeasurement m;
      m.week_id = *id;
      m.scan_date = parse_date(cols[1]);
      for (int r = 1; r <= 3; ++r) {
        for (auto [role, scans] : {std::pair{"soiled", &m.soiled_scans},
                                   std::pair{"control", &m.control_scans}}) {
          fs::path p = dir / "scans" / fmt::format("week{:02}_{}_{}.csv", *id, role, r);
          if (fs::exists(p)) scans->push_back(read_spectrum_csv(p));
        }
      }
      data.weeks.push_back(std::move(m));
    }
  }
  if (data.weeks.empty()) {
    throw Error(ErrorKind::NoWeeksFound,
                fmt::format("no weeks found in {}", dir.string()));
  }

  if (fs::is_directory(field_dir)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(field_dir)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
      std::string stem = entry.path().stem().string();
      try {
        parse_date(stem);
      } catch (const Error&) {
        continue;
      }
      files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    SpectrumCache cache;
    for (const fs::path& f : files) data.days.push_back(read_field_csv_cached(f, cache));
  }
  return data;
}

ojson to_json(std::span<const NamedFit> fits) {
  ojson j = ojson::object();
  for (const NamedFit& f : fits) {
    if (f.fit) j[f.key] = to_json(*f.fit);
    else j[f.key] = {{"error", f.error}};
  }
  return j;
}

namespace {

ojson spectrum_json(const Spectrum& s) {
  ojson j;
  j["wavelength_nm"] = std::vector<double>(s.wavelengths().begin(), s.wavelengths().end());
  j["value"] = std::vector<double>(s.values().begin(), s.values().end());
  return j;
}

}  // namespace

ojson to_json(const CampaignResult& result, std::span<const NamedFit> fits) {
  ojson j;
  j["aggregation"] = std::string(to_string(result.aggregation));
  j["weeks_total"] = result.weekly.size();
  j["weeks_accepted"] = result.accepted_count();
  ojson weekly = ojson::array();
  for (const WeekResult& w : result.weekly) {
    ojson e;
    e["week_id"] = w.week_id;
    e["scan_date"] = format_date(w.scan_date);
    e["accepted"] = w.accepted;
    e["rejection_reason"] = w.rejection_reason.empty() ? ojson() : ojson(w.rejection_reason);
    e["rejection_detail"] = w.rejection_detail.empty() ? ojson() : ojson(w.rejection_detail);
    e["replicate_ast_mj"] = w.replicate_ast_mj;
    e["replicate_spread"] = w.replicate_spread;
    e["noisy_samples"] = w.noisy_samples;
    e["clamped_samples"] = w.clamped_samples;
    e["spectra_date"] = w.spectra_date ? ojson(format_date(*w.spectra_date)) : ojson();
    e["spectral_records"] = w.spectral_records;
    ojson astj = ojson::object();
    for (const auto& [band, v] : w.ast_by_band) astj[band] = v;
    e["ast_by_band"] = astj;
    e["report"] = w.report ? to_json(*w.report) : ojson();
    e["tau"] = w.tau ? spectrum_json(*w.tau) : ojson();
    weekly.push_back(std::move(e));
  }
  j["weekly"] = std::move(weekly);
  ojson summary = ojson::object();
  for (const SummaryStat& s : result.summary) {
    if (s.n == 0) {
      summary[s.name] = {{"n", 0}};
    } else {
      summary[s.name] = {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"n", s.n}};
    }
  }
  j["summary"] = std::move(summary);
  j["fits"] = to_json(fits);
  return j;
}

std::string weekly_csv(const CampaignResult& result) {
  std::vector<std::string> cols{"week_id",       "scan_date",   "accepted",
                                "rejection_reason", "spectra_date", "replicate_spread",
                                "sratio",        "bsratio",     "ssratio",
                                "smr_cleaned",   "smr_soiled",  "smratio"};
  for (const std::string& b : result.bands) cols.push_back("ast_" + b);
  cols.push_back("limiting_cleaned");
  cols.push_back("limiting_soiled");

  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const WeekResult& w : result.weekly) {
    std::vector<std::string> row{
        std::to_string(w.week_id), format_date(w.scan_date),
        w.accepted ? "true" : "false", w.rejection_reason,
        w.spectra_date ? format_date(*w.spectra_date) : std::string(),
        w.replicate_ast_mj.empty() ? std::string() : format_number(w.replicate_spread)};
    for (std::size_t c = 6; c < 12; ++c) {
      row.push_back(w.report ? format_number(*index_value(*w.report, cols[c]))
                             : std::string());
    }
    for (const std::string& b : result.bands) {
      std::string cell;
      for (const auto& [band, v] : w.ast_by_band) {
        if (band == b) cell = format_number(v);
      }
      row.push_back(cell);
    }
    row.push_back(w.report ? w.report->limiting_cleaned : std::string());
    row.push_back(w.report ? w.report->limiting_soiled : std::string());
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

void write_campaign_outputs(const fs::path& out_dir, const CampaignResult& result,
                            std::span<const NamedFit> fits) {
  write_file_atomic(out_dir / "campaign.json", to_json(result, fits).dump(2) + "\n");
  write_file_atomic(out_dir / "weekly.csv", weekly_csv(result));
  write_file_atomic(out_dir / "fits.json", to_json(fits).dump(2) + "\n");
}

}  // namespace cpvsoil
