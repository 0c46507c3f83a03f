#include "cpvsoil/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <fmt/format.h>

#include "cpvsoil/error.hpp"
#include "cpvsoil/io.hpp"

namespace cpvsoil {

namespace fs = std::filesystem;
namespace chr = std::chrono;

std::vector<double> uniform_grid(double lambda_min_nm, double lambda_max_nm,
                                 double step_nm) {
  if (!(step_nm > 0.0) || !(lambda_min_nm < lambda_max_nm)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("bad grid [{}, {}] step {}", lambda_min_nm, lambda_max_nm,
                            step_nm));
  }
  std::vector<double> grid;
  const double span = lambda_max_nm - lambda_min_nm;
  const auto n = static_cast<std::size_t>(std::floor(span / step_nm + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) {
    grid.push_back(lambda_min_nm + static_cast<double>(i) * step_nm);
  }
  if (grid.back() > lambda_max_nm) grid.back() = lambda_max_nm;
  if (lambda_max_nm - grid.back() > 1e-9 * step_nm) grid.push_back(lambda_max_nm);
  return grid;
}

Spectrum synth_tau(const SoilingModel& model, std::span<const double> grid) {
  if (!(model.k >= 0.0) || !(model.lambda_ref_nm > 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("soiling model needs k >= 0 and lambda_ref > 0, got k={}",
                            model.k));
  }
  std::vector<double> values;
  values.reserve(grid.size());
  for (double wl : grid) {
    values.push_back(std::exp(-model.k * std::pow(model.lambda_ref_nm / wl, model.alpha)));
  }
  return Spectrum(std::vector<double>(grid.begin(), grid.end()), std::move(values),
                  SpectrumKind::Transmittance);
}

Spectrum synth_spectrum(const Spectrum& reference, double tilt,
                        std::span<const double> grid, double lambda_ref_nm) {
  if (reference.kind() != SpectrumKind::Irradiance) {
    throw Error(ErrorKind::UnitMismatch, "synthetic spectra start from an Irradiance");
  }
  Spectrum base = resample(reference, grid);
  if (tilt == 0.0) return base;
  std::vector<double> values(base.values().begin(), base.values().end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] *= std::pow(lambda_ref_nm / grid[i], tilt);
  }
  Spectrum shaped(std::vector<double>(grid.begin(), grid.end()), std::move(values),
                  SpectrumKind::Irradiance);
  const double lo = grid.front();
  const double hi = grid.back();
  return shaped.scaled(integrate(base, lo, hi) / integrate(shaped, lo, hi));
}

Spectrum synth_spectrum(const Spectrum& reference, double tilt, double lambda_ref_nm) {
  return synth_spectrum(reference, tilt, reference.wavelengths(), lambda_ref_nm);
}

// ---------------------------------------------------------------------------
// Scenario documents

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, "scenario: " + what);
}

}  // namespace

CampaignScenario parse_scenario(const nlohmann::json& doc) {
  static const std::set<std::string> known{
      "weeks",       "start_date",       "initial_k",
      "deposition_per_week", "alpha",    "lambda_ref_nm",
      "rain_weeks",  "spectrum_tilt",    "tilt_seasonal_amplitude",
      "noise_sigma", "gain_sigma",       "scan_step_nm",
      "spectrum_step_nm", "cloudy_days", "spectral_hours",
      "pm10_ugm3",   "pm25_ugm3",        "seed"};
  require(doc.is_object(), "document must be an object");
  for (const auto& [key, value] : doc.items()) {
    require(known.count(key) > 0, fmt::format("unknown field '{}'", key));
  }

  CampaignScenario s;
  try {
    s.weeks = doc.value("weeks", s.weeks);
    if (doc.contains("start_date")) {
      s.start_date = parse_date(doc.at("start_date").get<std::string>());
    }
    s.initial_k = doc.value("initial_k", s.initial_k);
    s.deposition_per_week = doc.value("deposition_per_week", s.deposition_per_week);
    s.alpha = doc.value("alpha", s.alpha);
    s.lambda_ref_nm = doc.value("lambda_ref_nm", s.lambda_ref_nm);
    for (const auto& r : doc.value("rain_weeks", nlohmann::json::array())) {
      s.rain_weeks.push_back({r.at("week").get<int>(), r.at("wash_fraction").get<double>(),
                              r.value("rainfall_mm", 0.0)});
    }
    s.spectrum_tilt = doc.value("spectrum_tilt", s.spectrum_tilt);
    s.tilt_seasonal_amplitude =
        doc.value("tilt_seasonal_amplitude", s.tilt_seasonal_amplitude);
    s.noise_sigma = doc.value("noise_sigma", s.noise_sigma);
    s.gain_sigma = doc.value("gain_sigma", s.gain_sigma);
    s.scan_step_nm = doc.value("scan_step_nm", s.scan_step_nm);
    s.spectrum_step_nm = doc.value("spectrum_step_nm", s.spectrum_step_nm);
    for (const auto& c : doc.value("cloudy_days", nlohmann::json::array())) {
      s.cloudy_days.push_back({c.at("week").get<int>(), c.value("offset_days", 0)});
    }
    if (doc.contains("spectral_hours")) {
      s.spectral_hours = doc.at("spectral_hours").get<std::vector<int>>();
    }
    if (doc.contains("pm10_ugm3")) s.pm10_ugm3 = doc.at("pm10_ugm3").get<double>();
    if (doc.contains("pm25_ugm3")) s.pm25_ugm3 = doc.at("pm25_ugm3").get<double>();
    s.seed = doc.value("seed", s.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, fmt::format("scenario: {}", e.what()));
  }

  if (s.weeks == 0) throw Error(ErrorKind::EmptyScenario, "scenario has zero weeks");
  require(s.weeks > 0 && s.weeks < 100, "weeks must be in 1..99");
  require(s.initial_k >= 0.0, "initial_k must be >= 0");
  require(s.deposition_per_week >= 0.0, "deposition_per_week must be >= 0");
  require(std::isfinite(s.alpha), "alpha must be finite");
  require(s.lambda_ref_nm > 0.0, "lambda_ref_nm must be > 0");
  require(std::isfinite(s.spectrum_tilt) && std::isfinite(s.tilt_seasonal_amplitude),
          "tilt must be finite");
  require(s.noise_sigma >= 0.0 && s.noise_sigma < 0.05, "noise_sigma must be in [0, 0.05)");
  require(s.gain_sigma >= 0.0 && s.gain_sigma < 0.05, "gain_sigma must be in [0, 0.05)");
  require(s.scan_step_nm > 0.0 && s.spectrum_step_nm > 0.0, "steps must be > 0");
  for (const RainEvent& r : s.rain_weeks) {
    require(r.week >= 1 && r.week <= s.weeks, fmt::format("rain week {} out of range", r.week));
    require(r.wash_fraction >= 0.0 && r.wash_fraction <= 1.0,
            "wash_fraction must be in [0, 1]");
    require(r.rainfall_mm >= 0.0, "rainfall_mm must be >= 0");
  }
  for (const CloudyDay& c : s.cloudy_days) {
    require(c.week >= 1 && c.week <= s.weeks, fmt::format("cloudy week {} out of range", c.week));
    require(c.offset_days >= -1 && c.offset_days <= 1, "cloudy offset_days must be -1, 0 or 1");
  }
  for (int h : s.spectral_hours) {
    require(h >= 6 && h <= 18, "spectral_hours must lie in 6..18");
  }
  return s;
}

CampaignScenario load_scenario(const fs::path& path) {
  std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_scenario(doc);
}

nlohmann::ordered_json to_json(const CampaignScenario& s) {
  nlohmann::ordered_json j;
  j["weeks"] = s.weeks;
  j["start_date"] = format_date(s.start_date);
  j["initial_k"] = s.initial_k;
  j["deposition_per_week"] = s.deposition_per_week;
  j["alpha"] = s.alpha;
  j["lambda_ref_nm"] = s.lambda_ref_nm;
  j["rain_weeks"] = nlohmann::ordered_json::array();
  for (const RainEvent& r : s.rain_weeks) {
    j["rain_weeks"].push_back(
        {{"week", r.week}, {"wash_fraction", r.wash_fraction}, {"rainfall_mm", r.rainfall_mm}});
  }
  j["spectrum_tilt"] = s.spectrum_tilt;
  j["tilt_seasonal_amplitude"] = s.tilt_seasonal_amplitude;
  j["noise_sigma"] = s.noise_sigma;
  j["gain_sigma"] = s.gain_sigma;
  j["scan_step_nm"] = s.scan_step_nm;
  j["spectrum_step_nm"] = s.spectrum_step_nm;
  j["cloudy_days"] = nlohmann::ordered_json::array();
  for (const CloudyDay& c : s.cloudy_days) {
    j["cloudy_days"].push_back({{"week", c.week}, {"offset_days", c.offset_days}});
  }
  j["spectral_hours"] = s.spectral_hours;
  if (s.pm10_ugm3) j["pm10_ugm3"] = *s.pm10_ugm3;
  if (s.pm25_ugm3) j["pm25_ugm3"] = *s.pm25_ugm3;
  j["seed"] = s.seed;
  return j;
}

std::vector<double> k_trajectory(const CampaignScenario& scenario) {
  std::vector<double> k;
  double current = scenario.initial_k;
  for (int w = 1; w <= scenario.weeks; ++w) {
    double wash = 0.0;
    for (const RainEvent& r : scenario.rain_weeks) {
      if (r.week == w) wash = std::max(wash, r.wash_fraction);
    }
    current = (current + scenario.deposition_per_week) * (1.0 - wash);
    k.push_back(current);
  }
  return k;
}

// ---------------------------------------------------------------------------
// Campaign generation

namespace {

constexpr double kScanMin = 300.0;
constexpr double kScanMax = 2000.0;

// Clean glass coupon: flat in the visible, absorbing in the near UV.
double control_curve(double wl) { return 0.915 - 0.25 * std::exp(-(wl - 300.0) / 15.0); }

struct Irradiance {
  double dni, gni, ghi, dhi;
};

Irradiance irradiance_at(double hour, bool cloudy) {
  const double s = std::max(0.0, std::sin(std::numbers::pi * (hour - 6.0) / 12.0));
  Irradiance out{};
  out.dni = 900.0 * std::pow(s, 0.4) * (cloudy ? 0.2 : 1.0);
  out.dhi = (cloudy ? 150.0 : 60.0) * s;
  out.gni = out.dni + out.dhi;
  out.ghi = out.dni * s + out.dhi;
  return out;
}

Spectrum noisy_scan(std::span<const double> grid, std::span<const double> clean,
                    double sigma, double gain_sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double gain = 1.0 + gain_sigma * normal(rng);
  std::vector<double> values(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    values[i] = clean[i] * gain * (1.0 + sigma * normal(rng));
  }
  return Spectrum(std::vector<double>(grid.begin(), grid.end()), std::move(values),
                  SpectrumKind::Transmittance);
}

}  // namespace

SynthCampaign synth_campaign(const CampaignScenario& scenario, const CellModel& cell) {
  if (scenario.weeks <= 0) {
    throw Error(ErrorKind::EmptyScenario, "scenario has zero weeks");
  }
  SynthCampaign out;
  out.k = k_trajectory(scenario);

  const std::vector<double> scan_grid = uniform_grid(kScanMin, kScanMax, scenario.scan_step_nm);
  std::vector<double> control(scan_grid.size());
  for (std::size_t i = 0; i < scan_grid.size(); ++i) control[i] = control_curve(scan_grid[i]);

  const Spectrum& reference = cell.reference_spectrum();
  const std::vector<double> spectrum_grid =
      uniform_grid(std::max(kScanMin, reference.support_min()),
                   std::min(kScanMax, reference.support_max()), scenario.spectrum_step_nm);

  for (int w = 1; w <= scenario.weeks; ++w) {
    const double k = out.k[static_cast<std::size_t>(w - 1)];
    const double tilt =
        scenario.spectrum_tilt +
        scenario.tilt_seasonal_amplitude * std::sin(2.0 * std::numbers::pi * (w - 1) / 52.0);
    out.tilt.push_back(tilt);

    std::seed_seq seq{static_cast<std::uint32_t>(scenario.seed),
                      static_cast<std::uint32_t>(scenario.seed >> 32),
                      static_cast<std::uint32_t>(w)};
    std::mt19937_64 rng(seq);

    WeeklyMeasurement week;
    week.week_id = w;
    week.scan_date = add_days(scenario.start_date, 7 * (w - 1));
    Spectrum tau = synth_tau({k, scenario.alpha, scenario.lambda_ref_nm}, scan_grid);
    std::vector<double> soiled(scan_grid.size());
    for (std::size_t i = 0; i < scan_grid.size(); ++i) soiled[i] = control[i] * tau.values()[i];
    for (int r = 0; r < 3; ++r) {
      week.soiled_scans.push_back(
          noisy_scan(scan_grid, soiled, scenario.noise_sigma, scenario.gain_sigma, rng));
      week.control_scans.push_back(
          noisy_scan(scan_grid, control, scenario.noise_sigma, scenario.gain_sigma, rng));
    }

    const Spectrum base =
        synth_spectrum(reference, tilt, spectrum_grid, scenario.lambda_ref_nm);
    const double base_total = integrate(base, spectrum_grid.front(), spectrum_grid.back());
    double rainfall = 0.0;
    for (const RainEvent& r : scenario.rain_weeks) {
      if (r.week == w) rainfall += r.rainfall_mm;
    }

    for (int offset = -1; offset <= 1; ++offset) {
      const bool cloudy = std::any_of(
          scenario.cloudy_days.begin(), scenario.cloudy_days.end(),
          [&](const CloudyDay& c) { return c.week == w && c.offset_days == offset; });
      FieldDay day;
      day.date = add_days(week.scan_date, offset);
      for (int minute = 6 * 60; minute <= 18 * 60; minute += 5) {
        FieldRecord rec;
        rec.time = chr::sys_days(day.date) + chr::minutes(minute);
        const double hour = minute / 60.0;
        Irradiance irr = irradiance_at(hour, cloudy);
        rec.dni_wm2 = irr.dni;
        rec.gni_wm2 = irr.gni;
        rec.ghi_wm2 = irr.ghi;
        rec.dhi_wm2 = irr.dhi;
        rec.rainfall_mm = (offset == -1 && minute == 6 * 60) ? rainfall : 0.0;
        rec.pm10 = scenario.pm10_ugm3;
        rec.pm25 = scenario.pm25_ugm3;
        const bool spectral =
            minute % 60 == 0 &&
            std::find(scenario.spectral_hours.begin(), scenario.spectral_hours.end(),
                      minute / 60) != scenario.spectral_hours.end();
        if (spectral && irr.dni > 0.0) {
          rec.spectral_dni = std::make_shared<const Spectrum>(base.scaled(irr.dni / base_total));
        }
        day.records.push_back(std::move(rec));
      }
      out.days.push_back(std::move(day));
    }
    out.weeks.push_back(std::move(week));
  }
  return out;
}

void write_campaign_dir(const fs::path& dir, const CampaignScenario& scenario,
                        const SynthCampaign& campaign) {
  std::string weeks_csv = "week_id,scan_date\n";
  std::string truth_csv = "week_id,k,tilt\n";
  for (std::size_t i = 0; i < campaign.weeks.size(); ++i) {
    const WeeklyMeasurement& w = campaign.weeks[i];
    weeks_csv += fmt::format("{},{}\n", w.week_id, format_date(w.scan_date));
    truth_csv += fmt::format("{},{},{}\n", w.week_id, format_number(campaign.k[i]),
                             format_number(campaign.tilt[i]));
    for (std::size_t r = 0; r < w.soiled_scans.size(); ++r) {
      write_spectrum_csv(
          dir / "scans" / fmt::format("week{:02}_soiled_{}.csv", w.week_id, r + 1),
          w.soiled_scans[r]);
    }
    for (std::size_t r = 0; r < w.control_scans.size(); ++r) {
      write_spectrum_csv(
          dir / "scans" / fmt::format("week{:02}_control_{}.csv", w.week_id, r + 1),
          w.control_scans[r]);
    }
  }
  for (const FieldDay& day : campaign.days) {
    std::vector<std::string> files;
    for (const FieldRecord& rec : day.records) {
      if (!rec.spectral_dni) {
        files.emplace_back();
        continue;
      }
      auto tod = chr::hh_mm_ss(rec.time - chr::floor<chr::days>(rec.time));
      std::string name =
          fmt::format("spectra/{}T{:02}{:02}.csv", format_date(day.date),
                      tod.hours().count(), tod.minutes().count());
      write_spectrum_csv(dir / "field" / name, *rec.spectral_dni);
      files.push_back(std::move(name));
    }
    write_field_csv(dir / "field" / (format_date(day.date) + ".csv"), day, files);
  }
  write_file_atomic(dir / "weeks.csv", weeks_csv);
  write_file_atomic(dir / "truth.csv", truth_csv);
  write_file_atomic(dir / "scenario.json", to_json(scenario).dump(2) + "\n");
}

}  // namespace cpvsoil
