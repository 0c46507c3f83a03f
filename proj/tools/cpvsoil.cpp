// cpvsoil: soiling indexes for multi-junction cells from coupon scans and
// direct spectra.
//
//   cpvsoil compute  --spectrum E.csv --tau tau.csv --cell cell.json
//   cpvsoil campaign --cell cell.json --data DIR --out DIR [--aggregation noon|daily]
//   cpvsoil synth    --scenario scenario.json --out DIR [--cell cell.json] [--seed N]
//
// Exit status: 0 success, 1 bad input, 2 computation failure. Failures print
// {"error": <kind>, "message": ...} on stderr.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "cpvsoil/cell_model.hpp"
#include "cpvsoil/error.hpp"
#include "cpvsoil/io.hpp"
#include "cpvsoil/metrics.hpp"
#include "cpvsoil/pipeline.hpp"
#include "cpvsoil/synth.hpp"

namespace fs = std::filesystem;
using namespace cpvsoil;

namespace {

constexpr const char* kVersion = "1.0.0";

struct RunConfig {
  std::string cell_path;
  std::string data_dir;
  std::string out_dir;
  std::string aggregation = "daily";
  std::string scenario_path;
  std::string reference_path;
  std::string spectrum_path;
  std::string tau_path;
  std::string pair = "top:mid";
  std::string rate_weeks;
  std::optional<std::uint64_t> seed;
  int verbosity = 0;
};

bool g_verbose = false;

template <typename... Args>
void log(fmt::format_string<Args...> format, Args&&... args) {
  if (g_verbose) {
    std::cerr << "cpvsoil: " << fmt::format(format, std::forward<Args>(args)...) << '\n';
  }
}

int report_error(std::string_view kind, std::string_view message, int status) {
  nlohmann::ordered_json err;
  err["error"] = kind;
  err["message"] = message;
  std::cerr << err.dump() << '\n';
  return status;
}

void require_file(const std::string& path, std::string_view what) {
  if (path.empty() || !fs::is_regular_file(path)) {
    throw Error(ErrorKind::FileNotFound, fmt::format("{} '{}' not found", what, path));
  }
}

void require_dir(const std::string& path, std::string_view what) {
  if (path.empty() || !fs::is_directory(path)) {
    throw Error(ErrorKind::FileNotFound, fmt::format("{} '{}' not found", what, path));
  }
}

std::string sha256_hex(const fs::path& path) {
  std::string data = read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::IoError, "sha256 failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

JunctionPair parse_pair(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("--pair must look like top:mid, got '{}'", text));
  }
  return {text.substr(0, colon), text.substr(colon + 1)};
}

CellLoadOptions cell_options(const RunConfig& cfg) {
  CellLoadOptions opts;
  if (!cfg.reference_path.empty()) {
    require_file(cfg.reference_path, "reference spectrum");
    opts.reference_spectrum = cfg.reference_path;
  }
  return opts;
}

int cmd_compute(const RunConfig& cfg) {
  require_file(cfg.spectrum_path, "spectrum file");
  require_file(cfg.tau_path, "tau file");
  require_file(cfg.cell_path, "cell config");
  CellModel cell = load_cell(fs::path(cfg.cell_path), cell_options(cfg));
  Spectrum irradiance = read_spectrum_csv(fs::path(cfg.spectrum_path));
  Spectrum tau = read_spectrum_csv(fs::path(cfg.tau_path));
  IndexReport report = index_report(irradiance, cell, tau, parse_pair(cfg.pair));
  std::cout << to_json(report).dump(2) << '\n';
  return 0;
}

int cmd_campaign(const RunConfig& cfg) {
  require_file(cfg.cell_path, "cell config");
  require_dir(cfg.data_dir, "data directory");
  if (cfg.out_dir.empty()) throw Error(ErrorKind::InvalidArgument, "--out is required");

  PipelineOptions options;
  options.aggregation = parse_aggregation(cfg.aggregation);
  options.pair = parse_pair(cfg.pair);
  std::optional<std::pair<int, int>> rate_weeks;
  if (!cfg.rate_weeks.empty()) {
    int a = 0, b = 0;
    char sep = 0;
    std::istringstream in(cfg.rate_weeks);
    if (!(in >> a >> sep >> b) || sep != ':' || a > b || !in.eof()) {
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("--rate-weeks must look like 28:36, got '{}'", cfg.rate_weeks));
    }
    rate_weeks = {a, b};
  }

  CellModel cell = load_cell(fs::path(cfg.cell_path), cell_options(cfg));
  log("cell {} with {} junctions", cell.name(), cell.junctions().size());
  CampaignData data = load_campaign_dir(cfg.data_dir);
  log("{} weeks, {} field days", data.weeks.size(), data.days.size());

  CampaignResult result = run_campaign(data.weeks, data.days, cell, options);
  log("{} of {} weeks accepted", result.accepted_count(), result.weekly.size());
  std::vector<NamedFit> fits = campaign_fits(result, cell, options.pair);
  if (rate_weeks) {
    NamedFit rate;
    rate.key = fmt::format("ast_MJ~week[{}:{}]", rate_weeks->first, rate_weeks->second);
    try {
      rate.fit = soiling_rate_fit(result, rate_weeks->first, rate_weeks->second);
    } catch (const Error& e) {
      rate.error = std::string(to_string(e.kind()));
    }
    fits.push_back(std::move(rate));
  }
  write_campaign_outputs(cfg.out_dir, result, fits);
  log("wrote {}", cfg.out_dir);
  return 0;
}

int cmd_synth(const RunConfig& cfg) {
  require_file(cfg.scenario_path, "scenario");
  std::string cell_path = cfg.cell_path.empty()
                              ? (share_dir() / "cells" / "gainp_gainas_ge_3j.json").string()
                              : cfg.cell_path;
  require_file(cell_path, "cell config");
  if (cfg.out_dir.empty()) throw Error(ErrorKind::InvalidArgument, "--out is required");

  CampaignScenario scenario = load_scenario(cfg.scenario_path);
  if (cfg.seed) scenario.seed = *cfg.seed;
  CellModel cell = load_cell(fs::path(cell_path), cell_options(cfg));
  SynthCampaign campaign = synth_campaign(scenario, cell);
  log("generated {} weeks, {} field days", campaign.weeks.size(), campaign.days.size());
  write_campaign_dir(cfg.out_dir, scenario, campaign);
  log("wrote {}", cfg.out_dir);
  return 0;
}

void print_version() {
  fs::path ref = default_reference_spectrum_path();
  std::cout << "cpvsoil " << kVersion << '\n';
  try {
    std::cout << "reference " << ref.filename().string() << " sha256 " << sha256_hex(ref)
              << '\n';
  } catch (const Error&) {
    std::cout << "reference " << ref.string() << " missing\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral soiling indexes for multi-junction solar cells"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  RunConfig cfg;
  if (const char* env = std::getenv("CPVSOIL_DATA_DIR")) cfg.data_dir = env;
  bool version = false;
  app.add_flag("--version", version, "Print version and reference spectrum hash");
  app.add_flag("-v,--verbose", cfg.verbosity, "Log progress to stderr");

  auto* compute = app.add_subcommand("compute", "Indexes for one spectrum and one tau");
  compute->add_option("--spectrum", cfg.spectrum_path, "Direct irradiance CSV")->required();
  compute->add_option("--tau", cfg.tau_path, "Soiling transmittance CSV")->required();
  compute->add_option("--cell", cfg.cell_path, "Cell config JSON")->required();
  compute->add_option("--reference", cfg.reference_path, "Override reference spectrum");
  compute->add_option("--pair", cfg.pair, "Matching pair, numerator:denominator");

  auto* campaign = app.add_subcommand("campaign", "Weekly indexes for a campaign directory");
  campaign->add_option("--cell", cfg.cell_path, "Cell config JSON")->required();
  campaign->add_option("--data", cfg.data_dir,
                       "Campaign directory (default $CPVSOIL_DATA_DIR)");
  campaign->add_option("--out", cfg.out_dir, "Output directory")->required();
  campaign->add_option("--aggregation", cfg.aggregation, "noon or daily")
      ->check(CLI::IsMember({"noon", "daily"}));
  campaign->add_option("--reference", cfg.reference_path, "Override reference spectrum");
  campaign->add_option("--pair", cfg.pair, "Matching pair, numerator:denominator");
  campaign->add_option("--rate-weeks", cfg.rate_weeks,
                       "Also fit AST_MJ against week over FIRST:LAST");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic campaign directory");
  synth->add_option("--scenario", cfg.scenario_path, "Scenario JSON")->required();
  synth->add_option("--out", cfg.out_dir, "Output directory")->required();
  synth->add_option("--cell", cfg.cell_path, "Cell config JSON (default bundled 3J)");
  synth->add_option("--reference", cfg.reference_path, "Override reference spectrum");
  synth->add_option("--seed", cfg.seed, "Override the scenario seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("InvalidArgument", e.what(), 1);
  }
  g_verbose = cfg.verbosity > 0;

  try {
    if (version) {
      print_version();
      return 0;
    }
    if (compute->parsed()) return cmd_compute(cfg);
    if (campaign->parsed()) return cmd_campaign(cfg);
    if (synth->parsed()) return cmd_synth(cfg);
    std::cout << app.help() << '\n';
    return 1;
  } catch (const Error& e) {
    return report_error(to_string(e.kind()), e.what(), is_input_error(e.kind()) ? 1 : 2);
  } catch (const std::exception& e) {
    return report_error("IoError", e.what(), 2);
  }
}
