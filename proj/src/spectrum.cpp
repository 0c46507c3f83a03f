#include "cpvsoil/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "cpvsoil/error.hpp"
#include "cpvsoil/io.hpp"

namespace cpvsoil {

std::string_view to_string(SpectrumKind kind) noexcept {
  switch (kind) {
    case SpectrumKind::Irradiance: return "Irradiance";
    case SpectrumKind::Transmittance: return "Transmittance";
    case SpectrumKind::SpectralResponse: return "SpectralResponse";
    case SpectrumKind::QuantumEfficiency: return "QuantumEfficiency";
    case SpectrumKind::CurrentDensity: return "CurrentDensity";
  }
  return "Unknown";
}

std::string_view units_of(SpectrumKind kind) noexcept {
  switch (kind) {
    case SpectrumKind::Irradiance: return "W/m2/nm";
    case SpectrumKind::Transmittance: return "1";
    case SpectrumKind::SpectralResponse: return "A/W";
    case SpectrumKind::QuantumEfficiency: return "1";
    case SpectrumKind::CurrentDensity: return "A/m2/nm";
  }
  return "?";
}

SpectrumKind parse_spectrum_kind(std::string_view text) {
  for (auto kind : {SpectrumKind::Irradiance, SpectrumKind::Transmittance,
                    SpectrumKind::SpectralResponse,
                    SpectrumKind::QuantumEfficiency,
                    SpectrumKind::CurrentDensity}) {
    if (text == to_string(kind)) return kind;
  }
  throw Error(ErrorKind::ParseError,
              fmt::format("unknown spectrum kind '{}'", text));
}

Waveband::Waveband(std::string name, double lambda_min_nm, double lambda_max_nm)
    : name(std::move(name)),
      lambda_min_nm(lambda_min_nm),
      lambda_max_nm(lambda_max_nm) {
  if (!(lambda_min_nm > 0.0) || !(lambda_min_nm < lambda_max_nm) ||
      !std::isfinite(lambda_max_nm)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("waveband '{}' [{}, {}] must satisfy 0 < min < max",
                            this->name, lambda_min_nm, lambda_max_nm));
  }
}

namespace {

void check_grid(std::span<const double> grid, std::string_view what) {
  if (grid.size() < 2) {
    throw Error(ErrorKind::InvalidSpectrum,
                fmt::format("{} needs at least two samples", what));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) {
      throw Error(ErrorKind::InvalidSpectrum,
                  fmt::format("{} has a non-finite wavelength", what));
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorKind::InvalidSpectrum,
                  fmt::format("{} wavelengths not strictly increasing at {} nm",
                              what, grid[i]));
    }
  }
}

// Index of the first sample strictly greater than lambda.
std::size_t upper_index(std::span<const double> wl, double lambda) {
  return static_cast<std::size_t>(
      std::upper_bound(wl.begin(), wl.end(), lambda) - wl.begin());
}

double lerp_at(std::span<const double> wl, std::span<const double> v,
               double lambda) {
  std::size_t hi = upper_index(wl, lambda);
  if (hi == 0) return v.front();
  if (hi == wl.size()) return v.back();  // lambda == last sample
  std::size_t lo = hi - 1;
  if (wl[lo] == lambda) return v[lo];
  double t = (lambda - wl[lo]) / (wl[hi] - wl[lo]);
  return v[lo] + t * (v[hi] - v[lo]);
}

}  // namespace

Spectrum::Spectrum(std::vector<double> wavelengths_nm, std::vector<double> values,
                   SpectrumKind kind)
    : wavelengths_(std::move(wavelengths_nm)),
      values_(std::move(values)),
      kind_(kind) {
  if (wavelengths_.size() != values_.size()) {
    throw Error(ErrorKind::InvalidSpectrum,
                fmt::format("spectrum has {} wavelengths but {} values",
                            wavelengths_.size(), values_.size()));
  }
  check_grid(wavelengths_, "spectrum");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    double v = values_[i];
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::InvalidSpectrum,
                  fmt::format("non-finite value at {} nm", wavelengths_[i]));
    }
    if (kind_ == SpectrumKind::Transmittance &&
        (v < 0.0 || v > 1.0 + kTransmittanceTolerance)) {
      throw Error(ErrorKind::InvalidSpectrum,
                  fmt::format("transmittance {} at {} nm outside [0, {}]", v,
                              wavelengths_[i], 1.0 + kTransmittanceTolerance));
    }
  }
}

Spectrum::Clamped Spectrum::clamped_transmittance(
    std::vector<double> wavelengths_nm, std::vector<double> values) {
  std::size_t clamped = 0;
  for (double& v : values) {
    if (v > 1.0 + kTransmittanceTolerance) {
      v = 1.0 + kTransmittanceTolerance;
      ++clamped;
    }
  }
  return {Spectrum(std::move(wavelengths_nm), std::move(values),
                   SpectrumKind::Transmittance),
          clamped};
}

Spectrum Spectrum::constant(double value, double lambda_min_nm,
                            double lambda_max_nm, SpectrumKind kind) {
  return Spectrum({lambda_min_nm, lambda_max_nm}, {value, value}, kind);
}

double Spectrum::value_at(double lambda_nm) const {
  if (!(lambda_nm >= support_min() && lambda_nm <= support_max())) {
    throw Error(ErrorKind::GridOutOfSupport,
                fmt::format("{} nm outside spectrum support [{}, {}]", lambda_nm,
                            support_min(), support_max()));
  }
  return lerp_at(wavelengths_, values_, lambda_nm);
}

Spectrum Spectrum::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return Spectrum(wavelengths_, std::move(v), kind_);
}

Spectrum Spectrum::with_kind(SpectrumKind kind) const {
  return Spectrum(wavelengths_, values_, kind);
}

Spectrum resample(const Spectrum& s, std::span<const double> grid) {
  check_grid(grid, "resample grid");
  if (grid.front() < s.support_min() || grid.back() > s.support_max()) {
    throw Error(ErrorKind::GridOutOfSupport,
                fmt::format("grid [{}, {}] leaves spectrum support [{}, {}]",
                            grid.front(), grid.back(), s.support_min(),
                            s.support_max()));
  }
  std::vector<double> values;
  values.reserve(grid.size());
  for (double lambda : grid) {
    values.push_back(lerp_at(s.wavelengths(), s.values(), lambda));
  }
  return Spectrum(std::vector<double>(grid.begin(), grid.end()),
                  std::move(values), s.kind());
}

double integrate(const Spectrum& s, double lambda_min_nm, double lambda_max_nm) {
  if (!(lambda_min_nm <= lambda_max_nm) || !s.covers(lambda_min_nm, lambda_max_nm)) {
    throw Error(ErrorKind::BandOutOfSupport,
                fmt::format("band [{}, {}] outside spectrum support [{}, {}]",
                            lambda_min_nm, lambda_max_nm, s.support_min(),
                            s.support_max()));
  }
  auto wl = s.wavelengths();
  auto v = s.values();
  double prev_x = lambda_min_nm;
  double prev_y = lerp_at(wl, v, lambda_min_nm);
  double sum = 0.0;
  for (std::size_t i = upper_index(wl, lambda_min_nm);
       i < wl.size() && wl[i] < lambda_max_nm; ++i) {
    sum += 0.5 * (wl[i] - prev_x) * (v[i] + prev_y);
    prev_x = wl[i];
    prev_y = v[i];
  }
  sum += 0.5 * (lambda_max_nm - prev_x) * (lerp_at(wl, v, lambda_max_nm) + prev_y);
  return sum;
}

double integrate(const Spectrum& s, const Waveband& band) {
  return integrate(s, band.lambda_min_nm, band.lambda_max_nm);
}

std::optional<double> constant_value(const Spectrum& s, double lambda_min_nm,
                                     double lambda_max_nm) {
  auto wl = s.wavelengths();
  auto v = s.values();
  std::size_t first = 0;
  while (first + 1 < wl.size() && wl[first + 1] <= lambda_min_nm) ++first;
  std::size_t last = first;
  while (last + 1 < wl.size() && wl[last] < lambda_max_nm) ++last;
  for (std::size_t i = first + 1; i <= last; ++i) {
    if (v[i] != v[first]) return std::nullopt;
  }
  return v[first];
}

std::vector<double> overlap_grid(
    std::span<const std::reference_wrapper<const Spectrum>> factors) {
  if (factors.empty()) {
    throw Error(ErrorKind::InvalidArgument, "no spectra to combine");
  }
  double lo = factors.front().get().support_min();
  double hi = factors.front().get().support_max();
  for (const Spectrum& f : factors) {
    lo = std::max(lo, f.support_min());
    hi = std::min(hi, f.support_max());
  }
  if (!(lo < hi)) {
    throw Error(ErrorKind::NoOverlap,
                fmt::format("spectral supports do not overlap (max of minima "
                            "{} nm, min of maxima {} nm)", lo, hi));
  }
  std::vector<double> grid{lo, hi};
  for (const Spectrum& f : factors) {
    for (double x : f.wavelengths()) {
      if (x > lo && x < hi) grid.push_back(x);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

SpectrumKind product_kind(SpectrumKind a, SpectrumKind b) {
  using K = SpectrumKind;
  if (a == K::Transmittance) return b;
  if (b == K::Transmittance) return a;
  if ((a == K::Irradiance && b == K::SpectralResponse) ||
      (a == K::SpectralResponse && b == K::Irradiance)) {
    return K::CurrentDensity;
  }
  throw Error(ErrorKind::UnitMismatch,
              fmt::format("cannot multiply {} [{}] by {} [{}]", to_string(a),
                          units_of(a), to_string(b), units_of(b)));
}

Spectrum pointwise_product(
    std::span<const std::reference_wrapper<const Spectrum>> factors) {
  std::vector<double> grid = overlap_grid(factors);
  SpectrumKind kind = factors.front().get().kind();
  for (std::size_t i = 1; i < factors.size(); ++i) {
    kind = product_kind(kind, factors[i].get().kind());
  }
  std::vector<double> values(grid.size(), 1.0);
  for (const Spectrum& f : factors) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      values[i] *= lerp_at(f.wavelengths(), f.values(), grid[i]);
    }
  }
  return Spectrum(std::move(grid), std::move(values), kind);
}

Spectrum pointwise_product(const Spectrum& a, const Spectrum& b) {
  const std::reference_wrapper<const Spectrum> f[] = {a, b};
  return pointwise_product(f);
}

Spectrum pointwise_product(const Spectrum& a, const Spectrum& b,
                           const Spectrum& c) {
  const std::reference_wrapper<const Spectrum> f[] = {a, b, c};
  return pointwise_product(f);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

Spectrum read_spectrum_csv(std::istream& in, std::string_view source) {
  auto fail = [&](std::size_t line, const std::string& what) -> Error {
    return Error(ErrorKind::ParseError,
                 fmt::format("{}:{}: {}", source, line, what));
  };

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw fail(1, "empty spectrum file");
  ++line_no;
  std::string_view meta = trim(line);
  if (meta.starts_with("\xEF\xBB\xBF")) meta.remove_prefix(3);
  if (!meta.starts_with("#")) throw fail(line_no, "missing '# kind=... units=...' line");
  meta.remove_prefix(1);

  std::string kind_text;
  std::string units_text;
  std::istringstream tokens{std::string(meta)};
  for (std::string tok; tokens >> tok;) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    std::string key = tok.substr(0, eq);
    std::string value = tok.substr(eq + 1);
    if (key == "kind") kind_text = value;
    else if (key == "units") units_text = value;
  }
  if (kind_text.empty()) throw fail(line_no, "metadata line lacks kind=");
  SpectrumKind kind;
  try {
    kind = parse_spectrum_kind(kind_text);
  } catch (const Error& e) {
    throw fail(line_no, e.what());
  }
  if (!units_text.empty() && units_text != units_of(kind)) {
    throw Error(ErrorKind::UnitMismatch,
                fmt::format("{}:{}: kind {} requires units {}, file says {}",
                            source, line_no, kind_text, units_of(kind),
                            units_text));
  }

  if (!std::getline(in, line)) throw fail(2, "missing header line");
  ++line_no;
  if (trim(line) != "wavelength_nm,value") {
    throw fail(line_no, "header must be 'wavelength_nm,value'");
  }

  std::vector<double> wl;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = trim(line);
    if (row.empty()) continue;
    auto comma = row.find(',');
    if (comma == std::string_view::npos) throw fail(line_no, "expected two columns");
    auto x = parse_double(trim(row.substr(0, comma)));
    auto y = parse_double(trim(row.substr(comma + 1)));
    if (!x || !y) throw fail(line_no, fmt::format("bad number in '{}'", row));
    wl.push_back(*x);
    values.push_back(*y);
  }
  try {
    return Spectrum(std::move(wl), std::move(values), kind);
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("{}: {}", source, e.what()));
  }
}

Spectrum read_spectrum_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::FileNotFound,
                fmt::format("cannot open spectrum file {}", path.string()));
  }
  return read_spectrum_csv(in, path.string());
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out << fmt::format("# kind={} units={}\n", to_string(s.kind()), s.units());
  out << "wavelength_nm,value\n";
  auto wl = s.wavelengths();
  auto v = s.values();
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << fmt::format("{},{}\n", wl[i], v[i]);
  }
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s) {
  std::ostringstream buf;
  write_spectrum_csv(buf, s);
  write_file_atomic(path, buf.str());
}

}  // namespace cpvsoil
