// Test helpers and independent numerical oracles. Nothing here calls the
// library's integration or interpolation code.
#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cpvsoil/spectrum.hpp"

namespace cpvsoil::test {

using Fn = std::function<double(double)>;

/// Midpoint Riemann sum with a fixed step; long double accumulator.
inline double midpoint_integral(const Fn& f, double lo, double hi, double step = 0.01) {
  const auto n = static_cast<long>(std::llround((hi - lo) / step));
  const double h = (hi - lo) / static_cast<double>(n);
  long double sum = 0.0L;
  for (long i = 0; i < n; ++i) sum += f(lo + (static_cast<double>(i) + 0.5) * h);
  return static_cast<double>(sum * h);
}

/// Samples f on an even grid from lo to hi inclusive.
inline Spectrum sample(const Fn& f, double lo, double hi, double step, SpectrumKind kind) {
  std::vector<double> wl;
  std::vector<double> v;
  const auto n = static_cast<long>(std::llround((hi - lo) / step));
  for (long i = 0; i <= n; ++i) {
    double x = i == n ? hi : lo + static_cast<double>(i) * step;
    wl.push_back(x);
    v.push_back(f(x));
  }
  return Spectrum(std::move(wl), std::move(v), kind);
}

/// Independent piecewise-linear evaluation of sampled data.
inline double lerp_at(const std::vector<double>& x, const std::vector<double>& y, double at) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (at <= x[i]) {
      double t = (at - x[i - 1]) / (x[i] - x[i - 1]);
      return y[i - 1] + t * (y[i] - y[i - 1]);
    }
  }
  return y.back();
}

inline Fn as_function(const Spectrum& s) {
  std::vector<double> x(s.wavelengths().begin(), s.wavelengths().end());
  std::vector<double> y(s.values().begin(), s.values().end());
  return [x, y](double at) { return lerp_at(x, y, at); };
}

inline bool rel_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("cpvsoil_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(CPVSOIL_TEST_DATA_DIR) / rel;
}

}  // namespace cpvsoil::test
