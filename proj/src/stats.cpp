#include "cpvsoil/stats.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "cpvsoil/error.hpp"

namespace cpvsoil {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorKind::LengthMismatch,
                fmt::format("series lengths {} and {} must be equal and nonzero",
                            a.size(), b.size()));
  }
}

template <typename Term>
double mean_percentage(std::span<const double> measured,
                       std::span<const double> modelled, Term term) {
  check_pair(measured, modelled);
  double sum = 0.0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    if (measured[i] == 0.0) {
      throw Error(ErrorKind::ZeroMeasured,
                  fmt::format("measured value {} is zero", i));
    }
    sum += term((modelled[i] - measured[i]) / measured[i]);
  }
  return 100.0 * sum / static_cast<double>(measured.size());
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double mape(std::span<const double> measured, std::span<const double> modelled) {
  return mean_percentage(measured, modelled, [](double e) { return std::abs(e); });
}

double mpe(std::span<const double> measured, std::span<const double> modelled) {
  return mean_percentage(measured, modelled, [](double e) { return e; });
}

double r2(std::span<const double> measured, std::span<const double> modelled) {
  check_pair(measured, modelled);
  double mx = mean(measured);
  double my = mean(modelled);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    double dx = measured[i] - mx;
    double dy = modelled[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::ZeroVariance, "r2 of a constant series is undefined");
  }
  double r = sxy / std::sqrt(sxx * syy);
  return r * r;
}

FitResult linfit(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  if (x.size() < 3) {
    throw Error(ErrorKind::TooFewPoints,
                fmt::format("linear fit needs at least 3 points, got {}", x.size()));
  }
  double mx = mean(x);
  double my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  bool y_constant = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    y_constant = y_constant && y[i] == y[0];
  }
  if (sxx == 0.0) {
    throw Error(ErrorKind::DegenerateX, "x has zero variance");
  }
  FitResult fit;
  fit.n = x.size();
  fit.slope = y_constant ? 0.0 : sxy / sxx;
  fit.intercept = y_constant ? y[0] : my - fit.slope * mx;

  std::vector<double> fitted(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    fitted[i] = fit.slope * x[i] + fit.intercept;
  }
  if (y_constant) {
    fit.r2 = 0.0;
    fit.r2_defined = false;
  } else if (fit.slope == 0.0) {
    fit.r2 = 0.0;  // uncorrelated: the fitted line is flat
  } else {
    fit.r2 = r2(y, fitted);
  }
  fit.mape_pct = mape(y, fitted);
  fit.mpe_pct = mpe(y, fitted);
  return fit;
}

nlohmann::ordered_json to_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r2;
  j["r2_defined"] = fit.r2_defined;
  j["mape_pct"] = fit.mape_pct;
  j["mpe_pct"] = fit.mpe_pct;
  j["n"] = fit.n;
  return j;
}

}  // namespace cpvsoil
