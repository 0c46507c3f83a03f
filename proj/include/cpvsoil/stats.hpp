#pragma once

#include <cstddef>
#include <span>

#include <json.hpp>

namespace cpvsoil {

/// Mean absolute percentage error of `modelled` against `measured`, in %.
/// Throws Error(LengthMismatch) for unequal or empty inputs and
/// Error(ZeroMeasured) if any measured value is 0.
double mape(std::span<const double> measured, std::span<const double> modelled);

/// Signed mean percentage error, in %. Same preconditions as mape.
double mpe(std::span<const double> measured, std::span<const double> modelled);

/// Squared Pearson correlation between the series. Throws
/// Error(ZeroVariance) if either series is constant.
double r2(std::span<const double> measured, std::span<const double> modelled);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double mape_pct = 0.0;
  double mpe_pct = 0.0;
  std::size_t n = 0;
  /// False when y is constant: the correlation is undefined and r2 is
  /// reported as 0.
  bool r2_defined = true;
};

/// Ordinary least squares y = slope * x + intercept. r2, mape and mpe
/// compare y (measured) with the fitted line (modelled).
/// Throws Error(TooFewPoints) below three points, Error(DegenerateX) when x
/// is constant.
FitResult linfit(std::span<const double> x, std::span<const double> y);

nlohmann::ordered_json to_json(const FitResult& fit);

}  // namespace cpvsoil
