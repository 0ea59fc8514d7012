#pragma once

#include <cstddef>
#include <span>

namespace dendrostat {

double mean(std::span<const double> xs);

/// Sample standard deviation, divisor n-1.
double sample_sd(std::span<const double> xs);

/// Pearson correlation; 0 when either side has (near) zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Standard normal CDF.
double norm_cdf(double x);

/// Standard normal quantile. Acklam's rational approximation polished with
/// one Halley step on erfc, accurate to ~1e-15.
double norm_quantile(double p);

/// Linear interpolation y(x) between two points.
double lerp_at(double x0, double y0, double x1, double y1, double x);

}  // namespace dendrostat
