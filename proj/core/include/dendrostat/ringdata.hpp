#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

namespace dendrostat::ring {

/// One tree's dated ring widths. Widths are strictly positive and cover a
/// contiguous run of calendar years starting at first_year.
struct RingSeries {
  std::string sample_id;
  int first_year = 0;
  std::vector<double> widths;

  int last_year() const {
    return first_year + static_cast<int>(widths.size()) - 1;
  }
};

/// A set of series trimmed to one common interval: every member spans
/// exactly [start_year, end_year].
struct AlignedPanel {
  int start_year = 0;
  int end_year = 0;
  std::vector<RingSeries> series;

  int n_years() const { return end_year - start_year + 1; }
  const RingSeries* find(const std::string& sample_id) const;
};

enum class Transform { LogDifference, Standardize, None };

Transform transform_from_string(const std::string& name);
std::string to_string(Transform t);

/// Dimensionless derived series, the input handed to the extreme-value fit.
struct IndexSeries {
  std::string source_id;
  std::vector<double> values;
  Transform method = Transform::None;
};

/// Parses ring-width CSV: header `year,<id1>,<id2>,...`, one row per year,
/// years increasing by 1, empty cell or NA meaning no ring that year. Each
/// column becomes one series trimmed to its contiguous non-missing span;
/// an interior missing value is an error, not an imputation site.
std::vector<RingSeries> parse_panel(const std::string& text);

std::vector<RingSeries> read_panel_file(const std::string& path);

/// Emits the same CSV format parse_panel reads. Values are written with
/// shortest round-trip formatting, so parse(serialize(parse(f))) is
/// bit-identical to parse(f).
std::string serialize_panel(std::span<const RingSeries> series);

void write_panel_file(std::span<const RingSeries> series,
                      const std::string& path);

/// Per-series ids, spans, lengths and mean/sd, plus the common interval
/// when one exists.
nlohmann::json panel_summary(std::span<const RingSeries> series);

/// Trims every series to the intersection of year spans (the years in which
/// every tree has a ring).
AlignedPanel align_common_interval(std::span<const RingSeries> series);

IndexSeries stationary_transform(const RingSeries& series, Transform method);

/// Box-Cox transform: (y^l - 1)/l for l != 0, ln y for l = 0.
std::vector<double> boxcox(std::span<const double> values, double lambda);

/// Analytic inverse of boxcox for the same lambda.
std::vector<double> boxcox_inverse(std::span<const double> transformed,
                                   double lambda);

/// Normal profile log-likelihood of the transformed data including the
/// Jacobian term (lambda - 1) * sum(ln y). Constant terms dropped.
double boxcox_profile_loglik(std::span<const double> values, double lambda);

/// Grid-search MLE of lambda on [-2, 2] in steps of 0.01; ties (including a
/// completely flat profile on degenerate input) resolve toward the grid
/// value nearest 1.
double boxcox_mle_lambda(std::span<const double> values);

/// Deterministic synthetic stand-in panel: log-widths follow a random-walk
/// level plus a shared AR(1) climate signal plus noise, so widths are
/// positive, cross-correlated and non-stationary in level. The last year is
/// pinned to 1975 to mirror the real panel's shape.
AlignedPanel synth_panel(uint64_t seed, int n_series, int n_years);

}  // namespace dendrostat::ring
