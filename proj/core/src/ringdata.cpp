#include "dendrostat/ringdata.hpp"

#include <algorithm>
#include <cfloat>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dendrostat/errors.hpp"
#include "dendrostat/rng.hpp"
#include "dendrostat/stats.hpp"
#include "dendrostat/textio.hpp"

namespace dendrostat::ring {

namespace {

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN";
}

double parse_width(const std::string& cell, std::size_t line) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("malformed numeric cell '" + cell + "'", line);
  }
  return v;
}

int parse_year(const std::string& cell, std::size_t line) {
  int y = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), y);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError("malformed year '" + cell + "'", line);
  }
  return y;
}

}  // namespace

const RingSeries* AlignedPanel::find(const std::string& sample_id) const {
  for (const auto& s : series) {
    if (s.sample_id == sample_id) return &s;
  }
  return nullptr;
}

Transform transform_from_string(const std::string& name) {
  if (name == "logdiff" || name == "log-difference") {
    return Transform::LogDifference;
  }
  if (name == "standardize") return Transform::Standardize;
  if (name == "none") return Transform::None;
  throw DomainError("unknown transform '" + name +
                    "' (expected logdiff, standardize or none)");
}

std::string to_string(Transform t) {
  switch (t) {
    case Transform::LogDifference: return "log-difference";
    case Transform::Standardize: return "standardize";
    case Transform::None: return "none";
  }
  return "none";
}

std::vector<RingSeries> parse_panel(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;

  // header
  std::vector<std::string> ids;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() < 2 || cells[0] != "year") {
      throw ParseError("expected header 'year,<id1>,...'", lineno);
    }
    ids.assign(cells.begin() + 1, cells.end());
    break;
  }
  if (ids.empty()) return {};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i].empty()) throw ParseError("empty series id in header", lineno);
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (ids[i] == ids[j]) {
        throw ParseError("duplicate series id '" + ids[i] + "'", lineno);
      }
    }
  }

  struct Column {
    int first_year = 0;
    std::vector<double> widths;
    bool open = false;    // inside the non-missing span
    bool closed = false;  // saw a missing cell after the span started
    int closed_year = 0;
  };
  std::vector<Column> cols(ids.size());

  bool have_prev_year = false;
  int prev_year = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != ids.size() + 1) {
      throw ParseError("expected " + std::to_string(ids.size() + 1) +
                           " cells, found " + std::to_string(cells.size()),
                       lineno);
    }
    const int year = parse_year(cells[0], lineno);
    if (have_prev_year && year != prev_year + 1) {
      throw ParseError("years must increase by 1 (after " +
                           std::to_string(prev_year) + ")",
                       lineno);
    }
    prev_year = year;
    have_prev_year = true;

    for (std::size_t c = 0; c < ids.size(); ++c) {
      const std::string& cell = cells[c + 1];
      Column& col = cols[c];
      if (is_missing(cell)) {
        if (col.open && !col.closed) {
          col.closed = true;
          col.closed_year = year;
        }
        continue;
      }
      const double v = parse_width(cell, lineno);
      if (!(v > 0.0)) {
        throw DomainError("non-positive width " + fmt_double(v) +
                          " for series '" + ids[c] + "' in year " +
                          std::to_string(year));
      }
      if (col.closed) {
        throw GapError("series '" + ids[c] + "' has an interior gap at year " +
                       std::to_string(col.closed_year));
      }
      if (!col.open) {
        col.open = true;
        col.first_year = year;
      }
      col.widths.push_back(v);
    }
  }

  std::vector<RingSeries> out;
  out.reserve(ids.size());
  for (std::size_t c = 0; c < ids.size(); ++c) {
    if (cols[c].widths.empty()) continue;  // column never had a ring
    out.push_back(RingSeries{ids[c], cols[c].first_year,
                             std::move(cols[c].widths)});
  }
  return out;
}

std::vector<RingSeries> read_panel_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_panel(buf.str());
}

std::string serialize_panel(std::span<const RingSeries> series) {
  std::string out = "year";
  for (const auto& s : series) out += "," + s.sample_id;
  out += "\n";
  if (series.empty()) return out;

  int lo = series.front().first_year;
  int hi = series.front().last_year();
  for (const auto& s : series) {
    lo = std::min(lo, s.first_year);
    hi = std::max(hi, s.last_year());
  }
  for (int year = lo; year <= hi; ++year) {
    out += std::to_string(year);
    for (const auto& s : series) {
      out += ",";
      if (year >= s.first_year && year <= s.last_year()) {
        out += fmt_double(s.widths[static_cast<std::size_t>(year -
                                                            s.first_year)]);
      } else {
        out += "NA";
      }
    }
    out += "\n";
  }
  return out;
}

void write_panel_file(std::span<const RingSeries> series,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << serialize_panel(series);
  if (!out) throw IoError("write failed: " + path);
}

nlohmann::json panel_summary(std::span<const RingSeries> series) {
  nlohmann::json j;
  j["series"] = nlohmann::json::array();
  for (const auto& s : series) {
    j["series"].push_back({{"id", s.sample_id},
                           {"first_year", s.first_year},
                           {"last_year", s.last_year()},
                           {"n_rings", s.widths.size()},
                           {"mean", mean(s.widths)},
                           {"sd", sample_sd(s.widths)}});
  }
  if (!series.empty()) {
    int start = series.front().first_year;
    int end = series.front().last_year();
    for (const auto& s : series) {
      start = std::max(start, s.first_year);
      end = std::min(end, s.last_year());
    }
    if (start <= end) {
      j["common_interval"] = {{"start_year", start},
                              {"end_year", end},
                              {"n_years", end - start + 1}};
    } else {
      j["common_interval"] = nullptr;
    }
  }
  return j;
}

AlignedPanel align_common_interval(std::span<const RingSeries> series) {
  if (series.empty()) {
    throw AlignmentError("cannot align an empty collection");
  }
  std::size_t argmax_first = 0;
  std::size_t argmin_last = 0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].first_year > series[argmax_first].first_year) {
      argmax_first = i;
    }
    if (series[i].last_year() < series[argmin_last].last_year()) {
      argmin_last = i;
    }
  }
  const int start = series[argmax_first].first_year;
  const int end = series[argmin_last].last_year();
  if (start > end) {
    throw AlignmentError("no common interval: '" +
                         series[argmax_first].sample_id + "' starts " +
                         std::to_string(start) + ", '" +
                         series[argmin_last].sample_id + "' ends " +
                         std::to_string(end));
  }

  AlignedPanel panel;
  panel.start_year = start;
  panel.end_year = end;
  panel.series.reserve(series.size());
  for (const auto& s : series) {
    const auto offset = static_cast<std::size_t>(start - s.first_year);
    const auto len = static_cast<std::size_t>(end - start + 1);
    RingSeries t;
    t.sample_id = s.sample_id;
    t.first_year = start;
    t.widths.assign(s.widths.begin() + static_cast<std::ptrdiff_t>(offset),
                    s.widths.begin() + static_cast<std::ptrdiff_t>(offset +
                                                                   len));
    panel.series.push_back(std::move(t));
  }
  return panel;
}

IndexSeries stationary_transform(const RingSeries& series, Transform method) {
  IndexSeries out;
  out.source_id = series.sample_id;
  out.method = method;
  const auto& w = series.widths;
  switch (method) {
    case Transform::LogDifference: {
      if (w.size() < 2) {
        throw LengthError("log-difference needs at least 2 rings, got " +
                          std::to_string(w.size()));
      }
      out.values.resize(w.size() - 1);
      for (std::size_t t = 0; t + 1 < w.size(); ++t) {
        if (!(w[t] > 0.0) || !(w[t + 1] > 0.0)) {
          throw DomainError("log-difference requires positive widths");
        }
        out.values[t] = std::log(w[t + 1]) - std::log(w[t]);
      }
      break;
    }
    case Transform::Standardize: {
      if (w.size() < 2) {
        throw LengthError("standardize needs at least 2 rings");
      }
      const double m = mean(w);
      const double sd = sample_sd(w);
      if (sd < 1e-300) {
        throw DomainError("cannot standardize a zero-variance series");
      }
      out.values.resize(w.size());
      for (std::size_t t = 0; t < w.size(); ++t) {
        out.values[t] = (w[t] - m) / sd;
      }
      break;
    }
    case Transform::None:
      out.values = w;
      break;
  }
  return out;
}

std::vector<double> boxcox(std::span<const double> values, double lambda) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = values[i];
    if (!(y > 0.0)) {
      throw DomainError("Box-Cox requires positive values, got " +
                        fmt_double(y));
    }
    // expm1 keeps the lambda -> 0 limit smooth.
    out[i] = lambda == 0.0 ? std::log(y)
                           : std::expm1(lambda * std::log(y)) / lambda;
  }
  return out;
}

std::vector<double> boxcox_inverse(std::span<const double> transformed,
                                   double lambda) {
  std::vector<double> out(transformed.size());
  for (std::size_t i = 0; i < transformed.size(); ++i) {
    const double z = transformed[i];
    if (lambda == 0.0) {
      out[i] = std::exp(z);
    } else {
      const double base = lambda * z + 1.0;
      if (!(base > 0.0)) {
        throw DomainError("value outside the Box-Cox image for this lambda");
      }
      out[i] = std::exp(std::log1p(lambda * z) / lambda);
    }
  }
  return out;
}

double boxcox_profile_loglik(std::span<const double> values, double lambda) {
  const auto z = boxcox(values, lambda);
  const double n = static_cast<double>(z.size());
  const double m = mean(z);
  double ss = 0.0;
  for (double v : z) ss += (v - m) * (v - m);
  const double var_mle = ss / n;
  double log_jacobian = 0.0;
  for (double y : values) log_jacobian += std::log(y);
  if (var_mle < 1e-300) {
    // Degenerate (constant) transformed data: profile is flat at +inf and
    // the tie rule decides.
    return std::numeric_limits<double>::infinity();
  }
  return -0.5 * n * std::log(var_mle) + (lambda - 1.0) * log_jacobian;
}

double boxcox_mle_lambda(std::span<const double> values) {
  if (values.size() < 3) {
    throw LengthError("Box-Cox lambda selection needs at least 3 values");
  }
  double best_lambda = 0.0;
  double best_ll = -std::numeric_limits<double>::infinity();
  bool first = true;
  for (int i = 0; i <= 400; ++i) {
    const double lambda = static_cast<double>(i - 200) / 100.0;
    const double ll = boxcox_profile_loglik(values, lambda);
    const bool better =
        first || ll > best_ll ||
        (ll == best_ll &&
         std::abs(lambda - 1.0) < std::abs(best_lambda - 1.0));
    if (better) {
      best_lambda = lambda;
      best_ll = ll;
      first = false;
    }
  }
  return best_lambda;
}

AlignedPanel synth_panel(uint64_t seed, int n_series, int n_years) {
  if (n_series < 1) throw DomainError("synth_panel: n_series must be >= 1");
  if (n_years < 10) throw DomainError("synth_panel: n_years must be >= 10");

  // Shared AR(1) climate signal, stationary start.
  const double climate_ar = 0.75;
  Rng climate_rng(derive_seed(seed, 0xC11AA7EULL, 0, 0));
  std::vector<double> climate(static_cast<std::size_t>(n_years));
  climate[0] = climate_rng.normal() / std::sqrt(1.0 - climate_ar * climate_ar);
  for (int t = 1; t < n_years; ++t) {
    climate[static_cast<std::size_t>(t)] =
        climate_ar * climate[static_cast<std::size_t>(t - 1)] +
        climate_rng.normal();
  }

  const int last_year = 1975;
  AlignedPanel panel;
  panel.end_year = last_year;
  panel.start_year = last_year - n_years + 1;

  int digits = 2;
  for (int v = n_series; v >= 100; v /= 10) ++digits;

  for (int i = 0; i < n_series; ++i) {
    Rng rng(derive_seed(seed, 0x5E51E5ULL, static_cast<uint64_t>(i), 0));
    const double base = 0.3 * rng.normal();
    double level = 0.0;
    RingSeries s;
    std::string num = std::to_string(i + 1);
    s.sample_id =
        "SYN-" + std::string(static_cast<std::size_t>(digits) - num.size(),
                             '0') +
        num;
    s.first_year = panel.start_year;
    s.widths.resize(static_cast<std::size_t>(n_years));
    for (int t = 0; t < n_years; ++t) {
      level += 0.02 * rng.normal();  // slow random-walk level
      const double logw = base + level +
                          0.25 * climate[static_cast<std::size_t>(t)] +
                          0.15 * rng.normal();
      s.widths[static_cast<std::size_t>(t)] = std::exp(logw);
    }
    panel.series.push_back(std::move(s));
  }
  return panel;
}

}  // namespace dendrostat::ring
