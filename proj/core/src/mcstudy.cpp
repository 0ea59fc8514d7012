#include "dendrostat/mcstudy.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "dendrostat/arma.hpp"
#include "dendrostat/errors.hpp"
#include "dendrostat/rng.hpp"
#include "dendrostat/svg.hpp"
#include "dendrostat/textio.hpp"

namespace dendrostat::mc {

namespace {

/// Seed key for a grid coordinate: the grid index when the value sits on the
/// grid, otherwise the value's bit pattern. Either way deterministic.
uint64_t coord_key(double value, const std::vector<double>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] == value) return i;
  }
  return std::bit_cast<uint64_t>(value);
}

CellResult run_cell_keyed(double theta, double phi, uint64_t tkey,
                          uint64_t pkey, const McConfig& config) {
  arma::ArmaSpec truth{{theta}, {phi}, config.sigma2};
  try {
    truth.validate();
  } catch (const Error& e) {
    throw DomainError("run_cell(theta=" + fmt_double(theta) +
                      ", phi=" + fmt_double(phi) + "): " + e.what());
  }

  const auto candidates = arma::candidate_set();
  std::size_t count = 0;
  for (std::size_t rep = 0; rep < config.n_reps; ++rep) {
    const uint64_t seed = derive_seed(config.base_seed, tkey, pkey, rep);
    const auto y = arma::simulate_arma(truth, config.n_obs, seed);
    const auto sel = arma::select_by_aic(y, candidates);
    if (sel.winner == arma::Order{1, 1}) ++count;
  }
  return {count,
          static_cast<double>(count) / static_cast<double>(config.n_reps)};
}

}  // namespace

void McConfig::validate() const {
  if (n_obs < 20) throw DomainError("McConfig: n_obs must be >= 20");
  if (n_reps < 1) throw DomainError("McConfig: n_reps must be >= 1");
  if (theta_grid.empty() || phi_grid.empty()) {
    throw DomainError("McConfig: grids must be non-empty");
  }
  for (double v : theta_grid) {
    if (!(v > 0.0 && v < 1.0)) {
      throw DomainError("McConfig: theta grid values must lie in (0,1)");
    }
  }
  for (double v : phi_grid) {
    if (!(v > 0.0 && v < 1.0)) {
      throw DomainError("McConfig: phi grid values must lie in (0,1)");
    }
  }
  if (!(sigma2 > 0.0)) throw DomainError("McConfig: sigma2 must be positive");
}

CellResult run_cell(double theta, double phi, const McConfig& config) {
  config.validate();
  return run_cell_keyed(theta, phi, coord_key(theta, config.theta_grid),
                        coord_key(phi, config.phi_grid), config);
}

McGrid run_grid(const McConfig& config, unsigned threads) {
  config.validate();
  const std::size_t nt = config.theta_grid.size();
  const std::size_t np = config.phi_grid.size();

  McGrid grid;
  grid.config = config;
  grid.proportions.assign(nt, std::vector<double>(np, 0.0));
  grid.counts.assign(nt, std::vector<std::size_t>(np, 0));

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_cells = nt * np;
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, n_cells));

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n_cells);

  auto worker = [&]() {
    while (true) {
      const std::size_t cell = next.fetch_add(1);
      if (cell >= n_cells) break;
      const std::size_t i = cell / np;
      const std::size_t j = cell % np;
      try {
        const auto res = run_cell_keyed(config.theta_grid[i],
                                        config.phi_grid[j], i, j, config);
        grid.counts[i][j] = res.count;
        grid.proportions[i][j] = res.proportion;
      } catch (...) {
        errors[cell] = std::current_exception();
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    if (errors[cell]) {
      try {
        std::rethrow_exception(errors[cell]);
      } catch (const Error& e) {
        const std::size_t i = cell / np;
        const std::size_t j = cell % np;
        throw DomainError("grid cell (theta=" +
                          fmt_double(config.theta_grid[i]) + ", phi=" +
                          fmt_double(config.phi_grid[j]) + "): " + e.what());
      }
    }
  }
  return grid;
}

void write_grid_csv(const McGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "theta\\phi";
  for (double phi : grid.config.phi_grid) out << "," << fmt_double(phi);
  out << "\n";
  for (std::size_t i = 0; i < grid.config.theta_grid.size(); ++i) {
    out << fmt_double(grid.config.theta_grid[i]);
    for (std::size_t j = 0; j < grid.config.phi_grid.size(); ++j) {
      out << "," << fmt_double(grid.proportions[i][j]);
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::vector<double>> read_grid_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool header = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() < 2) throw ParseError("short grid row", lineno);
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      row.push_back(std::stod(cells[c]));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json grid_json(const McGrid& grid) {
  return {{"config",
           {{"n_obs", grid.config.n_obs},
            {"n_reps", grid.config.n_reps},
            {"theta_grid", grid.config.theta_grid},
            {"phi_grid", grid.config.phi_grid},
            {"sigma2", grid.config.sigma2},
            {"base_seed", grid.config.base_seed}}},
          {"proportions", grid.proportions},
          {"counts", grid.counts}};
}

void render_image_plot(const McGrid& grid, const std::string& svg_path) {
  const std::size_t nt = grid.config.theta_grid.size();
  const std::size_t np = grid.config.phi_grid.size();

  double lo = grid.proportions[0][0];
  double hi = lo;
  for (const auto& row : grid.proportions) {
    for (double v : row) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  const double ml = 64, mt = 40, mr = 24, mb = 56;
  const double cw = 64, ch = 48;
  svg::Canvas canvas(ml + cw * static_cast<double>(np) + mr,
                     mt + ch * static_cast<double>(nt) + mb);

  auto gray = [&](double v) {
    const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    const int level = static_cast<int>(std::lround(255.0 * (1.0 - t)));
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", level, level, level);
    return std::string(buf);
  };

  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      const double v = grid.proportions[i][j];
      // theta increases upward
      const double x = ml + cw * static_cast<double>(j);
      const double y = mt + ch * static_cast<double>(nt - 1 - i);
      const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
      canvas.rect(x, y, cw, ch, gray(v), "#888888", 0.5, "cell");
      canvas.text(x + cw / 2, y + ch / 2 + 4, fmt_double(v, 3), 11,
                  "middle");
      // keep the label readable on dark cells
      if (t > 0.6) {
        // redraw in white over the dark fill
        canvas.text(x + cw / 2, y + ch / 2 + 4,
                    "<tspan fill=\"white\">" + fmt_double(v, 3) + "</tspan>",
                    11, "middle");
      }
    }
  }
  for (std::size_t j = 0; j < np; ++j) {
    canvas.text(ml + cw * (static_cast<double>(j) + 0.5),
                mt + ch * static_cast<double>(nt) + 18,
                fmt_double(grid.config.phi_grid[j], 4), 11, "middle");
  }
  for (std::size_t i = 0; i < nt; ++i) {
    canvas.text(ml - 8, mt + ch * static_cast<double>(nt - 1 - i) + ch / 2 + 4,
                fmt_double(grid.config.theta_grid[i], 4), 11, "end");
  }
  canvas.text(ml + cw * static_cast<double>(np) / 2, mt - 14,
              "Proportion of replicates selecting ARMA(1,1)", 13, "middle");
  canvas.text(ml + cw * static_cast<double>(np) / 2,
              mt + ch * static_cast<double>(nt) + 40, "phi (MA parameter)",
              12, "middle");
  canvas.text(18, mt + ch * static_cast<double>(nt) / 2,
              "theta (AR parameter)", 12, "middle", -90);

  svg::write_file(canvas, svg_path);

  std::string csv_path = svg_path;
  const auto dot = csv_path.find_last_of('.');
  if (dot != std::string::npos) csv_path.resize(dot);
  csv_path += ".csv";
  write_grid_csv(grid, csv_path);
}

}  // namespace dendrostat::mc
