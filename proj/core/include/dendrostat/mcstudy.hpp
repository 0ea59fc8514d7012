#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace dendrostat::mc {

/// Configuration of the AIC selection experiment: simulate ARMA(1,1) panels
/// of n_obs points, select among the 11-model candidate family, repeat
/// n_reps times per (theta, phi) grid cell.
struct McConfig {
  std::size_t n_obs = 140;
  std::size_t n_reps = 200;
  std::vector<double> theta_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<double> phi_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
  double sigma2 = 1.0;
  uint64_t base_seed = 0;

  void validate() const;
};

struct CellResult {
  std::size_t count = 0;
  double proportion = 0.0;
};

/// Selection proportions over the grid; proportions[i][j] pairs
/// theta_grid[i] with phi_grid[j] and equals counts[i][j] / n_reps exactly.
struct McGrid {
  McConfig config;
  std::vector<std::vector<double>> proportions;
  std::vector<std::vector<std::size_t>> counts;
};

/// One grid cell: n_reps replicates, each simulated with a seed derived
/// from (base_seed, theta index, phi index, replicate), counting how often
/// the minimal-AIC order is exactly (1,1). Deterministic in the config and
/// independent of any surrounding parallelism.
CellResult run_cell(double theta, double phi, const McConfig& config);

/// Every cell of the grid; identical output for any worker count.
/// threads = 0 means hardware concurrency.
McGrid run_grid(const McConfig& config, unsigned threads = 0);

void write_grid_csv(const McGrid& grid, const std::string& path);

/// Proportion matrix from a grid CSV (used for round-trip checks).
std::vector<std::vector<double>> read_grid_csv(const std::string& path);

nlohmann::json grid_json(const McGrid& grid);

/// Grayscale heat map of the proportions (one rect per cell, darker =
/// higher), with the matrix written as CSV alongside the SVG.
void render_image_plot(const McGrid& grid, const std::string& svg_path);

}  // namespace dendrostat::mc
