#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

namespace dendrostat::arma {

/// ARMA(p,q) parameter set: x[t] = sum_i ar[i] x[t-1-i] + e[t]
///                                 + sum_j ma[j] e[t-1-j],  e ~ N(0, sigma2).
/// The AR coefficients play the role the source tables call theta and the MA
/// coefficients the role they call phi.
struct ArmaSpec {
  std::vector<double> ar;
  std::vector<double> ma;
  double sigma2 = 1.0;

  int p() const { return static_cast<int>(ar.size()); }
  int q() const { return static_cast<int>(ma.size()); }

  /// All roots of 1 - ar_1 z - ... - ar_p z^p strictly outside unit circle.
  bool stationary() const;
  /// All roots of 1 + ma_1 z + ... + ma_q z^q strictly outside unit circle.
  bool invertible() const;
  /// Throws DomainError unless stationary, invertible and sigma2 > 0.
  void validate() const;
};

struct ArmaFit {
  ArmaSpec spec;
  double loglik = 0.0;
  double aic = 0.0;
  std::size_t n = 0;
  bool converged = false;
};

struct Order {
  int p = 0;
  int q = 0;
  bool operator==(const Order&) const = default;
};

/// Length-n draw from the stationary process, Gaussian innovations, state
/// initialized from the exact stationary distribution (no burn-in).
std::vector<double> simulate_arma(const ArmaSpec& spec, std::size_t n,
                                  uint64_t seed);

/// Exact Gaussian log-likelihood via the state-space prediction-error
/// recursion with stationary initialization.
double arma_loglik(const ArmaSpec& spec, std::span<const double> data);

/// Maximum-likelihood fit at fixed orders. Derivative-free simplex search on
/// parameters mapped through the tanh/partial-autocorrelation bijection onto
/// the stationarity/invertibility region, sigma2 concentrated out; three
/// starts (zeros, method of moments, perturbed) with the best kept.
ArmaFit fit_arma(std::span<const double> data, int p, int q);

/// The fixed 11-model family: AR(1..5), MA(1..5), ARMA(1,1), in that order.
std::vector<Order> candidate_set();

struct Selection {
  Order winner;
  std::vector<ArmaFit> table;  // one entry per candidate, candidate order
};

/// Fits every candidate and returns the minimal-AIC order plus the full
/// table. Ties break toward smaller p+q, then smaller p. Non-converged fits
/// are retained with their achieved AIC and flagged.
Selection select_by_aic(std::span<const double> data,
                        std::span<const Order> candidates);

nlohmann::json fit_table_json(const Selection& selection);

/// Monahan map: partial autocorrelations in (-1,1) to the coefficients of a
/// stationary AR polynomial, and its inverse. Exposed for tests.
std::vector<double> pacf_to_coeffs(std::span<const double> pacf);
std::vector<double> coeffs_to_pacf(std::span<const double> coeffs);

}  // namespace dendrostat::arma
