#include "dendrostat/arma.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include "dendrostat/errors.hpp"
#include "dendrostat/rng.hpp"

namespace dendrostat::arma {

namespace {

constexpr int kMaxOrder = 5;
constexpr int kMaxState = kMaxOrder + 1;  // m = max(p, q+1) <= 6
constexpr double kInf = std::numeric_limits<double>::infinity();

/// Roots of 1 - c_1 z - ... - c_k z^k strictly outside the unit circle,
/// checked through the companion matrix (eigenvalues strictly inside).
bool poly_stable(std::span<const double> c) {
  const int k = static_cast<int>(c.size());
  if (k == 0) return true;
  for (double v : c) {
    if (!std::isfinite(v)) return false;
  }
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) comp(0, i) = c[static_cast<std::size_t>(i)];
  for (int i = 1; i < k; ++i) comp(i, i - 1) = 1.0;
  const auto eig = comp.eigenvalues();
  for (int i = 0; i < k; ++i) {
    if (std::abs(eig(i)) >= 1.0 - 1e-12) return false;
  }
  return true;
}

/// State-space pieces for the Harvey representation with m = max(p, q+1):
///   alpha[t+1] = T alpha[t] + R eta[t],   y[t] = alpha[t][0],
/// T companion in the AR coefficients, R = (1, ma_1, ..., ma_{m-1}).
struct StateSpace {
  int m = 1;
  double a[kMaxState] = {};  // AR coefficients zero-padded to m
  double r[kMaxState] = {};  // R vector

  void init(std::span<const double> ar, std::span<const double> ma) {
    const int p = static_cast<int>(ar.size());
    const int q = static_cast<int>(ma.size());
    m = std::max(p, q + 1);
    std::fill(a, a + kMaxState, 0.0);
    std::fill(r, r + kMaxState, 0.0);
    for (int i = 0; i < p; ++i) a[i] = ar[static_cast<std::size_t>(i)];
    r[0] = 1.0;
    for (int j = 0; j < q; ++j) r[j + 1] = ma[static_cast<std::size_t>(j)];
  }

  // out = T x
  void apply_T(const double* x, double* out) const {
    const double x0 = x[0];
    for (int i = 0; i < m; ++i) {
      out[i] = a[i] * x0 + (i + 1 < m ? x[i + 1] : 0.0);
    }
  }

  // M <- T M T' for an m x m symmetric M held in row-major storage.
  void sandwich_T(double (&M)[kMaxState][kMaxState]) const {
    double W[kMaxState][kMaxState];  // W = M T'
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        W[i][j] = a[j] * M[i][0] + (j + 1 < m ? M[i][j + 1] : 0.0);
      }
    }
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) {
        M[i][j] = a[i] * W[0][j] + (i + 1 < m ? W[i + 1][j] : 0.0);
      }
    }
  }
};

/// Stationary state covariance P = sum_k T^k (RR') T'^k by doubling:
/// P <- P + A P A', A <- A A. Quadratic convergence, |r_i| < 1 guaranteed
/// by the callers.
void stationary_cov(const StateSpace& ss,
                    double (&P)[kMaxState][kMaxState]) {
  const int m = ss.m;
  double A[kMaxState][kMaxState] = {};
  for (int i = 0; i < m; ++i) {
    A[i][0] = ss.a[i];
    if (i + 1 < m) A[i][i + 1] = 1.0;
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) P[i][j] = ss.r[i] * ss.r[j];
  }
  double tmp[kMaxState][kMaxState];
  double A2[kMaxState][kMaxState];
  for (int iter = 0; iter < 128; ++iter) {
    // tmp = A P A'
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += A[i][k] * P[k][j];
        tmp[i][j] = s;
      }
    }
    double delta = 0.0;
    double scale = 0.0;
    double add[kMaxState][kMaxState];
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += tmp[i][k] * A[j][k];
        add[i][j] = s;
        delta = std::max(delta, std::abs(s));
        scale = std::max(scale, std::abs(P[i][j]));
      }
    }
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) P[i][j] += add[i][j];
    }
    if (!(delta > 1e-16 * (scale + 1.0))) break;
    // A <- A A
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += A[i][k] * A[k][j];
        A2[i][j] = s;
      }
    }
    std::memcpy(A, A2, sizeof(A));
  }
}

struct FilterSums {
  double sum_lnF = 0.0;
  double sum_v2F = 0.0;
  bool ok = false;
};

/// Prediction-error recursion with unit innovation variance. Once the
/// predicted covariance stops moving the gain is frozen and only the state
/// recursion continues.
FilterSums kalman_sums(const StateSpace& ss, std::span<const double> y) {
  const int m = ss.m;
  double P[kMaxState][kMaxState];
  stationary_cov(ss, P);

  double a[kMaxState] = {};
  double af[kMaxState];
  double sum_lnF = 0.0;
  double sum_v2F = 0.0;
  bool steady = false;
  double F = P[0][0];
  double k[kMaxState];

  for (std::size_t t = 0; t < y.size(); ++t) {
    const double v = y[t] - a[0];
    if (!steady) {
      F = P[0][0];
      if (!(F > 0.0) || !std::isfinite(F)) return {};
      for (int i = 0; i < m; ++i) k[i] = P[i][0] / F;
    }
    sum_lnF += std::log(F);
    sum_v2F += v * v / F;

    // filtered state
    for (int i = 0; i < m; ++i) af[i] = a[i] + k[i] * v;
    ss.apply_T(af, a);

    if (!steady) {
      // filtered covariance, then predict
      double Pf[kMaxState][kMaxState];
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          Pf[i][j] = P[i][j] - k[i] * P[0][j];
        }
      }
      ss.sandwich_T(Pf);
      double delta = 0.0;
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          const double next = Pf[i][j] + ss.r[i] * ss.r[j];
          delta = std::max(delta, std::abs(next - P[i][j]));
          P[i][j] = next;
        }
      }
      if (delta < 1e-13 * (1.0 + std::abs(P[0][0]))) {
        steady = true;
        F = P[0][0];
        if (!(F > 0.0)) return {};
        for (int i = 0; i < m; ++i) k[i] = P[i][0] / F;
      }
    }
  }
  if (!std::isfinite(sum_lnF) || !std::isfinite(sum_v2F)) return {};
  return {sum_lnF, sum_v2F, true};
}

double loglik_from_sums(const FilterSums& s, std::size_t n, double sigma2) {
  if (!s.ok || !(sigma2 > 0.0)) return -kInf;
  const double dn = static_cast<double>(n);
  return -0.5 * (dn * std::log(2.0 * std::numbers::pi * sigma2) + s.sum_lnF +
                 s.sum_v2F / sigma2);
}

// ---- Nelder-Mead ----------------------------------------------------------

struct SimplexResult {
  std::vector<double> x;
  double f = kInf;
  bool converged = false;
};

template <typename F>
SimplexResult nelder_mead(F&& f, std::vector<double> x0, double ftol,
                          int max_iter) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> pts(d + 1, x0);
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += 0.25;
  for (std::size_t i = 0; i <= d; ++i) fv[i] = f(pts[i]);

  std::vector<std::size_t> ord(d + 1);
  std::vector<double> centroid(d), xr(d), xe(d), xc(d);
  bool converged = false;

  for (int iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i <= d; ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = ord[0], worst = ord[d],
                      second = d >= 1 ? ord[d - 1] : ord[0];
    if (fv[worst] - fv[best] < ftol) {
      converged = true;
      break;
    }
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i <= d; ++i) {
        if (i != worst) s += pts[i][j];
      }
      centroid[j] = s / static_cast<double>(d);
    }
    auto blend = [&](std::vector<double>& out, double coef) {
      for (std::size_t j = 0; j < d; ++j) {
        out[j] = centroid[j] + coef * (pts[worst][j] - centroid[j]);
      }
    };
    blend(xr, -1.0);
    const double fr = f(xr);
    if (fr < fv[best]) {
      blend(xe, -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      pts[worst] = xr;
      fv[worst] = fr;
    } else {
      const bool outside = fr < fv[worst];
      blend(xc, outside ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fv[worst])) {
        pts[worst] = xc;
        fv[worst] = fc;
      } else {
        // shrink toward best
        for (std::size_t i = 0; i <= d; ++i) {
          if (i == best) continue;
          for (std::size_t j = 0; j < d; ++j) {
            pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
          }
          fv[i] = f(pts[i]);
        }
      }
    }
  }

  std::size_t arg = 0;
  for (std::size_t i = 1; i <= d; ++i) {
    if (fv[i] < fv[arg]) arg = i;
  }
  return {pts[arg], fv[arg], converged};
}

// ---- parameter mapping -----------------------------------------------------

double clamped_tanh(double u) {
  const double r = std::tanh(u);
  return std::clamp(r, -1.0 + 1e-12, 1.0 - 1e-12);
}

/// Unconstrained u (length p+q) -> (ar, ma) inside the valid region.
void map_params(std::span<const double> u, int p, int q,
                std::vector<double>& ar, std::vector<double>& ma) {
  std::vector<double> r(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) r[static_cast<std::size_t>(i)] =
      clamped_tanh(u[static_cast<std::size_t>(i)]);
  ar = pacf_to_coeffs(r);
  r.resize(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j) {
    r[static_cast<std::size_t>(j)] =
        clamped_tanh(u[static_cast<std::size_t>(p + j)]);
  }
  const auto c = pacf_to_coeffs(r);
  ma.resize(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j) ma[static_cast<std::size_t>(j)] =
      -c[static_cast<std::size_t>(j)];
}

double atanh_clamped(double r) {
  return std::atanh(std::clamp(r, -0.95, 0.95));
}

/// Sample autocovariance about zero (the model has no intercept).
std::vector<double> sample_acvf(std::span<const double> x, int max_lag) {
  const std::size_t n = x.size();
  std::vector<double> g(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int k = 0; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(k) < n; ++t) {
      s += x[t] * x[t + static_cast<std::size_t>(k)];
    }
    g[static_cast<std::size_t>(k)] = s / static_cast<double>(n);
  }
  return g;
}

/// Durbin-Levinson reflection coefficients from autocovariances.
std::vector<double> reflection_coeffs(std::span<const double> g, int order) {
  std::vector<double> refl;
  if (!(g[0] > 0.0)) return std::vector<double>(static_cast<std::size_t>(order), 0.0);
  std::vector<double> a, prev;
  double err = g[0];
  for (int k = 1; k <= order; ++k) {
    double acc = g[static_cast<std::size_t>(k)];
    for (int j = 1; j < k; ++j) {
      acc -= a[static_cast<std::size_t>(j - 1)] *
             g[static_cast<std::size_t>(k - j)];
    }
    double rk = err > 1e-300 ? acc / err : 0.0;
    rk = std::clamp(rk, -0.95, 0.95);
    refl.push_back(rk);
    prev = a;
    a.resize(static_cast<std::size_t>(k));
    a[static_cast<std::size_t>(k - 1)] = rk;
    for (int j = 1; j < k; ++j) {
      a[static_cast<std::size_t>(j - 1)] =
          prev[static_cast<std::size_t>(j - 1)] -
          rk * prev[static_cast<std::size_t>(k - 1 - j)];
    }
    err *= (1.0 - rk * rk);
  }
  return refl;
}

/// Moment-oriented start in the unconstrained space: AR part from the data's
/// reflection coefficients, MA part from residual autocorrelations.
std::vector<double> moment_start(std::span<const double> x, int p, int q) {
  std::vector<double> u(static_cast<std::size_t>(p + q), 0.0);
  const int need = std::max(p, q) + p;
  const auto g = sample_acvf(x, std::max(1, need));
  const auto refl = reflection_coeffs(g, p);
  for (int i = 0; i < p; ++i) {
    u[static_cast<std::size_t>(i)] = atanh_clamped(refl[static_cast<std::size_t>(i)]);
  }
  if (q > 0) {
    std::vector<double> resid;
    if (p > 0) {
      std::vector<double> rr(refl.begin(), refl.end());
      const auto ar = pacf_to_coeffs(rr);
      resid.reserve(x.size());
      for (std::size_t t = static_cast<std::size_t>(p); t < x.size(); ++t) {
        double e = x[t];
        for (int i = 0; i < p; ++i) {
          e -= ar[static_cast<std::size_t>(i)] *
               x[t - 1 - static_cast<std::size_t>(i)];
        }
        resid.push_back(e);
      }
    } else {
      resid.assign(x.begin(), x.end());
    }
    if (resid.size() > static_cast<std::size_t>(q) + 2) {
      const auto ge = sample_acvf(resid, q);
      for (int j = 1; j <= q; ++j) {
        const double rho = ge[0] > 1e-300 ? ge[static_cast<std::size_t>(j)] / ge[0] : 0.0;
        u[static_cast<std::size_t>(p + j - 1)] =
            atanh_clamped(std::clamp(-rho, -0.5, 0.5));
      }
    }
  }
  return u;
}

}  // namespace

bool ArmaSpec::stationary() const { return poly_stable(ar); }

bool ArmaSpec::invertible() const {
  std::vector<double> neg(ma.size());
  for (std::size_t i = 0; i < ma.size(); ++i) neg[i] = -ma[i];
  return poly_stable(neg);
}

void ArmaSpec::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw DomainError("ArmaSpec: sigma2 must be positive");
  }
  if (!stationary()) {
    throw DomainError("ArmaSpec: AR polynomial is not stationary");
  }
  if (!invertible()) {
    throw DomainError("ArmaSpec: MA polynomial is not invertible");
  }
}

std::vector<double> simulate_arma(const ArmaSpec& spec, std::size_t n,
                                  uint64_t seed) {
  spec.validate();
  if (n < 1) throw DomainError("simulate_arma: n must be >= 1");

  StateSpace ss;
  ss.init(spec.ar, spec.ma);
  const int m = ss.m;

  double P[kMaxState][kMaxState];
  stationary_cov(ss, P);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) P[i][j] *= spec.sigma2;
  }

  // Cholesky with a semidefinite guard (zero pivot -> zero column).
  double L[kMaxState][kMaxState] = {};
  for (int j = 0; j < m; ++j) {
    double djj = P[j][j];
    for (int k = 0; k < j; ++k) djj -= L[j][k] * L[j][k];
    if (djj < 1e-300) {
      continue;  // column already zeroed
    }
    L[j][j] = std::sqrt(djj);
    for (int i = j + 1; i < m; ++i) {
      double s = P[i][j];
      for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      L[i][j] = s / L[j][j];
    }
  }

  Rng rng(seed);
  double alpha[kMaxState] = {};
  for (int j = 0; j < m; ++j) {
    const double z = rng.normal();
    for (int i = j; i < m; ++i) alpha[i] += L[i][j] * z;
  }

  const double sigma = std::sqrt(spec.sigma2);
  std::vector<double> y(n);
  double next[kMaxState];
  for (std::size_t t = 0; t < n; ++t) {
    y[t] = alpha[0];
    const double eta = sigma * rng.normal();
    ss.apply_T(alpha, next);
    for (int i = 0; i < m; ++i) alpha[i] = next[i] + ss.r[i] * eta;
  }
  return y;
}

double arma_loglik(const ArmaSpec& spec, std::span<const double> data) {
  spec.validate();
  if (data.size() < static_cast<std::size_t>(spec.p() + spec.q() + 1)) {
    throw LengthError("arma_loglik: need at least p+q+1 observations");
  }
  StateSpace ss;
  ss.init(spec.ar, spec.ma);
  const auto sums = kalman_sums(ss, data);
  return loglik_from_sums(sums, data.size(), spec.sigma2);
}

ArmaFit fit_arma(std::span<const double> data, int p, int q) {
  if (p < 0 || q < 0 || p > kMaxOrder || q > kMaxOrder) {
    throw DomainError("fit_arma: orders must lie in 0..5");
  }
  if (data.size() < 20) {
    throw LengthError("fit_arma: need at least 20 observations");
  }

  const std::size_t n = data.size();
  const double dn = static_cast<double>(n);
  const int k = p + q + 1;

  ArmaFit fit;
  fit.n = n;

  if (p == 0 && q == 0) {
    double ss = 0.0;
    for (double x : data) ss += x * x;
    fit.spec = ArmaSpec{{}, {}, std::max(ss / dn, 1e-300)};
    fit.loglik = arma_loglik(fit.spec, data);
    fit.aic = -2.0 * fit.loglik + 2.0 * k;
    fit.converged = true;
    return fit;
  }

  // Negative concentrated log-likelihood in the unconstrained space.
  auto objective = [&](const std::vector<double>& u) -> double {
    std::vector<double> ar, ma;
    map_params(u, p, q, ar, ma);
    StateSpace ss;
    ss.init(ar, ma);
    const auto sums = kalman_sums(ss, data);
    if (!sums.ok) return 1e300;
    const double s2 = sums.sum_v2F / dn;
    if (!(s2 > 0.0) || !std::isfinite(s2)) return 1e300;
    return 0.5 * (dn * std::log(2.0 * std::numbers::pi) + sums.sum_lnF +
                  dn * std::log(s2) + dn);
  };

  const std::vector<double> zeros(static_cast<std::size_t>(p + q), 0.0);
  std::vector<double> mom = moment_start(data, p, q);
  std::vector<double> perturbed = mom;
  for (std::size_t i = 0; i < perturbed.size(); ++i) {
    perturbed[i] += (i % 2 == 0 ? 0.25 : -0.25);
  }

  SimplexResult best;
  for (const auto& start : {zeros, mom, perturbed}) {
    auto res = nelder_mead(objective, start, 1e-8, 2000);
    if (res.f < best.f) best = std::move(res);
  }

  std::vector<double> ar, ma;
  map_params(best.x, p, q, ar, ma);
  StateSpace ss;
  ss.init(ar, ma);
  const auto sums = kalman_sums(ss, data);
  const double s2 = sums.ok ? std::max(sums.sum_v2F / dn, 1e-300) : 1.0;

  fit.spec = ArmaSpec{std::move(ar), std::move(ma), s2};
  fit.loglik = arma_loglik(fit.spec, data);
  fit.aic = -2.0 * fit.loglik + 2.0 * k;
  fit.converged = best.converged && sums.ok && std::isfinite(fit.loglik);
  return fit;
}

std::vector<Order> candidate_set() {
  std::vector<Order> orders;
  orders.reserve(11);
  for (int p = 1; p <= 5; ++p) orders.push_back({p, 0});
  for (int q = 1; q <= 5; ++q) orders.push_back({0, q});
  orders.push_back({1, 1});
  return orders;
}

Selection select_by_aic(std::span<const double> data,
                        std::span<const Order> candidates) {
  if (candidates.empty()) {
    throw DomainError("select_by_aic: empty candidate collection");
  }
  Selection sel;
  sel.table.reserve(candidates.size());
  for (const auto& ord : candidates) {
    sel.table.push_back(fit_arma(data, ord.p, ord.q));
  }
  std::size_t win = 0;
  auto better = [&](const ArmaFit& a, const ArmaFit& b) {
    if (a.aic != b.aic) return a.aic < b.aic;
    const int sa = a.spec.p() + a.spec.q();
    const int sb = b.spec.p() + b.spec.q();
    if (sa != sb) return sa < sb;
    return a.spec.p() < b.spec.p();
  };
  for (std::size_t i = 1; i < sel.table.size(); ++i) {
    if (better(sel.table[i], sel.table[win])) win = i;
  }
  sel.winner = candidates[win];
  return sel;
}

nlohmann::json fit_table_json(const Selection& selection) {
  nlohmann::json j;
  j["winner"] = {{"p", selection.winner.p}, {"q", selection.winner.q}};
  j["candidates"] = nlohmann::json::array();
  for (const auto& fit : selection.table) {
    j["candidates"].push_back({{"p", fit.spec.p()},
                               {"q", fit.spec.q()},
                               {"ar", fit.spec.ar},
                               {"ma", fit.spec.ma},
                               {"sigma2", fit.spec.sigma2},
                               {"loglik", fit.loglik},
                               {"aic", fit.aic},
                               {"converged", fit.converged}});
  }
  return j;
}

std::vector<double> pacf_to_coeffs(std::span<const double> pacf) {
  std::vector<double> coeffs;
  coeffs.reserve(pacf.size());
  std::vector<double> prev;
  for (std::size_t j = 0; j < pacf.size(); ++j) {
    const double rj = pacf[j];
    prev = coeffs;
    coeffs.resize(j + 1);
    for (std::size_t i = 0; i < j; ++i) {
      coeffs[i] = prev[i] - rj * prev[j - 1 - i];
    }
    coeffs[j] = rj;
  }
  return coeffs;
}

std::vector<double> coeffs_to_pacf(std::span<const double> coeffs) {
  std::vector<double> a(coeffs.begin(), coeffs.end());
  std::vector<double> pacf(coeffs.size());
  for (std::size_t j = coeffs.size(); j > 0; --j) {
    const double rj = a[j - 1];
    pacf[j - 1] = rj;
    const double denom = 1.0 - rj * rj;
    if (denom < 1e-300) {
      throw DomainError("coeffs_to_pacf: coefficients on the region boundary");
    }
    std::vector<double> prev(j - 1);
    for (std::size_t i = 0; i + 1 < j; ++i) {
      prev[i] = (a[i] + rj * a[j - 2 - i]) / denom;
    }
    a = std::move(prev);
  }
  return pacf;
}

}  // namespace dendrostat::arma
