#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kspec/errors.hpp"
#include "kspec/rng.hpp"
#include "kspec/signal.hpp"
#include "kspec/ssm.hpp"

namespace kspec {

struct CovarianceSequence {
  std::vector<double> r;  // r(0)..r(max_lag)
  double mean = 0.0;

  int max_lag() const { return static_cast<int>(r.size()) - 1; }
};

// Finite-sample estimate with 1/T normalization: biased, but it keeps the
// Toeplitz PE matrix positive semidefinite.
inline CovarianceSequence autocovariance(const Signal& u, int max_lag) {
  const std::size_t t_len = u.size();
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= t_len) {
    throw LagTooLarge("autocovariance: max_lag " + std::to_string(max_lag) +
                      " with T=" + std::to_string(t_len));
  }
  CovarianceSequence cov;
  double mean = 0.0;
  for (double v : u) mean += v;
  mean /= static_cast<double>(t_len);
  cov.mean = mean;
  cov.r.resize(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int l = 0; l <= max_lag; ++l) {
    double acc = 0.0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(l) < t_len; ++t) {
      acc += (u[t + static_cast<std::size_t>(l)] - mean) * (u[t] - mean);
    }
    cov.r[static_cast<std::size_t>(l)] = acc / static_cast<double>(t_len);
  }
  return cov;
}

// Symmetric Toeplitz matrix built from r(0)..r(d-1).
inline Eigen::MatrixXd pe_matrix(const CovarianceSequence& cov, int d) {
  if (d < 1 || d > static_cast<int>(cov.r.size())) {
    throw LagTooLarge("pe_matrix: order exceeds available lags");
  }
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      m(i, j) = cov.r[static_cast<std::size_t>(std::abs(i - j))];
    }
  }
  return m;
}

// Largest d <= max_order whose PE matrix has minimum eigenvalue above
// tol * r(0). The relative tolerance makes the check scale-free.
inline int pe_order(const Signal& u, int max_order, double tol = 1e-6) {
  const auto cov = autocovariance(u, max_order - 1);
  const double r0 = cov.r[0];
  int best = 0;
  for (int d = 1; d <= max_order; ++d) {
    const Eigen::MatrixXd m = pe_matrix(cov, d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.eigenvalues().minCoeff() > tol * r0) {
      best = d;
    } else {
      break;
    }
  }
  return best;
}

// Toeplitz regressor: row for t = d..T-1 is [u_{t-1}, ..., u_{t-d}].
inline Eigen::MatrixXd fir_regressor(const Signal& u, int d) {
  const std::size_t t_len = u.size();
  if (static_cast<std::size_t>(d) >= t_len) {
    throw DimensionMismatch("fir_regressor: d >= T");
  }
  const std::size_t rows = t_len - static_cast<std::size_t>(d);
  Eigen::MatrixXd ut(static_cast<Eigen::Index>(rows), d);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + static_cast<std::size_t>(d);
    for (int i = 0; i < d; ++i) {
      ut(static_cast<Eigen::Index>(r), i) = u[t - 1 - static_cast<std::size_t>(i)];
    }
  }
  return ut;
}

struct FirLsResult {
  FirCoefficients coeffs;  // theta[0] = 0, taps in theta[1..d]
  double residual_norm = 0.0;
};

// Least squares over the Toeplitz regressor. Throws RankDeficient when the
// singular-value ratio signals PE failure.
inline FirLsResult estimate_fir_ls(const Signal& u, const Signal& y, int d) {
  if (u.size() != y.size()) {
    throw LengthMismatch("estimate_fir_ls: input/output length mismatch");
  }
  if (u.size() <= 2 * static_cast<std::size_t>(d)) {
    throw DimensionMismatch("estimate_fir_ls: need T > 2d");
  }
  const Eigen::MatrixXd ut = fir_regressor(u, d);
  Eigen::VectorXd yt(ut.rows());
  for (Eigen::Index r = 0; r < ut.rows(); ++r) {
    yt[r] = y[static_cast<std::size_t>(r) + static_cast<std::size_t>(d)];
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(ut, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv[sv.size() - 1] < 1e-8 * sv[0]) {
    throw RankDeficient("estimate_fir_ls: regressor rank below " +
                        std::to_string(d));
  }
  const Eigen::VectorXd theta = svd.solve(yt);
  FirLsResult res;
  res.coeffs.theta.resize(static_cast<std::size_t>(d) + 1, 0.0);
  for (int i = 0; i < d; ++i) res.coeffs.theta[static_cast<std::size_t>(i) + 1] = theta[i];
  res.residual_norm = (ut * theta - yt).norm();
  return res;
}

// Fisher information over FIR parameters, with the noise variance folded in.
struct Fim {
  Eigen::MatrixXd M;
  double sigma = 1.0;
};

// Time-domain FIM: M = U_T' U_T / sigma.
inline Fim fim_fir_time(const Signal& u, int d, double sigma) {
  if (sigma <= 0.0) throw ConfigError("fim_fir_time: sigma must be > 0");
  const Eigen::MatrixXd ut = fir_regressor(u, d);
  Fim f;
  f.sigma = sigma;
  f.M = (ut.transpose() * ut) / sigma;
  return f;
}

// Frequency-domain FIM for the FIR parameterization dG/dtheta_i = e^{-jwi}:
// M[i,k] = (1/(sigma T)) sum_s |U_s|^2 cos(2 pi s (i-k) / T). Toeplitz by
// construction; agrees with the time-domain form up to edge effects.
inline Fim fim_fir_freq(const Spectrum& spec, int d, double sigma) {
  if (sigma <= 0.0) throw ConfigError("fim_fir_freq: sigma must be > 0");
  const std::size_t t_len = spec.source_length;
  const double pi = 3.14159265358979323846;
  std::vector<double> m_lag(static_cast<std::size_t>(d), 0.0);
  for (int l = 0; l < d; ++l) {
    double acc = 0.0;
    for (std::size_t s = 0; s < spec.size(); ++s) {
      const double mag = spec.magnitudes[s];
      acc += mag * mag *
             std::cos(2.0 * pi * static_cast<double>(s) * l /
                      static_cast<double>(t_len));
    }
    m_lag[static_cast<std::size_t>(l)] = acc / (sigma * static_cast<double>(t_len));
  }
  Fim f;
  f.sigma = sigma;
  f.M.resize(d, d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      f.M(i, k) = m_lag[static_cast<std::size_t>(std::abs(i - k))];
    }
  }
  return f;
}

// A-optimality score: trace of the FIM.
inline double a_optimality(const Fim& f) { return f.M.trace(); }

// Multisine metadata: enough to reconstruct the signal bit-exactly.
struct MultisineSpec {
  int components = 0;
  std::vector<double> frequencies;  // omega_j
  std::vector<double> phases;       // psi_j
  double amplitude = 0.0;           // c after norm scaling
  std::size_t length = 0;
  double target_norm = 0.0;
  std::uint64_t seed = 0;
  bool integer_bins = false;
};

inline Signal render_multisine(const MultisineSpec& spec) {
  const double pi = 3.14159265358979323846;
  const double t_d = static_cast<double>(spec.length);
  Signal u(spec.length, 0.0);
  for (std::size_t t = 0; t < spec.length; ++t) {
    double acc = 0.0;
    for (int j = 0; j < spec.components; ++j) {
      acc += std::sin(2.0 * pi * spec.frequencies[static_cast<std::size_t>(j)] *
                          static_cast<double>(t) / t_d +
                      4.0 * pi * spec.phases[static_cast<std::size_t>(j)] / t_d);
    }
    u[t] = spec.amplitude * acc;
  }
  return u;
}

struct MultisineResult {
  Signal signal;
  MultisineSpec spec;
};

// u(t) = c sum_j sin(2 pi w_j t / T + 4 pi psi_j / T) with w_j, psi_j drawn
// from U(0, T/2) and c scaled so ||u||_2 hits target_norm. The integer-bins
// mode draws distinct integer frequencies in [1, T/2) for leakage-free tests.
inline MultisineResult gen_multisine(int components, std::size_t t_len,
                                     double target_norm, std::uint64_t seed,
                                     bool integer_bins = false) {
  if (components < 1 || t_len < 2) {
    throw ConfigError("gen_multisine: need i >= 1 and T >= 2");
  }
  Rng rng(seed);
  MultisineSpec spec;
  spec.components = components;
  spec.length = t_len;
  spec.target_norm = target_norm;
  spec.seed = seed;
  spec.integer_bins = integer_bins;
  spec.amplitude = 1.0;

  const double half = static_cast<double>(t_len) / 2.0;
  auto draw = [&]() {
    spec.frequencies.clear();
    spec.phases.clear();
    if (integer_bins) {
      const std::uint64_t hi = t_len / 2 - 1;
      if (static_cast<std::uint64_t>(components) > hi) {
        throw ConfigError("gen_multisine: too many components for distinct bins");
      }
      std::vector<bool> used(t_len / 2, false);
      for (int j = 0; j < components; ++j) {
        std::uint64_t bin;
        do {
          bin = rng.uniform_int(1, hi);
        } while (used[bin]);
        used[bin] = true;
        spec.frequencies.push_back(static_cast<double>(bin));
      }
    } else {
      for (int j = 0; j < components; ++j) {
        spec.frequencies.push_back(rng.uniform(0.0, half));
      }
    }
    for (int j = 0; j < components; ++j) {
      spec.phases.push_back(rng.uniform(0.0, half));
    }
  };

  draw();
  Signal raw = render_multisine(spec);
  if (l2_norm(raw) == 0.0) {
    draw();  // one phase resample before giving up
    raw = render_multisine(spec);
    if (l2_norm(raw) == 0.0) {
      throw DegenerateSignal("gen_multisine: raw sum identically zero");
    }
  }
  spec.amplitude = target_norm / l2_norm(raw);
  MultisineResult res;
  res.spec = spec;
  res.signal = render_multisine(spec);
  return res;
}

// Piecewise-constant excitation: i.i.d. U(-1,1) levels held for `interval`
// steps, then scaled to target_norm.
inline Signal gen_piecewise_constant(std::size_t t_len, int interval,
                                     double target_norm, std::uint64_t seed) {
  if (interval < 1) throw ConfigError("gen_piecewise_constant: interval >= 1");
  Rng rng(seed);
  Signal u(t_len, 0.0);
  std::size_t t = 0;
  while (t < t_len) {
    const double level = rng.uniform(-1.0, 1.0);
    for (int k = 0; k < interval && t < t_len; ++k, ++t) u[t] = level;
  }
  const double n = l2_norm(u);
  if (n > 0.0) {
    for (double& v : u) v *= target_norm / n;
  }
  return u;
}

inline nlohmann::json to_json(const MultisineSpec& spec) {
  return nlohmann::json{{"components", spec.components},
                        {"frequencies", spec.frequencies},
                        {"phases", spec.phases},
                        {"amplitude", spec.amplitude},
                        {"length", spec.length},
                        {"target_norm", spec.target_norm},
                        {"seed", spec.seed},
                        {"integer_bins", spec.integer_bins}};
}

inline MultisineSpec multisine_from_json(const nlohmann::json& j) {
  MultisineSpec spec;
  spec.components = j.at("components").get<int>();
  spec.frequencies = j.at("frequencies").get<std::vector<double>>();
  spec.phases = j.at("phases").get<std::vector<double>>();
  spec.amplitude = j.at("amplitude").get<double>();
  spec.length = j.at("length").get<std::size_t>();
  spec.target_norm = j.at("target_norm").get<double>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.integer_bins = j.at("integer_bins").get<bool>();
  return spec;
}

}  // namespace kspec
