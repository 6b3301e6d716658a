#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "kspec/errors.hpp"
#include "kspec/signal.hpp"

namespace kspec {

// Discrete SISO linear system x_t = A x_{t-1} + b u_{t-1}, y_t = c'x_t + D u_t.
struct StateSpaceParams {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double D = 0.0;

  int dim() const { return static_cast<int>(A.rows()); }

  void check_dims() const {
    if (A.rows() != A.cols() || b.size() != A.rows() || c.size() != A.rows()) {
      throw DimensionMismatch("StateSpaceParams: inconsistent dimensions");
    }
  }
};

inline double spectral_radius(const Eigen::MatrixXd& a) {
  const Eigen::VectorXcd ev = a.eigenvalues();
  double r = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) r = std::max(r, std::abs(ev[i]));
  return r;
}

inline bool is_stable(const StateSpaceParams& p) {
  return spectral_radius(p.A) < 1.0;
}

// Rational transfer function in descending powers of the shift operator q,
// denominator monic.
struct TransferFunction {
  std::vector<double> num;
  std::vector<double> den;
};

// theta[0] is the direct term D, theta[i] = c'A^{i-1}b for i >= 1.
struct FirCoefficients {
  std::vector<double> theta;
  double tail_bound = 0.0;  // |c'A^{d'}b| at the truncation point

  int order() const { return static_cast<int>(theta.size()) - 1; }
};

struct SsmSimResult {
  Signal y;
  std::vector<Eigen::VectorXd> states;
  bool instability_warning = false;
};

inline SsmSimResult simulate_ssm(const StateSpaceParams& p, const Signal& u,
                                 const Eigen::VectorXd& x0) {
  p.check_dims();
  if (u.empty()) throw DimensionMismatch("simulate_ssm: empty input");
  if (x0.size() != p.A.rows()) {
    throw DimensionMismatch("simulate_ssm: x0 dimension mismatch");
  }
  SsmSimResult res;
  const std::size_t t_len = u.size();
  if (t_len > 10 * static_cast<std::size_t>(p.dim()) &&
      spectral_radius(p.A) >= 1.0) {
    res.instability_warning = true;
  }
  res.y.resize(t_len);
  res.states.reserve(t_len);
  Eigen::VectorXd x = x0;
  res.states.push_back(x);
  res.y[0] = p.c.dot(x) + p.D * u[0];
  for (std::size_t t = 1; t < t_len; ++t) {
    x = p.A * x + p.b * u[t - 1];
    res.states.push_back(x);
    res.y[t] = p.c.dot(x) + p.D * u[t];
  }
  return res;
}

inline SsmSimResult simulate_ssm(const StateSpaceParams& p, const Signal& u) {
  return simulate_ssm(p, u, Eigen::VectorXd::Zero(p.A.rows()));
}

// Leverrier-Faddeev recursion: char poly det(qI - A) and the matrix
// coefficients of adj(qI - A) in one pass, no eigendecomposition.
inline TransferFunction ssm_to_transfer(const StateSpaceParams& p) {
  p.check_dims();
  const int d = p.dim();
  TransferFunction tf;
  tf.den.resize(static_cast<std::size_t>(d) + 1);
  tf.den[0] = 1.0;
  std::vector<double> adj_num(static_cast<std::size_t>(d), 0.0);

  Eigen::MatrixXd bk = Eigen::MatrixXd::Identity(d, d);
  for (int k = 0; k < d; ++k) {
    adj_num[static_cast<std::size_t>(k)] = p.c.dot(bk * p.b);
    const Eigen::MatrixXd abk = p.A * bk;
    const double ck = -abk.trace() / static_cast<double>(k + 1);
    tf.den[static_cast<std::size_t>(k) + 1] = ck;
    bk = abk + ck * Eigen::MatrixXd::Identity(d, d);
  }

  // numerator = c' adj(qI-A) b + D * den; degree d iff D != 0
  if (p.D != 0.0) {
    tf.num.resize(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) {
      tf.num[static_cast<std::size_t>(k)] =
          p.D * tf.den[static_cast<std::size_t>(k)] +
          (k >= 1 ? adj_num[static_cast<std::size_t>(k) - 1] : 0.0);
    }
  } else {
    tf.num = adj_num;
    if (tf.num.empty()) tf.num.push_back(0.0);
  }
  return tf;
}

// Evaluate a polynomial in descending powers at complex q.
inline std::complex<double> polyval(const std::vector<double>& coeffs,
                                    std::complex<double> q) {
  std::complex<double> acc(0.0, 0.0);
  for (double c : coeffs) acc = acc * q + c;
  return acc;
}

inline std::complex<double> evaluate(const TransferFunction& tf,
                                     std::complex<double> q) {
  return polyval(tf.num, q) / polyval(tf.den, q);
}

// Markov-parameter truncation: theta_0 = D, theta_i = c'A^{i-1}b.
inline FirCoefficients ssm_to_fir(const StateSpaceParams& p, int dprime) {
  p.check_dims();
  FirCoefficients fir;
  fir.theta.resize(static_cast<std::size_t>(dprime) + 1);
  fir.theta[0] = p.D;
  Eigen::VectorXd v = p.b;
  for (int i = 1; i <= dprime; ++i) {
    fir.theta[static_cast<std::size_t>(i)] = p.c.dot(v);
    v = p.A * v;
  }
  fir.tail_bound = std::abs(p.c.dot(v));
  return fir;
}

// y_t = sum theta_i u_{t-i} with u_{t<0} = 0.
inline Signal fir_convolve(const FirCoefficients& fir, const Signal& u) {
  Signal y(u.size(), 0.0);
  const std::size_t taps = fir.theta.size();
  for (std::size_t t = 0; t < u.size(); ++t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < taps && i <= t; ++i) {
      acc += fir.theta[i] * u[t - i];
    }
    y[t] = acc;
  }
  return y;
}

// Difference equation for G(q) = num(q)/den(q) with monic den and zero
// initial conditions. With n = deg(den):
//   y_t = sum_{i=0}^{n} num~_i u_{t-i} - sum_{i=1}^{n} den_i y_{t-i},
// where num~ is num front-padded to length n+1.
inline Signal simulate_transfer(const TransferFunction& tf, const Signal& u) {
  if (tf.den.empty() || tf.den[0] != 1.0) {
    throw DimensionMismatch("simulate_transfer: denominator must be monic");
  }
  if (tf.num.size() > tf.den.size()) {
    throw DimensionMismatch("simulate_transfer: improper transfer function");
  }
  const std::size_t n = tf.den.size() - 1;
  std::vector<double> num(tf.den.size(), 0.0);
  const std::size_t pad = tf.den.size() - tf.num.size();
  for (std::size_t i = 0; i < tf.num.size(); ++i) num[pad + i] = tf.num[i];

  Signal y(u.size(), 0.0);
  for (std::size_t t = 0; t < u.size(); ++t) {
    double acc = 0.0;
    for (std::size_t i = 0; i <= n && i <= t; ++i) acc += num[i] * u[t - i];
    for (std::size_t i = 1; i <= n && i <= t; ++i) acc -= tf.den[i] * y[t - i];
    y[t] = acc;
  }
  return y;
}

// --- JSON serialization (row-major matrix layout) ---

inline nlohmann::json to_json(const StateSpaceParams& p) {
  nlohmann::json j;
  j["d"] = p.dim();
  std::vector<double> a_flat;
  a_flat.reserve(static_cast<std::size_t>(p.A.size()));
  for (Eigen::Index r = 0; r < p.A.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.A.cols(); ++c) a_flat.push_back(p.A(r, c));
  }
  j["A"] = a_flat;
  j["b"] = std::vector<double>(p.b.data(), p.b.data() + p.b.size());
  j["c"] = std::vector<double>(p.c.data(), p.c.data() + p.c.size());
  j["D"] = p.D;
  return j;
}

inline StateSpaceParams state_space_from_json(const nlohmann::json& j) {
  StateSpaceParams p;
  const int d = j.at("d").get<int>();
  const auto a_flat = j.at("A").get<std::vector<double>>();
  if (a_flat.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {
    throw DimensionMismatch("state_space_from_json: bad A size");
  }
  p.A.resize(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      p.A(r, c) = a_flat[static_cast<std::size_t>(r) * d + c];
    }
  }
  const auto bv = j.at("b").get<std::vector<double>>();
  const auto cv = j.at("c").get<std::vector<double>>();
  p.b = Eigen::Map<const Eigen::VectorXd>(bv.data(), static_cast<Eigen::Index>(bv.size()));
  p.c = Eigen::Map<const Eigen::VectorXd>(cv.data(), static_cast<Eigen::Index>(cv.size()));
  p.D = j.at("D").get<double>();
  p.check_dims();
  return p;
}

inline nlohmann::json to_json(const TransferFunction& tf) {
  return nlohmann::json{{"numerator", tf.num}, {"denominator", tf.den}};
}

inline TransferFunction transfer_from_json(const nlohmann::json& j) {
  TransferFunction tf;
  tf.num = j.at("numerator").get<std::vector<double>>();
  tf.den = j.at("denominator").get<std::vector<double>>();
  return tf;
}

}  // namespace kspec
