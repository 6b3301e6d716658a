#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kspec/errors.hpp"
#include "kspec/kspectral.hpp"
#include "kspec/model_config.hpp"
#include "kspec/rng.hpp"
#include "kspec/signal.hpp"
#include "kspec/ssm.hpp"

namespace kspec {

inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double silu(double x) { return x * sigmoid(x); }

inline double silu_deriv(double x) {
  const double s = sigmoid(x);
  return s * (1.0 + x * (1.0 - s));
}

struct LinearLayer {
  Eigen::MatrixXd W;
  Eigen::VectorXd b;
};

// Trainable deep SSM: input linear -> SiLU -> [SSM bank -> SiLU] x l_ssm
// -> output linear. Each bank holds cfg.channels independent SISO SSMs.
struct DeepSsm {
  DeepSsmConfig cfg;
  LinearLayer input;
  std::vector<std::vector<StateSpaceParams>> banks;  // [layer][channel]
  LinearLayer output;

  std::size_t num_params() const {
    const std::size_t d = static_cast<std::size_t>(cfg.state_dim);
    const std::size_t per_channel = d * d + 2 * d + 1;
    return static_cast<std::size_t>(input.W.size() + input.b.size()) +
           static_cast<std::size_t>(cfg.ssm_layers) *
               static_cast<std::size_t>(cfg.channels) * per_channel +
           static_cast<std::size_t>(output.W.size() + output.b.size());
  }

  // Flat parameter vector: input W (row-major), input b, then per layer per
  // channel A (row-major), b, c, D, then output W, output b.
  std::vector<double> flatten() const {
    std::vector<double> v;
    v.reserve(num_params());
    auto push_mat = [&v](const Eigen::MatrixXd& m) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) v.push_back(m(r, c));
      }
    };
    auto push_vec = [&v](const Eigen::VectorXd& x) {
      for (Eigen::Index i = 0; i < x.size(); ++i) v.push_back(x[i]);
    };
    push_mat(input.W);
    push_vec(input.b);
    for (const auto& bank : banks) {
      for (const auto& ch : bank) {
        push_mat(ch.A);
        push_vec(ch.b);
        push_vec(ch.c);
        v.push_back(ch.D);
      }
    }
    push_mat(output.W);
    push_vec(output.b);
    return v;
  }

  void set_from_flat(const std::vector<double>& v) {
    if (v.size() != num_params()) {
      throw DimensionMismatch("set_from_flat: parameter count mismatch");
    }
    std::size_t pos = 0;
    auto pull_mat = [&](Eigen::MatrixXd& m) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = v[pos++];
      }
    };
    auto pull_vec = [&](Eigen::VectorXd& x) {
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = v[pos++];
    };
    pull_mat(input.W);
    pull_vec(input.b);
    for (auto& bank : banks) {
      for (auto& ch : bank) {
        pull_mat(ch.A);
        pull_vec(ch.b);
        pull_vec(ch.c);
        ch.D = v[pos++];
      }
    }
    pull_mat(output.W);
    pull_vec(output.b);
  }
};

// Same-shaped parameter container with everything zeroed; used for gradients.
inline DeepSsm zero_like(const DeepSsm& m) {
  DeepSsm z;
  z.cfg = m.cfg;
  z.input.W = Eigen::MatrixXd::Zero(m.input.W.rows(), m.input.W.cols());
  z.input.b = Eigen::VectorXd::Zero(m.input.b.size());
  z.banks.resize(m.banks.size());
  for (std::size_t l = 0; l < m.banks.size(); ++l) {
    z.banks[l].resize(m.banks[l].size());
    for (std::size_t i = 0; i < m.banks[l].size(); ++i) {
      const auto& ch = m.banks[l][i];
      z.banks[l][i].A = Eigen::MatrixXd::Zero(ch.A.rows(), ch.A.cols());
      z.banks[l][i].b = Eigen::VectorXd::Zero(ch.b.size());
      z.banks[l][i].c = Eigen::VectorXd::Zero(ch.c.size());
      z.banks[l][i].D = 0.0;
    }
  }
  z.output.W = Eigen::MatrixXd::Zero(m.output.W.rows(), m.output.W.cols());
  z.output.b = Eigen::VectorXd::Zero(m.output.b.size());
  return z;
}

inline void add_scaled(DeepSsm& m, const DeepSsm& g, double s) {
  m.input.W += s * g.input.W;
  m.input.b += s * g.input.b;
  for (std::size_t l = 0; l < m.banks.size(); ++l) {
    for (std::size_t i = 0; i < m.banks[l].size(); ++i) {
      m.banks[l][i].A += s * g.banks[l][i].A;
      m.banks[l][i].b += s * g.banks[l][i].b;
      m.banks[l][i].c += s * g.banks[l][i].c;
      m.banks[l][i].D += s * g.banks[l][i].D;
    }
  }
  m.output.W += s * g.output.W;
  m.output.b += s * g.output.b;
}

// Deterministic per seed. Linear layers get U(-1,1)/sqrt(fan_in) weights and
// zero biases. Each SSM channel starts stable: A is an orthogonal similarity
// of a diagonal with radii U(0.3, 0.95) and random signs, b and c are
// unit-scaled Gaussian, D = 0.
inline DeepSsm init_model(const DeepSsmConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  DeepSsm m;
  m.cfg = cfg;

  auto init_linear = [&rng](int rows, int cols) {
    LinearLayer layer;
    const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
    layer.W.resize(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        layer.W(r, c) = scale * rng.uniform(-1.0, 1.0);
      }
    }
    layer.b = Eigen::VectorXd::Zero(rows);
    return layer;
  };

  m.input = init_linear(cfg.channels, cfg.input_dim);
  m.output = init_linear(cfg.output_dim, cfg.channels);

  const int d = cfg.state_dim;
  m.banks.resize(static_cast<std::size_t>(cfg.ssm_layers));
  for (auto& bank : m.banks) {
    bank.resize(static_cast<std::size_t>(cfg.channels));
    for (auto& ch : bank) {
      Eigen::VectorXd radii(d);
      for (int i = 0; i < d; ++i) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        radii[i] = sign * rng.uniform(0.3, 0.95);
      }
      Eigen::MatrixXd g(d, d);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) g(r, c) = rng.gaussian();
      }
      const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
      const Eigen::MatrixXd q = qr.householderQ();
      ch.A = q * radii.asDiagonal() * q.transpose();
      ch.b.resize(d);
      ch.c.resize(d);
      const double bc_scale = 1.0 / std::sqrt(static_cast<double>(d));
      for (int i = 0; i < d; ++i) {
        ch.b[i] = bc_scale * rng.gaussian();
        ch.c[i] = bc_scale * rng.gaussian();
      }
      ch.D = 0.0;
    }
  }
  return m;
}

// Pre-SSM signals u^{l,i}_{0:T-1}, one per SSM layer and channel.
struct CapturedSignals {
  std::vector<std::vector<Signal>> pre_ssm;  // [layer][channel]

  int num_channels() const {
    int n = 0;
    for (const auto& layer : pre_ssm) n += static_cast<int>(layer.size());
    return n;
  }
};

// Everything the backward pass needs; columns are time steps.
struct ForwardTrace {
  Eigen::MatrixXd z0;                        // pre-SiLU of input linear
  std::vector<Eigen::MatrixXd> u;            // [layer] pre-SSM (post-SiLU)
  std::vector<std::vector<Eigen::MatrixXd>> x;  // [layer][channel] states
  std::vector<Eigen::MatrixXd> y;            // [layer] SSM outputs
  Eigen::MatrixXd a;                         // post-SiLU of last SSM layer
  Eigen::MatrixXd yL;                        // final output
};

inline void run_channel_forward(const StateSpaceParams& p,
                                const Eigen::MatrixXd& u, int channel,
                                Eigen::MatrixXd& x_out,
                                Eigen::MatrixXd& y_out) {
  const Eigen::Index t_len = u.cols();
  const int d = p.dim();
  x_out.resize(d, t_len);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  x_out.col(0) = x;
  y_out(channel, 0) = p.c.dot(x) + p.D * u(channel, 0);
  for (Eigen::Index t = 1; t < t_len; ++t) {
    x = p.A * x + p.b * u(channel, t - 1);
    x_out.col(t) = x;
    y_out(channel, t) = p.c.dot(x) + p.D * u(channel, t);
  }
}

inline ForwardTrace forward_trace(const DeepSsm& m, const Eigen::MatrixXd& u0) {
  if (u0.rows() != m.cfg.input_dim) {
    throw DimensionMismatch("forward: input dimension mismatch");
  }
  const Eigen::Index t_len = u0.cols();
  ForwardTrace tr;
  tr.z0 = (m.input.W * u0).colwise() + m.input.b;
  const std::size_t layers = m.banks.size();
  tr.u.resize(layers);
  tr.x.resize(layers);
  tr.y.resize(layers);

  Eigen::MatrixXd cur = tr.z0.unaryExpr([](double v) { return silu(v); });
  for (std::size_t l = 0; l < layers; ++l) {
    tr.u[l] = cur;
    tr.y[l].resize(m.cfg.channels, t_len);
    tr.x[l].resize(static_cast<std::size_t>(m.cfg.channels));
    for (int i = 0; i < m.cfg.channels; ++i) {
      run_channel_forward(m.banks[l][static_cast<std::size_t>(i)], tr.u[l], i,
                          tr.x[l][static_cast<std::size_t>(i)], tr.y[l]);
    }
    cur = tr.y[l].unaryExpr([](double v) { return silu(v); });
  }
  tr.a = cur;
  tr.yL = (m.output.W * tr.a).colwise() + m.output.b;
  if (!tr.yL.allFinite()) {
    throw NonFinite("forward: non-finite activations");
  }
  return tr;
}

inline CapturedSignals capture_from_trace(const ForwardTrace& tr) {
  CapturedSignals cap;
  cap.pre_ssm.resize(tr.u.size());
  for (std::size_t l = 0; l < tr.u.size(); ++l) {
    const Eigen::MatrixXd& u = tr.u[l];
    cap.pre_ssm[l].resize(static_cast<std::size_t>(u.rows()));
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      Signal s(static_cast<std::size_t>(u.cols()));
      for (Eigen::Index t = 0; t < u.cols(); ++t) {
        s[static_cast<std::size_t>(t)] = u(i, t);
      }
      cap.pre_ssm[l][static_cast<std::size_t>(i)] = std::move(s);
    }
  }
  return cap;
}

struct ForwardResult {
  Signal yL;
  CapturedSignals cap;
};

inline ForwardResult forward(const DeepSsm& m, const Signal& u0) {
  if (m.cfg.input_dim != 1 || m.cfg.output_dim != 1) {
    throw DimensionMismatch("forward(Signal): model is not SISO");
  }
  Eigen::MatrixXd u(1, static_cast<Eigen::Index>(u0.size()));
  for (std::size_t t = 0; t < u0.size(); ++t) {
    u(0, static_cast<Eigen::Index>(t)) = u0[t];
  }
  const ForwardTrace tr = forward_trace(m, u);
  ForwardResult res;
  res.cap = capture_from_trace(tr);
  res.yL.resize(u0.size());
  for (std::size_t t = 0; t < u0.size(); ++t) {
    res.yL[t] = tr.yL(0, static_cast<Eigen::Index>(t));
  }
  return res;
}

// Reverse pass through one SSM channel. gy holds dL/dy_t for this channel;
// gu accumulates dL/du_t. Gradients land in the matching channel of `grad`.
inline void run_channel_backward(const StateSpaceParams& p,
                                 const Eigen::MatrixXd& u,
                                 const Eigen::MatrixXd& x,
                                 const Eigen::MatrixXd& gy, int channel,
                                 StateSpaceParams& grad,
                                 Eigen::MatrixXd& gu) {
  const Eigen::Index t_len = u.cols();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(p.dim());
  for (Eigen::Index t = t_len - 1; t >= 0; --t) {
    const double g = gy(channel, t);
    grad.c += g * x.col(t);
    grad.D += g * u(channel, t);
    gu(channel, t) += p.D * g;
    lambda += g * p.c;
    if (t >= 1) {
      grad.A += lambda * x.col(t - 1).transpose();
      grad.b += lambda * u(channel, t - 1);
      gu(channel, t - 1) += p.b.dot(lambda);
      lambda = p.A.transpose() * lambda;
    }
  }
}

struct LossGrad {
  double loss = 0.0;
  DeepSsm grad;  // parameter-shaped gradient container
};

// loss = (1/T) sum_t ||yL_t - target_t||^2, gradient by backpropagation
// through the unrolled recurrence.
inline LossGrad loss_and_gradient(const DeepSsm& m, const Eigen::MatrixXd& u0,
                                  const Eigen::MatrixXd& target,
                                  const ForwardTrace& tr) {
  if (target.rows() != m.cfg.output_dim || target.cols() != u0.cols()) {
    throw LengthMismatch("loss_and_gradient: target shape mismatch");
  }
  const Eigen::Index t_len = u0.cols();
  LossGrad out;
  out.grad = zero_like(m);

  const Eigen::MatrixXd resid = tr.yL - target;
  out.loss = resid.squaredNorm() / static_cast<double>(t_len);
  if (!std::isfinite(out.loss)) throw NonFinite("loss is non-finite");

  const Eigen::MatrixXd gyl = (2.0 / static_cast<double>(t_len)) * resid;
  out.grad.output.W = gyl * tr.a.transpose();
  out.grad.output.b = gyl.rowwise().sum();

  // grad wrt post-SiLU of the last SSM layer
  Eigen::MatrixXd ga = m.output.W.transpose() * gyl;

  for (int l = static_cast<int>(m.banks.size()) - 1; l >= 0; --l) {
    const std::size_t lu = static_cast<std::size_t>(l);
    // through SiLU applied to y^l
    const Eigen::MatrixXd gy =
        ga.cwiseProduct(tr.y[lu].unaryExpr([](double v) { return silu_deriv(v); }));
    Eigen::MatrixXd gu = Eigen::MatrixXd::Zero(m.cfg.channels, t_len);
    for (int i = 0; i < m.cfg.channels; ++i) {
      run_channel_backward(m.banks[lu][static_cast<std::size_t>(i)], tr.u[lu],
                           tr.x[lu][static_cast<std::size_t>(i)], gy, i,
                           out.grad.banks[lu][static_cast<std::size_t>(i)], gu);
    }
    ga = gu;  // for l > 0 this is grad wrt silu(y^{l-1})
  }

  // through SiLU applied to the input linear pre-activation
  const Eigen::MatrixXd gz0 =
      ga.cwiseProduct(tr.z0.unaryExpr([](double v) { return silu_deriv(v); }));
  out.grad.input.W = gz0 * u0.transpose();
  out.grad.input.b = gz0.rowwise().sum();
  return out;
}

inline LossGrad loss_and_gradient(const DeepSsm& m, const Signal& u0,
                                  const Signal& target) {
  if (u0.size() != target.size()) {
    throw LengthMismatch("loss_and_gradient: length mismatch");
  }
  Eigen::MatrixXd u(1, static_cast<Eigen::Index>(u0.size()));
  Eigen::MatrixXd y(1, static_cast<Eigen::Index>(target.size()));
  for (std::size_t t = 0; t < u0.size(); ++t) {
    u(0, static_cast<Eigen::Index>(t)) = u0[t];
    y(0, static_cast<Eigen::Index>(t)) = target[t];
  }
  return loss_and_gradient(m, u, y, forward_trace(m, u));
}

struct TrainConfig {
  double eta = 1e-3;
  int epochs = 50;
  int batch_size = 1;
  int k = 4;
  std::uint64_t seed = 0;
  int window = 0;  // > 0: chunk sequences into windows of this length
  bool capture_spectra = false;  // keep normalized-signal spectra per channel
};

using TrainingSequence = std::pair<Signal, Signal>;  // (u0, target)
using TrainingSet = std::vector<TrainingSequence>;

struct EpochResult {
  double r_bar = 0.0;                 // dataset-mean K-spectral metric
  std::vector<double> per_layer_r;    // channel-mean R per SSM layer
  double train_loss = 0.0;            // mean per-sequence loss
  int skipped_channels = 0;           // dead (zero) channels excluded
  // [sequence][channel] spectra of normalized captured signals; only filled
  // when requested, so the metric can be recomputed offline for other K
  std::vector<std::vector<Spectrum>> spectra;
};

namespace detail {

struct MetricAccum {
  double r_bar_n = 0.0;
  int n_ssm = 0;
  std::vector<double> layer_sum;
  std::vector<int> layer_count;
};

inline void accumulate_metric(const CapturedSignals& cap, int k,
                              MetricAccum& acc, int* skipped,
                              std::vector<Spectrum>* spectra_sink = nullptr) {
  if (acc.layer_sum.empty()) {
    acc.layer_sum.assign(cap.pre_ssm.size(), 0.0);
    acc.layer_count.assign(cap.pre_ssm.size(), 0);
  }
  for (std::size_t l = 0; l < cap.pre_ssm.size(); ++l) {
    for (const Signal& s : cap.pre_ssm[l]) {
      double r;
      Spectrum sp;
      try {
        sp = dft_magnitudes(normalize(s));
        r = k_spectral(sp, k);
      } catch (const ZeroSignal&) {
        if (skipped) ++*skipped;
        continue;
      }
      if (spectra_sink) spectra_sink->push_back(std::move(sp));
      // running mean, Algorithm-1 style
      acc.r_bar_n = (static_cast<double>(acc.n_ssm) * acc.r_bar_n + r) /
                    static_cast<double>(acc.n_ssm + 1);
      ++acc.n_ssm;
      acc.layer_sum[l] += r;
      ++acc.layer_count[l];
    }
  }
}

inline TrainingSet apply_window(const TrainingSet& data, int window) {
  if (window <= 0) return data;
  TrainingSet out;
  for (const auto& [u, y] : data) {
    for (std::size_t start = 0; start < u.size();
         start += static_cast<std::size_t>(window)) {
      const std::size_t end =
          std::min(u.size(), start + static_cast<std::size_t>(window));
      if (end - start < 2) break;
      out.emplace_back(Signal(u.begin() + static_cast<long>(start),
                              u.begin() + static_cast<long>(end)),
                       Signal(y.begin() + static_cast<long>(start),
                              y.begin() + static_cast<long>(end)));
    }
  }
  return out;
}

}  // namespace detail

// One SGD epoch with in-loop metric capture. Signals are captured under the
// parameters current at each minibatch, so the metric evolves within the
// epoch as updates land.
inline EpochResult train_epoch_with_metric(DeepSsm& m, const TrainingSet& data,
                                           const TrainConfig& cfg) {
  if (data.empty()) throw EmptyInput();
  if (cfg.eta < 0.0 || cfg.k < 1) {
    throw ConfigError("train_epoch_with_metric: bad eta or K");
  }
  const TrainingSet seqs = detail::apply_window(data, cfg.window);
  const int batch = std::max(1, cfg.batch_size);

  EpochResult result;
  double r_total = 0.0;
  std::vector<double> layer_sum;
  std::vector<int> layer_count;
  double loss_total = 0.0;

  std::size_t idx = 0;
  while (idx < seqs.size()) {
    const std::size_t end = std::min(seqs.size(), idx + static_cast<std::size_t>(batch));
    DeepSsm grad_sum = zero_like(m);
    for (std::size_t n = idx; n < end; ++n) {
      const auto& [u0, target] = seqs[n];
      Eigen::MatrixXd u(1, static_cast<Eigen::Index>(u0.size()));
      Eigen::MatrixXd y(1, static_cast<Eigen::Index>(target.size()));
      for (std::size_t t = 0; t < u0.size(); ++t) {
        u(0, static_cast<Eigen::Index>(t)) = u0[t];
        y(0, static_cast<Eigen::Index>(t)) = target[t];
      }
      const ForwardTrace tr = forward_trace(m, u);

      detail::MetricAccum acc;
      std::vector<Spectrum>* sink = nullptr;
      if (cfg.capture_spectra) {
        result.spectra.emplace_back();
        sink = &result.spectra.back();
      }
      detail::accumulate_metric(capture_from_trace(tr), cfg.k, acc,
                                &result.skipped_channels, sink);
      r_total += acc.r_bar_n;
      if (layer_sum.empty()) {
        layer_sum.assign(acc.layer_sum.size(), 0.0);
        layer_count.assign(acc.layer_count.size(), 0);
      }
      for (std::size_t l = 0; l < acc.layer_sum.size(); ++l) {
        layer_sum[l] += acc.layer_sum[l];
        layer_count[l] += acc.layer_count[l];
      }

      const LossGrad lg = loss_and_gradient(m, u, y, tr);
      loss_total += lg.loss;
      add_scaled(grad_sum, lg.grad, 1.0);
    }
    if (cfg.eta > 0.0) {
      add_scaled(m, grad_sum, -cfg.eta / static_cast<double>(end - idx));
    }
    idx = end;
  }

  result.r_bar = r_total / static_cast<double>(seqs.size());
  result.train_loss = loss_total / static_cast<double>(seqs.size());
  result.per_layer_r.resize(layer_sum.size(), 0.0);
  for (std::size_t l = 0; l < layer_sum.size(); ++l) {
    result.per_layer_r[l] =
        layer_count[l] > 0 ? layer_sum[l] / layer_count[l] : 0.0;
  }
  return result;
}

// Metric of the current parameters without any update (epoch-0 capture).
inline EpochResult evaluate_metric(const DeepSsm& m, const TrainingSet& data,
                                   int k, int window = 0) {
  if (data.empty()) throw EmptyInput();
  const TrainingSet seqs = detail::apply_window(data, window);
  EpochResult result;
  double r_total = 0.0;
  double loss_total = 0.0;
  std::vector<double> layer_sum;
  std::vector<int> layer_count;
  for (const auto& [u0, target] : seqs) {
    const ForwardResult fr = forward(m, u0);
    detail::MetricAccum acc;
    detail::accumulate_metric(fr.cap, k, acc, &result.skipped_channels);
    r_total += acc.r_bar_n;
    if (layer_sum.empty()) {
      layer_sum.assign(acc.layer_sum.size(), 0.0);
      layer_count.assign(acc.layer_count.size(), 0);
    }
    for (std::size_t l = 0; l < acc.layer_sum.size(); ++l) {
      layer_sum[l] += acc.layer_sum[l];
      layer_count[l] += acc.layer_count[l];
    }
    loss_total += mse(fr.yL, target);
  }
  result.r_bar = r_total / static_cast<double>(seqs.size());
  result.train_loss = loss_total / static_cast<double>(seqs.size());
  result.per_layer_r.resize(layer_sum.size(), 0.0);
  for (std::size_t l = 0; l < layer_sum.size(); ++l) {
    result.per_layer_r[l] =
        layer_count[l] > 0 ? layer_sum[l] / layer_count[l] : 0.0;
  }
  return result;
}

inline double predict_mse(const DeepSsm& m, const Signal& u_test,
                          const Signal& y_true) {
  const ForwardResult fr = forward(m, u_test);
  return mse(fr.yL, y_true);
}

// --- checkpoint serialization ---

inline nlohmann::json to_json(const DeepSsmConfig& cfg) {
  return nlohmann::json{{"state_dim", cfg.state_dim},
                        {"channels", cfg.channels},
                        {"ssm_layers", cfg.ssm_layers},
                        {"input_dim", cfg.input_dim},
                        {"output_dim", cfg.output_dim}};
}

inline DeepSsmConfig model_config_from_json(const nlohmann::json& j) {
  DeepSsmConfig cfg;
  cfg.state_dim = j.at("state_dim").get<int>();
  cfg.channels = j.at("channels").get<int>();
  cfg.ssm_layers = j.at("ssm_layers").get<int>();
  cfg.input_dim = j.value("input_dim", 1);
  cfg.output_dim = j.value("output_dim", 1);
  cfg.validate();
  return cfg;
}

inline nlohmann::json checkpoint_to_json(const DeepSsm& m, std::uint64_t seed,
                                         int epoch) {
  return nlohmann::json{{"config", to_json(m.cfg)},
                        {"params", m.flatten()},
                        {"seed", seed},
                        {"epoch", epoch}};
}

inline DeepSsm checkpoint_from_json(const nlohmann::json& j) {
  const DeepSsmConfig cfg = model_config_from_json(j.at("config"));
  DeepSsm m = init_model(cfg, j.value("seed", std::uint64_t{0}));
  m.set_from_flat(j.at("params").get<std::vector<double>>());
  return m;
}

}  // namespace kspec
