#include "dynaip/nncore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dynaip {

namespace {

inline MatX sigmoid(const MatX& x) {
  return ((-x.array()).exp() + 1.0).inverse().matrix();
}

}  // namespace

void init_uniform_fan_in(ParamTensor& p, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max(fan_in, 1)));
  for (Eigen::Index i = 0; i < p.value.size(); ++i)
    p.value.data()[i] = rng.uniform(-bound, bound);
}

void zero_grads(const ParamRefs& params) {
  for (ParamTensor* p : params) p->zero_grad();
}

void scale_grads(const ParamRefs& params, double factor) {
  for (ParamTensor* p : params) p->grad *= factor;
}

double global_grad_norm(const ParamRefs& params) {
  double sq = 0.0;
  for (const ParamTensor* p : params) sq += p->grad.squaredNorm();
  return std::sqrt(sq);
}

void clip_grad_norm(const ParamRefs& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (norm > max_norm && norm > 0.0) scale_grads(params, max_norm / norm);
}

// ---------------------------------------------------------------- Linear

MatX Linear::forward(const MatX& x) const {
  if (x.rows() != W.value.cols())
    throw ShapeMismatch("linear '" + W.name + "': input has " +
                        std::to_string(x.rows()) + " rows, expected " +
                        std::to_string(W.value.cols()));
  return (W.value * x).colwise() + VecX(b.value.col(0));
}

MatX Linear::backward(const MatX& x, const MatX& dy) {
  W.grad.noalias() += dy * x.transpose();
  b.grad.col(0).noalias() += dy.rowwise().sum();
  return W.value.transpose() * dy;
}

void Linear::init(Rng& rng) {
  init_uniform_fan_in(W, in_dim(), rng);
  b.value.setZero();
}

void Linear::collect(ParamRefs& out) {
  out.push_back(&W);
  out.push_back(&b);
}

// ------------------------------------------------------------------- Mlp

MatX Mlp::forward(const MatX& x, Cache* cache) const {
  MatX z = l1.forward(x);
  MatX r = z.cwiseMax(0.0);
  MatX y = l2.forward(r);
  if (cache) {
    cache->x = x;
    cache->z = std::move(z);
    cache->r = std::move(r);
  }
  return y;
}

MatX Mlp::backward(const Cache& cache, const MatX& dy) {
  MatX dr = l2.backward(cache.r, dy);
  MatX dz = (cache.z.array() > 0.0).cast<double>() * dr.array();
  return l1.backward(cache.x, dz);
}

void Mlp::init(Rng& rng) {
  l1.init(rng);
  l2.init(rng);
}

void Mlp::collect(ParamRefs& out) {
  l1.collect(out);
  l2.collect(out);
}

// ------------------------------------------------------------- LstmLayer

LstmState LstmState::zero(const std::vector<int>& widths, int batch) {
  LstmState s;
  for (int w : widths) {
    s.h.push_back(MatX::Zero(w, batch));
    s.c.push_back(MatX::Zero(w, batch));
  }
  return s;
}

std::vector<MatX> LstmLayer::forward(const std::vector<MatX>& x, const MatX& h0,
                                     const MatX& c0, Cache* cache) const {
  const int T = static_cast<int>(x.size());
  const int B = T > 0 ? static_cast<int>(x[0].cols()) : static_cast<int>(h0.cols());
  if (h0.rows() != hidden || c0.rows() != hidden || h0.cols() != B ||
      c0.cols() != B)
    throw ShapeMismatch("lstm '" + W.name + "': bad initial state shape");

  std::vector<MatX> out(T);
  MatX h = h0, c = c0;
  if (cache) {
    cache->h.assign(1, h0);
    cache->c.assign(1, c0);
    cache->gates.resize(T);
    cache->tc.resize(T);
    cache->x = &x;
    cache->h.reserve(T + 1);
    cache->c.reserve(T + 1);
  }
  for (int t = 0; t < T; ++t) {
    if (x[t].rows() != input_dim)
      throw ShapeMismatch("lstm '" + W.name + "': input has " +
                          std::to_string(x[t].rows()) + " rows, expected " +
                          std::to_string(input_dim));
    MatX a = ((W.value * x[t]).colwise() + VecX(b.value.col(0)));
    a.noalias() += U.value * h;
    MatX gates(4 * hidden, B);
    gates.topRows(2 * hidden) = sigmoid(a.topRows(2 * hidden));
    gates.middleRows(2 * hidden, hidden) =
        a.middleRows(2 * hidden, hidden).array().tanh();
    gates.bottomRows(hidden) = sigmoid(a.bottomRows(hidden));

    c = gates.middleRows(hidden, hidden).cwiseProduct(c) +
        gates.topRows(hidden).cwiseProduct(gates.middleRows(2 * hidden, hidden));
    MatX tc = c.array().tanh();
    h = gates.bottomRows(hidden).cwiseProduct(tc);
    out[t] = h;
    if (cache) {
      cache->h.push_back(h);
      cache->c.push_back(c);
      cache->gates[t] = std::move(gates);
      cache->tc[t] = std::move(tc);
    }
  }
  return out;
}

void LstmLayer::step(const MatX& x, MatX& h, MatX& c) const {
  MatX a = ((W.value * x).colwise() + VecX(b.value.col(0)));
  a.noalias() += U.value * h;
  MatX gates(4 * hidden, x.cols());
  gates.topRows(2 * hidden) = sigmoid(a.topRows(2 * hidden));
  gates.middleRows(2 * hidden, hidden) =
      a.middleRows(2 * hidden, hidden).array().tanh();
  gates.bottomRows(hidden) = sigmoid(a.bottomRows(hidden));
  c = gates.middleRows(hidden, hidden).cwiseProduct(c) +
      gates.topRows(hidden).cwiseProduct(gates.middleRows(2 * hidden, hidden));
  MatX tc = c.array().tanh();
  h = gates.bottomRows(hidden).cwiseProduct(tc);
}

std::vector<MatX> LstmLayer::backward(const Cache& cache,
                                      const std::vector<MatX>& dh_out,
                                      MatX& dh0, MatX& dc0) {
  const int T = static_cast<int>(dh_out.size());
  const std::vector<MatX>& x = *cache.x;
  const int B = T > 0 ? static_cast<int>(dh_out[0].cols()) : 0;

  std::vector<MatX> dx(T);
  MatX dh_next = MatX::Zero(hidden, B);
  MatX dc_next = MatX::Zero(hidden, B);
  MatX da(4 * hidden, B);
  for (int t = T - 1; t >= 0; --t) {
    const MatX& gates = cache.gates[t];
    const auto gi = gates.topRows(hidden);
    const auto gf = gates.middleRows(hidden, hidden);
    const auto gg = gates.middleRows(2 * hidden, hidden);
    const auto go = gates.bottomRows(hidden);
    const MatX& tc = cache.tc[t];

    const MatX dh = dh_out[t] + dh_next;
    const MatX dc =
        dc_next.array() + dh.array() * go.array() * (1.0 - tc.array().square());

    da.topRows(hidden) =
        (dc.array() * gg.array()) * gi.array() * (1.0 - gi.array());
    da.middleRows(hidden, hidden) = (dc.array() * cache.c[t].array()) *
                                    gf.array() * (1.0 - gf.array());
    da.middleRows(2 * hidden, hidden) =
        (dc.array() * gi.array()) * (1.0 - gg.array().square());
    da.bottomRows(hidden) =
        (dh.array() * tc.array()) * go.array() * (1.0 - go.array());

    W.grad.noalias() += da * x[t].transpose();
    U.grad.noalias() += da * cache.h[t].transpose();
    b.grad.col(0).noalias() += da.rowwise().sum();

    dx[t].noalias() = W.value.transpose() * da;
    dh_next.noalias() = U.value.transpose() * da;
    dc_next = dc.cwiseProduct(gf);
  }
  dh0 = std::move(dh_next);
  dc0 = std::move(dc_next);
  return dx;
}

void LstmLayer::init(Rng& rng) {
  init_uniform_fan_in(W, input_dim, rng);
  init_uniform_fan_in(U, hidden, rng);
  b.value.setZero();
  b.value.block(hidden, 0, hidden, 1).setConstant(1.0);  // forget gate
}

void LstmLayer::collect(ParamRefs& out) {
  out.push_back(&W);
  out.push_back(&U);
  out.push_back(&b);
}

// ------------------------------------------------------------- LstmStack

LstmStack::LstmStack(const std::string& name, int input,
                     const std::vector<int>& widths) {
  int in = input;
  for (size_t k = 0; k < widths.size(); ++k) {
    layers.emplace_back(name + ".l" + std::to_string(k), in, widths[k]);
    in = widths[k];
  }
}

std::vector<int> LstmStack::widths() const {
  std::vector<int> w;
  for (const LstmLayer& layer : layers) w.push_back(layer.hidden);
  return w;
}

std::vector<MatX> LstmStack::forward(const std::vector<MatX>& x,
                                     const LstmState& init, Cache* cache) const {
  if (init.h.size() != layers.size() || init.c.size() != layers.size())
    throw ShapeMismatch("lstm stack: initial state has wrong layer count");
  if (cache) {
    cache->per_layer.resize(layers.size());
    cache->inter.clear();
    cache->inter.push_back(x);
  }
  std::vector<MatX> cur = x;
  for (size_t k = 0; k < layers.size(); ++k) {
    cur = layers[k].forward(cur, init.h[k], init.c[k],
                            cache ? &cache->per_layer[k] : nullptr);
    if (cache) cache->inter.push_back(cur);
  }
  return cur;
}

MatX LstmStack::step(const MatX& x, LstmState& state) const {
  MatX cur = x;
  for (size_t k = 0; k < layers.size(); ++k) {
    layers[k].step(cur, state.h[k], state.c[k]);
    cur = state.h[k];
  }
  return cur;
}

std::vector<MatX> LstmStack::backward(const Cache& cache,
                                      const std::vector<MatX>& d_top,
                                      LstmState& d_init) {
  d_init.h.resize(layers.size());
  d_init.c.resize(layers.size());
  std::vector<MatX> d = d_top;
  for (int k = static_cast<int>(layers.size()) - 1; k >= 0; --k) {
    // cache.inter[k] is layer k's input; rebind so backward sees it
    LstmLayer::Cache layer_cache = cache.per_layer[k];
    layer_cache.x = &cache.inter[k];
    d = layers[k].backward(layer_cache, d, d_init.h[k], d_init.c[k]);
  }
  return d;
}

void LstmStack::init(Rng& rng) {
  for (LstmLayer& layer : layers) layer.init(rng);
}

void LstmStack::collect(ParamRefs& out) {
  for (LstmLayer& layer : layers) layer.collect(out);
}

// ------------------------------------------------------------------ Adam

void AdamOptimizer::step(const ParamRefs& params, double lr) {
  for (const ParamTensor* p : params)
    if (!p->grad.allFinite())
      throw NonFiniteGradient("non-finite gradient in parameter '" + p->name +
                              "'");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  for (ParamTensor* p : params) {
    Moments& mom = moments_[p->name];
    if (mom.m.size() == 0) {
      mom.m = MatX::Zero(p->value.rows(), p->value.cols());
      mom.v = MatX::Zero(p->value.rows(), p->value.cols());
    }
    mom.m = beta1_ * mom.m + (1.0 - beta1_) * p->grad;
    mom.v = beta2_ * mom.v.array() + (1.0 - beta2_) * p->grad.array().square();
    p->value.array() -=
        lr * (mom.m.array() / bc1) / ((mom.v.array() / bc2).sqrt() + eps_);
  }
}

void AdamOptimizer::restore(int step_count,
                            std::map<std::string, Moments> moments) {
  t_ = step_count;
  moments_ = std::move(moments);
}

double cosine_lr(int step, int total_steps, double lr0, double lr_min) {
  if (step < 0 || total_steps < 1 || step > total_steps)
    throw DegenerateInput("cosine_lr: step out of range");
  const double phase = std::numbers::pi * static_cast<double>(step) /
                       static_cast<double>(total_steps);
  return lr_min + 0.5 * (lr0 - lr_min) * (1.0 + std::cos(phase));
}

// ------------------------------------------------------------ grad check

GradCheckReport grad_check(const std::function<double()>& loss_fn,
                           const ParamRefs& params, int min_coords,
                           double step, uint64_t seed) {
  struct Coord {
    int param;
    Eigen::Index index;
  };
  std::vector<Coord> all;
  for (size_t p = 0; p < params.size(); ++p)
    for (Eigen::Index i = 0; i < params[p]->size(); ++i)
      all.push_back({static_cast<int>(p), i});

  std::vector<Coord> picked;
  if (static_cast<int>(all.size()) <= min_coords) {
    picked = all;
  } else {
    std::mt19937_64 gen(seed);
    std::shuffle(all.begin(), all.end(), gen);
    picked.assign(all.begin(), all.begin() + min_coords);
  }

  GradCheckReport report;
  for (const Coord& c : picked) {
    ParamTensor& p = *params[c.param];
    double& x = p.value.data()[c.index];
    const double saved = x;
    x = saved + step;
    const double up = loss_fn();
    x = saved - step;
    const double down = loss_fn();
    x = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double analytic = p.grad.data()[c.index];
    const double rel = std::abs(analytic - numeric) /
                       std::max(std::abs(analytic) + std::abs(numeric), 1e-3);
    ++report.coords_checked;
    if (rel > report.max_rel_err) {
      report.max_rel_err = rel;
      report.worst_param = p.name;
      report.worst_index = static_cast<int>(c.index);
      report.worst_analytic = analytic;
      report.worst_numeric = numeric;
    }
  }
  return report;
}

}  // namespace dynaip
