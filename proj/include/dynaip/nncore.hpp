#pragma once

#include "dynaip/types.hpp"

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace dynaip {

/// A named parameter with its gradient. Column vectors are stored n x 1.
/// Sequences of activations are std::vector<MatX> with one (dim x batch)
/// matrix per timestep; batch columns are independent samples.
struct ParamTensor {
  std::string name;
  MatX value;
  MatX grad;

  ParamTensor() = default;
  ParamTensor(std::string n, int rows, int cols)
      : name(std::move(n)), value(MatX::Zero(rows, cols)),
        grad(MatX::Zero(rows, cols)) {}
  void zero_grad() { grad.setZero(); }
  Eigen::Index size() const { return value.size(); }
};

using ParamRefs = std::vector<ParamTensor*>;

class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : gen_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  double normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(gen_);
  }
  uint64_t next() { return gen_(); }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Uniform init in +/- 1/sqrt(fan_in).
void init_uniform_fan_in(ParamTensor& p, int fan_in, Rng& rng);

void zero_grads(const ParamRefs& params);
void scale_grads(const ParamRefs& params, double factor);
double global_grad_norm(const ParamRefs& params);
/// Scale all gradients down so their global norm is at most max_norm.
void clip_grad_norm(const ParamRefs& params, double max_norm);

struct Linear {
  ParamTensor W, b;

  Linear() = default;
  Linear(const std::string& name, int in, int out)
      : W(name + ".W", out, in), b(name + ".b", out, 1) {}

  int in_dim() const { return static_cast<int>(W.value.cols()); }
  int out_dim() const { return static_cast<int>(W.value.rows()); }

  MatX forward(const MatX& x) const;
  /// Accumulates dW/db and returns dx. `x` is the forward input.
  MatX backward(const MatX& x, const MatX& dy);
  void init(Rng& rng);
  void collect(ParamRefs& out);
};

/// Two affine layers with an elementwise max(0, .) between them.
struct Mlp {
  Linear l1, l2;

  Mlp() = default;
  Mlp(const std::string& name, int in, int hidden, int out)
      : l1(name + ".l1", in, hidden), l2(name + ".l2", hidden, out) {}

  struct Cache {
    MatX x, z, r;  // input, pre-activation, rectified
  };

  MatX forward(const MatX& x, Cache* cache = nullptr) const;
  MatX backward(const Cache& cache, const MatX& dy);
  void init(Rng& rng);
  void collect(ParamRefs& out);
};

/// Hidden and cell state per layer, each (hidden x batch).
struct LstmState {
  std::vector<MatX> h, c;

  static LstmState zero(const std::vector<int>& widths, int batch);
};

/// One LSTM layer. Gate rows are stacked [input; forget; candidate; output]:
/// W (4h x d), U (4h x h), b (4h x 1).
struct LstmLayer {
  ParamTensor W, U, b;
  int input_dim = 0, hidden = 0;

  LstmLayer() = default;
  LstmLayer(const std::string& name, int in, int h)
      : W(name + ".W", 4 * h, in), U(name + ".U", 4 * h, h),
        b(name + ".b", 4 * h, 1), input_dim(in), hidden(h) {}

  struct Cache {
    std::vector<MatX> h, c;        // length T+1, entry 0 is the initial state
    std::vector<MatX> gates, tc;   // length T; gates are post-nonlinearity
    const std::vector<MatX>* x = nullptr;
  };

  std::vector<MatX> forward(const std::vector<MatX>& x, const MatX& h0,
                            const MatX& c0, Cache* cache = nullptr) const;
  /// Advance one step in place.
  void step(const MatX& x, MatX& h, MatX& c) const;
  /// BPTT. `dh_out[t]` is the loss gradient w.r.t. h_t from above; returns
  /// the gradient w.r.t. the inputs and fills dh0/dc0 with the initial-state
  /// gradients. Parameter gradients are accumulated.
  std::vector<MatX> backward(const Cache& cache,
                             const std::vector<MatX>& dh_out, MatX& dh0,
                             MatX& dc0);
  /// Standard stable init: uniform fan-in weights, forget-gate bias +1.
  void init(Rng& rng);
  void collect(ParamRefs& out);
};

/// A stack of LSTM layers; layer k+1 consumes layer k's hidden outputs.
struct LstmStack {
  std::vector<LstmLayer> layers;

  LstmStack() = default;
  LstmStack(const std::string& name, int input, const std::vector<int>& widths);

  std::vector<int> widths() const;
  int out_dim() const { return layers.empty() ? 0 : layers.back().hidden; }

  struct Cache {
    std::vector<LstmLayer::Cache> per_layer;
    std::vector<std::vector<MatX>> inter;  // outputs of each layer
  };

  std::vector<MatX> forward(const std::vector<MatX>& x, const LstmState& init,
                            Cache* cache = nullptr) const;
  MatX step(const MatX& x, LstmState& state) const;
  /// Returns dx; fills dInit with initial-state gradients per layer.
  std::vector<MatX> backward(const Cache& cache,
                             const std::vector<MatX>& d_top, LstmState& d_init);
  void init(Rng& rng);
  void collect(ParamRefs& out);
};

class AdamOptimizer {
 public:
  explicit AdamOptimizer(double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  /// Bias-corrected Adam update in place; throws NonFiniteGradient when any
  /// gradient entry is not finite. Moments are kept per parameter name.
  void step(const ParamRefs& params, double lr);

  int step_count() const { return t_; }

  struct Moments {
    MatX m, v;
  };
  const std::map<std::string, Moments>& moments() const { return moments_; }
  /// Restore optimizer state (checkpoint resume).
  void restore(int step_count, std::map<std::string, Moments> moments);

 private:
  double beta1_, beta2_, eps_;
  int t_ = 0;
  std::map<std::string, Moments> moments_;
};

/// Cosine annealing: lr_min + (lr0 - lr_min) (1 + cos(pi step/total)) / 2.
double cosine_lr(int step, int total_steps, double lr0 = 1e-3,
                 double lr_min = 0.0);

struct GradCheckReport {
  double max_rel_err = 0.0;
  int coords_checked = 0;
  std::string worst_param;
  int worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;

  bool within(double tol) const { return max_rel_err <= tol; }
};

/// Compare the analytic gradients already stored in `params[i]->grad`
/// against central finite differences of `loss_fn` (h = 1e-5 per
/// coordinate), on a seeded random subsample of at least `min_coords`
/// coordinates (all of them when fewer exist). The relative error per
/// coordinate is |a - n| / max(|a| + |n|, 1e-3).
GradCheckReport grad_check(const std::function<double()>& loss_fn,
                           const ParamRefs& params, int min_coords = 200,
                           double step = 1e-5, uint64_t seed = 0);

}  // namespace dynaip
