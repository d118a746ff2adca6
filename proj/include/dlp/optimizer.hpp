#pragma once

#include "dlp/scaffold.hpp"

#include <random>

namespace dlp {

struct AdamWConfig {
  double lr = 0.01;
  double lr_theta = -1.0;  // negative: same as lr
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

struct NonFiniteGradient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class AdamW {
 public:
  AdamW() = default;
  AdamW(const AdamWConfig& cfg, Eigen::VectorXd lr_per_param);
  explicit AdamW(const AdamWConfig& cfg, std::size_t size);

  void step(Eigen::VectorXd& x, const Eigen::VectorXd& grad);
  long steps() const { return t_; }
  const Eigen::VectorXd& first_moment() const { return m_; }
  const Eigen::VectorXd& second_moment() const { return v_; }

 private:
  AdamWConfig cfg_;
  Eigen::VectorXd lr_, m_, v_;
  long t_ = 0;
};

enum class InitPolicy { BiasedOff, AllOn };

// Sets every non-frozen logit to lambda0.
void init_logits(Scaffold& sc, InitPolicy policy, double lambda0);

struct GumbelSample {
  Eigen::VectorXd weights;  // include-probability per slot
  Eigen::VectorXd noise;    // g_on - g_off per slot
};

// Two-way Gumbel-Softmax (include vs identity) per slot:
// w = softmax((alpha + g_on, 0 + g_off) / tau)[0].
GumbelSample gumbel_select(const Eigen::VectorXd& alpha, double tau, std::mt19937_64& rng);
Eigen::VectorXd gumbel_weights(const Eigen::VectorXd& alpha, const Eigen::VectorXd& noise, double tau);

}  // namespace dlp
