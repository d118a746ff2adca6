#include "dlp/optimizer.hpp"

#include <cmath>
#include <limits>

namespace dlp {

AdamW::AdamW(const AdamWConfig& cfg, Eigen::VectorXd lr_per_param)
    : cfg_(cfg), lr_(std::move(lr_per_param)) {
  m_ = Eigen::VectorXd::Zero(lr_.size());
  v_ = Eigen::VectorXd::Zero(lr_.size());
}

AdamW::AdamW(const AdamWConfig& cfg, std::size_t size)
    : AdamW(cfg, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(size), cfg.lr)) {}

void AdamW::step(Eigen::VectorXd& x, const Eigen::VectorXd& grad) {
  if (grad.size() != x.size() || x.size() != m_.size()) throw ValidationError("AdamW: size mismatch");
  if (!grad.allFinite()) throw NonFiniteGradient("AdamW: non-finite gradient");
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    m_(i) = cfg_.beta1 * m_(i) + (1.0 - cfg_.beta1) * grad(i);
    v_(i) = cfg_.beta2 * v_(i) + (1.0 - cfg_.beta2) * grad(i) * grad(i);
    x(i) -= lr_(i) * cfg_.weight_decay * x(i);
    x(i) -= lr_(i) * (m_(i) / c1) / (std::sqrt(v_(i) / c2) + cfg_.eps);
  }
}

void init_logits(Scaffold& sc, InitPolicy, double lambda0) {
  for (std::size_t i = 0; i < sc.size(); ++i)
    if (!sc.slot(i).frozen) sc.logits()(i) = lambda0;
}

Eigen::VectorXd gumbel_weights(const Eigen::VectorXd& alpha, const Eigen::VectorXd& noise, double tau) {
  if (!(tau > 0)) throw ValidationError("gumbel temperature must be positive");
  Eigen::VectorXd w(alpha.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = switch_value((alpha(i) + noise(i)) / tau);
  return w;
}

GumbelSample gumbel_select(const Eigen::VectorXd& alpha, double tau, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(std::numeric_limits<double>::min(), 1.0);
  GumbelSample out;
  out.noise.resize(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    const double g_on = -std::log(-std::log(uni(rng)));
    const double g_off = -std::log(-std::log(uni(rng)));
    out.noise(i) = g_on - g_off;
  }
  out.weights = gumbel_weights(alpha, out.noise, tau);
  return out;
}

}  // namespace dlp
