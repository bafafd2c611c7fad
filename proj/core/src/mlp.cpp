#include "granusense/mlp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "granusense/errors.hpp"
#include "granusense/rng.hpp"

namespace granusense::mlp {

namespace {

void check_arch(const std::vector<int>& arch) {
  if (arch.size() < 2) throw DomainError("network needs input and output");
  for (int w : arch)
    if (w <= 0) throw DomainError("layer widths must be positive");
  if (arch.back() != 1) throw DomainError("regressor output width must be 1");
}

Eigen::MatrixXd forward(const std::vector<Layer>& layers,
                        const Eigen::MatrixXd& x,
                        std::vector<Eigen::MatrixXd>* activations) {
  Eigen::MatrixXd a = x;
  if (activations) activations->push_back(a);
  for (size_t l = 0; l < layers.size(); ++l) {
    Eigen::MatrixXd z =
        (a * layers[l].w.transpose()).rowwise() + layers[l].b.transpose();
    a = (l + 1 < layers.size()) ? z.cwiseMax(0.0).eval() : z;
    if (activations) activations->push_back(a);
  }
  return a;
}

}  // namespace

double Model::predict(const Eigen::VectorXd& x) const {
  if (layers.empty() || arch.empty())
    throw DomainError("model has no trained weights");
  if (x.size() != arch.front())
    throw DomainError("expected " + std::to_string(arch.front()) +
                      " inputs, got " + std::to_string(x.size()));
  if (!x.allFinite()) throw DomainError("network input must be finite");
  Eigen::MatrixXd row =
      ((x - input_mean).cwiseQuotient(input_scale)).transpose();
  return forward(layers, row, nullptr)(0, 0);
}

Eigen::VectorXd Model::predict(const Eigen::MatrixXd& x) const {
  if (layers.empty() || arch.empty())
    throw DomainError("model has no trained weights");
  if (x.cols() != arch.front())
    throw DomainError("expected " + std::to_string(arch.front()) +
                      " inputs, got " + std::to_string(x.cols()));
  if (!x.allFinite()) throw DomainError("network input must be finite");
  Eigen::MatrixXd xs = (x.rowwise() - input_mean.transpose()).array().rowwise() /
                       input_scale.transpose().array();
  return forward(layers, xs, nullptr).col(0);
}

double loss_and_gradient(const std::vector<Layer>& layers,
                         const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         std::vector<Layer>* gradient) {
  const long n = x.rows();
  if (n == 0 || n != y.size())
    throw DomainError("inputs and targets must pair up");

  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(layers.size() + 1);
  Eigen::MatrixXd pred = forward(layers, x, &acts);

  Eigen::VectorXd residual = pred.col(0) - y;
  const double loss = residual.squaredNorm() / static_cast<double>(n);

  if (gradient) {
    gradient->assign(layers.size(), {});
    // delta holds dLoss/dZ for the layer being visited, walking backwards.
    Eigen::MatrixXd delta = (2.0 / static_cast<double>(n)) * residual;
    for (size_t l = layers.size(); l-- > 0;) {
      (*gradient)[l].w = delta.transpose() * acts[l];
      (*gradient)[l].b = delta.colwise().sum().transpose();
      if (l > 0) {
        Eigen::MatrixXd mask =
            (acts[l].array() > 0.0).cast<double>().matrix();
        delta = (delta * layers[l].w).cwiseProduct(mask);
      }
    }
  }
  return loss;
}

Model train_regressor(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const std::vector<int>& arch, std::uint64_t seed,
                      const TrainConfig& config) {
  check_arch(arch);
  const long n = x.rows();
  if (n == 0) throw DomainError("training set is empty");
  if (x.cols() != arch.front())
    throw DomainError("feature width does not match network input");
  if (y.size() != n) throw DomainError("inputs and targets must pair up");
  if (!x.allFinite() || !y.allFinite())
    throw DomainError("training data must be finite");
  if (!(config.learning_rate > 0.0) || config.max_epochs <= 0)
    throw DomainError("training config must be positive");

  Model model;
  model.arch = arch;
  model.input_mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - model.input_mean.transpose();
  model.input_scale =
      (centered.array().square().colwise().mean()).sqrt().matrix();
  // Constant columns get unit scale so they standardize to exactly zero.
  for (long j = 0; j < model.input_scale.size(); ++j)
    if (model.input_scale(j) < 1e-12) model.input_scale(j) = 1.0;
  Eigen::MatrixXd xs = centered.array().rowwise() /
                       model.input_scale.transpose().array();

  const double y_mean = y.mean();
  double y_scale = std::sqrt((y.array() - y_mean).square().mean());
  if (y_scale < 1e-12) y_scale = 1.0;
  Eigen::VectorXd ys = (y.array() - y_mean) / y_scale;

  Rng rng(seed);
  model.layers.resize(arch.size() - 1);
  for (size_t l = 0; l + 1 < arch.size(); ++l) {
    Layer& layer = model.layers[l];
    const double he = std::sqrt(2.0 / arch[l]);
    layer.w.resize(arch[l + 1], arch[l]);
    for (long r = 0; r < layer.w.rows(); ++r)
      for (long c = 0; c < layer.w.cols(); ++c)
        layer.w(r, c) = rng.gaussian(0.0, he);
    // Hidden units start slightly open: deeper layers see nonnegative
    // rectifier outputs, so a zero-bias unit with a mostly negative weight
    // row would never activate and the narrow layers cannot afford that.
    const bool hidden = l + 2 < arch.size();
    layer.b = Eigen::VectorXd::Constant(arch[l + 1], hidden ? 0.1 : 0.0);
  }

  std::vector<Layer> m_state(model.layers.size());
  std::vector<Layer> v_state(model.layers.size());
  for (size_t l = 0; l < model.layers.size(); ++l) {
    m_state[l].w = Eigen::MatrixXd::Zero(model.layers[l].w.rows(),
                                         model.layers[l].w.cols());
    m_state[l].b = Eigen::VectorXd::Zero(model.layers[l].b.size());
    v_state[l] = m_state[l];
  }

  std::vector<Layer> best = model.layers;
  double best_loss = std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  std::vector<Layer> grad;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const double loss = loss_and_gradient(model.layers, xs, ys, &grad);
    if (loss < best_loss - config.min_improvement) {
      best_loss = loss;
      best_epoch = epoch;
      best = model.layers;
    }
    if (epoch - best_epoch >= config.patience) break;

    const double bc1 = 1.0 - std::pow(config.adam_beta1, epoch);
    const double bc2 = 1.0 - std::pow(config.adam_beta2, epoch);
    auto step = [&](auto& param, const auto& g, auto& m, auto& v) {
      m = config.adam_beta1 * m + (1.0 - config.adam_beta1) * g;
      v = (config.adam_beta2 * v.array() +
           (1.0 - config.adam_beta2) * g.array().square())
              .matrix();
      param.array() -= config.learning_rate * (m.array() / bc1) /
                       ((v.array() / bc2).sqrt() + config.adam_epsilon);
    };
    for (size_t l = 0; l < model.layers.size(); ++l) {
      step(model.layers[l].w, grad[l].w, m_state[l].w, v_state[l].w);
      step(model.layers[l].b, grad[l].b, m_state[l].b, v_state[l].b);
    }
  }
  model.layers = best;
  model.final_loss = best_loss * y_scale * y_scale;

  // Undo the target scaling inside the output layer so predict() returns
  // target units directly: z-scaled output o maps to y_scale*o + y_mean.
  Layer& out = model.layers.back();
  out.w *= y_scale;
  out.b = (y_scale * out.b).array() + y_mean;
  return model;
}

}  // namespace granusense::mlp
