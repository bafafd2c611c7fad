#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace granusense::mlp {

// Dense layer computing act(x * w^T + b); w is (outputs x inputs).
struct Layer {
  Eigen::MatrixXd w;
  Eigen::VectorXd b;
};

// Feed-forward regressor with ReLU hidden layers and a linear scalar
// output. Inputs are z-scored with the statistics stored in the model;
// target scaling used during training is folded into the output layer, so
// predictions are already in target units.
struct Model {
  std::vector<int> arch;  // layer widths, input first, output last (1)
  std::vector<Layer> layers;
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_scale;  // never zero
  double final_loss = 0.0;      // training MSE of the kept weights, target units

  double predict(const Eigen::VectorXd& x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;  // one row per case
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int max_epochs = 2000;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  // Stop when the best loss has not improved by min_improvement for
  // patience consecutive epochs; the best-seen weights are kept.
  int patience = 100;
  double min_improvement = 1e-8;
};

// Full-batch Adam on mean squared error. x is (cases x features), y the
// targets. Weights start from seeded He-scaled gaussians, so equal seeds
// give bit-identical models.
Model train_regressor(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const std::vector<int>& arch, std::uint64_t seed,
                      const TrainConfig& config = {});

// MSE loss and its parameter gradients at the given weights, on inputs
// that are already standardized. Exposed so the analytic gradients can be
// checked against finite differences.
double loss_and_gradient(const std::vector<Layer>& layers,
                         const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         std::vector<Layer>* gradient);

}  // namespace granusense::mlp
