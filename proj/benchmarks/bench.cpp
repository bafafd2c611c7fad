#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include <granusense/domain.hpp>
#include <granusense/features.hpp>
#include <granusense/forest.hpp>
#include <granusense/harness.hpp>
#include <granusense/mlp.hpp>
#include <granusense/sim.hpp>

namespace domain = granusense::domain;
namespace features = granusense::features;
namespace forest = granusense::forest;
namespace harness = granusense::harness;
namespace mlp = granusense::mlp;
namespace sim = granusense::sim;

namespace {

domain::ParticleSpec probe() {
  domain::ParticleSpec spec;
  spec.name = "bench-grain";
  spec.diameter_dp_mm = 3.0;
  spec.sphericity_psi = 0.9;
  spec.material_density_g_mm3 = 0.002;
  spec.packing_fraction = 0.6;
  return spec;
}

const domain::ContainerSpec kBox;

void BM_ContentCom(benchmark::State& state) {
  const domain::ContentFill fill{probe(), 50.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sim::content_com(40.0, 10.0, fill, kBox, sim::RimPolicy::capped));
  }
}
BENCHMARK(BM_ContentCom);

void BM_WristTorque(benchmark::State& state) {
  const domain::ContentFill fill{probe(), 50.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sim::wrist_torque_nm(40.0, 10.0, fill, kBox, sim::RimPolicy::capped));
  }
}
BENCHMARK(BM_WristTorque);

void BM_AdvanceSurface(benchmark::State& state) {
  const sim::AorParams aor{30.0, 25.0, 0.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim::advance_surface(aor, {}, -60.0, 60.0));
  }
}
BENCHMARK(BM_AdvanceSurface);

void BM_StickSlipTrace(benchmark::State& state) {
  const domain::ContentFill fill{probe(), 50.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sim::stick_slip_trace(fill, kBox, -60.0, 60.0, {}, 7));
  }
}
BENCHMARK(BM_StickSlipTrace);

void BM_VibrationMarkerField(benchmark::State& state) {
  const domain::ContentFill fill{probe(), 50.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim::vibration_markerfield(fill, kBox, 7));
  }
}
BENCHMARK(BM_VibrationMarkerField);

void BM_PrincipalSignal(benchmark::State& state) {
  const sim::MarkerField field =
      sim::vibration_markerfield({probe(), 50.0}, kBox, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(features::principal_vibration_signal(field));
  }
}
BENCHMARK(BM_PrincipalSignal);

void BM_VibFeatures(benchmark::State& state) {
  const sim::MarkerField field =
      sim::vibration_markerfield({probe(), 50.0}, kBox, 7);
  const features::VibrationSignal signal =
      features::principal_vibration_signal(field);
  for (auto _ : state) {
    benchmark::DoNotOptimize(features::vib_features(signal));
  }
}
BENCHMARK(BM_VibFeatures);

void BM_Envelopes(benchmark::State& state) {
  const sim::SignalTrace trace =
      sim::stick_slip_trace({probe(), 50.0}, kBox, -60.0, 60.0, {}, 7);
  const double threshold = 8.0 * sim::SlowRotationConfig{}.noise_sigma;
  for (auto _ : state) {
    benchmark::DoNotOptimize(features::envelopes(trace, threshold));
  }
}
BENCHMARK(BM_Envelopes);

void BM_MlpPredict(benchmark::State& state) {
  mlp::Model model;
  model.arch = {302, 16, 4, 1};
  for (std::size_t l = 0; l + 1 < model.arch.size(); ++l) {
    mlp::Layer layer;
    layer.w.resize(model.arch[l + 1], model.arch[l]);
    layer.b.resize(model.arch[l + 1]);
    for (int r = 0; r < layer.w.rows(); ++r) {
      layer.b(r) = 0.01 * r;
      for (int c = 0; c < layer.w.cols(); ++c)
        layer.w(r, c) = 0.1 * std::sin(0.7 * r + 1.3 * c);
    }
    model.layers.push_back(layer);
  }
  model.input_mean = Eigen::VectorXd::Zero(302);
  model.input_scale = Eigen::VectorXd::Ones(302);

  Eigen::VectorXd x(302);
  for (int i = 0; i < 302; ++i) x(i) = std::cos(0.3 * i);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.predict(x));
  }
}
BENCHMARK(BM_MlpPredict);

void BM_ForestPredict(benchmark::State& state) {
  const int n = 300, dims = 10;
  Eigen::MatrixXd x(n, dims);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dims; ++j) x(i, j) = std::sin(0.37 * i + 1.1 * j);
    y[i] = i % 5;
  }
  const forest::Model model = forest::train_classifier(x, y, 5, 11);
  const Eigen::VectorXd point = x.row(n / 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.predict(point));
  }
}
BENCHMARK(BM_ForestPredict);

void BM_GenerateRecord(benchmark::State& state) {
  const domain::ParticleSpec spec = probe();
  const harness::GenerateOptions options;
  for (auto _ : state) {
    std::vector<harness::SpillNote> spills;
    benchmark::DoNotOptimize(
        harness::generate_record(spec, 50.0, 907, options, &spills));
  }
}
BENCHMARK(BM_GenerateRecord);

}  // namespace

BENCHMARK_MAIN();
