#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "granusense/domain.hpp"
#include "granusense/estimators.hpp"
#include "granusense/features.hpp"
#include "granusense/sim.hpp"

namespace granusense::harness {

// --- Catalog -----------------------------------------------------------------

// 37 named particle types covering all five shape classes. Diameter and
// density carry a small seed-driven spread so reruns with different seeds
// are not byte-identical materials; sphericity stays fixed so no entry can
// drift across a shape-class boundary.
std::vector<domain::ParticleSpec> generate_catalog(std::uint64_t seed);

// Fixed fine-sugar stand-in used by the humidity study (not jittered).
domain::ParticleSpec sugar_spec();

// Fill height that packs the requested content mass into the container.
double fill_height_for_mass_mm(const domain::ParticleSpec& particle,
                               double mass_g,
                               const domain::ContainerSpec& container);

// Held-out particles for the unseen-particle evaluation, one per shape class.
const std::vector<std::string>& default_holdout_names();

// --- Dataset -----------------------------------------------------------------

struct DatasetRecord {
  std::string particle_name;
  domain::ParticleSpec particle;  // exact spec the record was simulated with
  double fill_height_mm = 0.0;

  // Ground truth, denormalized for plain dataset files.
  double mass_g = 0.0;
  double diameter_mm = 0.0;
  double sphericity = 0.0;
  domain::ShapeClass shape = domain::ShapeClass::powder;
  double humidity_ml = 0.0;

  // Raw measurements. The slow-rotation trace and marker field are too
  // bulky to keep per record; cell_seed regenerates them exactly.
  std::uint64_t cell_seed = 0;
  double delta_fz_n = 0.0;
  sim::TiltHoldReadings tilt;

  features::FeatureVector fv;  // mass/height slots hold oracle values
};

// One line per fill that had to be reduced to stop the tilt-hold spilling.
struct SpillNote {
  std::string particle_name;
  double requested_mm = 0.0;
  double used_mm = 0.0;
};

struct GenerateOptions {
  std::vector<double> heights_mm{30.0, 50.0, 70.0};
  int repeats = 3;
  domain::ContainerSpec container{};
  double lift_noise_sigma_n = 0.01;
  double tilt_noise_sigma_nm = 0.002;
  sim::SlowRotationConfig slow{};
  double slow_start_deg = -60.0;
  double slow_end_deg = 60.0;
  sim::VibrationConfig vib{};
  // Collapse detector threshold as a multiple of the trace noise sigma.
  double jump_threshold_sigmas = 8.0;
  int threads = 0;  // 0 = hardware concurrency

  double jump_threshold() const {
    return jump_threshold_sigmas * slow.noise_sigma;
  }
};

struct Dataset {
  std::vector<DatasetRecord> records;
  std::vector<SpillNote> spills;
};

// Run the four exploratory procedures for one (particle, height) cell.
// Fills that spill during the tilt holds are retried 5 mm lower until they
// fit; the reduction is logged once. The record's ground truth reflects the
// height actually used.
DatasetRecord generate_record(const domain::ParticleSpec& particle,
                              double height_mm, std::uint64_t cell_seed,
                              const GenerateOptions& options,
                              std::vector<SpillNote>* spills);

// All catalog x heights x repeats cells, in catalog order. Cells simulate
// in parallel under per-cell seeds, so the result is independent of the
// thread count.
Dataset generate_dataset(const std::vector<domain::ParticleSpec>& catalog,
                         std::uint64_t seed,
                         const GenerateOptions& options = {});

// Regenerate a record's raw signals from its cell seed.
sim::SignalTrace record_slow_trace(const DatasetRecord& record,
                                   const GenerateOptions& options = {});
sim::MarkerField record_marker_field(const DatasetRecord& record,
                                     const GenerateOptions& options = {});

// --- Splits ------------------------------------------------------------------

struct SplitResult {
  std::vector<DatasetRecord> train;
  std::vector<DatasetRecord> test;
  std::vector<SpillNote> spills;  // from freshly generated holdout extras
};

// Shuffled disjoint split; the test side gets round-half-up of the
// requested fraction. Each side keeps the input ordering.
SplitResult split_random(const std::vector<DatasetRecord>& records,
                         double test_fraction, std::uint64_t seed);

// Particle-level holdout: all records of the held names move to the test
// side, topped up with freshly simulated records per held particle at
// uniform random heights in [25, 75] mm.
SplitResult split_holdout(const std::vector<DatasetRecord>& records,
                          const std::vector<std::string>& held_names,
                          int extras_per_held, std::uint64_t seed,
                          const GenerateOptions& options = {});

// --- Metrics -----------------------------------------------------------------

// One estimated property set, paired index-by-index with a truth set.
struct PropertyValues {
  std::string particle_name;
  double mass_g = 0.0;
  double height_mm = 0.0;
  double volume_ml = 0.0;
  double diameter_mm = 0.0;
  domain::ShapeClass shape = domain::ShapeClass::powder;
  double humidity_ml = 0.0;
};

// Which fields of PropertyValues an evaluation scores.
struct EvalParts {
  bool mass = true;
  bool height = true;
  bool volume = true;
  bool diameter = true;
  bool shape = true;
  bool humidity = false;
};

struct QuantityMetrics {
  std::string name;
  double mae = 0.0;
  double mape_pct = 0.0;
  int mape_excluded = 0;  // zero-truth cases left out of the MAPE mean
};

struct ParticleRow {
  std::string name;
  int count = 0;
  std::vector<double> mae;  // parallel to EvalReport::quantities
  double shape_accuracy = 0.0;
};

struct EvalReport {
  int record_count = 0;
  std::vector<QuantityMetrics> quantities;
  bool has_shape = false;
  double shape_accuracy = 0.0;
  // confusion[truth][predicted]
  std::array<std::array<int, domain::kShapeClassCount>,
             domain::kShapeClassCount>
      confusion{};
  std::vector<ParticleRow> per_particle;
  double runtime_seconds = 0.0;

  const QuantityMetrics& quantity(const std::string& name) const;
};

EvalReport evaluate(const std::vector<PropertyValues>& predictions,
                    const std::vector<PropertyValues>& truths,
                    const EvalParts& parts = {});

// --- Training pipeline ---------------------------------------------------------

struct PipelineOutput {
  estimators::EstimatorBundle models;
  EvalReport report;
  std::vector<PropertyValues> predictions;
  std::vector<PropertyValues> truths;
};

// Stage the estimators in pipeline order: mass from the lift force, height
// from the tilt torques plus estimated mass, then size and shape from
// feature vectors whose mass/height slots are replaced by those estimates
// (train and test alike). oracle_features keeps the ground-truth slots, as
// a debugging upper bound. The tag separates seed streams of independent
// studies run off one master seed.
PipelineOutput train_and_evaluate(const std::vector<DatasetRecord>& train,
                                  const std::vector<DatasetRecord>& test,
                                  std::uint64_t seed, const std::string& tag,
                                  const domain::ContainerSpec& container,
                                  bool oracle_features = false);

// --- Studies -------------------------------------------------------------------

struct AblationArm {
  double rate_hz = 0.0;
  double size_mae_mm = 0.0;
  double shape_accuracy = 0.0;
  EvalReport report;
};

struct AblationResult {
  std::vector<AblationArm> arms;
};

// Re-derive the vibration features from rate-decimated marker fields and
// retrain the size/shape stage per arm. Both arms share the split, the
// training seed streams, and everything except the vibration block.
AblationResult ablation_rate(const Dataset& dataset,
                             const std::vector<double>& rates_hz,
                             std::uint64_t seed,
                             const GenerateOptions& options = {});

// One slow sweep of the humidity study's sugar fill at the given moisture
// level. Trials are paired: the same trial index gives the same noise
// stream at every level, so level-to-level contrasts isolate the moisture
// response.
sim::SignalTrace humidity_trace(double level_ml, int trial,
                                std::uint64_t seed,
                                const GenerateOptions& options = {});

struct HumidityRecord {
  double level_ml = 0.0;
  int trial = 0;
  features::EnvelopePair envelopes;
};

struct HumidityOutcome {
  std::vector<HumidityRecord> records;
  EvalReport seen;           // random 80/20 over all records
  EvalReport interpolation;  // trained on outer levels, tested between
};

HumidityOutcome humidity_experiment(const std::vector<double>& levels_ml,
                                    int trials, std::uint64_t seed,
                                    const GenerateOptions& options = {});

}  // namespace granusense::harness
