#include <granusense/domain.hpp>
#include <granusense/errors.hpp>
#include <granusense/features.hpp>
#include <granusense/harness.hpp>
#include <granusense/rng.hpp>
#include <granusense/sim.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace domain = granusense::domain;
namespace features = granusense::features;
namespace harness = granusense::harness;
namespace sim = granusense::sim;
using granusense::DomainError;
using granusense::Rng;

namespace {

// Grain that fits the tilt holds at 65 mm but spills above that.
domain::ParticleSpec probe_grain() {
  domain::ParticleSpec spec;
  spec.name = "probe-grain";
  spec.diameter_dp_mm = 3.0;
  spec.sphericity_psi = 0.9;
  spec.material_density_g_mm3 = 0.002;
  return spec;
}

harness::GenerateOptions quick_options() {
  harness::GenerateOptions options;
  options.threads = 2;
  return options;
}

bool records_identical(const harness::DatasetRecord& a,
                       const harness::DatasetRecord& b) {
  return a.particle_name == b.particle_name && a.cell_seed == b.cell_seed &&
         a.fill_height_mm == b.fill_height_mm && a.mass_g == b.mass_g &&
         a.delta_fz_n == b.delta_fz_n && a.tilt.torque_nm == b.tilt.torque_nm &&
         a.fv.values == b.fv.values;
}

TEST(Harness, CatalogCoversEveryShapeClass) {
  const auto catalog = harness::generate_catalog(42);
  ASSERT_EQ(catalog.size(), 37u);

  std::set<std::string> names;
  std::map<domain::ShapeClass, int> per_class;
  for (const auto& spec : catalog) {
    EXPECT_TRUE(names.insert(spec.name).second) << spec.name;
    EXPECT_NO_THROW(spec.validate());
    EXPECT_GE(spec.diameter_dp_mm, 0.2);
    EXPECT_LE(spec.diameter_dp_mm, 12.0);
    EXPECT_GE(spec.sphericity_psi, 0.55);
    EXPECT_LE(spec.sphericity_psi, 1.0);
    EXPECT_GE(spec.material_density_g_mm3, 0.0005);
    EXPECT_LE(spec.material_density_g_mm3, 0.008);
    ++per_class[domain::shape_class(spec.diameter_dp_mm, spec.sphericity_psi)];
  }
  ASSERT_EQ(per_class.size(), 5u);
  for (const auto& [cls, count] : per_class) EXPECT_GE(count, 3) << static_cast<int>(cls);
}

TEST(Harness, CatalogJitterMovesSizeButNeverClass) {
  const auto a = harness::generate_catalog(42);
  const auto b = harness::generate_catalog(42);
  const auto c = harness::generate_catalog(43);
  ASSERT_EQ(a.size(), c.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].diameter_dp_mm, b[i].diameter_dp_mm);
    EXPECT_NE(a[i].diameter_dp_mm, c[i].diameter_dp_mm);
    // Sphericity never jitters, so the class label is seed-independent.
    EXPECT_EQ(a[i].sphericity_psi, c[i].sphericity_psi);
    EXPECT_EQ(domain::shape_class(a[i].diameter_dp_mm, a[i].sphericity_psi),
              domain::shape_class(c[i].diameter_dp_mm, c[i].sphericity_psi));
  }
}

TEST(Harness, SugarSpecIsAFixedPowder) {
  const domain::ParticleSpec sugar = harness::sugar_spec();
  EXPECT_EQ(sugar.name, "fine-sugar-analog");
  EXPECT_DOUBLE_EQ(sugar.diameter_dp_mm, 0.5);
  EXPECT_DOUBLE_EQ(sugar.sphericity_psi, 0.9);
  EXPECT_EQ(domain::shape_class(sugar.diameter_dp_mm, sugar.sphericity_psi),
            domain::ShapeClass::powder);
}

TEST(Harness, FillHeightForMassRoundTrips) {
  const domain::ContainerSpec container;
  const domain::ParticleSpec sugar = harness::sugar_spec();
  const double height =
      harness::fill_height_for_mass_mm(sugar, 150.0, container);
  EXPECT_GT(height, 0.0);
  EXPECT_NEAR(domain::content_mass_g({sugar, height}, container), 150.0, 1e-9);

  EXPECT_THROW(harness::fill_height_for_mass_mm(sugar, 500.0, container),
               DomainError);
  EXPECT_THROW(harness::fill_height_for_mass_mm(sugar, 0.0, container),
               DomainError);
  EXPECT_THROW(harness::fill_height_for_mass_mm(sugar, -1.0, container),
               DomainError);
}

TEST(Harness, HoldoutNamesPickOnePerShapeClass) {
  const auto& names = harness::default_holdout_names();
  ASSERT_EQ(names.size(), 5u);
  const auto catalog = harness::generate_catalog(42);
  std::set<domain::ShapeClass> classes;
  for (const std::string& name : names) {
    const auto it = std::find_if(
        catalog.begin(), catalog.end(),
        [&](const domain::ParticleSpec& s) { return s.name == name; });
    ASSERT_NE(it, catalog.end()) << name;
    classes.insert(
        domain::shape_class(it->diameter_dp_mm, it->sphericity_psi));
  }
  EXPECT_EQ(classes.size(), 5u);
}

TEST(Harness, RecordsAreSeedDeterministic) {
  const harness::GenerateOptions options = quick_options();
  const domain::ParticleSpec grain = probe_grain();
  const auto a = harness::generate_record(grain, 50.0, 1234, options, nullptr);
  const auto b = harness::generate_record(grain, 50.0, 1234, options, nullptr);
  EXPECT_TRUE(records_identical(a, b));

  const auto c = harness::generate_record(grain, 50.0, 1235, options, nullptr);
  EXPECT_NE(a.delta_fz_n, c.delta_fz_n);
}

TEST(Harness, RecordCarriesOracleTruthInTheFeatureTail) {
  const harness::GenerateOptions options = quick_options();
  const domain::ParticleSpec grain = probe_grain();
  const auto rec = harness::generate_record(grain, 50.0, 77, options, nullptr);

  EXPECT_EQ(rec.particle_name, "probe-grain");
  EXPECT_DOUBLE_EQ(rec.fill_height_mm, 50.0);
  EXPECT_DOUBLE_EQ(rec.mass_g,
                   domain::content_mass_g({grain, 50.0}, options.container));
  EXPECT_DOUBLE_EQ(rec.diameter_mm, grain.diameter_dp_mm);
  EXPECT_EQ(rec.shape, domain::ShapeClass::rounded);
  EXPECT_DOUBLE_EQ(rec.humidity_ml, 0.0);
  EXPECT_DOUBLE_EQ(rec.fv.values[300], rec.mass_g);
  EXPECT_DOUBLE_EQ(rec.fv.values[301], rec.fill_height_mm);
}

TEST(Harness, OverfullCellsStepDownUntilTheHoldsFit) {
  const harness::GenerateOptions options = quick_options();
  std::vector<harness::SpillNote> spills;
  const auto rec =
      harness::generate_record(probe_grain(), 75.0, 31, options, &spills);

  ASSERT_EQ(spills.size(), 1u);
  EXPECT_EQ(spills[0].particle_name, "probe-grain");
  EXPECT_DOUBLE_EQ(spills[0].requested_mm, 75.0);
  EXPECT_DOUBLE_EQ(spills[0].used_mm, rec.fill_height_mm);
  EXPECT_DOUBLE_EQ(rec.fill_height_mm, 65.0);
  // Ground truth follows the reduced fill, not the request.
  EXPECT_DOUBLE_EQ(
      rec.mass_g,
      domain::content_mass_g({probe_grain(), rec.fill_height_mm},
                             options.container));
  EXPECT_DOUBLE_EQ(rec.fv.values[301], rec.fill_height_mm);
}

TEST(Harness, DatasetEnumeratesCellsInCatalogOrder) {
  auto catalog = harness::generate_catalog(42);
  catalog.resize(2);
  harness::GenerateOptions options = quick_options();
  options.heights_mm = {30.0, 50.0};
  options.repeats = 2;

  const harness::Dataset data = harness::generate_dataset(catalog, 42, options);
  ASSERT_EQ(data.records.size(), 8u);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_EQ(data.records[i].particle_name, catalog[0].name);
  for (std::size_t i = 4; i < 8; ++i)
    EXPECT_EQ(data.records[i].particle_name, catalog[1].name);
  EXPECT_DOUBLE_EQ(data.records[0].fill_height_mm, 30.0);
  EXPECT_DOUBLE_EQ(data.records[1].fill_height_mm, 30.0);
  EXPECT_DOUBLE_EQ(data.records[2].fill_height_mm, 50.0);
  EXPECT_DOUBLE_EQ(data.records[3].fill_height_mm, 50.0);

  // Cell seeds derive from a per-cell stream name, so any cell can be
  // regenerated without replaying the whole dataset.
  const std::uint64_t expected =
      Rng(42).derive("cell-" + catalog[0].name + "-30-0").seed();
  EXPECT_EQ(data.records[0].cell_seed, expected);
  EXPECT_NE(data.records[0].cell_seed, data.records[1].cell_seed);
}

TEST(Harness, DatasetIsThreadCountInvariant) {
  auto catalog = harness::generate_catalog(42);
  catalog.resize(2);
  harness::GenerateOptions options = quick_options();
  options.heights_mm = {30.0, 50.0};
  options.repeats = 1;

  options.threads = 1;
  const harness::Dataset serial = harness::generate_dataset(catalog, 7, options);
  options.threads = 4;
  const harness::Dataset pooled = harness::generate_dataset(catalog, 7, options);
  ASSERT_EQ(serial.records.size(), pooled.records.size());
  for (std::size_t i = 0; i < serial.records.size(); ++i)
    EXPECT_TRUE(records_identical(serial.records[i], pooled.records[i])) << i;
}

TEST(Harness, DatasetValidatesItsInputs) {
  const auto catalog = harness::generate_catalog(42);
  harness::GenerateOptions options = quick_options();
  EXPECT_THROW(harness::generate_dataset({}, 42, options), DomainError);
  options.repeats = 0;
  EXPECT_THROW(harness::generate_dataset(catalog, 42, options), DomainError);
  options = quick_options();
  options.heights_mm.clear();
  EXPECT_THROW(harness::generate_dataset(catalog, 42, options), DomainError);
}

// The bulky raw signals can be rebuilt exactly from the stored cell seed.
TEST(Harness, RawSignalsRegenerateTheFeatureBlocks) {
  const harness::GenerateOptions options = quick_options();
  const auto rec =
      harness::generate_record(probe_grain(), 50.0, 2024, options, nullptr);

  const sim::SignalTrace trace = harness::record_slow_trace(rec, options);
  const features::EnvelopePair env = features::envelopes(
      trace, options.jump_threshold(), features::kEnvelopePoints);
  for (int i = 0; i < features::kEnvelopePoints; ++i) {
    EXPECT_DOUBLE_EQ(rec.fv.values[static_cast<std::size_t>(100 + i)],
                     env.lower[static_cast<std::size_t>(i)]);
    EXPECT_DOUBLE_EQ(rec.fv.values[static_cast<std::size_t>(200 + i)],
                     env.upper[static_cast<std::size_t>(i)]);
  }

  const sim::MarkerField field = harness::record_marker_field(rec, options);
  const auto vib =
      features::vib_features(features::principal_vibration_signal(field));
  for (int i = 0; i < features::kVibFeatureDim; ++i)
    EXPECT_DOUBLE_EQ(rec.fv.values[static_cast<std::size_t>(i)],
                     vib[static_cast<std::size_t>(i)]);
}

TEST(Harness, RandomSplitRoundsHalfUpAndKeepsOrder) {
  std::vector<harness::DatasetRecord> records(333);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].particle_name = "r" + std::to_string(i);
    records[i].mass_g = static_cast<double>(i);
  }

  const harness::SplitResult split = harness::split_random(records, 0.2, 42);
  EXPECT_EQ(split.test.size(), 67u);
  EXPECT_EQ(split.train.size(), 266u);

  std::set<std::string> seen;
  double last = -1.0;
  for (const auto& r : split.train) {
    EXPECT_TRUE(seen.insert(r.particle_name).second);
    EXPECT_GT(r.mass_g, last);
    last = r.mass_g;
  }
  last = -1.0;
  for (const auto& r : split.test) {
    EXPECT_TRUE(seen.insert(r.particle_name).second);
    EXPECT_GT(r.mass_g, last);
    last = r.mass_g;
  }
  EXPECT_EQ(seen.size(), records.size());

  const harness::SplitResult again = harness::split_random(records, 0.2, 42);
  ASSERT_EQ(again.test.size(), split.test.size());
  for (std::size_t i = 0; i < split.test.size(); ++i)
    EXPECT_EQ(again.test[i].particle_name, split.test[i].particle_name);

  EXPECT_THROW(harness::split_random({}, 0.2, 42), DomainError);
  EXPECT_THROW(harness::split_random(records, 0.0, 42), DomainError);
  EXPECT_THROW(harness::split_random(records, 1.0, 42), DomainError);
}

TEST(Harness, HoldoutSplitQuarantinesTheHeldParticles) {
  auto catalog = harness::generate_catalog(42);
  catalog.resize(3);
  harness::GenerateOptions options = quick_options();
  options.heights_mm = {40.0};
  options.repeats = 2;
  const harness::Dataset data = harness::generate_dataset(catalog, 5, options);

  const std::vector<std::string> held = {catalog[0].name};
  const harness::SplitResult split =
      harness::split_holdout(data.records, held, 2, 9, options);

  EXPECT_EQ(split.test.size(), 4u);  // two dataset records plus two extras
  EXPECT_EQ(split.train.size(), 4u);
  for (const auto& r : split.test) EXPECT_EQ(r.particle_name, catalog[0].name);
  for (const auto& r : split.train) EXPECT_NE(r.particle_name, catalog[0].name);

  // Extras land after the quarantined records, at fresh fill heights.
  for (std::size_t i = 2; i < 4; ++i) {
    EXPECT_GT(split.test[i].fill_height_mm, 0.0);
    EXPECT_LE(split.test[i].fill_height_mm, 75.0);
    EXPECT_NE(split.test[i].fill_height_mm, 40.0);
  }

  EXPECT_THROW(harness::split_holdout(data.records, {"bogus"}, 1, 9, options),
               DomainError);
  EXPECT_THROW(harness::split_holdout(data.records, {}, 1, 9, options),
               DomainError);
  EXPECT_THROW(harness::split_holdout(data.records,
                                      {catalog[0].name, catalog[0].name}, 1, 9,
                                      options),
               DomainError);
  EXPECT_THROW(harness::split_holdout(data.records, held, -1, 9, options),
               DomainError);
}

TEST(Harness, EvaluateComputesPlainErrorMeans) {
  harness::PropertyValues p1, p2, t1, t2;
  p1.particle_name = p2.particle_name = "a";
  t1.particle_name = t2.particle_name = "a";
  p1.mass_g = 1.0;
  p2.mass_g = 3.0;
  t1.mass_g = t2.mass_g = 2.0;

  harness::EvalParts parts;
  parts.height = parts.volume = parts.diameter = parts.shape = false;
  const harness::EvalReport report =
      harness::evaluate({p1, p2}, {t1, t2}, parts);
  EXPECT_EQ(report.record_count, 2);
  ASSERT_EQ(report.quantities.size(), 1u);
  EXPECT_EQ(report.quantities[0].name, "content_mass_g");
  EXPECT_DOUBLE_EQ(report.quantity("content_mass_g").mae, 1.0);
  EXPECT_DOUBLE_EQ(report.quantity("content_mass_g").mape_pct, 50.0);
  EXPECT_EQ(report.quantity("content_mass_g").mape_excluded, 0);
  EXPECT_FALSE(report.has_shape);
  EXPECT_THROW(report.quantity("fill_height_mm"), DomainError);
}

TEST(Harness, EvaluateLeavesZeroTruthsOutOfTheMape) {
  harness::PropertyValues p1, p2, t1, t2;
  p1.particle_name = p2.particle_name = "a";
  t1.particle_name = t2.particle_name = "a";
  p1.mass_g = 1.0;
  t1.mass_g = 2.0;
  p2.mass_g = 5.0;
  t2.mass_g = 0.0;

  harness::EvalParts parts;
  parts.height = parts.volume = parts.diameter = parts.shape = false;
  const harness::EvalReport report =
      harness::evaluate({p1, p2}, {t1, t2}, parts);
  EXPECT_DOUBLE_EQ(report.quantity("content_mass_g").mae, 3.0);
  EXPECT_DOUBLE_EQ(report.quantity("content_mass_g").mape_pct, 50.0);
  EXPECT_EQ(report.quantity("content_mass_g").mape_excluded, 1);
}

TEST(Harness, EvaluateScoresShapeAndPerParticleRows) {
  auto make = [](const std::string& name, domain::ShapeClass shape,
                 double mass) {
    harness::PropertyValues v;
    v.particle_name = name;
    v.shape = shape;
    v.mass_g = mass;
    return v;
  };
  const std::vector<harness::PropertyValues> truths = {
      make("a", domain::ShapeClass::powder, 10.0),
      make("b", domain::ShapeClass::rounded, 20.0),
      make("b", domain::ShapeClass::rounded, 30.0),
  };
  const std::vector<harness::PropertyValues> preds = {
      make("a", domain::ShapeClass::powder, 11.0),
      make("b", domain::ShapeClass::spherical, 24.0),
      make("b", domain::ShapeClass::rounded, 31.0),
  };

  const harness::EvalReport report = harness::evaluate(preds, truths);
  EXPECT_TRUE(report.has_shape);
  EXPECT_NEAR(report.shape_accuracy, 2.0 / 3.0, 1e-12);
  const int powder = static_cast<int>(domain::ShapeClass::powder);
  const int rounded = static_cast<int>(domain::ShapeClass::rounded);
  const int spherical = static_cast<int>(domain::ShapeClass::spherical);
  EXPECT_EQ(report.confusion[powder][powder], 1);
  EXPECT_EQ(report.confusion[rounded][spherical], 1);
  EXPECT_EQ(report.confusion[rounded][rounded], 1);

  ASSERT_EQ(report.per_particle.size(), 2u);
  EXPECT_EQ(report.per_particle[0].name, "a");
  EXPECT_EQ(report.per_particle[0].count, 1);
  EXPECT_DOUBLE_EQ(report.per_particle[0].mae[0], 1.0);
  EXPECT_DOUBLE_EQ(report.per_particle[0].shape_accuracy, 1.0);
  EXPECT_EQ(report.per_particle[1].name, "b");
  EXPECT_EQ(report.per_particle[1].count, 2);
  EXPECT_DOUBLE_EQ(report.per_particle[1].mae[0], 2.5);
  EXPECT_DOUBLE_EQ(report.per_particle[1].shape_accuracy, 0.5);

  EXPECT_THROW(harness::evaluate(preds, {truths[0]}), DomainError);
  EXPECT_THROW(harness::evaluate({}, {}), DomainError);
}

TEST(Harness, PipelineTrainsAndScoresEndToEnd) {
  auto catalog = harness::generate_catalog(42);
  catalog.resize(10);
  harness::GenerateOptions options = quick_options();
  options.heights_mm = {40.0};
  options.repeats = 2;
  const harness::Dataset data = harness::generate_dataset(catalog, 42, options);
  ASSERT_EQ(data.records.size(), 20u);

  const harness::SplitResult split = harness::split_random(data.records, 0.25, 3);
  const harness::PipelineOutput out = harness::train_and_evaluate(
      split.train, split.test, 7, "smoke", options.container);

  EXPECT_EQ(out.report.record_count, 5);
  EXPECT_EQ(out.predictions.size(), 5u);
  EXPECT_EQ(out.truths.size(), 5u);
  EXPECT_TRUE(out.report.has_shape);
  EXPECT_GT(out.report.runtime_seconds, 0.0);

  // The mass stage is pure physics: errors stay at the lift-noise scale.
  EXPECT_LT(out.report.quantity("content_mass_g").mae, 3.0);
  // Every cell here uses the same fill, so the height stage learns it.
  EXPECT_LT(out.report.quantity("fill_height_mm").mae, 5.0);
  for (const auto& pred : out.predictions)
    EXPECT_DOUBLE_EQ(pred.volume_ml, pred.height_mm * 3600.0 / 1000.0);

  EXPECT_THROW(
      harness::train_and_evaluate({}, split.test, 7, "x", options.container),
      DomainError);
  EXPECT_THROW(
      harness::train_and_evaluate(split.train, {}, 7, "x", options.container),
      DomainError);
}

TEST(Harness, RateAblationKeepsTheSplitAndVariesOnlyTheRate) {
  auto catalog = harness::generate_catalog(42);
  catalog.resize(8);
  harness::GenerateOptions options = quick_options();
  options.heights_mm = {40.0};
  options.repeats = 2;
  const harness::Dataset data = harness::generate_dataset(catalog, 42, options);

  const harness::AblationResult result =
      harness::ablation_rate(data, {800.0, 30.0}, 42, options);
  ASSERT_EQ(result.arms.size(), 2u);
  EXPECT_DOUBLE_EQ(result.arms[0].rate_hz, 800.0);
  EXPECT_DOUBLE_EQ(result.arms[1].rate_hz, 30.0);
  EXPECT_EQ(result.arms[0].report.record_count,
            result.arms[1].report.record_count);
  for (const auto& arm : result.arms) {
    EXPECT_GE(arm.size_mae_mm, 0.0);
    EXPECT_GE(arm.shape_accuracy, 0.0);
    EXPECT_LE(arm.shape_accuracy, 1.0);
  }

  EXPECT_THROW(harness::ablation_rate(data, {}, 42, options), DomainError);
  EXPECT_THROW(harness::ablation_rate(data, {0.0}, 42, options), DomainError);
  EXPECT_THROW(harness::ablation_rate(data, {1600.0}, 42, options),
               DomainError);
  EXPECT_THROW(harness::ablation_rate({}, {30.0}, 42, options), DomainError);
}

TEST(Harness, HumidityTracesAreDeterministicPerTrial) {
  const harness::GenerateOptions options = quick_options();
  const auto trace_values = [](const sim::SignalTrace& trace) {
    std::vector<double> values;
    for (const sim::TraceSample& s : trace.samples) values.push_back(s.value);
    return values;
  };
  const sim::SignalTrace a = harness::humidity_trace(0.3, 0, 42, options);
  const sim::SignalTrace b = harness::humidity_trace(0.3, 0, 42, options);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  EXPECT_EQ(trace_values(a), trace_values(b));

  const sim::SignalTrace c = harness::humidity_trace(0.3, 1, 42, options);
  EXPECT_NE(trace_values(a), trace_values(c));

  EXPECT_THROW(harness::humidity_trace(-0.1, 0, 42, options), DomainError);
  EXPECT_THROW(harness::humidity_trace(0.1, -1, 42, options), DomainError);
}

TEST(Harness, HumidityStudySplitsSeenAndInterpolation) {
  harness::GenerateOptions options = quick_options();
  const harness::HumidityOutcome outcome =
      harness::humidity_experiment({0.0, 0.3}, 2, 11, options);

  ASSERT_EQ(outcome.records.size(), 4u);
  EXPECT_DOUBLE_EQ(outcome.records[0].level_ml, 0.0);
  EXPECT_EQ(outcome.records[0].trial, 0);
  EXPECT_DOUBLE_EQ(outcome.records[1].level_ml, 0.0);
  EXPECT_EQ(outcome.records[1].trial, 1);
  EXPECT_DOUBLE_EQ(outcome.records[2].level_ml, 0.3);
  EXPECT_DOUBLE_EQ(outcome.records[3].level_ml, 0.3);
  for (const auto& rec : outcome.records) {
    EXPECT_EQ(rec.envelopes.lower.size(),
              static_cast<std::size_t>(features::kEnvelopePoints));
    EXPECT_EQ(rec.envelopes.upper.size(),
              static_cast<std::size_t>(features::kEnvelopePoints));
  }

  EXPECT_EQ(outcome.seen.record_count, 1);
  // Interpolation holds out every odd-indexed level entirely.
  EXPECT_EQ(outcome.interpolation.record_count, 2);
  ASSERT_EQ(outcome.interpolation.quantities.size(), 1u);
  EXPECT_EQ(outcome.interpolation.quantities[0].name, "humidity_ml");
  EXPECT_EQ(outcome.interpolation.quantity("humidity_ml").mape_excluded, 0);

  EXPECT_THROW(harness::humidity_experiment({}, 2, 11, options), DomainError);
  EXPECT_THROW(harness::humidity_experiment({0.1, 0.2}, 0, 11, options),
               DomainError);
  // One level cannot support the between-levels evaluation.
  EXPECT_THROW(harness::humidity_experiment({0.1}, 10, 11, options),
               DomainError);
}

}  // namespace
