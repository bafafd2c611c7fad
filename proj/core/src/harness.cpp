#include "granusense/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "granusense/errors.hpp"
#include "granusense/forest.hpp"
#include "granusense/mlp.hpp"
#include "granusense/rng.hpp"

namespace granusense::harness {

namespace {

// Base material table. Diameter and density receive a +/-2% seed-driven
// spread; every base value sits far enough from its range and class
// boundaries that the spread cannot push a spec out of
// D in [0.2, 12] mm, rho in [0.0005, 0.008] g/mm^3, or across the
// powder/grain diameter threshold.
struct CatalogEntry {
  const char* name;
  double d_mm;
  double psi;
  double rho;
};

constexpr CatalogEntry kCatalog[] = {
    // fine powders (shape class 0 by diameter)
    {"powdered-sugar-analog", 0.22, 0.95, 0.0008},
    {"table-salt-analog", 0.40, 0.92, 0.0013},
    {"granulated-sugar-analog", 0.50, 0.90, 0.0016},
    {"ground-coffee-analog", 0.45, 0.72, 0.0006},
    {"coarse-sand-analog", 0.80, 0.78, 0.0025},
    // irregular flakes and cut herbs
    {"rosemary-analog", 2.00, 0.56, 0.00055},
    {"oregano-flake-analog", 1.80, 0.60, 0.00058},
    {"bay-leaf-flake-analog", 4.00, 0.58, 0.00053},
    {"crushed-chili-analog", 2.60, 0.64, 0.0009},
    {"rolled-oat-analog", 5.00, 0.66, 0.0007},
    // rounded grains; densities span light to heavy so bulk weight alone
    // cannot stand in for shape, and each size region holds close
    // same-class neighbors
    {"orzo-analog", 4.40, 0.76, 0.0014},
    {"long-grain-rice-analog", 4.20, 0.74, 0.0015},
    {"pearl-couscous-analog", 4.70, 0.78, 0.0013},
    {"short-grain-rice-analog", 2.60, 0.82, 0.0016},
    {"cumin-seed-analog", 2.20, 0.78, 0.0011},
    {"puffed-rice-analog", 5.60, 0.80, 0.00065},
    {"gravel-analog", 5.00, 0.76, 0.0034},
    {"river-pebble-analog", 11.00, 0.84, 0.0026},
    {"raisin-analog", 9.60, 0.86, 0.0022},
    // near-spherical seeds and beads, same broad density spread
    {"navy-bean-analog", 7.00, 0.92, 0.0021},
    {"ceramic-bead-analog", 6.60, 0.92, 0.0025},
    {"black-bean-analog", 8.00, 0.91, 0.0023},
    {"lentil-analog", 3.40, 0.91, 0.0020},
    {"barley-pearl-analog", 5.40, 0.93, 0.0019},
    {"millet-analog", 1.90, 0.94, 0.0017},
    {"quinoa-analog", 1.70, 0.95, 0.0016},
    {"foam-pellet-analog", 10.40, 0.93, 0.0007},
    // spheres, light to heavy
    {"green-pea-analog", 7.60, 0.97, 0.0024},
    {"chickpea-analog", 7.80, 0.965, 0.0022},
    {"mustard-seed-analog", 1.90, 0.98, 0.0021},
    {"peppercorn-analog", 5.00, 0.97, 0.0018},
    {"tapioca-pearl-analog", 6.20, 0.99, 0.0019},
    {"glass-bead-analog", 3.00, 1.00, 0.0062},
    {"steel-shot-analog", 2.40, 1.00, 0.0078},
    {"marble-analog", 11.60, 1.00, 0.0065},
    {"airsoft-pellet-analog", 6.00, 0.995, 0.0026},
    {"polystyrene-bead-analog", 6.40, 0.985, 0.00075},
};

constexpr double kJitterSpread = 0.02;
constexpr double kSpillRetryStepMm = 5.0;
constexpr double kHumidityFillMassG = 150.0;
constexpr double kHumiditySweepStartDeg = -135.0;
constexpr double kHumiditySweepEndDeg = 135.0;
constexpr double kHoldoutHeightMinMm = 25.0;
constexpr double kHoldoutHeightMaxMm = 75.0;

std::string fmt_g(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

double elapsed_s(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       since)
      .count();
}

// Runs fn(0..n-1) on a small pool. Work items write only to their own
// slots, so scheduling order cannot affect results.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t pool_size =
      threads > 0 ? static_cast<std::size_t>(threads)
                  : std::max(1u, std::thread::hardware_concurrency());
  pool_size = std::min(pool_size, n);
  if (pool_size <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(pool_size);
  for (std::size_t t = 0; t < pool_size; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::uint64_t derived_seed(std::uint64_t base, const std::string& stream) {
  return Rng(base).derive(stream).seed();
}

// Full-batch training on these small sets occasionally parks in a poor
// basin for an unlucky draw of initial weights. Three restarts with derived
// seeds, keeping the lowest final training loss, make every stage land near
// its typical optimum while staying deterministic. Ties keep the earliest
// restart.
constexpr int kMlpRestarts = 3;

mlp::Model train_mlp_best_of(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const std::vector<int>& arch,
                             std::uint64_t seed) {
  mlp::Model best;
  for (int k = 0; k < kMlpRestarts; ++k) {
    mlp::Model candidate = mlp::train_regressor(
        x, y, arch, derived_seed(seed, "restart-" + std::to_string(k)));
    if (k == 0 || candidate.final_loss < best.final_loss)
      best = std::move(candidate);
  }
  return best;
}

// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i-- > 1;) {
    std::size_t j = static_cast<std::size_t>(rng.uniform() *
                                             static_cast<double>(i + 1));
    if (j > i) j = i;
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

struct QuantityDef {
  const char* name;
  bool EvalParts::*enabled;
  double PropertyValues::*value;
};

constexpr QuantityDef kQuantityDefs[] = {
    {"content_mass_g", &EvalParts::mass, &PropertyValues::mass_g},
    {"fill_height_mm", &EvalParts::height, &PropertyValues::height_mm},
    {"fill_volume_ml", &EvalParts::volume, &PropertyValues::volume_ml},
    {"particle_diameter_mm", &EvalParts::diameter,
     &PropertyValues::diameter_mm},
    {"humidity_ml", &EvalParts::humidity, &PropertyValues::humidity_ml},
};

}  // namespace

std::vector<domain::ParticleSpec> generate_catalog(std::uint64_t seed) {
  const Rng cat = Rng(seed).derive("catalog");
  std::vector<domain::ParticleSpec> out;
  out.reserve(std::size(kCatalog));
  for (const CatalogEntry& entry : kCatalog) {
    Rng jitter = cat.derive(entry.name);
    domain::ParticleSpec spec;
    spec.name = entry.name;
    spec.diameter_dp_mm =
        entry.d_mm * (1.0 + kJitterSpread * (2.0 * jitter.uniform() - 1.0));
    spec.sphericity_psi = entry.psi;
    spec.material_density_g_mm3 =
        entry.rho * (1.0 + kJitterSpread * (2.0 * jitter.uniform() - 1.0));
    spec.validate();
    if (domain::shape_class(spec.diameter_dp_mm, spec.sphericity_psi) !=
        domain::shape_class(entry.d_mm, entry.psi))
      throw DomainError("catalog spread moved " + spec.name +
                        " across a shape-class boundary");
    out.push_back(std::move(spec));
  }
  return out;
}

domain::ParticleSpec sugar_spec() {
  domain::ParticleSpec spec;
  spec.name = "fine-sugar-analog";
  spec.diameter_dp_mm = 0.5;
  spec.sphericity_psi = 0.9;
  spec.material_density_g_mm3 = 0.0016;
  return spec;
}

double fill_height_for_mass_mm(const domain::ParticleSpec& particle,
                               double mass_g,
                               const domain::ContainerSpec& container) {
  particle.validate();
  container.validate();
  if (!(mass_g > 0.0) || !std::isfinite(mass_g))
    throw DomainError("fill mass must be positive");
  const double bulk_density =
      particle.material_density_g_mm3 * particle.packing_fraction;
  const double height = mass_g / (bulk_density * container.cross_section_mm2());
  if (!(height < container.inner_height_mm))
    throw DomainError("requested mass does not fit the container");
  return height;
}

const std::vector<std::string>& default_holdout_names() {
  static const std::vector<std::string> names = {
      "ground-coffee-analog", "rosemary-analog", "orzo-analog",
      "navy-bean-analog", "green-pea-analog"};
  return names;
}

DatasetRecord generate_record(const domain::ParticleSpec& particle,
                              double height_mm, std::uint64_t cell_seed,
                              const GenerateOptions& options,
                              std::vector<SpillNote>* spills) {
  particle.validate();
  options.container.validate();
  if (!(height_mm > 0.0) || !std::isfinite(height_mm))
    throw DomainError("fill height must be positive");

  const Rng cell(cell_seed);
  const std::uint64_t lift_seed = cell.derive("lift").seed();
  const std::uint64_t tilt_seed = cell.derive("tilt").seed();
  const std::uint64_t slow_seed = cell.derive("slow").seed();
  const std::uint64_t vib_seed = cell.derive("vib").seed();

  // The tilt holds are the only open-top stage, so they decide whether a
  // fill fits. Probe them first, stepping the fill down until it does.
  double used_mm = height_mm;
  sim::TiltHoldReadings tilt;
  for (;;) {
    if (!(used_mm > 0.0))
      throw SpillError("no fill height of " + particle.name +
                       " survives the tilt holds");
    const domain::ContentFill probe{particle, used_mm};
    try {
      tilt = sim::tilt_hold_torques(probe, options.container,
                                    options.tilt_noise_sigma_nm, tilt_seed);
      break;
    } catch (const SpillError&) {
      used_mm -= kSpillRetryStepMm;
    }
  }
  if (used_mm != height_mm && spills)
    spills->push_back({particle.name, height_mm, used_mm});

  const domain::ContentFill fill{particle, used_mm};

  DatasetRecord rec;
  rec.particle_name = particle.name;
  rec.particle = particle;
  rec.fill_height_mm = used_mm;
  rec.mass_g = domain::content_mass_g(fill, options.container);
  rec.diameter_mm = particle.diameter_dp_mm;
  rec.sphericity = particle.sphericity_psi;
  rec.shape =
      domain::shape_class(particle.diameter_dp_mm, particle.sphericity_psi);
  rec.humidity_ml = particle.humidity_ml;
  rec.cell_seed = cell_seed;
  rec.tilt = tilt;
  rec.delta_fz_n = sim::lift_delta_fz_n(fill, options.container,
                                        options.lift_noise_sigma_n, lift_seed);

  const sim::SignalTrace trace = sim::stick_slip_trace(
      fill, options.container, options.slow_start_deg, options.slow_end_deg,
      options.slow, slow_seed);
  const features::EnvelopePair env = features::envelopes(
      trace, options.jump_threshold(), features::kEnvelopePoints);

  const sim::MarkerField field =
      sim::vibration_markerfield(fill, options.container, vib_seed,
                                 options.vib);
  const features::VibrationSignal signal =
      features::principal_vibration_signal(field);
  const std::array<double, features::kVibFeatureDim> vib =
      features::vib_features(signal);

  // Feature slots 300/301 carry the oracle values at generation time; the
  // training pipeline swaps in estimates.
  rec.fv = features::assemble_features(vib, env, rec.mass_g,
                                       rec.fill_height_mm);
  return rec;
}

Dataset generate_dataset(const std::vector<domain::ParticleSpec>& catalog,
                         std::uint64_t seed, const GenerateOptions& options) {
  if (catalog.empty()) throw DomainError("catalog is empty");
  if (options.repeats <= 0) throw DomainError("repeats must be positive");
  if (options.heights_mm.empty()) throw DomainError("no fill heights");

  struct Cell {
    std::size_t particle_index;
    double height_mm;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  cells.reserve(catalog.size() * options.heights_mm.size() *
                static_cast<std::size_t>(options.repeats));
  const Rng root(seed);
  for (std::size_t p = 0; p < catalog.size(); ++p)
    for (double h : options.heights_mm)
      for (int r = 0; r < options.repeats; ++r) {
        const std::string stream = "cell-" + catalog[p].name + "-" +
                                   fmt_g(h) + "-" + std::to_string(r);
        cells.push_back({p, h, root.derive(stream).seed()});
      }

  Dataset out;
  out.records.resize(cells.size());
  std::vector<std::vector<SpillNote>> notes(cells.size());
  parallel_for(cells.size(), options.threads, [&](std::size_t i) {
    out.records[i] = generate_record(catalog[cells[i].particle_index],
                                     cells[i].height_mm, cells[i].seed,
                                     options, &notes[i]);
  });
  for (auto& cell_notes : notes)
    out.spills.insert(out.spills.end(), cell_notes.begin(), cell_notes.end());
  return out;
}

sim::SignalTrace record_slow_trace(const DatasetRecord& record,
                                   const GenerateOptions& options) {
  const domain::ContentFill fill{record.particle, record.fill_height_mm};
  const std::uint64_t slow_seed = Rng(record.cell_seed).derive("slow").seed();
  return sim::stick_slip_trace(fill, options.container,
                               options.slow_start_deg, options.slow_end_deg,
                               options.slow, slow_seed);
}

sim::MarkerField record_marker_field(const DatasetRecord& record,
                                     const GenerateOptions& options) {
  const domain::ContentFill fill{record.particle, record.fill_height_mm};
  const std::uint64_t vib_seed = Rng(record.cell_seed).derive("vib").seed();
  return sim::vibration_markerfield(fill, options.container, vib_seed,
                                    options.vib);
}

SplitResult split_random(const std::vector<DatasetRecord>& records,
                         double test_fraction, std::uint64_t seed) {
  if (records.empty()) throw DomainError("nothing to split");
  if (!(test_fraction > 0.0) || !(test_fraction < 1.0))
    throw DomainError("test fraction must lie inside (0, 1)");

  const std::size_t n = records.size();
  const std::size_t n_test =
      round_half_up(test_fraction * static_cast<double>(n));
  Rng rng(seed);
  const std::vector<std::size_t> order = shuffled_indices(n, rng);
  std::vector<bool> in_test(n, false);
  for (std::size_t k = 0; k < n_test; ++k) in_test[order[k]] = true;

  SplitResult out;
  out.train.reserve(n - n_test);
  out.test.reserve(n_test);
  for (std::size_t i = 0; i < n; ++i)
    (in_test[i] ? out.test : out.train).push_back(records[i]);
  return out;
}

SplitResult split_holdout(const std::vector<DatasetRecord>& records,
                          const std::vector<std::string>& held_names,
                          int extras_per_held, std::uint64_t seed,
                          const GenerateOptions& options) {
  if (records.empty()) throw DomainError("nothing to split");
  if (held_names.empty()) throw DomainError("no held-out names");
  if (extras_per_held < 0)
    throw DomainError("extras per held particle must be non-negative");
  const std::set<std::string> held(held_names.begin(), held_names.end());
  if (held.size() != held_names.size())
    throw DomainError("held-out names repeat");

  std::map<std::string, std::size_t> first_record;
  for (std::size_t i = 0; i < records.size(); ++i)
    first_record.emplace(records[i].particle_name, i);
  for (const std::string& name : held_names)
    if (!first_record.count(name))
      throw DomainError("held-out particle not in dataset: " + name);

  SplitResult out;
  for (const DatasetRecord& r : records)
    (held.count(r.particle_name) ? out.test : out.train).push_back(r);

  const Rng root(seed);
  for (const std::string& name : held_names) {
    const domain::ParticleSpec& spec =
        records[first_record.at(name)].particle;
    for (int k = 0; k < extras_per_held; ++k) {
      const Rng extra =
          root.derive("holdout-extra-" + name + "-" + std::to_string(k));
      Rng draw = extra;
      const double height =
          kHoldoutHeightMinMm +
          (kHoldoutHeightMaxMm - kHoldoutHeightMinMm) * draw.uniform();
      out.test.push_back(generate_record(spec, height,
                                         extra.derive("cell").seed(), options,
                                         &out.spills));
    }
  }
  return out;
}

const QuantityMetrics& EvalReport::quantity(const std::string& name) const {
  for (const QuantityMetrics& q : quantities)
    if (q.name == name) return q;
  throw DomainError("report has no quantity named " + name);
}

EvalReport evaluate(const std::vector<PropertyValues>& predictions,
                    const std::vector<PropertyValues>& truths,
                    const EvalParts& parts) {
  if (predictions.empty()) throw DomainError("nothing to evaluate");
  if (predictions.size() != truths.size())
    throw DomainError("predictions and truths must pair up");
  const std::size_t n = predictions.size();

  std::vector<const QuantityDef*> active;
  for (const QuantityDef& def : kQuantityDefs)
    if (parts.*(def.enabled)) active.push_back(&def);

  EvalReport report;
  report.record_count = static_cast<int>(n);
  report.has_shape = parts.shape;

  // Per-particle accumulators keyed in first-appearance order.
  std::map<std::string, std::size_t> row_of;
  std::vector<ParticleRow> rows;
  auto row_for = [&](const std::string& name) -> ParticleRow& {
    auto it = row_of.find(name);
    if (it == row_of.end()) {
      it = row_of.emplace(name, rows.size()).first;
      rows.push_back({name, 0, std::vector<double>(active.size(), 0.0), 0.0});
    }
    return rows[it->second];
  };

  for (std::size_t q = 0; q < active.size(); ++q) {
    QuantityMetrics metrics;
    metrics.name = active[q]->name;
    double abs_sum = 0.0;
    double pct_sum = 0.0;
    std::size_t pct_n = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double truth = truths[i].*(active[q]->value);
      const double pred = predictions[i].*(active[q]->value);
      const double err = std::abs(pred - truth);
      abs_sum += err;
      if (truth != 0.0) {
        pct_sum += err / std::abs(truth);
        ++pct_n;
      }
      row_for(truths[i].particle_name).mae[q] += err;
    }
    metrics.mae = abs_sum / static_cast<double>(n);
    metrics.mape_pct =
        pct_n == 0 ? 0.0 : 100.0 * pct_sum / static_cast<double>(pct_n);
    metrics.mape_excluded = static_cast<int>(n - pct_n);
    report.quantities.push_back(std::move(metrics));
  }

  std::size_t shape_hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ParticleRow& row = row_for(truths[i].particle_name);
    ++row.count;
    if (parts.shape) {
      const int truth = static_cast<int>(truths[i].shape);
      const int pred = static_cast<int>(predictions[i].shape);
      ++report.confusion[truth][pred];
      if (truth == pred) {
        ++shape_hits;
        row.shape_accuracy += 1.0;
      }
    }
  }
  if (parts.shape)
    report.shape_accuracy =
        static_cast<double>(shape_hits) / static_cast<double>(n);

  for (ParticleRow& row : rows) {
    for (double& mae : row.mae) mae /= row.count;
    row.shape_accuracy =
        parts.shape ? row.shape_accuracy / row.count : 0.0;
  }
  report.per_particle = std::move(rows);
  return report;
}

PipelineOutput train_and_evaluate(const std::vector<DatasetRecord>& train,
                                  const std::vector<DatasetRecord>& test,
                                  std::uint64_t seed, const std::string& tag,
                                  const domain::ContainerSpec& container,
                                  bool oracle_features) {
  const auto t0 = std::chrono::steady_clock::now();
  if (train.empty() || test.empty())
    throw DomainError("both split sides must be non-empty");
  container.validate();

  auto masses_of = [&](const std::vector<DatasetRecord>& recs) {
    std::vector<double> m(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i)
      m[i] = estimators::estimate_mass_g(recs[i].delta_fz_n, container);
    return m;
  };
  const std::vector<double> mass_train = masses_of(train);
  const std::vector<double> mass_test = masses_of(test);

  // Height stage: six hold torques plus the mass estimate.
  Eigen::MatrixXd hx(train.size(), 7);
  Eigen::VectorXd hy(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    for (int j = 0; j < 6; ++j)
      hx(static_cast<long>(i), j) =
          train[i].tilt.torque_nm[static_cast<std::size_t>(j)];
    hx(static_cast<long>(i), 6) = mass_train[i];
    hy(static_cast<long>(i)) = train[i].fill_height_mm;
  }
  PipelineOutput out;
  out.models.height = train_mlp_best_of(
      hx, hy, {7, 16, 4, 1}, derived_seed(seed, "train-height-" + tag));

  auto heights_of = [&](const std::vector<DatasetRecord>& recs,
                        const std::vector<double>& masses) {
    std::vector<double> h(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i)
      h[i] = estimators::estimate_height(out.models.height, recs[i].tilt,
                                         masses[i], container)
                 .height_mm;
    return h;
  };
  const std::vector<double> height_train = heights_of(train, mass_train);
  const std::vector<double> height_test = heights_of(test, mass_test);

  // Size/shape stage consumes feature vectors whose mass/height slots hold
  // the upstream estimates, for training and test alike.
  auto staged_fv = [&](const DatasetRecord& rec, double mass, double height) {
    features::FeatureVector fv = rec.fv;
    if (!oracle_features) {
      fv.est_mass_g() = mass;
      fv.est_height_mm() = height;
    }
    return fv;
  };

  Eigen::MatrixXd sx(train.size(), features::kFeatureDim);
  Eigen::VectorXd sy(train.size());
  std::vector<int> labels(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const features::FeatureVector fv =
        staged_fv(train[i], mass_train[i], height_train[i]);
    for (int j = 0; j < features::kFeatureDim; ++j)
      sx(static_cast<long>(i), j) = fv.values[static_cast<std::size_t>(j)];
    sy(static_cast<long>(i)) = train[i].diameter_mm;
    labels[i] = static_cast<int>(train[i].shape);
  }
  out.models.size = train_mlp_best_of(
      sx, sy, {features::kFeatureDim, 16, 4, 1},
      derived_seed(seed, "train-size-" + tag));
  out.models.shape =
      forest::train_classifier(sx, labels, domain::kShapeClassCount,
                               derived_seed(seed, "train-shape-" + tag));

  const double cross_mm2 = container.cross_section_mm2();
  out.predictions.reserve(test.size());
  out.truths.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const DatasetRecord& rec = test[i];
    const features::FeatureVector fv =
        staged_fv(rec, mass_test[i], height_test[i]);
    const estimators::SizeShapeEstimate ss =
        estimators::estimate_size_shape(out.models.size, out.models.shape, fv);

    PropertyValues pred;
    pred.particle_name = rec.particle_name;
    pred.mass_g = mass_test[i];
    pred.height_mm = height_test[i];
    pred.volume_ml = height_test[i] * cross_mm2 / 1000.0;
    pred.diameter_mm = ss.diameter_mm;
    pred.shape = ss.shape_class;
    out.predictions.push_back(std::move(pred));

    PropertyValues truth;
    truth.particle_name = rec.particle_name;
    truth.mass_g = rec.mass_g;
    truth.height_mm = rec.fill_height_mm;
    truth.volume_ml = rec.fill_height_mm * cross_mm2 / 1000.0;
    truth.diameter_mm = rec.diameter_mm;
    truth.shape = rec.shape;
    truth.humidity_ml = rec.humidity_ml;
    out.truths.push_back(std::move(truth));
  }

  out.report = evaluate(out.predictions, out.truths);
  out.report.runtime_seconds = elapsed_s(t0);
  return out;
}

AblationResult ablation_rate(const Dataset& dataset,
                             const std::vector<double>& rates_hz,
                             std::uint64_t seed,
                             const GenerateOptions& options) {
  if (dataset.records.empty()) throw DomainError("dataset is empty");
  if (rates_hz.empty()) throw DomainError("no sensor rates given");
  for (double rate : rates_hz)
    if (!(rate > 0.0) || rate > options.vib.sample_rate_hz)
      throw DomainError("sensor rate must lie in (0, source rate]");

  // Each arm sees the same records with only the vibration block of the
  // feature vector recomputed at its rate.
  std::vector<std::vector<DatasetRecord>> arm_records(rates_hz.size(),
                                                      dataset.records);
  parallel_for(dataset.records.size(), options.threads, [&](std::size_t i) {
    const sim::MarkerField field =
        record_marker_field(dataset.records[i], options);
    for (std::size_t a = 0; a < rates_hz.size(); ++a) {
      const sim::MarkerField decimated =
          features::downsample(field, rates_hz[a]);
      const features::VibrationSignal signal =
          features::principal_vibration_signal(decimated);
      const std::array<double, features::kVibFeatureDim> vib =
          features::vib_features(signal, features::LagPolicy::truncate);
      std::copy(vib.begin(), vib.end(),
                arm_records[a][i].fv.values.begin());
    }
  });

  // Shared split seed and training streams keep the arms a controlled
  // comparison: membership and seeds match, only the features differ.
  const std::uint64_t split_seed = derived_seed(seed, "split-seen");
  AblationResult out;
  for (std::size_t a = 0; a < rates_hz.size(); ++a) {
    const SplitResult split = split_random(arm_records[a], 0.2, split_seed);
    PipelineOutput po = train_and_evaluate(split.train, split.test, seed,
                                           "ablate", options.container);
    AblationArm arm;
    arm.rate_hz = rates_hz[a];
    arm.size_mae_mm = po.report.quantity("particle_diameter_mm").mae;
    arm.shape_accuracy = po.report.shape_accuracy;
    arm.report = std::move(po.report);
    out.arms.push_back(std::move(arm));
  }
  return out;
}

sim::SignalTrace humidity_trace(double level_ml, int trial,
                                std::uint64_t seed,
                                const GenerateOptions& options) {
  if (!(level_ml >= 0.0) || !std::isfinite(level_ml))
    throw DomainError("humidity level must be non-negative");
  if (trial < 0) throw DomainError("trial index must be non-negative");
  domain::ParticleSpec sugar = sugar_spec();
  sugar.humidity_ml = level_ml;
  const domain::ContentFill fill{
      sugar,
      fill_height_for_mass_mm(sugar, kHumidityFillMassG, options.container)};
  // Pairing: the noise stream depends on the trial only, never the level.
  const std::uint64_t trace_seed =
      derived_seed(seed, "humidity-trial-" + std::to_string(trial));
  return sim::stick_slip_trace(fill, options.container,
                               kHumiditySweepStartDeg, kHumiditySweepEndDeg,
                               options.slow, trace_seed);
}

namespace {

// Train the humidity head on the given record subset and score the rest.
EvalReport humidity_eval(const std::vector<HumidityRecord>& records,
                         const std::vector<std::size_t>& train_idx,
                         const std::vector<std::size_t>& test_idx,
                         std::uint64_t train_seed) {
  const auto t0 = std::chrono::steady_clock::now();
  if (train_idx.empty() || test_idx.empty())
    throw DomainError("both humidity split sides must be non-empty");

  Eigen::MatrixXd x(train_idx.size(), features::kToppleFeatureDim);
  Eigen::VectorXd y(train_idx.size());
  for (std::size_t r = 0; r < train_idx.size(); ++r) {
    const HumidityRecord& rec = records[train_idx[r]];
    for (int i = 0; i < features::kEnvelopePoints; ++i) {
      x(static_cast<long>(r), i) =
          rec.envelopes.lower[static_cast<std::size_t>(i)];
      x(static_cast<long>(r), features::kEnvelopePoints + i) =
          rec.envelopes.upper[static_cast<std::size_t>(i)];
    }
    y(static_cast<long>(r)) = rec.level_ml;
  }
  const mlp::Model model =
      train_mlp_best_of(x, y, {features::kToppleFeatureDim, 16, 1}, train_seed);

  std::vector<PropertyValues> preds, truths;
  preds.reserve(test_idx.size());
  truths.reserve(test_idx.size());
  for (std::size_t idx : test_idx) {
    const HumidityRecord& rec = records[idx];
    PropertyValues pred;
    pred.particle_name = sugar_spec().name;
    pred.humidity_ml = estimators::estimate_humidity_ml(model, rec.envelopes);
    preds.push_back(std::move(pred));
    PropertyValues truth;
    truth.particle_name = sugar_spec().name;
    truth.humidity_ml = rec.level_ml;
    truths.push_back(std::move(truth));
  }

  EvalParts parts;
  parts.mass = parts.height = parts.volume = parts.diameter = parts.shape =
      false;
  parts.humidity = true;
  EvalReport report = evaluate(preds, truths, parts);
  report.runtime_seconds = elapsed_s(t0);
  return report;
}

}  // namespace

HumidityOutcome humidity_experiment(const std::vector<double>& levels_ml,
                                    int trials, std::uint64_t seed,
                                    const GenerateOptions& options) {
  if (levels_ml.empty()) throw DomainError("no humidity levels");
  if (trials <= 0) throw DomainError("trials must be positive");

  HumidityOutcome out;
  out.records.reserve(levels_ml.size() * static_cast<std::size_t>(trials));
  std::vector<std::size_t> even_levels, odd_levels;
  for (std::size_t li = 0; li < levels_ml.size(); ++li)
    for (int t = 0; t < trials; ++t) {
      const sim::SignalTrace trace =
          humidity_trace(levels_ml[li], t, seed, options);
      HumidityRecord rec;
      rec.level_ml = levels_ml[li];
      rec.trial = t;
      rec.envelopes = features::envelopes(trace, options.jump_threshold(),
                                          features::kEnvelopePoints);
      (li % 2 == 0 ? even_levels : odd_levels).push_back(out.records.size());
      out.records.push_back(std::move(rec));
    }

  // Random 80/20 over all records.
  const std::size_t n = out.records.size();
  const std::size_t n_test = round_half_up(0.2 * static_cast<double>(n));
  if (n_test == 0 || n_test >= n)
    throw DomainError("too few humidity records to split");
  Rng split_rng = Rng(seed).derive("humidity-split");
  const std::vector<std::size_t> order = shuffled_indices(n, split_rng);
  std::vector<bool> in_test(n, false);
  for (std::size_t k = 0; k < n_test; ++k) in_test[order[k]] = true;
  std::vector<std::size_t> seen_train, seen_test;
  for (std::size_t i = 0; i < n; ++i)
    (in_test[i] ? seen_test : seen_train).push_back(i);
  out.seen = humidity_eval(out.records, seen_train, seen_test,
                           derived_seed(seed, "humidity-train-seen"));

  // Interpolation: fit the outer levels, score the ones in between.
  if (odd_levels.empty())
    throw DomainError("interpolation split needs at least two levels");
  out.interpolation =
      humidity_eval(out.records, even_levels, odd_levels,
                    derived_seed(seed, "humidity-train-interp"));
  return out;
}

}  // namespace granusense::harness
