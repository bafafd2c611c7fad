#include "granusense/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "granusense/errors.hpp"

namespace granusense::estimators {

namespace {

constexpr double kMinDiameterMm = 0.01;
constexpr double kHeightClampEpsilonMm = 0.1;

Eigen::VectorXd to_eigen(const features::FeatureVector& fv) {
  return Eigen::Map<const Eigen::VectorXd>(fv.values.data(),
                                           features::kFeatureDim);
}

}  // namespace

double estimate_mass_g(double delta_fz_n, double container_mass_g,
                       double gravity_m_s2) {
  if (!std::isfinite(delta_fz_n))
    throw DomainError("force reading must be finite");
  if (!(gravity_m_s2 > 0.0) || !std::isfinite(gravity_m_s2))
    throw DomainError("gravity must be positive");
  if (!(container_mass_g >= 0.0) || !std::isfinite(container_mass_g))
    throw DomainError("container mass must be non-negative");
  const double total_g = delta_fz_n * 1000.0 / gravity_m_s2;
  const double mass_g = total_g - container_mass_g;
  if (mass_g < 0.0)
    throw NegativeMassError("lift force implies negative content mass: " +
                            std::to_string(mass_g) + " g");
  return mass_g;
}

double estimate_mass_g(double delta_fz_n, const domain::ContainerSpec& container) {
  container.validate();
  return estimate_mass_g(delta_fz_n, container.container_mass_g,
                         container.gravity_m_s2);
}

HeightEstimate estimate_height(const mlp::Model& model,
                               const sim::TiltHoldReadings& readings,
                               double est_mass_g,
                               const domain::ContainerSpec& container) {
  container.validate();
  if (!std::isfinite(est_mass_g) || est_mass_g < 0.0)
    throw DomainError("mass estimate must be finite and non-negative");
  Eigen::VectorXd in(7);
  for (int i = 0; i < 6; ++i)
    in(i) = readings.torque_nm[static_cast<size_t>(i)];
  in(6) = est_mass_g;

  HeightEstimate out;
  const double raw = model.predict(in);
  const double lo = kHeightClampEpsilonMm;
  const double hi = container.inner_height_mm - kHeightClampEpsilonMm;
  out.height_mm = std::clamp(raw, lo, hi);
  out.clamped = raw < lo || raw > hi;
  return out;
}

SizeShapeEstimate estimate_size_shape(const mlp::Model& size_model,
                                      const forest::Model& shape_model,
                                      const features::FeatureVector& fv) {
  const Eigen::VectorXd in = to_eigen(fv);
  SizeShapeEstimate out;
  out.diameter_mm = std::max(size_model.predict(in), kMinDiameterMm);
  out.shape_class = domain::shape_class_from_int(shape_model.predict(in));
  return out;
}

double estimate_humidity_ml(const mlp::Model& model,
                            const features::EnvelopePair& envelopes) {
  if (envelopes.lower.size() != features::kEnvelopePoints ||
      envelopes.upper.size() != features::kEnvelopePoints)
    throw DomainError("envelope grids must have " +
                      std::to_string(features::kEnvelopePoints) + " points");
  Eigen::VectorXd in(features::kToppleFeatureDim);
  for (int i = 0; i < features::kEnvelopePoints; ++i) {
    in(i) = envelopes.lower[static_cast<size_t>(i)];
    in(features::kEnvelopePoints + i) =
        envelopes.upper[static_cast<size_t>(i)];
  }
  return std::max(model.predict(in), 0.0);
}

PropertyEstimate estimate_properties(
    const EstimatorBundle& models, double delta_fz_n,
    const sim::TiltHoldReadings& readings,
    const std::array<double, features::kVibFeatureDim>& vib,
    const features::EnvelopePair& topple, const domain::ContainerSpec& container) {
  PropertyEstimate out;
  out.content_mass_g = estimate_mass_g(delta_fz_n, container);

  const HeightEstimate h =
      estimate_height(models.height, readings, out.content_mass_g, container);
  out.fill_height_mm = h.height_mm;
  out.height_clamped = h.clamped;
  out.fill_volume_ml =
      out.fill_height_mm * container.cross_section_mm2() / 1000.0;

  const features::FeatureVector fv = features::assemble_features(
      vib, topple, out.content_mass_g, out.fill_height_mm);
  const SizeShapeEstimate ss =
      estimate_size_shape(models.size, models.shape, fv);
  out.particle_diameter_mm = ss.diameter_mm;
  out.shape_class = ss.shape_class;
  return out;
}

}  // namespace granusense::estimators
