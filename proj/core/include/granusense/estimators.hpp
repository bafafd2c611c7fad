#pragma once

#include <array>

#include "granusense/domain.hpp"
#include "granusense/features.hpp"
#include "granusense/forest.hpp"
#include "granusense/mlp.hpp"
#include "granusense/sim.hpp"

namespace granusense::estimators {

// Content mass from the lift-phase vertical force step:
// delta_fz / g minus the container mass. Throws NegativeMassError when the
// readings imply strictly negative content.
double estimate_mass_g(double delta_fz_n, double container_mass_g,
                       double gravity_m_s2);
double estimate_mass_g(double delta_fz_n, const domain::ContainerSpec& container);

struct HeightEstimate {
  double height_mm = 0.0;
  bool clamped = false;  // raw network output fell outside the container
};

// Fill height from the six tilt-and-hold torque readings plus the mass
// estimate; the result is clamped to the container's interior.
HeightEstimate estimate_height(const mlp::Model& model,
                               const sim::TiltHoldReadings& readings,
                               double est_mass_g,
                               const domain::ContainerSpec& container);

struct SizeShapeEstimate {
  double diameter_mm = 0.0;
  domain::ShapeClass shape_class = domain::ShapeClass::powder;
};

// Particle size and shape class from the full feature vector. Diameters
// are floored at a small positive value.
SizeShapeEstimate estimate_size_shape(const mlp::Model& size_model,
                                      const forest::Model& shape_model,
                                      const features::FeatureVector& fv);

// Added water volume from slow-rotation envelope features; floored at 0.
double estimate_humidity_ml(const mlp::Model& model,
                            const features::EnvelopePair& envelopes);

struct PropertyEstimate {
  double content_mass_g = 0.0;
  double fill_height_mm = 0.0;
  double fill_volume_ml = 0.0;  // always fill_height * cross-section
  bool height_clamped = false;
  double particle_diameter_mm = 0.0;
  domain::ShapeClass shape_class = domain::ShapeClass::powder;
};

struct EstimatorBundle {
  mlp::Model height;
  mlp::Model size;
  forest::Model shape;
};

// Full perception pass over one interaction's readings.
PropertyEstimate estimate_properties(
    const EstimatorBundle& models, double delta_fz_n,
    const sim::TiltHoldReadings& readings,
    const std::array<double, features::kVibFeatureDim>& vib,
    const features::EnvelopePair& topple, const domain::ContainerSpec& container);

}  // namespace granusense::estimators
