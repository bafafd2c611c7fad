#include "granusense/domain.hpp"

#include <cmath>
#include <numbers>

#include "granusense/errors.hpp"

namespace granusense::domain {
namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void ParticleSpec::validate() const {
  require(finite_positive(diameter_dp_mm), "particle diameter must be > 0");
  require(std::isfinite(sphericity_psi) && sphericity_psi > 0.0 &&
              sphericity_psi <= 1.0,
          "sphericity must be in (0, 1]");
  require(finite_positive(material_density_g_mm3),
          "material density must be > 0");
  require(std::isfinite(packing_fraction) && packing_fraction > 0.0 &&
              packing_fraction <= 1.0,
          "packing fraction must be in (0, 1]");
  require(std::isfinite(humidity_ml) && humidity_ml >= 0.0,
          "humidity must be >= 0");
}

void ContainerSpec::validate() const {
  require(finite_positive(inner_width_mm), "container width must be > 0");
  require(finite_positive(inner_depth_mm), "container depth must be > 0");
  require(finite_positive(inner_height_mm), "container height must be > 0");
  require(finite_positive(container_mass_g), "container mass must be > 0");
  require(std::isfinite(grasp_height_mm) && grasp_height_mm > 0.0 &&
              grasp_height_mm <= inner_height_mm,
          "grasp height must be in (0, inner_height]");
  require(finite_positive(gravity_m_s2), "gravity must be > 0");
}

void ContentFill::validate(const ContainerSpec& container) const {
  particle.validate();
  container.validate();
  require(std::isfinite(fill_height_mm) && fill_height_mm > 0.0,
          "fill height must be > 0");
  require(fill_height_mm < container.inner_height_mm,
          "fill height must be below the container rim");
}

ShapeClass shape_class_from_int(int value) {
  require(value >= 0 && value < kShapeClassCount,
          "shape class index out of range");
  return static_cast<ShapeClass>(value);
}

double equivalent_diameter_mm(double particle_volume_mm3) {
  require(finite_positive(particle_volume_mm3),
          "particle volume must be > 0");
  return std::cbrt(6.0 * particle_volume_mm3 / kPi);
}

double sphericity(double particle_volume_mm3, double surface_area_mm2) {
  require(finite_positive(particle_volume_mm3),
          "particle volume must be > 0");
  require(finite_positive(surface_area_mm2), "surface area must be > 0");
  return std::cbrt(kPi) * std::pow(6.0 * particle_volume_mm3, 2.0 / 3.0) /
         surface_area_mm2;
}

ShapeClass shape_class(double diameter_dp_mm, double sphericity_psi) {
  require(finite_positive(diameter_dp_mm), "diameter must be > 0");
  require(std::isfinite(sphericity_psi) && sphericity_psi > 0.0 &&
              sphericity_psi <= 1.0,
          "sphericity must be in (0, 1]");
  if (diameter_dp_mm <= 1.0) return ShapeClass::powder;
  if (sphericity_psi <= 0.7) return ShapeClass::irregular;
  if (sphericity_psi <= 0.9) return ShapeClass::rounded;
  if (sphericity_psi <= 0.96) return ShapeClass::near_spherical;
  return ShapeClass::spherical;
}

double content_mass_g(const ContentFill& fill, const ContainerSpec& container) {
  fill.validate(container);
  const ParticleSpec& p = fill.particle;
  return p.material_density_g_mm3 * p.packing_fraction *
         container.cross_section_mm2() * fill.fill_height_mm;
}

double particle_volume_mm3(double diameter_dp_mm) {
  require(finite_positive(diameter_dp_mm), "diameter must be > 0");
  return kPi / 6.0 * diameter_dp_mm * diameter_dp_mm * diameter_dp_mm;
}

double single_particle_mass_g(const ParticleSpec& particle) {
  particle.validate();
  return particle.material_density_g_mm3 *
         particle_volume_mm3(particle.diameter_dp_mm);
}

double particle_count(const ContentFill& fill, const ContainerSpec& container) {
  return content_mass_g(fill, container) /
         single_particle_mass_g(fill.particle);
}

}  // namespace granusense::domain
