#pragma once

#include <string>

namespace granusense::domain {

// Granular content type. Geometry is summarized by two scalars: the
// volume-equivalent sphere diameter of one particle and its sphericity
// (surface area of that sphere over the particle's actual surface area).
// Lengths are mm, masses g, densities g/mm^3, moisture ml.
struct ParticleSpec {
  std::string name;
  double diameter_dp_mm = 0.0;        // volume-equivalent diameter
  double sphericity_psi = 0.0;        // in (0, 1]
  double material_density_g_mm3 = 0.0;
  double packing_fraction = 0.6;      // bulk = material * packing
  double humidity_ml = 0.0;           // added moisture, >= 0

  void validate() const;  // throws DomainError
};

// Open-top cuboid vessel, gripped on its front/back faces so the grasp
// point projects onto the tilt plane at half width, grasp_height above the
// inner base. gravity is m/s^2.
struct ContainerSpec {
  double inner_width_mm = 60.0;   // along the tilt plane
  double inner_depth_mm = 60.0;   // out of the tilt plane
  double inner_height_mm = 120.0;
  double container_mass_g = 50.0;
  double grasp_height_mm = 90.0;
  double gravity_m_s2 = 9.81;

  double cross_section_mm2() const { return inner_width_mm * inner_depth_mm; }
  void validate() const;  // throws DomainError
};

// A particle type poured into a container up to a settled fill height.
struct ContentFill {
  ParticleSpec particle;
  double fill_height_mm = 0.0;  // in (0, inner_height)

  void validate(const ContainerSpec& container) const;
};

// Coarse shape label: band 0 is fine powder by size, bands 1-4 partition
// the sphericity axis from irregular to spherical.
enum class ShapeClass : int {
  powder = 0,
  irregular = 1,
  rounded = 2,
  near_spherical = 3,
  spherical = 4,
};

inline constexpr int kShapeClassCount = 5;

ShapeClass shape_class_from_int(int value);  // throws DomainError

// Diameter of the sphere with the given volume. V must be positive.
double equivalent_diameter_mm(double particle_volume_mm3);

// pi^(1/3) * (6V)^(2/3) / A: surface area of the volume-equivalent sphere
// over the particle's own surface area. 1 for a sphere, < 1 otherwise.
double sphericity(double particle_volume_mm3, double surface_area_mm2);

// Classification rule over (diameter, sphericity). Total on the valid
// input range: diameter > 0 and sphericity in (0, 1].
ShapeClass shape_class(double diameter_dp_mm, double sphericity_psi);

// Settled content mass: bulk density times fill volume. The fill must fit
// inside the container.
double content_mass_g(const ContentFill& fill, const ContainerSpec& container);

// Volume of one particle modeled as its volume-equivalent sphere.
double particle_volume_mm3(double diameter_dp_mm);

// Mass of one particle at material density.
double single_particle_mass_g(const ParticleSpec& particle);

// Settled particle count for a fill; bulk mass over single-particle mass.
double particle_count(const ContentFill& fill, const ContainerSpec& container);

}  // namespace granusense::domain
