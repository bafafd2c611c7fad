#include "granusense/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "granusense/errors.hpp"
#include "granusense/rng.hpp"

namespace granusense::sim {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGramToKg = 1e-3;
constexpr double kMmToM = 1e-3;

double moisture_saturation(double humidity_ml) {
  return std::min(humidity_ml / 0.5, 1.0);
}

geom::Vec2 grasp_point(const domain::ContainerSpec& c) {
  return {0.5 * c.inner_width_mm, c.grasp_height_mm};
}

// Content free-surface polygon centroid in the container frame. The surface
// angle is given relative to the container (beta - theta), which is what
// stays constant while the surface sticks.
geom::Vec2 content_centroid_cf(double surface_rel_deg, double area_mm2,
                               const domain::ContainerSpec& c) {
  auto cs = geom::content_cross_section(surface_rel_deg, area_mm2,
                                        c.inner_width_mm, c.inner_height_mm);
  return geom::polygon_centroid(cs.region);
}

// True when the solved free surface tops the lower rim corner of the open
// vessel, i.e. content would pour out while held at this attitude.
bool surface_tops_rim(double surface_rel_deg, double area_mm2,
                      const domain::ContainerSpec& c) {
  auto cs = geom::content_cross_section(surface_rel_deg, area_mm2,
                                        c.inner_width_mm, c.inner_height_mm);
  geom::Vec2 rim_a{0.0, c.inner_height_mm};
  geom::Vec2 rim_b{c.inner_width_mm, c.inner_height_mm};
  double rim = std::min(dot(cs.surface_normal, rim_a),
                        dot(cs.surface_normal, rim_b));
  double scale = c.inner_width_mm + c.inner_height_mm;
  return cs.surface_offset > rim + 1e-9 * scale;
}

void validate_attitude(double theta_deg, double beta_deg) {
  if (!std::isfinite(theta_deg)) throw DomainError("tilt angle must be finite");
  if (!(std::abs(beta_deg) < 90.0))
    throw DomainError("surface inclination must be within (-90, 90) degrees");
}

}  // namespace

AorParams aor_model(const domain::ParticleSpec& particle) {
  particle.validate();
  double wet = moisture_saturation(particle.humidity_ml);
  AorParams aor;
  aor.aor_upper_deg = 20.0 + 25.0 * (1.0 - particle.sphericity_psi) +
                      8.0 * std::exp(-particle.diameter_dp_mm / 5.0) +
                      12.0 * wet;
  aor.aor_lower_deg =
      aor.aor_upper_deg - (2.0 + 4.0 * (1.0 - particle.sphericity_psi));
  aor.sticky_fraction = 0.8 * wet;
  return aor;
}

SurfaceState advance_surface(const AorParams& aor, SurfaceState state,
                             double theta_from_deg, double theta_to_deg) {
  double up = aor.aor_upper_deg;
  double low = aor.aor_lower_deg;
  if (!(up > 0.0) || !(up < 90.0) || !(low > 0.0) || !(low < up))
    throw DomainError(
        "avalanche thresholds must satisfy 0 < lower < upper < 90");
  if (!std::isfinite(theta_from_deg) || !std::isfinite(theta_to_deg))
    throw DomainError("tilt angles must be finite");

  double remaining = theta_to_deg - theta_from_deg;
  if (remaining == 0.0) return state;
  // Mirror a downward sweep so only the +aor_upper threshold matters.
  double dir = remaining > 0.0 ? 1.0 : -1.0;
  double beta = dir * state.beta_deg;
  double run = dir * remaining;

  double to_first = up - beta;  // rotation that brings the surface to failure
  if (run < to_first) {
    state.beta_deg = dir * (beta + run);
    return state;
  }
  double step = up - low;
  int extra = static_cast<int>(std::floor((run - to_first) / step));
  double rest = run - to_first - extra * step;
  state.collapse_count += extra + 1;
  state.beta_deg = dir * (low + rest);
  return state;
}

ComOffset content_com(double theta_deg, double beta_deg,
                      const domain::ContentFill& fill,
                      const domain::ContainerSpec& container,
                      RimPolicy policy) {
  fill.validate(container);
  validate_attitude(theta_deg, beta_deg);
  double area = container.inner_width_mm * fill.fill_height_mm;
  double rel = beta_deg - theta_deg;
  if (policy == RimPolicy::open_top && surface_tops_rim(rel, area, container))
    throw SpillError("content tops the rim at tilt " +
                     std::to_string(theta_deg) + " deg");
  geom::Vec2 cf = content_centroid_cf(rel, area, container);
  geom::Vec2 world = geom::rotate_deg(cf - grasp_point(container), theta_deg);
  return {world.x * kMmToM, world.z * kMmToM};
}

double container_com_x_m(double theta_deg,
                         const domain::ContainerSpec& container) {
  container.validate();
  if (!std::isfinite(theta_deg)) throw DomainError("tilt angle must be finite");
  geom::Vec2 com{0.5 * container.inner_width_mm, 0.5 * container.inner_height_mm};
  geom::Vec2 world = geom::rotate_deg(com - grasp_point(container), theta_deg);
  return world.x * kMmToM;
}

double wrist_torque_nm(double theta_deg, double beta_deg,
                       const domain::ContentFill& fill,
                       const domain::ContainerSpec& container,
                       RimPolicy policy) {
  ComOffset content = content_com(theta_deg, beta_deg, fill, container, policy);
  double m_content = domain::content_mass_g(fill, container) * kGramToKg;
  double m_container = container.container_mass_g * kGramToKg;
  return container.gravity_m_s2 *
         (m_content * content.x_m +
          m_container * container_com_x_m(theta_deg, container));
}

double container_weight_n(const domain::ContainerSpec& container) {
  container.validate();
  return container.container_mass_g * kGramToKg * container.gravity_m_s2;
}

double lift_delta_fz_n(const domain::ContentFill& fill,
                       const domain::ContainerSpec& container,
                       double noise_sigma_n, std::uint64_t seed) {
  double mass_g =
      domain::content_mass_g(fill, container) + container.container_mass_g;
  if (!(noise_sigma_n >= 0.0)) throw DomainError("noise sigma must be >= 0");
  Rng rng(seed);
  return mass_g * kGramToKg * container.gravity_m_s2 +
         rng.gaussian(0.0, noise_sigma_n);
}

TiltHoldReadings tilt_hold_torques(const domain::ContentFill& fill,
                                   const domain::ContainerSpec& container,
                                   const AorParams& aor, double noise_sigma_nm,
                                   std::uint64_t seed) {
  if (!(noise_sigma_nm >= 0.0)) throw DomainError("noise sigma must be >= 0");
  Rng rng(seed);
  TiltHoldReadings out;
  std::size_t k = 0;
  for (double angle : kTiltAnglesDeg) {
    SurfaceState pre = advance_surface(aor, SurfaceState{}, 0.0, angle);
    out.torque_nm[k++] =
        wrist_torque_nm(angle, pre.beta_deg, fill, container,
                        RimPolicy::open_top) +
        rng.gaussian(0.0, noise_sigma_nm);
    out.torque_nm[k++] =
        wrist_torque_nm(angle, 0.0, fill, container, RimPolicy::open_top) +
        rng.gaussian(0.0, noise_sigma_nm);
  }
  return out;
}

TiltHoldReadings tilt_hold_torques(const domain::ContentFill& fill,
                                   const domain::ContainerSpec& container,
                                   double noise_sigma_nm, std::uint64_t seed) {
  return tilt_hold_torques(fill, container, aor_model(fill.particle),
                           noise_sigma_nm, seed);
}

SignalTrace stick_slip_trace(const domain::ContentFill& fill,
                             const domain::ContainerSpec& container,
                             const AorParams& aor, double theta_start_deg,
                             double theta_end_deg,
                             const SlowRotationConfig& config,
                             std::uint64_t seed, TraceDebug* debug) {
  fill.validate(container);
  if (!std::isfinite(theta_start_deg) || !std::isfinite(theta_end_deg) ||
      !(theta_end_deg > theta_start_deg))
    throw DomainError("rotation range must be finite with end > start");
  if (!(config.rate_deg_s > 0.0) || !(config.readout_hz > 0.0))
    throw DomainError("rotation rate and readout rate must be > 0");
  if (!(config.kappa > 0.0)) throw DomainError("sensor scale must be > 0");
  if (!(config.noise_sigma >= 0.0))
    throw DomainError("noise sigma must be >= 0");

  double span = theta_end_deg - theta_start_deg;
  auto steps = static_cast<long long>(
      std::llround(span / config.rate_deg_s * config.readout_hz));
  if (steps < 1) throw DomainError("rotation range shorter than one readout");

  // The robot brings the container from upright to the start angle first;
  // the surface obeys the same dynamics on the way (closed form, unsampled).
  // Collapses during the approach are not part of the emitted trace.
  SurfaceState state = advance_surface(aor, SurfaceState{}, 0.0, theta_start_deg);

  double mass_g = domain::content_mass_g(fill, container);
  double m_free = (1.0 - aor.sticky_fraction) * mass_g * kGramToKg;
  double m_sticky = aor.sticky_fraction * mass_g * kGramToKg;
  double m_container = container.container_mass_g * kGramToKg;
  double g = container.gravity_m_s2;
  double area = container.inner_width_mm * fill.fill_height_mm;
  geom::Vec2 grasp = grasp_point(container);
  geom::Vec2 container_com_cf =
      geom::Vec2{0.5 * container.inner_width_mm,
                 0.5 * container.inner_height_mm} -
      grasp;
  // Moist mass clings to the walls in its upright arrangement.
  geom::Vec2 sticky_cf = content_centroid_cf(0.0, area, container) - grasp;

  Rng rng(seed);
  SignalTrace trace;
  trace.sample_rate_hz = config.readout_hz;
  trace.samples.reserve(static_cast<std::size_t>(steps) + 1);
  if (debug) {
    debug->beta_deg.clear();
    debug->collapses.clear();
    debug->beta_deg.reserve(static_cast<std::size_t>(steps) + 1);
  }

  // Anchor of the current stick segment; beta - theta is constant along it.
  double theta_anchor = theta_start_deg;
  double beta_anchor = state.beta_deg;
  geom::Vec2 free_cf =
      content_centroid_cf(beta_anchor - theta_anchor, area, container) - grasp;

  for (long long i = 0; i <= steps; ++i) {
    double theta = theta_start_deg + span * static_cast<double>(i) /
                                         static_cast<double>(steps);
    double beta = beta_anchor + (theta - theta_anchor);
    if (i > 0 && std::abs(beta) >= aor.aor_upper_deg) {
      double sign = beta > 0.0 ? 1.0 : -1.0;
      if (debug)
        debug->collapses.push_back({static_cast<std::size_t>(i), theta,
                                    sign * aor.aor_upper_deg,
                                    sign * aor.aor_lower_deg});
      beta = sign * aor.aor_lower_deg;
      theta_anchor = theta;
      beta_anchor = beta;
      free_cf = content_centroid_cf(beta - theta, area, container) - grasp;
    }

    double x_free = geom::rotate_deg(free_cf, theta).x * kMmToM;
    double x_sticky = geom::rotate_deg(sticky_cf, theta).x * kMmToM;
    double x_container = geom::rotate_deg(container_com_cf, theta).x * kMmToM;
    double torque =
        g * (m_free * x_free + m_sticky * x_sticky + m_container * x_container);
    double value =
        config.kappa * torque + rng.gaussian(0.0, config.noise_sigma);
    trace.samples.push_back({theta, value});
    if (debug) debug->beta_deg.push_back(beta);
  }
  return trace;
}

SignalTrace stick_slip_trace(const domain::ContentFill& fill,
                             const domain::ContainerSpec& container,
                             double theta_start_deg, double theta_end_deg,
                             const SlowRotationConfig& config,
                             std::uint64_t seed, TraceDebug* debug) {
  return stick_slip_trace(fill, container, aor_model(fill.particle),
                          theta_start_deg, theta_end_deg, config, seed, debug);
}

std::vector<geom::Vec2> marker_layout(const VibrationConfig& config) {
  if (config.marker_count <= 0 || config.grid_cols <= 0 ||
      config.marker_count % config.grid_cols != 0)
    throw DomainError("marker count must fill a rectangular grid");
  int rows = config.marker_count / config.grid_cols;
  std::vector<geom::Vec2> pts;
  pts.reserve(config.marker_count);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < config.grid_cols; ++c) {
      pts.push_back({(c - 0.5 * (config.grid_cols - 1)) * config.marker_spacing_mm,
                     (r - 0.5 * (rows - 1)) * config.marker_spacing_mm});
    }
  }
  return pts;
}

std::vector<int> contact_marker_indices(const VibrationConfig& config) {
  if (config.contact_marker_count < 0 ||
      config.contact_marker_count > config.marker_count)
    throw DomainError("contact marker count out of range");
  auto pts = marker_layout(config);
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    double ra = dot(pts[a], pts[a]);
    double rb = dot(pts[b], pts[b]);
    if (ra != rb) return ra < rb;
    return a < b;
  });
  order.resize(config.contact_marker_count);
  std::sort(order.begin(), order.end());
  return order;
}

MarkerField vibration_markerfield(const domain::ContentFill& fill,
                                  const domain::ContainerSpec& container,
                                  std::uint64_t seed,
                                  const VibrationConfig& config) {
  fill.validate(container);
  if (!(config.window_s > 0.0) || !(config.sample_rate_hz > 0.0))
    throw DomainError("window and sample rate must be > 0");
  if (!(config.resonance_hz > 0.0) || !(config.decay_ms > 0.0))
    throw DomainError("gel response parameters must be > 0");
  if (!(config.event_cap >= 0.0)) throw DomainError("event cap must be >= 0");
  if (!(config.marker_noise_sigma_mm >= 0.0))
    throw DomainError("marker noise sigma must be >= 0");

  auto frames = static_cast<std::size_t>(
      std::llround(config.window_s * config.sample_rate_hz));
  auto contact = contact_marker_indices(config);
  auto layout = marker_layout(config);

  std::vector<double> weight(contact.size());
  for (std::size_t j = 0; j < contact.size(); ++j) {
    double r2 = dot(layout[contact[j]], layout[contact[j]]);
    weight[j] =
        std::exp(-r2 / (2.0 * config.falloff_sigma_mm * config.falloff_sigma_mm));
  }

  MarkerField field;
  field.marker_count = config.marker_count;
  field.sample_rate_hz = config.sample_rate_hz;
  field.dx_mm.assign(frames * config.marker_count, 0.0);
  field.dz_mm.assign(frames * config.marker_count, 0.0);

  double single_mass_g = domain::single_particle_mass_g(fill.particle);
  double count = domain::particle_count(fill, container);
  double rate = std::min(count, config.event_cap);

  Rng rng(seed);
  int events = rng.poisson(rate);
  double tau_s = config.decay_ms * 1e-3;
  double omega = 2.0 * kPi * config.resonance_hz;
  double dt = 1.0 / config.sample_rate_hz;
  double ring_s = 6.0 * tau_s;  // past this the response is below 0.3%

  for (int e = 0; e < events; ++e) {
    double t0 = rng.uniform(0.0, config.window_s);
    double speed = config.base_impact_speed_mps * rng.uniform(0.5, 1.5);
    double direction = rng.uniform(0.0, 2.0 * kPi);
    double amp = config.impulse_gain_mm_per_g_mps * single_mass_g * speed;
    double ux = std::cos(direction);
    double uz = std::sin(direction);

    auto first = static_cast<std::size_t>(std::max(0.0, std::ceil(t0 / dt)));
    auto last = static_cast<std::size_t>(
        std::min<double>(static_cast<double>(frames) - 1.0,
                         std::floor((t0 + ring_s) / dt)));
    for (std::size_t f = first; f <= last && f < frames; ++f) {
      double t = f * dt - t0;
      double h = amp * std::exp(-t / tau_s) * std::sin(omega * t);
      std::size_t base = f * config.marker_count;
      for (std::size_t j = 0; j < contact.size(); ++j) {
        field.dx_mm[base + contact[j]] += weight[j] * h * ux;
        field.dz_mm[base + contact[j]] += weight[j] * h * uz;
      }
    }
  }

  if (config.marker_noise_sigma_mm > 0.0) {
    for (std::size_t i = 0; i < field.dx_mm.size(); ++i) {
      field.dx_mm[i] += rng.gaussian(0.0, config.marker_noise_sigma_mm);
      field.dz_mm[i] += rng.gaussian(0.0, config.marker_noise_sigma_mm);
    }
  }
  return field;
}

}  // namespace granusense::sim
