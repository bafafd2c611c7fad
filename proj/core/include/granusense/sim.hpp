#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "granusense/domain.hpp"
#include "granusense/geometry.hpp"

namespace granusense::sim {

// ---------------------------------------------------------------------------
// Conventions
//
// The container rotates in the x-z plane about the fixed grasp point. theta
// is the container tilt and beta the world inclination of the content's free
// surface, both in degrees, both zero when level. Torques are about the
// y-axis through the grasp point; with gravity -z, a mass at horizontal
// world offset x contributes m*g*x. Internally SI units (kg, m, N, N*m);
// the domain types stay in mm/g.
//
// Procedures that hold the container near upright (lift, tilt-and-shake)
// treat the vessel as open-topped and refuse fills that would pour over the
// rim. The rotation sweeps (slow and fast) model a capped vessel, which is
// what lets them run past horizontal without losing content.
// ---------------------------------------------------------------------------

// Stick-slip avalanche thresholds of a content type. The surface rides with
// the container until it steepens to aor_upper, then collapses back to
// aor_lower. sticky_fraction of the content mass adheres to the walls and
// sits out collapses entirely.
struct AorParams {
  double aor_upper_deg = 0.0;
  double aor_lower_deg = 0.0;
  double sticky_fraction = 0.0;
};

// Empirical angle-of-repose model: less spherical, smaller, and wetter
// content piles steeper; moisture also makes a fraction of it cling to the
// walls. Saturates at 0.5 ml of added moisture.
AorParams aor_model(const domain::ParticleSpec& particle);

// Free-surface state while the container rotates.
struct SurfaceState {
  double beta_deg = 0.0;    // world inclination of the free surface
  int collapse_count = 0;
};

// Evolve the surface while the container turns from theta_from to theta_to
// (either direction). The surface is container-fixed between collapses, so
// beta changes one-for-one with theta; whenever |beta| reaches
// aor_upper it snaps back to sign(beta) * aor_lower and the collapse is
// counted. Closed form; no time discretization.
SurfaceState advance_surface(const AorParams& aor, SurfaceState state,
                             double theta_from_deg, double theta_to_deg);

enum class RimPolicy {
  open_top,  // throw SpillError if the surface would top the lower rim corner
  capped,    // sealed vessel; content is retained at any tilt
};

// Content centre of mass in the world frame, metres, relative to the grasp
// point. Throws SpillError per the rim policy.
struct ComOffset {
  double x_m = 0.0;
  double z_m = 0.0;
};

ComOffset content_com(double theta_deg, double beta_deg,
                      const domain::ContentFill& fill,
                      const domain::ContainerSpec& container,
                      RimPolicy policy = RimPolicy::open_top);

// Horizontal world offset of the empty container's centre of mass, metres.
double container_com_x_m(double theta_deg,
                         const domain::ContainerSpec& container);

// Gravity torque of container plus content about the grasp point, N*m.
double wrist_torque_nm(double theta_deg, double beta_deg,
                       const domain::ContentFill& fill,
                       const domain::ContainerSpec& container,
                       RimPolicy policy = RimPolicy::open_top);

// Weight of the empty container, N.
double container_weight_n(const domain::ContainerSpec& container);

// Vertical wrist force step when the filled container is lifted clear of
// the table: weight of container plus content, with sensor noise.
double lift_delta_fz_n(const domain::ContentFill& fill,
                       const domain::ContainerSpec& container,
                       double noise_sigma_n, std::uint64_t seed);

// --- Tilt-and-shake procedure ----------------------------------------------

inline constexpr std::array<double, 3> kTiltAnglesDeg = {30.0, 45.0, 60.0};

// Six wrist torques: for each hold angle one reading before shaking (the
// surface as the rotation from upright left it) and one after (surface
// shaken level). Evolution restarts from upright for every angle; the
// procedure returns the container between holds.
struct TiltHoldReadings {
  std::array<double, 6> torque_nm{};  // 30pre,30post,45pre,45post,60pre,60post
};

TiltHoldReadings tilt_hold_torques(const domain::ContentFill& fill,
                                   const domain::ContainerSpec& container,
                                   double noise_sigma_nm, std::uint64_t seed);

// Test seam: identical procedure with explicit avalanche thresholds.
TiltHoldReadings tilt_hold_torques(const domain::ContentFill& fill,
                                   const domain::ContainerSpec& container,
                                   const AorParams& aor, double noise_sigma_nm,
                                   std::uint64_t seed);

// --- Slow-rotation procedure ------------------------------------------------

struct TraceSample {
  double theta_deg = 0.0;
  double value = 0.0;  // sensor units
};

// Uniformly sampled scalar signal against tilt angle.
struct SignalTrace {
  std::vector<TraceSample> samples;
  double sample_rate_hz = 0.0;
};

struct CollapseEvent {
  std::size_t sample_index = 0;  // first sample emitted post-collapse
  double theta_deg = 0.0;
  double beta_before_deg = 0.0;
  double beta_after_deg = 0.0;
};

// Optional introspection channel for tests.
struct TraceDebug {
  std::vector<double> beta_deg;  // per emitted sample
  std::vector<CollapseEvent> collapses;
};

struct SlowRotationConfig {
  double rate_deg_s = 5.0;
  double readout_hz = 100.0;
  // Torque-to-sensor-unit scale of the marker-pattern torque estimate. Sized
  // so the smallest catalog avalanche steps clear the noise floor by an
  // order of magnitude.
  double kappa = 500.0;
  double noise_sigma = 0.002;  // sensor units, additive per sample
};

// Rotate from theta_start to theta_end at a constant rate and emit the
// grasp torque in sensor units at the readout rate (N+1 samples for N
// steps, endpoints included). The trace starts from an upright shaken
// state: the approach move from upright to theta_start applies the same
// surface dynamics silently. The vessel is capped. Collapses of the free
// surface produce the step pattern; the sticky mass fraction stays
// container-fixed at its upright position and damps the steps.
SignalTrace stick_slip_trace(const domain::ContentFill& fill,
                             const domain::ContainerSpec& container,
                             double theta_start_deg, double theta_end_deg,
                             const SlowRotationConfig& config,
                             std::uint64_t seed, TraceDebug* debug = nullptr);

// Test seam with explicit avalanche thresholds.
SignalTrace stick_slip_trace(const domain::ContentFill& fill,
                             const domain::ContainerSpec& container,
                             const AorParams& aor, double theta_start_deg,
                             double theta_end_deg,
                             const SlowRotationConfig& config,
                             std::uint64_t seed, TraceDebug* debug = nullptr);

// --- Fast-rotation (collision) procedure -------------------------------------

// Marker displacement field of a tactile gel pad, frame-major storage.
struct MarkerField {
  int marker_count = 0;
  double sample_rate_hz = 0.0;
  std::vector<double> dx_mm;  // [frame * marker_count + marker]
  std::vector<double> dz_mm;

  std::size_t frame_count() const {
    return marker_count == 0 ? 0 : dx_mm.size() / marker_count;
  }
};

struct VibrationConfig {
  double window_s = 4.0;          // collision window of the fast rotation
  double sample_rate_hz = 800.0;
  int marker_count = 70;          // 10 x 7 grid
  int grid_cols = 10;
  double marker_spacing_mm = 1.7;
  int contact_marker_count = 30;  // markers under the finger contact patch
  double falloff_sigma_mm = 3.5;  // spatial impulse falloff across the patch
  double resonance_hz = 150.0;    // gel ringing frequency
  double decay_ms = 25.0;         // ringing decay constant
  double event_cap = 500.0;       // Poisson rate cap on collision count
  double impulse_gain_mm_per_g_mps = 50.0;
  double base_impact_speed_mps = 0.2;
  double marker_noise_sigma_mm = 0.001;
};

// Particle-collision response of the gel during the fast rotation's
// collision window. Collision events arrive as a Poisson process with
// expected count min(particle_count, event_cap); each event rings the
// contact markers with a decaying sinusoid whose amplitude scales with
// single-particle mass times impact speed. Off-contact markers carry only
// sensor noise. Bit-identical for a fixed (fill, container, seed, config).
MarkerField vibration_markerfield(const domain::ContentFill& fill,
                                  const domain::ContainerSpec& container,
                                  std::uint64_t seed,
                                  const VibrationConfig& config = {});

// Rest positions of the marker grid, centred on the contact patch.
std::vector<geom::Vec2> marker_layout(const VibrationConfig& config);

// Indices of the contact markers (nearest the patch centre), ascending.
std::vector<int> contact_marker_indices(const VibrationConfig& config);

}  // namespace granusense::sim
