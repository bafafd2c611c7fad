#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "granusense/sim.hpp"

namespace granusense::features {

inline constexpr int kVibFeatureDim = 100;   // 50 v1 lags + 50 v2 lags
inline constexpr int kEnvelopePoints = 100;  // per envelope
inline constexpr int kToppleFeatureDim = 2 * kEnvelopePoints;
inline constexpr int kFeatureDim = kVibFeatureDim + kToppleFeatureDim + 2;
inline constexpr int kMaxLag = 50;

// Scalar vibration magnitude signal distilled from a marker field.
struct VibrationSignal {
  std::vector<double> values;
  double sample_rate_hz = 0.0;
};

// Average displacement magnitude of the top_k markers ranked by total path
// length over the window. Ties rank lower marker indices first.
VibrationSignal principal_vibration_signal(const sim::MarkerField& field,
                                           int top_k = 30);

enum class LagPolicy {
  strict,    // signal must cover all lags (length >= 2*kMaxLag + 1)
  truncate,  // short signals sum what is available; vacant lags give 0
};

// Lagged total-variation features: for each lag a in 1..50,
//   v1_a = sum_t |s(t) - s(t-a)|
//   v2_a = sum_t |2 s(t) - s(t-a) - s(t+a)|
// packed as [v1_1..v1_50, v2_1..v2_50]. v1 reacts to signal intensity,
// v2 to curvature at the lag scale.
std::array<double, kVibFeatureDim> vib_features(
    const VibrationSignal& signal, LagPolicy policy = LagPolicy::strict);

// Lower/upper envelopes of a stepped trace, resampled on a uniform angle
// grid spanning the trace (endpoints included).
struct EnvelopePair {
  std::vector<double> lower;  // kEnvelopePoints values
  std::vector<double> upper;
  double theta_start_deg = 0.0;
  double theta_end_deg = 0.0;
};

// Collapse events are negative jumps between consecutive samples larger
// than jump_threshold. Away from events both envelopes follow the trace.
// Across each event the upper envelope holds the pre-collapse level until
// the trace climbs back to it; the lower envelope carries the post-collapse
// level backwards to where the trace last sat that low. Held levels average
// a few samples on the stable side of the event so readout noise does not
// leak into the plateau.
EnvelopePair envelopes(const sim::SignalTrace& trace, double jump_threshold,
                       int points = kEnvelopePoints);

// Full feature vector consumed by the size/shape estimators:
// [0,100)   vibration features
// [100,200) lower envelope
// [200,300) upper envelope
// [300]     estimated content mass (g)
// [301]     estimated fill height (mm)
struct FeatureVector {
  std::array<double, kFeatureDim> values{};

  double& est_mass_g() { return values[kFeatureDim - 2]; }
  double est_mass_g() const { return values[kFeatureDim - 2]; }
  double& est_height_mm() { return values[kFeatureDim - 1]; }
  double est_height_mm() const { return values[kFeatureDim - 1]; }
};

FeatureVector assemble_features(const std::array<double, kVibFeatureDim>& vib,
                                const EnvelopePair& topple, double est_mass_g,
                                double est_height_mm);

// Rate decimation: keep every floor(source/target)-th frame starting at the
// first; the effective rate of the result is source/step. target must not
// exceed the source rate.
sim::MarkerField downsample(const sim::MarkerField& field,
                            double target_rate_hz);
VibrationSignal downsample(const VibrationSignal& signal,
                           double target_rate_hz);

}  // namespace granusense::features
