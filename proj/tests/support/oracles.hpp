#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <granusense/domain.hpp>
#include <granusense/geometry.hpp>
#include <granusense/mlp.hpp>
#include <granusense/sim.hpp>

// Independent reference implementations the tests check the library against.
// Everything here favours obviousness over speed: plain loops, brute-force
// sums, sampling-based integration. None of it shares code with the
// implementations under test beyond the public domain types.
namespace granusense::oracles {

// Lagged total-variation features computed exactly as defined, one lag at a
// time, summing in ascending sample order:
//   v1_a = sum_t |s(t) - s(t-a)|, v2_a = sum_t |2 s(t) - s(t-a) - s(t+a)|
// packed [v1_1..v1_50, v2_1..v2_50]. Lags the signal cannot cover give 0.
std::array<double, 100> brute_force_lag_features(const std::vector<double>& s);

// Centre of mass of the filled region by stratified Monte-Carlo sampling.
// Points are jittered on a near-square grid over the full inner rectangle in
// the container frame; the free-surface offset is the empirical quantile of
// the half-plane coordinate at the filled area fraction, so exactly that
// fraction of the sample lies below the surface. The mean of the submerged
// points is then mapped to grasp-relative world coordinates in metres, the
// same frame content_com reports in. Models a capped vessel (no spill).
geom::Vec2 mc_content_com_m(double theta_deg, double beta_deg,
                            const domain::ContentFill& fill,
                            const domain::ContainerSpec& container,
                            std::size_t samples, std::uint64_t seed);

// Collapse bookkeeping for one monotone sweep, stepped threshold by
// threshold instead of in closed form. The surface is container-fixed
// between collapses; when |beta| reaches aor_upper it snaps back to
// sign(beta) * aor_lower.
struct SweepOutcome {
  long collapses = 0;
  double beta_deg = 0.0;
};

SweepOutcome sweep_collapses(const sim::AorParams& aor, double beta0_deg,
                             double from_deg, double to_deg);

// Linear interpolation of a trace onto `points` uniformly spaced angles,
// endpoints included. Same resampling rule the envelope extractor uses, so
// sandwich checks can be stated on its grid.
std::vector<double> resample_linear(const sim::SignalTrace& trace,
                                    std::size_t points);

// Compares analytic MLP gradients against central finite differences at
// `points` random weight/data configurations. Configurations that put any
// hidden pre-activation within `kink_margin` of the ReLU kink are redrawn,
// since the loss is not differentiable there. Returns the worst relative
// error seen, with near-zero gradient pairs compared absolutely.
struct GradCheckResult {
  double max_rel_error = 0.0;
  int points_checked = 0;
  int redraws = 0;
};

GradCheckResult finite_difference_gradcheck(const std::vector<int>& arch,
                                            int points, std::uint64_t seed,
                                            double epsilon = 1e-5,
                                            double kink_margin = 1e-3);

// Fresh empty directory under the system temp root; unique per call.
std::string scratch_dir(const std::string& label);

// Whole file as a string; throws on open failure.
std::string slurp_file(const std::string& path);

}  // namespace granusense::oracles
