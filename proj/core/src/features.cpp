#include "granusense/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "granusense/errors.hpp"

namespace granusense::features {

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

VibrationSignal principal_vibration_signal(const sim::MarkerField& field,
                                           int top_k) {
  const int m = field.marker_count;
  const long frames = field.frame_count();
  if (m <= 0 || frames <= 0) throw DomainError("marker field is empty");
  if (top_k <= 0 || top_k > m)
    throw DomainError("top_k must lie in [1, marker_count]");
  if (!all_finite(field.dx_mm) || !all_finite(field.dz_mm))
    throw DomainError("marker field contains non-finite displacements");

  std::vector<double> path(static_cast<size_t>(m), 0.0);
  for (long f = 1; f < frames; ++f) {
    const size_t at = static_cast<size_t>(f) * m;
    const size_t prev = at - m;
    for (int k = 0; k < m; ++k) {
      path[static_cast<size_t>(k)] +=
          std::hypot(field.dx_mm[at + k] - field.dx_mm[prev + k],
                     field.dz_mm[at + k] - field.dz_mm[prev + k]);
    }
  }

  std::vector<int> order(static_cast<size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return path[static_cast<size_t>(a)] > path[static_cast<size_t>(b)];
  });
  order.resize(static_cast<size_t>(top_k));

  VibrationSignal out;
  out.sample_rate_hz = field.sample_rate_hz;
  out.values.resize(static_cast<size_t>(frames));
  for (long f = 0; f < frames; ++f) {
    const size_t at = static_cast<size_t>(f) * m;
    double sum = 0.0;
    for (int k : order)
      sum += std::hypot(field.dx_mm[at + k], field.dz_mm[at + k]);
    out.values[static_cast<size_t>(f)] = sum / top_k;
  }
  return out;
}

std::array<double, kVibFeatureDim> vib_features(const VibrationSignal& signal,
                                                LagPolicy policy) {
  const auto& s = signal.values;
  const long t = static_cast<long>(s.size());
  if (t == 0) throw DomainError("vibration signal is empty");
  if (!all_finite(s))
    throw DomainError("vibration signal contains non-finite values");
  if (policy == LagPolicy::strict && t < 2 * kMaxLag + 1)
    throw DomainError("signal too short for lag features; need at least " +
                      std::to_string(2 * kMaxLag + 1) + " samples, got " +
                      std::to_string(t));

  std::array<double, kVibFeatureDim> out{};
  for (int a = 1; a <= kMaxLag; ++a) {
    double v1 = 0.0;
    for (long i = a; i < t; ++i)
      v1 += std::abs(s[static_cast<size_t>(i)] - s[static_cast<size_t>(i - a)]);
    double v2 = 0.0;
    for (long i = a; i + a < t; ++i)
      v2 += std::abs(2.0 * s[static_cast<size_t>(i)] -
                     s[static_cast<size_t>(i - a)] -
                     s[static_cast<size_t>(i + a)]);
    out[static_cast<size_t>(a - 1)] = v1;
    out[static_cast<size_t>(kMaxLag + a - 1)] = v2;
  }
  return out;
}

namespace {

// Mean of raw samples [first, last].
double window_mean(const std::vector<sim::TraceSample>& s, long first,
                   long last) {
  double sum = 0.0;
  for (long i = first; i <= last; ++i) sum += s[static_cast<size_t>(i)].value;
  return sum / static_cast<double>(last - first + 1);
}

// Linear interpolation of the per-sample knots (theta[i], arr[i]) on a
// uniform grid spanning the trace, endpoints included.
std::vector<double> resample_knots(const std::vector<sim::TraceSample>& s,
                                   const std::vector<double>& arr,
                                   int points) {
  const long n = static_cast<long>(arr.size());
  const double t0 = s.front().theta_deg;
  const double t1 = s.back().theta_deg;
  std::vector<double> out(static_cast<size_t>(points));
  long seg = 0;
  for (int j = 0; j < points; ++j) {
    const double th = t0 + (t1 - t0) * j / (points - 1);
    while (seg + 2 < n && s[static_cast<size_t>(seg + 1)].theta_deg < th)
      ++seg;
    const double ta = s[static_cast<size_t>(seg)].theta_deg;
    const double tb = s[static_cast<size_t>(seg + 1)].theta_deg;
    const double w = (th - ta) / (tb - ta);
    out[static_cast<size_t>(j)] =
        arr[static_cast<size_t>(seg)] +
        w * (arr[static_cast<size_t>(seg + 1)] - arr[static_cast<size_t>(seg)]);
  }
  return out;
}

}  // namespace

// Outside collapse regions both envelopes coincide with the trace, which
// makes a collapse-free trace its own envelope pair. Each detected drop is
// bridged: the upper envelope carries the pre-collapse level forward until
// the trace regains it (or the next event node / trace end when the trend
// never recovers), the lower envelope carries the post-collapse level
// backward to where the trace last sat that low. Node levels average up to
// five samples on the stable side of the drop to keep readout noise out of
// the bridges.
EnvelopePair envelopes(const sim::SignalTrace& trace, double jump_threshold,
                       int points) {
  const auto& s = trace.samples;
  const long n = static_cast<long>(s.size());
  if (n < 2) throw DomainError("envelope extraction needs at least 2 samples");
  if (points < 2) throw DomainError("envelope grids need at least 2 points");
  if (!(jump_threshold >= 0.0) || !std::isfinite(jump_threshold))
    throw DomainError("jump threshold must be finite and non-negative");
  for (long i = 0; i < n; ++i) {
    if (!std::isfinite(s[static_cast<size_t>(i)].theta_deg) ||
        !std::isfinite(s[static_cast<size_t>(i)].value))
      throw DomainError("trace contains non-finite samples");
    if (i > 0 && !(s[static_cast<size_t>(i)].theta_deg >
                   s[static_cast<size_t>(i - 1)].theta_deg))
      throw DomainError("trace angles must be strictly increasing");
  }

  std::vector<double> v(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) v[static_cast<size_t>(i)] = s[static_cast<size_t>(i)].value;
  auto theta = [&](long i) { return s[static_cast<size_t>(i)].theta_deg; };

  // An event at index i is a drop from sample i to sample i+1.
  std::vector<long> events;
  for (long i = 0; i + 1 < n; ++i) {
    if (v[static_cast<size_t>(i + 1)] - v[static_cast<size_t>(i)] <
        -jump_threshold)
      events.push_back(i);
  }
  const long ecount = static_cast<long>(events.size());

  constexpr long kWindow = 5;
  std::vector<double> unode(static_cast<size_t>(ecount));
  std::vector<double> lnode(static_cast<size_t>(ecount));
  for (long k = 0; k < ecount; ++k) {
    const long e = events[static_cast<size_t>(k)];
    const long seg_start = k > 0 ? events[static_cast<size_t>(k - 1)] + 1 : 0;
    const long seg_end =
        k + 1 < ecount ? events[static_cast<size_t>(k + 1)] : n - 1;
    unode[static_cast<size_t>(k)] =
        window_mean(s, std::max(seg_start, e - (kWindow - 1)), e);
    lnode[static_cast<size_t>(k)] =
        window_mean(s, e + 1, std::min(seg_end, e + kWindow));
  }

  std::vector<double> upper = v;
  for (long k = 0; k < ecount; ++k) {
    const long e = events[static_cast<size_t>(k)];
    const double level = unode[static_cast<size_t>(k)];
    upper[static_cast<size_t>(e)] = level;
    const long bound =
        k + 1 < ecount ? events[static_cast<size_t>(k + 1)] : n - 1;
    long tgt = e + 1;
    while (tgt <= bound && v[static_cast<size_t>(tgt)] < level) ++tgt;
    if (tgt > bound) tgt = bound;
    const double tgt_val = (k + 1 < ecount && tgt == bound)
                               ? unode[static_cast<size_t>(k + 1)]
                               : v[static_cast<size_t>(tgt)];
    for (long i = e + 1; i < tgt; ++i)
      upper[static_cast<size_t>(i)] =
          level + (tgt_val - level) * (theta(i) - theta(e)) /
                      (theta(tgt) - theta(e));
  }

  std::vector<double> lower = v;
  for (long k = 0; k < ecount; ++k) {
    const long e = events[static_cast<size_t>(k)];
    const double level = lnode[static_cast<size_t>(k)];
    lower[static_cast<size_t>(e + 1)] = level;
    const long lbound = k > 0 ? events[static_cast<size_t>(k - 1)] + 1 : 0;
    long src = e;
    while (src >= lbound && v[static_cast<size_t>(src)] > level) --src;
    if (src < lbound) src = lbound;
    const double src_val = (k > 0 && src == lbound)
                               ? lnode[static_cast<size_t>(k - 1)]
                               : v[static_cast<size_t>(src)];
    for (long i = src + 1; i <= e; ++i)
      lower[static_cast<size_t>(i)] =
          src_val + (level - src_val) * (theta(i) - theta(src)) /
                        (theta(e + 1) - theta(src));
  }

  EnvelopePair out;
  out.theta_start_deg = s.front().theta_deg;
  out.theta_end_deg = s.back().theta_deg;
  out.upper = resample_knots(s, upper, points);
  out.lower = resample_knots(s, lower, points);
  return out;
}

FeatureVector assemble_features(const std::array<double, kVibFeatureDim>& vib,
                                const EnvelopePair& topple, double est_mass_g,
                                double est_height_mm) {
  if (topple.lower.size() != kEnvelopePoints ||
      topple.upper.size() != kEnvelopePoints)
    throw DomainError("envelope grids must have " +
                      std::to_string(kEnvelopePoints) + " points");
  if (!std::isfinite(est_mass_g) || !std::isfinite(est_height_mm))
    throw DomainError("scalar features must be finite");

  FeatureVector fv;
  auto it = std::copy(vib.begin(), vib.end(), fv.values.begin());
  it = std::copy(topple.lower.begin(), topple.lower.end(), it);
  it = std::copy(topple.upper.begin(), topple.upper.end(), it);
  fv.est_mass_g() = est_mass_g;
  fv.est_height_mm() = est_height_mm;
  for (double v : fv.values)
    if (!std::isfinite(v)) throw DomainError("feature vector is not finite");
  return fv;
}

namespace {

long decimation_step(double source_rate, double target_rate) {
  if (!(source_rate > 0.0) || !(target_rate > 0.0))
    throw DomainError("sample rates must be positive");
  if (target_rate > source_rate)
    throw DomainError("target rate exceeds source rate");
  return static_cast<long>(std::floor(source_rate / target_rate));
}

}  // namespace

sim::MarkerField downsample(const sim::MarkerField& field,
                            double target_rate_hz) {
  const long step = decimation_step(field.sample_rate_hz, target_rate_hz);
  const long frames = field.frame_count();
  sim::MarkerField out;
  out.marker_count = field.marker_count;
  out.sample_rate_hz = field.sample_rate_hz / static_cast<double>(step);
  for (long f = 0; f < frames; f += step) {
    const size_t at = static_cast<size_t>(f) * field.marker_count;
    out.dx_mm.insert(out.dx_mm.end(), field.dx_mm.begin() + at,
                     field.dx_mm.begin() + at + field.marker_count);
    out.dz_mm.insert(out.dz_mm.end(), field.dz_mm.begin() + at,
                     field.dz_mm.begin() + at + field.marker_count);
  }
  return out;
}

VibrationSignal downsample(const VibrationSignal& signal,
                           double target_rate_hz) {
  const long step = decimation_step(signal.sample_rate_hz, target_rate_hz);
  VibrationSignal out;
  out.sample_rate_hz = signal.sample_rate_hz / static_cast<double>(step);
  for (size_t i = 0; i < signal.values.size(); i += static_cast<size_t>(step))
    out.values.push_back(signal.values[i]);
  return out;
}

}  // namespace granusense::features
