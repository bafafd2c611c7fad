#pragma once

#include <string>
#include <vector>

#include "granusense/forest.hpp"
#include "granusense/harness.hpp"
#include "granusense/mlp.hpp"
#include "granusense/sim.hpp"

namespace granusense::io {

// All files are line-oriented text with a `# <format>-v1` first line.
// Floating point is written with %.17g in data files (value-exact for
// doubles) and %a in model files (bit-exact), so write/read round trips
// reproduce the numbers exactly. Writers throw IoError on filesystem
// failures; readers throw IoError naming the offending line.

// Dataset: one space-separated row per record under a header row naming
// every column; spill notes ride along as comments.
void write_dataset(const std::string& path, const harness::Dataset& dataset);
harness::Dataset read_dataset(const std::string& path);

void write_mlp(const std::string& path, const mlp::Model& model);
mlp::Model read_mlp(const std::string& path);

void write_forest(const std::string& path, const forest::Model& model);
forest::Model read_forest(const std::string& path);

// Plottable exports. The slow-rotation trace lists `theta_deg,value` pairs;
// the marker trace lists one line per frame of comma-separated per-marker
// displacement magnitudes.
void write_signal_trace(const std::string& path,
                        const sim::SignalTrace& trace);
void write_marker_trace(const std::string& path,
                        const sim::MarkerField& field);

// Metric report as `key = value` lines. Runtime is deliberately left out
// so reruns of a fixed seed produce byte-identical files; notes appear as
// leading comments.
void write_report(const std::string& path, const harness::EvalReport& report,
                  const std::vector<std::string>& notes = {});

}  // namespace granusense::io
