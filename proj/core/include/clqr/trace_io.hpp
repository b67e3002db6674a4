#pragma once

#include <string>

#include "clqr/simulator.hpp"

namespace clqr {

/// Fixed-order CSV, one row per control tick. Doubles are printed with %.17g
/// so a re-run with the same seed produces a byte-identical file.
void write_trace_csv(const Trace& trace, const std::string& path);

/// Metrics summary as a JSON document.
void write_metrics_json(const Metrics& m, const std::string& path);

}  // namespace clqr
