#pragma once

// Trace and summary serialization: CSV (RFC-4180, 17 significant digits, time
// column first, ISO-8601 metadata sidecar) and schema-versioned JSON.

#include <string>

#include <json.hpp>

#include "adsim/sim.hpp"

namespace adsim {

/// Render a double with 17 significant digits (round-trips exactly).
std::string format_g17(double x);

/// Header row of channel names, one row per sample; writes a
/// "<path>.meta.json" sidecar with timestamps, markers and channel names.
void export_csv(const TraceRecorder& trace, const std::string& path);

void export_trace_json(const TraceRecorder& trace, const std::string& path);

TraceRecorder import_trace_json(const std::string& path);

/// Parse a CSV written by export_csv back into a trace (no markers).
TraceRecorder import_csv(const std::string& path);

nlohmann::json summary_to_json(const SummaryReport& summary);

}  // namespace adsim
