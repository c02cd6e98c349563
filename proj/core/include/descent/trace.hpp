#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace descent {

// One logged benchmark step. Floats are rendered with 17 significant
// digits so traces replay bit-faithfully.
struct TraceRecord {
    std::int64_t t = 0;
    double loss = 0.0;
    double grad_norm = 0.0;
    double update_norm = 0.0;
    double effective_lr = 0.0;
    std::int64_t extra_evals = 0;
};

std::string trace_header();
std::string format_trace_row(const TraceRecord& record);

// Parses a trace file written by run(); throws ConfigError on malformed
// rows.
std::vector<TraceRecord> parse_trace_file(const std::string& path);

// Write-temp-then-rename so readers never observe partial files.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace descent
