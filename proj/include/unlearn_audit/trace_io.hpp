#pragma once

// Newline-delimited JSON trace files.
//
//   line 1:      {"concept", "kind", "tokens", "concept_span",
//                 "instruction_span", "steps", "aggregation"}
//   line 2..S+1: {"step": s, "dist": [T numbers]}   (s = 1..S)
//
// Numbers are written in shortest round-trip form, so reading a file back
// reproduces every double bit for bit.

#include <filesystem>
#include <iosfwd>

#include "unlearn_audit/attention.hpp"

namespace unlearn_audit {

void write_trace(std::ostream& out, const AttentionTrace& trace);
void write_trace_file(const std::filesystem::path& path, const AttentionTrace& trace);

// Parses and validates. Throws MalformedTrace naming the offending line.
AttentionTrace read_trace(std::istream& in);
AttentionTrace read_trace_file(const std::filesystem::path& path);

}  // namespace unlearn_audit
