#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace actlab {

// Half-open frame interval [start, end).
struct FrameWindow {
  int start = 0;
  int end = 0;
  int length() const { return end - start; }
  friend bool operator==(const FrameWindow&, const FrameWindow&) = default;
};

struct TraceStep {
  int index = 0;
  // Line content with the leading "[frames A-B]" marker removed. Entity
  // tokens keep their "@" prefix here; segment_text() strips them.
  std::string text;
  std::optional<FrameWindow> frame_window;
  // Lowercased, deduplicated, in first-mention order.
  std::vector<std::string> entities;
  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct StructuredTrace {
  std::vector<TraceStep> steps;
  std::optional<std::string> answer;
  bool format_ok = false;
  friend bool operator==(const StructuredTrace&, const StructuredTrace&) = default;
};

// Total parser for the trace grammar. format_ok is true iff the input holds
// exactly one <think>...</think> block followed by exactly one
// <answer>...</answer> block. Steps are the non-empty lines of the think
// block; a leading "[frames A-B]" marker (A, B inclusive) becomes the
// half-open window [A, B+1); "@name" tokens are recorded as entities.
// Malformed input still yields best-effort steps, never an error.
StructuredTrace parse_trace(std::string_view raw);

// Step text with "@" entity tokens dropped and whitespace collapsed.
std::string segment_text(const TraceStep& step);

// One (step index, cleaned text) pair per step, in step order.
std::vector<std::pair<int, std::string>> segments(const StructuredTrace& trace);

// Canonical emitter. parse_trace(emit_trace(t)) == t whenever t's steps carry
// non-empty single-line text, entities consistent with that text, and indices
// 0..n-1.
std::string emit_trace(const StructuredTrace& trace);

}  // namespace actlab
