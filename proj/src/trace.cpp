#include "actlab/trace.hpp"

#include <algorithm>

namespace actlab {

namespace {

std::string_view trim(std::string_view s) {
  const size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return out;
}

// Parses a leading "[frames A-B]" marker. On success advances `line` past the
// marker and any following blanks. Markers with 10+ digit numbers or trailing
// junk glued to the bracket are not markers.
bool take_frame_marker(std::string_view& line, long long& a, long long& b) {
  constexpr std::string_view kPrefix = "[frames ";
  if (line.substr(0, kPrefix.size()) != kPrefix) return false;
  size_t pos = kPrefix.size();
  auto digits = [&](long long& out) {
    const size_t start = pos;
    long long v = 0;
    while (pos < line.size() && line[pos] >= '0' && line[pos] <= '9') {
      v = v * 10 + (line[pos] - '0');
      ++pos;
    }
    if (pos == start || pos - start > 9) return false;
    out = v;
    return true;
  };
  long long lo = 0, hi = 0;
  if (!digits(lo)) return false;
  if (pos >= line.size() || line[pos] != '-') return false;
  ++pos;
  if (!digits(hi)) return false;
  if (pos >= line.size() || line[pos] != ']') return false;
  ++pos;
  if (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') return false;
  while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  line.remove_prefix(pos);
  a = lo;
  b = hi;
  return true;
}

struct TagScan {
  size_t first = std::string_view::npos;
  int count = 0;
};

TagScan scan_tag(std::string_view raw, std::string_view tag) {
  TagScan s;
  size_t pos = raw.find(tag);
  while (pos != std::string_view::npos) {
    if (s.count == 0) s.first = pos;
    ++s.count;
    pos = raw.find(tag, pos + tag.size());
  }
  return s;
}

void for_each_token(std::string_view text, auto&& fn) {
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    const size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
    if (i > start) fn(text.substr(start, i - start));
  }
}

}  // namespace

StructuredTrace parse_trace(std::string_view raw) {
  StructuredTrace trace;

  const TagScan think_open = scan_tag(raw, "<think>");
  const TagScan think_close = scan_tag(raw, "</think>");
  const TagScan ans_open = scan_tag(raw, "<answer>");
  const TagScan ans_close = scan_tag(raw, "</answer>");

  trace.format_ok = think_open.count == 1 && think_close.count == 1 &&
                    ans_open.count == 1 && ans_close.count == 1 &&
                    think_open.first < think_close.first &&
                    think_close.first < ans_open.first &&
                    ans_open.first < ans_close.first;

  // Best-effort think region: first <think> up to the next </think>.
  std::string_view body;
  if (think_open.count > 0) {
    const size_t begin = think_open.first + 7;
    const size_t end = raw.find("</think>", begin);
    if (end != std::string_view::npos) body = raw.substr(begin, end - begin);
  }

  size_t line_start = 0;
  while (line_start <= body.size() && !body.empty()) {
    const size_t nl = body.find('\n', line_start);
    std::string_view line = nl == std::string_view::npos
                                ? body.substr(line_start)
                                : body.substr(line_start, nl - line_start);
    line = trim(line);
    if (!line.empty()) {
      TraceStep step;
      step.index = static_cast<int>(trace.steps.size());
      long long lo = 0, hi = 0;
      std::string_view rest = line;
      if (take_frame_marker(rest, lo, hi)) {
        // Inclusive A-B becomes half-open [A, B+1). An inverted marker is
        // stripped but attaches no window.
        if (hi >= lo) {
          step.frame_window =
              FrameWindow{static_cast<int>(lo), static_cast<int>(hi + 1)};
        }
        line = rest;
      }
      step.text = std::string(line);
      for_each_token(line, [&](std::string_view token) {
        if (token.size() > 1 && token[0] == '@') {
          std::string entity = lowercase(token.substr(1));
          if (std::find(step.entities.begin(), step.entities.end(), entity) ==
              step.entities.end()) {
            step.entities.push_back(std::move(entity));
          }
        }
      });
      trace.steps.push_back(std::move(step));
    }
    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
  }

  if (ans_open.count > 0) {
    const size_t begin = ans_open.first + 8;
    const size_t end = raw.find("</answer>", begin);
    if (end != std::string_view::npos) {
      const std::string_view content = trim(raw.substr(begin, end - begin));
      if (!content.empty()) trace.answer = std::string(content);
    }
  }
  return trace;
}

std::string segment_text(const TraceStep& step) {
  std::string out;
  for_each_token(step.text, [&](std::string_view token) {
    if (token[0] == '@') return;
    if (!out.empty()) out += ' ';
    out += token;
  });
  return out;
}

std::vector<std::pair<int, std::string>> segments(const StructuredTrace& trace) {
  std::vector<std::pair<int, std::string>> out;
  out.reserve(trace.steps.size());
  for (const TraceStep& step : trace.steps) {
    out.emplace_back(step.index, segment_text(step));
  }
  return out;
}

std::string emit_trace(const StructuredTrace& trace) {
  std::string out = "<think>\n";
  for (const TraceStep& step : trace.steps) {
    if (step.frame_window) {
      out += "[frames ";
      out += std::to_string(step.frame_window->start);
      out += '-';
      out += std::to_string(step.frame_window->end - 1);
      out += "] ";
    }
    out += step.text;
    out += '\n';
  }
  out += "</think>\n<answer>";
  if (trace.answer) out += *trace.answer;
  out += "</answer>\n";
  return out;
}

}  // namespace actlab
