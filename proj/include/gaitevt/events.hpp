// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gaitevt {

enum class Side { left, right };
enum class EventKind { hs, to };

struct GaitEvent {
    Side side = Side::left;
    EventKind kind = EventKind::hs;
    long frame = 0;
    double time = 0; // s
    std::string source;

    bool operator==(const GaitEvent&) const = default;
};

struct EventDiagnostic {
    double score = 0;
    bool fallback = false;
    bool operator==(const EventDiagnostic&) const = default;
};

struct DetectionResult {
    std::string method;
    std::vector<GaitEvent> events; // sorted by time
    std::vector<EventDiagnostic> diagnostics; // parallel to events
    std::vector<std::string> notes;
};

const char* side_code(Side s);  // "L" / "R"
const char* kind_code(EventKind k); // "HS" / "TO"

// Order by time, then frame, side, kind.
void sort_events(DetectionResult& r);

std::vector<GaitEvent> select(const std::vector<GaitEvent>& events, Side side, EventKind kind);

// Events CSV: side,kind,frame,time_s,source
std::vector<GaitEvent> parse_events(std::string_view text);
std::vector<GaitEvent> load_events(const std::string& path);
std::string format_events(const std::vector<GaitEvent>& events);
void write_events(const std::vector<GaitEvent>& events, const std::string& path);

} // namespace gaitevt
