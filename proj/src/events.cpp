// SPDX-License-Identifier: Apache-2.0
#include "gaitevt/events.hpp"

#include "gaitevt/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

namespace gaitevt {

const char* side_code(Side s) { return s == Side::left ? "L" : "R"; }
const char* kind_code(EventKind k) { return k == EventKind::hs ? "HS" : "TO"; }

void sort_events(DetectionResult& r) {
    std::vector<std::size_t> idx(r.events.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = r.events[a];
        const auto& y = r.events[b];
        return std::make_tuple(x.time, x.frame, int(x.side), int(x.kind)) <
               std::make_tuple(y.time, y.frame, int(y.side), int(y.kind));
    });
    std::vector<GaitEvent> ev;
    std::vector<EventDiagnostic> dg;
    for (std::size_t i : idx) {
        ev.push_back(r.events[i]);
        if (i < r.diagnostics.size())
            dg.push_back(r.diagnostics[i]);
    }
    r.events = std::move(ev);
    if (dg.size() == r.events.size())
        r.diagnostics = std::move(dg);
}

std::vector<GaitEvent> select(const std::vector<GaitEvent>& events, Side side, EventKind kind) {
    std::vector<GaitEvent> out;
    for (const auto& e : events)
        if (e.side == side && e.kind == kind)
            out.push_back(e);
    return out;
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return out;
}

} // namespace

std::vector<GaitEvent> parse_events(std::string_view text) {
    auto lines = detail::split_lines(text);
    if (lines.empty())
        throw FormatError("events parse error at line 1: empty file");
    auto head = detail::split(lines[0], ',');
    const char* expected[] = {"side", "kind", "frame", "time_s", "source"};
    bool ok = head.size() == 5;
    for (std::size_t i = 0; ok && i < 5; ++i)
        ok = detail::trim(head[i]) == expected[i];
    if (!ok)
        throw FormatError("events parse error at line 1: expected header 'side,kind,frame,time_s,source'");
    std::vector<GaitEvent> out;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (detail::trim(lines[li]).empty())
            continue;
        const std::string where = "events parse error at line " + std::to_string(li + 1) + ": ";
        auto cells = detail::split(lines[li], ',');
        if (cells.size() != 5)
            throw FormatError(where + "expected 5 fields, got " + std::to_string(cells.size()));
        GaitEvent e;
        const std::string side = lower(detail::trim(cells[0]));
        if (side == "l" || side == "left")
            e.side = Side::left;
        else if (side == "r" || side == "right")
            e.side = Side::right;
        else
            throw FormatError(where + "bad side '" + std::string(detail::trim(cells[0])) + "'");
        const std::string kind = lower(detail::trim(cells[1]));
        if (kind == "hs")
            e.kind = EventKind::hs;
        else if (kind == "to")
            e.kind = EventKind::to;
        else
            throw FormatError(where + "bad kind '" + std::string(detail::trim(cells[1])) + "'");
        auto frame = detail::parse_long(detail::trim(cells[2]));
        if (!frame || *frame < 0)
            throw FormatError(where + "bad frame");
        auto time = detail::parse_double(detail::trim(cells[3]));
        if (!time || !std::isfinite(*time))
            throw FormatError(where + "bad time_s");
        e.frame = *frame;
        e.time = *time;
        e.source = std::string(detail::trim(cells[4]));
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<GaitEvent> load_events(const std::string& path) { return parse_events(detail::read_file(path)); }

std::string format_events(const std::vector<GaitEvent>& events) {
    std::ostringstream os;
    os << "side,kind,frame,time_s,source\n";
    for (const auto& e : events)
        os << side_code(e.side) << ',' << kind_code(e.kind) << ',' << e.frame << ',' << detail::format_double(e.time)
           << ',' << e.source << '\n';
    return os.str();
}

void write_events(const std::vector<GaitEvent>& events, const std::string& path) {
    detail::write_file(path, format_events(events));
}

} // namespace gaitevt
