// SPDX-License-Identifier: Apache-2.0
#include "gaitevt/trial.hpp"

#include "gaitevt/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace gaitevt {

namespace {

bool same_bits(double a, double b) {
    if (std::isnan(a) && std::isnan(b))
        return true;
    return std::memcmp(&a, &b, sizeof(double)) == 0;
}

bool same_series(const std::optional<std::vector<double>>& a, const std::optional<std::vector<double>>& b) {
    if (a.has_value() != b.has_value())
        return false;
    if (!a)
        return true;
    if (a->size() != b->size())
        return false;
    for (std::size_t i = 0; i < a->size(); ++i)
        if (!same_bits((*a)[i], (*b)[i]))
            return false;
    return true;
}

} // namespace

bool MarkerTrajectory::operator==(const MarkerTrajectory& o) const {
    if (name != o.name || samples.size() != o.samples.size())
        return false;
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (int k = 0; k < 3; ++k)
            if (!same_bits(samples[i][k], o.samples[i][k]))
                return false;
    return true;
}

std::size_t Trial::frame_count() const {
    if (!markers.empty())
        return markers.front().size();
    if (grf_left)
        return grf_left->size();
    if (grf_right)
        return grf_right->size();
    return 0;
}

const MarkerTrajectory* Trial::find(std::string_view name) const {
    for (const auto& m : markers)
        if (m.name == name)
            return &m;
    return nullptr;
}

MarkerTrajectory* Trial::find(std::string_view name) {
    for (auto& m : markers)
        if (m.name == name)
            return &m;
    return nullptr;
}

const MarkerTrajectory& Trial::marker(std::string_view name) const {
    if (const auto* m = find(name))
        return *m;
    throw FormatError("missing marker: " + std::string(name));
}

bool Trial::operator==(const Trial& o) const {
    return same_bits(sample_rate, o.sample_rate) && markers == o.markers && same_series(grf_left, o.grf_left) &&
           same_series(grf_right, o.grf_right);
}

const std::vector<std::string>& required_markers() {
    static const std::vector<std::string> names = {"LASIS", "LPSIS", "RASIS", "RPSIS",
                                                   "LFCC",  "RFCC",  "LFMT2", "RFMT2"};
    return names;
}

namespace {

struct Column {
    enum Kind { marker, grf_left, grf_right } kind = marker;
    std::size_t marker_index = 0;
    int axis = 0;
};

void parse_metadata(std::string_view line, double& rate, std::optional<Units>& units) {
    line.remove_prefix(1); // '#'
    for (auto item : detail::split(line, ',')) {
        item = detail::trim(item);
        if (item.empty())
            continue;
        auto eq = item.find('=');
        if (eq == std::string_view::npos)
            continue;
        auto key = detail::trim(item.substr(0, eq));
        auto value = detail::trim(item.substr(eq + 1));
        if (key == "sample_rate_hz") {
            auto v = detail::parse_double(value);
            if (!v)
                throw FormatError("parse error at line 1: bad sample_rate_hz '" + std::string(value) + "'");
            rate = *v;
        } else if (key == "units") {
            if (value == "mm")
                units = Units::millimeters;
            else if (value == "m")
                units = Units::meters;
            else
                throw FormatError("parse error at line 1: unknown units '" + std::string(value) + "'");
        }
    }
}

} // namespace

Trial parse_trial(std::string_view text, const std::string& id, const LoadOptions& opts) {
    auto lines = detail::split_lines(text);
    if (lines.empty() || lines[0].empty() || lines[0][0] != '#')
        throw FormatError("parse error at line 1: expected '# sample_rate_hz=<f>, units=<mm|m>'");

    Trial t;
    t.id = id;
    double rate = 200.0;
    std::optional<Units> units;
    parse_metadata(lines[0], rate, units);
    if (!(rate > 0) || !std::isfinite(rate))
        throw ConfigError("non-positive sample rate: " + detail::format_double(rate));
    t.sample_rate = rate;
    Units u = units.value_or(opts.units.value_or(Units::millimeters));
    const double scale = u == Units::millimeters ? 1000.0 : 1.0;
    t.frame.units_converted = u == Units::millimeters;

    if (lines.size() < 2)
        throw FormatError("parse error at line 2: missing column header");
    auto names = detail::split(lines[1], ',');
    for (auto& n : names)
        n = detail::trim(n);
    if (names.empty() || names[0] != "frame")
        throw FormatError("parse error at line 2: first column must be 'frame'");

    std::vector<Column> cols(names.size());
    std::map<std::string, std::size_t> index;
    std::vector<std::array<bool, 3>> seen;
    bool has_left = false, has_right = false;
    for (std::size_t c = 1; c < names.size(); ++c) {
        std::string_view n = names[c];
        if (n == "grf_left_z") {
            cols[c].kind = Column::grf_left;
            has_left = true;
            continue;
        }
        if (n == "grf_right_z") {
            cols[c].kind = Column::grf_right;
            has_right = true;
            continue;
        }
        if (n.size() < 3 || n[n.size() - 2] != '_' || (n.back() != 'x' && n.back() != 'y' && n.back() != 'z'))
            throw FormatError("parse error at line 2: unrecognised column '" + std::string(n) + "'");
        std::string label(n.substr(0, n.size() - 2));
        auto [it, inserted] = index.emplace(label, t.markers.size());
        if (inserted) {
            t.markers.push_back({label, {}});
            seen.push_back({false, false, false});
        }
        int axis = n.back() - 'x';
        if (seen[it->second][axis])
            throw FormatError("parse error at line 2: duplicate column '" + std::string(n) + "'");
        seen[it->second][axis] = true;
        cols[c] = {Column::marker, it->second, axis};
    }
    for (std::size_t m = 0; m < t.markers.size(); ++m)
        for (int a = 0; a < 3; ++a)
            if (!seen[m][a])
                throw FormatError("missing column: " + t.markers[m].name + "_" + char('x' + a));
    if (opts.require_markers)
        for (const auto& r : required_markers())
            if (!index.count(r))
                throw FormatError("missing marker: " + r);

    std::vector<double> gl, gr;
    for (std::size_t li = 2; li < lines.size(); ++li) {
        std::string_view line = lines[li];
        if (detail::trim(line).empty())
            continue;
        auto cells = detail::split(line, ',');
        const std::size_t lineno = li + 1;
        if (cells.size() != names.size())
            throw FormatError("parse error at line " + std::to_string(lineno) + ": expected " +
                              std::to_string(names.size()) + " fields, got " + std::to_string(cells.size()));
        if (!detail::parse_long(detail::trim(cells[0])))
            throw FormatError("parse error at line " + std::to_string(lineno) + ": bad frame index");
        for (auto& m : t.markers)
            m.samples.push_back({0, 0, 0});
        double left = NAN, right = NAN;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            auto cell = detail::trim(cells[c]);
            double v = NAN;
            if (!cell.empty()) {
                auto p = detail::parse_double(cell);
                if (!p || !std::isfinite(*p))
                    throw FormatError("parse error at line " + std::to_string(lineno) + ": bad value in column '" +
                                      std::string(names[c]) + "'");
                v = *p;
            }
            switch (cols[c].kind) {
            case Column::grf_left: left = v; break;
            case Column::grf_right: right = v; break;
            case Column::marker: t.markers[cols[c].marker_index].samples.back()[cols[c].axis] = v / scale; break;
            }
        }
        if (has_left)
            gl.push_back(left);
        if (has_right)
            gr.push_back(right);
    }
    // A sample with any empty component is a gap.
    for (auto& m : t.markers)
        for (auto& s : m.samples)
            if (is_gap(s))
                s = gap_sample();
    if (has_left)
        t.grf_left = std::move(gl);
    if (has_right)
        t.grf_right = std::move(gr);
    if (t.frame_count() < 2)
        throw FormatError("trial needs at least 2 frames, got " + std::to_string(t.frame_count()));
    return t;
}

Trial load_trial(const std::string& path, const LoadOptions& opts) {
    std::string text = detail::read_file(path);
    return parse_trial(text, detail::file_stem(path), opts);
}

std::string format_trial(const Trial& t) {
    std::ostringstream os;
    os << "# sample_rate_hz=" << detail::format_double(t.sample_rate) << ", units=m\n";
    os << "frame";
    for (const auto& m : t.markers)
        os << ", " << m.name << "_x, " << m.name << "_y, " << m.name << "_z";
    if (t.grf_left)
        os << ", grf_left_z";
    if (t.grf_right)
        os << ", grf_right_z";
    os << '\n';
    auto cell = [&](double v) {
        os << ',';
        if (!std::isnan(v))
            os << detail::format_double(v);
    };
    const std::size_t n = t.frame_count();
    for (std::size_t i = 0; i < n; ++i) {
        os << i;
        for (const auto& m : t.markers)
            for (int a = 0; a < 3; ++a)
                cell(m.samples[i][a]);
        if (t.grf_left)
            cell((*t.grf_left)[i]);
        if (t.grf_right)
            cell((*t.grf_right)[i]);
        os << '\n';
    }
    return os.str();
}

void write_trial(const Trial& t, const std::string& path) { detail::write_file(path, format_trial(t)); }

MarkerTrajectory pelvis_centroid(const Trial& trial) {
    const MarkerTrajectory* la = trial.find("LASIS");
    const MarkerTrajectory* ra = trial.find("RASIS");
    const MarkerTrajectory* lp = trial.find("LPSIS");
    const MarkerTrajectory* rp = trial.find("RPSIS");
    if (!la && !ra && !lp && !rp)
        throw FormatError("missing marker: LASIS");
    const std::size_t n = trial.frame_count();
    MarkerTrajectory out{"PELVIS", std::vector<Vec3>(n)};
    // Left/right pairs are summed first so that mirroring the labels is exact.
    auto pair_sum = [](const MarkerTrajectory* a, const MarkerTrajectory* b, std::size_t i, Vec3& acc) {
        bool ha = a && !is_gap(a->samples[i]);
        bool hb = b && !is_gap(b->samples[i]);
        for (int k = 0; k < 3; ++k) {
            if (ha && hb)
                acc[k] = a->samples[i][k] + b->samples[i][k];
            else if (ha)
                acc[k] = a->samples[i][k];
            else if (hb)
                acc[k] = b->samples[i][k];
            else
                acc[k] = 0;
        }
        return int(ha) + int(hb);
    };
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 front{}, back{};
        int cnt = pair_sum(la, ra, i, front) + pair_sum(lp, rp, i, back);
        if (cnt == 0) {
            out.samples[i] = gap_sample();
            continue;
        }
        for (int k = 0; k < 3; ++k)
            out.samples[i][k] = (front[k] + back[k]) / cnt;
    }
    return out;
}

Trial normalize_coordinates(const Trial& trial) {
    MarkerTrajectory c = pelvis_centroid(trial);
    std::size_t first = c.size(), last = 0;
    Vec3 pelvis_sum{0, 0, 0};
    std::size_t pelvis_n = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (is_gap(c.samples[i]))
            continue;
        first = std::min(first, i);
        last = i;
        for (int k = 0; k < 3; ++k)
            pelvis_sum[k] += c.samples[i][k];
        ++pelvis_n;
    }
    if (pelvis_n < 2)
        throw DetectionError("no progression direction");

    int vaxis = trial.frame.vertical_axis;
    int vsign = 1;
    Vec3 foot_sum{0, 0, 0};
    std::size_t foot_n = 0;
    for (const char* name : {"LFCC", "RFCC", "LFMT2", "RFMT2"})
        if (const auto* m = trial.find(name))
            for (const auto& s : m->samples)
                if (!is_gap(s)) {
                    for (int k = 0; k < 3; ++k)
                        foot_sum[k] += s[k];
                    ++foot_n;
                }
    if (foot_n > 0) {
        // The pelvis sits above the feet.
        double best = -1;
        for (int k = 0; k < 3; ++k) {
            double d = pelvis_sum[k] / double(pelvis_n) - foot_sum[k] / double(foot_n);
            if (std::abs(d) > best) {
                best = std::abs(d);
                vaxis = k;
                vsign = d >= 0 ? 1 : -1;
            }
        }
    }

    Vec3 disp;
    for (int k = 0; k < 3; ++k)
        disp[k] = c.samples[last][k] - c.samples[first][k];
    int paxis = -1;
    double horiz2 = 0;
    for (int k = 0; k < 3; ++k) {
        if (k == vaxis)
            continue;
        horiz2 += disp[k] * disp[k];
        if (paxis < 0 || std::abs(disp[k]) > std::abs(disp[paxis]))
            paxis = k;
    }
    if (std::sqrt(horiz2) < 0.5)
        throw DetectionError("no progression direction");
    int psign = disp[paxis] >= 0 ? 1 : -1;
    int laxis = 3 - paxis - vaxis;

    Trial out = trial;
    for (auto& m : out.markers)
        for (auto& s : m.samples) {
            Vec3 o = s;
            s = {psign * o[paxis], o[laxis], vsign * o[vaxis]};
        }
    out.frame.progression_axis = paxis;
    out.frame.progression_sign = psign;
    out.frame.vertical_axis = vaxis;
    out.frame.vertical_sign = vsign;
    out.frame.normalized = true;
    if (trial.frame.normalized) {
        // Compose with the earlier mapping so the record still points at the file axes.
        out.frame.progression_axis = trial.frame.progression_axis;
        out.frame.progression_sign = trial.frame.progression_sign * psign;
        out.frame.vertical_axis = trial.frame.vertical_axis;
        out.frame.vertical_sign = trial.frame.vertical_sign * vsign;
    }
    return out;
}

std::vector<FrameSpan> find_gaps(const MarkerTrajectory& traj) {
    std::vector<FrameSpan> out;
    const std::size_t n = traj.size();
    for (std::size_t i = 0; i < n;) {
        if (!is_gap(traj.samples[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && is_gap(traj.samples[j + 1]))
            ++j;
        out.push_back({i, j});
        i = j + 1;
    }
    return out;
}

GapFillResult fill_gaps(const MarkerTrajectory& traj, std::size_t max_gap_frames) {
    GapFillResult r{traj, {}, {}};
    const std::size_t n = traj.size();
    for (const auto& g : find_gaps(traj)) {
        const std::size_t len = g.last - g.first + 1;
        if (g.first == 0 || g.last + 1 >= n || len > max_gap_frames) {
            r.unfilled.push_back(g);
            continue;
        }
        const Vec3& a = traj.samples[g.first - 1];
        const Vec3& b = traj.samples[g.last + 1];
        for (std::size_t i = g.first; i <= g.last; ++i) {
            double f = double(i - g.first + 1) / double(len + 1);
            for (int k = 0; k < 3; ++k)
                r.trajectory.samples[i][k] = a[k] + (b[k] - a[k]) * f;
        }
        r.filled.push_back(g);
    }
    return r;
}

} // namespace gaitevt
