// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaitevt {

using Vec3 = std::array<double, 3>;

// A gap is stored as NaN in all three components.
inline Vec3 gap_sample() { return {NAN, NAN, NAN}; }
inline bool is_gap(const Vec3& v) { return std::isnan(v[0]) || std::isnan(v[1]) || std::isnan(v[2]); }

struct MarkerTrajectory {
    std::string name;
    std::vector<Vec3> samples;

    std::size_t size() const { return samples.size(); }
    bool operator==(const MarkerTrajectory& o) const;
};

struct CoordinateFrame {
    int progression_axis = 0;
    int progression_sign = 1;
    int vertical_axis = 2;
    int vertical_sign = 1;
    bool units_converted = false;
    bool normalized = false;

    bool operator==(const CoordinateFrame&) const = default;
};

enum class Units { millimeters, meters };

struct Trial {
    std::string id;
    double sample_rate = 200.0;
    std::vector<MarkerTrajectory> markers;
    std::optional<std::vector<double>> grf_left;
    std::optional<std::vector<double>> grf_right;
    CoordinateFrame frame;

    std::size_t frame_count() const;
    const MarkerTrajectory* find(std::string_view name) const;
    MarkerTrajectory* find(std::string_view name);
    // Throws FormatError("missing marker: <name>") when absent.
    const MarkerTrajectory& marker(std::string_view name) const;

    bool operator==(const Trial& o) const;
};

// LASIS, LPSIS, RASIS, RPSIS, LFCC, RFCC, LFMT2, RFMT2.
const std::vector<std::string>& required_markers();

struct LoadOptions {
    // Used when the header does not state units. Header wins otherwise.
    std::optional<Units> units;
    bool require_markers = true;
};

Trial load_trial(const std::string& path, const LoadOptions& opts = {});
Trial parse_trial(std::string_view text, const std::string& id = "trial", const LoadOptions& opts = {});

// Always written in meters with round-trip precision.
void write_trial(const Trial& trial, const std::string& path);
std::string format_trial(const Trial& trial);

Trial normalize_coordinates(const Trial& trial);

MarkerTrajectory pelvis_centroid(const Trial& trial);

struct FrameSpan {
    std::size_t first = 0;
    std::size_t last = 0; // inclusive
    bool operator==(const FrameSpan&) const = default;
};

struct GapFillResult {
    MarkerTrajectory trajectory;
    std::vector<FrameSpan> filled;
    std::vector<FrameSpan> unfilled;
};

GapFillResult fill_gaps(const MarkerTrajectory& traj, std::size_t max_gap_frames);

// Maximal runs of gap samples.
std::vector<FrameSpan> find_gaps(const MarkerTrajectory& traj);

} // namespace gaitevt
