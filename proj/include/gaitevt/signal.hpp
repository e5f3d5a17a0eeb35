// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace gaitevt {

struct Trial;
struct DetectorConfig;

enum class FilterKind { lowpass, highpass };
enum class ExtremumKind { max, min };
enum class Direction { rising, falling };

// One biquad: b0 b1 b2 a0 a1 a2 with a0 == 1.
using Section = std::array<double, 6>;

std::vector<Section> butterworth_sos(int order, double cutoff_hz, double sample_rate, FilterKind kind);

// Forward-backward filtering with odd reflection padding of 3 x order samples.
std::vector<double> butterworth_zero_phase(const std::vector<double>& x, double sample_rate, double cutoff_hz,
                                           FilterKind kind, int order = 4);

// Central differences inside, one-sided at the ends.
std::vector<double> derivative(const std::vector<double>& x, double sample_rate);

// Prominence as in the usual topographic definition: height above the higher of the
// two lowest points reached before meeting a taller sample (or the series end) on each side.
double peak_prominence(const std::vector<double>& x, std::size_t peak);

struct ExtremaOptions {
    std::size_t min_separation = 1;
    std::optional<double> prominence;
    // With expected_count > 0 the adaptive floor also considers the strongest
    // expected_count candidates (see README).
    std::size_t expected_count = 0;
};

std::vector<std::size_t> local_extrema(const std::vector<double>& x, ExtremumKind kind, const ExtremaOptions& opts = {});
double adaptive_prominence(const std::vector<double>& x, std::size_t expected_count);

std::vector<std::size_t> threshold_crossings(const std::vector<double>& x, double threshold, Direction dir,
                                             std::size_t debounce_frames);
std::size_t debounce_frames(double debounce_s, double sample_rate);

// Linear-interpolated percentile, q in [0, 100].
double percentile(std::vector<double> v, double q);
double median(std::vector<double> v);
std::vector<double> detrend(const std::vector<double>& x);

struct GaitContext {
    double gait_period = 0;    // s
    double gait_frequency = 0; // Hz
    double walking_speed = 0;  // m/s
};

// Lag of the dominant normalized autocorrelation peak in [min_s, max_s].
// Throws DetectionError("no dominant period") when no peak reaches min_corr.
double dominant_period(const std::vector<double>& x, double sample_rate, double min_s = 0.4, double max_s = 2.5,
                       double min_corr = 0.3);
double dominant_period(const std::vector<std::vector<double>>& xs, double sample_rate, double min_s = 0.4,
                       double max_s = 2.5, double min_corr = 0.3);

GaitContext estimate_gait_context(const Trial& trial);
GaitContext estimate_gait_context(const Trial& trial, const DetectorConfig& cfg);

} // namespace gaitevt
