// SPDX-License-Identifier: Apache-2.0
#include "gaitevt/signal.hpp"

#include "gaitevt/config.hpp"
#include "gaitevt/error.hpp"
#include "gaitevt/trial.hpp"
#include "prepare.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace gaitevt {

std::vector<Section> butterworth_sos(int order, double cutoff_hz, double fs, FilterKind kind) {
    if (order < 1)
        throw ParameterError("filter order must be >= 1");
    if (!(fs > 0))
        throw ParameterError("sample rate must be > 0");
    if (!(cutoff_hz > 0) || cutoff_hz >= fs / 2)
        throw ParameterError("cutoff " + std::to_string(cutoff_hz) + " Hz outside (0, Nyquist=" +
                             std::to_string(fs / 2) + " Hz)");
    const double k = std::tan(std::numbers::pi * cutoff_hz / fs);
    const double k2 = k * k;
    std::vector<Section> sos;
    for (int i = 0; i < order / 2; ++i) {
        const double alpha = 2 * std::sin(std::numbers::pi * (2 * i + 1) / (2.0 * order));
        const double d = 1 + alpha * k + k2;
        const double a1 = 2 * (k2 - 1) / d;
        const double a2 = (1 - alpha * k + k2) / d;
        if (kind == FilterKind::lowpass)
            sos.push_back({k2 / d, 2 * k2 / d, k2 / d, 1, a1, a2});
        else
            sos.push_back({1 / d, -2 / d, 1 / d, 1, a1, a2});
    }
    if (order % 2) {
        const double d = 1 + k;
        const double a1 = (k - 1) / d;
        if (kind == FilterKind::lowpass)
            sos.push_back({k / d, k / d, 0, 1, a1, 0});
        else
            sos.push_back({1 / d, -1 / d, 0, 1, a1, 0});
    }
    return sos;
}

namespace {

// Steady-state direct form II transposed state for a unit step, per section.
std::vector<std::array<double, 2>> sos_zi(const std::vector<Section>& sos) {
    std::vector<std::array<double, 2>> zi(sos.size());
    double scale = 1.0;
    for (std::size_t s = 0; s < sos.size(); ++s) {
        const auto& c = sos[s];
        const double h = (c[0] + c[1] + c[2]) / (c[3] + c[4] + c[5]);
        const double z1 = c[2] - c[5] * h;
        const double z0 = c[1] - c[4] * h + z1;
        zi[s] = {scale * z0, scale * z1};
        scale *= h;
    }
    return zi;
}

void sos_filter(const std::vector<Section>& sos, std::vector<double>& x, std::vector<std::array<double, 2>> z) {
    for (std::size_t s = 0; s < sos.size(); ++s) {
        const auto& c = sos[s];
        double z0 = z[s][0], z1 = z[s][1];
        for (double& v : x) {
            const double in = v;
            const double y = c[0] * in + z0;
            z0 = c[1] * in - c[4] * y + z1;
            z1 = c[2] * in - c[5] * y;
            v = y;
        }
    }
}

} // namespace

std::vector<double> butterworth_zero_phase(const std::vector<double>& x, double fs, double cutoff_hz, FilterKind kind,
                                           int order) {
    auto sos = butterworth_sos(order, cutoff_hz, fs, kind);
    const std::size_t pad = 3 * std::size_t(order);
    const std::size_t n = x.size();
    if (n <= pad)
        throw ParameterError("length error: series of " + std::to_string(n) + " samples too short for order " +
                             std::to_string(order) + " (needs > " + std::to_string(pad) + ")");
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i)
        ext.push_back(2 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i)
        ext.push_back(2 * x[n - 1] - x[n - 1 - i]);

    const auto zi = sos_zi(sos);
    auto scaled = [&](double v) {
        auto z = zi;
        for (auto& s : z) {
            s[0] *= v;
            s[1] *= v;
        }
        return z;
    };
    sos_filter(sos, ext, scaled(ext.front()));
    std::reverse(ext.begin(), ext.end());
    sos_filter(sos, ext, scaled(ext.front()));
    std::reverse(ext.begin(), ext.end());
    return {ext.begin() + std::ptrdiff_t(pad), ext.begin() + std::ptrdiff_t(pad + n)};
}

std::vector<double> derivative(const std::vector<double>& x, double fs) {
    const std::size_t n = x.size();
    if (n < 3)
        throw ParameterError("length error: derivative needs at least 3 samples, got " + std::to_string(n));
    std::vector<double> d(n);
    d[0] = (x[1] - x[0]) * fs;
    d[n - 1] = (x[n - 1] - x[n - 2]) * fs;
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = (x[i + 1] - x[i - 1]) * fs / 2;
    return d;
}

double peak_prominence(const std::vector<double>& y, std::size_t peak) {
    const double h = y[peak];
    double left_min = h;
    for (std::size_t i = peak; i-- > 0;) {
        if (y[i] > h)
            break;
        left_min = std::min(left_min, y[i]);
    }
    double right_min = h;
    for (std::size_t i = peak + 1; i < y.size(); ++i) {
        if (y[i] > h)
            break;
        right_min = std::min(right_min, y[i]);
    }
    return h - std::max(left_min, right_min);
}

namespace {

// Strict maxima; a flat top counts once at its middle frame (floor). Ends never qualify.
std::vector<std::size_t> raw_maxima(const std::vector<double>& y) {
    std::vector<std::size_t> out;
    const std::size_t n = y.size();
    if (n < 3)
        return out;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (y[i - 1] < y[i]) {
            std::size_t ahead = i + 1;
            while (ahead + 1 < n && y[ahead] == y[i])
                ++ahead;
            if (y[ahead] < y[i]) {
                out.push_back((i + ahead - 1) / 2);
                i = ahead;
                continue;
            }
            i = ahead;
            continue;
        }
        ++i;
    }
    return out;
}

std::vector<std::size_t> select_by_separation(const std::vector<std::size_t>& peaks, const std::vector<double>& y,
                                              std::size_t min_sep) {
    if (min_sep <= 1 || peaks.size() < 2)
        return peaks;
    std::vector<std::size_t> order(peaks.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[peaks[a]] > y[peaks[b]]; });
    std::vector<char> keep(peaks.size(), 1);
    for (std::size_t o : order) {
        if (!keep[o])
            continue;
        for (std::size_t j = o; j-- > 0 && peaks[o] - peaks[j] < min_sep;)
            keep[j] = 0;
        for (std::size_t j = o + 1; j < peaks.size() && peaks[j] - peaks[o] < min_sep; ++j)
            keep[j] = 0;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < peaks.size(); ++i)
        if (keep[i])
            out.push_back(peaks[i]);
    return out;
}

} // namespace

double percentile(std::vector<double> v, double q) {
    if (v.empty())
        return NAN;
    std::sort(v.begin(), v.end());
    const double pos = q / 100.0 * double(v.size() - 1);
    const std::size_t lo = std::size_t(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double f = pos - double(lo);
    return v[lo] + (v[hi] - v[lo]) * f;
}

double median(std::vector<double> v) { return percentile(std::move(v), 50.0); }

double adaptive_prominence(const std::vector<double>& y, std::size_t expected_count) {
    const double floor_iqr = 0.1 * (percentile(y, 75) - percentile(y, 25));
    if (expected_count == 0)
        return floor_iqr;
    std::vector<double> proms;
    for (std::size_t p : raw_maxima(y))
        proms.push_back(peak_prominence(y, p));
    if (proms.empty())
        return floor_iqr;
    std::sort(proms.begin(), proms.end(), std::greater<>());
    proms.resize(std::min(proms.size(), expected_count));
    return std::max(floor_iqr, 0.25 * median(proms));
}

std::vector<std::size_t> local_extrema(const std::vector<double>& x, ExtremumKind kind, const ExtremaOptions& opts) {
    if (opts.min_separation < 1)
        throw ParameterError("min_separation must be >= 1");
    std::vector<double> y = x;
    if (kind == ExtremumKind::min)
        for (double& v : y)
            v = -v;
    const double thr = opts.prominence ? *opts.prominence : adaptive_prominence(y, opts.expected_count);
    std::vector<std::size_t> peaks;
    for (std::size_t p : raw_maxima(y))
        if (peak_prominence(y, p) >= thr)
            peaks.push_back(p);
    return select_by_separation(peaks, y, opts.min_separation);
}

std::size_t debounce_frames(double debounce_s, double fs) {
    if (!(debounce_s >= 0))
        throw ParameterError("debounce must be >= 0");
    return std::size_t(std::lround(debounce_s * fs));
}

std::vector<std::size_t> threshold_crossings(const std::vector<double>& x, double threshold, Direction dir,
                                             std::size_t debounce) {
    std::vector<std::size_t> out;
    const std::size_t n = x.size();
    if (n == 0)
        return out;
    const std::size_t hold = std::max<std::size_t>(debounce, 1);
    bool state = x[0] > threshold;
    for (std::size_t i = 1; i < n; ++i) {
        const bool now = x[i] > threshold;
        if (now == state)
            continue;
        // The whole persistence window has to be observed.
        if (i + hold > n)
            break;
        bool persists = true;
        for (std::size_t k = i; k < i + hold; ++k)
            if ((x[k] > threshold) != now) {
                persists = false;
                break;
            }
        if (!persists)
            continue;
        state = now;
        if (now == (dir == Direction::rising))
            out.push_back(i);
    }
    return out;
}

std::vector<double> detrend(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 2)
        return x;
    const double tm = double(n - 1) / 2;
    double xm = 0;
    for (double v : x)
        xm += v;
    xm /= double(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = double(i) - tm;
        sxy += dt * (x[i] - xm);
        sxx += dt * dt;
    }
    const double slope = sxy / sxx;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i] - xm - slope * (double(i) - tm);
    return out;
}

namespace {

std::vector<double> autocorrelation(const std::vector<double>& x, std::size_t max_lag) {
    const std::size_t n = x.size();
    double mean = 0;
    for (double v : x)
        mean += v;
    mean /= double(n);
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i)
        c[i] = x[i] - mean;
    std::vector<double> r(max_lag + 1, 0.0);
    for (std::size_t lag = 1; lag <= max_lag && lag < n; ++lag) {
        double ab = 0, aa = 0, bb = 0;
        for (std::size_t i = 0; i + lag < n; ++i) {
            ab += c[i] * c[i + lag];
            aa += c[i] * c[i];
            bb += c[i + lag] * c[i + lag];
        }
        r[lag] = (aa > 0 && bb > 0) ? ab / std::sqrt(aa * bb) : 0.0;
    }
    return r;
}

} // namespace

double dominant_period(const std::vector<std::vector<double>>& xs, double fs, double min_s, double max_s,
                       double min_corr) {
    if (xs.empty())
        throw DetectionError("no dominant period");
    const std::size_t n = xs.front().size();
    const std::size_t lo = std::max<std::size_t>(1, std::size_t(std::ceil(min_s * fs)));
    const std::size_t half = n / 2;
    const std::size_t hi = std::min(std::size_t(std::floor(max_s * fs)), half > 0 ? half - 1 : 0);
    if (hi < lo + 1)
        throw DetectionError("no dominant period");
    std::vector<double> r(hi + 2, 0.0);
    for (const auto& x : xs) {
        auto ri = autocorrelation(x, hi + 1);
        for (std::size_t k = 0; k < r.size(); ++k)
            r[k] += ri[k] / double(xs.size());
    }
    std::vector<std::size_t> peaks;
    double best = -1;
    for (std::size_t lag = lo; lag <= hi; ++lag)
        if (r[lag] > r[lag - 1] && r[lag] >= r[lag + 1] && r[lag] >= min_corr) {
            peaks.push_back(lag);
            best = std::max(best, r[lag]);
        }
    if (peaks.empty())
        throw DetectionError("no dominant period");
    // A multiple of the period correlates almost as well; take the first near-best peak.
    std::size_t lag = peaks.front();
    for (std::size_t p : peaks)
        if (r[p] >= best - 0.05) {
            lag = p;
            break;
        }
    double offset = 0;
    const double den = r[lag - 1] - 2 * r[lag] + r[lag + 1];
    if (den < 0)
        offset = std::clamp(0.5 * (r[lag - 1] - r[lag + 1]) / den, -0.5, 0.5);
    return (double(lag) + offset) / fs;
}

double dominant_period(const std::vector<double>& x, double fs, double min_s, double max_s, double min_corr) {
    return dominant_period(std::vector<std::vector<double>>{x}, fs, min_s, max_s, min_corr);
}

GaitContext estimate_gait_context(const Trial& trial) { return estimate_gait_context(trial, DetectorConfig{}); }

GaitContext estimate_gait_context(const Trial& trial, const DetectorConfig& cfg) {
    const auto p = detail::prepare(trial, cfg);
    std::vector<std::vector<double>> rel(2, std::vector<double>(p.n));
    for (int s = 0; s < 2; ++s)
        for (std::size_t i = 0; i < p.n; ++i)
            rel[s][i] = p.heel[s][0][i] - p.pelvis[0][i];
    GaitContext ctx;
    ctx.gait_period = dominant_period(rel, p.fs);
    ctx.gait_frequency = 1.0 / ctx.gait_period;
    ctx.walking_speed = std::abs(median(derivative(p.pelvis[0], p.fs)));
    return ctx;
}

} // namespace gaitevt
