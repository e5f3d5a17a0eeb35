// SPDX-License-Identifier: Apache-2.0
#include "suite.hpp"

#include "gaitevt/detectors.hpp"
#include "gaitevt/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <tuple>

namespace gaitevt::testing {

std::vector<SuiteTrial> make_suite(std::size_t count, double noise_std, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> period(1.0, 1.3), speed(0.9, 1.4);
    std::vector<SuiteTrial> out;
    for (std::size_t i = 0; i < count; ++i) {
        SuiteTrial s;
        s.spec.gait_period = period(rng);
        s.spec.walking_speed = speed(rng);
        s.spec.noise_std = noise_std;
        s.spec.seed = seed + i;
        s.data = generate(s.spec, "suite_" + std::to_string(i));
        s.truth = schedule_events(s.data.schedule, s.spec.sample_rate);
        out.push_back(std::move(s));
    }
    return out;
}

Trial translated(const Trial& t, const Vec3& offset) {
    Trial out = t;
    for (auto& m : out.markers)
        for (auto& s : m.samples)
            for (int a = 0; a < 3; ++a)
                s[a] += offset[a];
    return out;
}

Trial mirrored(const Trial& t) {
    Trial out = t;
    for (auto& m : out.markers) {
        if (!m.name.empty() && (m.name[0] == 'L' || m.name[0] == 'R'))
            m.name[0] = m.name[0] == 'L' ? 'R' : 'L';
    }
    std::swap(out.grf_left, out.grf_right);
    return out;
}

Trial with_static_prefix(const Trial& t, std::size_t k) {
    Trial out = t;
    for (auto& m : out.markers)
        m.samples.insert(m.samples.begin(), k, m.samples.front());
    for (auto* g : {&out.grf_left, &out.grf_right})
        if (*g)
            (*g)->insert((*g)->begin(), k, 0.0);
    return out;
}

namespace {

std::string describe(const GaitEvent& e) {
    std::ostringstream os;
    os << side_code(e.side) << ' ' << kind_code(e.kind) << " @" << e.frame;
    return os.str();
}

using Key = std::tuple<long, int, int>;

std::vector<Key> keys(const std::vector<GaitEvent>& ev, bool swap_sides = false, long shift = 0) {
    std::vector<Key> k;
    for (const auto& e : ev)
        k.emplace_back(e.frame - shift, swap_sides ? 1 - int(e.side) : int(e.side), int(e.kind));
    std::sort(k.begin(), k.end());
    return k;
}

} // namespace

std::string check_translation(const Trial& raw, const std::string& method, const Vec3& offset) {
    const DetectorConfig cfg;
    const auto a = run_detection(method, raw, cfg);
    const auto b = run_detection(method, translated(raw, offset), cfg);
    if (a.events.size() != b.events.size())
        return method + ": translation changed the event count " + std::to_string(a.events.size()) + " -> " +
               std::to_string(b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i)
        if (!(a.events[i] == b.events[i]))
            return method + ": translation moved " + describe(a.events[i]) + " to " + describe(b.events[i]);
    return {};
}

std::string check_mirror(const Trial& raw, const std::string& method) {
    const DetectorConfig cfg;
    const auto a = run_detection(method, raw, cfg);
    const auto b = run_detection(method, mirrored(raw), cfg);
    if (keys(a.events) != keys(b.events, true))
        return method + ": mirrored trial does not reproduce the events with swapped sides";
    for (const auto& e : b.events) {
        auto it = std::find_if(a.events.begin(), a.events.end(), [&](const GaitEvent& o) {
            return o.frame == e.frame && o.kind == e.kind && o.side != e.side;
        });
        if (it == a.events.end() || it->time != e.time)
            return method + ": mirrored event time differs at " + describe(e);
    }
    return {};
}

std::string check_time_shift(const Trial& raw, const std::string& method, std::size_t k) {
    const DetectorConfig cfg;
    const auto a = run_detection(method, raw, cfg);
    const auto b = run_detection(method, with_static_prefix(raw, k), cfg);
    auto ka = keys(a.events);
    auto kb = keys(b.events, false, long(k));
    if (ka.size() != kb.size())
        return method + ": prefix of " + std::to_string(k) + " frames changed the event count " +
               std::to_string(ka.size()) + " -> " + std::to_string(kb.size());
    // Pair per side and kind in order; frames may move by one.
    std::map<std::pair<int, int>, std::vector<long>> fa, fb;
    for (const auto& [f, s, kd] : ka)
        fa[{s, kd}].push_back(f);
    for (const auto& [f, s, kd] : kb)
        fb[{s, kd}].push_back(f);
    for (const auto& [key, frames] : fa) {
        const auto& other = fb[key];
        if (other.size() != frames.size())
            return method + ": prefix changed the per-side event count";
        for (std::size_t i = 0; i < frames.size(); ++i)
            if (std::labs(frames[i] - other[i]) > 1)
                return method + ": prefix of " + std::to_string(k) + " frames moved an event from " +
                       std::to_string(frames[i]) + " to " + std::to_string(other[i]) + " (shift removed)";
    }
    return {};
}

std::string check_bonci_fallback(const Trial& raw) {
    DetectorConfig cfg;
    // Thresholds no noisy speed can fall below, so every refinement falls back.
    cfg.bonci_mult = 1e-9;
    cfg.bonci_rearfoot_mult = 1e-9;
    const auto z = run_detection("zeni", raw, cfg);
    const auto b = run_detection("bonci", raw, cfg);
    if (z.events.size() != b.events.size())
        return "bonci fallback: event count differs from zeni";
    for (std::size_t i = 0; i < z.events.size(); ++i) {
        const auto& e = z.events[i];
        const auto& f = b.events[i];
        if (e.side != f.side || e.kind != f.kind || e.frame != f.frame || e.time != f.time)
            return "bonci fallback: " + describe(f) + " differs from zeni " + describe(e);
        if (!b.diagnostics[i].fallback)
            return "bonci fallback: " + describe(f) + " not flagged as fallback";
    }
    return {};
}

namespace {

double prominence_by_definition(const std::vector<double>& y, std::size_t i) {
    const double h = y[i];
    std::size_t lo = i, hi = i;
    while (lo > 0 && y[lo - 1] <= h)
        --lo;
    while (hi + 1 < y.size() && y[hi + 1] <= h)
        ++hi;
    const double left = *std::min_element(y.begin() + std::ptrdiff_t(lo), y.begin() + std::ptrdiff_t(i) + 1);
    const double right = *std::min_element(y.begin() + std::ptrdiff_t(i), y.begin() + std::ptrdiff_t(hi) + 1);
    return h - std::max(left, right);
}

} // namespace

std::vector<std::size_t> exhaustive_extrema(const std::vector<double>& x, ExtremumKind kind, std::size_t min_sep,
                                            double prominence) {
    std::vector<double> y = x;
    if (kind == ExtremumKind::min)
        for (auto& v : y)
            v = -v;
    const std::size_t n = y.size();
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t a = i, b = i;
        while (a > 0 && y[a - 1] == y[i])
            --a;
        while (b + 1 < n && y[b + 1] == y[i])
            ++b;
        if (a == 0 || b == n - 1)
            continue;
        if (y[a - 1] < y[i] && y[b + 1] < y[i] && i == (a + b) / 2 && prominence_by_definition(y, i) >= prominence)
            cand.push_back(i);
    }
    if (cand.size() > 20)
        throw std::runtime_error("exhaustive_extrema: too many candidates for subset scan");
    // Rank by height, earlier index first on ties. Rank 0 maps to the top bit, so the
    // numerically largest conflict-free mask keeps the most extreme candidates first.
    std::vector<std::size_t> rank(cand.size());
    for (std::size_t i = 0; i < rank.size(); ++i)
        rank[i] = i;
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t p, std::size_t q) { return y[cand[p]] > y[cand[q]]; });
    const std::size_t m = cand.size();
    std::vector<std::uint32_t> conflict(m, 0);
    for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = 0; q < m; ++q) {
            const std::size_t ip = cand[rank[p]], iq = cand[rank[q]];
            const std::size_t d = ip > iq ? ip - iq : iq - ip;
            if (p != q && d < min_sep)
                conflict[m - 1 - p] |= std::uint32_t(1) << (m - 1 - q);
        }
    std::uint32_t best = 0;
    for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << m); ++mask) {
        bool ok = true;
        for (std::size_t b = 0; b < m && ok; ++b)
            if ((mask >> b & 1u) && (mask & conflict[b]))
                ok = false;
        if (ok)
            best = std::max(best, mask);
    }
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < m; ++p)
        if (best >> (m - 1 - p) & 1u)
            out.push_back(cand[rank[p]]);
    std::sort(out.begin(), out.end());
    return out;
}

std::string check_extrema_oracle(std::size_t n_series, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> freq(0.01, 0.07), amp(0.2, 1.0), phase(0, 2 * std::numbers::pi);
    std::uniform_int_distribution<int> sep(1, 10);
    const double proms[] = {0.0, 0.05, 0.3};
    for (std::size_t s = 0; s < n_series; ++s) {
        std::vector<double> x(64, 0.0);
        for (int k = 0; k < 4; ++k) {
            const double f = freq(rng), a = amp(rng), p = phase(rng);
            for (std::size_t i = 0; i < x.size(); ++i)
                x[i] += a * std::sin(2 * std::numbers::pi * f * double(i) + p);
        }
        // Every other series is quantized so flat tops occur.
        if (s % 2)
            for (auto& v : x)
                v = std::round(v * 5) / 5;
        ExtremaOptions o;
        o.min_separation = std::size_t(sep(rng));
        o.prominence = proms[s % 3];
        for (auto kind : {ExtremumKind::max, ExtremumKind::min}) {
            const auto got = local_extrema(x, kind, o);
            const auto want = exhaustive_extrema(x, kind, o.min_separation, *o.prominence);
            if (got != want)
                return "extrema: series " + std::to_string(s) + " differs from the exhaustive scan";
        }
    }
    return {};
}

std::string check_zero_phase_peaks(std::size_t n_cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> freq(0.3, 5.0), phase(0, 2 * std::numbers::pi);
    const double fs = 200, cutoff = 10;
    for (std::size_t c = 0; c < n_cases; ++c) {
        const double f = freq(rng), p = phase(rng);
        std::vector<double> x(600);
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = std::sin(2 * std::numbers::pi * f * double(i) / fs + p);
        const auto y = butterworth_zero_phase(x, fs, cutoff, FilterKind::lowpass);
        const auto half = std::size_t(fs / (4 * f));
        for (std::size_t i = half; i + half < x.size(); ++i) {
            if (!(x[i] >= x[i - 1] && x[i] > x[i + 1]))
                continue;
            auto first = y.begin() + std::ptrdiff_t(i - half), last = y.begin() + std::ptrdiff_t(i + half) + 1;
            const auto q = std::size_t(std::max_element(first, last) - y.begin());
            if ((q > i ? q - i : i - q) > 1)
                return "zero phase: " + std::to_string(f) + " Hz peak at " + std::to_string(i) + " moved to " +
                       std::to_string(q);
        }
    }
    return {};
}

} // namespace gaitevt::testing
