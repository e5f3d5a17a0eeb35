// SPDX-License-Identifier: Apache-2.0
#include "gaitevt/detectors.hpp"

#include "gaitevt/error.hpp"
#include "prepare.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <tuple>
#include <utility>

namespace gaitevt {

namespace {

using detail::Prepared;
using detail::Series3;

constexpr Side kSides[2] = {Side::left, Side::right};

// One detection channel (HS or TO on one side).
struct Channel {
    std::vector<std::size_t> frames;
    std::vector<double> score;     // larger = more pronounced, indexed by frame
    std::function<double(std::size_t)> refine; // fractional frame, used with subframe refinement
    std::vector<char> fallback;    // parallel to frames, optional
};

struct Ctx {
    const Prepared& p;
    const GaitContext& g;
    const DetectorConfig& cfg;
    // Frames where the pelvis moves forward at walking pace. Standing before or after
    // the walk is treated like the trial edge.
    std::size_t walk_first = 0;
    std::size_t walk_last = 0;

    std::size_t separation() const {
        return std::max<std::size_t>(1, std::size_t(std::lround(cfg.min_event_separation_frac * g.gait_period * p.fs)));
    }
    std::size_t expected() const {
        return std::max<std::size_t>(1, std::size_t(double(walk_last - walk_first + 1) / (g.gait_period * p.fs)));
    }
    // Frames next to the ends of the walk carry filter transients, roughly one
    // settling time of the smoothing filter.
    std::size_t guard() const {
        return std::max(3 * std::size_t(cfg.filter_order), std::size_t(std::ceil(p.fs / cfg.smoothing_cutoff)));
    }
    // Candidate search range, inclusive. Empty when lo > hi.
    std::pair<std::size_t, std::size_t> usable() const {
        const std::size_t g = guard();
        const std::size_t lo = walk_first + g;
        const std::size_t hi = walk_last >= g ? walk_last - g : 0;
        return {lo, std::min(hi, p.n - 1)};
    }
    // Runs pick on the usable part of x and maps the frames back.
    template <typename F>
    std::vector<std::size_t> within(const std::vector<double>& x, F pick) const {
        const auto [lo, hi] = usable();
        if (lo >= hi)
            return {};
        const std::vector<double> part(x.begin() + std::ptrdiff_t(lo), x.begin() + std::ptrdiff_t(hi) + 1);
        auto frames = pick(part);
        for (auto& f : frames)
            f += lo;
        return frames;
    }
};

// First and last frame with pelvis AP speed of at least half the walking speed.
std::pair<std::size_t, std::size_t> walking_span(const Prepared& p, const GaitContext& g) {
    const auto v = derivative(p.pelvis[0], p.fs);
    const double thr = 0.5 * g.walking_speed;
    std::size_t first = 0, last = p.n - 1;
    while (first < last && std::abs(v[first]) < thr)
        ++first;
    while (last > first && std::abs(v[last]) < thr)
        --last;
    return {first, last};
}

std::vector<double> minus(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] - b[i];
    return out;
}

std::vector<double> negated(std::vector<double> v) {
    for (double& x : v)
        x = -x;
    return v;
}

std::function<double(std::size_t)> parabolic(std::vector<double> y) {
    return [y = std::move(y)](std::size_t f) {
        if (f == 0 || f + 1 >= y.size())
            return double(f);
        const double den = y[f - 1] - 2 * y[f] + y[f + 1];
        if (!(den < 0))
            return double(f);
        return double(f) + std::clamp(0.5 * (y[f - 1] - y[f + 1]) / den, -0.5, 0.5);
    };
}

std::function<double(std::size_t)> linear_crossing(std::vector<double> y, double thr) {
    return [y = std::move(y), thr](std::size_t f) {
        if (f == 0 || y[f] == y[f - 1])
            return double(f);
        return double(f - 1) + std::clamp((thr - y[f - 1]) / (y[f] - y[f - 1]), 0.0, 1.0);
    };
}

// Extremum channel: score is the signal oriented so that the event is a maximum.
Channel extrema_channel(const Ctx& c, const std::vector<double>& x, ExtremumKind kind) {
    Channel ch;
    ExtremaOptions o;
    o.min_separation = c.separation();
    o.prominence = c.cfg.extrema_prominence;
    o.expected_count = c.expected();
    ch.frames = c.within(x, [&](const std::vector<double>& part) { return local_extrema(part, kind, o); });
    ch.score = kind == ExtremumKind::max ? x : negated(x);
    ch.refine = parabolic(ch.score);
    return ch;
}

// Greedy same-kind pruning, strongest first, earliest on ties.
std::vector<std::size_t> prune(const std::vector<std::size_t>& frames, const std::vector<double>& score,
                               std::size_t sep) {
    std::vector<std::size_t> order(frames.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score[frames[a]] > score[frames[b]]; });
    std::vector<char> keep(frames.size(), 1);
    for (std::size_t o : order) {
        if (!keep[o])
            continue;
        for (std::size_t j = 0; j < frames.size(); ++j)
            if (j != o && keep[j] && (frames[j] > frames[o] ? frames[j] - frames[o] : frames[o] - frames[j]) < sep)
                keep[j] = 0;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < frames.size(); ++i)
        if (keep[i])
            out.push_back(frames[i]);
    std::sort(out.begin(), out.end());
    return out;
}

struct Tagged {
    std::size_t frame;
    EventKind kind;
    double score;
    bool fallback;
    double time;
};

void emit_side(DetectionResult& r, const Ctx& c, int side, Channel hs, Channel to) {
    const auto [lo, hi] = c.usable();
    std::vector<Tagged> ev;
    auto add = [&](const Channel& ch, EventKind k) {
        for (std::size_t i = 0; i < ch.frames.size(); ++i) {
            const std::size_t f = ch.frames[i];
            if (f < lo || f > hi)
                continue;
            const bool fb = i < ch.fallback.size() && ch.fallback[i];
            const double t = c.cfg.subframe_refinement && ch.refine ? ch.refine(f) / c.p.fs : double(f) / c.p.fs;
            ev.push_back({f, k, ch.score.empty() ? 0.0 : ch.score[f], fb, t});
        }
    };
    add(hs, EventKind::hs);
    add(to, EventKind::to);
    std::stable_sort(ev.begin(), ev.end(), [](const Tagged& a, const Tagged& b) {
        return a.frame != b.frame ? a.frame < b.frame : a.kind < b.kind;
    });
    // Alternation: of two consecutive same-kind events keep the more pronounced, earlier on ties.
    std::vector<Tagged> alt;
    for (const auto& e : ev) {
        if (!alt.empty() && alt.back().kind == e.kind) {
            if (e.score > alt.back().score)
                alt.back() = e;
            continue;
        }
        alt.push_back(e);
    }
    // Events near unrepairable gaps are unreliable.
    const double halo = 0.5 * c.g.gait_period * c.p.fs;
    std::size_t dropped = 0;
    for (const auto& e : alt) {
        bool bad = false;
        for (const auto& span : c.p.invalid[side])
            if (double(e.frame) >= double(span.first) - halo && double(e.frame) <= double(span.last) + halo)
                bad = true;
        if (bad) {
            ++dropped;
            continue;
        }
        r.events.push_back({kSides[side], e.kind, long(e.frame), e.time, r.method});
        r.diagnostics.push_back({e.score, e.fallback});
    }
    const char* sc = side_code(kSides[side]);
    if (dropped)
        r.notes.push_back(std::string(sc) + ": " + std::to_string(dropped) + " event(s) dropped near marker gaps");
    if (hs.frames.empty())
        r.notes.push_back(std::string(sc) + ": no HS candidates");
    if (to.frames.empty())
        r.notes.push_back(std::string(sc) + ": no TO candidates");
}

void finish(DetectionResult& r) {
    std::vector<std::size_t> idx(r.events.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto key = [&](std::size_t i) {
        const auto& e = r.events[i];
        return std::make_tuple(e.time, e.frame, int(e.side), int(e.kind));
    };
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    DetectionResult out{r.method, {}, {}, r.notes};
    for (std::size_t i : idx) {
        out.events.push_back(r.events[i]);
        out.diagnostics.push_back(r.diagnostics[i]);
    }
    r = std::move(out);
}

std::vector<double> speed(const Series3& pos, double fs, bool sagittal_only) {
    const auto vx = derivative(pos[0], fs);
    const auto vy = derivative(pos[1], fs);
    const auto vz = derivative(pos[2], fs);
    std::vector<double> s(vx.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = sagittal_only ? std::hypot(vx[i], vz[i]) : std::sqrt(vx[i] * vx[i] + vy[i] * vy[i] + vz[i] * vz[i]);
    return s;
}

template <typename F>
DetectionResult run(const char* method, const Trial& trial, const GaitContext& g, const DetectorConfig& cfg, F per_side) {
    validate(cfg);
    if (!(g.gait_period > 0))
        throw DetectionError("no dominant period");
    const Prepared p = detail::prepare(trial, cfg);
    Ctx c{p, g, cfg};
    std::tie(c.walk_first, c.walk_last) = walking_span(p, g);
    DetectionResult r;
    r.method = method;
    for (int s = 0; s < 2; ++s)
        per_side(r, c, s);
    finish(r);
    return r;
}

// Keeps acceleration maxima confirmed by a +/- jerk sign change within one frame,
// moved to the interpolated jerk zero.
std::vector<std::size_t> jerk_validated(const std::vector<std::size_t>& peaks, const std::vector<double>& acc, double fs) {
    const auto jerk = derivative(acc, fs);
    std::vector<std::size_t> out;
    for (std::size_t f : peaks) {
        const std::size_t lo = f > 0 ? f - 1 : 0;
        const std::size_t hi = std::min(f + 1, jerk.size() - 1);
        bool found = false;
        double zero = 0;
        double best = 2.0;
        for (std::size_t j = lo; j < hi; ++j)
            if (jerk[j] > 0 && jerk[j + 1] <= 0) {
                double z = double(j) + jerk[j] / (jerk[j] - jerk[j + 1]);
                if (std::abs(z - double(f)) < best) {
                    best = std::abs(z - double(f));
                    zero = z;
                    found = true;
                }
            }
        if (!found && jerk[f] == 0) {
            zero = double(f);
            found = true;
        }
        if (found)
            out.push_back(std::size_t(std::lround(zero)));
    }
    return out;
}

} // namespace

DetectionResult detect_zeni(const Trial& trial, const GaitContext& g, const DetectorConfig& cfg) {
    return run("zeni", trial, g, cfg, [](DetectionResult& r, const Ctx& c, int s) {
        const auto heel = minus(c.p.heel[s][0], c.p.pelvis[0]);
        const auto toe = minus(c.p.toe[s][0], c.p.pelvis[0]);
        emit_side(r, c, s, extrema_channel(c, heel, ExtremumKind::max), extrema_channel(c, toe, ExtremumKind::min));
    });
}

DetectionResult detect_desailly(const Trial& trial, const GaitContext& g, const DetectorConfig& cfg) {
    return run("desailly", trial, g, cfg, [](DetectionResult& r, const Ctx& c, int s) {
        const int order = c.cfg.desailly_filter_order;
        const auto heel = butterworth_zero_phase(detrend(c.p.heel_raw[s][0]), c.p.fs,
                                                 c.cfg.desailly_hs_cutoff_mult * c.g.gait_frequency,
                                                 FilterKind::highpass, order);
        const auto toe = butterworth_zero_phase(detrend(c.p.toe_raw[s][0]), c.p.fs,
                                                c.cfg.desailly_to_cutoff_mult * c.g.gait_frequency,
                                                FilterKind::highpass, order);
        emit_side(r, c, s, extrema_channel(c, heel, ExtremumKind::max), extrema_channel(c, toe, ExtremumKind::min));
    });
}

DetectionResult detect_oconnor(const Trial& trial, const GaitContext& g, const DetectorConfig& cfg) {
    return run("oconnor", trial, g, cfg, [](DetectionResult& r, const Ctx& c, int s) {
        std::vector<double> mid(c.p.n);
        for (std::size_t i = 0; i < c.p.n; ++i)
            mid[i] = (c.p.heel[s][2][i] + c.p.toe[s][2][i]) / 2;
        const auto vz = derivative(mid, c.p.fs);
        emit_side(r, c, s, extrema_channel(c, vz, ExtremumKind::min), extrema_channel(c, vz, ExtremumKind::max));
    });
}

DetectionResult detect_ghoussayni(const Trial& trial, const GaitContext& g, const DetectorConfig& cfg) {
    return run("ghoussayni", trial, g, cfg, [](DetectionResult& r, const Ctx& c, int s) {
        const double thr = c.cfg.ghoussayni_speed_threshold;
        const std::size_t db = debounce_frames(c.cfg.debounce, c.p.fs);
        const auto heel = speed(c.p.heel[s], c.p.fs, true);
        const auto toe = speed(c.p.toe[s], c.p.fs, true);
        Channel hs, to;
        // Slower heel / faster toe = more pronounced; only consulted on alternation ties.
        hs.score = negated(heel);
        to.score = toe;
        auto crossings = [&](const std::vector<double>& x, Direction d) {
            return c.within(x, [&](const std::vector<double>& part) { return threshold_crossings(part, thr, d, db); });
        };
        hs.frames = prune(crossings(heel, Direction::falling), std::vector<double>(c.p.n, 0.0), c.separation());
        to.frames = prune(crossings(toe, Direction::rising), std::vector<double>(c.p.n, 0.0), c.separation());
        hs.refine = linear_crossing(heel, thr);
        to.refine = linear_crossing(toe, thr);
        const bool never_below = std::none_of(heel.begin(), heel.end(), [&](double v) { return v < thr; });
        if (never_below)
            r.notes.push_back(std::string(side_code(kSides[s])) + ": heel speed never below threshold");
        emit_side(r, c, s, std::move(hs), std::move(to));
    });
}

DetectionResult detect_hreljac(const Trial& trial, const GaitContext& g, const DetectorConfig& cfg) {
    return run("hreljac", trial, g, cfg, [](DetectionResult& r, const Ctx& c, int s) {
        const auto az = derivative(derivative(c.p.heel[s][2], c.p.fs), c.p.fs);
        const auto ax = derivative(derivative(c.p.toe[s][0], c.p.fs), c.p.fs);
        Channel hs = extrema_channel(c, az, ExtremumKind::max);
        Channel to = extrema_channel(c, ax, ExtremumKind::max);
        hs.frames = prune(jerk_validated(hs.frames, az, c.p.fs), hs.score, c.separation());
        to.frames = prune(jerk_validated(to.frames, ax, c.p.fs), to.score, c.separation());
        emit_side(r, c, s, std::move(hs), std::move(to));
    });
}

DetectionResult detect_hsue(const Trial& trial, const GaitContext& g, const DetectorConfig& cfg) {
    return run("hsue", trial, g, cfg, [](DetectionResult& r, const Ctx& c, int s) {
        const auto ah = derivative(derivative(c.p.heel[s][0], c.p.fs), c.p.fs);
        const auto at = derivative(derivative(c.p.toe[s][0], c.p.fs), c.p.fs);
        emit_side(r, c, s, extrema_channel(c, ah, ExtremumKind::min), extrema_channel(c, at, ExtremumKind::max));
    });
}

DetectionResult detect_bonci(const Trial& trial, const GaitContext& g, const DetectorConfig& cfg) {
    const DetectionResult seeds = detect_zeni(trial, g, cfg);
    return run("bonci", trial, g, cfg, [&seeds](DetectionResult& r, const Ctx& c, int s) {
        const std::size_t n = c.p.n;
        const auto hsp = speed(c.p.heel[s], c.p.fs, false);
        const auto tsp = speed(c.p.toe[s], c.p.fs, false);
        const std::size_t w = std::size_t(std::lround(0.25 * c.g.gait_period * c.p.fs));
        const double v = c.g.walking_speed;
        const double to_thr = c.cfg.bonci_mult * v;

        std::size_t fallbacks = 0;
        for (std::size_t i = 0; i < seeds.events.size(); ++i) {
            const GaitEvent& e = seeds.events[i];
            if (e.side != kSides[s])
                continue;
            const std::size_t f = std::size_t(e.frame);
            const std::size_t lo = f > w ? f - w : 0;
            const std::size_t hi = std::min(f + w, n - 1);
            std::optional<std::size_t> hit;
            double thr = to_thr;
            if (e.kind == EventKind::hs) {
                const bool rearfoot = c.p.heel[s][2][f] < c.p.toe[s][2][f];
                thr = (rearfoot ? c.cfg.bonci_rearfoot_mult : c.cfg.bonci_mult) * v;
                for (std::size_t k = f; k <= hi; ++k)
                    if (hsp[k] < thr) {
                        hit = k;
                        break;
                    }
            } else {
                auto first_rise = [&](std::size_t from) -> std::optional<std::size_t> {
                    for (std::size_t k = std::max<std::size_t>(from, 1); k <= hi; ++k)
                        if (tsp[k - 1] <= thr && tsp[k] > thr)
                            return k;
                    return std::nullopt;
                };
                hit = first_rise(lo);
                if (hit) {
                    // A heel speed peak above threshold before the candidate must already be past.
                    std::optional<std::size_t> peak;
                    for (std::size_t k = std::max<std::size_t>(lo, 1); k < *hit && k + 1 < n; ++k)
                        if (hsp[k] > hsp[k - 1] && hsp[k] >= hsp[k + 1] && hsp[k] > thr)
                            peak = k;
                    if (peak)
                        hit = first_rise(*peak + 1);
                }
            }
            GaitEvent out = e;
            out.source = r.method;
            EventDiagnostic d = seeds.diagnostics[i];
            if (hit) {
                out.frame = long(*hit);
                double fr = double(*hit);
                if (c.cfg.subframe_refinement)
                    fr = e.kind == EventKind::hs ? linear_crossing(hsp, thr)(*hit) : linear_crossing(tsp, thr)(*hit);
                out.time = fr / c.p.fs;
                d.fallback = false;
            } else {
                d.fallback = true;
                ++fallbacks;
            }
            r.events.push_back(out);
            r.diagnostics.push_back(d);
        }
        if (fallbacks)
            r.notes.push_back(std::string(side_code(kSides[s])) + ": " + std::to_string(fallbacks) +
                              " event(s) kept at the Zeni seed (fallback)");
    });
}

const std::vector<std::string>& method_names() {
    static const std::vector<std::string> names = {"zeni", "desailly", "oconnor", "ghoussayni",
                                                   "hreljac", "hsue", "bonci"};
    return names;
}

std::string canonical_method(const std::string& method) {
    std::string m = method;
    std::transform(m.begin(), m.end(), m.begin(), [](unsigned char ch) { return char(std::tolower(ch)); });
    for (const auto& n : method_names())
        if (n == m)
            return n;
    std::string list;
    for (const auto& n : method_names())
        list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown method '" + method + "'; valid methods: " + list);
}

DetectionResult detect(const std::string& method, const Trial& trial, const GaitContext& ctx,
                       const DetectorConfig& cfg) {
    const std::string m = canonical_method(method);
    if (m == "zeni")
        return detect_zeni(trial, ctx, cfg);
    if (m == "desailly")
        return detect_desailly(trial, ctx, cfg);
    if (m == "oconnor")
        return detect_oconnor(trial, ctx, cfg);
    if (m == "ghoussayni")
        return detect_ghoussayni(trial, ctx, cfg);
    if (m == "hreljac")
        return detect_hreljac(trial, ctx, cfg);
    if (m == "hsue")
        return detect_hsue(trial, ctx, cfg);
    return detect_bonci(trial, ctx, cfg);
}

DetectionResult run_detection(const std::string& method, const Trial& raw, const DetectorConfig& cfg) {
    const std::string m = canonical_method(method);
    validate(cfg);
    const Trial t = normalize_coordinates(raw);
    const GaitContext ctx = estimate_gait_context(t, cfg);
    return detect(m, t, ctx, cfg);
}

} // namespace gaitevt
