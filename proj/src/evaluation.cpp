// SPDX-License-Identifier: Apache-2.0
#include "gaitevt/evaluation.hpp"

#include "gaitevt/error.hpp"
#include "gaitevt/signal.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>
#include <tuple>

namespace gaitevt {

using nlohmann::ordered_json;

MatchResult match_events(const std::vector<GaitEvent>& truth, const std::vector<GaitEvent>& predicted,
                         double window_s) {
    struct Cand {
        double abs_delta;
        double earliest;
        std::size_t t, p;
    };
    std::vector<Cand> cands;
    for (std::size_t t = 0; t < truth.size(); ++t)
        for (std::size_t p = 0; p < predicted.size(); ++p) {
            if (truth[t].side != predicted[p].side || truth[t].kind != predicted[p].kind)
                continue;
            const double d = std::abs(predicted[p].time - truth[t].time);
            if (d <= window_s)
                cands.push_back({d, std::min(truth[t].time, predicted[p].time), t, p});
        }
    // Ties broken without reference to which side is "truth", so swapping inputs mirrors the result.
    std::stable_sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
        return std::tie(a.abs_delta, a.earliest) < std::tie(b.abs_delta, b.earliest);
    });
    std::vector<char> t_used(truth.size(), 0), p_used(predicted.size(), 0);
    MatchResult m;
    for (const auto& c : cands) {
        if (t_used[c.t] || p_used[c.p])
            continue;
        t_used[c.t] = p_used[c.p] = 1;
        m.pairs.push_back({{}, truth[c.t], predicted[c.p], predicted[c.p].time - truth[c.t].time});
    }
    std::stable_sort(m.pairs.begin(), m.pairs.end(), [](const MatchedPair& a, const MatchedPair& b) {
        return std::make_tuple(a.truth.time, int(a.truth.side), int(a.truth.kind)) <
               std::make_tuple(b.truth.time, int(b.truth.side), int(b.truth.kind));
    });
    for (std::size_t t = 0; t < truth.size(); ++t)
        if (!t_used[t])
            m.missed.push_back(truth[t]);
    for (std::size_t p = 0; p < predicted.size(); ++p)
        if (!p_used[p])
            m.spurious.push_back(predicted[p]);
    return m;
}

double default_window(const std::vector<GaitEvent>& truth) {
    for (EventKind k : {EventKind::hs, EventKind::to}) {
        std::vector<double> gaps;
        for (Side s : {Side::left, Side::right}) {
            auto ev = select(truth, s, k);
            std::sort(ev.begin(), ev.end(), [](const GaitEvent& a, const GaitEvent& b) { return a.time < b.time; });
            for (std::size_t i = 1; i < ev.size(); ++i)
                gaps.push_back(ev[i].time - ev[i - 1].time);
        }
        if (!gaps.empty())
            return 0.5 * median(gaps);
    }
    return 0.5;
}

Histogram histogram(const std::vector<double>& deltas_ms, double w) {
    Histogram h;
    h.bin_width_ms = w;
    if (deltas_ms.empty())
        return h;
    // Bins are centred on multiples of the width, so frame-grid deltas sit mid-bin.
    std::vector<long> idx;
    for (double d : deltas_ms)
        idx.push_back(long(std::floor(d / w + 0.5)));
    const long lo = *std::min_element(idx.begin(), idx.end());
    const long hi = *std::max_element(idx.begin(), idx.end());
    h.counts.assign(std::size_t(hi - lo + 1), 0);
    for (long i : idx)
        ++h.counts[std::size_t(i - lo)];
    for (long i = lo; i <= hi + 1; ++i)
        h.edges.push_back(double(i) * w - w / 2);
    return h;
}

namespace {

KindSummary summarize_kind(const EvaluationReport& r, EventKind k) {
    KindSummary s;
    std::vector<double> d;
    for (const auto& p : r.pairs)
        if (p.truth.kind == k)
            d.push_back(p.delta * 1000.0);
    // Sorted so that the statistics do not depend on pair order.
    std::sort(d.begin(), d.end());
    if (!d.empty()) {
        double sum = 0;
        for (double v : d)
            sum += v;
        const double mean = sum / double(d.size());
        s.mean_ms = mean;
        if (d.size() >= 2) {
            double ss = 0;
            for (double v : d)
                ss += (v - mean) * (v - mean);
            s.std_ms = std::sqrt(ss / double(d.size() - 1));
        }
    }
    for (int side = 0; side < 2; ++side) {
        const auto& c = r.counts[side][int(k)];
        s.counts.matched += c.matched;
        s.counts.missed += c.missed;
        s.counts.spurious += c.spurious;
    }
    if (s.counts.matched + s.counts.missed > 0)
        s.detection_rate = double(s.counts.matched) / double(s.counts.matched + s.counts.missed);
    s.histogram = histogram(d, r.bin_width_ms);
    return s;
}

} // namespace

void refresh_summary(EvaluationReport& r) {
    r.hs = summarize_kind(r, EventKind::hs);
    r.to = summarize_kind(r, EventKind::to);
}

void accumulate(EvaluationReport& r, const MatchResult& m, const std::string& trial_id) {
    for (auto p : m.pairs) {
        if (!trial_id.empty())
            p.trial = trial_id;
        ++r.counts[int(p.truth.side)][int(p.truth.kind)].matched;
        r.pairs.push_back(std::move(p));
    }
    for (const auto& e : m.missed)
        ++r.counts[int(e.side)][int(e.kind)].missed;
    for (const auto& e : m.spurious)
        ++r.counts[int(e.side)][int(e.kind)].spurious;
    ++r.trials;
    refresh_summary(r);
}

void merge(EvaluationReport& dst, const EvaluationReport& src) {
    dst.pairs.insert(dst.pairs.end(), src.pairs.begin(), src.pairs.end());
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < 2; ++k) {
            dst.counts[s][k].matched += src.counts[s][k].matched;
            dst.counts[s][k].missed += src.counts[s][k].missed;
            dst.counts[s][k].spurious += src.counts[s][k].spurious;
        }
    dst.trials += src.trials;
    dst.skipped += src.skipped;
    refresh_summary(dst);
}

EvaluationReport summarize(const MatchResult& m, const std::string& method, double bin_width_ms) {
    EvaluationReport r;
    r.method = method;
    r.bin_width_ms = bin_width_ms;
    accumulate(r, m);
    return r;
}

namespace {

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json kind_json(const KindSummary& s) {
    ordered_json j;
    j["mean_ms"] = opt(s.mean_ms);
    j["std_ms"] = opt(s.std_ms);
    j["detection_rate"] = opt(s.detection_rate);
    j["n_matched"] = s.counts.matched;
    j["n_missed"] = s.counts.missed;
    j["n_spurious"] = s.counts.spurious;
    j["histogram"] = {{"bin_width_ms", s.histogram.bin_width_ms},
                      {"edges_ms", s.histogram.edges},
                      {"counts", s.histogram.counts}};
    return j;
}

ordered_json event_json(const GaitEvent& e) {
    return {{"side", side_code(e.side)}, {"kind", kind_code(e.kind)}, {"frame", e.frame}, {"time_s", e.time},
            {"source", e.source}};
}

GaitEvent event_from(const nlohmann::json& j) {
    GaitEvent e;
    const std::string side = j.at("side").get<std::string>();
    const std::string kind = j.at("kind").get<std::string>();
    if (side != "L" && side != "R")
        throw FormatError("report parse error: bad side '" + side + "'");
    if (kind != "HS" && kind != "TO")
        throw FormatError("report parse error: bad kind '" + kind + "'");
    e.side = side == "L" ? Side::left : Side::right;
    e.kind = kind == "HS" ? EventKind::hs : EventKind::to;
    e.frame = j.at("frame").get<long>();
    e.time = j.at("time_s").get<double>();
    e.source = j.at("source").get<std::string>();
    return e;
}

} // namespace

std::string report_to_json(const EvaluationReport& r) {
    ordered_json j;
    j["schema"] = r.schema;
    j["method"] = r.method;
    j["trials"] = r.trials;
    j["skipped"] = r.skipped;
    j["bin_width_ms"] = r.bin_width_ms;
    j["summary"] = {{"HS", kind_json(r.hs)}, {"TO", kind_json(r.to)}};
    ordered_json counts;
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < 2; ++k) {
            const auto& c = r.counts[s][k];
            counts[side_code(Side(s))][kind_code(EventKind(k))] = {
                {"matched", c.matched}, {"missed", c.missed}, {"spurious", c.spurious}};
        }
    j["counts"] = counts;
    ordered_json pairs = ordered_json::array();
    for (const auto& p : r.pairs)
        pairs.push_back({{"trial", p.trial},
                         {"truth", event_json(p.truth)},
                         {"predicted", event_json(p.predicted)},
                         {"delta_s", p.delta},
                         {"delta_ms", p.delta * 1000.0}});
    j["pairs"] = pairs;
    return j.dump(2) + "\n";
}

EvaluationReport report_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("report parse error: ") + e.what());
    }
    try {
        EvaluationReport r;
        r.schema = j.at("schema").get<int>();
        if (r.schema != kReportSchema)
            throw FormatError("report parse error: unsupported schema " + std::to_string(r.schema));
        r.method = j.at("method").get<std::string>();
        r.trials = j.at("trials").get<std::size_t>();
        r.skipped = j.at("skipped").get<std::size_t>();
        r.bin_width_ms = j.at("bin_width_ms").get<double>();
        for (int s = 0; s < 2; ++s)
            for (int k = 0; k < 2; ++k) {
                const auto& c = j.at("counts").at(side_code(Side(s))).at(kind_code(EventKind(k)));
                r.counts[s][k] = {c.at("matched").get<std::size_t>(), c.at("missed").get<std::size_t>(),
                                  c.at("spurious").get<std::size_t>()};
            }
        for (const auto& p : j.at("pairs"))
            r.pairs.push_back({p.at("trial").get<std::string>(), event_from(p.at("truth")),
                               event_from(p.at("predicted")), p.at("delta_s").get<double>()});
        refresh_summary(r);
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("report parse error: ") + e.what());
    }
}

std::string report_to_csv(const EvaluationReport& r) {
    std::ostringstream os;
    os << "trial,method,side,kind,truth_frame,truth_time_s,pred_frame,pred_time_s,delta_ms\n";
    for (const auto& p : r.pairs)
        os << p.trial << ',' << r.method << ',' << side_code(p.truth.side) << ',' << kind_code(p.truth.kind) << ','
           << p.truth.frame << ',' << detail::format_double(p.truth.time) << ',' << p.predicted.frame << ','
           << detail::format_double(p.predicted.time) << ',' << detail::format_double(p.delta * 1000.0) << '\n';
    return os.str();
}

void export_report(const EvaluationReport& r, const std::string& path, ReportFormat fmt) {
    detail::write_file(path, fmt == ReportFormat::json ? report_to_json(r) : report_to_csv(r));
}

EvaluationReport import_report(const std::string& path) { return report_from_json(detail::read_file(path)); }

namespace {

std::string cell(const std::optional<double>& v, int width, int prec) {
    char buf[64];
    if (!v)
        std::snprintf(buf, sizeof buf, "%*s", width, "n/a");
    else
        std::snprintf(buf, sizeof buf, "%*.*f", width, prec, std::abs(*v) < 0.5 * std::pow(10.0, -prec) ? 0.0 : *v);
    return buf;
}

std::optional<double> percent(const std::optional<double>& v) {
    return v ? std::optional<double>(*v * 100.0) : std::nullopt;
}

} // namespace

std::string format_comparison_table(const std::vector<EvaluationReport>& reports) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-12s %12s %12s %12s %12s %10s %10s\n", "method", "HS mean(ms)", "HS STD(ms)",
                  "TO mean(ms)", "TO STD(ms)", "HS det(%)", "TO det(%)");
    os << buf;
    std::size_t trials = 0, skipped = 0;
    for (const auto& r : reports) {
        char name[32];
        std::snprintf(name, sizeof name, "%-12s", r.method.c_str());
        os << name << ' ' << cell(r.hs.mean_ms, 12, 2) << ' ' << cell(r.hs.std_ms, 12, 2) << ' '
           << cell(r.to.mean_ms, 12, 2) << ' ' << cell(r.to.std_ms, 12, 2) << ' '
           << cell(percent(r.hs.detection_rate), 10, 1) << ' ' << cell(percent(r.to.detection_rate), 10, 1) << '\n';
        trials = std::max(trials, r.trials);
        skipped = std::max(skipped, r.skipped);
    }
    os << "trials: " << trials << ", skipped: " << skipped << '\n';
    return os.str();
}

std::string comparison_to_json(const std::vector<EvaluationReport>& reports) {
    ordered_json j;
    j["schema"] = kReportSchema;
    std::size_t trials = 0, skipped = 0;
    ordered_json rows = ordered_json::array();
    for (const auto& r : reports) {
        ordered_json row;
        row["method"] = r.method;
        for (EventKind k : {EventKind::hs, EventKind::to}) {
            const auto& s = r.summary(k);
            row[kind_code(k)] = {{"mean_ms", opt(s.mean_ms)},       {"std_ms", opt(s.std_ms)},
                                 {"detection_rate", opt(s.detection_rate)}, {"n_matched", s.counts.matched},
                                 {"n_missed", s.counts.missed},     {"n_spurious", s.counts.spurious}};
        }
        rows.push_back(row);
        trials = std::max(trials, r.trials);
        skipped = std::max(skipped, r.skipped);
    }
    j["trials"] = trials;
    j["skipped"] = skipped;
    j["methods"] = rows;
    return j.dump(2) + "\n";
}

} // namespace gaitevt
