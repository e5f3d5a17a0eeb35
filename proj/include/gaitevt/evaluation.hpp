// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gaitevt/events.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace gaitevt {

inline constexpr int kReportSchema = 1;

struct MatchedPair {
    std::string trial;
    GaitEvent truth;
    GaitEvent predicted;
    double delta = 0; // s, predicted - truth

    bool operator==(const MatchedPair&) const = default;
};

struct MatchResult {
    std::vector<MatchedPair> pairs;
    std::vector<GaitEvent> missed;   // truth without partner
    std::vector<GaitEvent> spurious; // predictions without partner
};

// Greedy one-to-one matching by ascending |delta| within +-window_s.
MatchResult match_events(const std::vector<GaitEvent>& truth, const std::vector<GaitEvent>& predicted, double window_s);

// 0.5 x median same-side HS interval of the truth events (TO intervals if no HS pairs, else 0.5 s).
double default_window(const std::vector<GaitEvent>& truth);

struct Counts {
    std::size_t matched = 0;
    std::size_t missed = 0;
    std::size_t spurious = 0;
    bool operator==(const Counts&) const = default;
};

struct Histogram {
    double bin_width_ms = 5.0;
    std::vector<double> edges; // size counts + 1, empty when no pairs
    std::vector<std::size_t> counts;
    bool operator==(const Histogram&) const = default;
};

struct KindSummary {
    std::optional<double> mean_ms;
    std::optional<double> std_ms; // n-1 denominator, needs two pairs
    std::optional<double> detection_rate;
    Counts counts;
    Histogram histogram;
    bool operator==(const KindSummary&) const = default;
};

struct EvaluationReport {
    int schema = kReportSchema;
    std::string method;
    std::size_t trials = 0;
    std::size_t skipped = 0;
    double bin_width_ms = 5.0;
    std::vector<MatchedPair> pairs;
    std::array<std::array<Counts, 2>, 2> counts{}; // [side][kind]
    KindSummary hs;
    KindSummary to;

    const KindSummary& summary(EventKind k) const { return k == EventKind::hs ? hs : to; }
    bool operator==(const EvaluationReport&) const = default;
};

// Adds one trial's matching outcome and refreshes the summaries.
void accumulate(EvaluationReport& report, const MatchResult& m, const std::string& trial_id = {});
// Appends src's pairs and counts to dst (pooling, not averaging).
void merge(EvaluationReport& dst, const EvaluationReport& src);
void refresh_summary(EvaluationReport& report);

EvaluationReport summarize(const MatchResult& m, const std::string& method, double bin_width_ms = 5.0);

Histogram histogram(const std::vector<double>& deltas_ms, double bin_width_ms);

std::string report_to_json(const EvaluationReport& r);
EvaluationReport report_from_json(const std::string& text);
std::string report_to_csv(const EvaluationReport& r);

enum class ReportFormat { json, csv };
void export_report(const EvaluationReport& r, const std::string& path, ReportFormat fmt);
EvaluationReport import_report(const std::string& path);

// One row per method with HS/TO mean and STD in ms.
std::string format_comparison_table(const std::vector<EvaluationReport>& reports);
std::string comparison_to_json(const std::vector<EvaluationReport>& reports);

} // namespace gaitevt
