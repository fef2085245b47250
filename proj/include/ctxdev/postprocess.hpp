#pragma once

#include "ctxdev/context.hpp"
#include "ctxdev/errors.hpp"
#include "ctxdev/event_log.hpp"
#include "ctxdev/io_csv.hpp"
#include "ctxdev/labels.hpp"
#include "ctxdev/linking.hpp"
#include "ctxdev/measures.hpp"
#include "ctxdev/metrics.hpp"
#include "ctxdev/scorers.hpp"
#include "ctxdev/time_span.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ctxdev {

/// Degrees of positive and negative context applied by `post`.
struct Degrees {
    double positive = 0.0;
    double negative = 0.0;

    friend bool operator==(const Degrees&, const Degrees&) = default;
};

namespace detail {
inline void require_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ParameterError(std::string(name) + " must lie in [0,1]");
}
} // namespace detail

/// s - s*a_pos*pc + (1-s)*a_neg*nc. Stays in [0,1] for arguments in [0,1].
inline double post(double score, double pc, double nc, double alpha_pos, double alpha_neg) {
    detail::require_unit(score, "score");
    detail::require_unit(pc, "positive context");
    detail::require_unit(nc, "negative context");
    detail::require_unit(alpha_pos, "positive degree");
    detail::require_unit(alpha_neg, "negative degree");
    return score - score * alpha_pos * pc + (1.0 - score) * alpha_neg * nc;
}

inline AwareLabel c_detect(double raw_score, double revised_score, double tau) {
    return make_label(raw_score > tau, revised_score > tau);
}

struct ContextAwareResult {
    std::string case_id;
    double raw_score = 0.0;
    double pc = 0.0;
    double nc = 0.0;
    double revised_score = 0.0;
    double alpha_pos = 0.0;
    double alpha_neg = 0.0;
    double tau = 0.5;
    AwareLabel label = AwareLabel::n_nc;

    friend bool operator==(const ContextAwareResult&, const ContextAwareResult&) = default;
};

inline ContextAwareResult make_result(std::string case_id, double raw, double pc, double nc, Degrees alphas, double tau) {
    double revised = post(raw, pc, nc, alphas.positive, alphas.negative);
    return ContextAwareResult{std::move(case_id), raw, pc, nc, revised, alphas.positive, alphas.negative, tau,
                              c_detect(raw, revised, tau)};
}

/// Re-evaluates results under different degrees without touching raw
/// scores or contexts.
inline std::vector<ContextAwareResult> revise(std::span<const ContextAwareResult> results, Degrees alphas, double tau) {
    std::vector<ContextAwareResult> out;
    out.reserve(results.size());
    for (const auto& r : results) out.push_back(make_result(r.case_id, r.raw_score, r.pc, r.nc, alphas, tau));
    return out;
}

struct PipelineConfig {
    ScorerConfig scorer;
    std::vector<MeasureDefinition> measures;
    double span_length = static_cast<double>(kSecondsPerWeek);
    double tau = 0.5;
    Degrees alphas{};
    TraceAggregation aggregation = TraceAggregation::max;
    /// When set, replaces the scorer: raw scores supplied per case.
    std::optional<CaseScores> raw_scores;

    void validate() const {
        if (!(span_length > 0)) throw ParameterError("span length must be positive");
        detail::require_unit(tau, "tau");
        detail::require_unit(alphas.positive, "alpha_pos");
        detail::require_unit(alphas.negative, "alpha_neg");
        validate_measures(measures);
        for (const auto& m : measures)
            if (!is_known_measure(m.name)) throw ConfigError("unknown context measure '" + m.name + "'");
        if (!raw_scores) scorer.validate();
        else
            for (const auto& [c, s] : *raw_scores) detail::require_unit(s, "raw score");
    }
};

/// Every intermediate product of one pipeline run.
struct PipelineOutput {
    TimeSpan span;
    ContextHistory history;
    Context context;
    std::vector<TraceContext> trace_contexts;
    CaseScores raw_scores;
    std::vector<ContextAwareResult> results; ///< log trace order
};

/// span -> history -> context -> links -> scores -> post -> c_detect.
inline PipelineOutput run_pipeline(const EventLog& log, const PipelineConfig& config) {
    config.validate();
    PipelineOutput out;
    out.span = compute_time_span(log, config.span_length);
    out.history = build_context_history(log, out.span, config.measures);
    out.context = compute_context(out.history, config.measures);
    out.trace_contexts = link_traces(log, link_events(log, out.context), config.aggregation);
    out.raw_scores = config.raw_scores ? *config.raw_scores : score_traces(log, config.scorer);
    out.results.reserve(log.trace_count());
    for (const auto& tc : out.trace_contexts) {
        auto it = out.raw_scores.find(tc.case_id);
        if (it == out.raw_scores.end()) throw IntegrityError("no raw score for case '" + tc.case_id + "'");
        out.results.push_back(make_result(tc.case_id, it->second, tc.pc, tc.nc, config.alphas, config.tau));
    }
    return out;
}

/// Inputs of one trace together with its true class.
struct LabeledTrace {
    double raw_score = 0.0;
    double pc = 0.0;
    double nc = 0.0;
    AwareLabel truth = AwareLabel::n_nc;
};

struct GridPoint {
    Degrees alphas;
    double accuracy = 0.0;
};

struct GridSearchResult {
    Degrees best;
    MetricsReport metrics; ///< at `best`
    std::vector<GridPoint> evaluated;
};

inline std::vector<Degrees> default_alpha_grid(std::span<const double> axis = {}) {
    static constexpr double kAxis[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    if (axis.empty()) axis = kAxis;
    std::vector<Degrees> grid;
    for (double p : axis)
        for (double q : axis) grid.push_back(Degrees{p, q});
    return grid;
}

inline MetricsReport evaluate_degrees(std::span<const LabeledTrace> labeled, Degrees alphas, double tau) {
    ConfusionMatrix confusion{};
    for (const auto& t : labeled) {
        double revised = post(t.raw_score, t.pc, t.nc, alphas.positive, alphas.negative);
        ++confusion[index_of(t.truth)][index_of(c_detect(t.raw_score, revised, tau))];
    }
    return metrics_from_confusion(confusion);
}

/// Accuracy maximizer over `grid`; ties go to the smaller positive degree,
/// then the smaller negative degree.
inline GridSearchResult grid_search_alphas(std::span<const LabeledTrace> labeled, std::span<const Degrees> grid, double tau) {
    if (grid.empty()) throw ParameterError("alpha grid is empty");
    if (labeled.empty()) throw ParameterError("grid search needs labeled traces");
    GridSearchResult result;
    bool have = false;
    for (const auto& alphas : grid) {
        auto metrics = evaluate_degrees(labeled, alphas, tau);
        result.evaluated.push_back(GridPoint{alphas, metrics.accuracy});
        bool better = !have || metrics.accuracy > result.metrics.accuracy ||
                      (metrics.accuracy == result.metrics.accuracy &&
                       (alphas.positive < result.best.positive ||
                        (alphas.positive == result.best.positive && alphas.negative < result.best.negative)));
        if (better) {
            result.best = alphas;
            result.metrics = metrics;
            have = true;
        }
    }
    return result;
}

namespace detail {
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace detail

/// CSV with a header; same fields as the JSON-lines export.
inline void write_results_csv(std::ostream& out, std::span<const ContextAwareResult> results) {
    using detail::format_real;
    out << "case,raw_score,pc,nc,revised_score,alpha_pos,alpha_neg,tau,label\n";
    for (const auto& r : results) {
        out << detail::quote_csv(r.case_id, ',') << ',' << format_real(r.raw_score) << ',' << format_real(r.pc) << ','
            << format_real(r.nc) << ',' << format_real(r.revised_score) << ',' << format_real(r.alpha_pos) << ','
            << format_real(r.alpha_neg) << ',' << format_real(r.tau) << ',' << to_string(r.label) << '\n';
    }
}

} // namespace ctxdev
