#pragma once

#include "ctxdev/errors.hpp"
#include "ctxdev/measures.hpp"
#include "ctxdev/time_span.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace ctxdev {

/// Positive and negative context strength, each in [0,1].
struct ContextScore {
    double pc = 0.0;
    double nc = 0.0;

    friend bool operator==(const ContextScore&, const ContextScore&) = default;
};

/// Context per window of a span (ctx_{l,L}).
class Context {
public:
    Context() = default;
    Context(TimeSpan span, std::vector<ContextScore> scores) : span_(std::move(span)), scores_(std::move(scores)) {
        if (scores_.size() != span_.size()) throw IntegrityError("context needs one score per window");
    }

    const TimeSpan& span() const noexcept { return span_; }
    const std::vector<ContextScore>& scores() const noexcept { return scores_; }
    const ContextScore& operator[](std::size_t window) const { return scores_[window]; }
    const ContextScore& at(Timestamp t) const { return scores_[span_.index_of(t)]; }

    friend bool operator==(const Context&, const Context&) = default;

private:
    TimeSpan span_;
    std::vector<ContextScore> scores_;
};

/// (value - min) / (max - min) clamped to [0,1]; 0 when min == max.
inline double normalize_minmax(double value, const NormalizationSpec& spec) {
    if (spec.max <= spec.min) return 0.0;
    return std::clamp((value - spec.min) / (spec.max - spec.min), 0.0, 1.0);
}

/// Replaces derived bounds by the observed extremes of `series`.
inline NormalizationSpec resolve_bounds(const NormalizationSpec& spec, const WindowSeries& series) {
    if (spec.bounds == NormalizationSpec::Bounds::fixed || series.empty()) return spec;
    auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    return NormalizationSpec::fixed(*lo, *hi);
}

/// Weighted mean of normalized measure values, separately over positive
/// and negative measures. A side without measures is 0.
inline Context compute_context(const ContextHistory& history, std::span<const MeasureDefinition> measures) {
    std::map<std::string, const MeasureDefinition*> defs;
    for (const auto& m : measures) defs[m.name] = &m;

    struct Term {
        const MeasureDefinition* def;
        const WindowSeries* series;
        NormalizationSpec bounds;
    };
    std::vector<Term> terms;
    for (const auto& name : history.measures()) {
        auto it = defs.find(name);
        if (it == defs.end()) throw ConfigError("no definition for measure '" + name + "'");
        const auto& series = history.series(name);
        terms.push_back(Term{it->second, &series, resolve_bounds(it->second->normalization, series)});
    }

    std::vector<ContextScore> scores(history.window_count());
    for (std::size_t k = 0; k < scores.size(); ++k) {
        double pos_sum = 0, pos_weight = 0, neg_sum = 0, neg_weight = 0;
        for (const auto& term : terms) {
            double v = term.def->weight * normalize_minmax((*term.series)[k], term.bounds);
            if (term.def->polarity == Polarity::positive) {
                pos_sum += v;
                pos_weight += term.def->weight;
            } else {
                neg_sum += v;
                neg_weight += term.def->weight;
            }
        }
        scores[k].pc = pos_weight > 0 ? std::clamp(pos_sum / pos_weight, 0.0, 1.0) : 0.0;
        scores[k].nc = neg_weight > 0 ? std::clamp(neg_sum / neg_weight, 0.0, 1.0) : 0.0;
    }
    return Context(history.span(), std::move(scores));
}

enum class CalendarBucket { day, week };

struct CalendarCell {
    Timestamp bucket_start{};
    ContextScore mean;
    std::size_t windows = 0;

    friend bool operator==(const CalendarCell&, const CalendarCell&) = default;
};

inline std::int64_t bucket_seconds(CalendarBucket bucket) {
    return bucket == CalendarBucket::day ? kSecondsPerDay : kSecondsPerWeek;
}

/// Mean context over the windows whose start falls in each calendar day or
/// ISO week (Monday based). Buckets without windows are omitted.
inline std::vector<CalendarCell> calendar_aggregate(const Context& context, CalendarBucket bucket) {
    if (context.span().length_seconds() > static_cast<double>(bucket_seconds(bucket)))
        throw ParameterError("time windows are coarser than the calendar bucket");
    std::map<Timestamp, CalendarCell> cells;
    const auto& windows = context.span().windows();
    for (std::size_t k = 0; k < windows.size(); ++k) {
        Timestamp key = bucket == CalendarBucket::day ? start_of_day(windows[k].start) : start_of_week(windows[k].start);
        auto& cell = cells[key];
        cell.bucket_start = key;
        cell.mean.pc += context[k].pc;
        cell.mean.nc += context[k].nc;
        ++cell.windows;
    }
    std::vector<CalendarCell> out;
    out.reserve(cells.size());
    for (auto& [key, cell] : cells) {
        cell.mean.pc /= static_cast<double>(cell.windows);
        cell.mean.nc /= static_cast<double>(cell.windows);
        out.push_back(cell);
    }
    return out;
}

} // namespace ctxdev
