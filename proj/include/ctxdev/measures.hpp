#pragma once

#include "ctxdev/errors.hpp"
#include "ctxdev/event_log.hpp"
#include "ctxdev/time_span.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ctxdev {

enum class Polarity { positive, negative };

struct NormalizationSpec {
    enum class Bounds { fixed, derived };
    double min = 0.0;
    double max = 0.0;
    Bounds bounds = Bounds::derived;

    static NormalizationSpec fixed(double min, double max) { return {min, max, Bounds::fixed}; }
    static NormalizationSpec derived() { return {}; }
};

struct MeasureDefinition {
    std::string name;
    Polarity polarity = Polarity::positive;
    double weight = 1.0;
    NormalizationSpec normalization;
};

/// One value per window of a span, indexed like `TimeSpan::windows()`.
using WindowSeries = std::vector<double>;

/// Number of events per window.
inline WindowSeries measure_workload(const EventLog& log, const TimeSpan& span) {
    WindowSeries out(span.size(), 0.0);
    log.for_each_event([&](const Event& e) { out[span.index_of(e.timestamp)] += 1.0; });
    return out;
}

/// Number of events per window that occurred on a Saturday or Sunday.
inline WindowSeries measure_overwork(const EventLog& log, const TimeSpan& span) {
    WindowSeries out(span.size(), 0.0);
    log.for_each_event([&](const Event& e) {
        if (is_weekend(e.timestamp)) out[span.index_of(e.timestamp)] += 1.0;
    });
    return out;
}

/// Mean gap (seconds) between an event and its predecessor in the same
/// trace, attributed to the window of the later event. First events of
/// traces do not count.
inline WindowSeries measure_waiting_time(const EventLog& log, const TimeSpan& span) {
    WindowSeries sum(span.size(), 0.0);
    std::vector<std::size_t> count(span.size(), 0);
    for (const auto& trace : log.traces()) {
        for (std::size_t i = 1; i < trace.events.size(); ++i) {
            const auto& e = trace.events[i];
            auto k = span.index_of(e.timestamp);
            sum[k] += static_cast<double>(to_epoch(e.timestamp) - to_epoch(trace.events[i - 1].timestamp));
            ++count[k];
        }
    }
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = count[k] ? sum[k] / static_cast<double>(count[k]) : 0.0;
    return sum;
}

/// Per window, the largest ratio over resources of the resource's event
/// count in the window to its own busiest window. Values lie in [0,1].
inline WindowSeries measure_capacity_utilization(const EventLog& log, const TimeSpan& span) {
    std::map<std::string, std::vector<double>> per_resource;
    log.for_each_event([&](const Event& e) {
        if (!e.resource) return;
        auto& counts = per_resource[*e.resource];
        if (counts.empty()) counts.assign(span.size(), 0.0);
        counts[span.index_of(e.timestamp)] += 1.0;
    });
    WindowSeries out(span.size(), 0.0);
    for (const auto& [resource, counts] : per_resource) {
        double peak = *std::max_element(counts.begin(), counts.end());
        if (peak <= 0) continue;
        for (std::size_t k = 0; k < counts.size(); ++k) out[k] = std::max(out[k], counts[k] / peak);
    }
    return out;
}

using MeasureExtractor = std::function<WindowSeries(const EventLog&, const TimeSpan&)>;

inline const std::map<std::string, MeasureExtractor, std::less<>>& measure_registry() {
    static const std::map<std::string, MeasureExtractor, std::less<>> registry{
        {"workload", measure_workload},
        {"overwork", measure_overwork},
        {"waiting_time", measure_waiting_time},
        {"capacity_utilization", measure_capacity_utilization},
    };
    return registry;
}

inline bool is_known_measure(std::string_view name) { return measure_registry().contains(name); }

/// Raw measure values per window (ch_l(L)).
class ContextHistory {
public:
    ContextHistory() = default;
    explicit ContextHistory(TimeSpan span) : span_(std::move(span)) {}

    const TimeSpan& span() const noexcept { return span_; }
    std::size_t window_count() const noexcept { return span_.size(); }

    void set(const std::string& measure, WindowSeries values) {
        if (values.size() != span_.size()) throw IntegrityError("series length does not match the span for '" + measure + "'");
        if (!series_.contains(measure)) order_.push_back(measure);
        series_[measure] = std::move(values);
    }

    /// Measure names in insertion order.
    const std::vector<std::string>& measures() const noexcept { return order_; }
    bool has(const std::string& measure) const { return series_.contains(measure); }

    const WindowSeries& series(const std::string& measure) const {
        auto it = series_.find(measure);
        if (it == series_.end()) throw ConfigError("measure '" + measure + "' not present in context history");
        return it->second;
    }

    double value(std::size_t window, const std::string& measure) const { return series(measure).at(window); }

    /// All measure values of one window.
    std::map<std::string, double> at(std::size_t window) const {
        std::map<std::string, double> out;
        for (const auto& [name, values] : series_) out.emplace(name, values.at(window));
        return out;
    }

    friend bool operator==(const ContextHistory&, const ContextHistory&) = default;

private:
    TimeSpan span_;
    std::vector<std::string> order_;
    std::map<std::string, WindowSeries> series_;
};

inline void validate_measures(std::span<const MeasureDefinition> measures) {
    std::unordered_set<std::string> names;
    for (const auto& m : measures) {
        if (!(m.weight > 0)) throw ConfigError("measure '" + m.name + "' needs a positive weight");
        if (!names.insert(m.name).second) throw ConfigError("measure '" + m.name + "' configured twice");
        if (m.normalization.bounds == NormalizationSpec::Bounds::fixed && m.normalization.min > m.normalization.max)
            throw ConfigError("measure '" + m.name + "' has min > max");
    }
}

inline ContextHistory build_context_history(const EventLog& log, const TimeSpan& span,
                                            std::span<const MeasureDefinition> measures) {
    validate_measures(measures);
    ContextHistory history(span);
    const auto& registry = measure_registry();
    for (const auto& m : measures) {
        auto it = registry.find(m.name);
        if (it == registry.end()) throw ConfigError("unknown context measure '" + m.name + "'");
        history.set(m.name, it->second(log, span));
    }
    return history;
}

} // namespace ctxdev
