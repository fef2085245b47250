#pragma once

#include "ctxdev/time.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ctxdev {

struct Event {
    std::string id;
    std::string case_id;
    std::string activity;
    Timestamp timestamp{};
    std::optional<std::string> resource;
    std::map<std::string, std::string> extra;

    friend bool operator==(const Event&, const Event&) = default;
};

struct Trace {
    std::string case_id;
    std::vector<Event> events;

    friend bool operator==(const Trace&, const Trace&) = default;
};

/// Stable sort by timestamp, so equal timestamps keep their current order.
inline void sort_by_time(Trace& trace) {
    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
}

/// A set of traces. Construction does not check invariants; parsers and
/// generators produce valid logs, and `validate_log` reports violations
/// of hand-built ones.
class EventLog {
public:
    EventLog() = default;

    explicit EventLog(std::vector<Trace> traces) : traces_(std::move(traces)) {
        for (const auto& t : traces_) event_count_ += t.events.size();
    }

    /// Groups events by case in order of first appearance and orders each
    /// trace by timestamp (ties by input order).
    static EventLog from_events(std::vector<Event> events) {
        std::vector<Trace> traces;
        std::unordered_map<std::string, std::size_t> index;
        for (auto& e : events) {
            auto [it, inserted] = index.try_emplace(e.case_id, traces.size());
            if (inserted) traces.push_back(Trace{e.case_id, {}});
            traces[it->second].events.push_back(std::move(e));
        }
        for (auto& t : traces) sort_by_time(t);
        return EventLog(std::move(traces));
    }

    const std::vector<Trace>& traces() const noexcept { return traces_; }
    std::size_t trace_count() const noexcept { return traces_.size(); }
    std::size_t event_count() const noexcept { return event_count_; }
    bool empty() const noexcept { return event_count_ == 0; }

    /// Time extremes over E(L); requires a non-empty log.
    std::pair<Timestamp, Timestamp> time_range() const {
        Timestamp lo = Timestamp::max(), hi = Timestamp::min();
        for (const auto& t : traces_)
            for (const auto& e : t.events) {
                lo = std::min(lo, e.timestamp);
                hi = std::max(hi, e.timestamp);
            }
        return {lo, hi};
    }

    template <class F>
    void for_each_event(F&& f) const {
        for (const auto& t : traces_)
            for (const auto& e : t.events) f(e);
    }

    friend bool operator==(const EventLog& a, const EventLog& b) { return a.traces_ == b.traces_; }

private:
    std::vector<Trace> traces_;
    std::size_t event_count_ = 0;
};

struct Violation {
    enum class Kind { empty_trace, empty_case, empty_activity, case_mismatch, unsorted, duplicate_in_trace, shared_event };
    Kind kind;
    std::string case_id;
    std::string other_case_id; ///< set for shared_event
    std::string event_id;
    std::size_t index = 0;     ///< event position in the trace
    std::string message;
};

using ValidationReport = std::vector<Violation>;

inline ValidationReport validate_log(const EventLog& log) {
    ValidationReport report;
    auto add = [&](Violation::Kind kind, const std::string& case_id, const std::string& event_id, std::size_t index,
                   std::string message, std::string other = {}) {
        report.push_back(Violation{kind, case_id, std::move(other), event_id, index, std::move(message)});
    };

    std::unordered_map<std::string, std::string> owner; // event id -> case
    for (const auto& trace : log.traces()) {
        if (trace.case_id.empty()) add(Violation::Kind::empty_case, trace.case_id, {}, 0, "trace without case id");
        if (trace.events.empty()) add(Violation::Kind::empty_trace, trace.case_id, {}, 0, "trace has no events");

        std::unordered_map<std::string, std::size_t> seen;
        for (std::size_t i = 0; i < trace.events.size(); ++i) {
            const Event& e = trace.events[i];
            if (e.activity.empty())
                add(Violation::Kind::empty_activity, trace.case_id, e.id, i, "event without activity");
            if (e.case_id != trace.case_id)
                add(Violation::Kind::case_mismatch, trace.case_id, e.id, i, "event case '" + e.case_id + "' differs from trace");
            if (i > 0 && e.timestamp < trace.events[i - 1].timestamp)
                add(Violation::Kind::unsorted, trace.case_id, e.id, i, "event precedes its predecessor in time");

            if (!seen.emplace(e.id, i).second) {
                add(Violation::Kind::duplicate_in_trace, trace.case_id, e.id, i, "event '" + e.id + "' occurs twice in trace");
                continue;
            }
            auto [it, inserted] = owner.emplace(e.id, trace.case_id);
            if (!inserted)
                add(Violation::Kind::shared_event, trace.case_id, e.id, i,
                    "event '" + e.id + "' shared by cases '" + it->second + "' and '" + trace.case_id + "'", it->second);
        }
    }
    return report;
}

} // namespace ctxdev
