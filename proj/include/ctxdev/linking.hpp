#pragma once

#include "ctxdev/context.hpp"
#include "ctxdev/errors.hpp"
#include "ctxdev/event_log.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

namespace ctxdev {

/// Event id -> context of the event's window (elink).
using EventLinks = std::unordered_map<std::string, ContextScore>;

struct TraceContext {
    std::string case_id;
    double pc = 0.0;
    double nc = 0.0;

    friend bool operator==(const TraceContext&, const TraceContext&) = default;
};

/// How event contexts are folded into a trace context. `max` is the
/// definition used throughout; `mean` is available for exploration.
enum class TraceAggregation { max, mean };

inline EventLinks link_events(const EventLog& log, const Context& context) {
    EventLinks links;
    links.reserve(log.event_count());
    log.for_each_event([&](const Event& e) { links.emplace(e.id, context.at(e.timestamp)); });
    return links;
}

/// One TraceContext per trace, in log order. pc and nc are aggregated
/// independently, so they may stem from different events.
inline std::vector<TraceContext> link_traces(const EventLog& log, const EventLinks& links,
                                             TraceAggregation aggregation = TraceAggregation::max) {
    std::vector<TraceContext> out;
    out.reserve(log.trace_count());
    for (const auto& trace : log.traces()) {
        TraceContext tc{trace.case_id, 0.0, 0.0};
        for (const auto& e : trace.events) {
            auto it = links.find(e.id);
            if (it == links.end()) throw IntegrityError("event '" + e.id + "' of case '" + trace.case_id + "' has no context link");
            if (aggregation == TraceAggregation::max) {
                tc.pc = std::max(tc.pc, it->second.pc);
                tc.nc = std::max(tc.nc, it->second.nc);
            } else {
                tc.pc += it->second.pc;
                tc.nc += it->second.nc;
            }
        }
        if (aggregation == TraceAggregation::mean && !trace.events.empty()) {
            tc.pc /= static_cast<double>(trace.events.size());
            tc.nc /= static_cast<double>(trace.events.size());
        }
        out.push_back(std::move(tc));
    }
    return out;
}

} // namespace ctxdev
