#pragma once

#include "ctxdev/context.hpp"
#include "ctxdev/event_log.hpp"
#include "ctxdev/linking.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

/// Event-to-window join by scanning every window.
inline std::map<std::string, ctxdev::ContextScore> join_oracle(const ctxdev::EventLog& log, const ctxdev::Context& ctx) {
    std::map<std::string, ctxdev::ContextScore> out;
    const auto& span = ctx.span();
    log.for_each_event([&](const ctxdev::Event& e) {
        for (std::size_t k = 0; k < span.size(); ++k) {
            bool last = k + 1 == span.size();
            if (e.timestamp >= span[k].start && (e.timestamp < span[k].end || (last && e.timestamp <= span.t_max()))) {
                out[e.id] = ctx[k];
                return;
            }
        }
    });
    return out;
}

/// Per-case maximum over the joined events, pc and nc separately.
inline std::map<std::string, ctxdev::ContextScore> trace_max_oracle(const ctxdev::EventLog& log, const ctxdev::Context& ctx) {
    auto joined = join_oracle(log, ctx);
    std::map<std::string, ctxdev::ContextScore> out;
    for (const auto& t : log.traces()) {
        std::vector<double> pcs, ncs;
        for (const auto& e : t.events) {
            pcs.push_back(joined.at(e.id).pc);
            ncs.push_back(joined.at(e.id).nc);
        }
        out[t.case_id] = {*std::max_element(pcs.begin(), pcs.end()), *std::max_element(ncs.begin(), ncs.end())};
    }
    return out;
}

inline ctxdev::Context random_context(std::mt19937_64& rng, const ctxdev::TimeSpan& span) {
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<ctxdev::ContextScore> scores(span.size());
    for (auto& s : scores) s = {u(rng), u(rng)};
    return ctxdev::Context(span, scores);
}

/// True iff linking agrees exactly with the oracles.
inline bool linking_matches_oracle(const ctxdev::EventLog& log, const ctxdev::Context& ctx) {
    auto links = ctxdev::link_events(log, ctx);
    auto joined = join_oracle(log, ctx);
    if (links.size() != joined.size()) return false;
    for (const auto& [id, score] : joined) {
        auto it = links.find(id);
        if (it == links.end() || !(it->second == score)) return false;
    }
    auto traces = ctxdev::link_traces(log, links);
    auto expected = trace_max_oracle(log, ctx);
    if (traces.size() != expected.size()) return false;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        if (traces[i].case_id != log.traces()[i].case_id) return false;
        const auto& ref = expected.at(traces[i].case_id);
        if (traces[i].pc != ref.pc || traces[i].nc != ref.nc) return false;
    }
    return true;
}

} // namespace testing_support
