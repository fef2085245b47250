#include "ctxdev/io_csv.hpp"
#include "ctxdev/measures.hpp"
#include "support/random_logs.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <ctime>
#include <map>
#include <random>

using namespace ctxdev;
using testing_support::kBase;
using testing_support::make_trace;

namespace {

// Oracles scan every window for every event, independent of TimeSpan::index_of.
bool in_window(const TimeSpan& span, std::size_t k, Timestamp t) {
    bool last = k + 1 == span.size();
    return t >= span[k].start && (t < span[k].end || (last && t <= span.t_max()));
}

bool weekend_oracle(Timestamp t) {
    std::time_t raw = static_cast<std::time_t>(to_epoch(t));
    std::tm tm{};
    gmtime_r(&raw, &tm);
    return tm.tm_wday == 0 || tm.tm_wday == 6;
}

WindowSeries workload_oracle(const EventLog& log, const TimeSpan& span) {
    WindowSeries out(span.size());
    for (std::size_t k = 0; k < span.size(); ++k)
        log.for_each_event([&](const Event& e) { out[k] += in_window(span, k, e.timestamp); });
    return out;
}

WindowSeries overwork_oracle(const EventLog& log, const TimeSpan& span) {
    WindowSeries out(span.size());
    for (std::size_t k = 0; k < span.size(); ++k)
        log.for_each_event([&](const Event& e) { out[k] += in_window(span, k, e.timestamp) && weekend_oracle(e.timestamp); });
    return out;
}

WindowSeries waiting_oracle(const EventLog& log, const TimeSpan& span) {
    WindowSeries out(span.size());
    for (std::size_t k = 0; k < span.size(); ++k) {
        std::vector<double> gaps;
        for (const auto& t : log.traces())
            for (std::size_t i = 0; i < t.events.size(); ++i)
                for (std::size_t j = 0; j < t.events.size(); ++j)
                    if (j + 1 == i && in_window(span, k, t.events[i].timestamp))
                        gaps.push_back(static_cast<double>((t.events[i].timestamp - t.events[j].timestamp).count()));
        double s = 0;
        for (double g : gaps) s += g;
        out[k] = gaps.empty() ? 0.0 : s / static_cast<double>(gaps.size());
    }
    return out;
}

WindowSeries capacity_oracle(const EventLog& log, const TimeSpan& span) {
    std::map<std::pair<std::string, std::size_t>, double> table;
    std::map<std::string, double> peak;
    log.for_each_event([&](const Event& e) {
        if (!e.resource) return;
        for (std::size_t k = 0; k < span.size(); ++k)
            if (in_window(span, k, e.timestamp)) table[{*e.resource, k}] += 1;
    });
    for (const auto& [key, v] : table) peak[key.first] = std::max(peak[key.first], v);
    WindowSeries out(span.size());
    for (const auto& [key, v] : table) out[key.second] = std::max(out[key.second], v / peak[key.first]);
    return out;
}

} // namespace

TEST(Measures, MatchBruteForceOnRandomLogs) {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 60; ++round) {
        auto log = testing_support::random_log(rng, {.resources_optional = true});
        for (double l : {3600.0 * 7, 86400.0, 604800.0}) {
            auto span = compute_time_span(log, l);
            auto workload = measure_workload(log, span);
            auto overwork = measure_overwork(log, span);
            EXPECT_EQ(workload, workload_oracle(log, span));
            EXPECT_EQ(overwork, overwork_oracle(log, span));
            auto wait = measure_waiting_time(log, span), wait_ref = waiting_oracle(log, span);
            ASSERT_EQ(wait.size(), wait_ref.size());
            for (std::size_t k = 0; k < wait.size(); ++k) EXPECT_NEAR(wait[k], wait_ref[k], 1e-9 * (1 + wait_ref[k]));
            EXPECT_EQ(measure_capacity_utilization(log, span), capacity_oracle(log, span));

            double total = 0;
            for (std::size_t k = 0; k < span.size(); ++k) {
                total += workload[k];
                EXPECT_LE(overwork[k], workload[k]);
            }
            EXPECT_EQ(total, static_cast<double>(log.event_count()));
            for (double c : measure_capacity_utilization(log, span)) {
                EXPECT_GE(c, 0.0);
                EXPECT_LE(c, 1.0);
            }
        }
    }
}

TEST(Measures, WaitingTimeIgnoresTraceOrder) {
    std::mt19937_64 rng(32);
    for (int round = 0; round < 20; ++round) {
        auto log = testing_support::random_log(rng);
        auto traces = log.traces();
        std::shuffle(traces.begin(), traces.end(), rng);
        auto span = compute_time_span(log, 86400);
        EXPECT_EQ(measure_waiting_time(log, span), measure_waiting_time(EventLog(traces), span));
    }
}

TEST(Measures, SimpleCases) {
    auto wed = parse_timestamp("2022-01-05 09:00:00").value();
    EventLog only_wednesday({make_trace("a", {"x", "y", "z"}, wed, 600)});
    auto span = compute_time_span(only_wednesday, 86400);
    for (double v : measure_overwork(only_wednesday, span)) EXPECT_EQ(v, 0.0);

    EventLog gap({make_trace("a", {"x", "y"}, wed, 3600)});
    EXPECT_EQ(measure_waiting_time(gap, compute_time_span(gap, 86400)), WindowSeries{3600.0});

    EventLog singletons({make_trace("a", {"x"}, wed), make_trace("b", {"x"}, wed + std::chrono::hours{30})});
    for (double v : measure_waiting_time(singletons, compute_time_span(singletons, 86400))) EXPECT_EQ(v, 0.0);
}

TEST(Measures, CapacityExamples) {
    auto t0 = parse_timestamp("2022-01-03 08:00:00").value();
    auto busy = make_trace("a", std::vector<std::string>(10, "x"), t0, 60);
    for (auto& e : busy.events) e.resource = "solo";
    auto other = make_trace("b", {"y"}, t0 + std::chrono::days{3});
    EventLog log({busy, other});
    auto span = compute_time_span(log, 86400);
    auto cap = measure_capacity_utilization(log, span);
    ASSERT_EQ(cap.size(), 3u);
    EXPECT_EQ(cap[0], 1.0);
    for (std::size_t k = 1; k < cap.size(); ++k) EXPECT_EQ(cap[k], 0.0);

    std::vector<Trace> uniform;
    for (int d = 0; d < 4; ++d)
        for (const char* r : {"p", "q"}) {
            auto t = make_trace(std::string(r) + std::to_string(d), {"x", "y"}, t0 + std::chrono::days{d}, 60);
            for (auto& e : t.events) e.resource = r;
            uniform.push_back(t);
        }
    EventLog ulog(uniform);
    for (double v : measure_capacity_utilization(ulog, compute_time_span(ulog, 86400))) EXPECT_EQ(v, 1.0);
}

TEST(ContextHistory, RunningExampleCounts) {
    auto log = parse_csv(CTXDEV_SOURCE_DIR "/data/running_example/log.csv");
    auto span = compute_time_span(log, static_cast<double>(kSecondsPerWeek));
    std::vector<MeasureDefinition> defs{{"workload", Polarity::positive, 10, NormalizationSpec::fixed(200, 1200)},
                                        {"overwork", Polarity::negative, 5, NormalizationSpec::fixed(20, 120)}};
    auto h = build_context_history(log, span, defs);
    ASSERT_EQ(h.window_count(), 2u);
    EXPECT_EQ(h.value(0, "workload"), 1100.0);
    EXPECT_EQ(h.value(0, "overwork"), 40.0);
    EXPECT_EQ(h.value(1, "workload"), 600.0);
    EXPECT_EQ(h.value(1, "overwork"), 110.0);
}

TEST(ContextHistory, MatchesStandaloneExtractors) {
    std::mt19937_64 rng(33);
    std::vector<MeasureDefinition> defs{{"workload", Polarity::positive},
                                        {"capacity_utilization", Polarity::positive},
                                        {"waiting_time", Polarity::negative},
                                        {"overwork", Polarity::negative}};
    for (int round = 0; round < 10; ++round) {
        auto log = testing_support::random_log(rng);
        auto span = compute_time_span(log, 86400);
        auto h = build_context_history(log, span, defs);
        EXPECT_EQ(h.measures(), (std::vector<std::string>{"workload", "capacity_utilization", "waiting_time", "overwork"}));
        EXPECT_EQ(h.series("workload"), measure_workload(log, span));
        EXPECT_EQ(h.series("overwork"), measure_overwork(log, span));
        EXPECT_EQ(h.series("waiting_time"), measure_waiting_time(log, span));
        EXPECT_EQ(h.series("capacity_utilization"), measure_capacity_utilization(log, span));
        EXPECT_EQ(h, build_context_history(log, span, defs));
        for (std::size_t k = 0; k < span.size(); ++k) EXPECT_EQ(h.at(k).size(), 4u);
    }
}

TEST(ContextHistory, EmptyMeasureListAndErrors) {
    EventLog log({make_trace("a", {"x", "y"})});
    auto span = compute_time_span(log, 3600);
    auto h = build_context_history(log, span, {});
    EXPECT_TRUE(h.measures().empty());
    EXPECT_TRUE(h.at(0).empty());
    std::vector<MeasureDefinition> unknown{{"moon_phase", Polarity::positive}};
    EXPECT_THROW(build_context_history(log, span, unknown), ConfigError);
    std::vector<MeasureDefinition> dup{{"workload", Polarity::positive}, {"workload", Polarity::negative}};
    EXPECT_THROW(build_context_history(log, span, dup), ConfigError);
    std::vector<MeasureDefinition> zero{{"workload", Polarity::positive, 0.0}};
    EXPECT_THROW(build_context_history(log, span, zero), ConfigError);
}
