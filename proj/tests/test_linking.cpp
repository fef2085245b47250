#include "ctxdev/io_csv.hpp"
#include "ctxdev/linking.hpp"
#include "support/oracles.hpp"
#include "support/random_logs.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ctxdev;
using testing_support::make_trace;

TEST(Linking, MatchesJoinAndMaxOracle) {
    std::mt19937_64 rng(51);
    for (int round = 0; round < 200; ++round) {
        auto log = testing_support::random_log(rng);
        for (double l : {3600.0, 86400.0, 5 * 86400.0}) {
            auto ctx = testing_support::random_context(rng, compute_time_span(log, l));
            ASSERT_TRUE(testing_support::linking_matches_oracle(log, ctx)) << "round " << round << " l " << l;
        }
    }
}

TEST(Linking, SingleWindowMapsEverythingToIt) {
    EventLog log({make_trace("a", {"x", "y"}), make_trace("b", {"z"})});
    auto span = compute_time_span(log, 86400);
    Context ctx(span, {{0.3, 0.7}});
    for (const auto& [id, s] : link_events(log, ctx)) EXPECT_EQ(s, (ContextScore{0.3, 0.7}));
    auto tc = link_traces(log, link_events(log, ctx));
    ASSERT_EQ(tc.size(), 2u);
    EXPECT_EQ(tc[1].case_id, "b");
    EXPECT_EQ(tc[1].pc, 0.3);
    EXPECT_EQ(tc[1].nc, 0.7);
}

TEST(Linking, IndependentMaximaAcrossEvents) {
    auto t0 = testing_support::kBase;
    EventLog log({make_trace("s2", {"a", "b", "c"}, t0, 86400 * 8)});
    TimeSpan span(t0, t0 + std::chrono::days{16}, static_cast<double>(kSecondsPerWeek));
    Context ctx(span, {{0.9, 0.2}, {0.4, 0.5}, {0.1, 0.9}});
    auto tc = link_traces(log, link_events(log, ctx));
    EXPECT_EQ(tc[0].pc, 0.9);
    EXPECT_EQ(tc[0].nc, 0.9);
}

TEST(Linking, ZeroContextEventChangesNothing) {
    std::mt19937_64 rng(52);
    for (int round = 0; round < 50; ++round) {
        auto log = testing_support::random_log(rng, {.max_traces = 10});
        auto span = compute_time_span(log, 86400);
        auto ctx = testing_support::random_context(rng, span);
        auto base = link_traces(log, link_events(log, ctx));
        auto links = link_events(log, ctx);
        auto traces = log.traces();
        Event extra = traces[0].events[0];
        extra.id = "zero-event";
        traces[0].events.push_back(extra);
        links["zero-event"] = ContextScore{0, 0};
        auto again = link_traces(EventLog(traces), links);
        EXPECT_EQ(again[0].pc, base[0].pc);
        EXPECT_EQ(again[0].nc, base[0].nc);
    }
}

TEST(Linking, MeanAggregationAndMissingLink) {
    auto t0 = testing_support::kBase;
    EventLog log({make_trace("a", {"x", "y"}, t0, 86400)});
    TimeSpan span(t0, t0 + std::chrono::days{1}, 86400);
    Context ctx(span, {{0.2, 0.4}});
    auto links = link_events(log, ctx);
    links["a-1"] = {0.6, 0.0};
    auto tc = link_traces(log, links, TraceAggregation::mean);
    EXPECT_DOUBLE_EQ(tc[0].pc, 0.4);
    EXPECT_DOUBLE_EQ(tc[0].nc, 0.2);
    links.erase("a-0");
    EXPECT_THROW(link_traces(log, links), IntegrityError);
}

TEST(Linking, RunningExampleTraces) {
    auto log = parse_csv(CTXDEV_SOURCE_DIR "/data/running_example/log.csv");
    auto span = compute_time_span(log, static_cast<double>(kSecondsPerWeek));
    std::vector<MeasureDefinition> defs{{"workload", Polarity::positive, 10, NormalizationSpec::fixed(200, 1200)},
                                        {"overwork", Polarity::negative, 5, NormalizationSpec::fixed(20, 120)}};
    auto ctx = compute_context(build_context_history(log, span, defs), defs);
    auto tc = link_traces(log, link_events(log, ctx));
    for (const auto& t : tc) {
        if (t.case_id == "sigma1") {
            EXPECT_EQ(t.pc, 0.9);
            EXPECT_EQ(t.nc, 0.2);
        }
        if (t.case_id == "sigma2") {
            EXPECT_EQ(t.pc, 0.9);
            EXPECT_EQ(t.nc, 0.9);
        }
    }
}
