#include "ctxdev/context.hpp"
#include "ctxdev/io_csv.hpp"
#include "support/random_logs.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace ctxdev;

namespace {

std::vector<MeasureDefinition> running_example_measures() {
    return {{"workload", Polarity::positive, 10, NormalizationSpec::fixed(200, 1200)},
            {"overwork", Polarity::negative, 5, NormalizationSpec::fixed(20, 120)}};
}

ContextHistory history_of(const TimeSpan& span, std::map<std::string, WindowSeries> series) {
    ContextHistory h(span);
    for (auto& [k, v] : series) h.set(k, v);
    return h;
}

TimeSpan daily_span(std::size_t days) {
    auto t0 = testing_support::kBase;
    return TimeSpan(t0, t0 + std::chrono::days{static_cast<long>(days)} - std::chrono::seconds{1}, 86400);
}

} // namespace

TEST(Normalize, RunningExampleAndEndpoints) {
    EXPECT_DOUBLE_EQ(normalize_minmax(1100, NormalizationSpec::fixed(200, 1200)), 0.9);
    EXPECT_DOUBLE_EQ(normalize_minmax(40, NormalizationSpec::fixed(20, 120)), 0.2);
    EXPECT_EQ(normalize_minmax(200, NormalizationSpec::fixed(200, 1200)), 0.0);
    EXPECT_EQ(normalize_minmax(1200, NormalizationSpec::fixed(200, 1200)), 1.0);
    EXPECT_EQ(normalize_minmax(5000, NormalizationSpec::fixed(200, 1200)), 1.0);
    EXPECT_EQ(normalize_minmax(-5, NormalizationSpec::fixed(200, 1200)), 0.0);
    EXPECT_EQ(normalize_minmax(7, NormalizationSpec::fixed(7, 7)), 0.0);
}

TEST(Normalize, DerivedBoundsUseObservedRange) {
    auto b = resolve_bounds(NormalizationSpec::derived(), {3, 9, 5});
    EXPECT_EQ(b.min, 3);
    EXPECT_EQ(b.max, 9);
    auto f = resolve_bounds(NormalizationSpec::fixed(0, 100), {3, 9, 5});
    EXPECT_EQ(f.max, 100);
}

TEST(Context, RunningExampleWeekOne) {
    auto log = parse_csv(CTXDEV_SOURCE_DIR "/data/running_example/log.csv");
    auto span = compute_time_span(log, static_cast<double>(kSecondsPerWeek));
    auto defs = running_example_measures();
    auto ctx = compute_context(build_context_history(log, span, defs), defs);
    EXPECT_EQ(ctx[0].pc, 0.9);
    EXPECT_EQ(ctx[0].nc, 0.2);
    EXPECT_DOUBLE_EQ(ctx[1].pc, 0.4);
    EXPECT_DOUBLE_EQ(ctx[1].nc, 0.9);
}

TEST(Context, WeightedMeanOracle) {
    auto span = daily_span(1);
    std::vector<MeasureDefinition> defs{{"workload", Polarity::positive, 1, NormalizationSpec::fixed(0, 1)},
                                        {"capacity_utilization", Polarity::positive, 2, NormalizationSpec::fixed(0, 1)},
                                        {"overwork", Polarity::positive, 3, NormalizationSpec::fixed(0, 1)}};
    auto h = history_of(span, {{"workload", {0.1}}, {"capacity_utilization", {0.2}}, {"overwork", {0.3}}});
    auto ctx = compute_context(h, defs);
    EXPECT_NEAR(ctx[0].pc, (0.1 * 1 + 0.2 * 2 + 0.3 * 3) / 6.0, 1e-15);
    EXPECT_EQ(ctx[0].nc, 0.0);
}

TEST(Context, AllZeroGivesZero) {
    auto span = daily_span(3);
    std::vector<MeasureDefinition> defs{{"workload", Polarity::positive, 1}, {"overwork", Polarity::negative, 1}};
    auto ctx = compute_context(history_of(span, {{"workload", {0, 0, 0}}, {"overwork", {0, 0, 0}}}), defs);
    for (const auto& s : ctx.scores()) EXPECT_EQ(s, (ContextScore{0, 0}));
}

TEST(Context, PropertiesOnRandomHistories) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> value(0, 50), weight(0.1, 5);
    const std::vector<std::string> names{"workload", "capacity_utilization", "waiting_time", "overwork"};
    for (int round = 0; round < 200; ++round) {
        std::size_t n = 1 + rng() % 10;
        auto span = daily_span(n);
        std::vector<MeasureDefinition> defs;
        std::map<std::string, WindowSeries> series;
        for (const auto& name : names) {
            if (rng() % 4 == 0) continue;
            auto pol = rng() % 2 ? Polarity::positive : Polarity::negative;
            auto norm = rng() % 2 ? NormalizationSpec::derived() : NormalizationSpec::fixed(5, 40);
            defs.push_back({name, pol, weight(rng), norm});
            WindowSeries s(n);
            for (auto& v : s) v = value(rng);
            series[name] = s;
        }
        auto h = history_of(span, series);
        auto ctx = compute_context(h, defs);

        // independent weighted-mean recomputation
        for (std::size_t k = 0; k < n; ++k) {
            double ps = 0, pw = 0, ns = 0, nw = 0;
            for (const auto& d : defs) {
                const auto& s = series[d.name];
                double lo = d.normalization.min, hi = d.normalization.max;
                if (d.normalization.bounds == NormalizationSpec::Bounds::derived) {
                    lo = *std::min_element(s.begin(), s.end());
                    hi = *std::max_element(s.begin(), s.end());
                }
                double v = hi > lo ? std::min(1.0, std::max(0.0, (s[k] - lo) / (hi - lo))) : 0.0;
                (d.polarity == Polarity::positive ? ps : ns) += d.weight * v;
                (d.polarity == Polarity::positive ? pw : nw) += d.weight;
            }
            EXPECT_NEAR(ctx[k].pc, pw ? ps / pw : 0.0, 1e-12);
            EXPECT_NEAR(ctx[k].nc, nw ? ns / nw : 0.0, 1e-12);
            EXPECT_GE(ctx[k].pc, 0.0);
            EXPECT_LE(ctx[k].pc, 1.0);
            EXPECT_GE(ctx[k].nc, 0.0);
            EXPECT_LE(ctx[k].nc, 1.0);
        }

        // scaling positive weights by a common factor leaves pc unchanged
        auto scaled = defs;
        for (auto& d : scaled)
            if (d.polarity == Polarity::positive) d.weight *= 3.5;
        auto ctx2 = compute_context(h, scaled);
        for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(ctx2[k].pc, ctx[k].pc, 1e-12);

        // raising one fixed-bound positive measure never lowers pc
        for (const auto& d : defs) {
            if (d.polarity != Polarity::positive || d.normalization.bounds != NormalizationSpec::Bounds::fixed) continue;
            auto bumped = series;
            std::size_t k = rng() % n;
            bumped[d.name][k] += 7;
            auto ctx3 = compute_context(history_of(span, bumped), defs);
            EXPECT_GE(ctx3[k].pc, ctx[k].pc - 1e-15);
        }
    }
}

TEST(Context, SingleMeasurePerSideIgnoresWeights) {
    auto span = daily_span(4);
    auto h = history_of(span, {{"workload", {1, 2, 3, 4}}, {"overwork", {4, 0, 2, 1}}});
    for (double w : {0.5, 1.0, 10.0}) {
        std::vector<MeasureDefinition> defs{{"workload", Polarity::positive, w}, {"overwork", Polarity::negative, w * 2}};
        auto ctx = compute_context(h, defs);
        for (std::size_t k = 0; k < 4; ++k) {
            EXPECT_DOUBLE_EQ(ctx[k].pc, normalize_minmax(h.value(k, "workload"), NormalizationSpec::fixed(1, 4)));
            EXPECT_DOUBLE_EQ(ctx[k].nc, normalize_minmax(h.value(k, "overwork"), NormalizationSpec::fixed(0, 4)));
        }
    }
}

TEST(Calendar, IdentityForDailyWindows) {
    auto span = daily_span(5);
    std::vector<ContextScore> scores{{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}, {0.7, 0.8}, {0.9, 1.0}};
    auto cells = calendar_aggregate(Context(span, scores), CalendarBucket::day);
    ASSERT_EQ(cells.size(), 5u);
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(cells[k].mean, scores[k]);
        EXPECT_EQ(cells[k].bucket_start, span[k].start);
        EXPECT_EQ(cells[k].windows, 1u);
    }
}

TEST(Calendar, MeanOfTwoWindowsInOneBucket) {
    auto t0 = testing_support::kBase;
    TimeSpan span(t0, t0 + std::chrono::hours{23}, 12 * 3600.0);
    auto cells = calendar_aggregate(Context(span, {{0.2, 0.4}, {0.6, 0.0}}), CalendarBucket::day);
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_DOUBLE_EQ(cells[0].mean.pc, 0.4);
    EXPECT_DOUBLE_EQ(cells[0].mean.nc, 0.2);
}

TEST(Calendar, RunningExampleWeekBucket) {
    auto log = parse_csv(CTXDEV_SOURCE_DIR "/data/running_example/log.csv");
    auto span = compute_time_span(log, static_cast<double>(kSecondsPerWeek));
    auto defs = running_example_measures();
    auto cells = calendar_aggregate(compute_context(build_context_history(log, span, defs), defs), CalendarBucket::week);
    ASSERT_EQ(cells.size(), 2u);
    EXPECT_EQ(cells[0].mean, (ContextScore{0.9, 0.2}));
    EXPECT_THROW(calendar_aggregate(Context(span, {{0, 0}, {0, 0}}), CalendarBucket::day), ParameterError);
}

TEST(Calendar, GroupByOracle) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0, 1);
    for (int round = 0; round < 50; ++round) {
        double l = static_cast<double>(3600 * (1 + rng() % 24));
        auto t0 = testing_support::kBase + std::chrono::seconds{static_cast<long>(rng() % 86400)};
        TimeSpan span(t0, t0 + std::chrono::seconds{static_cast<long>(rng() % (30 * 86400))}, l);
        std::vector<ContextScore> scores(span.size());
        for (auto& s : scores) s = {u(rng), u(rng)};
        Context ctx(span, scores);
        for (auto bucket : {CalendarBucket::day, CalendarBucket::week}) {
            std::map<std::int64_t, std::vector<ContextScore>> groups;
            std::int64_t size = bucket == CalendarBucket::day ? 86400 : 7 * 86400;
            for (std::size_t k = 0; k < span.size(); ++k) {
                auto s = to_epoch(span[k].start);
                // 1970-01-01 was a Thursday; shift so weeks start on Monday
                std::int64_t key = bucket == CalendarBucket::day ? s - s % size : s - (s + 3 * 86400) % size;
                groups[key].push_back(scores[k]);
            }
            auto cells = calendar_aggregate(ctx, bucket);
            ASSERT_EQ(cells.size(), groups.size());
            std::size_t i = 0;
            for (const auto& [key, members] : groups) {
                double pc = 0, nc = 0;
                for (const auto& m : members) {
                    pc += m.pc;
                    nc += m.nc;
                }
                EXPECT_EQ(to_epoch(cells[i].bucket_start), key);
                EXPECT_NEAR(cells[i].mean.pc, pc / static_cast<double>(members.size()), 1e-12);
                EXPECT_NEAR(cells[i].mean.nc, nc / static_cast<double>(members.size()), 1e-12);
                EXPECT_EQ(cells[i].windows, members.size());
                ++i;
            }
        }
    }
}
