#include "ctxdev/metrics.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace ctxdev;
using L = AwareLabel;

namespace {

std::vector<std::pair<L, L>> twelve_traces() {
    return {{L::d_dc, L::d_dc}, {L::d_dc, L::d_dc}, {L::d_dc, L::d_dc}, {L::d_dc, L::n_nc}, {L::n_dc, L::n_dc}, {L::n_dc, L::n_dc},
            {L::n_dc, L::d_dc}, {L::d_nc, L::d_nc}, {L::d_nc, L::n_nc}, {L::d_nc, L::n_nc}, {L::n_nc, L::n_nc}, {L::n_nc, L::d_nc}};
}

} // namespace

TEST(Metrics, HandBuiltTwelveTraces) {
    auto m = compute_metrics(twelve_traces());
    ConfusionMatrix expected{{{3, 0, 0, 1}, {1, 2, 0, 0}, {0, 0, 1, 2}, {0, 0, 1, 1}}};
    EXPECT_EQ(m.confusion, expected);
    EXPECT_EQ(m.total, 12u);
    EXPECT_DOUBLE_EQ(m.accuracy, 7.0 / 12.0);
    // recalls 3/4, 2/3, 1/3, 1/2
    EXPECT_DOUBLE_EQ(m.avg_class_accuracy, (3.0 / 4 + 2.0 / 3 + 1.0 / 3 + 1.0 / 2) / 4);
    // precisions 3/4, 2/2, 1/2, 1/4 weighted by supports 4, 3, 3, 2
    EXPECT_DOUBLE_EQ(m.precision, (4 * 0.75 + 3 * 1.0 + 3 * 0.5 + 2 * 0.25) / 12);
    EXPECT_DOUBLE_EQ(m.recall, 7.0 / 12.0);
}

TEST(Metrics, MapInterface) {
    std::map<std::string, L> truth, predicted;
    auto pairs = twelve_traces();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        truth["c" + std::to_string(i)] = pairs[i].first;
        predicted["c" + std::to_string(i)] = pairs[i].second;
    }
    EXPECT_EQ(compute_metrics(predicted, truth), compute_metrics(pairs));
    auto perfect = compute_metrics(truth, truth);
    EXPECT_EQ(perfect.accuracy, 1.0);
    EXPECT_EQ(perfect.avg_class_accuracy, 1.0);
    EXPECT_DOUBLE_EQ(perfect.precision, 1.0);
    EXPECT_DOUBLE_EQ(perfect.recall, 1.0);
    std::size_t off_diagonal = 0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) off_diagonal += i == j ? 0 : perfect.confusion[i][j];
    EXPECT_EQ(off_diagonal, 0u);

    predicted.erase("c0");
    EXPECT_THROW(compute_metrics(predicted, truth), IntegrityError);
    predicted["zz"] = L::n_nc;
    EXPECT_THROW(compute_metrics(predicted, truth), IntegrityError);
}

TEST(Metrics, EmptyClassesAreSkipped) {
    std::vector<std::pair<L, L>> pairs{{L::n_nc, L::n_nc}, {L::n_nc, L::d_dc}, {L::d_dc, L::d_dc}};
    auto m = compute_metrics(pairs);
    EXPECT_DOUBLE_EQ(m.avg_class_accuracy, (0.5 + 1.0) / 2);
    EXPECT_DOUBLE_EQ(m.precision, (1 * 0.5 + 2 * 1.0) / 3);
    EXPECT_EQ(compute_metrics(std::vector<std::pair<L, L>>{}).total, 0u);
}

TEST(Metrics, RandomInstancesAgreeWithDirectCounts) {
    std::mt19937_64 rng(81);
    for (int round = 0; round < 500; ++round) {
        std::vector<std::pair<L, L>> pairs(1 + rng() % 60);
        for (auto& p : pairs) p = {kAwareLabels[rng() % 4], kAwareLabels[rng() % 4]};
        auto m = compute_metrics(pairs);
        std::size_t correct = 0, sum = 0;
        for (const auto& [t, p] : pairs) correct += t == p;
        for (const auto& row : m.confusion)
            for (auto v : row) sum += v;
        EXPECT_EQ(sum, pairs.size());
        EXPECT_DOUBLE_EQ(m.accuracy, static_cast<double>(correct) / static_cast<double>(pairs.size()));
        EXPECT_NEAR(m.recall, m.accuracy, 1e-12);
        EXPECT_GE(m.precision, 0.0);
        EXPECT_LE(m.precision, 1.0 + 1e-12);
    }
}

TEST(Metrics, ConfusionSum) {
    auto a = compute_metrics(twelve_traces()).confusion;
    auto b = a + a;
    EXPECT_EQ(b[0][0], 6u);
    EXPECT_EQ(metrics_from_confusion(b).accuracy, 7.0 / 12.0);
}
