#pragma once

#include "ctxdev/errors.hpp"
#include "ctxdev/labels.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>

namespace ctxdev {

/// Rows are the true class, columns the predicted class, both in
/// `kAwareLabels` order.
using ConfusionMatrix = std::array<std::array<std::size_t, 4>, 4>;

struct MetricsReport {
    ConfusionMatrix confusion{};
    std::size_t total = 0;
    double accuracy = 0.0;
    double avg_class_accuracy = 0.0; ///< unweighted mean recall over classes with support
    double precision = 0.0;          ///< support-weighted, 0 for never-predicted classes
    double recall = 0.0;             ///< support-weighted; equals accuracy

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline MetricsReport metrics_from_confusion(const ConfusionMatrix& confusion) {
    MetricsReport r;
    r.confusion = confusion;
    std::array<std::size_t, 4> support{}, predicted{};
    std::size_t correct = 0;
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t p = 0; p < 4; ++p) {
            support[t] += confusion[t][p];
            predicted[p] += confusion[t][p];
            r.total += confusion[t][p];
            if (t == p) correct += confusion[t][p];
        }
    if (r.total == 0) return r;
    const double total = static_cast<double>(r.total);
    r.accuracy = static_cast<double>(correct) / total;

    double recall_sum = 0, weighted_precision = 0, weighted_recall = 0;
    std::size_t classes = 0;
    for (std::size_t c = 0; c < 4; ++c) {
        if (support[c] == 0) continue;
        double recall = static_cast<double>(confusion[c][c]) / static_cast<double>(support[c]);
        double precision = predicted[c] ? static_cast<double>(confusion[c][c]) / static_cast<double>(predicted[c]) : 0.0;
        double weight = static_cast<double>(support[c]) / total;
        recall_sum += recall;
        ++classes;
        weighted_precision += weight * precision;
        weighted_recall += weight * recall;
    }
    r.avg_class_accuracy = recall_sum / static_cast<double>(classes);
    r.precision = weighted_precision;
    r.recall = weighted_recall;
    return r;
}

/// (truth, prediction) pairs.
inline MetricsReport compute_metrics(std::span<const std::pair<AwareLabel, AwareLabel>> pairs) {
    ConfusionMatrix confusion{};
    for (const auto& [truth, pred] : pairs) ++confusion[index_of(truth)][index_of(pred)];
    return metrics_from_confusion(confusion);
}

inline MetricsReport compute_metrics(const std::map<std::string, AwareLabel>& predicted,
                                     const std::map<std::string, AwareLabel>& truth) {
    if (predicted.size() != truth.size()) throw IntegrityError("prediction and truth cover different cases");
    ConfusionMatrix confusion{};
    for (const auto& [case_id, pred] : predicted) {
        auto it = truth.find(case_id);
        if (it == truth.end()) throw IntegrityError("no ground truth for case '" + case_id + "'");
        ++confusion[index_of(it->second)][index_of(pred)];
    }
    return metrics_from_confusion(confusion);
}

inline ConfusionMatrix operator+(ConfusionMatrix a, const ConfusionMatrix& b) {
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) a[i][j] += b[i][j];
    return a;
}

} // namespace ctxdev
