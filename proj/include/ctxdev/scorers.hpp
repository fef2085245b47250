#pragma once

#include "ctxdev/errors.hpp"
#include "ctxdev/event_log.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ctxdev {

/// Case id -> deviation score in [0,1].
using CaseScores = std::map<std::string, double>;

enum class ScorerKind { window_frequency, dfg_conformance, profiles };

inline std::string_view to_string(ScorerKind kind) {
    switch (kind) {
    case ScorerKind::window_frequency: return "window_frequency";
    case ScorerKind::dfg_conformance: return "dfg_conformance";
    case ScorerKind::profiles: return "profiles";
    }
    return "?";
}

inline ScorerKind scorer_kind_from_string(std::string_view name) {
    if (name == "window_frequency" || name == "window-frequency") return ScorerKind::window_frequency;
    if (name == "dfg_conformance" || name == "dfg-conformance") return ScorerKind::dfg_conformance;
    if (name == "profiles") return ScorerKind::profiles;
    throw ConfigError("unknown scorer kind '" + std::string(name) + "'");
}

struct ScorerConfig {
    ScorerKind kind = ScorerKind::window_frequency;
    std::size_t window_size = 2;        ///< window_frequency: gram length k
    double infrequency_threshold = 0.05; ///< window_frequency
    double noise_filter = 0.0;          ///< dfg_conformance
    std::size_t iterations = 3;         ///< profiles
    double sample_fraction = 0.2;       ///< profiles
    std::uint64_t seed = 0;             ///< profiles

    void validate() const {
        if (window_size < 2) throw ParameterError("window size must be at least 2");
        if (infrequency_threshold < 0 || infrequency_threshold > 1)
            throw ParameterError("infrequency threshold must lie in [0,1]");
        if (noise_filter < 0 || noise_filter >= 1) throw ParameterError("noise filter must lie in [0,1)");
        if (iterations < 1) throw ParameterError("profiles needs at least one iteration");
        if (!(sample_fraction > 0) || sample_fraction > 1) throw ParameterError("sample fraction must lie in (0,1]");
    }
};

namespace detail {

/// Activity labels mapped to dense ids in lexicographic order.
class ActivityIndex {
public:
    explicit ActivityIndex(const EventLog& log) {
        std::map<std::string, int> ids;
        log.for_each_event([&](const Event& e) { ids.emplace(e.activity, 0); });
        int next = 0;
        for (auto& [name, id] : ids) id = next++;
        ids_ = std::move(ids);
    }

    int operator()(const std::string& activity) const { return ids_.at(activity); }
    std::size_t size() const noexcept { return ids_.size(); }

    std::vector<int> encode(const Trace& trace) const {
        std::vector<int> out;
        out.reserve(trace.events.size());
        for (const auto& e : trace.events) out.push_back((*this)(e.activity));
        return out;
    }

private:
    std::map<std::string, int> ids_;
};

inline std::vector<std::vector<int>> grams_of(const std::vector<int>& seq, std::size_t k) {
    std::vector<std::vector<int>> grams;
    if (seq.size() < k) {
        grams.push_back(seq);
        return grams;
    }
    for (std::size_t i = 0; i + k <= seq.size(); ++i) grams.emplace_back(seq.begin() + static_cast<std::ptrdiff_t>(i),
                                                                        seq.begin() + static_cast<std::ptrdiff_t>(i + k));
    return grams;
}

/// 1 - sum(min)/sum(max) over activity count vectors.
inline double multiset_jaccard_distance(const std::vector<int>& a, const std::vector<int>& b) {
    long lo = 0, hi = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        lo += std::min(a[i], b[i]);
        hi += std::max(a[i], b[i]);
    }
    return hi == 0 ? 0.0 : 1.0 - static_cast<double>(lo) / static_cast<double>(hi);
}

} // namespace detail

/// Fraction of a trace's activity k-grams that are infrequent. A gram's
/// relative frequency is the share of traces containing it; it is
/// infrequent below `infreq_threshold`. Traces shorter than k form a
/// single gram of their full sequence.
inline CaseScores score_window_frequency(const EventLog& log, std::size_t k, double infreq_threshold) {
    if (log.empty()) throw EmptyInputError("cannot score an empty log");
    if (k < 2) throw ParameterError("window size must be at least 2");
    detail::ActivityIndex index(log);
    std::vector<std::vector<std::vector<int>>> per_trace;
    per_trace.reserve(log.trace_count());
    std::map<std::vector<int>, std::size_t> counts;
    const auto total = static_cast<double>(log.trace_count());
    for (const auto& trace : log.traces()) {
        auto grams = detail::grams_of(index.encode(trace), k);
        std::set<std::vector<int>> distinct(grams.begin(), grams.end());
        for (const auto& g : distinct) ++counts[g];
        per_trace.push_back(std::move(grams));
    }
    CaseScores scores;
    for (std::size_t t = 0; t < log.trace_count(); ++t) {
        const auto& grams = per_trace[t];
        std::size_t infrequent = 0;
        for (const auto& g : grams)
            if (static_cast<double>(counts[g]) / total < infreq_threshold) ++infrequent;
        scores[log.traces()[t].case_id] = grams.empty() ? 0.0 : static_cast<double>(infrequent) / static_cast<double>(grams.size());
    }
    return scores;
}

/// Fraction of a trace's directly-follows pairs, including the artificial
/// start and end transitions, that the filtered directly-follows graph of
/// the log does not retain. Pairs are retained when their share of all
/// pairs is at least `noise_filter`.
inline CaseScores score_dfg_conformance(const EventLog& log, double noise_filter) {
    if (log.empty()) throw EmptyInputError("cannot score an empty log");
    if (noise_filter < 0 || noise_filter >= 1) throw ParameterError("noise filter must lie in [0,1)");
    detail::ActivityIndex index(log);
    const int start = -1, end = -2;
    auto pairs_of = [&](const Trace& trace) {
        std::vector<std::pair<int, int>> pairs;
        int prev = start;
        for (const auto& e : trace.events) {
            int a = index(e.activity);
            pairs.emplace_back(prev, a);
            prev = a;
        }
        pairs.emplace_back(prev, end);
        return pairs;
    };
    std::map<std::pair<int, int>, std::size_t> counts;
    std::size_t total = 0;
    std::vector<std::vector<std::pair<int, int>>> per_trace;
    per_trace.reserve(log.trace_count());
    for (const auto& trace : log.traces()) {
        auto pairs = pairs_of(trace);
        for (const auto& p : pairs) ++counts[p];
        total += pairs.size();
        per_trace.push_back(std::move(pairs));
    }
    CaseScores scores;
    for (std::size_t t = 0; t < log.trace_count(); ++t) {
        std::size_t missing = 0;
        for (const auto& p : per_trace[t])
            if (static_cast<double>(counts[p]) / static_cast<double>(total) < noise_filter) ++missing;
        scores[log.traces()[t].case_id] = static_cast<double>(missing) / static_cast<double>(per_trace[t].size());
    }
    return scores;
}

/// Iterative profile scoring: each trace's score is its mean multiset
/// Jaccard distance to a reference sample. The first sample is drawn from
/// all traces, later ones from the lower-scored half. Final scores are
/// min-max normalized. Cases are processed in lexicographic order, so the
/// result does not depend on trace order in the log.
inline CaseScores score_profiles(const EventLog& log, std::size_t iterations, double sample_fraction, std::uint64_t seed) {
    if (log.trace_count() < 2) throw DegenerateInputError("profile scoring needs at least two traces");
    if (iterations < 1) throw ParameterError("profiles needs at least one iteration");
    if (!(sample_fraction > 0) || sample_fraction > 1) throw ParameterError("sample fraction must lie in (0,1]");

    detail::ActivityIndex index(log);
    std::vector<const Trace*> traces;
    for (const auto& t : log.traces()) traces.push_back(&t);
    std::sort(traces.begin(), traces.end(), [](const Trace* a, const Trace* b) { return a->case_id < b->case_id; });
    const std::size_t n = traces.size();

    // distinct activity multisets, so distances are computed once per profile pair
    std::map<std::vector<int>, std::size_t> profile_ids;
    std::vector<std::vector<int>> profiles;
    std::vector<std::size_t> profile_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> counts(index.size(), 0);
        for (const auto& e : traces[i]->events) ++counts[static_cast<std::size_t>(index(e.activity))];
        auto [it, inserted] = profile_ids.try_emplace(counts, profiles.size());
        if (inserted) profiles.push_back(counts);
        profile_of[i] = it->second;
    }
    const std::size_t p = profiles.size();
    std::vector<double> dist(p * p);
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b)
            dist[a * p + b] = dist[b * p + a] = detail::multiset_jaccard_distance(profiles[a], profiles[b]);

    const auto sample_size = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sample_fraction * static_cast<double>(n))));
    std::mt19937_64 rng(seed);
    std::vector<double> score(n, 0.0);

    auto rescore = [&](std::vector<std::size_t> pool) {
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(std::min(sample_size, pool.size()));
        std::sort(pool.begin(), pool.end());
        // per-profile sums over the sample; self-comparisons excluded below
        std::vector<double> sum(p, 0.0);
        std::vector<std::size_t> hits(p, 0);
        for (std::size_t j : pool) ++hits[profile_of[j]];
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b)
                if (hits[b]) sum[a] += static_cast<double>(hits[b]) * dist[a * p + b];
        std::vector<bool> in_sample(n, false);
        for (std::size_t j : pool) in_sample[j] = true;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t others = pool.size() - (in_sample[i] ? 1 : 0);
            score[i] = others ? sum[profile_of[i]] / static_cast<double>(others) : 0.0; // self distance is 0
        }
    };

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    rescore(all);
    for (std::size_t it = 1; it < iterations; ++it) {
        std::vector<std::size_t> order = all;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
        order.resize((n + 1) / 2);
        rescore(std::move(order));
    }

    auto [lo, hi] = std::minmax_element(score.begin(), score.end());
    const double min = *lo, range = *hi - *lo;
    CaseScores out;
    for (std::size_t i = 0; i < n; ++i) out[traces[i]->case_id] = range > 0 ? (score[i] - min) / range : 0.0;
    return out;
}

inline CaseScores score_traces(const EventLog& log, const ScorerConfig& config) {
    config.validate();
    switch (config.kind) {
    case ScorerKind::window_frequency: return score_window_frequency(log, config.window_size, config.infrequency_threshold);
    case ScorerKind::dfg_conformance: return score_dfg_conformance(log, config.noise_filter);
    case ScorerKind::profiles: return score_profiles(log, config.iterations, config.sample_fraction, config.seed);
    }
    throw ConfigError("unsupported scorer kind");
}

enum class BinaryLabel { deviating, normal };

/// d iff score > tau.
inline BinaryLabel detect(double score, double tau) { return score > tau ? BinaryLabel::deviating : BinaryLabel::normal; }

inline std::map<std::string, BinaryLabel> detect(const CaseScores& scores, double tau) {
    std::map<std::string, BinaryLabel> out;
    for (const auto& [c, s] : scores) out.emplace(c, detect(s, tau));
    return out;
}

} // namespace ctxdev
