#pragma once

#include "ctxdev/errors.hpp"
#include "ctxdev/event_log.hpp"
#include "ctxdev/labels.hpp"
#include "ctxdev/time.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ctxdev {

/// One step of a sequential process model; a step with several
/// alternatives is an exclusive choice weighted by `probability`.
struct ActivityStep {
    struct Alternative {
        std::string activity;
        double probability = 1.0;
    };
    std::vector<Alternative> alternatives;
};

/// place order -> check stock -> pick -> pack -> (ship standard | ship express) -> invoice -> payment
inline std::vector<ActivityStep> default_order_model() {
    return {
        {{{"place order", 1.0}}},
        {{{"check stock", 1.0}}},
        {{{"pick", 1.0}}},
        {{{"pack", 1.0}}},
        {{{"ship standard", 0.7}, {"ship express", 0.3}}},
        {{{"invoice", 1.0}}},
        {{{"payment", 1.0}}},
    };
}

inline std::vector<std::string> default_resources(std::size_t n = 10) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= n; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "r%02zu", i);
        out.emplace_back(buf);
    }
    return out;
}

struct SyntheticSpec {
    std::size_t n_cases = 2000;
    Timestamp start = parse_timestamp("2022-01-03 08:00:00").value();
    std::size_t horizon_days = 60;
    std::vector<ActivityStep> activity_model = default_order_model();
    std::vector<std::string> resources = default_resources();
    /// Mean seconds between case arrivals; 0 spreads n_cases over the horizon.
    double inter_arrival_mean = 0.0;
    /// Mean seconds between consecutive activities of a case.
    double service_time_mean = 1800.0;
    /// Process only runs Monday to Friday (weekend time is skipped).
    bool weekdays_only = true;
    std::uint64_t seed = 1;

    void validate() const {
        if (n_cases < 1) throw ParameterError("n_cases must be at least 1");
        if (horizon_days < 1) throw ParameterError("horizon_days must be at least 1");
        if (activity_model.empty()) throw ParameterError("activity model is empty");
        for (const auto& step : activity_model) {
            if (step.alternatives.empty()) throw ParameterError("activity step without alternatives");
            for (const auto& alt : step.alternatives)
                if (!(alt.probability > 0)) throw ParameterError("branch probabilities must be positive");
        }
        if (resources.empty()) throw ParameterError("resource pool is empty");
        if (inter_arrival_mean < 0) throw ParameterError("inter-arrival mean must be positive");
        if (!(service_time_mean > 0)) throw ParameterError("service time mean must be positive");
    }

    /// Length of the horizon on the process clock.
    double horizon_seconds() const {
        if (!weekdays_only) return static_cast<double>(horizon_days) * kSecondsPerDay;
        std::size_t weekdays = 0;
        Timestamp day = start_of_day(start);
        for (std::size_t d = 0; d < horizon_days; ++d) {
            if (!is_weekend(day + std::chrono::days{d})) ++weekdays;
        }
        return static_cast<double>(std::max<std::size_t>(weekdays, 1)) * kSecondsPerDay;
    }

    double effective_inter_arrival_mean() const {
        return inter_arrival_mean > 0 ? inter_arrival_mean : horizon_seconds() / static_cast<double>(n_cases);
    }
};

enum class ContextFlag : std::uint8_t { none, normal, deviating };

struct EventTruth {
    bool injected = false; ///< non-context deviating
    ContextFlag context = ContextFlag::none;

    friend bool operator==(const EventTruth&, const EventTruth&) = default;
};

/// Per-event ground truth keyed by event id.
struct GroundTruth {
    std::unordered_map<std::string, EventTruth> events;

    EventTruth& operator[](const std::string& id) { return events[id]; }
    EventTruth get(const std::string& id) const {
        auto it = events.find(id);
        return it == events.end() ? EventTruth{} : it->second;
    }
    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct SyntheticLog {
    EventLog log;
    GroundTruth truth;
};

/// Non-context label from injected flags; the context label is d_c if any
/// event is context-deviating, else n_c if any is context-normal, else it
/// follows the non-context label.
inline AwareLabel trace_truth(const Trace& trace, const GroundTruth& truth) {
    bool injected = false, ctx_dev = false, ctx_norm = false;
    for (const auto& e : trace.events) {
        auto t = truth.get(e.id);
        injected |= t.injected;
        ctx_dev |= t.context == ContextFlag::deviating;
        ctx_norm |= t.context == ContextFlag::normal;
    }
    bool context_deviating = ctx_dev ? true : ctx_norm ? false : injected;
    return make_label(injected, context_deviating);
}

inline std::map<std::string, AwareLabel> derive_trace_truth(const EventLog& log, const GroundTruth& truth) {
    std::map<std::string, AwareLabel> out;
    for (const auto& trace : log.traces()) out.emplace(trace.case_id, trace_truth(trace, truth));
    return out;
}

namespace detail {

/// Moves `t` forward by `seconds` of process time, skipping weekends when
/// `weekdays_only` is set.
inline Timestamp advance_clock(Timestamp t, double seconds, bool weekdays_only) {
    auto remaining = static_cast<std::int64_t>(std::llround(seconds));
    if (!weekdays_only) return t + std::chrono::seconds{remaining};
    for (;;) {
        if (is_weekend(t)) {
            t = start_of_day(t) + std::chrono::days{weekday_of(t) == std::chrono::Saturday ? 2 : 1};
            continue;
        }
        Timestamp midnight = start_of_day(t) + std::chrono::days{1};
        std::int64_t left_today = to_epoch(midnight) - to_epoch(t);
        if (remaining < left_today) return t + std::chrono::seconds{remaining};
        remaining -= left_today;
        t = midnight;
    }
}

inline std::string numbered(std::string_view prefix, std::size_t n, int width = 5) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*zu", width, n);
    return std::string(prefix) + buf;
}

/// Appends `count` cases arriving from `first_arrival` with the given mean
/// inter-arrival time.
inline void append_cases(std::vector<Trace>& traces, const SyntheticSpec& spec, std::mt19937_64& rng, std::size_t count,
                         Timestamp first_arrival, double inter_arrival_mean, std::string_view case_prefix,
                         std::size_t first_number) {
    std::exponential_distribution<double> arrival(1.0 / inter_arrival_mean);
    std::exponential_distribution<double> service(1.0 / spec.service_time_mean);
    std::uniform_int_distribution<std::size_t> pick_resource(0, spec.resources.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Timestamp arrival_time = detail::advance_clock(first_arrival, 0, spec.weekdays_only);
    for (std::size_t c = 0; c < count; ++c) {
        if (c > 0) arrival_time = advance_clock(arrival_time, arrival(rng), spec.weekdays_only);
        Trace trace;
        trace.case_id = numbered(case_prefix, first_number + c);
        Timestamp t = arrival_time;
        for (std::size_t s = 0; s < spec.activity_model.size(); ++s) {
            const auto& alts = spec.activity_model[s].alternatives;
            double total = 0;
            for (const auto& a : alts) total += a.probability;
            double u = unit(rng) * total;
            std::size_t chosen = 0;
            while (chosen + 1 < alts.size() && u >= alts[chosen].probability) u -= alts[chosen++].probability;
            if (s > 0) t = advance_clock(t, service(rng), spec.weekdays_only);
            Event e;
            e.case_id = trace.case_id;
            e.id = trace.case_id + "-" + std::to_string(s + 1);
            e.activity = alts[chosen].activity;
            e.timestamp = t;
            e.resource = spec.resources[pick_resource(rng)];
            trace.events.push_back(std::move(e));
        }
        traces.push_back(std::move(trace));
    }
}

inline std::vector<Trace> copy_traces(const EventLog& log) { return log.traces(); }

/// Every event location, for uniform sampling.
inline std::vector<std::pair<std::size_t, std::size_t>> event_positions(const std::vector<Trace>& traces) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t t = 0; t < traces.size(); ++t)
        for (std::size_t i = 0; i < traces[t].events.size(); ++i) out.emplace_back(t, i);
    return out;
}

/// SplitMix64 step, used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Relabels a random `pct` share of `eligible` events as context-normal.
inline std::size_t relabel_share(std::vector<std::string> eligible, double pct, GroundTruth& truth, std::mt19937_64& rng) {
    std::sort(eligible.begin(), eligible.end());
    std::shuffle(eligible.begin(), eligible.end(), rng);
    auto n = static_cast<std::size_t>(std::llround(pct / 100.0 * static_cast<double>(eligible.size())));
    n = std::min(n, eligible.size());
    for (std::size_t i = 0; i < n; ++i) truth[eligible[i]].context = ContextFlag::normal;
    return n;
}

} // namespace detail

/// Simulates the order process. Deterministic for a given spec.
inline SyntheticLog generate_log(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::vector<Trace> traces;
    traces.reserve(spec.n_cases);
    detail::append_cases(traces, spec, rng, spec.n_cases, spec.start, spec.effective_inter_arrival_mean(), "c", 1);
    SyntheticLog out{EventLog(std::move(traces)), {}};
    out.log.for_each_event([&](const Event& e) { out.truth[e.id] = EventTruth{}; });
    return out;
}

enum class Mutation { rework, swap, replace_resource, remove };

inline constexpr std::array<Mutation, 4> kMutations{Mutation::rework, Mutation::swap, Mutation::replace_resource,
                                                    Mutation::remove};

inline std::string_view to_string(Mutation m) {
    switch (m) {
    case Mutation::rework: return "rework";
    case Mutation::swap: return "swap";
    case Mutation::replace_resource: return "replace_resource";
    case Mutation::remove: return "remove";
    }
    return "?";
}

struct DeviationInjection {
    SyntheticLog data;
    std::array<std::size_t, 4> applied{}; ///< indexed like kMutations
    std::vector<std::string> flagged;     ///< event ids flagged as injected, in application order
};

/// Applies round(pct% of |E|) mutations, equally split over the four kinds.
/// Every mutation flags exactly one previously unflagged event: the added
/// event (rework), the moved-later event (swap), the re-assigned event
/// (replace resource) or the successor of the removed event, or its
/// predecessor when it was last (remove).
inline DeviationInjection inject_deviations(const SyntheticLog& input, double pct, std::uint64_t seed) {
    if (!(pct > 0 && pct < 100)) throw ParameterError("deviation percentage must lie in (0,100)");
    DeviationInjection out;
    out.data.truth = input.truth;
    std::vector<Trace> traces = detail::copy_traces(input.log);
    GroundTruth& truth = out.data.truth;
    std::mt19937_64 rng(seed);

    std::set<std::string> resources;
    input.log.for_each_event([&](const Event& e) {
        if (e.resource) resources.insert(*e.resource);
    });
    const std::vector<std::string> pool(resources.begin(), resources.end());

    std::unordered_set<std::string> ids;
    input.log.for_each_event([&](const Event& e) { ids.insert(e.id); });

    const auto total = static_cast<std::size_t>(std::llround(pct / 100.0 * static_cast<double>(input.log.event_count())));
    std::vector<Mutation> plan;
    for (std::size_t i = 0; i < total; ++i) plan.push_back(kMutations[i % 4]);
    std::shuffle(plan.begin(), plan.end(), rng);

    auto flagged = [&](const Event& e) { return truth.get(e.id).injected; };
    auto flag = [&](const Event& e) {
        truth[e.id].injected = true;
        out.flagged.push_back(e.id);
    };

    constexpr int kAttempts = 2000;
    auto positions = detail::event_positions(traces);
    for (Mutation m : plan) {
        for (int attempt = 0; attempt < kAttempts; ++attempt) {
            if (positions.empty()) break;
            auto [t, i] = positions[std::uniform_int_distribution<std::size_t>(0, positions.size() - 1)(rng)];
            auto& events = traces[t].events;
            bool done = false;
            switch (m) {
            case Mutation::rework: {
                std::size_t source = std::uniform_int_distribution<std::size_t>(0, i)(rng);
                Event e;
                e.case_id = traces[t].case_id;
                e.activity = events[source].activity;
                std::int64_t at = to_epoch(events[i].timestamp);
                at = i + 1 < events.size() ? at + (to_epoch(events[i + 1].timestamp) - at) / 2 : at + 900;
                e.timestamp = from_epoch(at);
                if (!pool.empty()) e.resource = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
                std::string id = events[i].id + "-rw";
                for (int n = 2; ids.contains(id); ++n) id = events[i].id + "-rw" + std::to_string(n);
                e.id = id;
                ids.insert(id);
                events.insert(events.begin() + static_cast<std::ptrdiff_t>(i + 1), e);
                flag(e);
                done = true;
                break;
            }
            case Mutation::swap: {
                if (i + 1 >= events.size() || flagged(events[i]) || events[i].activity == events[i + 1].activity) break;
                std::swap(events[i].timestamp, events[i + 1].timestamp);
                std::swap(events[i], events[i + 1]);
                flag(events[i + 1]);
                done = true;
                break;
            }
            case Mutation::replace_resource: {
                if (flagged(events[i]) || !events[i].resource || pool.size() < 2) break;
                std::string next = *events[i].resource;
                while (next == *events[i].resource)
                    next = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
                events[i].resource = next;
                flag(events[i]);
                done = true;
                break;
            }
            case Mutation::remove: {
                if (events.size() < 2 || flagged(events[i])) break;
                std::size_t neighbour = i + 1 < events.size() ? i + 1 : i - 1;
                if (flagged(events[neighbour])) break;
                flag(events[neighbour]);
                truth.events.erase(events[i].id);
                events.erase(events.begin() + static_cast<std::ptrdiff_t>(i));
                done = true;
                break;
            }
            }
            if (done) {
                ++out.applied[static_cast<std::size_t>(m)];
                if (m == Mutation::rework || m == Mutation::remove) positions = detail::event_positions(traces);
                break;
            }
        }
    }
    for (auto& trace : traces) sort_by_time(trace);
    out.data.log = EventLog(std::move(traces));
    return out;
}

enum class PositiveScenario { workload, capacity };
enum class NegativeScenario { waiting_time, overwork };

inline std::string_view to_string(PositiveScenario s) { return s == PositiveScenario::workload ? "workload" : "capacity"; }
inline std::string_view to_string(NegativeScenario s) { return s == NegativeScenario::waiting_time ? "waiting_time" : "overwork"; }

/// Fixed scenario intensities.
struct ScenarioIntensity {
    double workload_extra_fraction = 1.0; ///< extra orders relative to the chosen week's own volume
    std::size_t vacation_resources = 3;
    std::size_t vacation_days_min = 5;
    std::size_t vacation_days_max = 10;
    std::size_t delayed_days = 2;
    double delay_hours_min = 4.0;
    double delay_hours_max = 24.0;
    double overwork_shift_fraction = 0.02; ///< share of weekday events that start a shift
};

struct ScenarioReport {
    SyntheticLog data;
    std::vector<std::string> affected; ///< events in the scenario's scope (sorted)
    std::size_t eligible = 0;          ///< positive: injected events in scope without a context flag
    std::size_t relabeled = 0;
    std::size_t added_events = 0;
    std::vector<std::pair<Timestamp, Timestamp>> periods; ///< chosen week / vacations / delayed days
};

/// Positive contextual scenario followed by relabeling pct_attributable% of
/// the non-context deviating events in its scope as context-normal.
inline ScenarioReport inject_positive_scenario(const SyntheticLog& input, PositiveScenario scenario, double pct_attributable,
                                               std::uint64_t seed, const SyntheticSpec& spec,
                                               const ScenarioIntensity& intensity = {}) {
    if (pct_attributable < 0 || pct_attributable > 100) throw ParameterError("attributable percentage must lie in [0,100]");
    ScenarioReport out;
    out.data.truth = input.truth;
    std::vector<Trace> traces = detail::copy_traces(input.log);
    std::mt19937_64 rng(seed);
    std::vector<std::string> scope;

    if (scenario == PositiveScenario::workload) {
        const std::size_t weeks = std::max<std::size_t>(1, spec.horizon_days / 7);
        const std::size_t week = std::uniform_int_distribution<std::size_t>(0, weeks - 1)(rng);
        const Timestamp begin = start_of_week(spec.start) + std::chrono::weeks{week};
        const Timestamp end = begin + std::chrono::weeks{1};
        out.periods.emplace_back(begin, end);

        std::size_t in_week = 0;
        for (const auto& trace : traces)
            if (!trace.events.empty() && trace.events.front().timestamp >= begin && trace.events.front().timestamp < end) ++in_week;
        auto extra = static_cast<std::size_t>(std::llround(intensity.workload_extra_fraction * static_cast<double>(in_week)));
        if (extra > 0) {
            SyntheticSpec week_spec = spec;
            double week_seconds = spec.weekdays_only ? 5.0 * kSecondsPerDay : 7.0 * kSecondsPerDay;
            std::size_t before = traces.size();
            detail::append_cases(traces, week_spec, rng, extra, begin, week_seconds / static_cast<double>(extra), "x", 1);
            for (std::size_t t = before; t < traces.size(); ++t)
                for (const auto& e : traces[t].events) {
                    out.data.truth[e.id] = EventTruth{};
                    ++out.added_events;
                }
        }
        for (const auto& trace : traces)
            for (const auto& e : trace.events)
                if (e.timestamp >= begin && e.timestamp < end) scope.push_back(e.id);
    } else {
        std::set<std::string> resource_set;
        for (const auto& trace : traces)
            for (const auto& e : trace.events)
                if (e.resource) resource_set.insert(*e.resource);
        std::vector<std::string> pool(resource_set.begin(), resource_set.end());
        std::shuffle(pool.begin(), pool.end(), rng);
        const std::size_t n_away = std::min(intensity.vacation_resources, pool.size() > 0 ? pool.size() - 1 : 0);

        struct Vacation {
            std::string resource;
            Timestamp begin, end;
        };
        std::vector<Vacation> vacations;
        const Timestamp day0 = start_of_day(spec.start);
        for (std::size_t r = 0; r < n_away; ++r) {
            auto first = std::uniform_int_distribution<std::size_t>(0, spec.horizon_days - 1)(rng);
            auto length = std::uniform_int_distribution<std::size_t>(intensity.vacation_days_min,
                                                                     std::max(intensity.vacation_days_min, intensity.vacation_days_max))(rng);
            Timestamp b = day0 + std::chrono::days{first};
            vacations.push_back(Vacation{pool[r], b, b + std::chrono::days{length}});
            out.periods.emplace_back(b, b + std::chrono::days{length});
        }
        auto away = [&](const std::string& resource, Timestamp t) {
            for (const auto& v : vacations)
                if (v.resource == resource && t >= v.begin && t < v.end) return true;
            return false;
        };
        for (auto& trace : traces)
            for (auto& e : trace.events) {
                if (!e.resource || !away(*e.resource, e.timestamp)) continue;
                std::vector<const std::string*> present;
                for (const auto& r : resource_set)
                    if (!away(r, e.timestamp)) present.push_back(&r);
                if (present.empty()) continue;
                e.resource = *present[std::uniform_int_distribution<std::size_t>(0, present.size() - 1)(rng)];
                scope.push_back(e.id);
            }
    }

    std::vector<std::string> eligible;
    for (const auto& id : scope) {
        auto t = out.data.truth.get(id);
        if (t.injected && t.context == ContextFlag::none) eligible.push_back(id);
    }
    out.eligible = eligible.size();
    out.relabeled = detail::relabel_share(std::move(eligible), pct_attributable, out.data.truth, rng);
    std::sort(scope.begin(), scope.end());
    out.affected = std::move(scope);
    out.data.log = EventLog(std::move(traces));
    return out;
}

/// Negative contextual scenario. Moved events that are non-context normal
/// or context-normal become context-deviating. A trace's events after a
/// moved event move by the same offset, so trace order is unchanged.
inline ScenarioReport inject_negative_scenario(const SyntheticLog& input, NegativeScenario scenario, std::uint64_t seed,
                                               const SyntheticSpec& spec, const ScenarioIntensity& intensity = {}) {
    ScenarioReport out;
    out.data.truth = input.truth;
    std::vector<Trace> traces = detail::copy_traces(input.log);
    std::mt19937_64 rng(seed);
    std::vector<std::string> moved;
    (void)spec;

    auto shift_suffix = [&](Trace& trace, std::size_t from, std::int64_t seconds) {
        for (std::size_t i = from; i < trace.events.size(); ++i) {
            trace.events[i].timestamp += std::chrono::seconds{seconds};
            moved.push_back(trace.events[i].id);
        }
    };

    if (scenario == NegativeScenario::waiting_time) {
        std::set<Timestamp> days;
        for (const auto& trace : traces)
            for (const auto& e : trace.events)
                if (!is_weekend(e.timestamp)) days.insert(start_of_day(e.timestamp));
        std::vector<Timestamp> candidates(days.begin(), days.end());
        std::shuffle(candidates.begin(), candidates.end(), rng);
        candidates.resize(std::min(intensity.delayed_days, candidates.size()));
        std::sort(candidates.begin(), candidates.end());
        std::set<Timestamp> chosen(candidates.begin(), candidates.end());
        for (auto d : candidates) out.periods.emplace_back(d, d + std::chrono::days{1});

        std::uniform_real_distribution<double> delay(intensity.delay_hours_min * 3600.0,
                                                     std::max(intensity.delay_hours_min, intensity.delay_hours_max) * 3600.0);
        for (auto& trace : traces) {
            for (std::size_t i = 0; i < trace.events.size(); ++i) {
                if (!chosen.contains(start_of_day(trace.events[i].timestamp))) continue;
                shift_suffix(trace, i, static_cast<std::int64_t>(std::llround(delay(rng))));
                break;
            }
        }
    } else {
        std::vector<std::pair<std::size_t, std::size_t>> weekday_events;
        for (std::size_t t = 0; t < traces.size(); ++t)
            for (std::size_t i = 0; i < traces[t].events.size(); ++i)
                if (!is_weekend(traces[t].events[i].timestamp)) weekday_events.emplace_back(t, i);
        std::shuffle(weekday_events.begin(), weekday_events.end(), rng);
        auto n = static_cast<std::size_t>(std::llround(intensity.overwork_shift_fraction * static_cast<double>(weekday_events.size())));
        weekday_events.resize(std::min(n, weekday_events.size()));

        std::map<std::size_t, std::size_t> anchor; // trace -> earliest selected event
        for (auto [t, i] : weekday_events) {
            auto it = anchor.find(t);
            if (it == anchor.end() || i < it->second) anchor[t] = i;
        }
        std::bernoulli_distribution sunday(0.5);
        for (auto [t, i] : anchor) {
            Timestamp at = traces[t].events[i].timestamp;
            unsigned iso = weekday_of(at).iso_encoding(); // Monday 1 .. Friday 5
            std::int64_t days_ahead = static_cast<std::int64_t>(6 - iso) + (sunday(rng) ? 1 : 0);
            shift_suffix(traces[t], i, days_ahead * kSecondsPerDay);
        }
    }

    for (const auto& id : moved) {
        auto& t = out.data.truth[id];
        if (!t.injected || t.context == ContextFlag::normal) {
            t.context = ContextFlag::deviating;
            ++out.relabeled;
        }
    }
    std::sort(moved.begin(), moved.end());
    out.affected = std::move(moved);
    out.data.log = EventLog(std::move(traces));
    return out;
}

} // namespace ctxdev
