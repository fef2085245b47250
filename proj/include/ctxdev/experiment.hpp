#pragma once

#include "ctxdev/errors.hpp"
#include "ctxdev/metrics.hpp"
#include "ctxdev/postprocess.hpp"
#include "ctxdev/serialization.hpp"
#include "ctxdev/synthetic.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ctxdev {

/// Scenarios injected together in one experiment cell.
struct ScenarioSet {
    std::string name;
    std::vector<PositiveScenario> positive;
    std::vector<NegativeScenario> negative;
};

inline std::vector<ScenarioSet> default_scenario_sets() {
    using P = PositiveScenario;
    using N = NegativeScenario;
    return {
        {"workload+waiting_time", {P::workload}, {N::waiting_time}},
        {"workload+overwork", {P::workload}, {N::overwork}},
        {"capacity+waiting_time", {P::capacity}, {N::waiting_time}},
        {"capacity+overwork", {P::capacity}, {N::overwork}},
        {"all", {P::workload, P::capacity}, {N::waiting_time, N::overwork}},
    };
}

/// A scorer under evaluation together with its detection threshold.
struct ScorerSetup {
    std::string name;
    ScorerConfig config;
    double tau = 0.5;
};

/// Scorer setups used by the default grid. Thresholds were tuned once on
/// a reduced grid (one seed, 500 cases) and then frozen.
inline std::vector<ScorerSetup> default_scorer_setups() {
    ScorerSetup wf{"window_frequency", {}, 0.1};
    wf.config.kind = ScorerKind::window_frequency;
    ScorerSetup dfg{"dfg_conformance", {}, 0.1};
    dfg.config.kind = ScorerKind::dfg_conformance;
    dfg.config.noise_filter = 0.005;
    ScorerSetup prof{"profiles", {}, 0.7};
    prof.config.kind = ScorerKind::profiles;
    return {wf, dfg, prof};
}

inline std::vector<MeasureDefinition> default_experiment_measures() {
    return {
        {"workload", Polarity::positive, 1.0, NormalizationSpec::derived()},
        {"capacity_utilization", Polarity::positive, 1.0, NormalizationSpec::derived()},
        {"waiting_time", Polarity::negative, 1.0, NormalizationSpec::derived()},
        {"overwork", Polarity::negative, 1.0, NormalizationSpec::derived()},
    };
}

/// Everything needed to run the evaluation grid. Grid size is
/// |seeds| x |pct_deviating| x |scenarios| x |pct_attributable| per scorer.
struct ExperimentTemplate {
    SyntheticSpec dataset;
    std::vector<std::uint64_t> dataset_seeds{1, 2, 3};
    std::vector<double> pct_deviating{2, 5, 10};
    std::vector<double> pct_attributable{0, 25, 50, 75, 100};
    std::vector<ScenarioSet> scenarios = default_scenario_sets();
    ScenarioIntensity intensity;
    std::vector<MeasureDefinition> measures = default_experiment_measures();
    double span_length = static_cast<double>(kSecondsPerDay);
    std::vector<double> alpha_axis{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<ScorerSetup> scorers = default_scorer_setups();
    std::size_t parallelism = 0; ///< 0 = hardware concurrency

    std::size_t cells_per_scorer() const {
        return dataset_seeds.size() * pct_deviating.size() * scenarios.size() * pct_attributable.size();
    }
};

struct CellKey {
    std::size_t seed_index = 0;
    std::size_t deviation_index = 0;
    std::size_t scenario_index = 0;
    std::size_t attributable_index = 0;
};

struct CellResult {
    CellKey key;
    std::string scorer;
    std::size_t traces = 0;
    MetricsReport baseline;  ///< alpha = (0,0)
    MetricsReport optimized; ///< grid-searched alpha
    Degrees best;
};

struct ScorerSummary {
    std::string scorer;
    std::size_t cells = 0;
    MetricsReport mean_baseline;  ///< metric fields are cell means, confusion is the sum
    MetricsReport mean_optimized;
};

struct GridReport {
    std::vector<CellResult> cells; ///< scorer-major, then cell order
    std::vector<ScorerSummary> summaries;
};

/// Cell enumeration order: seed, % deviating, scenario set, % attributable.
inline std::vector<CellKey> enumerate_cells(const ExperimentTemplate& t) {
    std::vector<CellKey> keys;
    for (std::size_t s = 0; s < t.dataset_seeds.size(); ++s)
        for (std::size_t d = 0; d < t.pct_deviating.size(); ++d)
            for (std::size_t c = 0; c < t.scenarios.size(); ++c)
                for (std::size_t a = 0; a < t.pct_attributable.size(); ++a) keys.push_back(CellKey{s, d, c, a});
    return keys;
}

/// Generated log and ground truth of one cell: generation, deviation
/// injection, positive scenarios with relabeling, negative scenarios.
inline SyntheticLog build_cell_data(const ExperimentTemplate& t, const CellKey& key) {
    using detail::mix_seed;
    SyntheticSpec spec = t.dataset;
    const std::uint64_t base = t.dataset_seeds.at(key.seed_index);
    spec.seed = base;
    SyntheticLog data = generate_log(spec);
    std::uint64_t s = mix_seed(base, 1000 + key.deviation_index);
    data = inject_deviations(data, t.pct_deviating.at(key.deviation_index), s).data;
    s = mix_seed(s, 2000 + key.scenario_index);
    const auto& set = t.scenarios.at(key.scenario_index);
    const double attributable = t.pct_attributable.at(key.attributable_index);
    std::uint64_t step = 0;
    for (auto p : set.positive)
        data = inject_positive_scenario(data, p, attributable, mix_seed(s, 3000 + step++), spec, t.intensity).data;
    for (auto n : set.negative) data = inject_negative_scenario(data, n, mix_seed(s, 4000 + step++), spec, t.intensity).data;
    return data;
}

inline CellResult run_cell(const ExperimentTemplate& t, const ScorerSetup& scorer, const CellKey& key, const SyntheticLog& data) {
    PipelineConfig config;
    config.scorer = scorer.config;
    config.measures = t.measures;
    config.span_length = t.span_length;
    config.tau = scorer.tau;
    auto output = run_pipeline(data.log, config);
    auto truth = derive_trace_truth(data.log, data.truth);

    std::vector<LabeledTrace> labeled;
    labeled.reserve(output.results.size());
    for (const auto& r : output.results) labeled.push_back(LabeledTrace{r.raw_score, r.pc, r.nc, truth.at(r.case_id)});

    auto grid = default_alpha_grid(t.alpha_axis);
    auto search = grid_search_alphas(labeled, grid, scorer.tau);
    CellResult out;
    out.key = key;
    out.scorer = scorer.name;
    out.traces = labeled.size();
    out.baseline = evaluate_degrees(labeled, Degrees{0.0, 0.0}, scorer.tau);
    out.optimized = search.metrics;
    out.best = search.best;
    return out;
}

inline ScorerSummary summarize(const std::string& scorer, const std::vector<CellResult>& cells) {
    ScorerSummary s;
    s.scorer = scorer;
    auto add = [](MetricsReport& acc, const MetricsReport& m) {
        acc.accuracy += m.accuracy;
        acc.avg_class_accuracy += m.avg_class_accuracy;
        acc.precision += m.precision;
        acc.recall += m.recall;
        acc.confusion = acc.confusion + m.confusion;
        acc.total += m.total;
    };
    for (const auto& c : cells) {
        if (c.scorer != scorer) continue;
        ++s.cells;
        add(s.mean_baseline, c.baseline);
        add(s.mean_optimized, c.optimized);
    }
    if (s.cells) {
        for (auto* m : {&s.mean_baseline, &s.mean_optimized}) {
            const double n = static_cast<double>(s.cells);
            m->accuracy /= n;
            m->avg_class_accuracy /= n;
            m->precision /= n;
            m->recall /= n;
        }
    }
    return s;
}

/// Runs every cell for every scorer. Cells run concurrently; each cell's
/// log is built once and shared by all scorers. Output order does not
/// depend on scheduling.
inline GridReport run_experiment_grid(const ExperimentTemplate& t) {
    if (t.scorers.empty()) throw ConfigError("experiment defines no scorers");
    const auto keys = enumerate_cells(t);
    const std::size_t n_scorers = t.scorers.size();
    std::vector<CellResult> results(keys.size() * n_scorers);

    std::size_t workers = t.parallelism ? t.parallelism : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(keys.size(), 1));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= keys.size()) return;
            try {
                auto data = build_cell_data(t, keys[i]);
                for (std::size_t s = 0; s < n_scorers; ++s) results[s * keys.size() + i] = run_cell(t, t.scorers[s], keys[i], data);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = keys.size();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    GridReport report;
    report.cells = std::move(results);
    for (const auto& s : t.scorers) report.summaries.push_back(summarize(s.name, report.cells));
    return report;
}

inline std::string cell_id(const ExperimentTemplate& t, const CellKey& k) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "seed%llu_dev%g_%s_attr%g", static_cast<unsigned long long>(t.dataset_seeds[k.seed_index]),
                  t.pct_deviating[k.deviation_index], t.scenarios[k.scenario_index].name.c_str(),
                  t.pct_attributable[k.attributable_index]);
    return buf;
}

inline json to_json_value(const ExperimentTemplate& t, const CellResult& c) {
    return json{{"scorer", c.scorer},
                {"cell", cell_id(t, c.key)},
                {"dataset_seed", t.dataset_seeds[c.key.seed_index]},
                {"pct_deviating", t.pct_deviating[c.key.deviation_index]},
                {"scenario", t.scenarios[c.key.scenario_index].name},
                {"pct_context_attributable", t.pct_attributable[c.key.attributable_index]},
                {"traces", c.traces},
                {"best_alpha_pos", c.best.positive},
                {"best_alpha_neg", c.best.negative},
                {"baseline", to_json_value(c.baseline)},
                {"optimized", to_json_value(c.optimized)}};
}

/// cells.jsonl (one JSON object per cell), aggregate.csv (one row per scorer
/// and metric: baseline, optimized, difference) and confusion.json (summed
/// confusion matrices).
inline void write_grid_outputs(const ExperimentTemplate& t, const GridReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "cells.jsonl", std::ios::binary);
        for (const auto& c : report.cells) out << to_json_value(t, c).dump() << '\n';
    }
    {
        std::ofstream out(dir / "aggregate.csv", std::ios::binary);
        out << "scorer,metric,baseline,optimized,difference\n";
        for (const auto& s : report.summaries) {
            auto row = [&](const char* name, double b, double o) {
                char buf[256];
                std::snprintf(buf, sizeof buf, "%s,%s,%.6f,%.6f,%.6f\n", s.scorer.c_str(), name, b, o, o - b);
                out << buf;
            };
            row("accuracy", s.mean_baseline.accuracy, s.mean_optimized.accuracy);
            row("avg_class_accuracy", s.mean_baseline.avg_class_accuracy, s.mean_optimized.avg_class_accuracy);
            row("precision", s.mean_baseline.precision, s.mean_optimized.precision);
            row("recall", s.mean_baseline.recall, s.mean_optimized.recall);
        }
    }
    {
        json labels = json::array();
        for (auto l : kAwareLabels) labels.push_back(to_string(l));
        json conf = json::object();
        for (const auto& s : report.summaries)
            conf[s.scorer] = json{{"labels", labels},
                                  {"rows", "truth"},
                                  {"columns", "prediction"},
                                  {"baseline", to_json_value(s.mean_baseline.confusion)},
                                  {"optimized", to_json_value(s.mean_optimized.confusion)}};
        std::ofstream out(dir / "confusion.json", std::ios::binary);
        out << conf.dump(2) << '\n';
    }
}

namespace detail {

inline PositiveScenario positive_from_string(const std::string& s) {
    if (s == "workload") return PositiveScenario::workload;
    if (s == "capacity" || s == "capacity_utilization") return PositiveScenario::capacity;
    throw ConfigError("unknown positive scenario '" + s + "'");
}

inline NegativeScenario negative_from_string(const std::string& s) {
    if (s == "waiting_time") return NegativeScenario::waiting_time;
    if (s == "overwork") return NegativeScenario::overwork;
    throw ConfigError("unknown negative scenario '" + s + "'");
}

} // namespace detail

/// Reads the experiment file layout documented in docs/experiment-config.md.
inline ExperimentTemplate experiment_from_json(const json& j) {
    using detail::get_or;
    detail::require_keys(j, {"dataset", "grid", "intensity", "pipeline", "measures", "scorers"}, "experiment");
    ExperimentTemplate t;
    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        detail::require_keys(d, {"seeds", "n_cases", "horizon_days", "start", "inter_arrival_mean", "service_time_mean",
                                 "weekdays_only", "resources"},
                             "dataset");
        t.dataset_seeds = get_or(d, "seeds", t.dataset_seeds);
        t.dataset.n_cases = get_or(d, "n_cases", t.dataset.n_cases);
        t.dataset.horizon_days = get_or(d, "horizon_days", t.dataset.horizon_days);
        if (d.contains("start")) {
            auto ts = parse_timestamp(d.at("start").get<std::string>());
            if (!ts) throw ConfigError("invalid dataset start timestamp");
            t.dataset.start = *ts;
        }
        t.dataset.inter_arrival_mean = get_or(d, "inter_arrival_mean", t.dataset.inter_arrival_mean);
        t.dataset.service_time_mean = get_or(d, "service_time_mean", t.dataset.service_time_mean);
        t.dataset.weekdays_only = get_or(d, "weekdays_only", t.dataset.weekdays_only);
        if (d.contains("resources")) {
            if (d.at("resources").is_number()) t.dataset.resources = default_resources(d.at("resources").get<std::size_t>());
            else t.dataset.resources = d.at("resources").get<std::vector<std::string>>();
        }
        t.dataset.validate();
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        detail::require_keys(g, {"pct_deviating", "pct_context_attributable", "scenarios"}, "grid");
        t.pct_deviating = get_or(g, "pct_deviating", t.pct_deviating);
        t.pct_attributable = get_or(g, "pct_context_attributable", t.pct_attributable);
        if (g.contains("scenarios")) {
            t.scenarios.clear();
            for (const auto& s : g.at("scenarios")) {
                detail::require_keys(s, {"name", "positive", "negative"}, "scenario");
                ScenarioSet set;
                set.name = get_or<std::string>(s, "name", "");
                for (const auto& p : get_or<std::vector<std::string>>(s, "positive", {})) set.positive.push_back(detail::positive_from_string(p));
                for (const auto& n : get_or<std::vector<std::string>>(s, "negative", {})) set.negative.push_back(detail::negative_from_string(n));
                if (set.name.empty()) throw ConfigError("scenario set without a name");
                t.scenarios.push_back(std::move(set));
            }
        }
    }
    if (j.contains("intensity")) {
        const auto& i = j.at("intensity");
        detail::require_keys(i, {"workload_extra_fraction", "vacation_resources", "vacation_days_min", "vacation_days_max", "delayed_days",
                                 "delay_hours_min", "delay_hours_max", "overwork_shift_fraction"},
                             "intensity");
        auto& x = t.intensity;
        x.workload_extra_fraction = get_or(i, "workload_extra_fraction", x.workload_extra_fraction);
        x.vacation_resources = get_or(i, "vacation_resources", x.vacation_resources);
        x.vacation_days_min = get_or(i, "vacation_days_min", x.vacation_days_min);
        x.vacation_days_max = get_or(i, "vacation_days_max", x.vacation_days_max);
        x.delayed_days = get_or(i, "delayed_days", x.delayed_days);
        x.delay_hours_min = get_or(i, "delay_hours_min", x.delay_hours_min);
        x.delay_hours_max = get_or(i, "delay_hours_max", x.delay_hours_max);
        x.overwork_shift_fraction = get_or(i, "overwork_shift_fraction", x.overwork_shift_fraction);
    }
    if (j.contains("pipeline")) {
        const auto& p = j.at("pipeline");
        detail::require_keys(p, {"span_length", "alpha_axis", "parallelism"}, "pipeline");
        if (p.contains("span_length")) t.span_length = detail::span_length_from_json(p.at("span_length"));
        t.alpha_axis = get_or(p, "alpha_axis", t.alpha_axis);
        t.parallelism = get_or(p, "parallelism", t.parallelism);
        for (double a : t.alpha_axis)
            if (a < 0 || a > 1) throw ConfigError("alpha_axis values must lie in [0,1]");
    }
    if (j.contains("measures")) {
        t.measures.clear();
        for (const auto& m : j.at("measures")) t.measures.push_back(measure_from_json(m));
    }
    validate_measures(t.measures);
    if (j.contains("scorers")) {
        t.scorers.clear();
        for (const auto& s : j.at("scorers")) {
            ScorerSetup setup;
            setup.config = scorer_from_json(s);
            setup.config.validate();
            setup.name = get_or<std::string>(s, "name", std::string(to_string(setup.config.kind)));
            setup.tau = get_or(s, "tau", 0.5);
            if (setup.tau < 0 || setup.tau > 1) throw ConfigError("scorer tau must lie in [0,1]");
            t.scorers.push_back(std::move(setup));
        }
    }
    if (t.dataset_seeds.empty() || t.pct_deviating.empty() || t.pct_attributable.empty() || t.scenarios.empty())
        throw ConfigError("every grid axis needs at least one value");
    return t;
}

} // namespace ctxdev
