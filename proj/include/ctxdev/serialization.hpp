#pragma once

#include "ctxdev/context.hpp"
#include "ctxdev/errors.hpp"
#include "ctxdev/io_csv.hpp"
#include "ctxdev/labels.hpp"
#include "ctxdev/measures.hpp"
#include "ctxdev/metrics.hpp"
#include "ctxdev/postprocess.hpp"
#include "ctxdev/scorers.hpp"
#include "ctxdev/time_span.hpp"

#include <nlohmann/json.hpp>

#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace ctxdev {

using nlohmann::json;

namespace detail {

inline void require_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be a table/object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok |= key == a;
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("invalid value for '") + key + "'");
    }
}

/// Seconds, or one of "hour", "day", "week".
inline double span_length_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "hour") return 3600.0;
        if (s == "day") return static_cast<double>(kSecondsPerDay);
        if (s == "week") return static_cast<double>(kSecondsPerWeek);
    }
    throw ConfigError("span_length must be seconds or one of hour/day/week");
}

} // namespace detail

inline Polarity polarity_from_string(std::string_view s) {
    if (s == "pos" || s == "positive") return Polarity::positive;
    if (s == "neg" || s == "negative") return Polarity::negative;
    throw ConfigError("polarity must be 'pos' or 'neg', got '" + std::string(s) + "'");
}

inline MeasureDefinition measure_from_json(const json& j) {
    detail::require_keys(j, {"name", "polarity", "weight", "min", "max", "bounds"}, "measure");
    MeasureDefinition m;
    m.name = detail::get_or<std::string>(j, "name", "");
    if (m.name.empty()) throw ConfigError("measure without a name");
    m.polarity = polarity_from_string(detail::get_or<std::string>(j, "polarity", "pos"));
    m.weight = detail::get_or<double>(j, "weight", 1.0);
    bool is_auto = detail::get_or<std::string>(j, "bounds", "auto") == "auto";
    auto numeric = [&](const char* key) { return j.contains(key) && j.at(key).is_number(); };
    if (numeric("min") != numeric("max")) throw ConfigError("measure '" + m.name + "' needs both min and max, or neither");
    if (numeric("min")) {
        m.normalization = NormalizationSpec::fixed(j.at("min").get<double>(), j.at("max").get<double>());
    } else if (!is_auto || (j.contains("min") && j.at("min") != "auto")) {
        throw ConfigError("measure '" + m.name + "' has invalid normalization bounds");
    }
    return m;
}

inline json to_json_value(const MeasureDefinition& m) {
    json j{{"name", m.name}, {"polarity", m.polarity == Polarity::positive ? "pos" : "neg"}, {"weight", m.weight}};
    if (m.normalization.bounds == NormalizationSpec::Bounds::fixed) {
        j["min"] = m.normalization.min;
        j["max"] = m.normalization.max;
    } else {
        j["bounds"] = "auto";
    }
    return j;
}

inline ScorerConfig scorer_from_json(const json& j) {
    detail::require_keys(j, {"kind", "window_size", "infrequency_threshold", "noise_filter", "iterations", "sample_fraction", "seed", "name", "tau"},
                         "scorer");
    ScorerConfig c;
    c.kind = scorer_kind_from_string(detail::get_or<std::string>(j, "kind", "window_frequency"));
    c.window_size = detail::get_or<std::size_t>(j, "window_size", c.window_size);
    c.infrequency_threshold = detail::get_or<double>(j, "infrequency_threshold", c.infrequency_threshold);
    c.noise_filter = detail::get_or<double>(j, "noise_filter", c.noise_filter);
    c.iterations = detail::get_or<std::size_t>(j, "iterations", c.iterations);
    c.sample_fraction = detail::get_or<double>(j, "sample_fraction", c.sample_fraction);
    c.seed = detail::get_or<std::uint64_t>(j, "seed", c.seed);
    return c;
}

inline json to_json_value(const ScorerConfig& c) {
    return json{{"kind", to_string(c.kind)},           {"window_size", c.window_size},
                {"infrequency_threshold", c.infrequency_threshold}, {"noise_filter", c.noise_filter},
                {"iterations", c.iterations},          {"sample_fraction", c.sample_fraction},
                {"seed", c.seed}};
}

inline CsvMapping csv_mapping_from_json(const json& j) {
    detail::require_keys(j, {"case", "activity", "timestamp", "resource", "id", "delimiter"}, "csv");
    CsvMapping m;
    m.case_column = detail::get_or<std::string>(j, "case", m.case_column);
    m.activity_column = detail::get_or<std::string>(j, "activity", m.activity_column);
    m.timestamp_column = detail::get_or<std::string>(j, "timestamp", m.timestamp_column);
    m.resource_column = detail::get_or<std::string>(j, "resource", m.resource_column);
    m.id_column = detail::get_or<std::string>(j, "id", m.id_column);
    auto delim = detail::get_or<std::string>(j, "delimiter", ",");
    if (delim.size() != 1) throw ConfigError("csv delimiter must be a single character");
    m.delimiter = delim[0];
    return m;
}

/// Pipeline configuration plus the CSV column mapping for the input log.
struct ToolkitConfig {
    PipelineConfig pipeline;
    CsvMapping csv;
};

inline ToolkitConfig toolkit_config_from_json(const json& j) {
    detail::require_keys(j, {"span_length", "tau", "alpha_pos", "alpha_neg", "aggregation", "scorer", "measures", "raw_scores", "csv"},
                         "config");
    ToolkitConfig out;
    auto& p = out.pipeline;
    if (j.contains("span_length")) p.span_length = detail::span_length_from_json(j.at("span_length"));
    p.tau = detail::get_or<double>(j, "tau", p.tau);
    p.alphas.positive = detail::get_or<double>(j, "alpha_pos", 0.0);
    p.alphas.negative = detail::get_or<double>(j, "alpha_neg", 0.0);
    auto aggregation = detail::get_or<std::string>(j, "aggregation", "max");
    if (aggregation == "max") p.aggregation = TraceAggregation::max;
    else if (aggregation == "mean") p.aggregation = TraceAggregation::mean;
    else throw ConfigError("aggregation must be 'max' or 'mean'");
    if (j.contains("scorer")) p.scorer = scorer_from_json(j.at("scorer"));
    if (j.contains("measures")) {
        if (!j.at("measures").is_array()) throw ConfigError("measures must be an array");
        for (const auto& m : j.at("measures")) p.measures.push_back(measure_from_json(m));
    }
    if (j.contains("raw_scores")) {
        CaseScores scores;
        for (const auto& [k, v] : j.at("raw_scores").items()) {
            if (!v.is_number()) throw ConfigError("raw score for '" + k + "' is not a number");
            scores[k] = v.get<double>();
        }
        p.raw_scores = std::move(scores);
    }
    if (j.contains("csv")) out.csv = csv_mapping_from_json(j.at("csv"));
    p.validate();
    return out;
}

inline json to_json_value(const PipelineConfig& p) {
    json measures = json::array();
    for (const auto& m : p.measures) measures.push_back(to_json_value(m));
    json j{{"span_length", p.span_length},
           {"tau", p.tau},
           {"alpha_pos", p.alphas.positive},
           {"alpha_neg", p.alphas.negative},
           {"aggregation", p.aggregation == TraceAggregation::max ? "max" : "mean"},
           {"scorer", to_json_value(p.scorer)},
           {"measures", measures}};
    if (p.raw_scores) j["raw_scores"] = *p.raw_scores;
    return j;
}

inline json to_json_value(const ContextAwareResult& r) {
    return json{{"case", r.case_id},         {"raw_score", r.raw_score}, {"pc", r.pc},
                {"nc", r.nc},                {"revised_score", r.revised_score},
                {"alpha_pos", r.alpha_pos},  {"alpha_neg", r.alpha_neg}, {"tau", r.tau},
                {"label", to_string(r.label)}};
}

inline ContextAwareResult result_from_json(const json& j) {
    ContextAwareResult r;
    r.case_id = j.at("case").get<std::string>();
    r.raw_score = j.at("raw_score").get<double>();
    r.pc = j.at("pc").get<double>();
    r.nc = j.at("nc").get<double>();
    r.revised_score = j.at("revised_score").get<double>();
    r.alpha_pos = j.at("alpha_pos").get<double>();
    r.alpha_neg = j.at("alpha_neg").get<double>();
    r.tau = j.at("tau").get<double>();
    r.label = aware_label_from_string(j.at("label").get<std::string>());
    return r;
}

/// One JSON object per line.
inline void write_results_jsonl(std::ostream& out, std::span<const ContextAwareResult> results) {
    for (const auto& r : results) out << to_json_value(r).dump() << '\n';
}

inline json to_json_value(const ConfusionMatrix& m) {
    json rows = json::array();
    for (const auto& row : m) rows.push_back(json(row));
    return rows;
}

inline json to_json_value(const MetricsReport& r) {
    return json{{"total", r.total},
                {"accuracy", r.accuracy},
                {"avg_class_accuracy", r.avg_class_accuracy},
                {"precision", r.precision},
                {"recall", r.recall},
                {"confusion", to_json_value(r.confusion)}};
}

inline json to_json_value(const Context& ctx) {
    json windows = json::array();
    for (std::size_t k = 0; k < ctx.span().size(); ++k) {
        windows.push_back(json{{"start", format_timestamp(ctx.span()[k].start)},
                               {"end", format_timestamp(ctx.span()[k].end)},
                               {"pc", ctx[k].pc},
                               {"nc", ctx[k].nc}});
    }
    return json{{"t_min", format_timestamp(ctx.span().t_min())},
                {"t_max", format_timestamp(ctx.span().t_max())},
                {"length_seconds", ctx.span().length_seconds()},
                {"windows", windows}};
}

inline Context context_from_json(const json& j) {
    auto t_min = parse_timestamp(j.at("t_min").get<std::string>());
    auto t_max = parse_timestamp(j.at("t_max").get<std::string>());
    if (!t_min || !t_max) throw ParseError("invalid timestamps in stored context");
    TimeSpan span(*t_min, *t_max, j.at("length_seconds").get<double>());
    std::vector<ContextScore> scores;
    for (const auto& w : j.at("windows")) scores.push_back(ContextScore{w.at("pc").get<double>(), w.at("nc").get<double>()});
    return Context(std::move(span), std::move(scores));
}

inline json to_json_value(const std::vector<CalendarCell>& cells) {
    json out = json::array();
    for (const auto& c : cells)
        out.push_back(json{{"bucket_start", format_timestamp(c.bucket_start)}, {"pc", c.mean.pc}, {"nc", c.mean.nc}, {"windows", c.windows}});
    return out;
}

} // namespace ctxdev
