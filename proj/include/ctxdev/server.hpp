#pragma once

#include "ctxdev/context.hpp"
#include "ctxdev/errors.hpp"
#include "ctxdev/io_csv.hpp"
#include "ctxdev/io.hpp"
#include "ctxdev/io_xes.hpp"
#include "ctxdev/kmedoids.hpp"
#include "ctxdev/postprocess.hpp"
#include "ctxdev/serialization.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ctxdev {

/// A computed analysis. Never modified after creation.
struct AnalysisSession {
    std::string id;
    std::string log_ref;
    std::string created_at;
    json config;
    double tau = 0.5;
    Degrees alphas{};
    std::vector<ContextAwareResult> results;
    Context context;
};

inline json to_json_value(const AnalysisSession& s) {
    json results = json::array();
    for (const auto& r : s.results) results.push_back(to_json_value(r));
    return json{{"id", s.id},           {"log_ref", s.log_ref}, {"created_at", s.created_at}, {"config", s.config},
                {"tau", s.tau},         {"alpha_pos", s.alphas.positive}, {"alpha_neg", s.alphas.negative},
                {"context", to_json_value(s.context)}, {"results", results}};
}

inline AnalysisSession session_from_json(const json& j) {
    AnalysisSession s;
    s.id = j.at("id").get<std::string>();
    s.log_ref = j.at("log_ref").get<std::string>();
    s.created_at = j.at("created_at").get<std::string>();
    s.config = j.at("config");
    s.tau = j.at("tau").get<double>();
    s.alphas = Degrees{j.at("alpha_pos").get<double>(), j.at("alpha_neg").get<double>()};
    for (const auto& r : j.at("results")) s.results.push_back(result_from_json(r));
    s.context = context_from_json(j.at("context"));
    return s;
}

enum class ResultSort { revised_score, raw_score, proximity };

struct ResultQuery {
    ResultSort sort = ResultSort::revised_score;
    bool descending = true;
    std::size_t page = 1; ///< 1-based
    std::size_t page_size = 50;
    std::optional<double> alpha_pos;
    std::optional<double> alpha_neg;
};

/// Orders results for display. Score sorts follow `descending`; proximity
/// is |revised - tau| at 1e-12 resolution and `descending` reverses it.
/// Ties break on case id.
inline void sort_results(std::vector<ContextAwareResult>& rows, ResultSort sort, bool descending) {
    auto key = [&](const ContextAwareResult& r) {
        switch (sort) {
        case ResultSort::raw_score: return r.raw_score;
        case ResultSort::proximity: return std::round(std::abs(r.revised_score - r.tau) * 1e12) / 1e12;
        case ResultSort::revised_score: break;
        }
        return r.revised_score;
    };
    std::stable_sort(rows.begin(), rows.end(), [&](const ContextAwareResult& a, const ContextAwareResult& b) {
        double ka = key(a), kb = key(b);
        if (ka != kb) return descending ? ka > kb : ka < kb;
        return a.case_id < b.case_id;
    });
}

inline json query_results(const AnalysisSession& s, const ResultQuery& q) {
    if (q.page < 1) throw ParameterError("page starts at 1");
    if (q.page_size < 1 || q.page_size > 10000) throw ParameterError("page_size must lie in [1, 10000]");
    Degrees alphas{q.alpha_pos.value_or(s.alphas.positive), q.alpha_neg.value_or(s.alphas.negative)};
    std::vector<ContextAwareResult> rows = (q.alpha_pos || q.alpha_neg) ? revise(s.results, alphas, s.tau) : s.results;
    sort_results(rows, q.sort, q.descending);
    const std::size_t total = rows.size();
    const std::size_t begin = std::min(total, (q.page - 1) * q.page_size);
    const std::size_t end = std::min(total, begin + q.page_size);
    json page = json::array();
    for (std::size_t i = begin; i < end; ++i) page.push_back(to_json_value(rows[i]));
    static constexpr const char* sort_names[] = {"revised_score", "raw_score", "proximity"};
    return json{{"session", s.id},
                {"total", total},
                {"page", q.page},
                {"page_size", q.page_size},
                {"pages", (total + q.page_size - 1) / q.page_size},
                {"sort", sort_names[static_cast<int>(q.sort)]},
                {"order", q.descending ? "desc" : "asc"},
                {"tau", s.tau},
                {"alpha_pos", alphas.positive},
                {"alpha_neg", alphas.negative},
                {"results", page}};
}

/// k-medoids over traces with raw score > tau in (raw_score, pc, nc) space.
/// Without an explicit k, 4 is used, lowered to the number of such traces.
inline json scatter_payload(const AnalysisSession& s, std::optional<std::size_t> k) {
    std::vector<ScatterPoint> points;
    for (const auto& r : s.results)
        if (detect(r.raw_score, s.tau) == BinaryLabel::deviating) points.push_back(ScatterPoint{r.case_id, {r.raw_score, r.pc, r.nc}});
    json out{{"session", s.id}, {"tau", s.tau}, {"points", json::array()}, {"medoids", json::array()}};
    if (points.empty()) {
        if (k && *k != 0) throw ParameterError("k exceeds the number of deviating traces (0)");
        out["k"] = 0;
        return out;
    }
    std::size_t clusters = k.value_or(std::min<std::size_t>(4, points.size()));
    if (clusters < 1 || clusters > points.size())
        throw ParameterError("k must lie in [1, " + std::to_string(points.size()) + "]");
    auto c = k_medoids(points, clusters);
    out["k"] = clusters;
    for (std::size_t i = 0; i < points.size(); ++i)
        out["points"].push_back(json{{"case", points[i].case_id},
                                     {"raw_score", points[i].coords[0]},
                                     {"pc", points[i].coords[1]},
                                     {"nc", points[i].coords[2]},
                                     {"cluster", c.assignment[i]}});
    for (std::size_t m = 0; m < clusters; ++m)
        out["medoids"].push_back(json{{"cluster", m}, {"case", points[c.medoids[m]].case_id}, {"size", c.sizes[m]}});
    return out;
}

inline CalendarBucket calendar_bucket_from_string(std::string_view s) {
    if (s == "day") return CalendarBucket::day;
    if (s == "week") return CalendarBucket::week;
    throw ParameterError("bucket must be 'day' or 'week'");
}

inline json calendar_payload(const AnalysisSession& s, CalendarBucket bucket) {
    return json{{"session", s.id}, {"bucket", bucket == CalendarBucket::day ? "day" : "week"},
                {"cells", to_json_value(calendar_aggregate(s.context, bucket))}};
}

/// Sessions kept in memory and mirrored as <id>.json in the data
/// directory. Concurrent creates with the same log and config share one
/// pipeline run.
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path data_dir) : dir_(std::move(data_dir)) { std::filesystem::create_directories(dir_); }

    const std::filesystem::path& data_dir() const { return dir_; }

    std::shared_ptr<const AnalysisSession> create(const EventLog& log, const json& config_json, std::string log_ref) {
        auto config = toolkit_config_from_json(config_json).pipeline;
        std::string key = serialize_csv(log) + '\x1f' + config_json.dump();

        std::shared_future<std::shared_ptr<const PipelineOutput>> future;
        std::promise<std::shared_ptr<const PipelineOutput>> promise;
        bool owner = false;
        {
            std::lock_guard lock(inflight_mutex_);
            auto it = inflight_.find(key);
            if (it == inflight_.end()) {
                future = promise.get_future().share();
                inflight_.emplace(key, future);
                owner = true;
            } else {
                future = it->second;
            }
        }
        if (owner) {
            try {
                promise.set_value(std::make_shared<const PipelineOutput>(run_pipeline(log, config)));
            } catch (...) {
                promise.set_exception(std::current_exception());
            }
            std::lock_guard lock(inflight_mutex_);
            inflight_.erase(key);
        }
        auto output = future.get();

        auto session = std::make_shared<AnalysisSession>();
        session->id = new_id();
        session->log_ref = std::move(log_ref);
        session->created_at = format_iso8601(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
        session->config = to_json_value(config);
        session->tau = config.tau;
        session->alphas = config.alphas;
        session->results = output->results;
        session->context = output->context;
        persist(*session);
        std::unique_lock lock(sessions_mutex_);
        sessions_[session->id] = session;
        return session;
    }

    std::shared_ptr<const AnalysisSession> get(const std::string& id) {
        {
            std::shared_lock lock(sessions_mutex_);
            auto it = sessions_.find(id);
            if (it != sessions_.end()) return it->second;
        }
        if (!valid_id(id)) throw NotFoundError("no session '" + id + "'");
        auto path = dir_ / (id + ".json");
        std::ifstream in(path, std::ios::binary);
        if (!in) throw NotFoundError("no session '" + id + "'");
        std::shared_ptr<const AnalysisSession> loaded;
        try {
            loaded = std::make_shared<const AnalysisSession>(session_from_json(json::parse(in)));
        } catch (const json::exception& e) {
            throw IntegrityError("stored session '" + id + "' is corrupt: " + e.what());
        }
        std::unique_lock lock(sessions_mutex_);
        return sessions_.try_emplace(id, loaded).first->second;
    }

    static bool valid_id(std::string_view id) {
        return !id.empty() && id.size() <= 64 &&
               std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'; });
    }

private:
    std::string new_id() {
        std::lock_guard lock(id_mutex_);
        char buf[33];
        std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng_()), static_cast<unsigned long long>(rng_()));
        return buf;
    }

    void persist(const AnalysisSession& s) const {
        auto final_path = dir_ / (s.id + ".json");
        auto tmp = final_path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            out << to_json_value(s).dump() << '\n';
            if (!out) throw IntegrityError("cannot write session file " + tmp.string());
        }
        std::filesystem::rename(tmp, final_path);
    }

    std::filesystem::path dir_;
    std::shared_mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<const AnalysisSession>> sessions_;
    std::mutex inflight_mutex_;
    std::map<std::string, std::shared_future<std::shared_ptr<const PipelineOutput>>> inflight_;
    std::mutex id_mutex_;
    std::mt19937_64 rng_{std::random_device{}()};
};

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir = "ctxdev-data";
    std::size_t upload_limit = 64u << 20;
    std::optional<std::filesystem::path> static_dir;

    /// CTXDEV_ADDR (host:port), CTXDEV_DATA_DIR, CTXDEV_UPLOAD_LIMIT (bytes).
    static ServerOptions from_environment() {
        ServerOptions o;
        if (const char* addr = std::getenv("CTXDEV_ADDR")) o.set_address(addr);
        if (const char* dir = std::getenv("CTXDEV_DATA_DIR")) o.data_dir = dir;
        if (const char* limit = std::getenv("CTXDEV_UPLOAD_LIMIT")) {
            std::string_view v(limit);
            std::size_t n = 0;
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
            if (ec != std::errc{} || p != v.data() + v.size() || n == 0) throw ConfigError("CTXDEV_UPLOAD_LIMIT must be a positive byte count");
            o.upload_limit = n;
        }
        return o;
    }

    void set_address(std::string_view addr) {
        auto colon = addr.rfind(':');
        if (colon == std::string_view::npos) throw ConfigError("address must be host:port");
        int p = 0;
        auto digits = addr.substr(colon + 1);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || p < 0 || p > 65535) throw ConfigError("invalid port in address");
        host = std::string(addr.substr(0, colon));
        if (host.empty()) host = "0.0.0.0";
        port = p;
    }
};

namespace detail {

inline int http_status_for(const Error& e) {
    std::string_view c = e.code();
    if (c == "not_found") return 404;
    if (c == "bad_request") return 400;
    return 422;
}

inline void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
    res.status = status;
    res.set_content(json{{"error", {{"code", code}, {"message", message}}}}.dump(), "application/json");
}

inline void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

class BadRequest : public Error {
public:
    explicit BadRequest(const std::string& m) : Error("bad_request", m) {}
};

inline std::optional<double> query_real(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) return std::nullopt;
    auto text = req.get_param_value(key);
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0' || !std::isfinite(v)) throw BadRequest(std::string("query parameter '") + key + "' is not a number");
    return v;
}

inline std::optional<std::size_t> query_count(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) return std::nullopt;
    auto text = req.get_param_value(key);
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || p != text.data() + text.size())
        throw BadRequest(std::string("query parameter '") + key + "' is not a non-negative integer");
    return v;
}

inline ResultQuery result_query_from(const httplib::Request& req) {
    ResultQuery q;
    if (req.has_param("sort")) {
        auto s = req.get_param_value("sort");
        if (s == "revised_score") q.sort = ResultSort::revised_score;
        else if (s == "raw_score") q.sort = ResultSort::raw_score;
        else if (s == "proximity") q.sort = ResultSort::proximity;
        else throw BadRequest("sort must be revised_score, raw_score or proximity");
    }
    q.descending = q.sort != ResultSort::proximity;
    if (req.has_param("order")) {
        auto o = req.get_param_value("order");
        if (o != "asc" && o != "desc") throw BadRequest("order must be asc or desc");
        q.descending = o == "desc";
    }
    q.page = query_count(req, "page").value_or(q.page);
    q.page_size = query_count(req, "page_size").value_or(q.page_size);
    q.alpha_pos = query_real(req, "alpha_pos");
    q.alpha_neg = query_real(req, "alpha_neg");
    for (auto a : {q.alpha_pos, q.alpha_neg})
        if (a && (*a < 0 || *a > 1)) throw ParameterError("alpha query parameters must lie in [0,1]");
    return q;
}

inline json parse_json_body(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        throw BadRequest(std::string(what) + " is not valid JSON");
    }
}

inline EventLog log_from_upload(const httplib::MultipartFormData& file, const CsvMapping& mapping) {
    std::istringstream in(file.content);
    auto name = file.filename;
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (name.ends_with(".xes") || file.content_type == "application/xml" || file.content_type == "text/xml") return read_xes(in);
    return read_csv(in, mapping);
}

} // namespace detail

/// Registers the /api/v1 routes on `server`.
inline void install_routes(httplib::Server& server, SessionStore& store, std::size_t upload_limit) {
    using httplib::Request;
    using httplib::Response;

    auto guarded = [](auto handler) {
        return [handler](const Request& req, Response& res) {
            try {
                handler(req, res);
            } catch (const Error& e) {
                detail::send_error(res, detail::http_status_for(e), e.code(), e.what());
            } catch (const std::exception& e) {
                detail::send_error(res, 500, "internal_error", e.what());
            }
        };
    };

    server.set_payload_max_length(upload_limit);
    server.set_pre_routing_handler([upload_limit](const Request& req, Response& res) {
        if (req.has_header("Content-Length")) {
            auto text = req.get_header_value("Content-Length");
            std::size_t n = 0;
            auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
            if (ec == std::errc{} && n > upload_limit) {
                detail::send_error(res, 413, "payload_too_large", "request body exceeds " + std::to_string(upload_limit) + " bytes");
                return httplib::Server::HandlerResponse::Handled;
            }
        }
        return httplib::Server::HandlerResponse::Unhandled;
    });
    server.set_error_handler([](const Request&, Response& res) {
        if (!res.body.empty()) return;
        if (res.status == 413) detail::send_error(res, 413, "payload_too_large", "request body too large");
        else if (res.status == 404) detail::send_error(res, 404, "not_found", "no such route");
        else detail::send_error(res, res.status, "http_error", httplib::status_message(res.status));
    });

    server.Post("/api/v1/sessions", guarded([&store](const Request& req, Response& res) {
        json config = json::object();
        std::shared_ptr<const AnalysisSession> session;
        if (req.is_multipart_form_data()) {
            if (!req.has_file("log")) throw detail::BadRequest("multipart body needs a 'log' part");
            if (req.has_file("config")) config = detail::parse_json_body(req.get_file_value("config").content, "config part");
            auto mapping = config.contains("csv") ? csv_mapping_from_json(config.at("csv")) : CsvMapping{};
            auto upload = req.get_file_value("log");
            auto log = detail::log_from_upload(upload, mapping);
            session = store.create(log, config, "upload:" + (upload.filename.empty() ? std::string("log") : upload.filename));
        } else {
            auto body = detail::parse_json_body(req.body, "request body");
            if (!body.is_object() || !body.contains("log_path") || !body.at("log_path").is_string())
                throw detail::BadRequest("JSON body needs a string 'log_path'");
            if (body.contains("config")) config = body.at("config");
            auto mapping = config.contains("csv") ? csv_mapping_from_json(config.at("csv")) : CsvMapping{};
            auto path = body.at("log_path").get<std::string>();
            if (!std::filesystem::exists(path)) throw NotFoundError("log file '" + path + "' does not exist");
            session = store.create(load_log(path, mapping), config, path);
        }
        detail::send_json(res, json{{"id", session->id}}, 201);
    }));

    const std::string id_pattern = "/api/v1/sessions/([A-Za-z0-9_-]+)";
    server.Get(id_pattern, guarded([&store](const Request& req, Response& res) {
        auto s = store.get(req.matches[1]);
        detail::send_json(res, json{{"id", s->id}, {"log_ref", s->log_ref}, {"created_at", s->created_at}, {"config", s->config},
                                    {"traces", s->results.size()}});
    }));
    server.Get(id_pattern + "/results", guarded([&store](const Request& req, Response& res) {
        auto q = detail::result_query_from(req);
        detail::send_json(res, query_results(*store.get(req.matches[1]), q));
    }));
    server.Get(id_pattern + "/scatter", guarded([&store](const Request& req, Response& res) {
        auto k = detail::query_count(req, "k");
        detail::send_json(res, scatter_payload(*store.get(req.matches[1]), k));
    }));
    server.Get(id_pattern + "/calendar", guarded([&store](const Request& req, Response& res) {
        auto bucket = calendar_bucket_from_string(req.has_param("bucket") ? req.get_param_value("bucket") : "day");
        detail::send_json(res, calendar_payload(*store.get(req.matches[1]), bucket));
    }));
}

} // namespace ctxdev
