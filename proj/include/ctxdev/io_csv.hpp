#pragma once

#include "ctxdev/errors.hpp"
#include "ctxdev/event_log.hpp"
#include "ctxdev/time.hpp"

#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

namespace ctxdev {

/// Header names of the columns read into the event model. Columns not named
/// here are carried into `Event::extra`.
struct CsvMapping {
    std::string case_column = "case";
    std::string activity_column = "activity";
    std::string timestamp_column = "timestamp";
    std::string resource_column = "resource";
    std::string id_column = "id"; ///< optional; ids default to "e<row>"
    char delimiter = ',';
};

namespace detail {

/// Splits one record, honouring double-quoted fields and "" escapes.
/// Returns false when a quoted field is still open at end of input.
inline bool split_csv_record(std::istream& in, char delimiter, std::vector<std::string>& fields, std::size_t& line_no) {
    fields.clear();
    std::string line;
    if (!std::getline(in, line)) return false;
    ++line_no;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0;; ++i) {
        if (i == line.size()) {
            if (quoted) {
                std::string next;
                if (!std::getline(in, next)) throw ParseError("unterminated quoted field", line_no);
                ++line_no;
                field.push_back('\n');
                line = std::move(next);
                i = static_cast<std::size_t>(-1);
                continue;
            }
            break;
        }
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r' || i + 1 != line.size()) {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return true;
}

inline std::string quote_csv(const std::string& value, char delimiter) {
    if (value.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string::npos) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace detail

inline EventLog read_csv(std::istream& in, const CsvMapping& mapping = {}) {
    std::vector<std::string> header;
    std::size_t line_no = 0;
    if (!detail::split_csv_record(in, mapping.delimiter, header, line_no))
        throw SchemaError("CSV input has no header row");
    if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

    auto find = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    };
    auto require = [&](const std::string& name) {
        auto idx = find(name);
        if (!idx) throw SchemaError("missing required column '" + name + "'");
        return *idx;
    };
    const std::size_t case_idx = require(mapping.case_column);
    const std::size_t activity_idx = require(mapping.activity_column);
    const std::size_t time_idx = require(mapping.timestamp_column);
    const auto resource_idx = find(mapping.resource_column);
    const auto id_idx = find(mapping.id_column);

    std::vector<Event> events;
    std::unordered_set<std::string> ids;
    std::vector<std::string> row;
    std::size_t record = 0;
    while (detail::split_csv_record(in, mapping.delimiter, row, line_no)) {
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(row.size()),
                             line_no);
        Event e;
        e.case_id = row[case_idx];
        e.activity = row[activity_idx];
        if (e.case_id.empty()) throw ParseError("empty case identifier", line_no);
        if (e.activity.empty()) throw ParseError("empty activity", line_no);
        auto ts = parse_timestamp(row[time_idx]);
        if (!ts) throw ParseError("unparseable timestamp '" + row[time_idx] + "'", line_no);
        e.timestamp = *ts;
        if (resource_idx && !row[*resource_idx].empty()) e.resource = row[*resource_idx];
        if (id_idx && !row[*id_idx].empty()) {
            e.id = row[*id_idx];
        } else {
            e.id = "e" + std::to_string(record + 1);
        }
        if (!ids.insert(e.id).second) throw IntegrityError("duplicate event id '" + e.id + "' at line " + std::to_string(line_no));
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i == case_idx || i == activity_idx || i == time_idx || i == resource_idx || i == id_idx) continue;
            if (!row[i].empty()) e.extra.emplace(header[i], row[i]);
        }
        events.push_back(std::move(e));
        ++record;
    }
    return EventLog::from_events(std::move(events));
}

inline EventLog parse_csv(const std::string& path, const CsvMapping& mapping = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_csv(in, mapping);
}

/// Writes one row per event, traces in log order. Extra attributes become
/// additional columns (union over the log, sorted by name).
inline void write_csv(std::ostream& out, const EventLog& log, const CsvMapping& mapping = {}) {
    std::map<std::string, bool> extra_columns;
    log.for_each_event([&](const Event& e) {
        for (const auto& [k, v] : e.extra) extra_columns.emplace(k, true);
    });
    const char d = mapping.delimiter;
    out << mapping.id_column << d << mapping.case_column << d << mapping.activity_column << d
        << mapping.timestamp_column << d << mapping.resource_column;
    for (const auto& [name, unused] : extra_columns) out << d << detail::quote_csv(name, d);
    out << '\n';
    log.for_each_event([&](const Event& e) {
        out << detail::quote_csv(e.id, d) << d << detail::quote_csv(e.case_id, d) << d << detail::quote_csv(e.activity, d)
            << d << format_timestamp(e.timestamp) << d << detail::quote_csv(e.resource.value_or(""), d);
        for (const auto& [name, unused] : extra_columns) {
            auto it = e.extra.find(name);
            out << d << (it == e.extra.end() ? std::string{} : detail::quote_csv(it->second, d));
        }
        out << '\n';
    });
}

inline std::string serialize_csv(const EventLog& log, const CsvMapping& mapping = {}) {
    std::ostringstream out;
    write_csv(out, log, mapping);
    return out.str();
}

} // namespace ctxdev
