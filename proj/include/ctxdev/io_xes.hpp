#pragma once

#include "ctxdev/errors.hpp"
#include "ctxdev/event_log.hpp"
#include "ctxdev/time.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

namespace ctxdev {

// XES subset: <log><trace>...<event>...</event></trace></log> with typed
// attribute elements (<string>, <date>, <int>, ...) carrying key/value.
// concept:name on a trace is the case id, on an event the activity.

namespace detail {

namespace pt = boost::property_tree;

inline bool is_attribute_element(const std::string& tag) {
    return tag == "string" || tag == "date" || tag == "int" || tag == "float" || tag == "boolean" || tag == "id";
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

} // namespace detail

inline EventLog read_xes(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree doc;
    try {
        pt::read_xml(in, doc);
    } catch (const pt::xml_parser_error& err) {
        throw ParseError("malformed XML: " + err.message(), err.line());
    }
    auto root = doc.get_child_optional("log");
    if (!root) throw SchemaError("XES document has no <log> element");

    std::vector<Event> events;
    std::unordered_set<std::string> ids;
    std::size_t trace_no = 0, record = 0;
    for (const auto& [tag, trace_node] : *root) {
        if (tag != "trace") continue;
        ++trace_no;
        std::string case_id;
        for (const auto& [attr_tag, attr] : trace_node)
            if (detail::is_attribute_element(attr_tag) && attr.get<std::string>("<xmlattr>.key", "") == "concept:name")
                case_id = attr.get<std::string>("<xmlattr>.value", "");
        if (case_id.empty()) throw SchemaError("trace " + std::to_string(trace_no) + " lacks concept:name");

        std::size_t event_no = 0;
        for (const auto& [ev_tag, ev_node] : trace_node) {
            if (ev_tag != "event") continue;
            ++event_no;
            Event e;
            e.case_id = case_id;
            bool has_time = false;
            for (const auto& [attr_tag, attr] : ev_node) {
                if (!detail::is_attribute_element(attr_tag)) continue;
                auto key = attr.get<std::string>("<xmlattr>.key", "");
                auto value = attr.get<std::string>("<xmlattr>.value", "");
                if (key == "concept:name") {
                    e.activity = value;
                } else if (key == "time:timestamp") {
                    auto ts = parse_timestamp(value);
                    if (!ts)
                        throw ParseError("trace '" + case_id + "' event " + std::to_string(event_no) +
                                         ": unparseable time:timestamp '" + value + "'");
                    e.timestamp = *ts;
                    has_time = true;
                } else if (key == "org:resource") {
                    if (!value.empty()) e.resource = value;
                } else if (key == "identity:id") {
                    e.id = value;
                } else if (!key.empty()) {
                    e.extra.emplace(key, value);
                }
            }
            if (e.activity.empty())
                throw ParseError("trace '" + case_id + "' event " + std::to_string(event_no) + " lacks concept:name");
            if (!has_time)
                throw ParseError("trace '" + case_id + "' event " + std::to_string(event_no) + " lacks time:timestamp");
            if (e.id.empty()) e.id = "e" + std::to_string(record + 1);
            if (!ids.insert(e.id).second) throw IntegrityError("duplicate event id '" + e.id + "'");
            events.push_back(std::move(e));
            ++record;
        }
    }
    return EventLog::from_events(std::move(events));
}

inline EventLog parse_xes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_xes(in);
}

inline void write_xes(std::ostream& out, const EventLog& log) {
    using detail::xml_escape;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<log xes.version=\"1.0\">\n";
    for (const auto& trace : log.traces()) {
        out << "  <trace>\n    <string key=\"concept:name\" value=\"" << xml_escape(trace.case_id) << "\"/>\n";
        for (const auto& e : trace.events) {
            out << "    <event>\n";
            out << "      <string key=\"identity:id\" value=\"" << xml_escape(e.id) << "\"/>\n";
            out << "      <string key=\"concept:name\" value=\"" << xml_escape(e.activity) << "\"/>\n";
            out << "      <date key=\"time:timestamp\" value=\"" << format_iso8601(e.timestamp) << "\"/>\n";
            if (e.resource) out << "      <string key=\"org:resource\" value=\"" << xml_escape(*e.resource) << "\"/>\n";
            for (const auto& [k, v] : e.extra)
                out << "      <string key=\"" << xml_escape(k) << "\" value=\"" << xml_escape(v) << "\"/>\n";
            out << "    </event>\n";
        }
        out << "  </trace>\n";
    }
    out << "</log>\n";
}

inline std::string serialize_xes(const EventLog& log) {
    std::ostringstream out;
    write_xes(out, log);
    return out.str();
}

} // namespace ctxdev
