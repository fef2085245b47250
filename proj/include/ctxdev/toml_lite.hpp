#pragma once

#include "ctxdev/errors.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ctxdev {

// Reader for the TOML subset used by configuration files:
//   # comments, key = value, [table], [a.b] dotted tables, [[array.of.tables]],
//   basic "strings", integers, floats, true/false and (nested) arrays.
// The result is a JSON object so the rest of the code reads one format.

namespace detail {

class TomlLiteParser {
public:
    explicit TomlLiteParser(std::string_view text) : text_(text) {}

    nlohmann::json parse() {
        nlohmann::json root = nlohmann::json::object();
        nlohmann::json* table = &root;
        while (skip_blank_lines(), pos_ < text_.size()) {
            if (peek() == '[') {
                bool array = text_.substr(pos_, 2) == "[[";
                pos_ += array ? 2 : 1;
                auto path = parse_key_path();
                skip_inline_space();
                if (!consume(']') || (array && !consume(']'))) fail("expected ']'");
                table = open_table(root, path, array);
            } else {
                auto path = parse_key_path();
                skip_inline_space();
                if (!consume('=')) fail("expected '='");
                skip_inline_space();
                nlohmann::json* target = table;
                for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                    auto& next = (*target)[path[i]];
                    if (next.is_null()) next = nlohmann::json::object();
                    target = &next;
                }
                if (target->contains(path.back())) fail("duplicate key '" + path.back() + "'");
                (*target)[path.back()] = parse_value();
            }
            end_of_line();
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw ConfigError("config line " + std::to_string(line_) + ": " + message); }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool consume(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    void skip_inline_space() {
        while (peek() == ' ' || peek() == '\t' || peek() == '\r') ++pos_;
    }

    void skip_comment() {
        if (peek() == '#')
            while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }

    void skip_blank_lines() {
        for (;;) {
            skip_inline_space();
            skip_comment();
            if (peek() != '\n') return;
            ++pos_;
            ++line_;
        }
    }

    /// Skips whitespace, comments and newlines inside arrays.
    void skip_array_space() {
        for (;;) {
            skip_inline_space();
            skip_comment();
            if (peek() != '\n') return;
            ++pos_;
            ++line_;
        }
    }

    void end_of_line() {
        skip_inline_space();
        skip_comment();
        if (pos_ < text_.size() && !consume('\n')) fail("unexpected trailing characters");
        ++line_;
    }

    std::string parse_key() {
        skip_inline_space();
        if (peek() == '"') return parse_string();
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '-'))
            ++pos_;
        if (pos_ == start) fail("expected a key");
        return std::string(text_.substr(start, pos_ - start));
    }

    std::vector<std::string> parse_key_path() {
        std::vector<std::string> path{parse_key()};
        for (;;) {
            skip_inline_space();
            if (!consume('.')) return path;
            path.push_back(parse_key());
        }
    }

    nlohmann::json* open_table(nlohmann::json& root, const std::vector<std::string>& path, bool array) {
        nlohmann::json* node = &root;
        for (std::size_t i = 0; i < path.size(); ++i) {
            auto& child = (*node)[path[i]];
            bool last = i + 1 == path.size();
            if (last && array) {
                if (child.is_null()) child = nlohmann::json::array();
                if (!child.is_array()) fail("'" + path[i] + "' is not an array of tables");
                child.push_back(nlohmann::json::object());
                return &child.back();
            }
            if (child.is_null()) child = nlohmann::json::object();
            node = child.is_array() ? &child.back() : &child;
            if (!node->is_object()) fail("'" + path[i] + "' is not a table");
        }
        return node;
    }

    std::string parse_string() {
        if (!consume('"')) fail("expected '\"'");
        std::string out;
        for (;;) {
            if (pos_ >= text_.size() || peek() == '\n') fail("unterminated string");
            char c = text_[pos_++];
            if (c == '"') return out;
            if (c == '\\') {
                char esc = text_[pos_++];
                switch (esc) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                default: fail(std::string("unsupported escape \\") + esc);
                }
            } else {
                out.push_back(c);
            }
        }
    }

    nlohmann::json parse_value() {
        char c = peek();
        if (c == '"') return parse_string();
        if (c == '[') {
            ++pos_;
            nlohmann::json arr = nlohmann::json::array();
            for (;;) {
                skip_array_space();
                if (consume(']')) return arr;
                arr.push_back(parse_value());
                skip_array_space();
                if (consume(']')) return arr;
                if (!consume(',')) fail("expected ',' or ']' in array");
            }
        }
        if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            return true;
        }
        if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            return false;
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || std::string_view("+-.eE_").find(text_[pos_]) != std::string_view::npos))
            ++pos_;
        std::string number;
        for (char ch : text_.substr(start, pos_ - start))
            if (ch != '_') number.push_back(ch);
        if (number.empty()) fail("expected a value");
        try {
            std::size_t used = 0;
            if (number.find_first_of(".eE") == std::string::npos) {
                long long v = std::stoll(number, &used);
                if (used == number.size()) return v;
            } else {
                double v = std::stod(number, &used);
                if (used == number.size()) return v;
            }
        } catch (const std::exception&) {
        }
        fail("invalid number '" + number + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

} // namespace detail

inline nlohmann::json parse_toml_lite(std::string_view text) { return detail::TomlLiteParser(text).parse(); }

/// Reads a config file: JSON when the first non-blank character is '{',
/// the TOML subset otherwise.
inline nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            return nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& err) {
            throw ConfigError(std::string("invalid JSON config: ") + err.what());
        }
    }
    return parse_toml_lite(text);
}

} // namespace ctxdev
