#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace ctxdev {

/// Naive (zone-less) instant at second precision.
using Timestamp = std::chrono::sys_seconds;

inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::int64_t kSecondsPerWeek = 7 * kSecondsPerDay;

inline std::int64_t to_epoch(Timestamp t) { return t.time_since_epoch().count(); }
inline Timestamp from_epoch(std::int64_t s) { return Timestamp{std::chrono::seconds{s}}; }

namespace detail {

inline bool read_digits(std::string_view text, std::size_t& pos, std::size_t count, int& out) {
    if (pos + count > text.size()) return false;
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
        char c = text[pos + i];
        if (c < '0' || c > '9') return false;
        value = value * 10 + (c - '0');
    }
    out = value;
    pos += count;
    return true;
}

inline bool expect(std::string_view text, std::size_t& pos, char c) {
    if (pos < text.size() && text[pos] == c) {
        ++pos;
        return true;
    }
    return false;
}

} // namespace detail

/// Accepts `YYYY-MM-DD`, `YYYY-MM-DD HH:MM[:SS]` and ISO-8601 with a `T`
/// separator, optional fractional seconds (truncated) and an optional
/// `Z` / `+HH:MM` suffix (ignored; timestamps are naive).
inline std::optional<Timestamp> parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);

    std::size_t pos = 0;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!detail::read_digits(text, pos, 4, y) || !detail::expect(text, pos, '-') ||
        !detail::read_digits(text, pos, 2, mo) || !detail::expect(text, pos, '-') ||
        !detail::read_digits(text, pos, 2, d))
        return std::nullopt;

    if (pos < text.size()) {
        if (text[pos] != 'T' && text[pos] != ' ') return std::nullopt;
        ++pos;
        if (!detail::read_digits(text, pos, 2, h) || !detail::expect(text, pos, ':') ||
            !detail::read_digits(text, pos, 2, mi))
            return std::nullopt;
        if (detail::expect(text, pos, ':') && !detail::read_digits(text, pos, 2, s)) return std::nullopt;
        if (detail::expect(text, pos, '.')) {
            std::size_t start = pos;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
            if (pos == start) return std::nullopt;
        }
        if (pos < text.size()) {
            if (text[pos] == 'Z') {
                ++pos;
            } else if (text[pos] == '+' || text[pos] == '-') {
                ++pos;
                int oh = 0, om = 0;
                if (!detail::read_digits(text, pos, 2, oh)) return std::nullopt;
                detail::expect(text, pos, ':');
                if (pos < text.size() && !detail::read_digits(text, pos, 2, om)) return std::nullopt;
            }
        }
        if (pos != text.size()) return std::nullopt;
    }

    if (h > 23 || mi > 59 || s > 60) return std::nullopt;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

/// `YYYY-MM-DD HH:MM:SS`
inline std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    auto day_point = floor<days>(t);
    year_month_day ymd{day_point};
    hh_mm_ss hms{t - day_point};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

/// `YYYY-MM-DDTHH:MM:SS`
inline std::string format_iso8601(Timestamp t) {
    std::string text = format_timestamp(t);
    text[10] = 'T';
    return text;
}

inline std::chrono::weekday weekday_of(Timestamp t) {
    return std::chrono::weekday{std::chrono::floor<std::chrono::days>(t)};
}

inline bool is_weekend(Timestamp t) {
    auto wd = weekday_of(t);
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

/// Midnight of the calendar day containing `t`.
inline Timestamp start_of_day(Timestamp t) {
    return std::chrono::floor<std::chrono::days>(t);
}

/// Monday 00:00 of the ISO week containing `t`.
inline Timestamp start_of_week(Timestamp t) {
    using namespace std::chrono;
    sys_days d = floor<days>(t);
    unsigned offset = (weekday{d}.iso_encoding() + 6) % 7; // Monday -> 0
    return d - days{offset};
}

} // namespace ctxdev
