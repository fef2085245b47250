#pragma once

#include "ctxdev/errors.hpp"
#include "ctxdev/event_log.hpp"
#include "ctxdev/time.hpp"

#include <cmath>
#include <compare>
#include <cstddef>
#include <vector>

namespace ctxdev {

struct TimeWindow {
    Timestamp start{};
    Timestamp end{};

    friend auto operator<=>(const TimeWindow&, const TimeWindow&) = default;
};

/// Window length in seconds.
inline double duration(const TimeWindow& tw) {
    return static_cast<double>(to_epoch(tw.end) - to_epoch(tw.start));
}

/// Partition of [t_min, t_min + n*l) into n windows of length l.
///
/// Window k (0-based) is [t_min + ceil(k*l), t_min + ceil((k+1)*l)); with an
/// integral l this is the plain arithmetic grid. Membership is half-open,
/// except that the last window also holds t_max.
class TimeSpan {
public:
    TimeSpan() = default;

    TimeSpan(Timestamp t_min, Timestamp t_max, double length_seconds)
        : length_(length_seconds), t_min_(t_min), t_max_(t_max) {
        if (!(length_seconds > 0) || !std::isfinite(length_seconds))
            throw ParameterError("time span length must be positive");
        if (t_max < t_min) throw ParameterError("t_max precedes t_min");
        double extent = static_cast<double>(to_epoch(t_max) - to_epoch(t_min));
        auto n = static_cast<std::size_t>(std::ceil(extent / length_seconds));
        if (n == 0) n = 1;
        windows_.reserve(n);
        for (std::size_t k = 0; k < n; ++k) windows_.push_back(TimeWindow{boundary(k), boundary(k + 1)});
    }

    double length_seconds() const noexcept { return length_; }
    Timestamp t_min() const noexcept { return t_min_; }
    Timestamp t_max() const noexcept { return t_max_; }
    std::size_t size() const noexcept { return windows_.size(); }
    const std::vector<TimeWindow>& windows() const noexcept { return windows_; }
    const TimeWindow& operator[](std::size_t k) const { return windows_[k]; }

    bool covers(Timestamp t) const { return t >= t_min_ && (t < windows_.back().end || t <= t_max_); }

    /// Index of the window holding `t`.
    std::size_t index_of(Timestamp t) const {
        if (windows_.empty() || !covers(t))
            throw OutOfSpanError("timestamp " + format_timestamp(t) + " lies outside the time span");
        auto offset = static_cast<double>(to_epoch(t) - to_epoch(t_min_));
        auto k = static_cast<std::size_t>(std::floor(offset / length_));
        // floor(d/l) can be off by one around ceil-rounded boundaries for fractional l
        while (k > 0 && k < windows_.size() && t < windows_[k].start) --k;
        while (k + 1 < windows_.size() && t >= windows_[k + 1].start) ++k;
        return std::min(k, windows_.size() - 1);
    }

    friend bool operator==(const TimeSpan&, const TimeSpan&) = default;

private:
    Timestamp boundary(std::size_t k) const {
        return t_min_ + std::chrono::seconds{static_cast<std::int64_t>(std::ceil(static_cast<double>(k) * length_))};
    }

    double length_ = 0;
    Timestamp t_min_{};
    Timestamp t_max_{};
    std::vector<TimeWindow> windows_;
};

inline TimeSpan compute_time_span(const EventLog& log, double length_seconds) {
    if (log.empty()) throw EmptyInputError("cannot compute a time span over an empty log");
    if (!(length_seconds > 0)) throw ParameterError("time span length must be positive");
    auto [lo, hi] = log.time_range();
    return TimeSpan(lo, hi, length_seconds);
}

inline const TimeWindow& window_of_event(const TimeSpan& span, const Event& e) {
    return span[span.index_of(e.timestamp)];
}

} // namespace ctxdev
