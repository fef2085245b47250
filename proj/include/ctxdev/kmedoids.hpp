#pragma once

#include "ctxdev/errors.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ctxdev {

struct ScatterPoint {
    std::string case_id;
    std::array<double, 3> coords{}; ///< raw_score, pc, nc
};

struct Clustering {
    std::vector<std::size_t> medoids;    ///< indices into the input points
    std::vector<std::size_t> assignment; ///< medoid slot per point
    std::vector<std::size_t> sizes;      ///< points per medoid slot
    double cost = 0.0;                   ///< sum of distances to assigned medoids
};

inline double euclidean(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    double s = 0;
    for (std::size_t i = 0; i < 3; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

namespace detail {

inline double assignment_cost(const std::vector<double>& dist, std::size_t n, const std::vector<std::size_t>& medoids) {
    double cost = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (auto m : medoids) best = std::min(best, dist[i * n + m]);
        cost += best;
    }
    return cost;
}

} // namespace detail

/// PAM k-medoids. The first medoid is the point with the smallest case id,
/// further medoids are added farthest-point first; then the best improving
/// (medoid, non-medoid) swap is applied until none improves the cost.
/// Ties resolve to the lower index, so the result is deterministic.
inline Clustering k_medoids(std::span<const ScatterPoint> points, std::size_t k) {
    const std::size_t n = points.size();
    if (k < 1 || k > n) throw ParameterError("k must lie in [1, number of points]");

    std::vector<double> dist(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) dist[i * n + j] = dist[j * n + i] = euclidean(points[i].coords, points[j].coords);

    std::size_t first = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (points[i].case_id < points[first].case_id) first = i;
    std::vector<std::size_t> medoids{first};
    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = dist[i * n + first];
    while (medoids.size() < k) {
        std::size_t pick = n;
        double far = -1;
        for (std::size_t i = 0; i < n; ++i) {
            bool taken = false;
            for (auto m : medoids) taken |= m == i;
            if (!taken && nearest[i] > far) {
                far = nearest[i];
                pick = i;
            }
        }
        medoids.push_back(pick);
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], dist[i * n + pick]);
    }

    double cost = detail::assignment_cost(dist, n, medoids);
    constexpr double kEps = 1e-12;
    std::vector<char> is_medoid(n, 0);
    for (auto m : medoids) is_medoid[m] = 1;
    std::vector<std::size_t> near_slot(n);
    std::vector<double> d1(n), d2(n);
    for (;;) {
        // nearest and second-nearest medoid distance per point
        for (std::size_t i = 0; i < n; ++i) {
            d1[i] = d2[i] = std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < k; ++s) {
                double d = dist[i * n + medoids[s]];
                if (d < d1[i]) {
                    d2[i] = d1[i];
                    d1[i] = d;
                    near_slot[i] = s;
                } else if (d < d2[i]) {
                    d2[i] = d;
                }
            }
        }
        double best_cost = cost;
        std::size_t best_slot = k, best_point = n;
        for (std::size_t slot = 0; slot < k; ++slot) {
            for (std::size_t cand = 0; cand < n; ++cand) {
                if (is_medoid[cand]) continue;
                double c = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    double rest = near_slot[i] == slot ? d2[i] : d1[i];
                    c += std::min(rest, dist[i * n + cand]);
                }
                if (c < best_cost - kEps) {
                    best_cost = c;
                    best_slot = slot;
                    best_point = cand;
                }
            }
        }
        if (best_slot == k) break;
        is_medoid[medoids[best_slot]] = 0;
        is_medoid[best_point] = 1;
        medoids[best_slot] = best_point;
        cost = best_cost;
    }

    Clustering out;
    out.medoids = medoids;
    out.cost = cost;
    out.assignment.resize(n);
    out.sizes.assign(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t slot = 0;
        for (std::size_t s = 1; s < k; ++s)
            if (dist[i * n + medoids[s]] < dist[i * n + medoids[slot]]) slot = s;
        out.assignment[i] = slot;
        ++out.sizes[slot];
    }
    return out;
}

} // namespace ctxdev
