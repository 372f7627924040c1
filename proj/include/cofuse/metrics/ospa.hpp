#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cofuse/core/error.hpp"
#include "cofuse/core/label.hpp"
#include "cofuse/metrics/assignment.hpp"

namespace cofuse::metrics {

struct MetricsConfig {
    double cutoff = 50.0; ///< c, m
    double order = 1.0;   ///< p
    Time window = 10;     ///< w, scans
    /// Whether a node's own host vehicle counts as an object the node should report. Fused
    /// posteriors carry the host as tracked by neighbors, so it is included by default.
    bool include_host = true;

    void validate() const {
        if (!(cutoff > 0.0)) throw PreconditionError("MetricsConfig: cutoff must be positive");
        if (!(order >= 1.0)) throw PreconditionError("MetricsConfig: order must be at least 1");
        if (window < 1) throw PreconditionError("MetricsConfig: window must be at least 1");
    }
};

using Point = Eigen::Vector2d;

namespace detail {

/// OSPA from a matrix of base distances already clipped to [0, c].
inline double ospa_from_distances(const Eigen::MatrixXd& d, double c, double p) {
    const auto m = d.rows();
    const auto n = d.cols();
    const auto big = std::max(m, n);
    if (big == 0) return 0.0;
    const Eigen::MatrixXd cost = d.array().pow(p).matrix();
    const auto a = optimal_assignment(cost);
    const double unmatched = static_cast<double>(big - std::min(m, n));
    const double total = a.cost + unmatched * std::pow(c, p);
    return std::min(c, std::pow(total / static_cast<double>(big), 1.0 / p));
}

} // namespace detail

/// OSPA distance between finite planar point sets with cutoff c and order p.
inline double ospa(std::span<const Point> x, std::span<const Point> y, double c, double p) {
    if (!(c > 0.0) || !(p >= 1.0)) throw PreconditionError("ospa: requires c > 0 and p >= 1");
    Eigen::MatrixXd d(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) d(i, j) = std::min(c, (x[i] - y[j]).norm());
    return detail::ospa_from_distances(d, c, p);
}

/// A track: position per scan at which it exists.
using Track = std::map<Time, Point>;

/// Time-averaged distance between two tracks over scans [from, to]. Scans where exactly one
/// exists contribute c; scans where neither exists are excluded from the average.
inline double track_distance(const Track& a, const Track& b, Time from, Time to, double c, double p) {
    double sum = 0.0;
    std::size_t count = 0;
    for (Time t = from; t <= to; ++t) {
        const auto ia = a.find(t);
        const auto ib = b.find(t);
        const bool ha = ia != a.end();
        const bool hb = ib != b.end();
        if (!ha && !hb) continue;
        const double d = (ha && hb) ? std::min(c, (ia->second - ib->second).norm()) : c;
        sum += std::pow(d, p);
        ++count;
    }
    if (count == 0) return 0.0;
    return std::pow(sum / static_cast<double>(count), 1.0 / p);
}

inline bool exists_in(const Track& t, Time from, Time to) {
    auto it = t.lower_bound(from);
    return it != t.end() && it->first <= to;
}

/// OSPA between track sets over the window [max(1, k-w+1), k]; track identity comes from
/// the map keys, which need not agree between the two sets.
template <class KeyA, class KeyB>
double ospa2(const std::map<KeyA, Track>& est, const std::map<KeyB, Track>& truth, Time k, const MetricsConfig& cfg) {
    cfg.validate();
    if (k < 1) throw PreconditionError("ospa2: scan must be at least 1");
    const Time from = std::max<Time>(1, k - cfg.window + 1);
    std::vector<const Track*> a, b;
    for (const auto& [key, t] : est)
        if (exists_in(t, from, k)) a.push_back(&t);
    for (const auto& [key, t] : truth)
        if (exists_in(t, from, k)) b.push_back(&t);
    Eigen::MatrixXd d(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            d(i, j) = track_distance(*a[i], *b[j], from, k, cfg.cutoff, cfg.order);
    return detail::ospa_from_distances(d, cfg.cutoff, cfg.order);
}

} // namespace cofuse::metrics
