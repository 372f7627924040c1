#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "cofuse/core/error.hpp"
#include "cofuse/core/random.hpp"

namespace cofuse::filter {

/// Single-scan data association problem between Bernoulli components and measurements.
///
/// `miss[i]` is the weight of component i taking no measurement (1 - r + r<p, 1-pD>);
/// `assign(i, j)` is the clutter-normalized weight r<p, pD g(z_j|.)> / kappa(z_j) of
/// component i generating measurement j. Zero entries mark infeasible choices.
struct AssociationProblem {
    std::vector<double> miss;
    Eigen::MatrixXd assign;

    [[nodiscard]] std::size_t components() const noexcept { return miss.size(); }
    [[nodiscard]] std::size_t measurements() const noexcept { return static_cast<std::size_t>(assign.cols()); }
};

inline constexpr int kMissed = -1;

/// One-to-one association map: `assignment[i]` is a measurement index or kMissed.
struct AssociationEvent {
    std::vector<int> assignment;
    double weight = 0.0;
};

struct AssociationOptions {
    std::size_t max_events = 100000;  ///< exhaustive enumeration budget
    std::size_t gibbs_sweeps = 2000;  ///< used once the budget is exceeded
};

struct AssociationResult {
    std::vector<AssociationEvent> events; ///< weights sum to one
    bool exhaustive = true;
};

namespace detail {

inline double safe_log(double x) { return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity(); }

struct LogProblem {
    std::vector<double> miss;
    Eigen::MatrixXd assign;
};

inline LogProblem to_log(const AssociationProblem& p) {
    LogProblem lp;
    lp.miss.resize(p.miss.size());
    for (std::size_t i = 0; i < p.miss.size(); ++i) lp.miss[i] = safe_log(p.miss[i]);
    lp.assign = p.assign.unaryExpr([](double x) { return safe_log(x); });
    return lp;
}

inline double event_log_weight(const LogProblem& lp, const std::vector<int>& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] == kMissed ? lp.miss[i] : lp.assign(static_cast<Eigen::Index>(i), a[i]);
    }
    return s;
}

/// Depth-first enumeration of feasible partial injections. Returns false once more than
/// `limit` events have been produced.
inline bool enumerate_events(const LogProblem& lp, std::size_t limit, std::vector<int>& current,
                             std::vector<char>& used, std::size_t depth, double log_w,
                             std::vector<std::pair<std::vector<int>, double>>& out) {
    const std::size_t n = lp.miss.size();
    if (depth == n) {
        if (out.size() >= limit) return false;
        out.emplace_back(current, log_w);
        return true;
    }
    const auto row = static_cast<Eigen::Index>(depth);
    if (std::isfinite(lp.miss[depth])) {
        current[depth] = kMissed;
        if (!enumerate_events(lp, limit, current, used, depth + 1, log_w + lp.miss[depth], out)) return false;
    }
    for (Eigen::Index j = 0; j < lp.assign.cols(); ++j) {
        if (used[static_cast<std::size_t>(j)] || !std::isfinite(lp.assign(row, j))) continue;
        used[static_cast<std::size_t>(j)] = 1;
        current[depth] = static_cast<int>(j);
        const bool ok = enumerate_events(lp, limit, current, used, depth + 1, log_w + lp.assign(row, j), out);
        used[static_cast<std::size_t>(j)] = 0;
        if (!ok) return false;
    }
    current[depth] = kMissed;
    return true;
}

/// Gibbs sampler over one-to-one association maps. Distinct visited maps are returned with
/// their exact log weights.
inline std::vector<std::pair<std::vector<int>, double>> gibbs_events(const LogProblem& lp, std::size_t sweeps, Rng& rng) {
    const std::size_t n = lp.miss.size();
    const auto m = static_cast<std::size_t>(lp.assign.cols());
    std::vector<int> state(n, kMissed);
    std::vector<int> owner(m, -1);

    // Components that cannot be missed take their best free measurement first.
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isfinite(lp.miss[i])) continue;
        int best = kMissed;
        double best_w = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
            const double w = lp.assign(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (owner[j] < 0 && w > best_w) {
                best_w = w;
                best = static_cast<int>(j);
            }
        }
        if (best == kMissed) throw NumericalError("association: no feasible association event");
        state[i] = best;
        owner[static_cast<std::size_t>(best)] = static_cast<int>(i);
    }

    std::map<std::vector<int>, double> seen;
    seen.emplace(state, event_log_weight(lp, state));

    std::vector<int> options;
    std::vector<double> logw;
    std::vector<double> probs;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t i = 0; i < n; ++i) {
            options.clear();
            logw.clear();
            if (std::isfinite(lp.miss[i])) {
                options.push_back(kMissed);
                logw.push_back(lp.miss[i]);
            }
            for (std::size_t j = 0; j < m; ++j) {
                const double w = lp.assign(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (!std::isfinite(w)) continue;
                if (owner[j] >= 0 && owner[j] != static_cast<int>(i)) continue;
                options.push_back(static_cast<int>(j));
                logw.push_back(w);
            }
            if (options.empty()) continue;
            const double mx = *std::max_element(logw.begin(), logw.end());
            probs.resize(logw.size());
            double total = 0.0;
            for (std::size_t t = 0; t < logw.size(); ++t) total += (probs[t] = std::exp(logw[t] - mx));
            double pick = u01(rng) * total;
            std::size_t t = 0;
            while (t + 1 < probs.size() && pick >= probs[t]) pick -= probs[t++];
            if (state[i] != kMissed) owner[static_cast<std::size_t>(state[i])] = -1;
            state[i] = options[t];
            if (state[i] != kMissed) owner[static_cast<std::size_t>(state[i])] = static_cast<int>(i);
        }
        seen.try_emplace(state, event_log_weight(lp, state));
    }
    return {seen.begin(), seen.end()};
}

} // namespace detail

/// Weighted one-to-one association events. Exhaustive when the number of feasible events
/// is within `opts.max_events`; otherwise the distinct events visited by a Gibbs sampler,
/// renormalized. Events are returned in lexicographic order of their assignment vectors
/// for the exhaustive case and of the sampled vectors otherwise.
inline AssociationResult enumerate_associations(const AssociationProblem& problem, const AssociationOptions& opts,
                                                Rng& rng) {
    if (opts.max_events < 1) throw PreconditionError("enumerate_associations: budget must be at least 1");
    if (static_cast<std::size_t>(problem.assign.rows()) != problem.miss.size())
        throw PreconditionError("enumerate_associations: miss and assign sizes disagree");

    const detail::LogProblem lp = detail::to_log(problem);
    std::vector<std::pair<std::vector<int>, double>> raw;
    AssociationResult result;

    std::vector<int> current(problem.components(), kMissed);
    std::vector<char> used(problem.measurements(), 0);
    if (!detail::enumerate_events(lp, opts.max_events, current, used, 0, 0.0, raw)) {
        raw = detail::gibbs_events(lp, std::max<std::size_t>(opts.gibbs_sweeps, 1), rng);
        result.exhaustive = false;
    }

    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& [a, lw] : raw) mx = std::max(mx, lw);
    if (raw.empty() || !std::isfinite(mx)) throw NumericalError("association: no feasible association event");

    double total = 0.0;
    result.events.reserve(raw.size());
    for (auto& [a, lw] : raw) {
        const double w = std::exp(lw - mx);
        total += w;
        result.events.push_back({std::move(a), w});
    }
    for (auto& e : result.events) e.weight /= total;
    return result;
}

/// Per-component marginal probabilities of each association choice.
struct AssociationMarginals {
    std::vector<double> miss;  ///< P(component i takes no measurement)
    Eigen::MatrixXd assign;    ///< P(component i takes measurement j)
};

inline AssociationMarginals marginalize(const AssociationProblem& problem, const AssociationResult& result) {
    AssociationMarginals m;
    m.miss.assign(problem.components(), 0.0);
    m.assign = Eigen::MatrixXd::Zero(problem.assign.rows(), problem.assign.cols());
    for (const auto& e : result.events) {
        for (std::size_t i = 0; i < e.assignment.size(); ++i) {
            if (e.assignment[i] == kMissed) m.miss[i] += e.weight;
            else m.assign(static_cast<Eigen::Index>(i), e.assignment[i]) += e.weight;
        }
    }
    return m;
}

} // namespace cofuse::filter
