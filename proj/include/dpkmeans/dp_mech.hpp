#pragma once

// Differential-privacy primitives: per-coordinate Laplace noise, the
// exponential mechanism over a finite candidate set, and sequential-composition
// budget accounting.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "dpkmeans/core.hpp"

namespace dpkmeans {

// eps_exp is spent per iteration, eps_lap once on the final centroids;
// sequential composition gives total = T * eps_exp + eps_lap.
struct PrivacyBudget {
    double eps_exp = 0.0;
    double eps_lap = 0.0;
    std::size_t iterations = 0;
};

inline PrivacyBudget make_budget(double eps_exp, double eps_lap, std::size_t iterations) {
    if (eps_exp <= 0.0) throw std::invalid_argument("make_budget: eps_exp must be > 0");
    if (eps_lap <= 0.0) throw std::invalid_argument("make_budget: eps_lap must be > 0");
    if (iterations == 0) throw std::invalid_argument("make_budget: iterations must be >= 1");
    return PrivacyBudget{eps_exp, eps_lap, iterations};
}

inline double total_budget(const PrivacyBudget& b) {
    return static_cast<double>(b.iterations) * b.eps_exp + b.eps_lap;
}

// rho of the total goes to the per-iteration exponential draws (split evenly
// across T iterations), the rest to the final Laplace release.
inline PrivacyBudget split_total(double eps_total, std::size_t iterations, double rho = 0.5) {
    if (eps_total <= 0.0) throw std::invalid_argument("split_total: eps_total must be > 0");
    if (iterations == 0) throw std::invalid_argument("split_total: iterations must be >= 1");
    if (rho <= 0.0 || rho >= 1.0) throw std::invalid_argument("split_total: rho must be in (0,1)");
    return PrivacyBudget{rho * eps_total / static_cast<double>(iterations),
                         (1.0 - rho) * eps_total, iterations};
}

// Laplace(0, scale) via inverse CDF.
inline double laplace_sample(double scale, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u = unit(rng) - 0.5;
    // log1p keeps precision near u = +-0.5
    return u >= 0.0 ? -scale * std::log1p(-2.0 * u) : scale * std::log1p(2.0 * u);
}

inline std::vector<double> laplace_perturb(std::span<const double> vec, double scale, Rng& rng) {
    if (scale <= 0.0) throw std::invalid_argument("laplace_perturb: scale must be > 0");
    std::vector<double> out(vec.begin(), vec.end());
    for (double& v : out) v += laplace_sample(scale, rng);
    return out;
}

// Candidate quality: negative Euclidean distance to the Lloyd centroid, so the
// nearest candidate has the highest score (maximum 0).
inline double score_q(std::span<const double> candidate, std::span<const double> lloyd_centroid) {
    if (candidate.size() != lloyd_centroid.size())
        throw std::invalid_argument("score_q: dimension mismatch");
    return -distance(candidate, lloyd_centroid);
}

struct ScoredCandidateSet {
    Points candidates;
    std::vector<double> scores;
    double sensitivity = 0.0;  // Delta q
};

inline ScoredCandidateSet make_scored_candidates(Points candidates, std::vector<double> scores,
                                                 double sensitivity) {
    if (candidates.empty()) throw std::invalid_argument("make_scored_candidates: empty candidate set");
    if (scores.size() != candidates.count)
        throw std::invalid_argument("make_scored_candidates: score count mismatch");
    for (double s : scores)
        if (!std::isfinite(s)) throw std::invalid_argument("make_scored_candidates: non-finite score");
    if (sensitivity <= 0.0) throw std::invalid_argument("make_scored_candidates: sensitivity must be > 0");
    return ScoredCandidateSet{std::move(candidates), std::move(scores), sensitivity};
}

// Selection probabilities exp(eps * q_i / (2 dq)) / Z, computed with max-score
// subtraction before exponentiation.
inline std::vector<double> exp_mechanism_probabilities(std::span<const double> scores,
                                                       double epsilon, double sensitivity) {
    if (scores.empty()) throw std::invalid_argument("exp_mechanism: empty candidate set");
    if (epsilon <= 0.0) throw std::invalid_argument("exp_mechanism: epsilon must be > 0");
    if (sensitivity <= 0.0) throw std::invalid_argument("exp_mechanism: sensitivity must be > 0");
    const double q_max = *std::max_element(scores.begin(), scores.end());
    std::vector<double> p(scores.size());
    double z = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        p[i] = std::exp(epsilon * (scores[i] - q_max) / (2.0 * sensitivity));
        z += p[i];
    }
    for (double& v : p) v /= z;
    return p;
}

inline std::size_t exp_mechanism(const ScoredCandidateSet& set, double epsilon, Rng& rng) {
    const std::vector<double> p = exp_mechanism_probabilities(set.scores, epsilon, set.sensitivity);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return i;
    }
    return p.size() - 1;  // guard against rounding in the cumulative sum
}

}  // namespace dpkmeans
