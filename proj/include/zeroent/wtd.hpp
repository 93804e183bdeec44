#pragma once

#include "zeroent/branch.hpp"
#include "zeroent/source.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace zeroent {

enum class MeasureTag { uniform, custom, block_invariant };

/// Waiting-time tail q(n) = mu[W > n]. Values are dense up to `dense_limit`
/// and kept at geometric checkpoints beyond, which bounds memory for
/// n_max up to 1e8. The sequence is strictly decreasing with q(0) = 1 for the
/// uniform tag.
struct WtdSequence {
    std::vector<double> dense;                                  // q(0..dense_limit)
    std::vector<std::pair<std::uint64_t, double>> checkpoints;  // sparse beyond dense
    std::uint64_t n_max = 0;
    MeasureTag tag = MeasureTag::uniform;

    bool has(std::uint64_t n) const;
    double at(std::uint64_t n) const;  // throws if n is not stored
    /// r(n) = q(n-1) - q(n), n >= 1 (dense range only).
    double r(std::uint64_t n) const;
    /// Stored points, roughly `target` of them geometrically spaced in [lo, hi].
    std::vector<std::pair<std::uint64_t, double>> sample_points(std::uint64_t lo,
                                                                std::uint64_t hi,
                                                                std::size_t target) const;
};

struct WtdOptions {
    std::uint64_t dense_limit = 1u << 16;
};

/// q(n) = a^n(1) by forward iteration (equivalently the recurrence
/// q(n+1) = q(n)(1 - v(q(n)))).
WtdSequence wtd_uniform(const Branch& a, std::uint64_t n_max, const WtdOptions& opts = {});

/// q_mu(n) = F(q_tau(n)).
WtdSequence wtd_pushforward(const WtdSequence& q_tau, const std::function<double(double)>& cdf,
                            MeasureTag tag = MeasureTag::custom);

enum class DomainTag { gamma_q, gamma_q_star, gamma_m, gamma_m_star, gamma_s };

/// Law K n^{-beta} (log n)^delta with parameter-domain membership.
struct AsymptoticLaw {
    double K = 1.0;
    double beta = 1.0;
    double delta = 0.0;
    DomainTag domain_tag = DomainTag::gamma_q;
    std::uint64_t n_lo = 0, n_hi = 0;
    double residual = 0.0;

    double operator()(double n) const;
    bool in_tagged_domain() const;
};

bool gamma_q_contains(double beta, double delta);
bool gamma_q_star_contains(double beta, double delta);
bool gamma_m_contains(double beta, double delta);
bool gamma_m_star_contains(double beta, double delta);

/// Least-squares fit of log q(n) against (1, log n, log log n) at geometric
/// sample points in [n_lo, n_hi]; n_lo >= 16, at least 8 points.
AsymptoticLaw fit_law(const WtdSequence& q, std::uint64_t n_lo, std::uint64_t n_hi);

struct VAsymptoticPoint {
    std::uint64_t n;
    double deviation;  // |gamma n v(q(n)) - 1|
};

struct VAsymptoticReport {
    std::vector<VAsymptoticPoint> curve;
    double max_deviation = 0.0;
    double deviation_at_n_hi = 0.0;
    bool decreasing = false;  // deviation decreasing across the sampled range
};

/// Checks v(q(n)) ~ 1/(gamma n), with v(x) = (x - a(x))/x taken from the
/// branch displacement when available.
VAsymptoticReport check_v_asymptotic(const TentSource& src, const WtdSequence& q, double gamma,
                                     std::uint64_t n_lo, std::uint64_t n_hi,
                                     std::size_t points = 64);

}  // namespace zeroent
