#pragma once

#include "zeroent/source.hpp"
#include "zeroent/wtd.hpp"

#include <cstdint>
#include <vector>

namespace zeroent {

/// Induced block system of a tent source: inverse branches g_m = a^{m-1} o b
/// on the intervals J_m = [q(m), q(m-1)], truncated at m_max branches.
struct BlockSystem {
    TentSource src;
    std::uint64_t m_max = 0;
    std::vector<double> q;  // q(0..m_max) under the uniform measure

    double tail_mass() const { return q[m_max]; }
    double j_length(std::uint64_t m) const { return q[m - 1] - q[m]; }

    /// Streams (m, g_m(x), g_m'(x)) for m = 1..m_hi. One a-application per
    /// step: y_{m+1} = a(y_m), derivative product gains one a' factor.
    template <class F>
    void stream(double x, std::uint64_t m_hi, F&& visit) const {
        double y = src.b.eval(x);
        double d = src.b.deriv(x);  // negative; |g_m'| = |b'| * prod a'
        for (std::uint64_t m = 1; m <= m_hi; ++m) {
            visit(m, y, std::abs(d));
            if (m == m_hi) break;
            d *= src.a.deriv(y);
            y = src.a.eval(y);
        }
    }
};

/// m_max = smallest M with q(M) < tail_tol, capped at m_cap.
BlockSystem make_block_system(const TentSource& src, double tail_tol = 1e-6,
                              std::uint64_t m_cap = 1'000'000);

/// Piecewise-linear density on a uniform grid over [0,1], normalized to
/// integral one, with a cumulative table for interval masses.
struct DensityEstimate {
    std::vector<double> nodes;
    std::vector<double> values;
    std::vector<double> cumulative;  // trapezoid CDF at the nodes

    double operator()(double x) const;
    double cdf(double x) const;
    double at_zero() const { return values.front(); }
    double integral() const { return cumulative.back(); }
    void normalize();
    void rebuild_cumulative();
};

struct DensityOptions {
    int max_sweeps = 10'000;
    int threads = 0;  // 0 = ZEROENT_THREADS or hardware
};

/// Invariant density of the block map: fixed point of the collocated
/// transformer f -> sum_m |g_m'| f(g_m), by power iteration with per-sweep
/// renormalization (which compensates the mass lost to branches m > m_max).
/// Throws after max_sweeps without the sup-residual dropping below tol.
DensityEstimate invariant_density(const BlockSystem& bs, int grid_n, double tol,
                                  const DensityOptions& opts = {});

/// Sup-distance between G[psi] and psi on the nodes.
double density_fixed_point_residual(const BlockSystem& bs, const DensityEstimate& psi);

struct EntropyResult {
    double value = 0.0;       // Rohlin integral over the m_max retained branches
    double tail_bound = 0.0;  // estimated contribution of the truncated tail
};

/// Rohlin entropy in branch coordinates:
/// sum_m int |g_m'(y)| log(1/|g_m'(y)|) psi(g_m(y)) dy by composite Gauss
/// quadrature. Throws if the result is negative beyond tolerance.
EntropyResult block_entropy(const BlockSystem& bs, const DensityEstimate& psi);

enum class BlockTimeClass { finite, infinite, indeterminate };

struct BlockTimeResult {
    BlockTimeClass cls = BlockTimeClass::indeterminate;
    double value = 0.0;        // extrapolated E_nu[W] (finite case)
    double partial_sum = 0.0;  // sum_{m <= m_max} m nu(J_m)
    double tail_estimate = 0.0;
};

/// E_nu[W] = sum m nu(J_m), classified against the fitted wtd law: membership
/// of (beta, delta) in Gamma_Q means a divergent series. Near the boundary
/// (beta within 0.02 of 1 and delta near -1) the call reports indeterminate
/// rather than guessing.
BlockTimeResult expected_block_time(const BlockSystem& bs, const DensityEstimate& psi,
                                    const AsymptoticLaw& law_q);

struct InvariantFunctionResult {
    std::vector<double> ys;
    std::vector<double> values;         // phi_0^(N) on ys
    double residual_sup = 0.0;          // sup |L[phi] - phi| over ys in [0.1, 1]
    double integral_partial = 0.0;      // sum_{n<N} nu[W > n], partial toward E_nu[W]
};

/// Truncated invariant function of the original map,
/// phi_0^(N)(y) = sum_{n<N} (a^n)'(y) psi(a^n(y)).
InvariantFunctionResult invariant_function_original(const BlockSystem& bs,
                                                    const DensityEstimate& psi, int n_trunc,
                                                    const std::vector<double>& ys);

double invariant_function_at(const BlockSystem& bs, const DensityEstimate& psi, int n_trunc,
                             double y);

struct GoodClassDiagnostics {
    double abscissa_estimate = 0.0;  // from the fitted decay of |J_m|
    double eta1 = 0.0;               // max_m sup |g_m'|
    double eta2 = 0.0;               // max over depth-2 compositions
    double distortion = 1.0;         // max_m max |g_m'(x)/g_m'(y)|
};

GoodClassDiagnostics good_class_diagnostics(const BlockSystem& bs);

/// Measure with the density psi (numeric CDF and inverse CDF); lets the
/// block-invariant measure be used wherever a Measure is expected.
Measure measure_from_density(const DensityEstimate& psi);

}  // namespace zeroent
