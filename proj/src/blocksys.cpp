#include "zeroent/blocksys.hpp"

#include "zeroent/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace zeroent {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; symmetric).
constexpr double kGlX[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                            0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                            0.9445750230732326, 0.9894009349916499};
constexpr double kGlW[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                            0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                            0.0622535239386479, 0.0271524594117541};

template <class F>
void gauss16_panels(int panels, F&& visit) {
    for (int p = 0; p < panels; ++p) {
        double a = double(p) / panels, b = double(p + 1) / panels;
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < 8; ++i) {
            visit(mid - half * kGlX[i], half * kGlW[i]);
            visit(mid + half * kGlX[i], half * kGlW[i]);
        }
    }
}

}  // namespace

BlockSystem make_block_system(const TentSource& src, double tail_tol, std::uint64_t m_cap) {
    BlockSystem bs;
    bs.src = src;
    bs.q.reserve(1 << 16);
    double x = 1.0;
    bs.q.push_back(x);
    std::uint64_t m = 0;
    while (x >= tail_tol && m < m_cap) {
        x = src.a.eval(x);
        bs.q.push_back(x);
        ++m;
    }
    bs.m_max = m;
    return bs;
}

double DensityEstimate::operator()(double x) const {
    const std::size_t n = nodes.size();
    double h = nodes[1] - nodes[0];
    double t = x / h;
    auto j = static_cast<std::size_t>(t);
    if (j >= n - 1) return values[n - 1];
    double w = t - double(j);
    return values[j] * (1.0 - w) + values[j + 1] * w;
}

double DensityEstimate::cdf(double x) const {
    const std::size_t n = nodes.size();
    double h = nodes[1] - nodes[0];
    double t = x / h;
    auto j = static_cast<std::size_t>(t);
    if (j >= n - 1) return cumulative[n - 1];
    double w = (x - nodes[j]);
    double fx = (*this)(x);
    return cumulative[j] + 0.5 * (values[j] + fx) * w;
}

void DensityEstimate::rebuild_cumulative() {
    cumulative.assign(nodes.size(), 0.0);
    for (std::size_t i = 1; i < nodes.size(); ++i)
        cumulative[i] = cumulative[i - 1] +
                        0.5 * (values[i] + values[i - 1]) * (nodes[i] - nodes[i - 1]);
}

void DensityEstimate::normalize() {
    rebuild_cumulative();
    double total = cumulative.back();
    if (!(total > 0.0)) throw std::runtime_error("DensityEstimate::normalize: nonpositive mass");
    for (auto& v : values) v /= total;
    rebuild_cumulative();
}

namespace {

// One application of the collocated transformer at the nodes.
void apply_transformer(const BlockSystem& bs, const std::vector<double>& f_values,
                       const std::vector<double>& nodes, std::vector<double>& out, int threads) {
    const std::size_t n = nodes.size();
    const double h = nodes[1] - nodes[0];
    parallel_blocks(n, 64, threads, [&](std::uint64_t, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            double acc = 0.0;
            bs.stream(nodes[i], bs.m_max, [&](std::uint64_t, double y, double d) {
                double t = y / h;
                auto j = static_cast<std::size_t>(t);
                double fy;
                if (j >= n - 1) {
                    fy = f_values[n - 1];
                } else {
                    double w = t - double(j);
                    fy = f_values[j] * (1.0 - w) + f_values[j + 1] * w;
                }
                acc += d * fy;
            });
            out[i] = acc;
        }
    });
}

}  // namespace

DensityEstimate invariant_density(const BlockSystem& bs, int grid_n, double tol,
                                  const DensityOptions& opts) {
    if (grid_n < 64) throw std::invalid_argument("invariant_density: grid_n must be >= 64");
    DensityEstimate est;
    est.nodes.resize(grid_n);
    for (int i = 0; i < grid_n; ++i) est.nodes[i] = double(i) / (grid_n - 1);
    est.values.assign(grid_n, 1.0);
    est.normalize();

    std::vector<double> next(grid_n);
    double residual = 0.0;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        apply_transformer(bs, est.values, est.nodes, next, opts.threads);
        std::swap(est.values, next);
        est.normalize();
        residual = 0.0;
        for (int i = 0; i < grid_n; ++i)
            residual = std::max(residual, std::abs(est.values[i] - next[i]));
        if (residual < tol) return est;
    }
    throw std::runtime_error("invariant_density: no convergence after " +
                             std::to_string(opts.max_sweeps) +
                             " sweeps, last residual " + std::to_string(residual));
}

double density_fixed_point_residual(const BlockSystem& bs, const DensityEstimate& psi) {
    // one renormalized sweep, exactly as the iteration applies it: the raw
    // image loses the tail mass of the truncated branches by construction
    std::vector<double> out(psi.nodes.size());
    apply_transformer(bs, psi.values, psi.nodes, out, 0);
    double mass = 0.0;
    for (std::size_t i = 1; i < out.size(); ++i)
        mass += 0.5 * (out[i] + out[i - 1]) * (psi.nodes[i] - psi.nodes[i - 1]);
    double res = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i)
        res = std::max(res, std::abs(out[i] / mass - psi.values[i]));
    return res;
}

EntropyResult block_entropy(const BlockSystem& bs, const DensityEstimate& psi) {
    // 64-point composite Gauss (4 panels x 16) per branch, streamed so the
    // whole sum costs O(64 * m_max) branch evaluations.
    CompensatedSum acc;
    gauss16_panels(4, [&](double y, double w) {
        bs.stream(y, bs.m_max, [&](std::uint64_t, double gy, double d) {
            if (d > 0.0) acc.add(w * d * (-std::log(d)) * psi(gy));
        });
    });
    EntropyResult res;
    res.value = acc.value();
    if (res.value < -1e-9)
        throw std::runtime_error("block_entropy: negative entropy, internal inconsistency");

    // Tail bound from the fitted |J_m| decay: |J_m| ~ C m^-p on the last
    // decade, so sum_{m>M} |J_m| (p log m + |log C|) sup psi bounds the rest.
    if (bs.m_max < 32) return res;  // nothing to fit; geometric tails vanish anyway
    std::uint64_t m0 = std::max<std::uint64_t>(16, bs.m_max / 10);
    std::vector<double> lx, ly;
    for (auto m : geometric_indices(m0, bs.m_max, 32)) {
        if (m < 1 || m > bs.m_max) continue;
        double len = bs.j_length(m);
        if (len <= 0.0) continue;
        lx.push_back(std::log(double(m)));
        ly.push_back(std::log(len));
    }
    double tail = 0.0;
    if (lx.size() >= 4) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
        }
        double nn = double(lx.size());
        double p = -(nn * sxy - sx * sy) / (nn * sxx - sx * sx);
        double logC = (sy + p * sx) / nn;
        double psi_max = *std::max_element(psi.values.begin(), psi.values.end());
        if (p > 1.0) {
            double M = double(bs.m_max);
            double c = std::exp(logC);
            // int_M^inf x^-p (p log x + |log C|) dx
            double i1 = std::pow(M, 1.0 - p) / (p - 1.0);
            double ilog = std::pow(M, 1.0 - p) * (std::log(M) / (p - 1.0) + 1.0 / ((p - 1.0) * (p - 1.0)));
            tail = psi_max * c * (p * ilog + std::abs(logC) * i1);
        }
    }
    res.tail_bound = tail;
    return res;
}

BlockTimeResult expected_block_time(const BlockSystem& bs, const DensityEstimate& psi,
                                    const AsymptoticLaw& law_q) {
    BlockTimeResult res;
    CompensatedSum partial;
    for (std::uint64_t m = 1; m <= bs.m_max; ++m)
        partial.add(double(m) * (psi.cdf(bs.q[m - 1]) - psi.cdf(bs.q[m])));
    res.partial_sum = partial.value();

    const double beta = law_q.beta, delta = law_q.delta;
    if (std::abs(beta - 1.0) <= 0.02) {
        // at the boundary the answer hinges on delta vs -1
        if (delta > -0.7) {
            res.cls = BlockTimeClass::infinite;
        } else if (delta < -1.3) {
            res.cls = BlockTimeClass::finite;
        } else {
            res.cls = BlockTimeClass::indeterminate;
            return res;
        }
    } else {
        res.cls = (beta < 1.0) ? BlockTimeClass::infinite : BlockTimeClass::finite;
    }
    if (res.cls == BlockTimeClass::finite) {
        // tail: sum_{m>M} m nu(J_m) ~ psi(0) K beta sum_{m>M} m^-beta (log m)^delta,
        // summed in log space so steep fitted laws cannot overflow into NaN
        double M = double(bs.m_max);
        CompensatedSum tail;
        double log_pref = std::log(std::max(psi.at_zero() * law_q.K * beta, 1e-300));
        for (double x = M + 1.0, step = 1.0; x < 1e14; x += step) {
            double lt = std::log(x);
            double lg = log_pref - beta * lt + delta * std::log(lt) + std::log(step);
            if (!std::isfinite(lg) || lg < -80.0) break;
            tail.add(std::exp(lg));
            step = std::max(1.0, x / 256.0);  // geometric step after the head
        }
        res.tail_estimate = tail.value();
        res.value = res.partial_sum + res.tail_estimate;
    }
    return res;
}

double invariant_function_at(const BlockSystem& bs, const DensityEstimate& psi, int n_trunc,
                             double y) {
    double acc = 0.0, d = 1.0, x = y;
    for (int n = 0; n < n_trunc; ++n) {
        acc += d * psi(x);
        d *= bs.src.a.deriv(x);
        x = bs.src.a.eval(x);
    }
    return acc;
}

InvariantFunctionResult invariant_function_original(const BlockSystem& bs,
                                                    const DensityEstimate& psi, int n_trunc,
                                                    const std::vector<double>& ys) {
    if (n_trunc < 1) throw std::invalid_argument("invariant_function_original: n_trunc >= 1");
    InvariantFunctionResult res;
    res.ys = ys;
    res.values.reserve(ys.size());
    for (double y : ys) {
        if (y <= 0.0)
            throw std::invalid_argument("invariant_function_original: grid must exclude 0");
        res.values.push_back(invariant_function_at(bs, psi, n_trunc, y));
    }
    // residual of L[f](y) = a'(y) f(a(y)) + |b'(y)| f(b(y)) against f on [0.1, 1]
    double sup = 0.0;
    for (double y : ys) {
        if (y < 0.1) continue;
        double lf = bs.src.a.deriv(y) * invariant_function_at(bs, psi, n_trunc, bs.src.a.eval(y)) +
                    std::abs(bs.src.b.deriv(y)) *
                        invariant_function_at(bs, psi, n_trunc, bs.src.b.eval(y));
        sup = std::max(sup, std::abs(lf - invariant_function_at(bs, psi, n_trunc, y)));
    }
    res.residual_sup = sup;
    // int phi_0^(N) = sum_{n<N} nu([0, q(n)]) by the change of variables x = a^n(y)
    CompensatedSum integral;
    double x = 1.0;
    for (int n = 0; n < n_trunc; ++n) {
        integral.add(psi.cdf(x));
        x = bs.src.a.eval(x);
    }
    res.integral_partial = integral.value();
    return res;
}

GoodClassDiagnostics good_class_diagnostics(const BlockSystem& bs) {
    GoodClassDiagnostics diag;

    // abscissa of Delta(s) = sum |J_m|^s from the fitted decay |J_m| ~ C m^-p
    std::vector<double> lx, ly;
    for (auto m : geometric_indices(8, std::min<std::uint64_t>(bs.m_max, 1u << 16), 48)) {
        double len = bs.j_length(m);
        if (len <= 0.0) continue;
        lx.push_back(std::log(double(m)));
        ly.push_back(std::log(len));
    }
    if (lx.size() >= 4) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
        }
        double nn = double(lx.size());
        double p = -(nn * sxy - sx * sy) / (nn * sxx - sx * sx);
        diag.abscissa_estimate = (p > 0.0) ? 1.0 / p : 1.0;
    }

    // eta_1 and per-branch distortion over a coarse grid, streamed
    const int nx = 17;
    std::uint64_t m_cap = std::min<std::uint64_t>(bs.m_max, 1u << 14);
    std::vector<double> dmax(m_cap + 1, 0.0), dmin(m_cap + 1, 1e300);
    for (int i = 0; i < nx; ++i) {
        double x = double(i) / (nx - 1);
        bs.stream(x, m_cap, [&](std::uint64_t m, double, double d) {
            dmax[m] = std::max(dmax[m], d);
            dmin[m] = std::min(dmin[m], d);
        });
    }
    double eta1 = 0.0, distortion = 1.0;
    for (std::uint64_t m = 1; m <= m_cap; ++m) {
        eta1 = std::max(eta1, dmax[m]);
        if (dmin[m] > 0.0) distortion = std::max(distortion, dmax[m] / dmin[m]);
    }
    diag.eta1 = eta1;
    diag.distortion = distortion;

    // eta_2 over depth-2 compositions with indices up to 64
    const std::uint64_t pair_cap = std::min<std::uint64_t>(m_cap, 64);
    double eta2 = 0.0;
    for (int i = 0; i < nx; ++i) {
        double x = double(i) / (nx - 1);
        bs.stream(x, pair_cap, [&](std::uint64_t, double gn, double dn) {
            bs.stream(gn, pair_cap, [&](std::uint64_t, double, double dm) {
                eta2 = std::max(eta2, dm * dn);
            });
        });
    }
    diag.eta2 = eta2;
    return diag;
}

Measure measure_from_density(const DensityEstimate& psi) {
    auto est = std::make_shared<DensityEstimate>(psi);
    Measure m;
    m.density = [est](double x) { return (*est)(x); };
    m.cdf = [est](double x) { return est->cdf(x); };
    m.inverse_cdf = [est](double u) {
        const auto& cum = est->cumulative;
        auto it = std::lower_bound(cum.begin(), cum.end(), u);
        if (it == cum.begin()) return 0.0;
        if (it == cum.end()) return 1.0;
        std::size_t j = std::size_t(it - cum.begin());
        // refine inside the cell by bisection on the trapezoid cdf
        double lo = est->nodes[j - 1], hi = est->nodes[j];
        for (int k = 0; k < 60; ++k) {
            double mid = 0.5 * (lo + hi);
            if (est->cdf(mid) < u) lo = mid; else hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    m.phi_at_zero = psi.at_zero();
    m.tag = "block_invariant";
    return m;
}

}  // namespace zeroent
