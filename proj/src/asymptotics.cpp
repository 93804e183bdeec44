#include "zeroent/asymptotics.hpp"

#include "zeroent/numeric.hpp"
#include "zeroent/rng.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace zeroent {

GfEvaluation gf_eval(std::span<const double> coeffs, double v, const AsymptoticLaw* law) {
    if (!(v >= 0.0 && v < 1.0)) throw std::invalid_argument("gf_eval: need 0 <= v < 1");
    CompensatedSum acc;
    double vp = 1.0;
    for (double c : coeffs) {
        acc.add(c * vp);
        vp *= v;
    }
    GfEvaluation out;
    out.v = v;
    out.value = acc.value();
    out.truncation_n = coeffs.empty() ? 0 : coeffs.size() - 1;
    if (law && !coeffs.empty())
        out.tail_bound = (*law)(double(coeffs.size())) * vp * v / (1.0 - v);
    return out;
}

namespace {

// Head convention for synthetic log-power sequences: the formula applies from
// n = 2, the first two coefficients are K.
double law_coeff(const AsymptoticLaw& law, std::uint64_t n) {
    if (n < 2) return law.K;
    double x = double(n);
    return law.K * std::pow(x, -law.beta) * std::pow(std::log(x), law.delta);
}

// Slowly varying companion U in the Hardy-Littlewood-Karamata correspondence
// partial sums Q_n ~ n^rho U(n)/Gamma(rho+1) with rho = 1-beta.
double law_sv_u(const AsymptoticLaw& law, double x) {
    if (law.beta == 1.0)
        return law.K * std::pow(std::log(x), law.delta + 1.0) / (law.delta + 1.0);
    return std::tgamma(1.0 - law.beta) * law.K * std::pow(std::log(x), law.delta);
}

}  // namespace

RoundTripReport abelian_tauberian_roundtrip(const AsymptoticLaw& law,
                                            std::span<const double> v_list,
                                            std::span<const std::uint64_t> n_list) {
    const bool degenerate_const = (law.beta == 0.0 && law.delta == 0.0);
    if (!gamma_q_contains(law.beta, law.delta) && !degenerate_const) {
        std::ostringstream os;
        os << "abelian_tauberian_roundtrip: (beta, delta) = (" << law.beta << ", " << law.delta
           << ") outside Gamma_Q = (]0,1[ x R) u ({1} x ]-1,inf[) u ({0} x ]-inf,0[)";
        throw std::domain_error(os.str());
    }
    const double rho = 1.0 - law.beta;
    RoundTripReport rep;

    // Abelian direction: sum the series at each v, truncating when v^n and the
    // law tail stop mattering.
    for (double v : v_list) {
        if (!(v >= 0.0 && v < 1.0))
            throw std::invalid_argument("abelian_tauberian_roundtrip: v outside [0,1[");
        auto cutoff = static_cast<std::uint64_t>(std::ceil(-12.0 * std::log(10.0) / std::log(v)));
        cutoff = std::min<std::uint64_t>(std::max<std::uint64_t>(cutoff, 16), 20'000'000);
        CompensatedSum acc;
        double vp = 1.0;
        for (std::uint64_t n = 0; n <= cutoff; ++n) {
            acc.add(law_coeff(law, n) * vp);
            vp *= v;
        }
        double lhs = acc.value() * std::pow(1.0 - v, rho);
        double u = degenerate_const ? law.K : law_sv_u(law, 1.0 / (1.0 - v));
        rep.abelian.push_back({v, lhs / u});
    }

    // Tauberian direction: running partial sums Q_n = q(0) + ... + q(n-1).
    std::vector<std::uint64_t> ns(n_list.begin(), n_list.end());
    std::sort(ns.begin(), ns.end());
    CompensatedSum qn;
    std::uint64_t k = 0;
    for (std::uint64_t n : ns) {
        while (k < n) {
            qn.add(law_coeff(law, k));
            ++k;
        }
        double x = double(n);
        double u = degenerate_const ? law.K : law_sv_u(law, x);
        double rhs = qn.value() * std::tgamma(rho + 1.0) / (std::pow(x, rho) * u);
        rep.tauberian.push_back({x, rhs});
    }
    return rep;
}

std::vector<double> sv_partial_sum_transform(const std::function<double(std::uint64_t)>& V,
                                             double beta,
                                             std::span<const std::uint64_t> points) {
    if (!(beta >= 0.0 && beta <= 1.0))
        throw std::invalid_argument("sv_partial_sum_transform: beta must lie in [0,1]");
    std::vector<std::uint64_t> ns(points.begin(), points.end());
    std::sort(ns.begin(), ns.end());
    std::vector<double> out;
    out.reserve(ns.size());
    CompensatedSum acc;
    std::uint64_t k = 0;
    for (std::uint64_t n : ns) {
        if (n == 0) throw std::invalid_argument("sv_partial_sum_transform: points must be >= 1");
        while (k < n) {
            if (k == 0) {
                if (beta == 0.0) acc.add(V(0));  // 0^-beta only makes sense at beta = 0
            } else {
                acc.add(V(k) * std::pow(double(k), -beta));
            }
            ++k;
        }
        out.push_back(std::pow(double(n), beta - 1.0) * acc.value());
    }
    return out;
}

RenewalReport renewal_check(const TentSource& src, const Measure& mu, double psi_at_zero,
                            std::span<const double> v_list, std::uint64_t mc_samples,
                            std::uint64_t seed, int threads) {
    if (mc_samples < 100'000)
        throw std::invalid_argument("renewal_check: need at least 1e5 MC samples");
    if (!(psi_at_zero > 0.0)) throw std::invalid_argument("renewal_check: psi(0) unavailable");
    for (double v : v_list)
        if (!(v >= 0.0 && v < 1.0)) throw std::invalid_argument("renewal_check: v outside [0,1[");

    double vmax = *std::max_element(v_list.begin(), v_list.end());
    std::uint64_t cutoff = 16;
    if (vmax > 0.0)
        cutoff = static_cast<std::uint64_t>(std::ceil(-12.0 * std::log(10.0) / std::log(vmax)));

    // occupation frequencies of J at positions 2..cutoff+1, batched for a
    // seed-invariance stderr; 16 batches of fixed sample ranges. Counts are
    // whole numbers, so the merge is exact and independent of thread order.
    const std::uint64_t nbatch = 16;
    const std::uint64_t per_batch = (mc_samples + nbatch - 1) / nbatch;
    std::vector<std::vector<double>> batch_counts(nbatch, std::vector<double>(cutoff + 1, 0.0));
    std::vector<std::uint64_t> batch_n(nbatch, 0);
    std::mutex merge_mutex;
    auto T = forward_map(src);
    const double c = src.c;
    const bool closed = bool(src.a.inverse) && bool(src.b.inverse);
    const auto& ainv = src.a.inverse;
    const auto& binv = src.b.inverse;

    parallel_blocks(mc_samples, 4096, threads,
                    [&](std::uint64_t, std::uint64_t lo, std::uint64_t hi) {
        std::vector<double> local(cutoff + 1, 0.0);
        std::uint64_t run_start = lo;
        auto flush = [&](std::uint64_t upto) {
            std::uint64_t b = std::min(run_start / per_batch, nbatch - 1);
            std::lock_guard<std::mutex> lock(merge_mutex);
            auto& counts = batch_counts[b];
            for (std::uint64_t k = 1; k <= cutoff; ++k) counts[k] += local[k];
            batch_n[b] += upto - run_start;
        };
        auto advance_run = [&](std::uint64_t i) {
            if (i / per_batch != run_start / per_batch) {
                flush(i);
                run_start = i;
                std::fill(local.begin(), local.end(), 0.0);
            }
        };
        std::uint64_t i = lo;
        // two interleaved trajectories per pass: the map step is a serial
        // divide chain, pairing roughly doubles the throughput
        for (; i + 1 < hi && (i + 1) / per_batch == i / per_batch; i += 2) {
            advance_run(i);
            double x = sample(mu, stream_u01(seed, i, 0));
            double y = sample(mu, stream_u01(seed, i + 1, 0));
            if (closed) {
                for (std::uint64_t k = 1; k <= cutoff; ++k) {
                    x = std::min(1.0, std::max(0.0, (x > c) ? binv(x) : ainv(x)));
                    y = std::min(1.0, std::max(0.0, (y > c) ? binv(y) : ainv(y)));
                    local[k] += double(x > c) + double(y > c);
                }
            } else {
                for (std::uint64_t k = 1; k <= cutoff; ++k) {
                    x = T(x);
                    y = T(y);
                    local[k] += double(x > c) + double(y > c);
                }
            }
        }
        for (; i < hi; ++i) {
            advance_run(i);
            double x = sample(mu, stream_u01(seed, i, 0));
            for (std::uint64_t k = 1; k <= cutoff; ++k) {
                x = T(x);
                if (x > c) local[k] += 1.0;
            }
        }
        flush(hi);
    });

    std::vector<double> freq(cutoff + 1, 0.0);
    for (std::uint64_t k = 1; k <= cutoff; ++k) {
        double s = 0.0;
        for (std::uint64_t b = 0; b < nbatch; ++b) s += batch_counts[b][k];
        freq[k] = s / double(mc_samples);
    }

    // exact wtd factor
    WtdOptions wopts;
    wopts.dense_limit = cutoff + 1;
    WtdSequence qtau = wtd_uniform(src.a, cutoff + 1, wopts);
    WtdSequence qmu = wtd_pushforward(qtau, mu.cdf);

    RenewalReport rep;
    rep.D = mu.phi_at_zero / psi_at_zero;
    for (double v : v_list) {
        CompensatedSum first;
        double vp = 1.0;
        for (std::uint64_t k = 1; k <= cutoff; ++k) {
            vp *= v;
            first.add(freq[k] * vp);
        }
        CompensatedSum second;
        second.add(1.0);
        vp = 1.0;
        for (std::uint64_t k = 1; k <= cutoff; ++k) {
            vp *= v;
            second.add(-(qmu.dense[k - 1] - qmu.dense[k]) * vp);
        }
        double product = first.value() * second.value();

        // batch-mean stderr of the first factor, scaled by the exact second
        double mean = 0.0, var = 0.0;
        std::vector<double> bvals;
        for (std::uint64_t b = 0; b < nbatch; ++b) {
            if (batch_n[b] == 0) continue;
            CompensatedSum bf;
            double bp = 1.0;
            for (std::uint64_t k = 1; k <= cutoff; ++k) {
                bp *= v;
                bf.add(batch_counts[b][k] / double(batch_n[b]) * bp);
            }
            bvals.push_back(bf.value());
        }
        for (double bv : bvals) mean += bv;
        mean /= double(bvals.size());
        for (double bv : bvals) var += (bv - mean) * (bv - mean);
        var /= double(bvals.size()) * double(bvals.size() - 1);
        double se = std::sqrt(var) * std::abs(second.value());

        rep.points.push_back({v, product, std::abs(product / rep.D - 1.0), se});
    }
    return rep;
}

std::pair<double, double> map_s_to_q(double gamma, double delta) {
    if (!gamma_s_contains(gamma, delta)) {
        std::ostringstream os;
        os << "map_s_to_q: (" << gamma << ", " << delta
           << ") outside Gamma_S = (]1,inf[ x R) u ({1} x ]-inf,0])";
        throw std::domain_error(os.str());
    }
    return {1.0 / gamma, -delta / gamma};
}

std::pair<double, double> map_q_to_m(double beta_q, double delta_q) {
    if (!gamma_q_contains(beta_q, delta_q)) {
        std::ostringstream os;
        os << "map_q_to_m: (" << beta_q << ", " << delta_q
           << ") outside Gamma_Q = (]0,1[ x R) u ({1} x ]-1,inf[) u ({0} x ]-inf,0[)";
        throw std::domain_error(os.str());
    }
    if (beta_q < 1.0) return {beta_q, -delta_q};
    return {1.0, -(delta_q + 1.0)};
}

std::pair<double, double> map_m_to_s(double beta_m, double delta_m) {
    if (beta_m == 0.0 || (beta_m == 1.0 && delta_m > -1.0) || beta_m < 0.0 || beta_m > 1.0) {
        std::ostringstream os;
        os << "map_m_to_s: (" << beta_m << ", " << delta_m
           << ") does not provide a DRIL source (unreachable weight exponents: "
              "beta_M = 0, or beta_M = 1 with delta_M > -1)";
        throw std::domain_error(os.str());
    }
    if (beta_m < 1.0) return {1.0 / beta_m, delta_m / beta_m};
    return {1.0, delta_m + 1.0};
}

std::function<double(double)> predicted_weights(const AsymptoticLaw& law_q_nu, double e_block) {
    if (!gamma_q_contains(law_q_nu.beta, law_q_nu.delta))
        throw std::domain_error("predicted_weights: law outside Gamma_Q");
    const double K = law_q_nu.K, beta = law_q_nu.beta, delta = law_q_nu.delta;
    if (beta == 1.0) {
        return [K, delta, e_block](double n) {
            return e_block / K * (delta + 1.0) * n / std::pow(std::log(n), delta + 1.0);
        };
    }
    const double gconst = std::tgamma(beta + 1.0) * std::tgamma(1.0 - beta);
    return [K, beta, delta, e_block, gconst](double n) {
        return e_block / K * std::pow(n, beta) / (std::pow(std::log(n), delta) * gconst);
    };
}

std::function<double(double)> predicted_weights_finite(double e_w, double e_block) {
    if (!(e_w > 0.0)) throw std::invalid_argument("predicted_weights_finite: E[W] must be > 0");
    return [e_w, e_block](double n) { return e_block / e_w * n; };
}

SynthesisResult synthesize_source(double beta_m, double delta_m, std::uint64_t n_max) {
    auto [gamma, delta] = map_m_to_s(beta_m, delta_m);
    SynthesisResult res;
    res.gamma = gamma;
    res.delta = delta;

    Branch a;
    if (gamma == 1.0 && delta == 0.0) {
        a = farey_a();  // the emblematic member of DRIL(1,0)
    } else {
        DrilParams p;
        p.gamma = gamma;
        p.delta = delta;
        a = make_dril_a(p);
    }
    res.source = make_source(a, make_b_linear(a.at1));

    WtdSequence q = wtd_uniform(res.source.a, n_max);
    res.fitted = fit_law(q, std::max<std::uint64_t>(16, n_max / 100), n_max);
    auto [bq, dq] = map_s_to_q(gamma, delta);
    res.beta_q_target = bq;
    res.delta_q_target = dq;
    res.beta_error = std::abs(res.fitted.beta - bq);
    res.delta_error = std::abs(res.fitted.delta - dq);
    // read back (beta_M, delta_M) through (Q -> M), snapping a fitted beta
    // within the error band of 1 onto the boundary branch
    if (std::abs(res.fitted.beta - 1.0) <= 0.02) {
        res.recovered_beta_m = 1.0;
        res.recovered_delta_m = -(res.fitted.delta + 1.0);
    } else {
        res.recovered_beta_m = res.fitted.beta;
        res.recovered_delta_m = -res.fitted.delta;
    }
    return res;
}

}  // namespace zeroent
