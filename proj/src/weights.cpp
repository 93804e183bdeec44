#include "zeroent/weights.hpp"

#include "zeroent/numeric.hpp"
#include "zeroent/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace zeroent {

namespace {

constexpr double kDegenerateLength = 1e-12;

// Node state for the prepend recursion over cylinders. Prepending a symbol s
// maps I_w to h_s(I_w), so the depth-k level of this tree is exactly the set
// of depth-k cylinders; measures and ones-counts can be accumulated per level
// with O(1) work per node.
struct IntervalState {
    double lo, hi;      // valid while not degenerate
    double anchor;      // tangent anchor once degenerate
    double log_length;
    bool degenerate;
};

IntervalState prepend(const Branch& h, const IntervalState& s) {
    IntervalState t;
    if (!s.degenerate) {
        if (h.increasing()) {
            t.lo = h.eval(s.lo);
            t.hi = h.eval(s.hi);
        } else {
            t.lo = h.eval(s.hi);
            t.hi = h.eval(s.lo);
        }
        t.degenerate = (t.hi - t.lo < kDegenerateLength);
        if (t.degenerate) {
            t.anchor = 0.5 * (t.lo + t.hi);
            t.log_length = std::log(std::max(t.hi - t.lo, 5e-324));
        } else {
            t.anchor = 0.0;
            t.log_length = 0.0;
        }
    } else {
        t.lo = t.hi = 0.0;
        t.degenerate = true;
        t.log_length = s.log_length + std::log(std::abs(h.deriv(s.anchor)));
        t.anchor = h.eval(s.anchor);
    }
    return t;
}

double state_log_prob(const Measure& mu, const IntervalState& s) {
    if (!s.degenerate) {
        double dm = mu.cdf(s.hi) - mu.cdf(s.lo);
        if (dm > 0.0) return std::log(dm);
        double anchor = 0.5 * (s.lo + s.hi);
        return std::log(mu.density(anchor)) + std::log(std::max(s.hi - s.lo, 5e-324));
    }
    return std::log(mu.density(s.anchor)) + s.log_length;
}

double state_prob(const Measure& mu, const IntervalState& s) {
    if (!s.degenerate) {
        double dm = mu.cdf(s.hi) - mu.cdf(s.lo);
        if (dm > 0.0) return dm;
    }
    return std::exp(state_log_prob(mu, s));
}

struct TreeAccumulators {
    std::vector<CompensatedSum> mass, m, nbar;
};

void visit(const TentSource& src, const Measure& mu, const IntervalState& s, int depth,
           int max_depth, std::uint64_t ones, TreeAccumulators& acc) {
    if (depth > 0) {
        double p = state_prob(mu, s);
        acc.mass[depth].add(p);
        if (p > 0.0) acc.m[depth].add(p * std::abs(state_log_prob(mu, s)));
        acc.nbar[depth].add(p * double(ones));
    }
    if (depth == max_depth) return;
    visit(src, mu, prepend(src.a, s), depth + 1, max_depth, ones, acc);
    visit(src, mu, prepend(src.b, s), depth + 1, max_depth, ones + 1, acc);
}

}  // namespace

WeightProfile exact_profile(const TentSource& src, const Measure& mu, int n_max) {
    if (n_max < 0 || n_max > 26)
        throw std::invalid_argument("exact_profile: n_max must lie in [0, 26]");
    TreeAccumulators acc;
    acc.mass.resize(n_max + 1);
    acc.m.resize(n_max + 1);
    acc.nbar.resize(n_max + 1);
    IntervalState root{0.0, 1.0, 0.0, 0.0, false};
    visit(src, mu, root, 0, n_max, 0, acc);
    acc.mass[0].add(1.0);

    WeightProfile prof;
    prof.method = ProfileMethod::exact;
    for (int d = 0; d <= n_max; ++d) {
        prof.depths.push_back(d);
        prof.m.push_back(d == 0 ? 0.0 : acc.m[d].value());
        prof.nbar.push_back(d == 0 ? 0.0 : acc.nbar[d].value());
        prof.mass.push_back(acc.mass[d].value());
        prof.stderr_m.push_back(0.0);
        prof.stderr_nbar.push_back(0.0);
    }
    return prof;
}

WeightProfile mc_profile(const TentSource& src, const Measure& mu,
                         std::vector<std::uint64_t> depths, std::uint64_t samples,
                         std::uint64_t seed, const McOptions& opts) {
    if (samples < 1000) throw std::invalid_argument("mc_profile: sample budget below 1e3");
    std::sort(depths.begin(), depths.end());
    depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
    if (depths.empty()) throw std::invalid_argument("mc_profile: no depths");
    const std::uint64_t max_depth = depths.back();
    if (max_depth > 100'000)
        throw std::invalid_argument("mc_profile: depth cap is 1e5");
    const std::size_t nd = depths.size();

    // fixed 1024-sample blocks; per-block partial sums are merged in block
    // order so the totals are independent of the thread count
    const std::uint64_t bs = 1024;
    const std::uint64_t nblocks = block_count(samples, bs);
    std::vector<std::vector<double>> blk_m(nblocks), blk_m2(nblocks), blk_n(nblocks),
        blk_n2(nblocks);
    std::vector<std::vector<float>> neglogp;
    if (opts.want_quantiles) neglogp.assign(nd, std::vector<float>(samples));

    parallel_blocks(samples, bs, opts.threads,
                    [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
        std::vector<double> sm(nd, 0.0), sm2(nd, 0.0), sn(nd, 0.0), sn2(nd, 0.0);
        std::vector<std::uint8_t> bits;
        std::vector<std::uint64_t> ones_prefix;
        for (std::uint64_t i = lo; i < hi; ++i) {
            double x = sample(mu, stream_u01(seed, i, 0));
            Word w = encode(src, x, int(max_depth));
            bits = w.bits;
            ones_prefix.assign(nd, 0);
            std::uint64_t ones = 0;
            {
                std::size_t di = 0;
                while (di < nd && depths[di] == 0) ++di;  // depth 0 carries no ones
                for (std::uint64_t k = 0; k < max_depth; ++k) {
                    ones += bits[k];
                    while (di < nd && depths[di] == k + 1) ones_prefix[di++] = ones;
                }
            }
            for (std::size_t di = 0; di < nd; ++di) {
                std::uint64_t d = depths[di];
                double neglog = 0.0;
                if (d > 0) {
                    auto cyl = cylinder_of_bits(
                        src, std::span<const std::uint8_t>(bits.data(), d));
                    neglog = -log_prob(src, mu, cyl);
                }
                double on = (d == 0) ? 0.0 : double(ones_prefix[di]);
                sm[di] += neglog;
                sm2[di] += neglog * neglog;
                sn[di] += on;
                sn2[di] += on * on;
                if (opts.want_quantiles) neglogp[di][i] = float(neglog);
            }
        }
        blk_m[b] = std::move(sm);
        blk_m2[b] = std::move(sm2);
        blk_n[b] = std::move(sn);
        blk_n2[b] = std::move(sn2);
    });

    WeightProfile prof;
    prof.method = ProfileMethod::monte_carlo;
    prof.samples = samples;
    prof.seed = seed;
    prof.depths = depths;
    const double N = double(samples);
    for (std::size_t di = 0; di < nd; ++di) {
        CompensatedSum sm, sm2, sn, sn2;
        for (std::uint64_t b = 0; b < nblocks; ++b) {
            sm.add(blk_m[b][di]);
            sm2.add(blk_m2[b][di]);
            sn.add(blk_n[b][di]);
            sn2.add(blk_n2[b][di]);
        }
        double mean_m = sm.value() / N;
        double mean_n = sn.value() / N;
        double var_m = std::max(0.0, sm2.value() / N - mean_m * mean_m);
        double var_n = std::max(0.0, sn2.value() / N - mean_n * mean_n);
        prof.m.push_back(mean_m);
        prof.nbar.push_back(mean_n);
        prof.stderr_m.push_back(std::sqrt(var_m / N));
        prof.stderr_nbar.push_back(std::sqrt(var_n / N));
        if (opts.want_quantiles) {
            auto& v = neglogp[di];
            std::size_t k = std::min(v.size() - 1,
                                     std::size_t(std::floor(0.999 * double(v.size()))));
            std::nth_element(v.begin(), v.begin() + k, v.end());
            prof.q999_neglogp.push_back(double(v[k]));
        }
    }
    return prof;
}

namespace {

void lambda_visit(const TentSource& src, const Measure& mu, const IntervalState& st, int depth,
                  int max_depth, double t_pow, double t, double s,
                  std::vector<CompensatedSum>& per_depth) {
    if (depth > 0) per_depth[depth].add(t_pow * std::exp(s * state_log_prob(mu, st)));
    if (depth == max_depth) return;
    lambda_visit(src, mu, prepend(src.a, st), depth + 1, max_depth, t_pow, t, s, per_depth);
    lambda_visit(src, mu, prepend(src.b, st), depth + 1, max_depth, t_pow * t, t, s, per_depth);
}

}  // namespace

double lambda_truncated(const TentSource& src, const Measure& mu, double v, double t, double s,
                        int n_max) {
    if (!(v >= 0.0 && v < 1.0)) throw std::invalid_argument("lambda_truncated: need 0 <= v < 1");
    if (n_max < 0 || n_max > 22)
        throw std::invalid_argument("lambda_truncated: n_max must lie in [0, 22]");
    std::vector<CompensatedSum> per_depth(n_max + 1);
    IntervalState root{0.0, 1.0, 0.0, 0.0, false};
    lambda_visit(src, mu, root, 0, n_max, 1.0, t, s, per_depth);
    CompensatedSum total;
    total.add(1.0);  // empty word
    double vp = 1.0;
    for (int d = 1; d <= n_max; ++d) {
        vp *= v;
        total.add(vp * per_depth[d].value());
    }
    return total.value();
}

WeightRatioReport weight_ratio(const WeightProfile& profile, double block_entropy) {
    WeightRatioReport rep;
    for (std::size_t i = 0; i < profile.depths.size(); ++i) {
        if (!(profile.nbar[i] > 0.0)) {
            rep.ratio.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        rep.ratio.push_back(profile.m[i] / (block_entropy * profile.nbar[i]));
    }
    std::size_t n = rep.ratio.size();
    std::size_t q0 = (3 * n) / 4;
    double acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = q0; i < n; ++i) {
        if (std::isnan(rep.ratio[i])) continue;
        acc += std::abs(rep.ratio[i] - 1.0);
        ++cnt;
    }
    rep.trend_last_quartile = cnt ? acc / double(cnt) : 0.0;
    return rep;
}

}  // namespace zeroent
