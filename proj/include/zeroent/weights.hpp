#pragma once

#include "zeroent/measure.hpp"
#include "zeroent/source.hpp"

#include <cstdint>
#include <vector>

namespace zeroent {

enum class ProfileMethod { exact, monte_carlo };

/// Shannon weights m(n) = E[-log p(w_n)] (nats) and mean ones-counts, either
/// exact by cylinder enumeration or by Monte Carlo with standard errors.
struct WeightProfile {
    std::vector<std::uint64_t> depths;
    std::vector<double> m;
    std::vector<double> nbar;
    std::vector<double> stderr_m;     // MC only, zeros for exact
    std::vector<double> stderr_nbar;  // MC only
    std::vector<double> mass;         // exact only: total cylinder mass per depth
    std::vector<double> q999_neglogp; // MC heavy-tail diagnostic per depth
    ProfileMethod method = ProfileMethod::exact;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

/// Depth-first enumeration of the cylinder tree, accumulating p|log p| and
/// p * ones at every depth <= n_max. Hard cap n_max <= 26.
WeightProfile exact_profile(const TentSource& src, const Measure& mu, int n_max);

struct McOptions {
    int threads = 0;
    bool want_quantiles = true;
};

/// Unbiased MC estimates at the requested depths. Per sample: one forward
/// encode to the maximum depth, then one right-to-left inverse-branch
/// composition per requested depth. Counter-based per-sample streams make
/// the result independent of the thread schedule.
WeightProfile mc_profile(const TentSource& src, const Measure& mu,
                         std::vector<std::uint64_t> depths, std::uint64_t samples,
                         std::uint64_t seed, const McOptions& opts = {});

/// Truncated trivariate sum Lambda(v,t,s) = sum_{|w| <= n_max} v^|w| t^n(w) p(w)^s.
/// Hard cap n_max <= 22; requires 0 <= v < 1.
double lambda_truncated(const TentSource& src, const Measure& mu, double v, double t, double s,
                        int n_max);

struct WeightRatioReport {
    std::vector<double> ratio;        // m(n) / (E_B * nbar(n)) per depth
    double trend_last_quartile = 0.0; // mean |ratio - 1| over the last quartile
};

WeightRatioReport weight_ratio(const WeightProfile& profile, double block_entropy);

}  // namespace zeroent
