#pragma once

#include "zeroent/blocksys.hpp"
#include "zeroent/measure.hpp"
#include "zeroent/source.hpp"
#include "zeroent/wtd.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace zeroent {

struct GfEvaluation {
    double v = 0.0;
    double value = 0.0;
    std::uint64_t truncation_n = 0;
    double tail_bound = 0.0;  // 0 when no law was supplied
};

/// Partial sum of sum coeffs[n] v^n; with a (decreasing) law the tail is
/// bounded by law(N) v^{N+1}/(1-v).
GfEvaluation gf_eval(std::span<const double> coeffs, double v,
                     const AsymptoticLaw* law = nullptr);

struct RoundTripPoint {
    double x;      // v or n
    double ratio;  // quantity that should tend to 1
};

struct RoundTripReport {
    std::vector<RoundTripPoint> abelian;    // Q(v) (1-v)^rho / U(1/(1-v)) along v_list
    std::vector<RoundTripPoint> tauberian;  // Q_n Gamma(rho+1) / (n^rho U(n)) along n_list
};

/// Abelian/Tauberian round trip for the log-power law q(n) = K n^-beta (log n)^delta
/// with rho = 1 - beta and U(n) = Gamma(1-beta) K (log n)^delta for beta < 1
/// (U(n) = K (log n)^{delta+1}/(delta+1) at beta = 1). Rejects laws outside
/// Gamma_Q, except the degenerate constant head (beta, delta) = (0, 0).
RoundTripReport abelian_tauberian_roundtrip(const AsymptoticLaw& law,
                                            std::span<const double> v_list,
                                            std::span<const std::uint64_t> n_list);

/// Vtilde_n = n^{beta-1} sum_{k<n} V_k k^-beta, evaluated at the requested
/// points in one pass. The k = 0 term enters only for beta = 0 (as V_0).
std::vector<double> sv_partial_sum_transform(const std::function<double(std::uint64_t)>& V,
                                             double beta,
                                             std::span<const std::uint64_t> points);

struct RenewalPoint {
    double v;
    double product;
    double deviation;  // |product/D - 1|
    double stderr_product;
};

struct RenewalReport {
    std::vector<RenewalPoint> points;
    double D = 0.0;  // phi(0)/psi(0)
};

/// Renewal product (sum_{k>=1} mu[T^-k J] v^k)(1 - sum_{k>=1} r_mu(k) v^k)
/// against D_mu = phi(0)/psi(0). Occupation probabilities are MC frequencies
/// of symbol one at position k+1, one trajectory serving all k up to the
/// cutoff v^k < 1e-12; r comes exact from the wtd module.
RenewalReport renewal_check(const TentSource& src, const Measure& mu, double psi_at_zero,
                            std::span<const double> v_list, std::uint64_t mc_samples,
                            std::uint64_t seed, int threads = 0);

/// (gamma, delta) -> (beta_Q, delta_Q) = (1/gamma, -delta/gamma) on Gamma_S.
std::pair<double, double> map_s_to_q(double gamma, double delta);

/// (beta_Q, delta_Q) -> (beta_M, delta_M) on Gamma_Q:
/// beta_M = beta_Q; delta_M = -delta_Q for beta < 1, -(delta_Q + 1) at beta = 1.
std::pair<double, double> map_q_to_m(double beta_q, double delta_q);

/// Inverse of (Q->M) o (S->Q) on Gamma_M* = (]0,1[ x R) u ({1} x ]-inf,-1]):
/// gamma = 1/beta_M; delta = delta_M/beta_M for beta_M < 1, delta_M + 1 at
/// beta_M = 1. Rejects beta_M = 0 and (beta_M = 1, delta_M > -1), which no
/// source of this family reaches.
std::pair<double, double> map_m_to_s(double beta_m, double delta_m);

/// Predicted Shannon-weight curve for an infinite-E_nu[W] source with wtd law
/// (K_nu, beta, delta) and block entropy E_B.
std::function<double(double)> predicted_weights(const AsymptoticLaw& law_q_nu, double e_block);

/// Finite-E_nu[W] case: m(n) = (E_B / E_nu[W]) n.
std::function<double(double)> predicted_weights_finite(double e_w, double e_block);

struct SynthesisResult {
    double gamma = 0.0, delta = 0.0;     // DRIL parameters used
    TentSource source;
    AsymptoticLaw fitted;                // wtd law fitted on the synthesized source
    double beta_q_target = 0.0, delta_q_target = 0.0;
    double beta_error = 0.0, delta_error = 0.0;       // |fitted - target|
    double recovered_beta_m = 0.0, recovered_delta_m = 0.0;  // map_q_to_m(fitted)
};

/// Builds a source with prescribed Shannon-weight asymptotics
/// m(n) = Theta(n^beta_M (log n)^delta_M) and validates it by fitting the
/// wtd law over [n_max/100, n_max].
SynthesisResult synthesize_source(double beta_m, double delta_m,
                                  std::uint64_t n_max = 1'000'000);

}  // namespace zeroent
