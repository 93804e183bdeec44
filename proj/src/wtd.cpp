#include "zeroent/wtd.hpp"

#include "zeroent/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zeroent {

bool WtdSequence::has(std::uint64_t n) const {
    if (n < dense.size()) return true;
    auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), n,
                               [](const auto& p, std::uint64_t k) { return p.first < k; });
    return it != checkpoints.end() && it->first == n;
}

double WtdSequence::at(std::uint64_t n) const {
    if (n < dense.size()) return dense[n];
    auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), n,
                               [](const auto& p, std::uint64_t k) { return p.first < k; });
    if (it == checkpoints.end() || it->first != n)
        throw std::out_of_range("WtdSequence::at: n not stored (beyond dense limit and off-grid)");
    return it->second;
}

double WtdSequence::r(std::uint64_t n) const {
    if (n == 0 || n >= dense.size())
        throw std::out_of_range("WtdSequence::r: need 1 <= n < dense size");
    return dense[n - 1] - dense[n];
}

std::vector<std::pair<std::uint64_t, double>> WtdSequence::sample_points(
    std::uint64_t lo, std::uint64_t hi, std::size_t target) const {
    hi = std::min<std::uint64_t>(hi, n_max);
    std::vector<std::pair<std::uint64_t, double>> avail;
    for (auto idx : geometric_indices(std::max<std::uint64_t>(lo, 1), hi, target * 4)) {
        if (idx < dense.size()) {
            avail.emplace_back(idx, dense[idx]);
        } else {
            // snap to the nearest stored checkpoint
            auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), idx,
                                       [](const auto& p, std::uint64_t k) { return p.first < k; });
            if (it != checkpoints.end() && it->first <= hi)
                avail.emplace_back(it->first, it->second);
        }
    }
    std::sort(avail.begin(), avail.end());
    avail.erase(std::unique(avail.begin(), avail.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }),
                avail.end());
    if (avail.size() <= target) return avail;
    std::vector<std::pair<std::uint64_t, double>> out;
    double step = double(avail.size() - 1) / double(target - 1);
    for (std::size_t k = 0; k < target; ++k)
        out.push_back(avail[static_cast<std::size_t>(std::llround(k * step))]);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

WtdSequence wtd_uniform(const Branch& a, std::uint64_t n_max, const WtdOptions& opts) {
    if (!a.increasing()) throw std::invalid_argument("wtd_uniform: branch a must be increasing");
    WtdSequence q;
    q.tag = MeasureTag::uniform;
    q.n_max = n_max;
    std::uint64_t dense_n = std::min(n_max, opts.dense_limit);
    q.dense.reserve(dense_n + 1);

    double x = 1.0;
    q.dense.push_back(x);
    // checkpoint grid beyond the dense range: ratio 2^(1/64)
    const double ratio = std::pow(2.0, 1.0 / 64.0);
    double next_cp = double(dense_n) * ratio;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        x = a.eval(x);
        if (n <= dense_n) {
            q.dense.push_back(x);
        } else if (double(n) >= next_cp || n == n_max) {
            q.checkpoints.emplace_back(n, x);
            while (next_cp <= double(n)) next_cp *= ratio;
        }
    }
    return q;
}

WtdSequence wtd_pushforward(const WtdSequence& q_tau, const std::function<double(double)>& cdf,
                            MeasureTag tag) {
    if (q_tau.tag != MeasureTag::uniform)
        throw std::invalid_argument("wtd_pushforward: input must carry the uniform tag");
    WtdSequence out;
    out.tag = tag;
    out.n_max = q_tau.n_max;
    out.dense.reserve(q_tau.dense.size());
    for (double v : q_tau.dense) out.dense.push_back(cdf(v));
    out.checkpoints.reserve(q_tau.checkpoints.size());
    for (const auto& [n, v] : q_tau.checkpoints) out.checkpoints.emplace_back(n, cdf(v));
    return out;
}

double AsymptoticLaw::operator()(double n) const {
    if (n < 2.0) return K;
    return K * std::pow(n, -beta) * std::pow(std::log(n), delta);
}

bool gamma_q_contains(double beta, double delta) {
    if (beta > 0.0 && beta < 1.0) return true;
    if (beta == 1.0) return delta > -1.0;
    if (beta == 0.0) return delta < 0.0;
    return false;
}

bool gamma_q_star_contains(double beta, double delta) {
    if (beta > 0.0 && beta < 1.0) return true;
    if (beta == 1.0) return delta >= 0.0;
    return false;
}

bool gamma_m_contains(double beta, double delta) {
    if (beta > 0.0 && beta < 1.0) return true;
    if (beta == 1.0) return delta < 0.0;
    if (beta == 0.0) return delta > 0.0;
    return false;
}

bool gamma_m_star_contains(double beta, double delta) {
    // Image of Gamma_Q* under (Q -> M): the beta = 1 fibre maps to delta <= -1.
    if (beta > 0.0 && beta < 1.0) return true;
    if (beta == 1.0) return delta <= -1.0;
    return false;
}

bool AsymptoticLaw::in_tagged_domain() const {
    switch (domain_tag) {
        case DomainTag::gamma_q: return gamma_q_contains(beta, delta);
        case DomainTag::gamma_q_star: return gamma_q_star_contains(beta, delta);
        case DomainTag::gamma_m: return gamma_m_contains(beta, delta);
        case DomainTag::gamma_m_star: return gamma_m_star_contains(beta, delta);
        case DomainTag::gamma_s: return gamma_s_contains(beta, delta);
    }
    return false;
}

AsymptoticLaw fit_law(const WtdSequence& q, std::uint64_t n_lo, std::uint64_t n_hi) {
    if (n_lo < 16 || n_hi <= n_lo) throw std::invalid_argument("fit_law: need n_hi > n_lo >= 16");
    auto pts = q.sample_points(n_lo, n_hi, 64);
    if (pts.size() < 8) throw std::invalid_argument("fit_law: fewer than 8 sample points");
    std::vector<double> x1, x2, y;
    for (const auto& [n, qn] : pts) {
        if (!(qn > 0.0)) throw std::runtime_error("fit_law: nonpositive q(n)");
        x1.push_back(std::log(double(n)));
        x2.push_back(std::log(std::log(double(n))));
        y.push_back(std::log(qn));
    }
    Fit3 f = fit3(x1, x2, y);
    AsymptoticLaw law;
    law.K = std::exp(f.c0);
    law.beta = -f.c1;
    law.delta = f.c2;
    law.domain_tag = DomainTag::gamma_q;
    law.n_lo = n_lo;
    law.n_hi = n_hi;
    law.residual = f.rms_residual;
    return law;
}

VAsymptoticReport check_v_asymptotic(const TentSource& src, const WtdSequence& q, double gamma,
                                     std::uint64_t n_lo, std::uint64_t n_hi, std::size_t points) {
    if (n_lo < 1) n_lo = 1;
    auto v = [&src](double x) {
        if (src.a.displacement) return src.a.displacement(x) / x;
        return (x - src.a.eval(x)) / x;
    };
    VAsymptoticReport rep;
    rep.decreasing = true;
    double prev = -1.0;
    for (const auto& [n, qn] : q.sample_points(n_lo, n_hi, points)) {
        double dev = std::abs(gamma * double(n) * v(qn) - 1.0);
        rep.curve.push_back({n, dev});
        rep.max_deviation = std::max(rep.max_deviation, dev);
        if (prev >= 0.0 && dev > prev) rep.decreasing = false;
        prev = dev;
    }
    if (!rep.curve.empty()) rep.deviation_at_n_hi = rep.curve.back().deviation;
    return rep;
}

}  // namespace zeroent
