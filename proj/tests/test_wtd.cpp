#include "zeroent/wtd.hpp"

#include "zeroent/source.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace zeroent;

TEST_CASE("wtd_uniform: Farey closed form 1/(n+1)") {
    Branch a = farey_a();
    WtdSequence q = wtd_uniform(a, 10'000);
    CHECK(q.dense[0] == 1.0);
    for (std::uint64_t n : {1ull, 10ull, 500ull, 10'000ull}) {
        double ref = 1.0 / double(n + 1);
        CHECK(std::abs(q.at(n) - ref) / ref < 1e-10);
    }
    WtdSequence q0 = wtd_uniform(a, 0);
    CHECK(q0.at(0) == 1.0);
}

TEST_CASE("wtd_uniform: DRIL(2,0) with constant v0 against the 50-digit oracle") {
    DrilParams p;
    p.gamma = 2.0;
    p.delta = 0.0;
    p.amplitude = 0.9;  // u'(x) = 0.9 x^2
    Branch a = make_dril_a(p);
    WtdSequence q = wtd_uniform(a, 10);
    // mpmath, 50 digits: q(10) = 0.3510603413783918678020128...
    CHECK(q.at(10) == doctest::Approx(0.35106034137839186780).epsilon(1e-12));
}

TEST_CASE("wtd_uniform: strict decrease and the recurrence identity") {
    DrilParams p;
    p.gamma = 2.0;
    p.delta = 2.0;
    Branch a = make_dril_a(p);
    WtdSequence q = wtd_uniform(a, 20'000);
    auto v = [&a](double x) { return a.displacement(x) / x; };
    for (std::uint64_t n = 0; n + 1 <= 20'000; ++n) {
        double qn = q.dense[n], qn1 = q.dense[n + 1];
        REQUIRE(qn1 < qn);
        REQUIRE(std::abs(qn1 - qn * (1.0 - v(qn))) <= 1e-14 * qn);
    }
}

TEST_CASE("wtd_uniform: r(n) positive and mass split exact") {
    Branch a = farey_a();
    WtdSequence q = wtd_uniform(a, 4096);
    double acc = 0.0;
    for (std::uint64_t n = 1; n <= 4096; ++n) {
        double r = q.r(n);
        CHECK(r > 0.0);
        acc += r;
    }
    CHECK(std::abs(acc + q.at(4096) - 1.0) < 1e-10);
}

TEST_CASE("wtd_uniform: checkpoint storage beyond the dense limit") {
    Branch a = farey_a();
    WtdOptions opts;
    opts.dense_limit = 1024;
    WtdSequence q = wtd_uniform(a, 100'000, opts);
    CHECK(q.dense.size() == 1025);
    CHECK(!q.checkpoints.empty());
    CHECK(q.has(100'000));
    double ref = 1.0 / 100'001.0;
    CHECK(std::abs(q.at(100'000) - ref) / ref < 1e-9);
    auto pts = q.sample_points(100, 100'000, 64);
    CHECK(pts.size() >= 32);
}

TEST_CASE("wtd_pushforward: identity, lin closed form, tag guard") {
    Branch a = farey_a();
    WtdSequence q = wtd_uniform(a, 256);
    WtdSequence qu = wtd_pushforward(q, [](double x) { return x; });
    for (std::uint64_t n = 0; n <= 256; ++n) CHECK(qu.at(n) == q.at(n));
    Measure lin = lin_measure();
    WtdSequence ql = wtd_pushforward(q, lin.cdf);
    for (std::uint64_t n = 0; n <= 256; ++n) {
        double qq = q.at(n);
        CHECK(ql.at(n) == doctest::Approx(0.5 * (qq + qq * qq)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(wtd_pushforward(ql, lin.cdf), std::invalid_argument);
}

TEST_CASE("fit_law: exact synthetic law is recovered to regression precision") {
    WtdSequence q;
    q.tag = MeasureTag::uniform;
    q.n_max = 1u << 16;
    q.dense.resize((1u << 16) + 1);
    for (std::size_t n = 0; n < q.dense.size(); ++n)
        q.dense[n] = n == 0 ? 1.0 : std::pow(double(n), -0.5);
    AsymptoticLaw law = fit_law(q, 16, 1u << 16);
    CHECK(law.K == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(law.beta == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::abs(law.delta) < 1e-6);
    CHECK_THROWS_AS(fit_law(q, 8, 1024), std::invalid_argument);
}

TEST_CASE("fit_law: Farey over [1e3, 1e6]") {
    WtdSequence q = wtd_uniform(farey_a(), 1'000'000);
    AsymptoticLaw law = fit_law(q, 1'000, 1'000'000);
    CHECK(law.beta > 0.99);
    CHECK(law.beta < 1.01);
    CHECK(std::abs(law.delta) < 0.05);
}

TEST_CASE("fit_law: DRIL(2,2) exponents over [1e5, 1e7]") {
    DrilParams p;
    p.gamma = 2.0;
    p.delta = 2.0;
    WtdSequence q = wtd_uniform(make_dril_a(p), 10'000'000);
    AsymptoticLaw law = fit_law(q, 100'000, 10'000'000);
    CHECK(std::abs(law.beta - 0.5) < 0.02);
    CHECK(std::abs(law.delta - (-1.0)) < 0.3);
}

TEST_CASE("check_v_asymptotic: Farey deviation is exactly 2/(n+2)") {
    TentSource src = make_source(farey_a(), farey_b());
    WtdSequence q = wtd_uniform(src.a, 100'000);
    auto rep = check_v_asymptotic(src, q, 1.0, 1, 100'000);
    CHECK(rep.decreasing);
    for (const auto& pt : rep.curve) {
        double expect = 2.0 / double(pt.n + 2);
        CHECK(std::abs(pt.deviation - expect) < 1e-9);
    }
    auto at4 = check_v_asymptotic(src, q, 1.0, 10'000, 10'000);
    CHECK(at4.deviation_at_n_hi == doctest::Approx(2.0 / 10'002.0).epsilon(1e-6));
}

TEST_CASE("check_v_asymptotic: DRIL(1.4, 1) trend at 1e6") {
    DrilParams p;
    p.gamma = 1.4;
    p.delta = 1.0;
    Branch a = make_dril_a(p);
    TentSource src = make_source(a, make_b_linear(a.at1));
    WtdSequence q = wtd_uniform(src.a, 1'000'000);
    auto rep = check_v_asymptotic(src, q, 1.4, 1'000, 1'000'000);
    CHECK(rep.decreasing);
    // O(1/log n) convergence: the measured value is 0.0645 at n = 1e6
    // (cross-checked against an independent high-precision iteration)
    CHECK(rep.deviation_at_n_hi < 0.07);
    CHECK(rep.deviation_at_n_hi > 0.05);
}

TEST_CASE("wtd sandwich: eps-widened power envelopes stay bounded") {
    // q(n) ~ C n^{-1/2}/log n; the eps-slack absorbs the log factor, so the
    // ratios q(n) n^{1/(gamma +- eps)} must stay within a bounded band over
    // the computed range: the fitted constants A, A-tilde then exist.
    DrilParams p;
    p.gamma = 2.0;
    p.delta = 2.0;
    WtdSequence q = wtd_uniform(make_dril_a(p), 1'000'000);
    const double gamma = 2.0, eps = 0.1;
    double up_min = 1e300, up_max = 0.0, lo_min = 1e300, lo_max = 0.0;
    for (const auto& [n, qn] : q.sample_points(10'000, 1'000'000, 32)) {
        double ru = qn * std::pow(double(n), 1.0 / (gamma + eps));
        double rl = qn * std::pow(double(n), 1.0 / (gamma - eps));
        up_min = std::min(up_min, ru);
        up_max = std::max(up_max, ru);
        lo_min = std::min(lo_min, rl);
        lo_max = std::max(lo_max, rl);
    }
    CHECK(lo_min > 0.0);
    CHECK(up_max / up_min < 5.0);
    CHECK(lo_max / lo_min < 5.0);
    // with A = up_max and A-tilde = lo_min both inequalities hold on the range
    for (const auto& [n, qn] : q.sample_points(10'000, 1'000'000, 32)) {
        CHECK(qn <= up_max * std::pow(1.0 / double(n), 1.0 / (gamma + eps)) * (1 + 1e-12));
        CHECK(qn >= lo_min * std::pow(1.0 / double(n), 1.0 / (gamma - eps)) * (1 - 1e-12));
    }
}

TEST_CASE("AsymptoticLaw: tagged-domain membership") {
    AsymptoticLaw law;
    law.beta = 0.5;
    law.delta = -1.0;
    law.domain_tag = DomainTag::gamma_q;
    CHECK(law.in_tagged_domain());
    law.domain_tag = DomainTag::gamma_s;  // 0.5 < 1 is outside Gamma_S
    CHECK(!law.in_tagged_domain());
    law.beta = 1.0;
    law.delta = -0.5;
    law.domain_tag = DomainTag::gamma_m;
    CHECK(law.in_tagged_domain());
    law.domain_tag = DomainTag::gamma_m_star;
    CHECK(!law.in_tagged_domain());
}

TEST_CASE("gamma-set membership tables") {
    CHECK(gamma_q_contains(0.5, -3.0));
    CHECK(gamma_q_contains(1.0, 0.0));
    CHECK(!gamma_q_contains(1.0, -1.0));
    CHECK(gamma_q_contains(0.0, -0.5));
    CHECK(!gamma_q_contains(0.0, 0.5));
    CHECK(gamma_q_star_contains(1.0, 0.0));
    CHECK(!gamma_q_star_contains(1.0, -0.5));
    CHECK(gamma_m_contains(1.0, -0.5));
    CHECK(!gamma_m_contains(1.0, 0.5));
    CHECK(gamma_m_star_contains(0.5, 7.0));
    CHECK(gamma_m_star_contains(1.0, -1.0));
    CHECK(!gamma_m_star_contains(1.0, -0.5));
    CHECK(gamma_s_contains(1.0, -2.0));
    CHECK(!gamma_s_contains(1.0, 0.5));
    CHECK(gamma_s_contains(3.0, 5.0));
}
