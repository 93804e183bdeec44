#include "zeroent/asymptotics.hpp"

#include "zeroent/rng.hpp"
#include "zeroent/source.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace zeroent;

namespace {

const double kLog2 = std::log(2.0);

TentSource farey_source() { return make_source(farey_a(), farey_b()); }

}  // namespace

TEST_CASE("gf_eval: geometric series and tail bound") {
    std::vector<double> ones(65, 1.0);
    auto g = gf_eval(ones, 0.5);
    CHECK(g.value == doctest::Approx(2.0 - std::pow(2.0, -64.0)).epsilon(1e-15));
    AsymptoticLaw flat;
    flat.K = 1.0;
    flat.beta = 0.0;
    flat.delta = 0.0;
    auto gb = gf_eval(ones, 0.5, &flat);
    CHECK(gb.tail_bound == doctest::Approx(std::pow(0.5, 65.0) * 0.5 / 0.5).epsilon(1e-12));
    CHECK_THROWS_AS(gf_eval(ones, 1.0), std::invalid_argument);
    // monotone in v for nonnegative coefficients
    CHECK(gf_eval(ones, 0.6).value > gf_eval(ones, 0.5).value);
}

TEST_CASE("gf_eval: Farey wtd against the closed form -log(1-v)/v") {
    WtdSequence q = wtd_uniform(farey_a(), 100'000);
    std::vector<double> coeffs(q.dense.begin(), q.dense.end());
    double v = 1.0 - 1e-3;
    auto g = gf_eval(coeffs, v);
    double ref = -std::log(1.0 - v) / v;
    CHECK(std::abs(g.value - ref) / ref < 0.01);
}

TEST_CASE("gf_eval: polylog asymptotics for n^{-1/2} coefficients") {
    const std::size_t N = 10'000'000;
    std::vector<double> c(N + 1);
    c[0] = 1.0;
    for (std::size_t n = 1; n <= N; ++n) c[n] = 1.0 / std::sqrt(double(n));
    double v = 1.0 - 1e-4;
    auto g = gf_eval(c, v);
    CHECK(g.value * std::sqrt(1.0 - v) ==
          doctest::Approx(std::sqrt(M_PI)).epsilon(0.01));
}

TEST_CASE("abelian_tauberian_roundtrip: beta=1/2 law") {
    AsymptoticLaw law;
    law.K = 1.0;
    law.beta = 0.5;
    law.delta = 0.0;
    std::vector<double> vs{1.0 - 1e-4};
    std::vector<std::uint64_t> ns{1'000'000};
    auto rep = abelian_tauberian_roundtrip(law, vs, ns);
    CHECK(rep.abelian[0].ratio == doctest::Approx(1.0).epsilon(0.01));
    CHECK(rep.tauberian[0].ratio == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("abelian_tauberian_roundtrip: degenerate constant head is exact") {
    AsymptoticLaw law;
    law.K = 1.0;
    law.beta = 0.0;
    law.delta = 0.0;  // q(n) = 1: Q_n = n, Q(v) = 1/(1-v)
    std::vector<double> vs{0.5, 0.9};
    std::vector<std::uint64_t> ns{100, 10'000};
    auto rep = abelian_tauberian_roundtrip(law, vs, ns);
    for (const auto& p : rep.abelian) CHECK(p.ratio == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& p : rep.tauberian) CHECK(p.ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("abelian_tauberian_roundtrip: beta=1, delta=1 log-squared law") {
    AsymptoticLaw law;
    law.K = 1.0;
    law.beta = 1.0;
    law.delta = 1.0;  // Q_n ~ (log n)^2/2
    std::vector<double> vs{};
    std::vector<std::uint64_t> ns{10'000'000};
    auto rep = abelian_tauberian_roundtrip(law, vs, ns);
    CHECK(rep.tauberian[0].ratio == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("abelian_tauberian_roundtrip: rejects laws outside Gamma_Q") {
    AsymptoticLaw law;
    law.K = 1.0;
    law.beta = 1.0;
    law.delta = -2.0;
    std::vector<double> vs{0.9};
    std::vector<std::uint64_t> ns{100};
    CHECK_THROWS_AS(abelian_tauberian_roundtrip(law, vs, ns), std::domain_error);
}

TEST_CASE("sv_partial_sum_transform: constant and logarithmic sequences") {
    std::vector<std::uint64_t> pts{1'000'000};
    auto r = sv_partial_sum_transform([](std::uint64_t) { return 1.0; }, 0.5, pts);
    CHECK(r[0] == doctest::Approx(2.0).epsilon(0.01));

    // beta = 0 with V = 1: the k=0 convention makes Vtilde exactly 1
    auto r0 = sv_partial_sum_transform([](std::uint64_t) { return 1.0; }, 0.0, pts);
    CHECK(r0[0] == doctest::Approx(1.0).epsilon(1e-12));

    // V_k = log k from k = 2, beta = 1: Vtilde_n ~ (log n)^2 / 2
    std::vector<std::uint64_t> pts2{10'000'000};
    auto r1 = sv_partial_sum_transform(
        [](std::uint64_t k) { return k >= 2 ? std::log(double(k)) : 0.0; }, 1.0, pts2);
    double ln = std::log(1e7);
    CHECK(2.0 * r1[0] / (ln * ln) == doctest::Approx(1.0).epsilon(0.10));
}

TEST_CASE("parameter maps: spec'd values and round trips") {
    auto q1 = map_s_to_q(1.0, 0.0);
    CHECK(q1.first == 1.0);
    CHECK(q1.second == 0.0);
    auto q2 = map_s_to_q(2.0, 2.0);
    CHECK(q2.first == 0.5);
    CHECK(q2.second == -1.0);
    auto q3 = map_s_to_q(4.0, 1.0);
    CHECK(q3.first == 0.25);
    CHECK(q3.second == -0.25);
    CHECK_THROWS_AS(map_s_to_q(0.5, 1.0), std::domain_error);

    auto m1 = map_q_to_m(1.0, 0.0);
    CHECK(m1.first == 1.0);
    CHECK(m1.second == -1.0);
    auto m2 = map_q_to_m(0.5, -1.0);
    CHECK(m2.first == 0.5);
    CHECK(m2.second == 1.0);
    auto m3 = map_q_to_m(0.25, -0.25);
    CHECK(m3.first == 0.25);
    CHECK(m3.second == 0.25);
    CHECK_THROWS_AS(map_q_to_m(1.5, 0.0), std::domain_error);

    auto s1 = map_m_to_s(1.0, -1.0);  // the Farey parameters
    CHECK(s1.first == 1.0);
    CHECK(s1.second == 0.0);
    CHECK_THROWS_AS(map_m_to_s(1.0, -0.5), std::domain_error);
    CHECK_THROWS_AS(map_m_to_s(0.0, 1.0), std::domain_error);

    // round trip map_q_to_m o map_s_to_q o map_m_to_s = identity on Gamma_M*
    for (auto [bm, dm] : std::vector<std::pair<double, double>>{
             {0.5, -1.0}, {0.25, 0.25}, {1.0, -1.0}, {1.0, -2.5}, {0.7, 3.0}}) {
        auto [g, d] = map_m_to_s(bm, dm);
        auto [bq, dq] = map_s_to_q(g, d);
        auto [bm2, dm2] = map_q_to_m(bq, dq);
        CHECK(bm2 == doctest::Approx(bm).epsilon(1e-12));
        CHECK(dm2 == doctest::Approx(dm).epsilon(1e-12));
    }
}

TEST_CASE("parameter maps: image of Gamma_S under (S->Q) is Gamma_Q*") {
    std::uint64_t state = 5;
    auto rnd = [&state]() {
        state = splitmix64(state);
        return double(state >> 11) * 0x1.0p-53;
    };
    for (int i = 0; i < 1000; ++i) {
        double g, d;
        if (rnd() < 0.3) {
            g = 1.0;
            d = -4.0 * rnd();
        } else {
            g = 1.0 + 4.0 * rnd();
            d = 8.0 * (rnd() - 0.5);
        }
        REQUIRE(gamma_s_contains(g, d));
        auto [bq, dq] = map_s_to_q(g, d);
        CHECK(gamma_q_star_contains(bq, dq));
        // and back inside Gamma_M* through (Q -> M)
        auto [bm, dm] = map_q_to_m(bq, dq);
        CHECK(gamma_m_star_contains(bm, dm));
    }
}

TEST_CASE("predicted_weights: Farey constant and the beta=1/2 closed form") {
    AsymptoticLaw farey_qnu;
    farey_qnu.K = 1.0 / kLog2;  // K_nu = psi(0) * 1
    farey_qnu.beta = 1.0;
    farey_qnu.delta = 0.0;
    double eb = M_PI * M_PI / (6.0 * kLog2);
    auto pred = predicted_weights(farey_qnu, eb);
    // m(n) = (pi^2/6) n / log n
    for (double n : {100.0, 1e4})
        CHECK(pred(n) == doctest::Approx(M_PI * M_PI / 6.0 * n / std::log(n)).epsilon(1e-12));

    AsymptoticLaw half;
    half.K = 1.0;
    half.beta = 0.5;
    half.delta = 0.0;
    auto pred2 = predicted_weights(half, 1.0);
    CHECK(pred2(100.0) == doctest::Approx(2.0 * std::sqrt(100.0) / M_PI).epsilon(1e-12));

    auto fin = predicted_weights_finite(2.0, kLog2);
    CHECK(fin(10.0) == doctest::Approx(kLog2 / 2.0 * 10.0).epsilon(1e-15));
}

TEST_CASE("renewal_check: Farey uniform approaches log 2 and is seed-stable") {
    TentSource src = farey_source();
    std::vector<double> vs{0.9, 0.99};
    auto rep1 = renewal_check(src, uniform_measure(), 1.0 / kLog2, vs, 150'000, 17);
    CHECK(rep1.D == doctest::Approx(kLog2).epsilon(1e-12));
    CHECK(rep1.points.back().deviation < 0.20);
    // signed gap D - product decreases with v
    CHECK(rep1.D - rep1.points[0].product > rep1.D - rep1.points[1].product);
    auto rep2 = renewal_check(src, uniform_measure(), 1.0 / kLog2, vs, 150'000, 18);
    for (std::size_t i = 0; i < vs.size(); ++i) {
        double se = std::hypot(rep1.points[i].stderr_product, rep2.points[i].stderr_product);
        CHECK(std::abs(rep1.points[i].product - rep2.points[i].product) <= 3.0 * se);
    }
    CHECK_THROWS_AS(
        renewal_check(src, uniform_measure(), 0.0, vs, 150'000, 1), std::invalid_argument);
    CHECK_THROWS_AS(
        renewal_check(src, uniform_measure(), 1.0, vs, 50'000, 1), std::invalid_argument);
}

TEST_CASE("renewal_check: block-invariant measure gives D = 1 and a near-1 product") {
    TentSource src = farey_source();
    BlockSystem bs = make_block_system(src, 1e-6, 20'000);
    DensityEstimate psi = invariant_density(bs, 257, 1e-10);
    Measure nu = measure_from_density(psi);
    std::vector<double> vs{0.99};
    auto rep = renewal_check(src, nu, psi.at_zero(), vs, 150'000, 4);
    CHECK(rep.D == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.points[0].deviation < 0.15);
}

TEST_CASE("synthesize_source: Farey-class pair and rejections") {
    auto res = synthesize_source(1.0, -1.0, 100'000);
    CHECK(res.gamma == 1.0);
    CHECK(res.delta == 0.0);
    CHECK(std::abs(res.fitted.beta - 1.0) < 0.02);
    CHECK(std::abs(res.fitted.delta) < 0.3);
    CHECK(res.recovered_beta_m == doctest::Approx(1.0));
    CHECK(res.recovered_delta_m == doctest::Approx(-1.0).epsilon(0.31));
    CHECK_THROWS_AS(synthesize_source(0.0, 1.0, 1000), std::domain_error);
    CHECK_THROWS_AS(synthesize_source(1.0, -0.5, 1000), std::domain_error);
}
