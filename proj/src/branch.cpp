#include "zeroent/branch.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace zeroent {

namespace {

constexpr double kHeadSplit = 1e-6;  // below this, quadrature switches to the series head

// L(x) = |log(x/2)| = log(2/x) for x in ]0, 2[.
double big_l(double x) { return std::log(2.0 / x); }

// Head of int_0^h t^g L(t)^d dt by repeated integration by parts:
//   I_d(h) = h^{g+1}/(g+1) [ L^d + d/(g+1) L^{d-1} + d(d-1)/(g+1)^2 L^{d-2} + ... ]
// The series is asymptotic; at h <= 1e-6 (L >= 14.5) terms shrink far below
// 1e-16 relative before the factorial growth turns around.
double head_integral(double h, double g, double d) {
    if (h <= 0.0) return 0.0;
    double L = big_l(h);
    double sum = 0.0, coeff = 1.0, prev = std::abs(std::pow(L, d));
    for (int j = 0; j < 64; ++j) {
        double term = coeff * std::pow(L, d - j);
        if (j > 0 && std::abs(term) > prev) break;  // asymptotic turnaround
        sum += term;
        prev = std::abs(term);
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        coeff *= (d - j) / ((g + 1.0) * L);
    }
    return std::pow(h, g + 1.0) / (g + 1.0) * sum;
}

// u(x) = A int_0^x t^g |log(t/2)|^d dt for real d, via the series head plus
// adaptive Gauss-Kronrod on [head, x] at relative tolerance 1e-12.
double u_quadrature(double x, double g, double d, double A) {
    if (x <= 0.0) return 0.0;
    double head = std::min(x, kHeadSplit);
    double total = head_integral(head, g, d);
    if (x > head) {
        auto f = [g, d](double t) { return std::pow(t, g) * std::pow(big_l(t), d); };
        double err = 0.0;
        double tail = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            f, head, x, 12, 1e-12, &err);
        // boost reports an absolute error estimate; anything below 1e-16 is
        // invisible next to x - u(x) for x >= the head split
        if (!(err <= 1e-9 * std::abs(tail) + 1e-16)) {
            std::ostringstream os;
            os << "make_dril_a: quadrature for u did not converge (err=" << err
               << " at x=" << x << ")";
            throw std::runtime_error(os.str());
        }
        total += tail;
    }
    return A * total;
}

// Closed form for nonnegative integer delta: u = A x^{g+1} P_delta(L) with
//   I_k = x^{g+1}/(g+1) L^k + k/(g+1) I_{k-1},  I_0 = x^{g+1}/(g+1).
double u_closed_integer(double x, double g, int d, double A) {
    if (x <= 0.0) return 0.0;
    double L = big_l(x);
    double pref = std::pow(x, g + 1.0) / (g + 1.0);
    double acc = pref;  // I_0
    for (int k = 1; k <= d; ++k) acc = pref * std::pow(L, k) + k / (g + 1.0) * acc;
    return A * acc;
}

bool is_nonneg_integer(double d) {
    return d >= 0.0 && d == std::floor(d) && d <= 64.0;
}

}  // namespace

double a_gamma_delta_bound(double gamma, double delta) {
    if (!(gamma > 0.0)) throw std::invalid_argument("a_gamma_delta_bound: gamma must be > 0");
    if (delta == 0.0)
        throw std::invalid_argument("a_gamma_delta_bound: delta = 0 uses V0 directly");
    if (delta >= std::log(2.0) * gamma)
        return std::pow(2.0, gamma) * std::exp(-delta) * std::pow(delta / gamma, delta);
    return std::pow(std::log(2.0), delta);
}

bool gamma_s_contains(double gamma, double delta) {
    return gamma > 1.0 || (gamma == 1.0 && delta <= 0.0);
}

Branch make_dril_a(const DrilParams& params) {
    const double g = params.gamma;
    const double d = params.delta;
    if (!gamma_s_contains(g, d)) {
        std::ostringstream os;
        os << "make_dril_a: (gamma, delta) = (" << g << ", " << d
           << ") outside Gamma_S = (]1,inf[ x R) u ({1} x ]-inf,0])";
        throw std::invalid_argument(os.str());
    }

    std::function<double(double)> u, uprime;

    if (params.v0) {
        if (d != 0.0)
            throw std::invalid_argument("make_dril_a: v0 function is only valid for delta = 0");
        auto v0 = params.v0;
        uprime = [g, v0](double x) { return std::pow(x, g) * v0(x); };
        u = [g, v0](double x) {
            if (x <= 0.0) return 0.0;
            auto f = [g, v0](double t) { return std::pow(t, g) * v0(t); };
            double head = std::min(x, kHeadSplit);
            // v0 is C^1 near 0, so the head is v0(0) x^{g+1}/(g+1) to ~1e-13.
            double total = v0(0.0) * std::pow(head, g + 1.0) / (g + 1.0);
            if (x > head) {
                double err = 0.0;
                total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                    f, head, x, 12, 1e-12, &err);
            }
            return total;
        };
    } else {
        double bound = (d == 0.0) ? 1.0 : a_gamma_delta_bound(g, d);
        double A = params.amplitude ? *params.amplitude : 0.99 / bound;
        if (!(A > 0.0)) throw std::invalid_argument("make_dril_a: amplitude must be > 0");
        if (A * bound > 1.0 + 1e-12)
            throw std::invalid_argument(
                "make_dril_a: amplitude too large, u' would leave [0,1] (need A < 1/A_{gamma,delta})");
        if (d == 0.0) {
            uprime = [g, A](double x) { return A * std::pow(x, g); };
            u = [g, A](double x) { return x <= 0.0 ? 0.0 : A * std::pow(x, g + 1.0) / (g + 1.0); };
        } else {
            uprime = [g, d, A](double x) {
                return x <= 0.0 ? 0.0 : A * std::pow(x, g) * std::pow(big_l(x), d);
            };
            if (is_nonneg_integer(d)) {
                int di = static_cast<int>(d);
                u = [g, di, A](double x) { return u_closed_integer(x, g, di, A); };
            } else {
                u = [g, d, A](double x) { return u_quadrature(x, g, d, A); };
            }
        }
    }

    Branch a;
    a.eval = [u](double x) { return x - u(x); };
    a.deriv = [uprime](double x) { return 1.0 - uprime(x); };
    a.displacement = u;
    a.dir = Monotonicity::increasing;
    a.at0 = 0.0;
    a.at1 = a.eval(1.0);
    return a;
}

Branch farey_a() {
    Branch a;
    a.eval = [](double x) { return x / (1.0 + x); };
    a.deriv = [](double x) { double t = 1.0 + x; return 1.0 / (t * t); };
    a.displacement = [](double x) { return x * x / (1.0 + x); };
    a.inverse = [](double y) { return y / (1.0 - y); };
    a.dir = Monotonicity::increasing;
    a.at0 = 0.0;
    a.at1 = 0.5;
    return a;
}

Branch farey_b() {
    Branch b;
    b.eval = [](double x) { return 1.0 / (1.0 + x); };
    b.deriv = [](double x) { double t = 1.0 + x; return -1.0 / (t * t); };
    b.inverse = [](double y) { return 1.0 / y - 1.0; };
    b.dir = Monotonicity::decreasing;
    b.at0 = 1.0;
    b.at1 = 0.5;
    return b;
}

Branch make_b_farey() { return farey_b(); }

Branch make_b_linear(double c) {
    if (!(c > 0.0 && c < 1.0))
        throw std::invalid_argument("make_b_linear: c must lie in ]0,1[");
    Branch b;
    b.eval = [c](double x) { return 1.0 - (1.0 - c) * x; };
    b.deriv = [c](double) { return -(1.0 - c); };
    b.inverse = [c](double y) { return (1.0 - y) / (1.0 - c); };
    b.dir = Monotonicity::decreasing;
    b.at0 = 1.0;
    b.at1 = c;
    return b;
}

Branch make_b_custom(std::function<double(double)> fn, std::function<double(double)> deriv) {
    Branch b;
    b.eval = std::move(fn);
    b.deriv = std::move(deriv);
    b.dir = Monotonicity::decreasing;
    b.at0 = b.eval(0.0);
    b.at1 = b.eval(1.0);
    const int grid = 4096;
    for (int i = 0; i <= grid; ++i) {
        double x = double(i) / grid;
        double dp = b.deriv(x);
        if (!(dp >= -1.0 && dp < 0.0)) {
            std::ostringstream os;
            os << "make_b_custom: b'(" << x << ") = " << dp << " violates -1 <= b' < 0";
            throw std::invalid_argument(os.str());
        }
    }
    return b;
}

TentDiagnostics validate_tent(const Branch& a, const Branch& b, int grid_n) {
    TentDiagnostics diag;
    auto fail = [&diag](const char* ineq, double x, double v) {
        diag.violations.push_back({ineq, x, v});
    };

    double a1 = a.eval(1.0), b1 = b.eval(1.0);
    diag.c = a1;
    if (std::abs(a1 - b1) > 1e-12) fail("a(1) = b(1)", 1.0, a1 - b1);
    if (!(a1 > 0.0 && a1 < 1.0)) fail("c in ]0,1[", 1.0, a1);
    if (std::abs(a.eval(0.0)) > 1e-12) fail("a(0) = 0", 0.0, a.eval(0.0));
    if (std::abs(b.eval(0.0) - 1.0) > 1e-12) fail("b(0) = 1", 0.0, b.eval(0.0));

    double prev_a = a.eval(0.0), prev_b = b.eval(0.0);
    for (int i = 0; i <= grid_n; ++i) {
        double x = double(i) / grid_n;
        double av = a.eval(x), bv = b.eval(x);
        double ad = a.deriv(x), bd = b.deriv(x);
        if (av < -1e-15 || av > 1.0 + 1e-15) fail("a(x) in [0,1]", x, av);
        if (bv < -1e-15 || bv > 1.0 + 1e-15) fail("b(x) in [0,1]", x, bv);
        if (!(ad > 0.0)) fail("a'(x) > 0", x, ad);
        if (ad > 1.0) fail("a'(x) <= 1", x, ad);
        if (x > 0.0 && !(ad < 1.0)) fail("a'(x) < 1 for x > 0", x, ad);
        if (!(bd < 0.0)) fail("b'(x) < 0", x, bd);
        if (bd < -1.0) fail("b'(x) >= -1", x, bd);
        if (i > 0) {
            if (!(av > prev_a)) fail("a increasing", x, av - prev_a);
            if (!(bv < prev_b)) fail("b decreasing", x, bv - prev_b);
        }
        prev_a = av;
        prev_b = bv;
    }

    diag.dri_class =
        (std::abs(b.deriv(0.0) + 1.0) <= 1e-9) ? DriClass::weak : DriClass::strong;
    diag.valid = diag.violations.empty();
    return diag;
}

}  // namespace zeroent
