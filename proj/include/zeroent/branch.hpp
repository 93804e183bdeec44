#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace zeroent {

enum class Monotonicity { increasing, decreasing };

/// One inverse branch of a tent-shaped interval map. Immutable after
/// construction; all members are safe for concurrent reads.
///
/// `inverse` and `displacement` are optional closed forms: `inverse` short-
/// circuits the Newton solve in invert_branch, `displacement` is u(x) =
/// x - eval(x) for increasing branches with an indifferent point, evaluated
/// without the cancellation that x - eval(x) suffers near 0.
struct Branch {
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
    Monotonicity dir = Monotonicity::increasing;
    double at0 = 0.0;  // image of 0
    double at1 = 0.0;  // image of 1
    std::function<double(double)> inverse;       // may be empty
    std::function<double(double)> displacement;  // may be empty

    bool increasing() const { return dir == Monotonicity::increasing; }
};

/// Parameters of the branch family with u'(x) = A x^gamma |log(x/2)|^delta.
/// For delta = 0 the log factor is 1, so `amplitude` doubles as the constant
/// v0; a non-constant v0 can be supplied as a function instead.
struct DrilParams {
    double gamma = 1.0;
    double delta = 0.0;
    std::optional<double> amplitude;             // default 0.99 / A_{gamma,delta}
    std::function<double(double)> v0;            // delta = 0 only
};

/// A_{gamma,delta}: the sup of x^gamma |log(x/2)|^delta over [0,1].
/// An amplitude A < 1/A_{gamma,delta} keeps u' inside [0,1].
double a_gamma_delta_bound(double gamma, double delta);

/// Membership of (gamma, delta) in Gamma_S = (]1,inf[ x R) u ({1} x ]-inf,0]).
bool gamma_s_contains(double gamma, double delta);

/// Branch a(x) = x - u(x) with an indifferent fixed point at 0.
/// u is closed-form for nonnegative integer delta (power times a polynomial in
/// |log(x/2)|), and adaptive quadrature with a series head below x = 1e-6
/// otherwise.
Branch make_dril_a(const DrilParams& params);

/// The Farey branches x/(1+x) and 1/(1+x), with closed-form inverses.
Branch farey_a();
Branch farey_b();

Branch make_b_farey();
Branch make_b_linear(double c);
Branch make_b_custom(std::function<double(double)> fn, std::function<double(double)> deriv);

struct TentViolation {
    std::string inequality;  // the failed condition, e.g. "a'(x) < 1"
    double x;                // grid point where it failed
    double value;
};

enum class DriClass { strong, weak };  // |b'(0)| < 1 vs b'(0) = -1

struct TentDiagnostics {
    bool valid = false;
    std::vector<TentViolation> violations;
    DriClass dri_class = DriClass::strong;
    double c = 0.0;  // a(1) = b(1)
};

/// Grid checks of the tent-shape inequalities: a increasing with a' in ]0,1]
/// and a' < 1 away from 0, b decreasing with b' in [-1,0[, and a(1) = b(1).
TentDiagnostics validate_tent(const Branch& a, const Branch& b, int grid_n = 4096);

}  // namespace zeroent
