#include "zeroent/measure.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace zeroent {

Measure uniform_measure() {
    Measure m;
    m.density = [](double) { return 1.0; };
    m.cdf = [](double x) { return x; };
    m.inverse_cdf = [](double u) { return u; };
    m.phi_at_zero = 1.0;
    m.tag = "uniform";
    return m;
}

Measure lin_measure() {
    Measure m;
    m.density = [](double x) { return 0.5 * (1.0 + 2.0 * x); };
    m.cdf = [](double x) { return 0.5 * (x + x * x); };
    m.inverse_cdf = [](double u) { return 0.5 * (std::sqrt(1.0 + 8.0 * u) - 1.0); };
    m.phi_at_zero = 0.5;
    m.tag = "lin";
    return m;
}

Measure exp_measure() {
    // F(x) = C (x + 1 - (1+x) e^{-x}); C normalizes F(1) = 1.
    const double C = std::exp(1.0) / (2.0 * (std::exp(1.0) - 1.0));
    Measure m;
    m.density = [C](double x) { return C * (1.0 + x * std::exp(-x)); };
    m.cdf = [C](double x) { return C * (x + 1.0 - (1.0 + x) * std::exp(-x)); };
    m.inverse_cdf = [C, cdf = m.cdf, density = m.density](double u) {
        // Newton with bisection bracket; F' = phi >= C > 0 keeps it tame.
        double lo = 0.0, hi = 1.0, x = u;
        for (int it = 0; it < 100; ++it) {
            double f = cdf(x) - u;
            if (f > 0.0) hi = x; else lo = x;
            double step = f / density(x);
            double nx = x - step;
            if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
            if (std::abs(nx - x) < 1e-15) return nx;
            x = nx;
        }
        return x;
    };
    m.phi_at_zero = C;
    m.tag = "exp";
    return m;
}

Measure custom_measure(std::function<double(double)> density, std::function<double(double)> cdf,
                       std::function<double(double)> inverse_cdf, std::string tag) {
    Measure m;
    m.density = std::move(density);
    m.cdf = std::move(cdf);
    m.inverse_cdf = std::move(inverse_cdf);
    m.phi_at_zero = m.density(0.0);
    m.tag = std::move(tag);
    return m;
}

bool validate_measure(const Measure& mu, int grid_n, std::string* why) {
    auto report = [&why](const std::string& s) {
        if (why) *why = s;
        return false;
    };
    if (std::abs(mu.cdf(0.0)) > 1e-12) return report("F(0) != 0");
    if (std::abs(mu.cdf(1.0) - 1.0) > 1e-12) return report("F(1) != 1");
    double prev = 0.0;
    const double h = 1e-5;
    for (int i = 0; i <= grid_n; ++i) {
        double x = double(i) / grid_n;
        if (!(mu.density(x) > 0.0)) return report("density not strictly positive");
        double F = mu.cdf(x);
        if (i > 0 && !(F > prev)) return report("F not strictly increasing");
        prev = F;
        if (x > h && x < 1.0 - h) {
            double fd = (mu.cdf(x + h) - mu.cdf(x - h)) / (2.0 * h);
            if (std::abs(fd - mu.density(x)) > 1e-6) {
                std::ostringstream os;
                os << "F' differs from density at x=" << x;
                return report(os.str());
            }
        }
    }
    return true;
}

}  // namespace zeroent
