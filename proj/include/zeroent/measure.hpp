#pragma once

#include <functional>
#include <string>

namespace zeroent {

/// A probability measure on [0,1] with a strictly positive C^1 density,
/// given by the (density, cdf, inverse cdf) triple. Immutable.
struct Measure {
    std::function<double(double)> density;
    std::function<double(double)> cdf;
    std::function<double(double)> inverse_cdf;
    double phi_at_zero = 1.0;
    std::string tag = "custom";
};

Measure uniform_measure();

/// phi(x) = (1 + 2x)/2, F(x) = (x + x^2)/2.
Measure lin_measure();

/// phi(x) = C (1 + x e^{-x}) with C = e/(2(e-1)) so that F(1) = 1.
Measure exp_measure();

Measure custom_measure(std::function<double(double)> density,
                       std::function<double(double)> cdf,
                       std::function<double(double)> inverse_cdf,
                       std::string tag = "custom");

/// Sanity checks of the Measure invariants on a grid: F(0)=0, F(1)=1,
/// F strictly increasing, F' matches the density, density > 0.
bool validate_measure(const Measure& mu, int grid_n = 1024, std::string* why = nullptr);

}  // namespace zeroent
