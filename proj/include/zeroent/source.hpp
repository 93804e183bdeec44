#pragma once

#include "zeroent/branch.hpp"
#include "zeroent/measure.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace zeroent {

/// A validated tent-shaped system: increasing branch a on [0,c], decreasing
/// branch b on [c,1], c = a(1) = b(1). Immutable after construction.
struct TentSource {
    Branch a;
    Branch b;
    double c = 0.5;
};

/// Builds a TentSource, running validate_tent and throwing on any violation.
TentSource make_source(Branch a, Branch b, int grid_n = 4096);

struct Word {
    std::vector<std::uint8_t> bits;  // 0/1 symbols

    std::size_t size() const { return bits.size(); }
    std::size_t ones() const;
    std::string str() const;
    static Word from_string(const std::string& s);
};

/// Fundamental interval I_w = h_w([0,1]). Once the tracked interval drops
/// below 1e-12, endpoint subtraction has no significant digits left; the
/// composition then switches to tangent mode, propagating a single anchor
/// point and accumulating log|h'| per application. `degenerate` marks that
/// log_length (not hi-lo) is the authoritative size.
struct CylinderInterval {
    double lo = 0.0;
    double hi = 1.0;
    double log_length = 0.0;
    double anchor = 0.5;
    bool degenerate = false;
};

CylinderInterval cylinder(const TentSource& src, const Word& w);
CylinderInterval cylinder_of_bits(const TentSource& src, std::span<const std::uint8_t> bits);

/// log mu(I_w); non-degenerate cylinders use log(F(hi) - F(lo)), degenerate
/// ones the tangent form log phi(anchor) + log_length.
double log_prob(const TentSource& src, const Measure& mu, const Word& w);
double log_prob(const TentSource& src, const Measure& mu, const CylinderInterval& cyl);

/// First n symbols of the encoded trajectory of x. Symbol k is 0 iff the k-th
/// iterate is < c; points exactly on c take symbol 0 (left-closed rule).
Word encode(const TentSource& src, double x, int n);

/// Solves br(x) = y to 1e-14 via bisection-safeguarded Newton (or the
/// closed-form inverse when the branch carries one).
double invert_branch(const Branch& br, double y);

/// Inverse-CDF sampling.
double sample(const Measure& mu, double u);

/// The forward map T (A on [0,c], B on ]c,1]) as a single callable.
std::function<double(double)> forward_map(const TentSource& src);

}  // namespace zeroent
