#include "zeroent/source.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace zeroent {

namespace {
constexpr double kDegenerateLength = 1e-12;
constexpr double kRootTol = 1e-14;
}  // namespace

TentSource make_source(Branch a, Branch b, int grid_n) {
    TentDiagnostics diag = validate_tent(a, b, grid_n);
    if (!diag.valid) {
        std::ostringstream os;
        os << "make_source: tent validation failed:";
        for (const auto& v : diag.violations)
            os << " [" << v.inequality << " at x=" << v.x << " (" << v.value << ")]";
        throw std::invalid_argument(os.str());
    }
    TentSource src;
    src.a = std::move(a);
    src.b = std::move(b);
    src.c = diag.c;
    return src;
}

std::size_t Word::ones() const {
    std::size_t n = 0;
    for (auto b : bits) n += b;
    return n;
}

std::string Word::str() const {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) s[i] = '1';
    return s;
}

Word Word::from_string(const std::string& s) {
    Word w;
    w.bits.reserve(s.size());
    for (char ch : s) {
        if (ch != '0' && ch != '1')
            throw std::invalid_argument("Word::from_string: symbols must be 0 or 1");
        w.bits.push_back(ch == '1');
    }
    return w;
}

CylinderInterval cylinder_of_bits(const TentSource& src, std::span<const std::uint8_t> bits) {
    CylinderInterval cyl;
    cyl.lo = 0.0;
    cyl.hi = 1.0;
    cyl.log_length = 0.0;
    cyl.anchor = 0.5;
    cyl.degenerate = false;

    // Compose inverse branches right to left: I_w = h_{w_1}(...h_{w_k}([0,1])).
    for (std::size_t idx = bits.size(); idx-- > 0;) {
        const Branch& h = bits[idx] ? src.b : src.a;
        if (!cyl.degenerate) {
            double lo2, hi2;
            if (h.increasing()) {
                lo2 = h.eval(cyl.lo);
                hi2 = h.eval(cyl.hi);
            } else {
                lo2 = h.eval(cyl.hi);
                hi2 = h.eval(cyl.lo);
            }
            cyl.lo = lo2;
            cyl.hi = hi2;
            if (cyl.hi - cyl.lo < kDegenerateLength) {
                cyl.degenerate = true;
                cyl.anchor = 0.5 * (cyl.lo + cyl.hi);
                cyl.log_length = std::log(std::max(cyl.hi - cyl.lo, 5e-324));
            }
        } else {
            cyl.log_length += std::log(std::abs(h.deriv(cyl.anchor)));
            cyl.anchor = h.eval(cyl.anchor);
        }
    }
    if (!cyl.degenerate) {
        cyl.anchor = 0.5 * (cyl.lo + cyl.hi);
        cyl.log_length = (cyl.hi > cyl.lo) ? std::log(cyl.hi - cyl.lo) : 0.0;
    }
    return cyl;
}

CylinderInterval cylinder(const TentSource& src, const Word& w) {
    return cylinder_of_bits(src, std::span<const std::uint8_t>(w.bits));
}

double log_prob(const TentSource&, const Measure& mu, const CylinderInterval& cyl) {
    if (!cyl.degenerate) {
        double dm = mu.cdf(cyl.hi) - mu.cdf(cyl.lo);
        if (dm > 0.0) return std::log(dm);
        // fell victim to rounding; the tangent form is valid at this scale
    }
    return std::log(mu.density(cyl.anchor)) + cyl.log_length;
}

double log_prob(const TentSource& src, const Measure& mu, const Word& w) {
    return log_prob(src, mu, cylinder(src, w));
}

double invert_branch(const Branch& br, double y) {
    if (br.inverse) {
        double x = br.inverse(y);
        return std::min(1.0, std::max(0.0, x));
    }
    double ylo = br.increasing() ? br.at0 : br.at1;
    double yhi = br.increasing() ? br.at1 : br.at0;
    if (y < ylo - 1e-12 || y > yhi + 1e-12)
        throw std::domain_error("invert_branch: y outside branch image");

    double lo = 0.0, hi = 1.0;
    double x = 0.5;
    for (int it = 0; it < 200; ++it) {
        double f = br.eval(x) - y;
        if (std::abs(f) <= kRootTol) return x;
        bool high = br.increasing() ? (f > 0.0) : (f < 0.0);
        if (high) hi = x; else lo = x;
        double d = br.deriv(x);
        double nx = (d != 0.0) ? x - f / d : 0.5 * (lo + hi);
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (hi - lo < 1e-16) return 0.5 * (lo + hi);
        x = nx;
    }
    std::ostringstream os;
    os << "invert_branch: no convergence at y=" << y;
    throw std::runtime_error(os.str());
}

Word encode(const TentSource& src, double x, int n) {
    Word w;
    w.bits.reserve(n);
    for (int k = 0; k < n; ++k) {
        bool one = x > src.c;  // ties (x == c) take symbol 0
        w.bits.push_back(one);
        x = one ? invert_branch(src.b, x) : invert_branch(src.a, x);
    }
    return w;
}

double sample(const Measure& mu, double u) {
    if (u < 0.0 || u > 1.0) throw std::domain_error("sample: u outside [0,1]");
    return mu.inverse_cdf(u);
}

std::function<double(double)> forward_map(const TentSource& src) {
    // Bind copies of the branches so the callable owns what it needs.
    Branch a = src.a, b = src.b;
    double c = src.c;
    if (a.inverse && b.inverse) {
        auto ai = a.inverse, bi = b.inverse;
        return [ai, bi, c](double x) {
            double y = (x > c) ? bi(x) : ai(x);
            return std::min(1.0, std::max(0.0, y));
        };
    }
    return [a, b, c](double x) {
        return (x > c) ? invert_branch(b, x) : invert_branch(a, x);
    };
}

}  // namespace zeroent
