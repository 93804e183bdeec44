#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace zeroent {

/// Neumaier-compensated accumulator. The per-depth mass and weight sums add
/// up to 2^26 terms; plain double summation would eat the 1e-12 identity
/// tolerances, compensation keeps them at a few ulp.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ZEROENT_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Splits [0, n) into fixed-size blocks and runs fn(block_index, lo, hi) on a
/// small thread pool. Blocks are fixed so per-block results (stored by block
/// index and merged in order) do not depend on the thread count.
inline void parallel_blocks(std::uint64_t n, std::uint64_t block_size, int threads,
                            const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn) {
    if (n == 0) return;
    std::uint64_t nblocks = (n + block_size - 1) / block_size;
    int nthreads = std::min<std::uint64_t>(resolve_threads(threads), nblocks);
    if (nthreads <= 1) {
        for (std::uint64_t b = 0; b < nblocks; ++b)
            fn(b, b * block_size, std::min(n, (b + 1) * block_size));
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::uint64_t> next{0};
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&fn, &next, nblocks, block_size, n]() {
            for (;;) {
                std::uint64_t b = next.fetch_add(1);
                if (b >= nblocks) break;
                fn(b, b * block_size, std::min(n, (b + 1) * block_size));
            }
        });
    }
    for (auto& th : pool) th.join();
}

inline std::uint64_t block_count(std::uint64_t n, std::uint64_t block_size) {
    return (n + block_size - 1) / block_size;
}

/// Least-squares fit y ~ c0 + c1*x1 + c2*x2 via the 3x3 normal equations.
struct Fit3 {
    double c0, c1, c2;
    double rms_residual;
};

inline Fit3 fit3(const std::vector<double>& x1, const std::vector<double>& x2,
                 const std::vector<double>& y) {
    const std::size_t n = y.size();
    if (n < 3 || x1.size() != n || x2.size() != n)
        throw std::invalid_argument("fit3: need at least 3 consistent points");
    double s[3][3] = {{0}}, b[3] = {0};
    for (std::size_t i = 0; i < n; ++i) {
        double r[3] = {1.0, x1[i], x2[i]};
        for (int a = 0; a < 3; ++a) {
            b[a] += r[a] * y[i];
            for (int c = 0; c < 3; ++c) s[a][c] += r[a] * r[c];
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 system.
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(s[idx[r]][col]) > std::abs(s[idx[piv]][col])) piv = r;
        std::swap(idx[col], idx[piv]);
        double d = s[idx[col]][col];
        if (d == 0.0) throw std::runtime_error("fit3: singular normal equations");
        for (int r = col + 1; r < 3; ++r) {
            double f = s[idx[r]][col] / d;
            for (int c = col; c < 3; ++c) s[idx[r]][c] -= f * s[idx[col]][c];
            b[idx[r]] -= f * b[idx[col]];
        }
    }
    double c[3];
    for (int col = 2; col >= 0; --col) {
        double acc = b[idx[col]];
        for (int c2 = col + 1; c2 < 3; ++c2) acc -= s[idx[col]][c2] * c[c2];
        c[col] = acc / s[idx[col]][col];
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - (c[0] + c[1] * x1[i] + c[2] * x2[i]);
        ss += e * e;
    }
    return Fit3{c[0], c[1], c[2], std::sqrt(ss / n)};
}

/// ~count geometrically spaced integers in [lo, hi], deduplicated.
inline std::vector<std::uint64_t> geometric_indices(std::uint64_t lo, std::uint64_t hi,
                                                    std::size_t count) {
    if (lo < 1) lo = 1;
    if (hi < lo) throw std::invalid_argument("geometric_indices: hi < lo");
    std::vector<std::uint64_t> out;
    double ratio = (count > 1) ? std::pow(double(hi) / double(lo), 1.0 / double(count - 1)) : 2.0;
    double x = double(lo);
    for (std::size_t k = 0; k < count; ++k) {
        auto n = static_cast<std::uint64_t>(std::llround(x));
        if (out.empty() || n > out.back()) out.push_back(std::min(n, hi));
        x *= ratio;
    }
    if (out.back() != hi) out.push_back(hi);
    return out;
}

}  // namespace zeroent
