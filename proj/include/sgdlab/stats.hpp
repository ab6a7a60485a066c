#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sgdlab {

// Streaming mean/variance (Welford), mergeable in a fixed order so that
// block-parallel reductions reproduce the serial result bit for bit.
struct MeanVar {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x)
    {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const MeanVar& o)
    {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double d = o.mean - mean;
        const std::int64_t nt = n + o.n;
        mean += d * static_cast<double>(o.n) / static_cast<double>(nt);
        m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / static_cast<double>(nt);
        n = nt;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }

    double std_error() const
    {
        return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double slope_ci95 = 0.0; // half-width, t-distribution on residuals
    int n = 0;
};

// Ordinary least squares y ~ intercept + slope * x.
LineFit ols_line(std::span<const double> x, std::span<const double> y);

// Two-regressor fit ln r = c + p*ln t - rate*t, the decay model  r ~ t^p e^{-rate t}.
// Returns the fitted rate (positive means decay).
double fit_decay_rate(std::span<const double> t, std::span<const double> r);

// Kolmogorov-Smirnov distance between an empirical sample and Uniform[0,1].
double ks_distance_uniform01(std::vector<double> samples);

// Runs body(block) for block = 0..n_blocks-1 on `threads` workers
// (0 = hardware concurrency). Bodies must write to disjoint state.
void parallel_blocks(std::int64_t n_blocks, int threads, const std::function<void(std::int64_t)>& body);

inline double median_of(std::vector<double> v)
{
    if (v.empty()) throw std::invalid_argument("median of empty set");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace sgdlab
