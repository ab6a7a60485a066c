#include "sgdlab/stats.hpp"

#include <atomic>
#include <thread>

namespace sgdlab {

namespace {

// Two-sided 97.5% Student-t quantiles for small residual dof.
double t975(int dof)
{
    static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447,
                                   2.365,  2.306, 2.262, 2.228, 2.201, 2.179};
    if (dof <= 0) return 0.0;
    if (dof <= 12) return table[dof - 1];
    return 1.96 + 2.4 / static_cast<double>(dof); // adequate beyond the table
}

} // namespace

LineFit ols_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("ols_line needs >= 2 points");
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols_line: degenerate abscissae");
    LineFit fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2) {
        double ss_res = 0;
        for (int i = 0; i < n; ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            ss_res += r * r;
        }
        const double sigma2 = ss_res / (n - 2);
        fit.slope_stderr = std::sqrt(sigma2 / sxx);
        fit.slope_ci95 = t975(n - 2) * fit.slope_stderr;
    }
    return fit;
}

double fit_decay_rate(std::span<const double> t, std::span<const double> r)
{
    if (t.size() != r.size() || t.size() < 3)
        throw std::invalid_argument("fit_decay_rate needs >= 3 points");
    const int n = static_cast<int>(t.size());
    // Normal equations for ln r = c + p ln t - rate * t.
    double a[3][3] = {};
    double b[3] = {};
    for (int i = 0; i < n; ++i) {
        if (!(t[i] > 0.0) || !(r[i] > 0.0))
            throw std::invalid_argument("fit_decay_rate needs positive data");
        const double reg[3] = {1.0, std::log(t[i]), -t[i]};
        const double lr = std::log(r[i]);
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) a[j][k] += reg[j] * reg[k];
            b[j] += reg[j] * lr;
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 system.
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int rr = col + 1; rr < 3; ++rr)
            if (std::abs(a[idx[rr]][col]) > std::abs(a[idx[piv]][col])) piv = rr;
        std::swap(idx[col], idx[piv]);
        const double d = a[idx[col]][col];
        if (d == 0.0) throw std::runtime_error("fit_decay_rate: singular system");
        for (int rr = col + 1; rr < 3; ++rr) {
            const double f = a[idx[rr]][col] / d;
            for (int k = col; k < 3; ++k) a[idx[rr]][k] -= f * a[idx[col]][k];
            b[idx[rr]] -= f * b[idx[col]];
        }
    }
    double sol[3];
    for (int row = 2; row >= 0; --row) {
        double s = b[idx[row]];
        for (int k = row + 1; k < 3; ++k) s -= a[idx[row]][k] * sol[k];
        sol[row] = s / a[idx[row]][row];
    }
    return sol[2];
}

double ks_distance_uniform01(std::vector<double> samples)
{
    if (samples.empty()) throw std::invalid_argument("ks distance of empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = std::clamp(samples[i], 0.0, 1.0);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

void parallel_blocks(std::int64_t n_blocks, int threads, const std::function<void(std::int64_t)>& body)
{
    if (n_blocks <= 0) return;
    int t = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    t = static_cast<int>(std::min<std::int64_t>(t, n_blocks));
    if (t == 1) {
        for (std::int64_t b = 0; b < n_blocks; ++b) body(b);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (int w = 0; w < t; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t b = next.fetch_add(1);
                if (b >= n_blocks) return;
                body(b);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace sgdlab
