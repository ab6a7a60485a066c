#include "sgdlab/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <stdexcept>

namespace sgdlab {

namespace {

// Nodes and weights from the symmetric tridiagonal Jacobi matrix of the
// orthogonal-polynomial recurrence (Golub-Welsch).
QuadRule golub_welsch(int n, const std::function<double(int)>& offdiag, double mu0)
{
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
    for (int k = 1; k < n; ++k) sub[k - 1] = offdiag(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub);
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

const QuadRule& cached_rule(std::map<int, QuadRule>& cache, std::mutex& mu, int n,
                            const std::function<QuadRule(int)>& make)
{
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make(n)).first;
    return it->second;
}

// QUADPACK 15-point Kronrod extension of the 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679,  0.1903505780647854,  0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

struct GkResult {
    double kronrod;
    double err;
};

GkResult gk15(double a, double b, const std::function<double(double)>& f)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double fsum = f(c - x) + f(c + x);
        resk += kWgk[j] * fsum;
        if (j % 2 == 1) resg += kWg[j / 2] * fsum;
    }
    GkResult r;
    r.kronrod = resk * h;
    r.err = std::abs((resk - resg) * h);
    return r;
}

} // namespace

const QuadRule& gauss_legendre(int n)
{
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    return cached_rule(cache, mu, n, [](int m) {
        return golub_welsch(
            m, [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); }, 2.0);
    });
}

const QuadRule& gauss_hermite(int n)
{
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    return cached_rule(cache, mu, n, [](int m) {
        return golub_welsch(
            m, [](int k) { return std::sqrt(0.5 * k); }, std::sqrt(M_PI));
    });
}

double composite_gauss_legendre(double a, double b, int panels, int nodes_per_panel,
                                const std::function<double(double)>& f)
{
    if (panels < 1) throw std::invalid_argument("composite_gauss_legendre: panels < 1");
    const QuadRule& rule = gauss_legendre(nodes_per_panel);
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            acc += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
        total += acc * 0.5 * h;
    }
    return total;
}

double adaptive_gauss_kronrod(double a, double b, double abs_tol, double rel_tol,
                              const std::function<double(double)>& f)
{
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    struct Interval {
        double a, b, value, err;
        bool operator<(const Interval& o) const { return err < o.err; }
    };
    std::priority_queue<Interval> heap;
    GkResult first = gk15(a, b, f);
    heap.push({a, b, first.kronrod, first.err});
    double total = first.kronrod;
    double total_err = first.err;

    const int max_intervals = 200000;
    int used = 1;
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (used >= max_intervals)
            throw std::runtime_error("adaptive_gauss_kronrod: too many subdivisions");
        Interval worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw std::runtime_error("adaptive_gauss_kronrod: interval underflow");
        GkResult left = gk15(worst.a, mid, f);
        GkResult right = gk15(mid, worst.b, f);
        total += left.kronrod + right.kronrod - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push({worst.a, mid, left.kronrod, left.err});
        heap.push({mid, worst.b, right.kronrod, right.err});
        ++used;
    }
    return sign * total;
}

} // namespace sgdlab
