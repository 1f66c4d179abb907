#include "gwpeel/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gwpeel {
namespace {

using Real = long double;

struct Bisection {
    Real value;
    int iterations;
};

// Root of an increasing function h on [lo, hi] with h(lo) < 0 < h(hi).
// tol = 0 runs until the bracket stops shrinking.
template <class F>
Bisection bisect(F h, Real lo, Real hi, double tol) {
    int iterations = 0;
    while (hi - lo > static_cast<Real>(tol)) {
        const Real mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) break;
        (h(mid) < 0 ? lo : hi) = mid;
        ++iterations;
    }
    return {lo + (hi - lo) / 2, iterations};
}

Bisection solve_q_precise(const OffspringDistribution& d, double tol) {
    return bisect([&](Real x) { return x - d.pgf<Real>(1 - x); }, 0, 1, tol);
}

Real qs_map_precise(const OffspringDistribution& d, int s, Real q) {
    Real w = 0;
    for (int k = 1; k < s; ++k) w = d.pgf<Real>(std::min<Real>(1, q + w));
    return 1 - w;
}

void require_critical(const OffspringDistribution& d, const char* what) {
    if (!d.is_critical()) {
        throw DistributionError(std::string(what) + " requires a critical offspring law");
    }
}

void require_terms(int n_terms) {
    if (n_terms < 1) throw std::invalid_argument("n_terms must be >= 1");
}

DistributionTable make_table(TableKind kind, const std::vector<Real>& values, const std::vector<Real>& tails,
                             Real tail_mass) {
    DistributionTable t;
    t.kind = kind;
    t.values.reserve(values.size());
    t.log_values.reserve(values.size());
    for (Real v : values) {
        t.values.push_back(static_cast<double>(v));
        t.log_values.push_back(v > 0 ? static_cast<double>(std::log(v)) : -std::numeric_limits<double>::infinity());
    }
    t.upper_tail.assign(tails.begin(), tails.end());
    t.tail_mass = static_cast<double>(tail_mass);
    return t;
}

// Upper tails e_i = l+_i = P{leaf-height >= i} for i = 0..count-1, from
// e_0 = 1 and e_{i+1} = f(e_i) - f(0). Each step is a product, so relative
// precision survives even when e_i underflows double.
std::vector<Real> leafheight_tails(const OffspringDistribution& d, int count) {
    std::vector<Real> e(static_cast<std::size_t>(count));
    e[0] = 1;
    for (int i = 1; i < count; ++i) e[i] = e[i - 1] * d.pgf_slope<Real>(0, e[i - 1]);
    return e;
}

}  // namespace

std::string to_string(TableKind kind) {
    switch (kind) {
        case TableKind::peel_root: return "peel";
        case TableKind::leaf_height_root: return "leafheight";
        case TableKind::root_limit_law: return "rootlaw";
    }
    return "unknown";
}

double DistributionTable::total_mass() const noexcept {
    return std::accumulate(values.begin(), values.end(), 0.0) + tail_mass;
}

FixedPointResult solve_q(const OffspringDistribution& d, const Tolerances& tol) {
    if (d.mean() > 1.0 + 1e-9) throw DistributionError("solve_q requires E xi <= 1");
    const auto root = solve_q_precise(d, tol.fixed_point);
    const Real residual = std::fabs(root.value - d.pgf<Real>(1 - root.value));
    return {static_cast<double>(root.value), root.iterations, static_cast<double>(residual)};
}

double qs_map(const OffspringDistribution& d, int s, double q) {
    if (s < 2) throw std::invalid_argument("s must be >= 2");
    return static_cast<double>(qs_map_precise(d, s, q));
}

FixedPointResult solve_qs(const OffspringDistribution& d, int s, const Tolerances& tol) {
    if (s < 2) throw std::invalid_argument("s must be >= 2");
    if (d.mean() > 1.0 + 1e-9) throw DistributionError("solve_qs requires E xi <= 1");
    const auto h = [&](Real q) { return q - qs_map_precise(d, s, q); };

    Real lo = 0, hi = 1;
    if (!(h(lo) < 0 && h(hi) > 0)) {
        // Not expected: h(0) = -(1 - f^{(s-1)}(0)) < 0 and h(1) = 1. Scan for a bracket.
        constexpr int kGrid = 10000;
        bool found = false;
        Real prev = h(0);
        for (int i = 1; i <= kGrid && !found; ++i) {
            const Real x = static_cast<Real>(i) / kGrid;
            const Real cur = h(x);
            if ((prev < 0) != (cur < 0)) {
                lo = static_cast<Real>(i - 1) / kGrid;
                hi = x;
                found = true;
            }
            prev = cur;
        }
        if (!found) throw std::runtime_error("solve_qs: no sign change found on the bracket grid");
    }
    const auto root = bisect(h, lo, hi, tol.fixed_point);
    const Real residual = std::fabs(root.value - qs_map_precise(d, s, root.value));
    return {static_cast<double>(root.value), root.iterations, static_cast<double>(residual)};
}

DistributionTable peel_distribution(const OffspringDistribution& d, int n_terms) {
    require_critical(d, "peel_distribution");
    require_terms(n_terms);

    // Even tails B_k = sum_{j>=k} r_{2j} and odd tails C_k = sum_{j>=k} r_{2j-1}
    // satisfy C_k = f(x + B_{k-1}) - f(x) and B_k = f(x) - f(x - C_k) with
    // x = 1 - q, B_0 = q. Telescoping the two recursions this way keeps every
    // step a product with a secant slope, so the deep terms keep full relative
    // precision instead of emerging from q minus a prefix sum.
    const Real q = solve_q_precise(d, 0).value;
    const Real x = 1 - q;
    const auto odd_tail = [&](Real even_tail) {
        return even_tail * d.pgf_slope<Real>(x, std::min<Real>(1, x + even_tail));
    };
    const auto even_tail = [&](Real odd) { return odd * d.pgf_slope<Real>(std::max<Real>(0, x - odd), x); };

    const auto n = static_cast<std::size_t>(n_terms);
    std::vector<Real> r(n), upper(n);
    r[0] = d.pgf<Real>(0);
    upper[0] = 1;

    Real b_prev = q;               // B_{k-1}
    Real c_cur = odd_tail(b_prev);  // C_k
    Real b_cur = even_tail(c_cur);  // B_k
    Real tail = b_cur + c_cur;      // P{X >= 1}
    for (std::size_t k = 1;; ++k) {
        const std::size_t odd_index = 2 * k - 1;
        if (odd_index >= n) break;
        r[odd_index] = r[odd_index - 1] * d.pgf_slope<Real>(x + b_cur, std::min<Real>(1, x + b_prev));
        upper[odd_index] = b_cur + c_cur;
        const Real c_next = odd_tail(b_cur);
        tail = b_cur + c_next;  // P{X >= 2k}

        const std::size_t even_index = 2 * k;
        if (even_index >= n) break;
        r[even_index] = r[odd_index] * d.pgf_slope<Real>(std::max<Real>(0, x - c_cur), std::max<Real>(0, x - c_next));
        upper[even_index] = b_cur + c_next;
        const Real b_next = even_tail(c_next);
        tail = b_next + c_next;  // P{X >= 2k+1}

        b_prev = b_cur;
        b_cur = b_next;
        c_cur = c_next;
    }
    return make_table(TableKind::peel_root, r, upper, tail);
}

DistributionTable leafheight_distribution(const OffspringDistribution& d, int n_terms) {
    require_terms(n_terms);
    const auto n = static_cast<std::size_t>(n_terms);
    const auto e = leafheight_tails(d, n_terms + 1);
    std::vector<Real> l(n);
    l[0] = d.pgf<Real>(0);
    // l_i = f(e_{i-1}) - f(e_i) and e_{i-1} - e_i = l_{i-1}.
    for (std::size_t i = 1; i < n; ++i) l[i] = l[i - 1] * d.pgf_slope<Real>(e[i], e[i - 1]);
    return make_table(TableKind::leaf_height_root, l, {e.begin(), e.end() - 1}, e[n]);
}

DistributionTable root_limit_law(const OffspringDistribution& d, int n_terms) {
    require_critical(d, "root_limit_law");
    require_terms(n_terms);
    const auto n = static_cast<std::size_t>(n_terms);
    const auto e = leafheight_tails(d, n_terms + 1);

    // G_i = P{H >= i} = prod_{j<i} f'(e_j). Spine nodes always have a child, so
    // G_1 = f'(e_0) = f'(1) = 1 exactly and l**_0 = 0.
    std::vector<Real> law(n), upper(n);
    Real g = 1;
    for (std::size_t i = 0; i < n; ++i) {
        upper[i] = g;
        const Real keep = i == 0 ? Real(1) : d.pgf_prime<Real>(e[i]);
        law[i] = g * (1 - keep);
        g *= keep;
    }
    return make_table(TableKind::root_limit_law, law, upper, g);
}

double peel_constant(const OffspringDistribution& d) {
    require_critical(d, "peel_constant");
    const Real q = solve_q_precise(d, 0).value;
    return static_cast<double>(-1 / std::log(d.pgf_prime<Real>(1 - q)));
}

LeafHeightConstant leafheight_constant(const OffspringDistribution& d) {
    require_critical(d, "leafheight_constant");
    if (d.p1() > 0.0) return {LeafHeightScale::log, -1.0 / std::log(d.p1())};
    const auto kappa = d.kappa();
    if (!kappa) throw DistributionError("leaf-height constant undefined: no degree above 1");
    return {LeafHeightScale::loglog, 1.0 / std::log(static_cast<double>(*kappa))};
}

}  // namespace gwpeel
