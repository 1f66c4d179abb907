#pragma once

#include <string>
#include <vector>

#include "gwpeel/offspring.hpp"

namespace gwpeel {

/// Numerical tolerances shared by the analytic routines.
struct Tolerances {
    /// Absolute bracket width at which bisection stops.
    double fixed_point = 1e-13;
    /// Allowed |sum(values) + tail_mass - 1| for a computed table.
    double table_sum = 1e-10;
    /// Index window used for ratio-decay checks of r_i and l_i.
    int ratio_window_begin = 40;
    int ratio_window_end = 60;
};

struct FixedPointResult {
    double value = 0.0;
    int iterations = 0;
    /// |value - F(value)| for the solved map F.
    double residual = 0.0;
};

enum class TableKind {
    peel_root,         ///< r_i: root peel number of an unconditioned tree
    leaf_height_root,  ///< l_i: root leaf-height of an unconditioned tree
    root_limit_law,    ///< l**_i: limit law of the root leaf-height of T_n
};

std::string to_string(TableKind kind);

/// A truncated probability sequence with its remaining mass carried explicitly.
///
/// Values are computed in extended precision; `values` holds them rounded to
/// double (deep tails may underflow to zero), `log_values` their natural logs
/// (still finite where `values` underflowed), and `upper_tail[i]` = P{X >= i}.
struct DistributionTable {
    TableKind kind = TableKind::peel_root;
    std::vector<double> values;
    std::vector<double> log_values;
    std::vector<double> upper_tail;
    /// P{X >= values.size()}.
    double tail_mass = 0.0;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    /// Sum of stored values plus tail mass; 1 up to rounding.
    double total_mass() const noexcept;
};

/// q in (0, 1) with q = f(1 - q): the probability that the root lies in the
/// layered independent set. Requires p_0 > 0 and E xi <= 1.
FixedPointResult solve_q(const OffspringDistribution& d, const Tolerances& tol = {});

/// q_s: the probability that the root of an unconditioned tree is marked by
/// the minimum s-path vertex cover construction (s >= 2).
///
/// With w_0 = 0 and w_k = f(q + w_{k-1}), q_s solves q = 1 - w_{s-1}(q);
/// w_k is the probability that the residual height of a node is below k.
/// For s = 2 this reduces to q_2 = 1 - q.
FixedPointResult solve_qs(const OffspringDistribution& d, int s, const Tolerances& tol = {});

/// The map q -> 1 - w_{s-1}(q) whose fixed point is q_s.
double qs_map(const OffspringDistribution& d, int s, double q);

/// r_0 .. r_{n_terms-1}; d must be critical.
DistributionTable peel_distribution(const OffspringDistribution& d, int n_terms);

/// l_0 .. l_{n_terms-1}.
DistributionTable leafheight_distribution(const OffspringDistribution& d, int n_terms);

/// l**_0 .. l**_{n_terms-1}, the stationary law of the spinal chain
/// H -> 1 + min(H, H_1, ..., H_{zeta-1}) of Kesten's tree. Its upper tail is
/// P{H >= i} = prod_{j<i} f'(l+_j); d must be critical.
DistributionTable root_limit_law(const OffspringDistribution& d, int n_terms);

/// Limit constant of M_n / log n: 1 / log(1 / f'(1 - q)).
double peel_constant(const OffspringDistribution& d);

enum class LeafHeightScale { log, loglog };

struct LeafHeightConstant {
    LeafHeightScale scale = LeafHeightScale::log;
    /// 1 / log(1/p_1) when p_1 > 0, else 1 / log(kappa).
    double value = 0.0;
};

LeafHeightConstant leafheight_constant(const OffspringDistribution& d);

}  // namespace gwpeel
