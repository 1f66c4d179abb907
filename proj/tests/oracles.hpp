#pragma once

// Independent reference implementations used only by the tests. They trade
// speed for directness: peeling is simulated round by round, covers are found
// by subset search, and distributions come from explicit enumeration.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "gwpeel/offspring.hpp"
#include "gwpeel/random.hpp"
#include "gwpeel/tree.hpp"

namespace oracle {

struct Adjacency {
    std::vector<int> parent;
    std::vector<std::vector<int>> children;
};

// Builds parent/children with an explicit stack, independent of Tree.
inline Adjacency adjacency(const std::vector<int>& degrees) {
    Adjacency a;
    const int n = static_cast<int>(degrees.size());
    a.parent.assign(n, -1);
    a.children.assign(n, {});
    std::vector<int> stack;
    for (int i = 0; i < n; ++i) {
        if (!stack.empty()) {
            const int p = stack.back();
            a.parent[i] = p;
            a.children[p].push_back(i);
            if (static_cast<int>(a.children[p].size()) == degrees[p]) stack.pop_back();
        }
        if (degrees[i] > 0) stack.push_back(i);
    }
    return a;
}

struct PeelSimulation {
    std::vector<int> peel;
    int rounds = 0;
};

// Repeatedly removes all current leaves (layer 2r) and then all of their
// remaining parents (layer 2r + 1) until the tree is gone.
inline PeelSimulation simulate_peeling(const std::vector<int>& degrees) {
    const auto a = adjacency(degrees);
    const int n = static_cast<int>(degrees.size());
    std::vector<int> alive_children(degrees.begin(), degrees.end());
    std::vector<bool> removed(n, false);
    PeelSimulation out;
    out.peel.assign(n, -1);
    int left = n;
    while (left > 0) {
        std::vector<int> leaves;
        for (int u = 0; u < n; ++u) {
            if (!removed[u] && alive_children[u] == 0) leaves.push_back(u);
        }
        std::vector<int> parents;
        for (int u : leaves) {
            out.peel[u] = 2 * out.rounds;
            removed[u] = true;
            --left;
            const int p = a.parent[u];
            if (p >= 0) {
                --alive_children[p];
                if (!removed[p] && std::find(parents.begin(), parents.end(), p) == parents.end()) parents.push_back(p);
            }
        }
        for (int p : parents) {
            out.peel[p] = 2 * out.rounds + 1;
            removed[p] = true;
            --left;
            if (a.parent[p] >= 0) --alive_children[a.parent[p]];
        }
        ++out.rounds;
    }
    return out;
}

// Distance to the nearest leaf of each node's subtree, by breadth-first search.
inline std::vector<int> bfs_leaf_heights(const std::vector<int>& degrees) {
    const auto a = adjacency(degrees);
    const int n = static_cast<int>(degrees.size());
    std::vector<int> out(n);
    for (int u = 0; u < n; ++u) {
        std::vector<int> level{u};
        int depth = 0;
        for (;;) {
            bool leaf = false;
            std::vector<int> next;
            for (int v : level) {
                if (a.children[v].empty()) leaf = true;
                next.insert(next.end(), a.children[v].begin(), a.children[v].end());
            }
            if (leaf) break;
            level = std::move(next);
            ++depth;
        }
        out[u] = depth;
    }
    return out;
}

// Two-state dynamic program for the maximum independent set.
inline int max_independent_set(const std::vector<int>& degrees) {
    const auto a = adjacency(degrees);
    const int n = static_cast<int>(degrees.size());
    std::vector<int> with(n, 1), without(n, 0);
    for (int u = n - 1; u >= 0; --u) {
        for (int v : a.children[u]) {
            with[u] += without[v];
            without[u] += std::max(with[v], without[v]);
        }
    }
    return std::max(with[0], without[0]);
}

// Bitmask of each downward path with exactly s nodes.
inline std::vector<std::uint32_t> downward_paths(const std::vector<int>& degrees, int s) {
    const auto a = adjacency(degrees);
    std::vector<std::uint32_t> paths;
    std::function<void(int, int, std::uint32_t)> extend = [&](int u, int len, std::uint32_t mask) {
        mask |= 1u << u;
        if (len == s) {
            paths.push_back(mask);
            return;
        }
        for (int v : a.children[u]) extend(v, len + 1, mask);
    };
    for (int u = 0; u < static_cast<int>(degrees.size()); ++u) extend(u, 1, 0);
    return paths;
}

inline bool covers(std::uint32_t set, const std::vector<std::uint32_t>& paths) {
    return std::all_of(paths.begin(), paths.end(), [&](std::uint32_t p) { return (p & set) != 0; });
}

// Minimum s-path vertex cover size by trying subsets in increasing size.
inline int min_path_cover(const std::vector<int>& degrees, int s) {
    const int n = static_cast<int>(degrees.size());
    const auto paths = downward_paths(degrees, s);
    if (paths.empty()) return 0;
    for (int k = 1; k <= n; ++k) {
        std::uint32_t set = (1u << k) - 1;
        const std::uint32_t limit = 1u << n;
        while (set < limit) {
            if (covers(set, paths)) return k;
            const std::uint32_t c = set & (0u - set);
            const std::uint32_t r = set + c;
            set = (((r ^ set) >> 2) / c) | r;
        }
    }
    return n;
}

// Calls visit(degrees) for every preorder sequence of size 1..max_size with
// entries in [0, max_degree].
inline void for_each_tree(int max_size, int max_degree, const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> seq;
    std::function<void(int)> grow = [&](int pending) {
        if (pending == 0) {
            visit(seq);
            return;
        }
        const int room = max_size - static_cast<int>(seq.size());
        if (room < pending) return;
        for (int d = 0; d <= max_degree; ++d) {
            if (pending - 1 + d > room - 1) break;
            seq.push_back(d);
            grow(pending - 1 + d);
            seq.pop_back();
        }
    };
    grow(1);
}

inline double tree_probability(const gwpeel::OffspringDistribution& d, const std::vector<int>& degrees) {
    double p = 1.0;
    for (int k : degrees) p *= d.pmf(k);
    return p;
}

// Calls visit(degrees, probability) for every tree prefix whose nodes at depth
// < depth_limit have their degrees fixed (positive probability only); slots at
// depth depth_limit are filled with leaves. The probabilities sum to one.
inline void for_each_truncated_tree(const gwpeel::OffspringDistribution& d, int depth_limit,
                                    const std::function<void(const std::vector<int>&, double)>& visit) {
    const int kmax = *d.max_degree();
    std::vector<int> seq;
    std::vector<int> open_depths;  // depths of unfilled slots, stack order
    std::function<void(double)> grow = [&](double weight) {
        if (open_depths.empty()) {
            visit(seq, weight);
            return;
        }
        const int depth = open_depths.back();
        open_depths.pop_back();
        if (depth == depth_limit) {
            seq.push_back(0);
            grow(weight);
            seq.pop_back();
        } else {
            for (int k = 0; k <= kmax; ++k) {
                if (d.pmf(k) == 0.0) continue;
                seq.push_back(k);
                open_depths.insert(open_depths.end(), static_cast<std::size_t>(k), depth + 1);
                grow(weight * d.pmf(k));
                open_depths.resize(open_depths.size() - static_cast<std::size_t>(k));
                seq.pop_back();
            }
        }
        open_depths.push_back(depth);
    };
    open_depths.push_back(0);
    grow(1.0);
}

// Exact law of min(statistic(root), levels) for a finite-support law, from
// child configurations of small gadget trees: a child whose clipped value is c
// is realized by a path of c + 1 nodes, which has peel number and leaf-height c.
inline std::vector<double> clipped_root_law(const gwpeel::OffspringDistribution& d, int levels,
                                            const std::function<int(const std::vector<int>&)>& root_statistic) {
    const int kmax = *d.max_degree();
    std::vector<double> law{1.0};  // everything clipped at 0
    for (int level = 1; level <= levels; ++level) {
        std::vector<double> next(static_cast<std::size_t>(level) + 1, 0.0);
        next[0] += d.pmf(0);
        const int states = level;  // child clipped values 0..level-1
        for (int k = 1; k <= kmax; ++k) {
            if (d.pmf(k) == 0.0) continue;
            std::vector<int> tuple(static_cast<std::size_t>(k), 0);
            for (;;) {
                double w = d.pmf(k);
                std::vector<int> gadget{k};
                for (int c : tuple) {
                    w *= law[static_cast<std::size_t>(c)];
                    for (int j = 0; j < c; ++j) gadget.push_back(1);
                    gadget.push_back(0);
                }
                const int value = std::min(root_statistic(gadget), level);
                next[static_cast<std::size_t>(value)] += w;
                int pos = 0;
                while (pos < k && ++tuple[static_cast<std::size_t>(pos)] == states) tuple[static_cast<std::size_t>(pos++)] = 0;
                if (pos == k) break;
            }
        }
        law = std::move(next);
    }
    return law;
}

// Root leaf-height of an unconditioned tree, explored level by level and
// stopped at `cap` (returns min(height, cap)).
inline int lazy_root_leaf_height(const gwpeel::OffspringDistribution& d, gwpeel::RandomStream& rng, int cap) {
    std::uint64_t level_size = 1;
    for (int depth = 0; depth < cap; ++depth) {
        std::uint64_t next = 0;
        bool leaf = false;
        for (std::uint64_t i = 0; i < level_size && !leaf; ++i) {
            const int k = d.sample(rng);
            if (k == 0) leaf = true;
            next += static_cast<std::uint64_t>(k);
        }
        if (leaf) return depth;
        level_size = next;
    }
    return cap;
}

// Histogram of the spinal chain H' = 1 + min(H, H_1, ..., H_{zeta - 1}).
inline std::vector<double> spinal_chain_histogram(const gwpeel::OffspringDistribution& d, std::uint64_t steps,
                                                  std::uint64_t seed) {
    gwpeel::RandomStream rng(seed, 0);
    const auto zeta = d.size_biased();
    int h = 1;
    std::vector<double> counts;
    for (std::uint64_t t = 0; t < steps + 1000; ++t) {
        const int z = zeta.sample(rng);
        int m = h;
        for (int j = 1; j < z && m > 0; ++j) m = std::min(m, lazy_root_leaf_height(d, rng, m));
        h = 1 + m;
        if (t >= 1000) {
            if (counts.size() <= static_cast<std::size_t>(h)) counts.resize(static_cast<std::size_t>(h) + 1);
            counts[static_cast<std::size_t>(h)] += 1.0;
        }
    }
    for (double& c : counts) c /= static_cast<double>(steps);
    return counts;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b, double b_tail = 0.0) {
    const std::size_t n = std::max(a.size(), b.size());
    double s = b_tail;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = i < a.size() ? a[i] : 0.0;
        const double y = i < b.size() ? b[i] : 0.0;
        s += std::fabs(x - y);
    }
    return 0.5 * s;
}

}  // namespace oracle
