#include "gwpeel/sampler.hpp"

#include <algorithm>
#include <numeric>
#include <span>
#include <string>

namespace gwpeel {
namespace {

// Appends an unconditioned subtree in preorder. On reaching `cap` nodes the
// open slots are filled with leaves and false is returned.
bool append_unconditioned(const OffspringDistribution& d, RandomStream& rng, std::size_t cap,
                          std::vector<int>& out) {
    std::size_t drawn = 0;
    std::int64_t pending = 1;
    while (pending > 0) {
        if (drawn == cap) {
            out.insert(out.end(), static_cast<std::size_t>(pending), 0);
            return false;
        }
        const int k = d.sample(rng);
        out.push_back(k);
        ++drawn;
        pending += k - 1;
    }
    return true;
}

std::vector<int> rotate_to_preorder(std::vector<int> seq) {
    const auto start = cycle_lemma_rotation(seq);
    std::rotate(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(start), seq.end());
    return seq;
}

// Multinomial count vector over the finite support; nullopt unless sum i N_i = n - 1.
std::optional<std::vector<int>> draw_finite_sequence(const std::vector<double>& pmf, std::size_t n,
                                                     RandomStream& rng) {
    std::vector<std::uint64_t> counts(pmf.size());
    std::uint64_t remaining = n;
    double mass_left = 1.0;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < pmf.size() && remaining > 0; ++i) {
        std::uint64_t c;
        if (i + 1 == pmf.size()) {
            c = remaining;
        } else {
            const double p = mass_left > 0.0 ? std::clamp(pmf[i] / mass_left, 0.0, 1.0) : 1.0;
            c = sample_binomial(rng, remaining, p);
        }
        counts[i] = c;
        remaining -= c;
        mass_left -= pmf[i];
        total += c * i;
        if (total > n - 1) return std::nullopt;
    }
    if (total != n - 1) return std::nullopt;

    std::vector<int> seq;
    seq.reserve(n);
    for (std::size_t i = 0; i < counts.size(); ++i) seq.insert(seq.end(), counts[i], static_cast<int>(i));
    shuffle(std::span<int>(seq), rng);
    return seq;
}

// iid Poisson(1) given sum n - 1 is multinomial(n - 1; uniform on n cells).
std::vector<int> draw_poisson_sequence(std::size_t n, RandomStream& rng) {
    std::vector<int> seq(n);
    for (std::size_t ball = 0; ball + 1 < n; ++ball) ++seq[rng.below(n)];
    return seq;
}

// iid Geometric(1/2) given sum n - 1 is uniform over weak compositions of
// n - 1 into n parts: place n - 1 stars among 2n - 2 stars-and-bars slots.
std::vector<int> draw_geometric_sequence(std::size_t n, RandomStream& rng) {
    std::vector<int> seq(n);
    std::uint64_t stars = n - 1;
    std::uint64_t slots = 2 * (n - 1);
    std::size_t part = 0;
    for (; slots > 0; --slots) {
        if (rng.below(slots) < stars) {
            ++seq[part];
            --stars;
        } else {
            ++part;
        }
    }
    return seq;
}

std::optional<std::vector<int>> draw_iid_sequence(const OffspringDistribution& d, std::size_t n,
                                                  RandomStream& rng) {
    std::vector<int> seq;
    seq.reserve(n);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int k = d.sample(rng);
        total += static_cast<std::uint64_t>(k);
        if (total > n - 1) return std::nullopt;
        seq.push_back(k);
    }
    if (total != n - 1) return std::nullopt;
    return seq;
}

}  // namespace

UnconditionedSample sample_unconditioned(const OffspringDistribution& d, RandomStream& rng, std::size_t cap) {
    if (cap < 1) throw std::invalid_argument("cap must be >= 1");
    std::vector<int> degrees;
    UnconditionedSample result;
    const bool complete = append_unconditioned(d, rng, cap, degrees);
    if (!complete) {
        result.generated = cap;
        return result;
    }
    result.generated = degrees.size();
    result.tree = Tree::from_degrees(std::move(degrees));
    return result;
}

bool size_attainable(const OffspringDistribution& d, std::size_t n) {
    if (n == 0) return false;
    if (n == 1) return true;
    if (!d.max_degree()) return true;
    const auto pmf = d.finite_pmf();
    std::uint64_t g = 0;
    for (std::size_t i = 1; i < pmf.size(); ++i) {
        if (pmf[i] > 0.0) g = std::gcd(g, static_cast<std::uint64_t>(i));
    }
    return g != 0 && (n - 1) % g == 0;
}

std::size_t cycle_lemma_rotation(const std::vector<int>& degrees) {
    std::int64_t partial = 0;
    std::int64_t best = 0;
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        partial += degrees[i] - 1;
        if (i == 0 || partial < best) {
            best = partial;
            best_index = i;
        }
    }
    return (best_index + 1) % degrees.size();
}

Tree sample_conditioned(const OffspringDistribution& d, std::size_t n, RandomStream& rng,
                        const ConditionedOptions& options) {
    if (n == 0) throw std::invalid_argument("n must be >= 1");
    if (n == 1) return Tree::from_degrees({0});
    if (!size_attainable(d, n)) {
        throw UnattainableSize(n, 0, "no tree with " + std::to_string(n) + " nodes has positive probability under " +
                                         d.name());
    }

    const bool use_iid = options.method == ConditionedMethod::iid_rejection;
    if (!use_iid && d.family() == Family::poisson1) return Tree::from_degrees(rotate_to_preorder(draw_poisson_sequence(n, rng)));
    if (!use_iid && d.family() == Family::geometric_half) {
        return Tree::from_degrees(rotate_to_preorder(draw_geometric_sequence(n, rng)));
    }

    const auto pmf = use_iid ? std::vector<double>{} : d.finite_pmf();
    for (std::uint64_t attempt = 0; attempt < options.max_attempts; ++attempt) {
        auto seq = use_iid ? draw_iid_sequence(d, n, rng) : draw_finite_sequence(pmf, n, rng);
        if (seq) return Tree::from_degrees(rotate_to_preorder(std::move(*seq)));
    }
    throw UnattainableSize(n, options.max_attempts,
                           "no sequence with degree sum " + std::to_string(n - 1) + " after " +
                               std::to_string(options.max_attempts) + " attempts");
}

KestenTruncation sample_kesten(const OffspringDistribution& d, int depth, RandomStream& rng, std::size_t subtree_cap) {
    if (depth < 0) throw std::invalid_argument("depth must be >= 0");
    if (subtree_cap < 1) throw std::invalid_argument("subtree_cap must be >= 1");
    const auto zeta = d.size_biased();

    const auto levels = static_cast<std::size_t>(depth) + 1;
    std::vector<int> spine_degree(levels);
    std::vector<int> spine_child(levels, -1);
    std::vector<int> degrees;
    std::vector<NodeIndex> spine(levels);
    std::size_t truncated = 0;

    // Downward pass: each spine node, then the subtrees left of its spine child.
    for (std::size_t level = 0; level < levels; ++level) {
        spine_degree[level] = zeta.sample(rng);
        const bool last = level + 1 == levels;
        if (!last) spine_child[level] = static_cast<int>(rng.below(static_cast<std::uint64_t>(spine_degree[level])));
        spine[level] = static_cast<NodeIndex>(degrees.size());
        degrees.push_back(spine_degree[level]);
        const int before = last ? spine_degree[level] : spine_child[level];
        for (int c = 0; c < before; ++c) {
            if (!append_unconditioned(d, rng, subtree_cap, degrees)) ++truncated;
        }
    }
    // Upward pass: the subtrees right of each spine child, deepest first.
    for (std::size_t level = levels - 1; level-- > 0;) {
        for (int c = spine_child[level] + 1; c < spine_degree[level]; ++c) {
            if (!append_unconditioned(d, rng, subtree_cap, degrees)) ++truncated;
        }
    }
    return {Tree::from_degrees(std::move(degrees)), std::move(spine), depth, truncated};
}

}  // namespace gwpeel
