#include "gwpeel/tree.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace gwpeel {

Tree Tree::from_degrees(std::vector<int> degrees) {
    const std::size_t n = degrees.size();
    if (n == 0) throw TreeError(TreeErrorKind::empty, 0, "empty degree sequence");
    if (n > static_cast<std::size_t>(std::numeric_limits<NodeIndex>::max())) {
        throw TreeError(TreeErrorKind::invalid_degree_sum, n, "tree too large");
    }

    std::int64_t sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (degrees[i] < 0) {
            throw TreeError(TreeErrorKind::negative_degree, i, "negative degree at position " + std::to_string(i));
        }
        sum += degrees[i];
    }
    if (sum != static_cast<std::int64_t>(n) - 1) {
        throw TreeError(TreeErrorKind::invalid_degree_sum, n,
                        "degree sum " + std::to_string(sum) + " != n - 1 = " + std::to_string(n - 1));
    }

    Tree t;
    t.parent_.resize(n);
    t.child_start_.resize(n + 1);
    t.children_.resize(n - 1);
    std::uint32_t offset = 0;
    for (std::size_t i = 0; i < n; ++i) {
        t.child_start_[i] = offset;
        offset += static_cast<std::uint32_t>(degrees[i]);
    }
    t.child_start_[n] = offset;

    // Open nodes still waiting for children, with the number of slots left.
    std::vector<std::pair<NodeIndex, int>> open;
    t.parent_[0] = kNoParent;
    if (degrees[0] > 0) open.emplace_back(0, degrees[0]);
    for (std::size_t i = 1; i < n; ++i) {
        if (open.empty()) {
            throw TreeError(TreeErrorKind::invalid_prefix, i - 1,
                            "prefix of length " + std::to_string(i) + " already forms a complete tree");
        }
        auto& [p, left] = open.back();
        const auto pi = static_cast<std::size_t>(p);
        t.parent_[i] = p;
        t.children_[t.child_start_[pi] + static_cast<std::uint32_t>(degrees[pi] - left)] = static_cast<NodeIndex>(i);
        if (--left == 0) open.pop_back();
        if (degrees[i] > 0) open.emplace_back(static_cast<NodeIndex>(i), degrees[i]);
    }
    t.degrees_ = std::move(degrees);
    return t;
}

std::vector<int> peel_numbers(const Tree& t) {
    const auto n = static_cast<NodeIndex>(t.size());
    std::vector<int> peel(t.size());
    for (NodeIndex u = n - 1; u >= 0; --u) {
        if (t.is_leaf(u)) continue;
        int min_even = std::numeric_limits<int>::max();
        int max_any = 0;
        for (NodeIndex v : t.children(u)) {
            const int r = peel[static_cast<std::size_t>(v)];
            if (r % 2 == 0) min_even = std::min(min_even, r);
            max_any = std::max(max_any, r);
        }
        peel[static_cast<std::size_t>(u)] = 1 + (min_even != std::numeric_limits<int>::max() ? min_even : max_any);
    }
    return peel;
}

std::vector<int> leaf_heights(const Tree& t) {
    const auto n = static_cast<NodeIndex>(t.size());
    std::vector<int> height(t.size());
    for (NodeIndex u = n - 1; u >= 0; --u) {
        if (t.is_leaf(u)) continue;
        int best = std::numeric_limits<int>::max();
        for (NodeIndex v : t.children(u)) best = std::min(best, height[static_cast<std::size_t>(v)]);
        height[static_cast<std::size_t>(u)] = best + 1;
    }
    return height;
}

NodeAnnotations annotate(const Tree& t) { return {peel_numbers(t), leaf_heights(t)}; }

int max_peel(const Tree& t) {
    const auto peel = peel_numbers(t);
    return *std::max_element(peel.begin(), peel.end());
}

int max_leaf_height(const Tree& t) {
    const auto h = leaf_heights(t);
    return *std::max_element(h.begin(), h.end());
}

std::size_t independence_number(std::span<const int> peel) {
    return static_cast<std::size_t>(std::count_if(peel.begin(), peel.end(), [](int r) { return r % 2 == 0; }));
}

std::size_t independence_number(const Tree& t) { return independence_number(peel_numbers(t)); }

std::size_t vertex_cover_number(const Tree& t) { return t.size() - independence_number(t); }

SpvcResult mark_spvc(const Tree& t, int s) {
    if (s < 2) throw std::invalid_argument("s must be >= 2");
    const auto n = static_cast<NodeIndex>(t.size());
    SpvcResult result;
    result.marked.assign(t.size(), false);
    // Residual height of the unmarked part of each subtree; marked nodes are
    // pruned together with their subtree and ignored by the parent.
    std::vector<int> residual(t.size());
    for (NodeIndex u = n - 1; u >= 0; --u) {
        int h = -1;
        for (NodeIndex v : t.children(u)) {
            const auto vi = static_cast<std::size_t>(v);
            if (!result.marked[vi]) h = std::max(h, residual[vi]);
        }
        ++h;
        const auto ui = static_cast<std::size_t>(u);
        residual[ui] = h;
        if (h == s - 1) {
            result.marked[ui] = true;
            ++result.size;
        }
    }
    return result;
}

std::vector<std::size_t> layer_counts(std::span<const int> peel) {
    const int top = peel.empty() ? 0 : *std::max_element(peel.begin(), peel.end());
    std::vector<std::size_t> counts(static_cast<std::size_t>(top) + 1);
    for (int r : peel) ++counts[static_cast<std::size_t>(r)];
    return counts;
}

std::vector<std::size_t> layer_counts(const Tree& t) { return layer_counts(peel_numbers(t)); }

}  // namespace gwpeel
