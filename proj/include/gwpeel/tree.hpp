#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwpeel {

enum class TreeErrorKind { empty, negative_degree, invalid_degree_sum, invalid_prefix };

class TreeError : public std::invalid_argument {
  public:
    TreeError(TreeErrorKind kind, std::size_t position, const std::string& message)
        : std::invalid_argument(message), kind_(kind), position_(position) {}

    TreeErrorKind kind() const noexcept { return kind_; }
    /// Index of the offending entry (for invalid_prefix, the node that closes the tree early).
    std::size_t position() const noexcept { return position_; }

  private:
    TreeErrorKind kind_;
    std::size_t position_;
};

using NodeIndex = std::int32_t;

/// Ordered rooted tree stored as its preorder degree sequence.
///
/// Node 0 is the root; every child has a larger index than its parent, so a
/// reverse index sweep visits each node after all of its descendants.
class Tree {
  public:
    static constexpr NodeIndex kNoParent = -1;

    /// Validates sum(d) = n - 1 and that no proper prefix closes the tree.
    static Tree from_degrees(std::vector<int> degrees);

    std::size_t size() const noexcept { return degrees_.size(); }
    const std::vector<int>& degrees() const noexcept { return degrees_; }
    int degree(NodeIndex u) const noexcept { return degrees_[static_cast<std::size_t>(u)]; }
    bool is_leaf(NodeIndex u) const noexcept { return degree(u) == 0; }
    NodeIndex parent(NodeIndex u) const noexcept { return parent_[static_cast<std::size_t>(u)]; }
    std::span<const NodeIndex> children(NodeIndex u) const noexcept {
        const auto i = static_cast<std::size_t>(u);
        return {children_.data() + child_start_[i], children_.data() + child_start_[i + 1]};
    }

    bool operator==(const Tree& other) const noexcept { return degrees_ == other.degrees_; }

  private:
    Tree() = default;

    std::vector<int> degrees_;
    std::vector<NodeIndex> parent_;
    std::vector<std::uint32_t> child_start_;  // size n + 1, offsets into children_
    std::vector<NodeIndex> children_;
};

struct NodeAnnotations {
    std::vector<int> peel;
    std::vector<int> leaf_height;
};

struct SpvcResult {
    std::vector<bool> marked;
    std::size_t size = 0;
};

std::vector<int> peel_numbers(const Tree& t);
std::vector<int> leaf_heights(const Tree& t);
NodeAnnotations annotate(const Tree& t);

int max_peel(const Tree& t);
int max_leaf_height(const Tree& t);

/// Number of nodes with even peel number, a maximum independent set.
std::size_t independence_number(const Tree& t);
std::size_t independence_number(std::span<const int> peel);
std::size_t vertex_cover_number(const Tree& t);

/// Minimum s-path vertex cover by deepest-first pruning of height s-1 subtrees.
SpvcResult mark_spvc(const Tree& t, int s);

/// N_i = number of nodes with peel number i, for i = 0..max_peel.
std::vector<std::size_t> layer_counts(const Tree& t);
std::vector<std::size_t> layer_counts(std::span<const int> peel);

}  // namespace gwpeel
