#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gwpeel/offspring.hpp"
#include "gwpeel/random.hpp"
#include "gwpeel/tree.hpp"

namespace gwpeel {

inline constexpr std::size_t kDefaultUnconditionedCap = 10'000'000;
inline constexpr std::size_t kDefaultKestenSubtreeCap = 1'000'000;
inline constexpr std::uint64_t kDefaultMaxAttempts = 1'000'000;

/// Raised when no tree of the requested size can be produced: either the
/// support makes n impossible or the retry budget ran out.
class UnattainableSize : public std::runtime_error {
  public:
    UnattainableSize(std::size_t n, std::uint64_t attempts, const std::string& message)
        : std::runtime_error(message), n_(n), attempts_(attempts) {}
    std::size_t n() const noexcept { return n_; }
    std::uint64_t attempts() const noexcept { return attempts_; }

  private:
    std::size_t n_;
    std::uint64_t attempts_;
};

/// Raised by callers that cannot continue after an unconditioned tree hit its cap.
class CapExceeded : public std::runtime_error {
  public:
    CapExceeded(std::size_t generated, const std::string& message)
        : std::runtime_error(message), generated_(generated) {}
    std::size_t generated() const noexcept { return generated_; }

  private:
    std::size_t generated_;
};

struct UnconditionedSample {
    std::optional<Tree> tree;  ///< empty when the cap was reached first
    std::size_t generated = 0;  ///< nodes drawn, including the partial tree on a cap hit

    bool cap_exceeded() const noexcept { return !tree.has_value(); }
};

/// BGW tree with independent degrees; stops with no tree once `cap` nodes exist.
UnconditionedSample sample_unconditioned(const OffspringDistribution& d, RandomStream& rng,
                                         std::size_t cap = kDefaultUnconditionedCap);

enum class ConditionedMethod {
    /// Draws the degree multiset (count vector or exact conditional law) and
    /// shuffles it; same law as iid rejection at O(support) cost per attempt.
    count_vector,
    /// Literal rejection: iid sequences of length n until the sum is n - 1.
    iid_rejection,
};

struct ConditionedOptions {
    ConditionedMethod method = ConditionedMethod::count_vector;
    std::uint64_t max_attempts = kDefaultMaxAttempts;
};

/// True when some tree with n nodes has positive probability (gcd test on the support).
bool size_attainable(const OffspringDistribution& d, std::size_t n);

/// T_n: a BGW tree conditioned on exactly n nodes, rotated into preorder by the cycle lemma.
Tree sample_conditioned(const OffspringDistribution& d, std::size_t n, RandomStream& rng,
                        const ConditionedOptions& options = {});

/// Index of the rotation of `degrees` (sum n - 1) that is a valid preorder sequence.
std::size_t cycle_lemma_rotation(const std::vector<int>& degrees);

struct KestenTruncation {
    Tree tree;
    /// Preorder indices of the spine, root first; spine.size() == depth + 1.
    std::vector<NodeIndex> spine;
    int depth = 0;
    /// Hanging subtrees that reached the cap and were closed off with leaves.
    std::size_t truncated_subtrees = 0;
};

/// Kesten's tree cut below spine depth k: spine nodes have size-biased degree
/// and a uniformly chosen spine child; every other child, and every child of
/// the deepest spine node, roots an independent unconditioned subtree.
KestenTruncation sample_kesten(const OffspringDistribution& d, int depth, RandomStream& rng,
                               std::size_t subtree_cap = kDefaultKestenSubtreeCap);

}  // namespace gwpeel
