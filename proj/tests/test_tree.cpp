#include <doctest.h>

#include <sstream>

#include "gwpeel/sampler.hpp"
#include "gwpeel/tree.hpp"
#include "gwpeel/tree_io.hpp"
#include "oracles.hpp"

using namespace gwpeel;

namespace {

Tree T(std::vector<int> d) { return Tree::from_degrees(std::move(d)); }

TreeErrorKind error_kind(std::vector<int> d) {
    try {
        Tree::from_degrees(std::move(d));
    } catch (const TreeError& e) {
        return e.kind();
    }
    FAIL("no error");
    return TreeErrorKind::empty;
}

// Longest downward path of unmarked nodes starting at each node, in nodes.
bool is_path_cover(const Tree& t, const std::vector<bool>& marked, int s) {
    std::vector<int> run(t.size());
    for (auto u = static_cast<NodeIndex>(t.size()) - 1; u >= 0; --u) {
        if (marked[u]) continue;
        int best = 0;
        for (NodeIndex v : t.children(u)) best = std::max(best, run[v]);
        run[u] = best + 1;
        if (run[u] >= s) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("from_degrees builds structure") {
    const auto single = T({0});
    CHECK(single.size() == 1);
    CHECK(single.parent(0) == Tree::kNoParent);
    CHECK(single.children(0).empty());

    const auto cherry = T({2, 0, 0});
    CHECK(cherry.size() == 3);
    CHECK(std::vector<NodeIndex>(cherry.children(0).begin(), cherry.children(0).end()) == std::vector<NodeIndex>{1, 2});
    CHECK(cherry.parent(2) == 0);

    const auto t = T({2, 1, 0, 2, 0, 0});
    CHECK(t.parent(1) == 0);
    CHECK(t.parent(2) == 1);
    CHECK(t.parent(3) == 0);
    CHECK(t.parent(5) == 3);
    CHECK(std::vector<NodeIndex>(t.children(0).begin(), t.children(0).end()) == std::vector<NodeIndex>{1, 3});
}

TEST_CASE("from_degrees rejects invalid sequences") {
    CHECK(error_kind({0, 2, 0}) == TreeErrorKind::invalid_prefix);
    CHECK(error_kind({2, 0}) == TreeErrorKind::invalid_degree_sum);
    CHECK(error_kind({1, 1}) == TreeErrorKind::invalid_degree_sum);
    CHECK(error_kind({}) == TreeErrorKind::empty);
    CHECK(error_kind({1, -1, 1}) == TreeErrorKind::negative_degree);
    CHECK(error_kind({1, 0, 2, 0}) == TreeErrorKind::invalid_prefix);
}

TEST_CASE("small examples") {
    const auto path = T({1, 1, 0});
    CHECK(peel_numbers(path) == std::vector<int>{2, 1, 0});
    CHECK(leaf_heights(path) == std::vector<int>{2, 1, 0});
    CHECK(max_peel(path) == 2);
    CHECK(max_leaf_height(path) == 2);
    CHECK(independence_number(path) == 2);
    CHECK(vertex_cover_number(path) == 1);
    CHECK(layer_counts(path) == std::vector<std::size_t>{1, 1, 1});
    const auto cover = mark_spvc(path, 3);
    CHECK(cover.size == 1);
    CHECK(cover.marked == std::vector<bool>{true, false, false});

    const auto star = T({4, 0, 0, 0, 0});
    CHECK(peel_numbers(star) == std::vector<int>{1, 0, 0, 0, 0});
    CHECK(vertex_cover_number(star) == 1);

    const auto single = T({0});
    CHECK(peel_numbers(single) == std::vector<int>{0});
    CHECK(leaf_heights(single) == std::vector<int>{0});
    CHECK(max_peel(single) == 0);
    CHECK(independence_number(single) == 1);
    CHECK(vertex_cover_number(single) == 0);
    CHECK(layer_counts(single) == std::vector<std::size_t>{1});
    CHECK(mark_spvc(single, 2).size == 0);

    CHECK(leaf_heights(T({2, 0, 1, 0}))[0] == 1);

    const auto fork = T({2, 1, 0, 0});
    const auto c3 = mark_spvc(fork, 3);
    CHECK(c3.size == 1);
    CHECK(c3.marked[0]);

    // Height below s - 1: nothing to cover.
    CHECK(mark_spvc(T({1, 1, 0}), 4).size == 0);
    CHECK_THROWS_AS(mark_spvc(single, 1), std::invalid_argument);
}

TEST_CASE("tree leaf-height can exceed the root peel number") {
    // A leaf child pins the root at peel 1 while a chain elsewhere has leaf-height 2.
    const auto t = T({2, 0, 1, 1, 0});
    CHECK(peel_numbers(t)[0] == 1);
    CHECK(max_leaf_height(t) == 2);
    CHECK(max_peel(t) == 2);
}

TEST_CASE("deep unary chains do not recurse") {
    std::vector<int> chain(200000, 1);
    chain.back() = 0;
    const auto t = T(chain);
    const auto a = annotate(t);
    CHECK(a.peel[0] == 199999);
    CHECK(a.leaf_height[0] == 199999);
    CHECK(mark_spvc(t, 2).size == 100000);
    CHECK(independence_number(t) == 100000);
}

TEST_CASE("exhaustive equivalence on all trees up to 9 nodes") {
    // The full size-12 sweep runs in the acceptance binary.
    std::size_t count = 0;
    oracle::for_each_tree(9, 3, [&](const std::vector<int>& seq) {
        ++count;
        const auto t = T(seq);
        const auto a = annotate(t);
        const auto sim = oracle::simulate_peeling(seq);
        REQUIRE(a.peel == sim.peel);
        REQUIRE(sim.rounds == (max_peel(t) + 2) / 2);
        REQUIRE(a.leaf_height == oracle::bfs_leaf_heights(seq));
        REQUIRE(independence_number(t) == static_cast<std::size_t>(oracle::max_independent_set(seq)));
        for (int s = 2; s <= 4; ++s) {
            const auto c = mark_spvc(t, s);
            REQUIRE(is_path_cover(t, c.marked, s));
            REQUIRE(c.size == static_cast<std::size_t>(std::count(c.marked.begin(), c.marked.end(), true)));
            REQUIRE(c.size == static_cast<std::size_t>(oracle::min_path_cover(seq, s)));
        }
        REQUIRE(mark_spvc(t, 2).size == vertex_cover_number(t));
    });
    // Plane trees with out-degree at most 3, sizes 1..9.
    CHECK(count == 1 + 1 + 2 + 5 + 13 + 36 + 104 + 309 + 939);
}

TEST_CASE("structural properties on random conditioned trees") {
    for (const auto& spec : {"binary", "cayley", "geometric", "motzkin", "tary:3"}) {
        const auto d = OffspringDistribution::parse(spec);
        for (std::uint64_t k = 0; k < 20; ++k) {
            RandomStream rng(99, k);
            const std::size_t n = size_attainable(d, 2001) ? 2001 : 2002;
            const auto t = sample_conditioned(d, n, rng);
            const auto a = annotate(t);
            int lambda_max = 0, rho_max = 0;
            for (std::size_t u = 0; u < t.size(); ++u) {
                REQUIRE(a.leaf_height[u] <= a.peel[u]);
                REQUIRE((a.peel[u] == 0) == t.is_leaf(static_cast<NodeIndex>(u)));
                REQUIRE((a.leaf_height[u] == 0) == t.is_leaf(static_cast<NodeIndex>(u)));
                lambda_max = std::max(lambda_max, a.leaf_height[u]);
                rho_max = std::max(rho_max, a.peel[u]);
                const auto p = t.parent(static_cast<NodeIndex>(u));
                if (p >= 0) {
                    // Even peel numbers are independent; odd ones cover every edge.
                    REQUIRE(!(a.peel[u] % 2 == 0 && a.peel[p] % 2 == 0));
                    REQUIRE((a.peel[u] % 2 == 1 || a.peel[p] % 2 == 1));
                }
            }
            CHECK(lambda_max <= rho_max);
            CHECK(a.leaf_height[0] <= a.peel[0]);
            CHECK(a.peel[0] <= rho_max);
            const auto layers = layer_counts(t);
            CHECK(std::accumulate(layers.begin(), layers.end(), std::size_t{0}) == t.size());
            CHECK(mark_spvc(t, 2).size == vertex_cover_number(t));
            CHECK(independence_number(t) == static_cast<std::size_t>(oracle::max_independent_set(t.degrees())));
            CHECK(2 * independence_number(t) >= t.size());
        }
    }
}

TEST_CASE("degree-sequence text format") {
    CHECK(parse_degree_line("2,0,0") == std::vector<int>{2, 0, 0});
    CHECK(parse_degree_line(" 1 , 1,0 \r") == std::vector<int>{1, 1, 0});
    CHECK(parse_degree_line("0") == std::vector<int>{0});
    CHECK_THROWS_AS(parse_degree_line("1,,0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_degree_line("1,a"), std::invalid_argument);
    CHECK_THROWS_AS(parse_degree_line(""), std::invalid_argument);

    const auto t = T({3, 0, 1, 0, 0});
    CHECK(format_degrees(t) == "3,0,1,0,0");
    CHECK(Tree::from_degrees(parse_degree_line(format_degrees(t))) == t);

    std::istringstream in("# comment\n1,1,0\n\n2,0\n0\n0,2,0\n");
    const auto lines = read_tree_lines(in);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0].line_number == 2);
    CHECK(lines[0].tree.has_value());
    CHECK(lines[1].line_number == 4);
    CHECK_FALSE(lines[1].tree.has_value());
    CHECK(lines[1].error.find("sum") != std::string::npos);
    CHECK(lines[2].tree.has_value());
    CHECK_FALSE(lines[3].tree.has_value());

    std::istringstream column("2\n0\n1\n0\n");
    CHECK(read_degree_column(column) == T({2, 0, 1, 0}));

    const auto j = annotations_to_json(t, annotate(t));
    CHECK(j["n"] == 5);
    CHECK(j["nodes"][0]["peel"] == 1);
    CHECK(j["nodes"][2]["leaf_height"] == 1);
}
