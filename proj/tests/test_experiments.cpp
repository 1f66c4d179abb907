#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gwpeel/experiments.hpp"

using namespace gwpeel;

namespace {

ExperimentConfig threads(unsigned k) {
    ExperimentConfig c;
    c.threads = k;
    return c;
}

}  // namespace

TEST_CASE("stream ids are disjoint across sizes and trials") {
    CHECK(trial_stream_id(1001, 0) != trial_stream_id(1002, 0));
    CHECK(trial_stream_id(1001, 5) == (std::uint64_t{1001} << 24) + 5);
    CHECK(trial_stream_id(1, (1u << 24) - 1) < trial_stream_id(2, 0));
}

TEST_CASE("independence ratio is in (1/2, 1] and matches q") {
    const auto d = OffspringDistribution::parse("cayley");
    ExperimentConfig c;
    c.keep_trials = true;
    const auto r = run_independence(d, {2000, 501}, 40, c);
    CHECK(r.n_values == std::vector<std::size_t>{501, 2000});
    CHECK(r.target == doctest::Approx(solve_q(d).value).epsilon(1e-12));
    CHECK(std::fabs(r.target - 0.5671432904) < 1e-9);
    for (const auto& e : r.estimates) {
        REQUIRE(e.values.size() == 40);
        for (double v : e.values) {
            CHECK(v > 0.5);
            CHECK(v <= 1.0);
        }
        CHECK(e.mean == doctest::Approx(std::accumulate(e.values.begin(), e.values.end(), 0.0) / 40));
    }
    CHECK(r.normalization == Normalization::linear);
    CHECK(r.verdict == Verdict::consistent);
    CHECK_FALSE(r.trend_toward_target.has_value());
}

TEST_CASE("size one trees") {
    const auto d = OffspringDistribution::parse("motzkin");
    ExperimentConfig c;
    c.keep_trials = true;
    const auto ind = run_independence(d, {1}, 3, c);
    for (double v : ind.estimates[0].values) CHECK(v == 1.0);
    const auto spvc = run_spvc(d, {2, 3}, {1}, 3, c);
    for (const auto& r : spvc)
        for (double v : r.estimates[0].values) CHECK(v == 0.0);
}

TEST_CASE("spvc targets") {
    const auto d = OffspringDistribution::parse("binary");
    const auto reports = run_spvc(d, {2, 3, 4}, {501}, 20);
    REQUIRE(reports.size() == 3);
    CHECK(reports[0].s == 2);
    CHECK(std::fabs(reports[0].target - (1.0 - solve_q(d).value)) < 1e-12);
    CHECK(std::fabs(reports[1].target - 0.2216144604) < 1e-9);
    CHECK(std::fabs(reports[2].target - 0.1391116668) < 1e-9);
    CHECK_THROWS_AS(run_spvc(d, {1}, {501}, 20), std::invalid_argument);
}

TEST_CASE("slow-limit targets and verdict rule") {
    const auto geo = OffspringDistribution::geometric_half();
    const auto peel = run_peel(geo, {101, 1001}, 20);
    CHECK(std::fabs(peel.target - 1.0 / std::log((3.0 + std::sqrt(5.0)) / 2.0)) < 1e-9);
    CHECK(peel.normalization == Normalization::log);
    REQUIRE(peel.trend_toward_target.has_value());
    CHECK((peel.verdict == Verdict::consistent) == *peel.trend_toward_target);

    const auto catalan = run_leafheight(OffspringDistribution::parse("catalan"), {101}, 10);
    CHECK(std::fabs(catalan.target - 1.0 / std::log(2.0)) < 1e-12);
    CHECK(catalan.normalization == Normalization::log);

    const auto tary = run_leafheight(OffspringDistribution::tary(3), {100}, 10);
    CHECK(tary.n_values == std::vector<std::size_t>{100});
    CHECK(std::fabs(tary.target - 1.0 / std::log(3.0)) < 1e-12);
    CHECK(tary.normalization == Normalization::loglog);

    CHECK_THROWS_AS(run_peel(geo, {2}, 10), std::invalid_argument);
    CHECK_THROWS_AS(run_peel(geo, {101}, 1), std::invalid_argument);
    CHECK_THROWS_AS(run_independence(OffspringDistribution::parse("binary"), {100}, 10), UnattainableSize);
}

TEST_CASE("layers fractions") {
    const auto d = OffspringDistribution::parse("motzkin");
    const auto g = run_layers(d, 2000, 30, 8);
    REQUIRE(g.empirical.size() == 9);
    REQUIRE(g.expected.size() == 9);
    CHECK(g.statistic == "max_deviation");
    const auto table = peel_distribution(d, 9);
    for (int i = 0; i <= 8; ++i) CHECK(g.expected[i] == doctest::Approx(table[i]).epsilon(1e-12));
    double mx = 0.0;
    for (int i = 0; i <= 8; ++i) mx = std::max(mx, std::fabs(g.empirical[i] - g.expected[i]));
    CHECK(g.max_deviation == doctest::Approx(mx));
    CHECK(std::accumulate(g.empirical.begin(), g.empirical.end(), 0.0) <= 1.0 + 1e-12);
    CHECK(g.max_deviation < 0.03);
}

TEST_CASE("root and uniform leaf-height histograms") {
    const auto d = OffspringDistribution::geometric_half();
    const auto r = run_root_leafheight(d, 301, 2000);
    CHECK(r.root.statistic == "total_variation");
    CHECK(r.root.empirical.size() == r.root.expected.size());
    CHECK(r.root.expected[0] == 0.0);
    CHECK(r.root.empirical[0] == 0.0);  // the root of a tree with n > 1 is never a leaf
    CHECK(std::accumulate(r.uniform.empirical.begin(), r.uniform.empirical.end(), 0.0) ==
          doctest::Approx(1.0));
    CHECK(r.root.total_variation < 0.06);
    CHECK(r.uniform.total_variation < 0.06);
}

TEST_CASE("json is identical across thread counts and reruns") {
    const auto d = OffspringDistribution::parse("catalan");
    const auto a = to_json(run_spvc(d, {2, 3}, {201, 401}, 16, threads(1))[1]).dump();
    const auto b = to_json(run_spvc(d, {2, 3}, {201, 401}, 16, threads(4))[1]).dump();
    const auto c = to_json(run_spvc(d, {2, 3}, {201, 401}, 16, threads(3))[1]).dump();
    CHECK(a == b);
    CHECK(a == c);
    const auto l1 = to_json(run_layers(d, 301, 9, 5, threads(1))).dump();
    const auto l2 = to_json(run_layers(d, 301, 9, 5, threads(5))).dump();
    CHECK(l1 == l2);
    ExperimentConfig other;
    other.seed = 7;
    CHECK(to_json(run_spvc(d, {3}, {201, 401}, 16, other)[0]).dump() != a);
}

TEST_CASE("output formats") {
    ExperimentConfig c;
    c.keep_trials = true;
    const auto r = run_peel(OffspringDistribution::parse("motzkin"), {51, 101}, 5, c);
    const auto j = to_json(r);
    CHECK(j["experiment"] == "peel");
    CHECK(j["normalization"] == "log");
    CHECK(j["estimates"].size() == 2);
    CHECK(j.contains("trend_toward_target"));

    const auto csv = to_csv(r);
    CHECK(csv.rfind("experiment,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    const auto trials = trials_to_csv(r);
    CHECK(std::count(trials.begin(), trials.end(), '\n') == 11);

    const auto text = to_text(r);
    CHECK(text.find("verdict:") != std::string::npos);
    CHECK(text.find("\x1b[") == std::string::npos);
    CHECK(to_text(r, true).find("\x1b[") != std::string::npos);

    const auto rows = table1(3, 21);
    CHECK(rows.size() == table1_families().size());
    CHECK(rows.size() == 7);
    for (const auto& row : rows) CHECK(row.n >= 21);
    CHECK(to_json(rows)["rows"].size() == 7);
    const auto rows_csv = to_csv(rows);
    CHECK(std::count(rows_csv.begin(), rows_csv.end(), '\n') == 8);
}

TEST_CASE("parallel_for covers every index and reports the lowest failure") {
    for (unsigned t : {1u, 2u, 8u}) {
        std::vector<std::atomic<int>> hits(1000);
        parallel_for(1000, t, [&](std::size_t i) { ++hits[i]; });
        for (auto& h : hits) REQUIRE(h == 1);

        try {
            parallel_for(100, t, [](std::size_t i) {
                if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
            });
            FAIL("expected exception");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "17");
        }
    }
    parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}
