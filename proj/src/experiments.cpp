#include "gwpeel/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "gwpeel/tree.hpp"

namespace gwpeel {
namespace {

using Metric = std::function<std::vector<double>(const Tree&, RandomStream&)>;

// values[trial][metric] for every trial at size n, in trial order.
std::vector<std::vector<double>> simulate(const OffspringDistribution& d, std::size_t n, std::size_t trials,
                                          const ExperimentConfig& config, const Metric& metric) {
    std::vector<std::vector<double>> out(trials);
    parallel_for(trials, config.threads, [&](std::size_t t) {
        RandomStream rng(config.seed, trial_stream_id(n, t));
        const Tree tree = sample_conditioned(d, n, rng, config.sampling);
        out[t] = metric(tree, rng);
    });
    return out;
}

Estimate summarize(std::size_t n, const std::vector<std::vector<double>>& values, std::size_t column, bool keep) {
    Estimate e;
    e.n = n;
    e.trials = values.size();
    double sum = 0.0;
    for (const auto& row : values) sum += row[column];
    e.mean = sum / static_cast<double>(e.trials);
    double ss = 0.0;
    for (const auto& row : values) ss += (row[column] - e.mean) * (row[column] - e.mean);
    e.standard_error = std::sqrt(ss / static_cast<double>(e.trials - 1) / static_cast<double>(e.trials));
    if (keep) {
        e.values.reserve(values.size());
        for (const auto& row : values) e.values.push_back(row[column]);
    }
    return e;
}

void require_trials(std::size_t trials) {
    if (trials < 2) throw std::invalid_argument("at least 2 trials are needed for a standard error");
    if (trials >= (std::size_t{1} << 24)) throw std::invalid_argument("at most 2^24 - 1 trials per size");
}

void require_sizes(const std::vector<std::size_t>& n_values, std::size_t minimum) {
    if (n_values.empty()) throw std::invalid_argument("no sizes given");
    for (auto n : n_values) {
        if (n < minimum) throw std::invalid_argument("n must be >= " + std::to_string(minimum) + " for this experiment");
    }
}

double normalizer(Normalization norm, std::size_t n) {
    const double x = static_cast<double>(n);
    switch (norm) {
        case Normalization::linear: return x;
        case Normalization::log: return std::log(x);
        case Normalization::loglog: return std::log(std::log(x));
    }
    return x;
}

void decide(ExperimentReport& r) {
    r.within_tolerance = std::all_of(r.estimates.begin(), r.estimates.end(), [&](const Estimate& e) {
        return std::fabs(e.mean - r.target) <= std::max(3.0 * e.standard_error, r.slack);
    });
    if (r.normalization == Normalization::linear || r.estimates.size() < 2) {
        r.verdict = r.within_tolerance ? Verdict::consistent : Verdict::inconsistent;
        r.verdict_rule = "|estimate - target| <= max(3*SE, slack) at every n";
        return;
    }
    // Sizes are processed in increasing order, so estimates are sorted by n.
    bool trend = true;
    for (std::size_t k = 1; k < r.estimates.size(); ++k) {
        trend = trend && std::fabs(r.estimates[k].mean - r.target) < std::fabs(r.estimates[k - 1].mean - r.target);
    }
    r.trend_toward_target = trend;
    r.verdict = trend ? Verdict::consistent : Verdict::inconsistent;
    r.verdict_rule = "|estimate - target| strictly decreases as n increases";
}

ExperimentReport base_report(std::string name, const OffspringDistribution& d, std::vector<std::size_t> n_values,
                             std::size_t trials, const ExperimentConfig& config) {
    ExperimentReport r;
    r.name = std::move(name);
    r.family = d.name();
    r.n_values = std::move(n_values);
    std::sort(r.n_values.begin(), r.n_values.end());
    r.trials_per_n = trials;
    r.slack = config.slack;
    r.seed = config.seed;
    return r;
}

ExperimentReport run_scalar(std::string name, const OffspringDistribution& d, const std::vector<std::size_t>& n_values,
                            std::size_t trials, const ExperimentConfig& config, Normalization norm, double target,
                            const std::function<double(const Tree&)>& statistic) {
    require_trials(trials);
    require_sizes(n_values, norm == Normalization::linear ? 1 : 3);
    auto r = base_report(std::move(name), d, n_values, trials, config);
    r.normalization = norm;
    r.target = target;
    for (auto n : r.n_values) {
        const double scale = normalizer(norm, n);
        const auto values = simulate(d, n, trials, config, [&](const Tree& t, RandomStream&) {
            return std::vector<double>{statistic(t) / scale};
        });
        r.estimates.push_back(summarize(n, values, 0, config.keep_trials));
    }
    decide(r);
    return r;
}

Normalization leaf_normalization(const LeafHeightConstant& c) {
    return c.scale == LeafHeightScale::log ? Normalization::log : Normalization::loglog;
}

std::size_t next_attainable(const OffspringDistribution& d, std::size_t n) {
    while (!size_attainable(d, n)) ++n;
    return n;
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string colored(Verdict v, bool color) {
    const auto word = to_string(v);
    if (!color) return word;
    return (v == Verdict::consistent ? "\x1b[32m" : "\x1b[31m") + word + "\x1b[0m";
}

// Histogram of integer observations as frequencies, with standard errors.
void histogram(const std::vector<std::vector<double>>& values, std::size_t column, GoodnessOfFit& g) {
    std::size_t top = 0;
    for (const auto& row : values) top = std::max(top, static_cast<std::size_t>(row[column]));
    std::vector<double> counts(top + 1);
    for (const auto& row : values) counts[static_cast<std::size_t>(row[column])] += 1.0;
    const double total = static_cast<double>(values.size());
    for (double& c : counts) c /= total;
    g.empirical = std::move(counts);
    g.standard_error.clear();
    for (double p : g.empirical) g.standard_error.push_back(std::sqrt(p * (1.0 - p) / total));
}

// Total variation between g.empirical and a table, counting table mass past
// the observed range as unmatched.
void compare_histogram(GoodnessOfFit& g, const DistributionTable& table) {
    g.expected = table.values;
    double l1 = 0.0;
    for (std::size_t i = 0; i < g.empirical.size(); ++i) {
        g.max_deviation = std::max(g.max_deviation, std::fabs(g.empirical[i] - g.expected[i]));
        l1 += std::fabs(g.empirical[i] - g.expected[i]);
    }
    l1 += table.tail_mass;
    g.total_variation = 0.5 * l1;
    g.statistic = "total_variation";
    g.verdict = g.total_variation < g.tolerance ? Verdict::consistent : Verdict::inconsistent;
}

}  // namespace

std::string to_string(Normalization n) {
    switch (n) {
        case Normalization::linear: return "linear";
        case Normalization::log: return "log";
        case Normalization::loglog: return "loglog";
    }
    return "unknown";
}

std::string to_string(Verdict v) { return v == Verdict::consistent ? "consistent" : "inconsistent"; }

std::uint64_t trial_stream_id(std::size_t n, std::size_t trial) {
    return (static_cast<std::uint64_t>(n) << 24) + static_cast<std::uint64_t>(trial);
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const auto workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mutex;
    std::size_t failed_index = std::numeric_limits<std::size_t>::max();
    std::exception_ptr failure;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

ExperimentReport run_independence(const OffspringDistribution& d, const std::vector<std::size_t>& n_values,
                                  std::size_t trials, const ExperimentConfig& config) {
    return run_scalar("independence", d, n_values, trials, config, Normalization::linear, solve_q(d).value,
                      [](const Tree& t) { return static_cast<double>(independence_number(t)); });
}

ExperimentReport run_peel(const OffspringDistribution& d, const std::vector<std::size_t>& n_values,
                          std::size_t trials, const ExperimentConfig& config) {
    return run_scalar("peel", d, n_values, trials, config, Normalization::log, peel_constant(d),
                      [](const Tree& t) { return static_cast<double>(max_peel(t)); });
}

ExperimentReport run_leafheight(const OffspringDistribution& d, const std::vector<std::size_t>& n_values,
                                std::size_t trials, const ExperimentConfig& config) {
    const auto c = leafheight_constant(d);
    return run_scalar("leafheight", d, n_values, trials, config, leaf_normalization(c), c.value,
                      [](const Tree& t) { return static_cast<double>(max_leaf_height(t)); });
}

std::vector<ExperimentReport> run_spvc(const OffspringDistribution& d, const std::vector<int>& s_values,
                                       const std::vector<std::size_t>& n_values, std::size_t trials,
                                       const ExperimentConfig& config) {
    require_trials(trials);
    require_sizes(n_values, 1);
    if (s_values.empty()) throw std::invalid_argument("no s values given");
    std::vector<ExperimentReport> reports;
    for (int s : s_values) {
        auto r = base_report("spvc", d, n_values, trials, config);
        r.s = s;
        r.target = solve_qs(d, s).value;
        reports.push_back(std::move(r));
    }
    // One tree per (n, trial) serves every s.
    for (auto n : reports.front().n_values) {
        const auto values = simulate(d, n, trials, config, [&](const Tree& t, RandomStream&) {
            std::vector<double> row;
            for (int s : s_values) row.push_back(static_cast<double>(mark_spvc(t, s).size) / static_cast<double>(n));
            return row;
        });
        for (std::size_t k = 0; k < reports.size(); ++k) {
            reports[k].estimates.push_back(summarize(n, values, k, config.keep_trials));
        }
    }
    for (auto& r : reports) decide(r);
    return reports;
}

GoodnessOfFit run_layers(const OffspringDistribution& d, std::size_t n, std::size_t trials, int i_max,
                         const ExperimentConfig& config) {
    require_trials(trials);
    if (i_max < 0) throw std::invalid_argument("i_max must be >= 0");
    const auto width = static_cast<std::size_t>(i_max) + 1;
    const auto values = simulate(d, n, trials, config, [&](const Tree& t, RandomStream&) {
        const auto counts = layer_counts(t);
        std::vector<double> row(width);
        for (std::size_t i = 0; i < width && i < counts.size(); ++i) {
            row[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
        }
        return row;
    });
    GoodnessOfFit g;
    g.name = "layers";
    g.family = d.name();
    g.n = n;
    g.trials = trials;
    g.seed = config.seed;
    g.tolerance = config.layer_tolerance;
    g.statistic = "max_deviation";
    const auto table = peel_distribution(d, static_cast<int>(width));
    for (std::size_t i = 0; i < width; ++i) {
        const auto e = summarize(n, values, i, false);
        g.empirical.push_back(e.mean);
        g.standard_error.push_back(e.standard_error);
        g.expected.push_back(table.values[i]);
        g.max_deviation = std::max(g.max_deviation, std::fabs(e.mean - table.values[i]));
    }
    g.verdict = g.max_deviation < g.tolerance ? Verdict::consistent : Verdict::inconsistent;
    return g;
}

RootLeafHeightReport run_root_leafheight(const OffspringDistribution& d, std::size_t n, std::size_t trials,
                                         const ExperimentConfig& config) {
    require_trials(trials);
    const auto values = simulate(d, n, trials, config, [&](const Tree& t, RandomStream& rng) {
        const auto h = leaf_heights(t);
        const auto pick = static_cast<std::size_t>(rng.below(t.size()));
        return std::vector<double>{static_cast<double>(h[0]), static_cast<double>(h[pick])};
    });

    RootLeafHeightReport r;
    for (auto* g : {&r.root, &r.uniform}) {
        g->family = d.name();
        g->n = n;
        g->trials = trials;
        g->seed = config.seed;
        g->tolerance = config.tv_tolerance;
    }
    r.root.name = "rootlaw_root";
    r.uniform.name = "rootlaw_uniform";
    histogram(values, 0, r.root);
    histogram(values, 1, r.uniform);
    compare_histogram(r.root, root_limit_law(d, static_cast<int>(r.root.empirical.size())));
    compare_histogram(r.uniform, leafheight_distribution(d, static_cast<int>(r.uniform.empirical.size())));
    return r;
}

std::vector<std::string> table1_families() {
    return {"binary", "tary:3", "cayley", "geometric", "motzkin", "catalan", "binomial:3"};
}

std::vector<Table1Row> table1(std::size_t trials, std::size_t n, const ExperimentConfig& config) {
    require_trials(trials);
    require_sizes({n}, 3);
    std::vector<Table1Row> rows;
    for (const auto& name : table1_families()) {
        const auto d = OffspringDistribution::parse(name);
        Table1Row row;
        row.family = d.name();
        row.n = next_attainable(d, n);
        row.q = solve_q(d).value;
        row.peel_constant = peel_constant(d);
        row.leaf_constant = leafheight_constant(d);
        const double x = static_cast<double>(row.n);
        const double leaf_scale = normalizer(leaf_normalization(row.leaf_constant), row.n);
        const auto values = simulate(d, row.n, trials, config, [&](const Tree& t, RandomStream&) {
            const auto a = annotate(t);
            return std::vector<double>{
                static_cast<double>(independence_number(a.peel)) / x,
                static_cast<double>(*std::max_element(a.peel.begin(), a.peel.end())) / std::log(x),
                static_cast<double>(*std::max_element(a.leaf_height.begin(), a.leaf_height.end())) / leaf_scale};
        });
        row.independence = summarize(row.n, values, 0, false);
        row.peel = summarize(row.n, values, 1, false);
        row.leaf = summarize(row.n, values, 2, false);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Output

nlohmann::json to_json(const ExperimentReport& r) {
    nlohmann::json estimates = nlohmann::json::array();
    for (const auto& e : r.estimates) {
        estimates.push_back({{"n", e.n},
                             {"trials", e.trials},
                             {"mean", e.mean},
                             {"standard_error", e.standard_error},
                             {"distance", std::fabs(e.mean - r.target)}});
    }
    nlohmann::json j = {{"experiment", r.name},
                        {"family", r.family},
                        {"normalization", to_string(r.normalization)},
                        {"target", r.target},
                        {"n_values", r.n_values},
                        {"trials_per_n", r.trials_per_n},
                        {"estimates", std::move(estimates)},
                        {"slack", r.slack},
                        {"within_tolerance", r.within_tolerance},
                        {"verdict", to_string(r.verdict)},
                        {"verdict_rule", r.verdict_rule},
                        {"seed", r.seed}};
    if (r.s) j["s"] = *r.s;
    if (r.trend_toward_target) j["trend_toward_target"] = *r.trend_toward_target;
    return j;
}

nlohmann::json to_json(const GoodnessOfFit& g) {
    return {{"experiment", g.name},
            {"family", g.family},
            {"n", g.n},
            {"trials", g.trials},
            {"empirical", g.empirical},
            {"expected", g.expected},
            {"standard_error", g.standard_error},
            {"max_deviation", g.max_deviation},
            {"total_variation", g.total_variation},
            {"statistic", g.statistic},
            {"tolerance", g.tolerance},
            {"verdict", to_string(g.verdict)},
            {"seed", g.seed}};
}

nlohmann::json to_json(const RootLeafHeightReport& r) {
    return {{"experiment", "rootlaw"}, {"root", to_json(r.root)}, {"uniform", to_json(r.uniform)}};
}

nlohmann::json to_json(const std::vector<Table1Row>& rows) {
    nlohmann::json out = nlohmann::json::array();
    auto est = [](const Estimate& e) {
        return nlohmann::json{{"mean", e.mean}, {"standard_error", e.standard_error}, {"trials", e.trials}};
    };
    for (const auto& row : rows) {
        out.push_back({{"family", row.family},
                       {"n", row.n},
                       {"q", row.q},
                       {"peel_constant", row.peel_constant},
                       {"leaf_height_constant", row.leaf_constant.value},
                       {"leaf_height_scale", row.leaf_constant.scale == LeafHeightScale::log ? "log" : "loglog"},
                       {"independence", est(row.independence)},
                       {"peel", est(row.peel)},
                       {"leaf_height", est(row.leaf)}});
    }
    return {{"experiment", "table1"}, {"rows", std::move(out)}};
}

std::string to_text(const ExperimentReport& r, bool color) {
    std::string out = r.name;
    if (r.s) out += " (s=" + std::to_string(*r.s) + ")";
    out += "  family=" + r.family + "  normalization=" + to_string(r.normalization) +
           "  target=" + fmt("%.6f", r.target) + "\n";
    char line[160];
    std::snprintf(line, sizeof line, "%10s %8s %12s %12s %12s\n", "n", "trials", "mean", "std.err", "distance");
    out += line;
    for (const auto& e : r.estimates) {
        std::snprintf(line, sizeof line, "%10zu %8zu %12.6f %12.6f %12.6f\n", e.n, e.trials, e.mean,
                      e.standard_error, std::fabs(e.mean - r.target));
        out += line;
    }
    out += "verdict: " + colored(r.verdict, color) + "  (" + r.verdict_rule + ")\n";
    return out;
}

std::string to_text(const GoodnessOfFit& g, bool color) {
    std::string out = g.name + "  family=" + g.family + "  n=" + std::to_string(g.n) +
                      "  trials=" + std::to_string(g.trials) + "\n";
    char line[160];
    std::snprintf(line, sizeof line, "%6s %12s %12s %12s\n", "i", "empirical", "expected", "std.err");
    out += line;
    for (std::size_t i = 0; i < g.empirical.size(); ++i) {
        std::snprintf(line, sizeof line, "%6zu %12.6f %12.6f %12.6f\n", i, g.empirical[i], g.expected[i],
                      g.standard_error[i]);
        out += line;
    }
    const double stat = g.statistic == "total_variation" ? g.total_variation : g.max_deviation;
    out += g.statistic + " = " + fmt("%.6f", stat) + " (tolerance " + fmt("%g", g.tolerance) +
           ")  verdict: " + colored(g.verdict, color) + "\n";
    return out;
}

std::string to_text(const std::vector<Table1Row>& rows) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-12s %8s | %9s %9s | %9s %9s | %9s %9s %s\n", "family", "n", "I_n: q",
                  "I_n/n", "M_n: c", "M_n/ln n", "L_n: c", "L_n/norm", "scale");
    out += line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-12s %8zu | %9.6f %9.6f | %9.6f %9.6f | %9.6f %9.6f %s\n",
                      r.family.c_str(), r.n, r.q, r.independence.mean, r.peel_constant, r.peel.mean,
                      r.leaf_constant.value, r.leaf.mean,
                      r.leaf_constant.scale == LeafHeightScale::log ? "ln n" : "ln ln n");
        out += line;
    }
    return out;
}

std::string to_csv(const ExperimentReport& r) {
    std::string out = "experiment,family,s,n,trials,mean,standard_error,target\n";
    char line[256];
    for (const auto& e : r.estimates) {
        std::snprintf(line, sizeof line, "%s,%s,%s,%zu,%zu,%.17g,%.17g,%.17g\n", r.name.c_str(), r.family.c_str(),
                      r.s ? std::to_string(*r.s).c_str() : "", e.n, e.trials, e.mean, e.standard_error, r.target);
        out += line;
    }
    return out;
}

std::string to_csv(const GoodnessOfFit& g) {
    std::string out = "experiment,family,n,i,empirical,expected,standard_error\n";
    char line[256];
    for (std::size_t i = 0; i < g.empirical.size(); ++i) {
        std::snprintf(line, sizeof line, "%s,%s,%zu,%zu,%.17g,%.17g,%.17g\n", g.name.c_str(), g.family.c_str(), g.n,
                      i, g.empirical[i], g.expected[i], g.standard_error[i]);
        out += line;
    }
    return out;
}

std::string to_csv(const std::vector<Table1Row>& rows) {
    std::string out =
        "family,n,q,independence_mean,independence_se,peel_constant,peel_mean,peel_se,leaf_constant,leaf_scale,"
        "leaf_mean,leaf_se\n";
    char line[512];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%s,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%.17g,%.17g\n",
                      r.family.c_str(), r.n, r.q, r.independence.mean, r.independence.standard_error,
                      r.peel_constant, r.peel.mean, r.peel.standard_error, r.leaf_constant.value,
                      r.leaf_constant.scale == LeafHeightScale::log ? "log" : "loglog", r.leaf.mean,
                      r.leaf.standard_error);
        out += line;
    }
    return out;
}

std::string trials_to_csv(const ExperimentReport& r) {
    std::string out = "experiment,s,n,trial,value\n";
    char line[160];
    for (const auto& e : r.estimates) {
        for (std::size_t t = 0; t < e.values.size(); ++t) {
            std::snprintf(line, sizeof line, "%s,%s,%zu,%zu,%.17g\n", r.name.c_str(),
                          r.s ? std::to_string(*r.s).c_str() : "", e.n, t, e.values[t]);
            out += line;
        }
    }
    return out;
}

}  // namespace gwpeel
