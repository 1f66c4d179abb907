// gwpeel: solvers, samplers, tree analysis and Monte Carlo experiments for
// critical Galton-Watson trees.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "gwpeel/analytic.hpp"
#include "gwpeel/experiments.hpp"
#include "gwpeel/offspring.hpp"
#include "gwpeel/sampler.hpp"
#include "gwpeel/tree.hpp"
#include "gwpeel/tree_io.hpp"

namespace {

using namespace gwpeel;
using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 20240601;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string family = "binary";
    std::string format;
    std::string output;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 0;

    // solve / dist
    std::vector<int> s;
    std::string kind = "peel";
    int terms = 20;

    // sample
    std::size_t count = 1;
    std::string mode = "conditioned";
    std::string method = "count_vector";
    int depth = 5;
    std::size_t cap = kDefaultUnconditionedCap;

    // analyze
    std::string input = "-";
    bool column = false;
    bool annotations = false;

    // experiment / table1
    std::string experiment;
    std::vector<std::size_t> n{10001};
    std::size_t trials = 200;
    int i_max = 10;
    double slack = 0.01;
    std::string dump_trials;
};

// Writes to --output when given, else stdout.
class Sink {
  public:
    explicit Sink(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open output file " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    bool is_terminal() const { return !file_.is_open() && isatty(STDOUT_FILENO); }

  private:
    std::ofstream file_;
};

bool use_color(const Sink& sink) {
    const char* no_color = std::getenv("NO_COLOR");
    return sink.is_terminal() && (no_color == nullptr || *no_color == '\0');
}

std::string format_or(const Options& o, const char* fallback) {
    const std::string f = o.format.empty() ? fallback : o.format;
    if (f != "json" && f != "csv" && f != "text") throw UsageError("unknown format '" + f + "'");
    return f;
}

OffspringDistribution family(const Options& o) { return OffspringDistribution::parse(o.family); }

json fixed_point_json(const FixedPointResult& r) {
    return {{"value", r.value}, {"iterations", r.iterations}, {"residual", r.residual}};
}

void cmd_solve(const Options& o) {
    const auto d = family(o);
    const auto q = solve_q(d);
    std::vector<std::pair<int, FixedPointResult>> qs;
    for (int s : o.s) qs.emplace_back(s, solve_qs(d, s));

    Sink sink(o.output);
    auto& out = sink.stream();
    const auto f = format_or(o, "text");
    if (f == "json") {
        json j = {{"family", d.name()}, {"q", fixed_point_json(q)}};
        for (const auto& [s, r] : qs) j["q_s"][std::to_string(s)] = fixed_point_json(r);
        out << j.dump(2) << '\n';
    } else if (f == "csv") {
        out << "quantity,s,value,iterations,residual\n";
        char line[160];
        std::snprintf(line, sizeof line, "q,,%.17g,%d,%.3g\n", q.value, q.iterations, q.residual);
        out << line;
        for (const auto& [s, r] : qs) {
            std::snprintf(line, sizeof line, "q_s,%d,%.17g,%d,%.3g\n", s, r.value, r.iterations, r.residual);
            out << line;
        }
    } else {
        char line[160];
        std::snprintf(line, sizeof line, "family   %s\nq        %.12f  (iterations %d, residual %.2e)\n",
                      d.name().c_str(), q.value, q.iterations, q.residual);
        out << line;
        for (const auto& [s, r] : qs) {
            std::snprintf(line, sizeof line, "q_%-6d %.12f  (iterations %d, residual %.2e)\n", s, r.value,
                          r.iterations, r.residual);
            out << line;
        }
    }
}

void cmd_dist(const Options& o) {
    const auto d = family(o);
    if (o.terms < 1) throw UsageError("--terms must be >= 1");
    DistributionTable t;
    if (o.kind == "peel") {
        t = peel_distribution(d, o.terms);
    } else if (o.kind == "leafheight") {
        t = leafheight_distribution(d, o.terms);
    } else if (o.kind == "rootlaw") {
        t = root_limit_law(d, o.terms);
    } else {
        throw UsageError("unknown --kind '" + o.kind + "' (peel, leafheight, rootlaw)");
    }

    Sink sink(o.output);
    auto& out = sink.stream();
    const auto f = format_or(o, "text");
    char line[160];
    if (f == "json") {
        json j = {{"family", d.name()},   {"kind", to_string(t.kind)},       {"values", t.values},
                  {"log_values", t.log_values}, {"upper_tail", t.upper_tail}, {"tail_mass", t.tail_mass}};
        out << j.dump(2) << '\n';
    } else if (f == "csv") {
        out << "index,value\n";
        for (std::size_t i = 0; i < t.size(); ++i) {
            std::snprintf(line, sizeof line, "%zu,%.17g\n", i, t.values[i]);
            out << line;
        }
        std::snprintf(line, sizeof line, "tail,%.17g\n", t.tail_mass);
        out << line;
    } else {
        out << "# " << to_string(t.kind) << " law for " << d.name() << '\n';
        std::snprintf(line, sizeof line, "%6s %24s %14s\n", "i", "value", "log(value)");
        out << line;
        for (std::size_t i = 0; i < t.size(); ++i) {
            std::snprintf(line, sizeof line, "%6zu %24.17g %14.6f\n", i, t.values[i], t.log_values[i]);
            out << line;
        }
        std::snprintf(line, sizeof line, "%6s %24.17g\n", "tail", t.tail_mass);
        out << line;
    }
}

void cmd_sample(const Options& o) {
    const auto d = family(o);
    ConditionedOptions copts;
    if (o.method == "count_vector") {
        copts.method = ConditionedMethod::count_vector;
    } else if (o.method == "iid") {
        copts.method = ConditionedMethod::iid_rejection;
    } else {
        throw UsageError("unknown --method '" + o.method + "' (count_vector, iid)");
    }
    if (o.mode != "conditioned" && o.mode != "unconditioned" && o.mode != "kesten") {
        throw UsageError("unknown --mode '" + o.mode + "' (conditioned, unconditioned, kesten)");
    }
    if (o.mode == "conditioned" && o.n.size() != 1) throw UsageError("sample takes exactly one --n");

    Sink sink(o.output);
    auto& out = sink.stream();
    for (std::size_t k = 0; k < o.count; ++k) {
        RandomStream rng(o.seed, k);
        if (o.mode == "conditioned") {
            out << format_degrees(sample_conditioned(d, o.n.front(), rng, copts)) << '\n';
        } else if (o.mode == "unconditioned") {
            auto s = sample_unconditioned(d, rng, o.cap);
            if (s.cap_exceeded()) {
                throw CapExceeded(s.generated, "tree " + std::to_string(k) + " reached the cap of " +
                                                   std::to_string(o.cap) + " nodes");
            }
            out << format_degrees(*s.tree) << '\n';
        } else {
            const auto kt = sample_kesten(d, o.depth, rng, o.cap);
            if (kt.truncated_subtrees > 0) {
                std::cerr << "tree " << k << ": " << kt.truncated_subtrees << " subtree(s) truncated at the cap\n";
            }
            out << format_degrees(kt.tree) << '\n';
        }
    }
}

json analyze_json(const Tree& t, const NodeAnnotations& a, const std::vector<int>& s_values, bool with_nodes) {
    const auto layers = layer_counts(a.peel);
    const auto I = independence_number(a.peel);
    json j = {{"n", t.size()},
              {"independence_number", I},
              {"vertex_cover_number", t.size() - I},
              {"max_peel", *std::max_element(a.peel.begin(), a.peel.end())},
              {"leaf_height", *std::max_element(a.leaf_height.begin(), a.leaf_height.end())},
              {"root_peel", a.peel[0]},
              {"layer_counts", layers}};
    for (int s : s_values) j["spvc"][std::to_string(s)] = mark_spvc(t, s).size;
    if (with_nodes) j["annotations"] = annotations_to_json(t, a)["nodes"];
    return j;
}

int cmd_analyze(const Options& o) {
    for (int s : o.s) {
        if (s < 2) throw UsageError("--s must be >= 2");
    }
    std::ifstream file;
    std::istream* in = &std::cin;
    if (o.input != "-") {
        file.open(o.input);
        if (!file) throw UsageError("cannot open " + o.input);
        in = &file;
    }
    std::vector<TreeLine> lines;
    if (o.column) {
        TreeLine single;
        single.line_number = 1;
        try {
            single.tree = read_degree_column(*in);
        } catch (const std::invalid_argument& e) {
            single.error = e.what();
        }
        lines.push_back(std::move(single));
    } else {
        lines = read_tree_lines(*in);
    }

    Sink sink(o.output);
    auto& out = sink.stream();
    const auto f = format_or(o, "text");
    std::size_t valid = 0;
    json all = json::array();
    if (f == "csv") {
        out << "line,n,independence_number,vertex_cover_number,max_peel,leaf_height,root_peel";
        for (int s : o.s) out << ",spvc_" << s;
        out << ",layer_counts\n";
    }
    for (const auto& line : lines) {
        if (!line.tree) {
            std::cerr << "line " << line.line_number << ": invalid tree: " << line.error << '\n';
            continue;
        }
        ++valid;
        const auto& t = *line.tree;
        const auto a = annotate(t);
        auto j = analyze_json(t, a, o.s, o.annotations);
        j["line"] = line.line_number;
        if (f == "json") {
            all.push_back(std::move(j));
        } else if (f == "csv") {
            out << line.line_number << ',' << j["n"] << ',' << j["independence_number"] << ','
                << j["vertex_cover_number"] << ',' << j["max_peel"] << ',' << j["leaf_height"] << ','
                << j["root_peel"];
            for (int s : o.s) out << ',' << j["spvc"][std::to_string(s)];
            std::string layers;
            for (const auto& c : j["layer_counts"]) layers += (layers.empty() ? "" : ";") + c.dump();
            out << ',' << layers << '\n';
        } else {
            out << "line " << line.line_number << ": n=" << j["n"] << " I=" << j["independence_number"]
                << " V=" << j["vertex_cover_number"] << " m=" << j["max_peel"] << " lambda=" << j["leaf_height"]
                << " rho_root=" << j["root_peel"];
            for (int s : o.s) out << " V_" << s << '=' << j["spvc"][std::to_string(s)];
            std::string layers;
            for (const auto& c : j["layer_counts"]) layers += (layers.empty() ? "" : ",") + c.dump();
            out << " layers=" << layers << '\n';
        }
    }
    if (f == "json") out << all.dump(2) << '\n';
    if (valid == 0) {
        std::cerr << "no valid trees in input\n";
        return kExitUsage;
    }
    return 0;
}

ExperimentConfig experiment_config(const Options& o) {
    ExperimentConfig c;
    c.seed = o.seed;
    c.threads = o.threads;
    c.slack = o.slack;
    c.keep_trials = !o.dump_trials.empty();
    return c;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << content;
}

void emit_reports(const Options& o, const std::vector<ExperimentReport>& reports) {
    Sink sink(o.output);
    auto& out = sink.stream();
    const auto f = format_or(o, "json");
    if (f == "json") {
        if (reports.size() == 1) {
            out << to_json(reports.front()).dump(2) << '\n';
        } else {
            json arr = json::array();
            for (const auto& r : reports) arr.push_back(to_json(r));
            out << arr.dump(2) << '\n';
        }
    } else {
        for (std::size_t k = 0; k < reports.size(); ++k) {
            const auto& r = reports[k];
            if (f == "csv") {
                auto csv = to_csv(r);
                out << (k == 0 ? csv : csv.substr(csv.find('\n') + 1));
            } else {
                out << to_text(r, use_color(sink));
            }
        }
    }
    if (!o.dump_trials.empty()) {
        std::string csv;
        for (std::size_t k = 0; k < reports.size(); ++k) {
            auto part = trials_to_csv(reports[k]);
            csv += k == 0 ? part : part.substr(part.find('\n') + 1);
        }
        write_file(o.dump_trials, csv);
    }
}

void emit_fit(const Options& o, const std::vector<GoodnessOfFit>& fits, const json& j) {
    Sink sink(o.output);
    auto& out = sink.stream();
    const auto f = format_or(o, "json");
    if (f == "json") {
        out << j.dump(2) << '\n';
    } else {
        for (const auto& g : fits) out << (f == "csv" ? to_csv(g) : to_text(g, use_color(sink)));
    }
}

void cmd_experiment(const Options& o) {
    const auto d = family(o);
    const auto config = experiment_config(o);
    const auto& name = o.experiment;
    if (name == "independence") {
        emit_reports(o, {run_independence(d, o.n, o.trials, config)});
    } else if (name == "peel") {
        emit_reports(o, {run_peel(d, o.n, o.trials, config)});
    } else if (name == "leafheight") {
        emit_reports(o, {run_leafheight(d, o.n, o.trials, config)});
    } else if (name == "spvc") {
        const auto s = o.s.empty() ? std::vector<int>{2, 3} : o.s;
        emit_reports(o, run_spvc(d, s, o.n, o.trials, config));
    } else if (name == "layers" || name == "rootlaw") {
        if (o.n.size() != 1) throw UsageError(name + " takes exactly one --n");
        if (!o.dump_trials.empty()) throw UsageError("--dump-trials applies to scalar experiments only");
        if (name == "layers") {
            const auto g = run_layers(d, o.n.front(), o.trials, o.i_max, config);
            emit_fit(o, {g}, to_json(g));
        } else {
            const auto r = run_root_leafheight(d, o.n.front(), o.trials, config);
            emit_fit(o, {r.root, r.uniform}, to_json(r));
        }
    } else {
        throw UsageError("unknown experiment '" + name +
                         "' (independence, peel, leafheight, layers, rootlaw, spvc)");
    }
}

void cmd_table1(const Options& o) {
    if (o.n.size() != 1) throw UsageError("table1 takes exactly one --n");
    const auto rows = table1(o.trials, o.n.front(), experiment_config(o));
    Sink sink(o.output);
    auto& out = sink.stream();
    const auto f = format_or(o, "text");
    if (f == "json") {
        out << to_json(rows).dump(2) << '\n';
    } else {
        out << (f == "csv" ? to_csv(rows) : to_text(rows));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Peel numbers, leaf-heights and path covers of critical Galton-Watson trees"};
    app.require_subcommand(1);
    Options o;

    auto add_family = [&](CLI::App* c) {
        c->add_option("--family", o.family,
                      "binary, tary:<t>, cayley, geometric, motzkin, catalan, binomial:<d>, uniform:<i,j,..>, "
                      "pmf:<p0,p1,..>")
            ->capture_default_str();
    };
    auto add_output = [&](CLI::App* c) {
        c->add_option("--format", o.format, "json, csv or text");
        c->add_option("--output,-o", o.output, "output file (default stdout)");
    };
    auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "RNG seed")->capture_default_str(); };

    auto* solve = app.add_subcommand("solve", "fixed points q and q_s");
    add_family(solve);
    solve->add_option("--s", o.s, "path length(s) s >= 2 for q_s")->check(CLI::Range(2, 1 << 20));
    add_output(solve);

    auto* dist = app.add_subcommand("dist", "peel, leaf-height or root limit law table");
    add_family(dist);
    dist->add_option("--kind", o.kind, "peel, leafheight or rootlaw")->capture_default_str();
    dist->add_option("--terms", o.terms, "number of terms")->capture_default_str()->check(CLI::PositiveNumber);
    add_output(dist);

    auto* sample = app.add_subcommand("sample", "sample trees as degree sequences");
    add_family(sample);
    sample->add_option("--n", o.n, "tree size (conditioned mode)");
    sample->add_option("--count", o.count, "number of trees")->capture_default_str();
    sample->add_option("--mode", o.mode, "conditioned, unconditioned or kesten")->capture_default_str();
    sample->add_option("--method", o.method, "count_vector or iid (conditioned mode)")->capture_default_str();
    sample->add_option("--depth", o.depth, "spine depth (kesten mode)")->capture_default_str();
    sample->add_option("--cap", o.cap, "node cap per (sub)tree")->capture_default_str();
    add_seed(sample);
    add_output(sample);

    auto* analyze = app.add_subcommand("analyze", "parameters of trees read as degree sequences");
    analyze->add_option("input", o.input, "file with one comma-separated tree per line, or - for stdin")
        ->capture_default_str();
    analyze->add_option("--s", o.s, "also report minimum s-path vertex covers")->check(CLI::Range(2, 1 << 20));
    analyze->add_flag("--column", o.column, "input is a single tree, one degree per line");
    analyze->add_flag("--annotations", o.annotations, "include per-node peel and leaf-height (json)");
    add_output(analyze);

    auto* experiment = app.add_subcommand("experiment", "Monte Carlo check of a limit theorem");
    experiment->add_option("name", o.experiment, "independence, peel, leafheight, layers, rootlaw or spvc")
        ->required();
    add_family(experiment);
    experiment->add_option("--n", o.n, "tree size(s)");
    experiment->add_option("--trials", o.trials, "trees per size")->capture_default_str();
    experiment->add_option("--s", o.s, "path lengths for spvc (default 2 3)")->check(CLI::Range(2, 1 << 20));
    experiment->add_option("--i-max", o.i_max, "largest layer index for layers")->capture_default_str();
    experiment->add_option("--slack", o.slack, "absolute slack for linear limits")->capture_default_str();
    experiment->add_option("--threads", o.threads, "worker threads (0 = all cores)")->capture_default_str();
    experiment->add_option("--dump-trials", o.dump_trials, "write per-trial values as CSV to this file");
    add_seed(experiment);
    add_output(experiment);

    auto* t1 = app.add_subcommand("table1", "analytic constants and estimates for seven families");
    t1->add_option("--n", o.n, "tree size")->capture_default_str();
    t1->add_option("--trials", o.trials, "trees per family")->capture_default_str();
    t1->add_option("--threads", o.threads, "worker threads (0 = all cores)")->capture_default_str();
    add_seed(t1);
    add_output(t1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*solve) cmd_solve(o);
        if (*dist) cmd_dist(o);
        if (*sample) cmd_sample(o);
        if (*analyze) return cmd_analyze(o);
        if (*experiment) cmd_experiment(o);
        if (*t1) cmd_table1(o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
