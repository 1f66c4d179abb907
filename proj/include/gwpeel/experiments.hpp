#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gwpeel/analytic.hpp"
#include "gwpeel/offspring.hpp"
#include "gwpeel/sampler.hpp"

namespace gwpeel {

enum class Normalization { linear, log, loglog };
enum class Verdict { consistent, inconsistent };

std::string to_string(Normalization n);
std::string to_string(Verdict v);

struct ExperimentConfig {
    std::uint64_t seed = 20240601;
    /// Worker threads; 0 means hardware concurrency. Never affects results.
    unsigned threads = 0;
    /// Absolute slack for linear limits: pass if |est - target| <= max(3 SE, slack).
    double slack = 0.01;
    /// Total-variation tolerance for histogram comparisons.
    double tv_tolerance = 0.02;
    /// Max per-index deviation for layer fractions.
    double layer_tolerance = 0.015;
    ConditionedOptions sampling{};
    /// Keep per-trial values in reports (for CSV dumps).
    bool keep_trials = false;
};

/// Stream id of trial `trial` at size n; disjoint across (n, trial) for trial < 2^24.
std::uint64_t trial_stream_id(std::size_t n, std::size_t trial);

struct Estimate {
    std::size_t n = 0;
    std::size_t trials = 0;
    double mean = 0.0;
    double standard_error = 0.0;
    /// Per-trial values, in trial order; filled only with keep_trials.
    std::vector<double> values;
};

struct ExperimentReport {
    std::string name;
    std::string family;
    std::optional<int> s;
    std::vector<std::size_t> n_values;
    std::size_t trials_per_n = 0;
    std::vector<Estimate> estimates;
    double target = 0.0;
    Normalization normalization = Normalization::linear;
    double slack = 0.0;
    /// Every estimate within max(3 SE, slack) of the target.
    bool within_tolerance = false;
    /// Only for log/loglog: distance to target strictly decreases with n.
    std::optional<bool> trend_toward_target;
    Verdict verdict = Verdict::inconsistent;
    std::string verdict_rule;
    std::uint64_t seed = 0;
};

struct GoodnessOfFit {
    std::string name;
    std::string family;
    std::size_t n = 0;
    std::size_t trials = 0;
    std::vector<double> empirical;
    std::vector<double> expected;
    /// Per-index standard error of the empirical value.
    std::vector<double> standard_error;
    double max_deviation = 0.0;
    double total_variation = 0.0;
    std::string statistic;  ///< "max_deviation" or "total_variation"
    double tolerance = 0.0;
    Verdict verdict = Verdict::inconsistent;
    std::uint64_t seed = 0;
};

/// I_n / n -> q.
ExperimentReport run_independence(const OffspringDistribution& d, const std::vector<std::size_t>& n_values,
                                  std::size_t trials, const ExperimentConfig& config = {});
/// M_n / log n -> 1 / log(1 / f'(1 - q)).
ExperimentReport run_peel(const OffspringDistribution& d, const std::vector<std::size_t>& n_values,
                          std::size_t trials, const ExperimentConfig& config = {});
/// L_n / log n -> 1 / log(1/p_1), or L_n / log log n -> 1 / log kappa when p_1 = 0.
ExperimentReport run_leafheight(const OffspringDistribution& d, const std::vector<std::size_t>& n_values,
                                std::size_t trials, const ExperimentConfig& config = {});
/// V_s(T_n) / n -> q_s, one report per s.
std::vector<ExperimentReport> run_spvc(const OffspringDistribution& d, const std::vector<int>& s_values,
                                       const std::vector<std::size_t>& n_values, std::size_t trials,
                                       const ExperimentConfig& config = {});

/// Mean N_i / n against r_i for i <= i_max.
GoodnessOfFit run_layers(const OffspringDistribution& d, std::size_t n, std::size_t trials, int i_max,
                         const ExperimentConfig& config = {});

struct RootLeafHeightReport {
    GoodnessOfFit root;     ///< root leaf-height of T_n against l**
    GoodnessOfFit uniform;  ///< leaf-height of one uniform node per tree against l
};
RootLeafHeightReport run_root_leafheight(const OffspringDistribution& d, std::size_t n, std::size_t trials,
                                         const ExperimentConfig& config = {});

struct Table1Row {
    std::string family;
    std::size_t n = 0;  ///< the smallest attainable size >= the requested n
    double q = 0.0;
    double peel_constant = 0.0;
    LeafHeightConstant leaf_constant;
    Estimate independence;  ///< I_n / n
    Estimate peel;          ///< M_n / log n
    Estimate leaf;          ///< L_n / log n or L_n / log log n
};

std::vector<std::string> table1_families();
std::vector<Table1Row> table1(std::size_t trials, std::size_t n, const ExperimentConfig& config = {});

nlohmann::json to_json(const ExperimentReport& r);
nlohmann::json to_json(const GoodnessOfFit& g);
nlohmann::json to_json(const RootLeafHeightReport& r);
nlohmann::json to_json(const std::vector<Table1Row>& rows);

/// Aligned-column text; `color` wraps verdicts in ANSI escapes.
std::string to_text(const ExperimentReport& r, bool color = false);
std::string to_text(const GoodnessOfFit& g, bool color = false);
std::string to_text(const std::vector<Table1Row>& rows);

std::string to_csv(const ExperimentReport& r);
std::string to_csv(const GoodnessOfFit& g);
std::string to_csv(const std::vector<Table1Row>& rows);
/// experiment,s,n,trial,value rows; requires keep_trials.
std::string trials_to_csv(const ExperimentReport& r);

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first
/// exception by index is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace gwpeel
