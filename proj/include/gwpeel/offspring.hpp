#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gwpeel/random.hpp"

namespace gwpeel {

/// Thrown for malformed or inadmissible offspring laws.
class DistributionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Walker/Vose alias table over {0, ..., K}.
class AliasTable {
  public:
    AliasTable() = default;
    explicit AliasTable(const std::vector<double>& weights);

    int sample(RandomStream& rng) const noexcept;
    bool empty() const noexcept { return prob_.empty(); }

  private:
    std::vector<double> prob_;
    std::vector<int> alias_;
};

enum class Family { finite_support, poisson1, geometric_half, binomial, tary, uniform_set };

enum class Criticality { require_critical, allow_subcritical };

class SizeBiasedLaw;

/// Offspring law xi of a Bienaymé–Galton–Watson tree.
///
/// Six families are supported: an explicit finite pmf, Poisson(1), the
/// geometric law p_i = 2^-(i+1), Binomial(d, 1/d), Flajolet's t-ary law
/// (p_0 = 1 - 1/t, p_t = 1/t), and the uniform law on a finite support set.
/// Every family except an explicitly subcritical finite pmf has mean one.
/// Instances are immutable and safe to share across threads.
class OffspringDistribution {
  public:
    static OffspringDistribution finite(std::vector<double> pmf,
                                        Criticality criticality = Criticality::require_critical);
    static OffspringDistribution poisson1();
    static OffspringDistribution geometric_half();
    static OffspringDistribution binomial(int d);
    static OffspringDistribution tary(int t);
    static OffspringDistribution uniform_set(std::vector<int> support);

    /// Parses "binary", "tary:<t>", "cayley", "geometric", "motzkin",
    /// "catalan", "binomial:<d>" or "pmf:<p0,p1,...>".
    static OffspringDistribution parse(std::string_view spec);

    Family family() const noexcept { return family_; }
    /// Canonical spec string; parse(name()) reproduces the law.
    const std::string& name() const noexcept { return name_; }

    double pmf(int i) const noexcept;
    /// Largest i with p_i > 0, or nullopt for infinite support.
    std::optional<int> max_degree() const noexcept;
    /// p_0..p_K for finite supports; empty for Poisson1 and GeometricHalf.
    std::vector<double> finite_pmf() const;

    double p0() const noexcept { return pmf(0); }
    double p1() const noexcept { return pmf(1); }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }
    bool is_critical() const noexcept { return critical_; }

    /// min{i > 1 : p_i != 0}; only defined when p_1 = 0.
    std::optional<int> kappa() const noexcept;

    /// Generating function f(s) = E s^xi on [0, 1]; throws std::domain_error outside.
    template <std::floating_point R>
    R pgf(R s) const;
    /// f'(s) on [0, 1].
    template <std::floating_point R>
    R pgf_prime(R s) const;
    /// Secant slope (f(a) - f(b)) / (a - b), evaluated without cancellation;
    /// equals f'(a) when a == b.
    template <std::floating_point R>
    R pgf_slope(R a, R b) const;

    int sample(RandomStream& rng) const noexcept;

    /// Law of the spine degree zeta of Kesten's tree, P{zeta = i} = i p_i.
    SizeBiasedLaw size_biased() const;

  private:
    OffspringDistribution() = default;
    void finalize(Criticality criticality);

    Family family_ = Family::finite_support;
    int parameter_ = 0;
    std::string name_;
    std::vector<long double> coeffs_;
    double mean_ = 0.0;
    double variance_ = 0.0;
    bool critical_ = true;
    AliasTable alias_;
};

/// Sampler for the size-biased law i p_i of a critical offspring law.
class SizeBiasedLaw {
  public:
    int sample(RandomStream& rng) const noexcept;
    double pmf(int i) const noexcept;
    /// E zeta = sigma^2 + 1.
    double mean() const noexcept { return mean_; }

  private:
    friend class OffspringDistribution;
    SizeBiasedLaw() = default;

    Family family_ = Family::finite_support;
    std::vector<double> weights_;
    AliasTable alias_;
    double mean_ = 0.0;
};

}  // namespace gwpeel
