#include "gwpeel/offspring.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

namespace gwpeel {
namespace {

constexpr double kSumTolerance = 1e-12;
constexpr double kMeanTolerance = 1e-9;

template <std::floating_point R>
void check_unit_interval(R s, const char* what) {
    if (!(s >= R(0) && s <= R(1))) {
        throw std::domain_error(std::string(what) + ": argument outside [0, 1]");
    }
}

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

int parse_int(std::string_view text, std::string_view what) {
    int value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw DistributionError("malformed integer parameter for " + std::string(what) + ": '" +
                                std::string(text) + "'");
    }
    return value;
}

std::vector<std::string_view> split_commas(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        parts.push_back(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                           : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return parts;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

int sample_poisson1(RandomStream& rng) noexcept {
    for (;;) {
        double u = rng.uniform();
        double p = std::exp(-1.0);
        for (int k = 0; p > 0.0; p /= ++k) {
            if (u < p) return k;
            u -= p;
        }
    }
}

// Number of failures before the first success with p = 1/2.
int sample_geometric_half(RandomStream& rng) noexcept {
    int failures = 0;
    for (;;) {
        const auto bits = rng();
        if (bits != 0) return failures + std::countr_zero(bits);
        failures += 64;
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// AliasTable

AliasTable::AliasTable(const std::vector<double>& weights) : prob_(weights.size()), alias_(weights.size()) {
    const auto k = weights.size();
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> scaled(k);
    std::vector<int> small, large;
    for (std::size_t i = 0; i < k; ++i) {
        scaled[i] = weights[i] * static_cast<double>(k) / total;
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<int>(i));
    }
    while (!small.empty() && !large.empty()) {
        const int s = small.back();
        small.pop_back();
        const int l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (int i : large) prob_[i] = 1.0, alias_[i] = i;
    for (int i : small) prob_[i] = 1.0, alias_[i] = i;
}

int AliasTable::sample(RandomStream& rng) const noexcept {
    const double u = rng.uniform() * static_cast<double>(prob_.size());
    const auto column = static_cast<std::size_t>(u);
    return (u - static_cast<double>(column)) < prob_[column] ? static_cast<int>(column) : alias_[column];
}

// ---------------------------------------------------------------------------
// Construction

void OffspringDistribution::finalize(Criticality criticality) {
    if (family_ == Family::poisson1 || family_ == Family::geometric_half) {
        mean_ = 1.0;
        variance_ = family_ == Family::poisson1 ? 1.0 : 2.0;
        critical_ = true;
        return;
    }
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0L) coeffs_.pop_back();
    long double total = 0, first = 0, second = 0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        const long double p = coeffs_[i];
        if (!(p >= 0.0L && p <= 1.0L)) {
            throw DistributionError("probability p_" + std::to_string(i) + " outside [0, 1]");
        }
        total += p;
        first += static_cast<long double>(i) * p;
        second += static_cast<long double>(i) * static_cast<long double>(i) * p;
    }
    if (std::fabs(static_cast<double>(total) - 1.0) > kSumTolerance) {
        throw DistributionError("probabilities sum to " + format_real(static_cast<double>(total)) +
                                ", not 1");
    }
    if (coeffs_[0] <= 0.0L) {
        throw DistributionError("p_0 must be positive (otherwise trees are infinite)");
    }
    mean_ = static_cast<double>(first);
    variance_ = static_cast<double>(second - first * first);
    critical_ = std::fabs(mean_ - 1.0) <= kMeanTolerance;
    if (criticality == Criticality::require_critical) {
        if (variance_ <= 0.0) {
            throw DistributionError("offspring law has zero variance");
        }
        if (!critical_) {
            throw DistributionError("offspring mean " + format_real(mean_) + " is not 1");
        }
    } else if (mean_ > 1.0 + kMeanTolerance) {
        throw DistributionError("supercritical offspring law (mean " + format_real(mean_) + ")");
    }
    std::vector<double> weights(coeffs_.begin(), coeffs_.end());
    alias_ = AliasTable(weights);
}

OffspringDistribution OffspringDistribution::finite(std::vector<double> pmf, Criticality criticality) {
    if (pmf.empty()) throw DistributionError("empty pmf");
    OffspringDistribution d;
    d.family_ = Family::finite_support;
    d.coeffs_.assign(pmf.begin(), pmf.end());
    d.finalize(criticality);
    d.name_ = "pmf:";
    for (std::size_t i = 0; i < d.coeffs_.size(); ++i) {
        if (i > 0) d.name_ += ',';
        d.name_ += format_real(static_cast<double>(d.coeffs_[i]));
    }
    return d;
}

OffspringDistribution OffspringDistribution::poisson1() {
    OffspringDistribution d;
    d.family_ = Family::poisson1;
    d.name_ = "cayley";
    d.finalize(Criticality::require_critical);
    return d;
}

OffspringDistribution OffspringDistribution::geometric_half() {
    OffspringDistribution d;
    d.family_ = Family::geometric_half;
    d.name_ = "geometric";
    d.finalize(Criticality::require_critical);
    return d;
}

OffspringDistribution OffspringDistribution::binomial(int d) {
    if (d < 2) throw DistributionError("binomial order must be >= 2");
    OffspringDistribution law;
    law.family_ = Family::binomial;
    law.parameter_ = d;
    law.coeffs_.resize(static_cast<std::size_t>(d) + 1);
    const long double p = 1.0L / d;
    long double choose = 1.0L;
    for (int i = 0; i <= d; ++i) {
        law.coeffs_[i] = choose * std::pow(p, static_cast<long double>(i)) *
                         std::pow(1.0L - p, static_cast<long double>(d - i));
        choose = choose * static_cast<long double>(d - i) / static_cast<long double>(i + 1);
    }
    law.name_ = d == 2 ? "catalan" : "binomial:" + std::to_string(d);
    law.finalize(Criticality::require_critical);
    return law;
}

OffspringDistribution OffspringDistribution::tary(int t) {
    if (t < 2) throw DistributionError("t-ary arity must be >= 2");
    OffspringDistribution d;
    d.family_ = Family::tary;
    d.parameter_ = t;
    d.coeffs_.assign(static_cast<std::size_t>(t) + 1, 0.0L);
    d.coeffs_[0] = 1.0L - 1.0L / t;
    d.coeffs_[t] = 1.0L / t;
    d.name_ = "tary:" + std::to_string(t);
    d.finalize(Criticality::require_critical);
    return d;
}

OffspringDistribution OffspringDistribution::uniform_set(std::vector<int> support) {
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (support.empty() || support.front() < 0) {
        throw DistributionError("uniform support must be a nonempty set of nonnegative integers");
    }
    OffspringDistribution d;
    d.family_ = Family::uniform_set;
    d.coeffs_.assign(static_cast<std::size_t>(support.back()) + 1, 0.0L);
    for (int i : support) d.coeffs_[i] = 1.0L / static_cast<long double>(support.size());
    if (support == std::vector<int>{0, 2}) {
        d.name_ = "binary";
    } else if (support == std::vector<int>{0, 1, 2}) {
        d.name_ = "motzkin";
    } else {
        d.name_ = "uniform:";
        for (std::size_t i = 0; i < support.size(); ++i) {
            if (i > 0) d.name_ += ',';
            d.name_ += std::to_string(support[i]);
        }
    }
    d.finalize(Criticality::require_critical);
    return d;
}

OffspringDistribution OffspringDistribution::parse(std::string_view spec) {
    spec = trim(spec);
    const auto colon = spec.find(':');
    const auto head = spec.substr(0, colon);
    const auto arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    const bool has_arg = colon != std::string_view::npos;

    if (!has_arg) {
        if (head == "binary") return uniform_set({0, 2});
        if (head == "cayley") return poisson1();
        if (head == "geometric") return geometric_half();
        if (head == "motzkin") return uniform_set({0, 1, 2});
        if (head == "catalan") return binomial(2);
    } else {
        if (head == "tary") return tary(parse_int(arg, "tary"));
        if (head == "binomial") return binomial(parse_int(arg, "binomial"));
        if (head == "uniform") {
            std::vector<int> support;
            for (auto part : split_commas(arg)) support.push_back(parse_int(trim(part), "uniform"));
            return uniform_set(std::move(support));
        }
        if (head == "pmf") {
            std::vector<double> pmf;
            for (auto part : split_commas(arg)) {
                const std::string token(trim(part));
                char* end = nullptr;
                const double value = std::strtod(token.c_str(), &end);
                if (token.empty() || end != token.c_str() + token.size()) {
                    throw DistributionError("malformed probability '" + token + "' in pmf");
                }
                pmf.push_back(value);
            }
            return finite(std::move(pmf));
        }
    }
    throw DistributionError("unknown offspring family '" + std::string(spec) + "'");
}

// ---------------------------------------------------------------------------
// Queries

double OffspringDistribution::pmf(int i) const noexcept {
    if (i < 0) return 0.0;
    switch (family_) {
        case Family::poisson1:
            return std::exp(-1.0 - log_factorial(static_cast<std::uint64_t>(i)));
        case Family::geometric_half:
            return std::ldexp(1.0, -(i + 1));
        default:
            return static_cast<std::size_t>(i) < coeffs_.size() ? static_cast<double>(coeffs_[i]) : 0.0;
    }
}

std::optional<int> OffspringDistribution::max_degree() const noexcept {
    if (family_ == Family::poisson1 || family_ == Family::geometric_half) return std::nullopt;
    return static_cast<int>(coeffs_.size()) - 1;
}

std::vector<double> OffspringDistribution::finite_pmf() const {
    return {coeffs_.begin(), coeffs_.end()};
}

std::optional<int> OffspringDistribution::kappa() const noexcept {
    if (p1() != 0.0) return std::nullopt;
    for (std::size_t i = 2; i < coeffs_.size(); ++i) {
        if (coeffs_[i] != 0.0L) return static_cast<int>(i);
    }
    return std::nullopt;
}

template <std::floating_point R>
R OffspringDistribution::pgf(R s) const {
    check_unit_interval(s, "pgf");
    switch (family_) {
        case Family::poisson1:
            return std::exp(s - R(1));
        case Family::geometric_half:
            return R(1) / (R(2) - s);
        case Family::binomial:
            return std::pow(R(1) + (s - R(1)) / R(parameter_), R(parameter_));
        case Family::tary:
            return R(1) - R(1) / R(parameter_) + std::pow(s, R(parameter_)) / R(parameter_);
        default: {
            R acc = 0;
            for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + static_cast<R>(*it);
            return acc;
        }
    }
}

template <std::floating_point R>
R OffspringDistribution::pgf_prime(R s) const {
    check_unit_interval(s, "pgf_prime");
    switch (family_) {
        case Family::poisson1:
            return std::exp(s - R(1));
        case Family::geometric_half:
            return R(1) / ((R(2) - s) * (R(2) - s));
        case Family::binomial:
            return std::pow(R(1) + (s - R(1)) / R(parameter_), R(parameter_ - 1));
        case Family::tary:
            return std::pow(s, R(parameter_ - 1));
        default: {
            R acc = 0;
            for (std::size_t i = coeffs_.size() - 1; i >= 1; --i) {
                acc = acc * s + static_cast<R>(i) * static_cast<R>(coeffs_[i]);
            }
            return acc;
        }
    }
}

template <std::floating_point R>
R OffspringDistribution::pgf_slope(R a, R b) const {
    check_unit_interval(a, "pgf_slope");
    check_unit_interval(b, "pgf_slope");
    switch (family_) {
        case Family::poisson1:
            if (a == b) return std::exp(b - R(1));
            return std::exp(b - R(1)) * std::expm1(a - b) / (a - b);
        case Family::geometric_half:
            return R(1) / ((R(2) - a) * (R(2) - b));
        default: {
            // Synthetic division of f by (x - b), then Horner at a.
            R quotient_coeff = 0;
            R acc = 0;
            for (std::size_t i = coeffs_.size() - 1; i >= 1; --i) {
                quotient_coeff = static_cast<R>(coeffs_[i]) + b * quotient_coeff;
                acc = acc * a + quotient_coeff;
            }
            return acc;
        }
    }
}

template float OffspringDistribution::pgf(float) const;
template double OffspringDistribution::pgf(double) const;
template long double OffspringDistribution::pgf(long double) const;
template float OffspringDistribution::pgf_prime(float) const;
template double OffspringDistribution::pgf_prime(double) const;
template long double OffspringDistribution::pgf_prime(long double) const;
template float OffspringDistribution::pgf_slope(float, float) const;
template double OffspringDistribution::pgf_slope(double, double) const;
template long double OffspringDistribution::pgf_slope(long double, long double) const;

int OffspringDistribution::sample(RandomStream& rng) const noexcept {
    switch (family_) {
        case Family::poisson1:
            return sample_poisson1(rng);
        case Family::geometric_half:
            return sample_geometric_half(rng);
        default:
            return alias_.sample(rng);
    }
}

// ---------------------------------------------------------------------------
// Size-biased law

SizeBiasedLaw OffspringDistribution::size_biased() const {
    if (!critical_) {
        throw DistributionError("size-biasing requires a critical law (sum of i p_i must be 1)");
    }
    SizeBiasedLaw law;
    law.family_ = family_;
    law.mean_ = variance_ + 1.0;
    if (family_ != Family::poisson1 && family_ != Family::geometric_half) {
        law.weights_.resize(coeffs_.size());
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            law.weights_[i] = static_cast<double>(static_cast<long double>(i) * coeffs_[i]);
        }
        law.alias_ = AliasTable(law.weights_);
    }
    return law;
}

int SizeBiasedLaw::sample(RandomStream& rng) const noexcept {
    switch (family_) {
        case Family::poisson1:
            // i e^-1 / i! = e^-1 / (i-1)!
            return 1 + sample_poisson1(rng);
        case Family::geometric_half:
            // i 2^-(i+1) is the law of 1 + G_1 + G_2.
            return 1 + sample_geometric_half(rng) + sample_geometric_half(rng);
        default:
            return alias_.sample(rng);
    }
}

double SizeBiasedLaw::pmf(int i) const noexcept {
    if (i <= 0) return 0.0;
    switch (family_) {
        case Family::poisson1:
            return std::exp(-1.0 - log_factorial(static_cast<std::uint64_t>(i - 1)));
        case Family::geometric_half:
            return i * std::ldexp(1.0, -(i + 1));
        default:
            return static_cast<std::size_t>(i) < weights_.size() ? weights_[i] : 0.0;
    }
}

}  // namespace gwpeel
