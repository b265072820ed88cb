#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmcx/point_set.hpp"
#include "qmcx/transforms.hpp"

namespace qmcx {

/// Test integrand on the target domain, optionally with a known integral
/// (normalized by the domain volume) for RMSE computation.
struct Integrand {
    enum class Kind { Monomial, SumOfMonomials, SmoothTest, Custom };

    Kind kind = Kind::Custom;
    std::string description;
    std::function<double(std::span<const double>)> eval;
    std::optional<double> exact_value;

    /// prod_j x_j^{q_j} on the ordered simplex A_d; the exact normalized
    /// integral comes from exact_monomial_integral.
    static Integrand monomial_on_simplex(std::vector<double> q);

    /// Linear combination of simplex monomials.
    static Integrand sum_of_monomials_on_simplex(std::vector<std::vector<double>> qs,
                                                 std::vector<double> coeffs);

    /// exp(c . x), no exact value attached.
    static Integrand smooth_exp(std::vector<double> c);

    static Integrand custom(std::function<double(std::span<const double>)> f,
                            std::optional<double> exact, std::string description = "custom");
};

/// Weighted estimator mean(w_i f(tau(u_i))) with w = 1 for UnitVolume and
/// Ratio kinds and w = d! J(u) for Jacobian kinds. Estimates the
/// volume-normalized integral of f over the target domain (the expectation
/// under the pushforward density for Ratio kinds).
double estimate(const Integrand& f, const Transform& t, const PointSet& pts);

/// Normalized moment d! * int_{A_d} prod_j x_j^{q_j} dx
///                 = d! * prod_k 1/(k + q_1 + ... + q_k).
double exact_monomial_integral(std::span<const double> q, int d);

struct EssFactor {
    double value = 0.0;
    bool divergent_second_moment = false;
};

/// Effective-sample-size multiplier (int J)^2 / int J^2 of the simplex
/// power-map weight: prod_j (2 j a_j - 1) / (j a_j)^2, or 0 with a flag
/// when some 2 j a_j <= 1 makes int J^2 infinite.
EssFactor ess_factor(std::span<const double> a, int d);

enum class SamplerKind { MC, OwenNet, LinearNet };

SamplerKind sampler_kind_from_name(const std::string& name);
std::string sampler_kind_name(SamplerKind kind);

struct ConvergenceRecord {
    std::size_t n = 0;
    double rmse = 0.0;
    int replications = 0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRecord> records;
    double slope = 0.0;      // OLS on (log2 n, log2 rmse), top fit_points records
    double intercept = 0.0;
    double r2 = 0.0;
    int fit_points = 6;
    bool approximate_reference = false;  // RMSE against a brute-force reference

    SamplerKind sampler = SamplerKind::MC;
    std::string transform_name;
    std::string integrand_name;
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> replicate_seeds;  // row-major: n index, then replicate
};

struct ConvergeConfig {
    int log2_n_min = 6;
    int log2_n_max = 14;
    int replications = 32;
    std::uint64_t master_seed = 1;
    int fit_points = 6;  // slope fitted on this many of the largest n
};

/// RMSE against the exact value over independently seeded replications per
/// sample size, plus a fitted log-log slope. Replicate seeds expand from
/// the master seed through a counter hash and are echoed in the report.
ConvergenceReport converge(const Integrand& f, const Transform& t, SamplerKind sampler,
                           const ConvergeConfig& config);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares of log2(rmse) on log2(n). Needs >= 3 records.
SlopeFit fit_slope(std::span<const ConvergenceRecord> records);

}  // namespace qmcx
