#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qmcx/transforms.hpp"
#include "qmcx/var_set.hpp"

namespace qmcx {

/// Multi-index lambda in N_0^d: lambda[i] counts how many blocks carry
/// component label i.
using Lambda = std::vector<int>;

/// One term of the reduced multivariate chain-rule expansion of
/// d^v (f o tau): an ordered set partition of v into blocks l_1 < ... < l_s
/// (cardinality, then lexicographic) with a component label k_r per block.
struct FaaTerm {
    std::vector<VarSet> blocks;  // disjoint, union v, canonically ordered
    std::vector<int> labels;     // k_r in 0..d-1, one per block

    int block_count() const { return static_cast<int>(blocks.size()); }
    Lambda lambda(int d) const;
};

/// Derivative oracle for the outer function f: eval(lambda, x) returns the
/// partial of f at x taken lambda[i] times with respect to x_i. Order-zero
/// lambda must return f(x) itself.
struct DerivOracle {
    int dim = 0;
    int max_order = 0;
    std::function<double(const Lambda&, std::span<const double>)> eval;

    /// f(x) = sum_t coeff_t * prod_j x_j^{powers_t[j]} with integer powers.
    static DerivOracle polynomial(int dim, std::vector<std::vector<int>> powers,
                                  std::vector<double> coeffs);

    /// f(x) = scale * exp(c . x).
    static DerivOracle exp_linear(int dim, std::vector<double> c, double scale = 1.0);
};

/// All terms with exactly s blocks realizing the label multi-index lambda.
/// Empty unless |lambda| = s (each block carries one label).
std::vector<FaaTerm> enumerate_kl(int s, VarSet v, const Lambda& lambda);

/// All terms over 1 <= s <= |v| and every label assignment into 0..d-1,
/// in deterministic order. Total count is sum_s S(|v|,s) d^s. Refuses
/// |v| > 12.
std::vector<FaaTerm> enumerate_all_terms(VarSet v, int d);

struct TermCounts {
    std::vector<long long> per_block_count;  // index s-1
    long long total = 0;
};

/// Counts per block count s: S(cardinality, s) * d^s, and their sum
/// (the Bell number when d = 1).
TermCounts term_counts(int cardinality, int d);

struct ComposeResult {
    double value = 0.0;
    bool approximate = false;  // true when any tau-partial fell back to FD
    long long terms = 0;
};

/// d^v (f o tau)(u) assembled from the oracle derivatives of f and the
/// analytic mixed partials of tau. Missing tau-partials fall back to
/// central finite differences and mark the result approximate.
ComposeResult compose_partial(const DerivOracle& f, const Transform& tau, VarSet v,
                              std::span<const double> u);

}  // namespace qmcx
