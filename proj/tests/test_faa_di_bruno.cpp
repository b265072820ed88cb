#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "qmcx/faa_di_bruno.hpp"
#include "qmcx/hash.hpp"
#include "quad_oracle.hpp"

using namespace qmcx;

namespace {

// Independent partition oracle: insert each element into an existing block
// or open a new one (no restricted-growth strings involved).
void brute_partitions(const std::vector<int>& elems, std::size_t next,
                      std::vector<std::vector<int>>& blocks,
                      std::vector<std::vector<std::vector<int>>>& out) {
    if (next == elems.size()) {
        out.push_back(blocks);
        return;
    }
    for (auto& block : blocks) {
        block.push_back(elems[next]);
        brute_partitions(elems, next + 1, blocks, out);
        block.pop_back();
    }
    blocks.push_back({elems[next]});
    brute_partitions(elems, next + 1, blocks, out);
    blocks.pop_back();
}

long long brute_labeled_count(int n, int d) {
    std::vector<int> elems(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) elems[static_cast<std::size_t>(i)] = i;
    std::vector<std::vector<std::vector<int>>> parts;
    std::vector<std::vector<int>> blocks;
    brute_partitions(elems, 0, blocks, parts);
    long long total = 0;
    for (const auto& p : parts) {
        long long labelings = 1;
        for (std::size_t r = 0; r < p.size(); ++r) labelings *= d;
        total += labelings;
    }
    return total;
}

// canonical fingerprint of a term, independent of block order
std::multiset<std::pair<std::uint32_t, int>> fingerprint(const FaaTerm& term) {
    std::multiset<std::pair<std::uint32_t, int>> fp;
    for (std::size_t r = 0; r < term.blocks.size(); ++r)
        fp.insert({term.blocks[r].mask(), term.labels[r]});
    return fp;
}

// tau(u) = u_1 u_2 as a transform, with closed-form partials
class BilinearTransform final : public Transform {
  public:
    BilinearTransform()
        : Transform(TransformKind::Identity, 2, 1, WeightKind::UnitVolume,
                    {DomainKind::UnitSquare, 1}) {}

  private:
    void apply_impl(std::span<const double> u, std::span<double> x) const override {
        x[0] = u[0] * u[1];
    }
    double partial_impl(int, VarSet v, std::span<const double> u) const override {
        if (v == VarSet::of({0})) return u[1];
        if (v == VarSet::of({1})) return u[0];
        if (v == VarSet::of({0, 1})) return 1.0;
        return 0.0;
    }
};

// tau(u) = g(u_1 + ... + u_m) with g = sin, so every partial over a block
// of size c equals the c-th derivative of sin at the summed argument.
class SymmetricSineTransform final : public Transform {
  public:
    explicit SymmetricSineTransform(int m)
        : Transform(TransformKind::Identity, m, 1, WeightKind::UnitVolume,
                    {DomainKind::UnitSquare, 1}) {}

    static double sine_derivative(int order, double s) {
        switch (order % 4) {
            case 0: return std::sin(s);
            case 1: return std::cos(s);
            case 2: return -std::sin(s);
            default: return -std::cos(s);
        }
    }

  private:
    void apply_impl(std::span<const double> u, std::span<double> x) const override {
        double s = 0.0;
        for (double ui : u) s += ui;
        x[0] = std::sin(s);
    }
    double partial_impl(int, VarSet v, std::span<const double> u) const override {
        double s = 0.0;
        for (double ui : u) s += ui;
        return sine_derivative(v.count(), s);
    }
};

}  // namespace

TEST_CASE("enumerate_kl worked examples") {
    // v = {1,2}, s = 1, lambda = (1): one block carrying the only label
    auto terms = enumerate_kl(1, VarSet::of({0, 1}), {1});
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].blocks == std::vector<VarSet>{VarSet::of({0, 1})});
    CHECK(terms[0].labels == std::vector<int>{0});

    // v = {1,2}, s = 2, lambda = (2): singletons in canonical order
    terms = enumerate_kl(2, VarSet::of({0, 1}), {2});
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].blocks == std::vector<VarSet>{VarSet::of({0}), VarSet::of({1})});
    CHECK(terms[0].labels == std::vector<int>{0, 0});

    // label-count mismatch gives the empty set
    CHECK(enumerate_kl(2, VarSet::of({0, 1}), {1}).empty());
}

TEST_CASE("term counts match the Stirling-number formula and the Bell numbers") {
    auto c41 = term_counts(4, 1);
    CHECK(c41.per_block_count == std::vector<long long>{1, 7, 6, 1});
    CHECK(c41.total == 15);

    auto c1d = term_counts(1, 3);
    CHECK(c1d.per_block_count == std::vector<long long>{3});
    CHECK(c1d.total == 3);

    auto c32 = term_counts(3, 2);
    CHECK(c32.per_block_count == std::vector<long long>{2, 12, 8});
    CHECK(c32.total == 22);

    const long long bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
    for (int n = 1; n <= 8; ++n) CHECK(term_counts(n, 1).total == bell[n]);
}

TEST_CASE("enumeration counts agree with an independent brute-force oracle") {
    for (int n = 1; n <= 8; ++n) {
        for (int d = 1; d <= 3; ++d) {
            VarSet v = VarSet::full(n);
            auto counts = term_counts(n, d);
            CHECK(counts.total == brute_labeled_count(n, d));
            if (n <= 6) {
                auto terms = enumerate_all_terms(v, d);
                CHECK(static_cast<long long>(terms.size()) == counts.total);
            }
        }
    }
}

TEST_CASE("every emitted term is a valid canonical labeled partition") {
    for (int n = 1; n <= 6; ++n) {
        for (int d = 1; d <= 3; ++d) {
            VarSet v = VarSet::full(n);
            auto terms = enumerate_all_terms(v, d);
            std::set<std::multiset<std::pair<std::uint32_t, int>>> seen;
            std::map<int, long long> per_s;
            for (const auto& term : terms) {
                VarSet unions;
                for (std::size_t r = 0; r < term.blocks.size(); ++r) {
                    CHECK_FALSE(term.blocks[r].empty());
                    CHECK(unions.disjoint(term.blocks[r]));
                    unions = unions.unite(term.blocks[r]);
                    CHECK(term.labels[r] >= 0);
                    CHECK(term.labels[r] < d);
                    if (r > 0) CHECK(block_less(term.blocks[r - 1], term.blocks[r]));
                }
                CHECK(unions == v);
                Lambda lam = term.lambda(d);
                int total = 0;
                for (int c : lam) total += c;
                CHECK(total == term.block_count());
                CHECK(seen.insert(fingerprint(term)).second);  // no duplicates
                ++per_s[term.block_count()];
            }
            auto counts = term_counts(n, d);
            for (int s = 1; s <= n; ++s)
                CHECK(per_s[s] == counts.per_block_count[static_cast<std::size_t>(s - 1)]);
        }
    }
}

TEST_CASE("enumerate_kl partitions the full term set by (s, lambda)") {
    VarSet v = VarSet::full(4);
    const int d = 2;
    auto all = enumerate_all_terms(v, d);
    long long recovered = 0;
    for (int s = 1; s <= 4; ++s) {
        // iterate all lambda with |lambda| = s
        for (int l0 = 0; l0 <= s; ++l0) {
            Lambda lam = {l0, s - l0};
            recovered += static_cast<long long>(enumerate_kl(s, v, lam).size());
        }
    }
    CHECK(recovered == static_cast<long long>(all.size()));
}

TEST_CASE("compose_partial on a quadratic of a bilinear map") {
    // f(y) = y^2, tau = u_1 u_2: the mixed partial of u_1^2 u_2^2 is 4 u_1 u_2
    BilinearTransform tau;
    auto f = DerivOracle::polynomial(1, {{2}}, {1.0});
    std::vector<double> u = {0.3, 0.7};
    auto r = compose_partial(f, tau, VarSet::of({0, 1}), u);
    CHECK_FALSE(r.approximate);
    CHECK(r.value == doctest::Approx(0.84).epsilon(1e-14));
    CHECK(r.terms == term_counts(2, 1).total);
}

TEST_CASE("linear f collapses the expansion to a single tau partial") {
    auto tau = make_transform(TransformKind::FwAd, 3);
    auto f = DerivOracle::polynomial(3, {{1, 0, 0}}, {1.0});
    std::vector<double> u = {0.3, 0.4, 0.5};
    for (std::uint32_t mask = 1; mask < 8; ++mask) {
        VarSet v(mask);
        auto r = compose_partial(f, *tau, v, u);
        CHECK(r.value == doctest::Approx(tau->partial(0, v, u)).epsilon(1e-13));
    }
}

TEST_CASE("univariate chain rule pattern at order four") {
    // grouping by block count s reproduces
    // h_4 = f_4 g_1^4 + 6 f_3 g_1^2 g_2 + (3 g_2^2 + 4 g_1 g_3) f_2 + f_1 g_4
    SymmetricSineTransform tau(4);
    auto f = DerivOracle::exp_linear(1, {1.0});
    std::vector<double> u = {0.11, 0.23, 0.31, 0.17};
    double s = 0.11 + 0.23 + 0.31 + 0.17;

    auto g = [&](int k) { return SymmetricSineTransform::sine_derivative(k, s); };
    double fk = std::exp(std::sin(s));  // every derivative of exp equals itself

    VarSet v = VarSet::full(4);
    auto r = compose_partial(f, tau, v, u);
    double expected = fk * (std::pow(g(1), 4) + 6.0 * g(1) * g(1) * g(2) +
                            3.0 * g(2) * g(2) + 4.0 * g(1) * g(3) + g(4));
    CHECK(r.value == doctest::Approx(expected).epsilon(1e-12));

    // per-s contributions carry the classical coefficients
    auto terms = enumerate_all_terms(v, 1);
    std::map<int, double> per_s;
    for (const auto& term : terms) {
        double prod = 1.0;
        for (const auto& block : term.blocks) prod *= g(block.count());
        per_s[term.block_count()] += prod;
    }
    CHECK(per_s[4] == doctest::Approx(std::pow(g(1), 4)).epsilon(1e-12));
    CHECK(per_s[3] == doctest::Approx(6.0 * g(1) * g(1) * g(2)).epsilon(1e-12));
    CHECK(per_s[2] == doctest::Approx(3.0 * g(2) * g(2) + 4.0 * g(1) * g(3)).epsilon(1e-12));
    CHECK(per_s[1] == doctest::Approx(g(4)).epsilon(1e-12));
}

TEST_CASE("compose_partial matches quad-precision finite differences") {
    std::uint64_t state = 123;
    auto next = [&state](double lo, double hi) {
        state = mix64(state);
        return lo + (hi - lo) * to_unit_double(state);
    };

    std::vector<std::unique_ptr<Transform>> taus;
    taus.push_back(make_transform(TransformKind::FwAd, 3));
    taus.push_back(make_transform(TransformKind::SimplexPower, 3, {1.6, 0.85, 0.6}));
    taus.push_back(make_transform(TransformKind::Identity, 3));

    auto poly = DerivOracle::polynomial(3, {{2, 1, 0}, {0, 0, 3}, {1, 1, 1}}, {1.0, -0.5, 2.0});
    auto expf = DerivOracle::exp_linear(3, {0.7, -0.4, 0.2});

    for (const auto& tau : taus) {
        for (const DerivOracle* f : {&poly, &expf}) {
            for (int trial = 0; trial < 8; ++trial) {
                std::vector<double> u = {next(0.2, 0.8), next(0.2, 0.8), next(0.2, 0.8)};
                std::uint32_t mask = 1 + static_cast<std::uint32_t>(next(0, 1) * 7) % 7;
                VarSet v(mask);
                auto r = compose_partial(*f, *tau, v, u);

                std::vector<testing::quad> uq(u.begin(), u.end());
                bool is_poly = (f == &poly);
                auto composed = [&](const std::vector<testing::quad>& p) {
                    testing::quad x[3];
                    for (int j = 0; j < 3; ++j) x[j] = testing::quad_component(*tau, j, p);
                    if (is_poly)
                        return x[0] * x[0] * x[1] - 0.5q * x[2] * x[2] * x[2] +
                               2.0q * x[0] * x[1] * x[2];
                    return expq(0.7q * x[0] - 0.4q * x[1] + 0.2q * x[2]);
                };
                double fd = static_cast<double>(testing::quad_central_difference(composed, uq, v));
                CHECK(std::abs(r.value - fd) <= 1e-5 * (1.0 + std::abs(r.value)));
            }
        }
    }
}

TEST_CASE("guard rails") {
    CHECK_THROWS_AS(enumerate_all_terms(VarSet{}, 2), std::invalid_argument);
    CHECK_THROWS_WITH_AS(enumerate_all_terms(VarSet::full(13), 1), doctest::Contains("|v| > 12"),
                         std::invalid_argument);
    CHECK_THROWS_AS(term_counts(13, 1), std::invalid_argument);

    BilinearTransform tau;
    auto f = DerivOracle::polynomial(1, {{2}}, {1.0});
    f.max_order = 1;
    std::vector<double> u = {0.3, 0.7};
    CHECK_THROWS_WITH_AS(compose_partial(f, tau, VarSet::of({0, 1}), u),
                         doctest::Contains("order"), std::invalid_argument);
}
