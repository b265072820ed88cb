#include "qmcx/faa_di_bruno.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qmcx {

Lambda FaaTerm::lambda(int d) const {
    Lambda lam(static_cast<std::size_t>(d), 0);
    for (int k : labels) ++lam[static_cast<std::size_t>(k)];
    return lam;
}

DerivOracle DerivOracle::polynomial(int dim, std::vector<std::vector<int>> powers,
                                    std::vector<double> coeffs) {
    if (powers.size() != coeffs.size())
        throw std::invalid_argument("polynomial oracle: one coefficient per power tuple");
    for (const auto& p : powers)
        if (static_cast<int>(p.size()) != dim)
            throw std::invalid_argument("polynomial oracle: power tuple of wrong dimension");
    DerivOracle oracle;
    oracle.dim = dim;
    oracle.max_order = 64;  // derivatives past the degree are exact zeros
    oracle.eval = [dim, powers = std::move(powers),
                   coeffs = std::move(coeffs)](const Lambda& lam, std::span<const double> x) {
        double sum = 0.0;
        for (std::size_t t = 0; t < powers.size(); ++t) {
            double term = coeffs[t];
            for (int j = 0; j < dim && term != 0.0; ++j) {
                int e = powers[t][static_cast<std::size_t>(j)];
                int k = lam[static_cast<std::size_t>(j)];
                if (k > e) {
                    term = 0.0;
                    break;
                }
                double falling = 1.0;
                for (int i = 0; i < k; ++i) falling *= e - i;
                term *= falling * std::pow(x[j], e - k);
            }
            sum += term;
        }
        return sum;
    };
    return oracle;
}

DerivOracle DerivOracle::exp_linear(int dim, std::vector<double> c, double scale) {
    if (static_cast<int>(c.size()) != dim)
        throw std::invalid_argument("exp_linear oracle: coefficient vector of wrong dimension");
    DerivOracle oracle;
    oracle.dim = dim;
    oracle.max_order = 64;
    oracle.eval = [dim, c = std::move(c), scale](const Lambda& lam, std::span<const double> x) {
        double dot = 0.0, coef = scale;
        for (int j = 0; j < dim; ++j) {
            dot += c[static_cast<std::size_t>(j)] * x[j];
            for (int i = 0; i < lam[static_cast<std::size_t>(j)]; ++i)
                coef *= c[static_cast<std::size_t>(j)];
        }
        return coef * std::exp(dot);
    };
    return oracle;
}

namespace {

void sort_blocks(std::vector<VarSet>& blocks, std::vector<int>* labels) {
    std::vector<std::size_t> order(blocks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return block_less(blocks[a], blocks[b]); });
    std::vector<VarSet> nb(blocks.size());
    for (std::size_t i = 0; i < order.size(); ++i) nb[i] = blocks[order[i]];
    blocks = std::move(nb);
    if (labels) {
        std::vector<int> nl(labels->size());
        for (std::size_t i = 0; i < order.size(); ++i) nl[i] = (*labels)[order[i]];
        *labels = std::move(nl);
    }
}

// Set partitions of the elements of v via restricted growth strings. Each
// partition is reported with blocks already in canonical order.
template <typename F>
void for_each_partition(VarSet v, const F& visit) {
    auto elems = v.elements();
    const int n = static_cast<int>(elems.size());
    if (n == 0) return;
    std::vector<int> rgs(static_cast<std::size_t>(n), 0);
    while (true) {
        int nblocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
        std::vector<VarSet> blocks(static_cast<std::size_t>(nblocks));
        for (int i = 0; i < n; ++i)
            blocks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])] =
                blocks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])].with(elems[i]);
        sort_blocks(blocks, nullptr);
        visit(blocks);

        // next restricted growth string
        int i = n - 1;
        for (; i > 0; --i) {
            int cap = 0;
            for (int k = 0; k < i; ++k) cap = std::max(cap, rgs[static_cast<std::size_t>(k)]);
            if (rgs[static_cast<std::size_t>(i)] <= cap) break;
        }
        if (i == 0) return;
        ++rgs[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k) rgs[static_cast<std::size_t>(k)] = 0;
    }
}

void check_v(VarSet v) {
    if (v.empty()) throw std::invalid_argument("the derivative index set v must be non-empty");
    if (v.count() > 12)
        throw std::invalid_argument("|v| > 12 refused: the number of terms grows like the Bell numbers");
}

}  // namespace

std::vector<FaaTerm> enumerate_kl(int s, VarSet v, const Lambda& lambda) {
    check_v(v);
    if (s < 1 || s > v.count()) throw std::invalid_argument("enumerate_kl: need 1 <= s <= |v|");
    int lam_total = 0;
    for (int c : lambda) {
        if (c < 0) throw std::invalid_argument("enumerate_kl: lambda must be non-negative");
        lam_total += c;
    }
    if (lam_total < 1 || lam_total > v.count())
        throw std::invalid_argument("enumerate_kl: need 1 <= |lambda| <= |v|");

    std::vector<FaaTerm> terms;
    if (lam_total != s) return terms;  // s labels realize lambda only if |lambda| = s

    const int d = static_cast<int>(lambda.size());
    for_each_partition(v, [&](const std::vector<VarSet>& blocks) {
        if (static_cast<int>(blocks.size()) != s) return;
        // all distinct label sequences with the prescribed multiplicities
        std::vector<int> label_seq;
        Lambda remaining = lambda;
        std::function<void()> assign = [&]() {
            if (static_cast<int>(label_seq.size()) == s) {
                terms.push_back({blocks, label_seq});
                return;
            }
            for (int k = 0; k < d; ++k) {
                if (remaining[static_cast<std::size_t>(k)] == 0) continue;
                --remaining[static_cast<std::size_t>(k)];
                label_seq.push_back(k);
                assign();
                label_seq.pop_back();
                ++remaining[static_cast<std::size_t>(k)];
            }
        };
        assign();
    });
    return terms;
}

std::vector<FaaTerm> enumerate_all_terms(VarSet v, int d) {
    check_v(v);
    if (d < 1) throw std::invalid_argument("enumerate_all_terms: d must be >= 1");

    std::vector<FaaTerm> terms;
    for_each_partition(v, [&](const std::vector<VarSet>& blocks) {
        const int s = static_cast<int>(blocks.size());
        std::vector<int> label_seq(static_cast<std::size_t>(s), 0);
        while (true) {
            terms.push_back({blocks, label_seq});
            int i = s - 1;
            while (i >= 0 && label_seq[static_cast<std::size_t>(i)] == d - 1) {
                label_seq[static_cast<std::size_t>(i)] = 0;
                --i;
            }
            if (i < 0) break;
            ++label_seq[static_cast<std::size_t>(i)];
        }
    });
    return terms;
}

TermCounts term_counts(int cardinality, int d) {
    if (cardinality < 1 || cardinality > 12)
        throw std::invalid_argument("term_counts: cardinality must be in 1..12");
    if (d < 1) throw std::invalid_argument("term_counts: d must be >= 1");

    // Stirling numbers of the second kind S(n, s)
    std::vector<std::vector<long long>> stirling(
        static_cast<std::size_t>(cardinality) + 1,
        std::vector<long long>(static_cast<std::size_t>(cardinality) + 1, 0));
    stirling[0][0] = 1;
    for (int n = 1; n <= cardinality; ++n)
        for (int s = 1; s <= n; ++s)
            stirling[n][s] = stirling[n - 1][s - 1] + s * stirling[n - 1][s];

    TermCounts out;
    out.per_block_count.resize(static_cast<std::size_t>(cardinality));
    for (int s = 1; s <= cardinality; ++s) {
        long long pow_d = 1;
        for (int i = 0; i < s; ++i) pow_d *= d;
        out.per_block_count[static_cast<std::size_t>(s - 1)] =
            stirling[static_cast<std::size_t>(cardinality)][static_cast<std::size_t>(s)] * pow_d;
        out.total += out.per_block_count[static_cast<std::size_t>(s - 1)];
    }
    return out;
}

ComposeResult compose_partial(const DerivOracle& f, const Transform& tau, VarSet v,
                              std::span<const double> u) {
    check_v(v);
    if (f.dim != tau.output_dim())
        throw std::invalid_argument("compose_partial: f dimension must match tau output dimension");
    if (v.count() > f.max_order)
        throw std::invalid_argument("compose_partial: |v| exceeds the supported order of f");

    auto x = tau.apply(u);
    auto terms = enumerate_all_terms(v, tau.output_dim());

    ComposeResult result;
    result.terms = static_cast<long long>(terms.size());

    std::map<Lambda, double> f_cache;
    std::map<std::pair<int, std::uint32_t>, double> tau_cache;

    for (const FaaTerm& term : terms) {
        Lambda lam = term.lambda(tau.output_dim());
        auto fit = f_cache.find(lam);
        if (fit == f_cache.end()) fit = f_cache.emplace(lam, f.eval(lam, x)).first;
        if (fit->second == 0.0) continue;

        double prod = fit->second;
        for (int r = 0; r < term.block_count() && prod != 0.0; ++r) {
            auto key = std::make_pair(term.labels[static_cast<std::size_t>(r)],
                                      term.blocks[static_cast<std::size_t>(r)].mask());
            auto it = tau_cache.find(key);
            if (it == tau_cache.end()) {
                double val = partial_or_fd(tau, key.first, term.blocks[static_cast<std::size_t>(r)],
                                           u, &result.approximate);
                it = tau_cache.emplace(key, val).first;
            }
            prod *= it->second;
        }
        result.value += prod;
    }
    return result;
}

}  // namespace qmcx
