#include "qmcx/point_set.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qmcx/hash.hpp"
#include "qmcx/sobol_directions.hpp"

namespace qmcx {

namespace {

constexpr int kNetDepth = 52;  // fractional bits carried by net points

double fixed_to_double(std::uint64_t x, int depth) {
    return static_cast<double>(x) * std::ldexp(1.0, -depth);
}

std::uint64_t double_to_fixed(double x, int depth) {
    // Net coordinates are exact multiples of 2^-kNetDepth, so this is lossless.
    return static_cast<std::uint64_t>(std::llround(std::ldexp(x, depth)));
}

// Nested uniform scramble of one coordinate value. In base 2 the random
// permutation at a tree node is a bit flip; the node is keyed by the input
// digit prefix, so equal prefixes share flips and the net structure is kept.
std::uint64_t owen_scramble_value(std::uint64_t bits, int in_depth, int out_depth,
                                  std::uint64_t key) {
    std::uint64_t out = 0;
    std::uint64_t prefix = 1;  // sentinel bit keeps levels distinct
    for (int k = 1; k <= out_depth; ++k) {
        std::uint64_t digit = (k <= in_depth) ? (bits >> (in_depth - k)) & 1ULL : 0ULL;
        std::uint64_t flip = hash_combine(key, prefix) & 1ULL;
        out = (out << 1) | (digit ^ flip);
        prefix = (prefix << 1) | digit;
    }
    return out;
}

}  // namespace

int max_net_dim() { return detail::sobol_max_dim(); }

PointSet generate_net(int dim, int m, int base) {
    if (dim < 1) throw std::invalid_argument("generate_net: dim must be >= 1");
    if (m < 0) throw std::invalid_argument("generate_net: m must be >= 0");
    if (base != 2)
        throw std::invalid_argument("no generator matrices for base " + std::to_string(base) +
                                    " (only base 2 is built in)");
    if (dim > detail::sobol_max_dim())
        throw std::invalid_argument("no generator matrices for dimension " + std::to_string(dim) +
                                    " in base 2");
    if (m > 40) throw std::invalid_argument("generate_net: base^m exceeds supported range");

    const std::size_t n = std::size_t{1} << m;
    PointSet ps;
    ps.dim = dim;
    ps.n = n;
    ps.provenance = Provenance::Net;
    ps.base = base;
    ps.resolution = m;
    ps.data.resize(n * static_cast<std::size_t>(dim));

    for (int j = 0; j < dim; ++j) {
        auto v = detail::sobol_direction_integers(j + 1, kNetDepth);
        std::uint64_t x = 0;
        ps.data[0 * dim + j] = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            // Gray-code stepping generates the same point set as XOR over the
            // set bits of i, just in a different order; we want plain index
            // order, so XOR the direction integers of i's bits directly.
            x = 0;
            std::uint64_t idx = i;
            int k = 0;
            while (idx) {
                if (idx & 1ULL) x ^= v[k];
                idx >>= 1;
                ++k;
            }
            ps.data[i * dim + j] = fixed_to_double(x, kNetDepth);
        }
    }
    return ps;
}

PointSet scramble(const PointSet& net, ScrambleMethod method, std::uint64_t seed,
                  int digit_depth) {
    if (net.provenance != Provenance::Net)
        throw std::invalid_argument("scramble: input is already randomized or not a net");
    if (digit_depth < net.resolution)
        throw std::invalid_argument("scramble: digit_depth must be >= the net resolution");
    if (digit_depth > kNetDepth) throw std::invalid_argument("scramble: digit_depth must be <= 52");

    PointSet out = net;
    out.provenance = (method == ScrambleMethod::OwenNested) ? Provenance::OwenScrambled
                                                            : Provenance::LinearScrambled;
    out.seed = seed;

    if (method == ScrambleMethod::OwenNested) {
        for (int j = 0; j < net.dim; ++j) {
            std::uint64_t key = hash3(seed, 0x0eefULL, static_cast<std::uint64_t>(j));
            for (std::size_t i = 0; i < net.n; ++i) {
                std::uint64_t bits = double_to_fixed(net.at(i, j), kNetDepth);
                std::uint64_t scrambled = owen_scramble_value(bits, kNetDepth, digit_depth, key);
                out.data[i * net.dim + j] = fixed_to_double(scrambled, digit_depth);
            }
        }
        return out;
    }

    // Linear scramble: per coordinate, a random nonsingular lower-triangular
    // matrix over GF(2) applied to the digit vector, then a digital shift.
    for (int j = 0; j < net.dim; ++j) {
        std::uint64_t key = hash3(seed, 0x11eaULL, static_cast<std::uint64_t>(j));
        std::vector<std::uint64_t> rows(static_cast<std::size_t>(digit_depth));
        for (int k = 1; k <= digit_depth; ++k) {
            std::uint64_t rand_bits = hash_combine(key, 0x9000ULL + static_cast<std::uint64_t>(k));
            // Row k has ones only in columns 1..k (column c at bit depth-c),
            // with a forced one on the diagonal.
            std::uint64_t below = (k == 1) ? 0ULL
                                           : (rand_bits >> (64 - (k - 1))) << (digit_depth - k + 1);
            rows[k - 1] = below | (1ULL << (digit_depth - k));
        }
        std::uint64_t shift = hash_combine(key, 0x5117ULL) >> (64 - digit_depth);
        for (std::size_t i = 0; i < net.n; ++i) {
            std::uint64_t y = double_to_fixed(net.at(i, j), kNetDepth) >> (kNetDepth - digit_depth);
            std::uint64_t z = 0;
            for (int k = 1; k <= digit_depth; ++k) {
                int parity = __builtin_parityll(y & rows[k - 1]);
                z |= static_cast<std::uint64_t>(parity) << (digit_depth - k);
            }
            out.data[i * net.dim + j] = fixed_to_double(z ^ shift, digit_depth);
        }
    }
    return out;
}

PointSet mc_points(int dim, std::size_t n, std::uint64_t seed) {
    if (dim < 1) throw std::invalid_argument("mc_points: dim must be >= 1");
    if (n == 0) throw std::invalid_argument("mc_points: n must be positive");

    PointSet ps;
    ps.dim = dim;
    ps.n = n;
    ps.provenance = Provenance::MC;
    ps.seed = seed;
    ps.data.resize(n * static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j)
            ps.data[i * dim + j] =
                to_unit_double(hash3(mix64(seed), i, static_cast<std::uint64_t>(j)));
    return ps;
}

namespace {

// Visit all shape vectors (k_1..k_d) >= 0 with sum = m.
template <typename F>
void for_each_shape(int d, int m, std::vector<int>& shape, int axis, const F& f) {
    if (axis == d - 1) {
        shape[axis] = m;
        f(shape);
        return;
    }
    for (int k = 0; k <= m; ++k) {
        shape[axis] = k;
        for_each_shape(d, m - k, shape, axis + 1, f);
    }
}

bool balanced_for_resolution(const PointSet& points, int m, int base, int t) {
    const int d = points.dim;
    const int res = m - t;                  // digits constrained per box
    const std::size_t expected = [&] {      // base^t points per box
        std::size_t e = 1;
        for (int i = 0; i < t; ++i) e *= static_cast<std::size_t>(base);
        return e;
    }();

    std::vector<int> shape(static_cast<std::size_t>(d));
    bool ok = true;
    for_each_shape(d, res, shape, 0, [&](const std::vector<int>& k) {
        if (!ok) return;
        std::size_t boxes = 1;
        std::vector<double> scale(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) {
            scale[j] = std::pow(static_cast<double>(base), k[j]);
            for (int q = 0; q < k[j]; ++q) boxes *= static_cast<std::size_t>(base);
        }
        std::vector<std::size_t> counts(boxes, 0);
        for (std::size_t i = 0; i < points.n; ++i) {
            std::size_t idx = 0;
            for (int j = 0; j < d; ++j) {
                auto cell = static_cast<std::size_t>(points.at(i, j) * scale[j]);
                std::size_t cells = 1;
                for (int q = 0; q < k[j]; ++q) cells *= static_cast<std::size_t>(base);
                idx = idx * cells + cell;
            }
            ++counts[idx];
        }
        for (std::size_t c : counts)
            if (c != expected) {
                ok = false;
                return;
            }
    });
    return ok;
}

}  // namespace

bool elementary_interval_balance(const PointSet& points, int m, int base) {
    std::size_t n = 1;
    for (int i = 0; i < m; ++i) n *= static_cast<std::size_t>(base);
    if (points.n != n)
        throw std::invalid_argument("elementary_interval_balance: |points| must equal base^m");
    return balanced_for_resolution(points, m, base, 0);
}

int net_t_value(const PointSet& points, int m, int base) {
    for (int t = 0; t <= m; ++t)
        if (balanced_for_resolution(points, m, base, t)) return t;
    return m;
}

}  // namespace qmcx
