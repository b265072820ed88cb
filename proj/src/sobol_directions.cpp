#include "qmcx/sobol_directions.hpp"

#include <stdexcept>

namespace qmcx::detail {

namespace {

// Primitive polynomials over GF(2) in the usual compact encoding: the
// integer holds the inner coefficients a_1..a_{s-1} (leading and trailing
// coefficients are implicitly 1). Dimension 1 is the identity matrix (van
// der Corput) and carries no polynomial.
struct SobolRow {
    int degree;
    unsigned poly;               // inner coefficients
    unsigned init[8];            // m_1..m_s, Joe-Kuo D6 initial values
};

const SobolRow kRows[] = {
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
    {7, 7, {1, 1, 3, 13, 7, 35, 63}},
    {7, 8, {1, 3, 5, 9, 1, 25, 53}},
    {7, 14, {1, 3, 1, 13, 9, 35, 107}},
    {7, 19, {1, 3, 1, 5, 27, 61, 31}},
    {7, 21, {1, 1, 5, 11, 19, 41, 61}},
    {7, 28, {1, 3, 5, 3, 3, 13, 69}},
    {7, 31, {1, 1, 7, 13, 1, 19, 1}},
    {7, 32, {1, 3, 7, 5, 13, 19, 59}},
    {7, 37, {1, 1, 3, 9, 25, 29, 41}},
    {7, 41, {1, 3, 5, 13, 23, 1, 55}},
    {7, 42, {1, 3, 7, 3, 13, 59, 17}},
};

constexpr int kMaxDim = 1 + static_cast<int>(sizeof(kRows) / sizeof(kRows[0]));

}  // namespace

int sobol_max_dim() { return kMaxDim; }

std::vector<std::uint64_t> sobol_direction_integers(int dim, int depth) {
    if (dim < 1 || dim > kMaxDim)
        throw std::invalid_argument("no generator matrices for dimension " + std::to_string(dim) +
                                    " in base 2 (supported: 1.." + std::to_string(kMaxDim) + ")");
    if (depth < 1 || depth > 62) throw std::invalid_argument("sobol: digit depth must be in 1..62");

    std::vector<std::uint64_t> v(static_cast<std::size_t>(depth));
    if (dim == 1) {
        for (int k = 1; k <= depth; ++k) v[k - 1] = 1ULL << (depth - k);
        return v;
    }

    const SobolRow& row = kRows[dim - 2];
    const int s = row.degree;
    std::vector<std::uint64_t> m(static_cast<std::size_t>(depth) + 1);
    for (int k = 1; k <= depth; ++k) {
        if (k <= s) {
            m[k] = row.init[k - 1];
        } else {
            // m_k = 2 a_1 m_{k-1} ^ ... ^ 2^{s-1} a_{s-1} m_{k-s+1}
            //       ^ 2^s m_{k-s} ^ m_{k-s}
            std::uint64_t mk = (m[k - s] << s) ^ m[k - s];
            for (int i = 1; i < s; ++i)
                if ((row.poly >> (s - 1 - i)) & 1u) mk ^= m[k - i] << i;
            m[k] = mk;
        }
        v[k - 1] = m[k] << (depth - k);
    }
    return v;
}

}  // namespace qmcx::detail
