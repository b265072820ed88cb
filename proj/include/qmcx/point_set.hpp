#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qmcx {

enum class Provenance { MC, Net, OwenScrambled, LinearScrambled };

enum class ScrambleMethod { OwenNested, LinearDigitalShift };

/// A batch of points in [0,1)^dim with generation provenance. Immutable
/// after construction; regeneration with identical parameters is
/// bit-identical.
struct PointSet {
    int dim = 0;
    std::size_t n = 0;
    Provenance provenance = Provenance::MC;
    int base = 0;               // nets and their scramblings
    int resolution = 0;         // m with n = base^m, nets only
    std::uint64_t seed = 0;     // randomized sets only

    std::vector<double> data;   // row-major, n x dim

    double at(std::size_t i, int j) const { return data[i * static_cast<std::size_t>(dim) + j]; }
    std::span<const double> point(std::size_t i) const {
        return {data.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
};

/// Largest dimension with built-in generator matrices (base 2).
int max_net_dim();

/// Digital net of base^m points in [0,1)^dim. Base 2 only: Sobol-style
/// generator matrices with Joe-Kuo direction numbers, dim <= max_net_dim().
/// Coordinate 1 is the van der Corput sequence in generation order.
PointSet generate_net(int dim, int m, int base);

/// Randomize a net. OwenNested applies a nested uniform digit scramble
/// (random permutation per node of the digit tree, realized by a seeded
/// counter hash, O(1) memory). LinearDigitalShift applies a random
/// nonsingular lower-triangular digit matrix plus a digital shift.
/// digit_depth >= resolution; defaults to 52 digits.
PointSet scramble(const PointSet& net, ScrambleMethod method, std::uint64_t seed,
                  int digit_depth = 52);

/// n iid U[0,1)^dim pseudorandom points, deterministic per seed.
PointSet mc_points(int dim, std::size_t n, std::uint64_t seed);

/// True iff every elementary interval of volume base^-m (over all shape
/// splits) contains exactly one point. Requires |points| = base^m.
bool elementary_interval_balance(const PointSet& points, int m, int base);

/// Smallest t such that every elementary interval of volume base^(t-m)
/// contains exactly base^t points; m if the set is not a net at all.
int net_t_value(const PointSet& points, int m, int base);

}  // namespace qmcx
