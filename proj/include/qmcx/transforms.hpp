#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qmcx/var_set.hpp"

namespace qmcx {

enum class TransformKind {
    Identity,        // [0,1]^d -> [0,1]^d
    SimplexLog,      // [0,1]^m -> T^{m-1}, tau_j = log(u_j) / sum_i log(u_i)
    SphereGauss,     // [0,1]^d -> S^{d-1}, normalized inverse-Gaussian coordinates
    FwAd,            // [0,1]^d -> A_d, tau_j = prod_{i>=j} u_i^{1/i}
    FwBd,            // [0,1]^d -> B_d (ball), radial CDF + sin-power angles
    FwUd,            // [0,1]^{d-1} -> U_d (sphere), sin-power angles
    FwVd,            // [0,1]^d -> V_d (corner simplex)
    FwTd,            // [0,1]^{d-1} -> T_d (probability simplex)
    FwUdEfficient,   // [0,1]^{d-1} -> U_d without incomplete-beta inversions
    SimplexPower,    // [0,1]^d -> A_d, tau_j = prod_{k>=j} u_k^{a_k}, weighted
    Rosenblatt2D,    // [0,1]^2 -> [0,1]^2, sequential inversion of an FGM density
};

enum class WeightKind { UnitVolume, Jacobian, Ratio };

enum class DomainKind { SimplexA, SimplexT, SimplexV, Ball, Sphere, UnitSquare };

/// Target domain of a transform plus a membership test.
struct DomainDescriptor {
    DomainKind kind = DomainKind::UnitSquare;
    int dim = 0;
    double tolerance = 1e-12;

    bool contains(std::span<const double> x) const;
    std::string name() const;
};

/// A map tau: [0,1]^m -> X in R^d with exact component evaluation and
/// analytic mixed-partial oracles. Instances are immutable after
/// construction; apply/partial are pure and safe to call concurrently
/// (the boundary-clamp counter is atomic).
class Transform {
  public:
    virtual ~Transform() = default;

    TransformKind kind() const { return kind_; }
    int input_dim() const { return m_; }
    int output_dim() const { return d_; }
    WeightKind weight_kind() const { return weight_kind_; }
    const DomainDescriptor& domain() const { return domain_; }
    const std::vector<double>& params() const { return params_; }
    std::string name() const;

    /// Evaluate tau(u). u must have size input_dim(), result output_dim().
    /// Coordinates are clamped to [2^-53, 1 - 2^-53] only where the formula
    /// is undefined at 0 or 1; each clamp is counted.
    void apply(std::span<const double> u, std::span<double> x) const;
    std::vector<double> apply(std::span<const double> u) const;

    /// Analytic mixed partial of component j (0-based) with respect to each
    /// variable in v once, at interior u. v empty returns tau_j(u).
    /// Throws if no closed form is implemented for (j, v).
    double partial(int j, VarSet v, std::span<const double> u) const;

    /// Whether partial(j, v, .) has a closed form.
    virtual bool has_closed_partial(int j, VarSet v) const;

    /// True when the partial is structurally zero (component does not
    /// depend on some variable in v).
    virtual bool partial_is_zero(int, VarSet) const { return false; }

    /// True when partial(j, v, .) is finite with off-face coordinates pinned
    /// at exactly 1 (face integrals pin at 1 - 2^-53 otherwise).
    virtual bool finite_at_one() const { return true; }

    /// Importance weight J(u) for Jacobian-weighted kinds; 1 for
    /// UnitVolume kinds. Ratio kinds throw: the density ratio is supplied
    /// at the estimator level.
    virtual double jacobian_weight(std::span<const double> u) const;

    /// Number of coordinate clamps performed by apply/partial so far.
    std::uint64_t clamp_count() const { return clamp_count_.load(); }

  protected:
    Transform(TransformKind kind, int m, int d, WeightKind wk, DomainDescriptor dom,
              std::vector<double> params = {})
        : kind_(kind), m_(m), d_(d), weight_kind_(wk), domain_(dom), params_(std::move(params)) {}

    virtual void apply_impl(std::span<const double> u, std::span<double> x) const = 0;
    virtual double partial_impl(int j, VarSet v, std::span<const double> u) const = 0;

    /// Clamp into the open cube where the subclass needs it; counts events.
    double clamped(double u) const;
    void check_args(int j, VarSet v) const;

    TransformKind kind_;
    int m_, d_;
    WeightKind weight_kind_;
    DomainDescriptor domain_;
    std::vector<double> params_;
    mutable std::atomic<std::uint64_t> clamp_count_{0};
};

/// Build a transform from the catalog.
///   Identity, SimplexLog:      dim = m (= d)
///   SphereGauss, FwAd, FwBd,
///   FwUd, FwVd, FwTd,
///   FwUdEfficient:             dim = d of the target domain
///   SimplexPower:              dim = d, params = exponents a_1..a_d > 0
///   Rosenblatt2D:              dim = 2, params = { theta }, |theta| <= 1
std::unique_ptr<Transform> make_transform(TransformKind kind, int dim,
                                          std::vector<double> params = {});

/// Rosenblatt sequential-inversion map for the FGM density
/// f(x,y) = 1 + theta (1-2x)(1-2y) on [0,1]^2.
std::unique_ptr<Transform> rosenblatt2d_family(double theta);

/// Mixed partial with finite-difference fallback when a closed form is
/// missing; sets *approximate when FD was used anywhere.
double partial_or_fd(const Transform& t, int j, VarSet v, std::span<const double> u,
                     bool* approximate);

/// Nested central finite difference of u -> f(u) over the variables in v.
double central_mixed_difference(const std::vector<double>& u, VarSet v,
                                const std::function<double(std::span<const double>)>& f,
                                double step = 1e-4);

TransformKind transform_kind_from_name(const std::string& name);
std::string transform_kind_name(TransformKind kind);

}  // namespace qmcx
