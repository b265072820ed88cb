#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qmcx/transforms.hpp"
#include "qmcx/var_set.hpp"

namespace qmcx {

enum class GradedMesh { Uniform, GradedToward0, GradedTowardBoth };

/// Midpoint quadrature on power-graded meshes. `levels` holds per-axis
/// panel counts forming the refinement schedule; grading clusters panels
/// near the singular faces (breakpoints follow t^q toward 0, or a symmetric
/// beta-style map toward both faces) so the rule never evaluates on a face.
struct QuadratureSpec {
    std::vector<int> levels;
    GradedMesh boundary_refinement = GradedMesh::GradedTowardBoth;
    int grading_power = 8;

    static QuadratureSpec for_dim(int dim);
};

enum class Verdict { Converged, Diverging, Inconclusive };

std::string verdict_name(Verdict v);

/// Refinement trace of an integral estimate plus the call made on it.
/// Diverging needs at least 4 consecutive increasing levels with more than
/// 25% total growth and a positive slope against log(1/eps); Converged
/// needs the last two levels within relative 1e-3.
struct DivergenceVerdict {
    std::vector<double> epsilons;   // effective face resolution per level
    std::vector<double> estimates;  // midpoint estimates per level
    Verdict verdict = Verdict::Inconclusive;
    double growth_fit = 0.0;        // OLS slope of estimate vs log(1/eps)

    double value() const { return estimates.empty() ? 0.0 : estimates.back(); }
};

/// Estimate integral_{[0,1]^dim} fn(u) du on the refinement schedule and
/// classify the trace.
DivergenceVerdict refine_and_classify(const std::function<double(std::span<const double>)>& fn,
                                      int dim, const QuadratureSpec& q);

/// Face integral int |d^v tau_j(u_v : 1_{-v})| du_v with the off-face
/// coordinates pinned at 1 (or 1 - 2^-53 for kinds undefined there).
DivergenceVerdict face_l1_integral(const Transform& t, int j, VarSet v, const QuadratureSpec& q);

struct HkBoundResult {
    bool diverging = false;
    double bound = 0.0;      // sum of face integrals when all converge
    VarSet offender;         // first diverging face
    std::vector<std::pair<VarSet, DivergenceVerdict>> faces;
};

/// Hardy-Krause upper bound for component j: the sum over all non-empty
/// v of the face integrals, or Diverging with the offending v.
HkBoundResult hk_upper_bound(const Transform& t, int j, const QuadratureSpec& q);

/// Probe int |fn|^p over [eps,1-eps]^dim for shrinking eps.
DivergenceVerdict lp_divergence_probe(const std::function<double(std::span<const double>)>& fn,
                                      int dim, double p, const QuadratureSpec& q);

/// Lower bound for the Vitali variation of f on [0,1]^2: the sum over grid
/// cells of |alternating corner sum|. Never decreases under refinement.
double vitali_grid_variation(const std::function<double(double, double)>& f,
                             const std::vector<double>& grid_x,
                             const std::vector<double>& grid_y);

/// Recursive pyramid function on [0,1]^2: at level k, 3^k square-based
/// pyramids of side 2^-(k+1) sit in the lower-right quadrants of the
/// recursive split; truncated at level K. Lipschitz constant 1, Vitali
/// variation growing like (3/2)^K.
class PyramidFunction {
  public:
    explicit PyramidFunction(int depth);
    int depth() const { return depth_; }
    double operator()(double x, double y) const;

  private:
    int depth_;
};

PyramidFunction pyramid(int depth);

/// Sum of the per-pyramid Vitali variations through level K:
/// sum_{k=0}^K (3/2)^k.
double pyramid_lower_bound(int depth);

/// max |f(p) - f(q)| / ||p - q|| over the given pairs; coincident pairs are
/// skipped.
double lipschitz_ratio(const std::function<double(double, double)>& f,
                       std::span<const std::array<double, 4>> pairs);

struct RosenblattConditions {
    DivergenceVerdict i1;  // total-derivative log-density conditions, k = 1,2
    DivergenceVerdict i2;  // upper-boundary ratio integral
};

/// Numeric check of the two Hardy-Krause sufficiency integrals for the
/// FGM sequential-inversion map. The FGM upper boundary is flat, so the
/// i2 integrand vanishes identically.
RosenblattConditions rosenblatt_condition_check(double theta, const QuadratureSpec& q);

}  // namespace qmcx
