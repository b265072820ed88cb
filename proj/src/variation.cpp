#include "qmcx/variation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qmcx {

namespace {

constexpr double kPinBelowOne = 1.0 - 0x1.0p-53;

QuadratureSpec resolved(const QuadratureSpec& q, int dim) {
    if (!q.levels.empty()) return q;
    QuadratureSpec spec = QuadratureSpec::for_dim(dim);
    spec.boundary_refinement = q.boundary_refinement;
    spec.grading_power = q.grading_power;
    return spec;
}

// Grading map t in [0,1] -> u in [0,1] together with its derivative.
// Edge zones follow c t^q so panels cluster geometrically at the singular
// faces; the middle stays linear with slope 2q/(q+1), keeping interior
// resolution close to uniform. The pieces join C^1, so the midpoint rule
// keeps its O(N^-2) rate on smooth integrands.
struct GradingMap {
    GradedMesh mesh;
    int q;
    double c = 0.0, slope = 0.0, zone = 0.0;

    explicit GradingMap(GradedMesh mesh_, int q_) : mesh(mesh_), q(q_) {
        slope = 2.0 * q / (q + 1.0);
        zone = (mesh == GradedMesh::GradedTowardBoth) ? 0.25 : 0.5;
        c = std::pow(1.0 / zone, q) * zone * slope / q;  // C^1 join at the zone edge
    }

    double value(double t) const {
        switch (mesh) {
            case GradedMesh::Uniform: return t;
            case GradedMesh::GradedToward0:
                if (t <= zone) return c * std::pow(t, q);
                return c * std::pow(zone, q) + slope * (t - zone);
            case GradedMesh::GradedTowardBoth: {
                double u;
                if (t <= zone)
                    u = c * std::pow(t, q);
                else if (t >= 1.0 - zone)
                    u = 1.0 - c * std::pow(1.0 - t, q);
                else
                    u = 0.5 + slope * (t - 0.5);
                // keep nodes strictly below 1 so integrands with a face
                // singularity at 1 stay finite
                return std::min(u, 1.0 - 0x1.0p-53);
            }
        }
        return t;
    }

    double derivative(double t) const {
        switch (mesh) {
            case GradedMesh::Uniform: return 1.0;
            case GradedMesh::GradedToward0:
                return (t <= zone) ? c * q * std::pow(t, q - 1) : slope;
            case GradedMesh::GradedTowardBoth:
                if (t <= zone) return c * q * std::pow(t, q - 1);
                if (t >= 1.0 - zone) return c * q * std::pow(1.0 - t, q - 1);
                return slope;
        }
        return 1.0;
    }
};

double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

Verdict classify(const std::vector<double>& epsilons, const std::vector<double>& estimates,
                 double* growth_fit) {
    const std::size_t n = estimates.size();
    std::vector<double> log_inv_eps(n);
    for (std::size_t i = 0; i < n; ++i) log_inv_eps[i] = std::log(1.0 / epsilons[i]);
    *growth_fit = ols_slope(log_inv_eps, estimates);

    // longest strictly increasing suffix
    std::size_t run_start = n - 1;
    while (run_start > 0 && estimates[run_start - 1] < estimates[run_start]) --run_start;
    std::size_t run_len = n - run_start;
    if (run_len >= 4) {
        double first = estimates[run_start], last = estimates[n - 1];
        std::vector<double> xs(log_inv_eps.begin() + static_cast<std::ptrdiff_t>(run_start),
                               log_inv_eps.end());
        std::vector<double> ys(estimates.begin() + static_cast<std::ptrdiff_t>(run_start),
                               estimates.end());
        if (first >= 0.0 && last > 1.25 * first && ols_slope(xs, ys) > 0.0)
            return Verdict::Diverging;
    }

    double a = estimates[n - 2], b = estimates[n - 1];
    if (std::abs(b - a) <= std::max(1e-3 * std::abs(b), 1e-14)) return Verdict::Converged;
    return Verdict::Inconclusive;
}

}  // namespace

QuadratureSpec QuadratureSpec::for_dim(int dim) {
    QuadratureSpec q;
    if (dim <= 1)
        q.levels = {64, 128, 256, 512, 1024, 2048, 4096, 8192};
    else if (dim == 2)
        q.levels = {32, 64, 128, 256, 512, 1024};
    else
        q.levels = {16, 32, 64, 128, 256};
    return q;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Converged: return "converged";
        case Verdict::Diverging: return "diverging";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

DivergenceVerdict refine_and_classify(const std::function<double(std::span<const double>)>& fn,
                                      int dim, const QuadratureSpec& q_in) {
    if (dim < 1) throw std::invalid_argument("refine_and_classify: dim must be >= 1");
    QuadratureSpec q = resolved(q_in, dim);
    if (q.levels.size() < 2) throw std::invalid_argument("refine_and_classify: need >= 2 levels");
    for (std::size_t i = 1; i < q.levels.size(); ++i)
        if (q.levels[i] <= q.levels[i - 1])
            throw std::invalid_argument("refine_and_classify: levels must be strictly increasing");

    GradingMap map(q.boundary_refinement, q.grading_power);
    DivergenceVerdict out;
    std::vector<double> u(static_cast<std::size_t>(dim));

    for (int n_panels : q.levels) {
        std::vector<double> nodes(static_cast<std::size_t>(n_panels));
        std::vector<double> weights(static_cast<std::size_t>(n_panels));
        for (int i = 0; i < n_panels; ++i) {
            double t = (i + 0.5) / n_panels;
            nodes[static_cast<std::size_t>(i)] = map.value(t);
            weights[static_cast<std::size_t>(i)] = map.derivative(t) / n_panels;
        }

        double sum = 0.0;
        std::vector<int> idx(static_cast<std::size_t>(dim), 0);
        while (true) {
            double w = 1.0;
            for (int a = 0; a < dim; ++a) {
                u[static_cast<std::size_t>(a)] = nodes[static_cast<std::size_t>(idx[a])];
                w *= weights[static_cast<std::size_t>(idx[a])];
            }
            sum += w * fn(u);
            int a = dim - 1;
            while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == n_panels)
                idx[static_cast<std::size_t>(a--)] = 0;
            if (a < 0) break;
        }
        out.estimates.push_back(sum);
        out.epsilons.push_back(map.value(0.5 / n_panels));
    }

    out.verdict = classify(out.epsilons, out.estimates, &out.growth_fit);
    return out;
}

DivergenceVerdict face_l1_integral(const Transform& t, int j, VarSet v, const QuadratureSpec& q) {
    if (v.empty()) throw std::invalid_argument("face_l1_integral: v must be non-empty");
    if (!t.has_closed_partial(j, v))
        throw std::runtime_error("face_l1_integral: derivative oracle unavailable");

    QuadratureSpec spec = resolved(q, v.count());

    if (t.partial_is_zero(j, v)) {
        // structurally zero face; report a flat trace
        DivergenceVerdict out;
        for (int n_panels : spec.levels) {
            out.estimates.push_back(0.0);
            out.epsilons.push_back(0.5 / n_panels);
        }
        out.verdict = Verdict::Converged;
        return out;
    }

    const double pin = t.finite_at_one() ? 1.0 : kPinBelowOne;
    auto vars = v.elements();
    std::vector<double> full(static_cast<std::size_t>(t.input_dim()), pin);
    auto fn = [&](std::span<const double> face_u) {
        for (std::size_t i = 0; i < vars.size(); ++i)
            full[static_cast<std::size_t>(vars[i])] = face_u[i];
        return std::abs(t.partial(j, v, full));
    };
    return refine_and_classify(fn, v.count(), spec);
}

HkBoundResult hk_upper_bound(const Transform& t, int j, const QuadratureSpec& q) {
    HkBoundResult result;
    const int m = t.input_dim();
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        VarSet v(mask);
        auto verdict = face_l1_integral(t, j, v, resolved(q, v.count()));
        if (verdict.verdict == Verdict::Diverging && !result.diverging) {
            result.diverging = true;
            result.offender = v;
        }
        result.bound += verdict.value();
        result.faces.emplace_back(v, std::move(verdict));
    }
    if (result.diverging) result.bound = std::numeric_limits<double>::infinity();
    return result;
}

DivergenceVerdict lp_divergence_probe(const std::function<double(std::span<const double>)>& fn,
                                      int dim, double p, const QuadratureSpec& q) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_divergence_probe: p must be >= 1");
    auto powered = [&](std::span<const double> u) { return std::pow(std::abs(fn(u)), p); };
    return refine_and_classify(powered, dim, resolved(q, dim));
}

double vitali_grid_variation(const std::function<double(double, double)>& f,
                             const std::vector<double>& grid_x,
                             const std::vector<double>& grid_y) {
    auto check = [](const std::vector<double>& g, const char* axis) {
        if (g.size() < 2 || g.front() != 0.0 || g.back() != 1.0 ||
            !std::is_sorted(g.begin(), g.end()))
            throw std::invalid_argument(std::string("vitali_grid_variation: ") + axis +
                                        " grid must be sorted and span [0,1]");
    };
    check(grid_x, "x");
    check(grid_y, "y");

    const std::size_t nx = grid_x.size(), ny = grid_y.size();
    std::vector<double> vals(nx * ny);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) vals[i * ny + j] = f(grid_x[i], grid_y[j]);

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < nx; ++i)
        for (std::size_t j = 0; j + 1 < ny; ++j) {
            double delta = vals[(i + 1) * ny + (j + 1)] - vals[(i + 1) * ny + j] -
                           vals[i * ny + (j + 1)] + vals[i * ny + j];
            total += std::abs(delta);
        }
    return total;
}

PyramidFunction::PyramidFunction(int depth) : depth_(depth) {
    if (depth < 0 || depth > 40) throw std::invalid_argument("pyramid: depth must be in 0..40");
}

PyramidFunction pyramid(int depth) { return PyramidFunction(depth); }

double PyramidFunction::operator()(double x, double y) const {
    // Walk the quadtree: at each level the lower-right quadrant carries a
    // pyramid, the other three recurse. Selected squares are disjoint, so at
    // most one pyramid is nonzero at any point.
    double x0 = 0.0, y0 = 0.0, len = 1.0;
    for (int k = 0; k <= depth_; ++k) {
        double half = 0.5 * len;
        bool right = x >= x0 + half;
        bool bottom = y < y0 + half;
        if (right && bottom) {
            double cx = x0 + half + 0.5 * half, cy = y0 + 0.5 * half;
            double dist = std::max(std::abs(x - cx), std::abs(y - cy));
            return std::max(0.0, 0.5 * half - dist);
        }
        if (right) x0 += half;
        if (!bottom) y0 += half;
        len = half;
    }
    return 0.0;
}

double pyramid_lower_bound(int depth) {
    double sum = 0.0, term = 1.0;
    for (int k = 0; k <= depth; ++k) {
        sum += term;
        term *= 1.5;
    }
    return sum;
}

double lipschitz_ratio(const std::function<double(double, double)>& f,
                       std::span<const std::array<double, 4>> pairs) {
    double best = 0.0;
    for (const auto& p : pairs) {
        double dx = p[0] - p[2], dy = p[1] - p[3];
        double dist = std::hypot(dx, dy);
        if (dist == 0.0) continue;
        best = std::max(best, std::abs(f(p[0], p[1]) - f(p[2], p[3])) / dist);
    }
    return best;
}

RosenblattConditions rosenblatt_condition_check(double theta, const QuadratureSpec& q) {
    if (!(std::abs(theta) <= 1.0))
        throw std::invalid_argument("rosenblatt_condition_check: |theta| <= 1 required");

    // k = 1 total-derivative term: the first marginal is uniform, so its
    // log-density derivative vanishes; the k = 2 term differentiates
    // log f(x,y) along the map's motion of y with u_2 held fixed.
    auto density = [theta](double x, double y) {
        return 1.0 + theta * (1.0 - 2.0 * x) * (1.0 - 2.0 * y);
    };
    auto i1_integrand = [&](std::span<const double> u) {
        double x = u[0], y = u[1];
        double f = density(x, y);
        double dy_dx = 2.0 * theta * y * (1.0 - y) / f;
        double dfx = -2.0 * theta * (1.0 - 2.0 * y);
        double dfy = -2.0 * theta * (1.0 - 2.0 * x);
        double k2 = std::abs((dfx + dfy * dy_dx) / f);
        return k2;  // + 0 from k = 1
    };

    RosenblattConditions out;
    out.i1 = refine_and_classify(i1_integrand, 2, resolved(q, 2));

    // Upper boundary b(x) = 1 is flat: the conditional-CDF x-derivative at
    // y = b(x) is -2 theta y (1-y) = 0 there, so the ratio integrand
    // vanishes.
    auto i2_integrand = [&](std::span<const double> u) {
        double x = u[0];
        const double b = 1.0;
        double numer = -2.0 * theta * b * (1.0 - b);
        if (numer == 0.0) return 0.0;
        double denom = density(x, b);
        return std::abs(numer / denom);
    };
    out.i2 = refine_and_classify(i2_integrand, 1, resolved(q, 1));
    return out;
}

}  // namespace qmcx
