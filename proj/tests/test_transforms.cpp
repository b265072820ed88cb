#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "qmcx/hash.hpp"
#include "qmcx/point_set.hpp"
#include "qmcx/transforms.hpp"
#include "quad_oracle.hpp"

using namespace qmcx;

namespace {

double urand(std::uint64_t& state, double lo, double hi) {
    state = mix64(state);
    return lo + (hi - lo) * to_unit_double(state);
}

std::vector<double> random_interior(std::uint64_t& state, int m, double lo = 0.1,
                                    double hi = 0.9) {
    std::vector<double> u(static_cast<std::size_t>(m));
    for (auto& v : u) v = urand(state, lo, hi);
    return u;
}

VarSet random_subset(std::uint64_t& state, int m, int max_size) {
    int size = 1 + static_cast<int>(urand(state, 0, 1) * std::min(m, max_size)) %
                       std::min(m, max_size);
    VarSet v;
    while (v.count() < size) {
        int i = static_cast<int>(urand(state, 0, 1) * m) % m;
        v = v.with(i);
    }
    return v;
}

struct KindUnderTest {
    TransformKind kind;
    int dim;
    std::vector<double> params;
};

std::vector<KindUnderTest> catalog() {
    return {
        {TransformKind::Identity, 3, {}},
        {TransformKind::SimplexLog, 3, {}},
        {TransformKind::SimplexLog, 4, {}},
        {TransformKind::SphereGauss, 2, {}},
        {TransformKind::SphereGauss, 3, {}},
        {TransformKind::FwAd, 2, {}},
        {TransformKind::FwAd, 3, {}},
        {TransformKind::FwBd, 2, {}},
        {TransformKind::FwBd, 3, {}},
        {TransformKind::FwUd, 2, {}},
        {TransformKind::FwUd, 3, {}},
        {TransformKind::FwVd, 2, {}},
        {TransformKind::FwVd, 3, {}},
        {TransformKind::FwTd, 2, {}},
        {TransformKind::FwTd, 3, {}},
        {TransformKind::FwUdEfficient, 2, {}},
        {TransformKind::FwUdEfficient, 3, {}},
        {TransformKind::FwUdEfficient, 4, {}},
        {TransformKind::FwUdEfficient, 5, {}},
        {TransformKind::FwUdEfficient, 6, {}},
        {TransformKind::SimplexPower, 3, {1.6, 0.85, 0.6}},
        {TransformKind::SimplexPower, 2, {2.0, 1.0}},
        {TransformKind::Rosenblatt2D, 2, {0.5}},
        {TransformKind::Rosenblatt2D, 2, {1.0}},
    };
}

}  // namespace

TEST_CASE("simplex log map is symmetric at equal inputs") {
    auto t = make_transform(TransformKind::SimplexLog, 3);
    double e = std::exp(-1.0);
    std::vector<double> u = {e, e, e};
    auto x = t->apply(u);
    for (double xi : x) CHECK(xi == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(t->domain().contains(x));
}

TEST_CASE("ordered-simplex map values match the closed form") {
    auto t = make_transform(TransformKind::FwAd, 2);
    std::vector<double> u = {0.25, 0.25};
    auto x = t->apply(u);
    // tau_2 = u_2^{1/2}, tau_1 = u_1 u_2^{1/2}
    CHECK(x[0] == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("power map with general exponents") {
    auto t = make_transform(TransformKind::SimplexPower, 2, {2.0, 1.0});
    std::vector<double> u = {0.5, 0.5};
    auto x = t->apply(u);
    CHECK(x[0] == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("power map with the reciprocal-index exponents reproduces the uniform map") {
    auto fw = make_transform(TransformKind::FwAd, 3);
    auto sp = make_transform(TransformKind::SimplexPower, 3, {1.0, 0.5, 1.0 / 3});
    std::uint64_t state = 7;
    for (int trial = 0; trial < 20; ++trial) {
        auto u = random_interior(state, 3, 0.05, 0.95);
        auto a = fw->apply(u), b = sp->apply(u);
        for (int j = 0; j < 3; ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-14));
    }
}

TEST_CASE("gaussian sphere map: dominance limit and singular input") {
    auto t = make_transform(TransformKind::SphereGauss, 2);
    std::vector<double> u = {0.5 + 1e-12, 0.5};
    auto x = t->apply(u);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(x[1] == doctest::Approx(0.0).epsilon(1e-9));

    std::vector<double> center = {0.5, 0.5};
    CHECK_THROWS_WITH_AS(t->apply(center), doctest::Contains("singular input"),
                         std::domain_error);
}

TEST_CASE("parameter validation names the violated constraint") {
    CHECK_THROWS_WITH_AS(make_transform(TransformKind::SimplexPower, 2, {-1.0, 1.0}),
                         doctest::Contains("a_j must be positive"), std::invalid_argument);
    CHECK_THROWS_AS(make_transform(TransformKind::SimplexPower, 2, {1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(rosenblatt2d_family(1.5), std::invalid_argument);
    CHECK_THROWS_AS(make_transform(TransformKind::FwBd, 1), std::invalid_argument);
}

TEST_CASE("analytic partials match quad-precision central differences") {
    // |v| up to min(m,4), interior points away from the faces
    std::uint64_t state = 20240911;
    for (const auto& cfg : catalog()) {
        auto t = make_transform(cfg.kind, cfg.dim, cfg.params);
        CAPTURE(t->name());
        CAPTURE(cfg.dim);
        const int m = t->input_dim();
        for (int trial = 0; trial < 12; ++trial) {
            auto u = random_interior(state, m);
            VarSet v = random_subset(state, m, 4);
            int j = static_cast<int>(urand(state, 0, 1) * t->output_dim()) % t->output_dim();
            CAPTURE(j);
            CAPTURE(v.to_string());
            REQUIRE(t->has_closed_partial(j, v));
            double analytic = t->partial(j, v, u);
            double fd = testing::fd_partial_reference(*t, j, v, u);
            CHECK(std::abs(analytic - fd) <= 1e-5 * (1.0 + std::abs(analytic)));
        }
    }
}

TEST_CASE("quad oracle agrees with apply at interior points") {
    std::uint64_t state = 99;
    for (const auto& cfg : catalog()) {
        auto t = make_transform(cfg.kind, cfg.dim, cfg.params);
        for (int trial = 0; trial < 5; ++trial) {
            auto u = random_interior(state, t->input_dim(), 0.05, 0.95);
            auto x = t->apply(u);
            std::vector<testing::quad> uq(u.begin(), u.end());
            for (int j = 0; j < t->output_dim(); ++j) {
                double ref = static_cast<double>(testing::quad_component(*t, j, uq));
                CHECK(x[j] == doctest::Approx(ref).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("empty v returns the component value") {
    auto t = make_transform(TransformKind::FwAd, 3);
    std::vector<double> u = {0.3, 0.4, 0.5};
    auto x = t->apply(u);
    for (int j = 0; j < 3; ++j) CHECK(t->partial(j, VarSet{}, u) == x[j]);
}

TEST_CASE("partials vanish when v dips below the component index") {
    auto t = make_transform(TransformKind::FwAd, 3);
    std::vector<double> u = {0.3, 0.4, 0.5};
    CHECK(t->partial(1, VarSet::of({0}), u) == 0.0);
    CHECK(t->partial_is_zero(1, VarSet::of({0})));
    CHECK(t->partial(2, VarSet::of({0, 1}), u) == 0.0);

    // v inside j:d gives the displayed product
    double p = t->partial(0, VarSet::of({0, 1, 2}), u);
    double expect = 1.0 * (0.5 * std::pow(0.4, -0.5)) * ((1.0 / 3) * std::pow(0.5, -2.0 / 3));
    CHECK(p == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("single-variable power rule") {
    auto t = make_transform(TransformKind::SimplexPower, 1, {1.7});
    std::vector<double> u = {0.5};
    CHECK(t->partial(0, VarSet::of({0}), u) ==
          doctest::Approx(1.7 * std::pow(0.5, 0.7)).epsilon(1e-15));
}

TEST_CASE("domain membership holds for every kind on random inputs") {
    std::uint64_t state = 4242;
    for (const auto& cfg : catalog()) {
        auto t = make_transform(cfg.kind, cfg.dim, cfg.params);
        CAPTURE(t->name());
        for (int trial = 0; trial < 50; ++trial) {
            auto u = random_interior(state, t->input_dim(), 0.001, 0.999);
            auto x = t->apply(u);
            CHECK(t->domain().contains(x));
        }
    }
}

TEST_CASE("sphere maps land exactly on the sphere, simplex sums are exact") {
    std::uint64_t state = 31337;
    for (auto kind : {TransformKind::FwUd, TransformKind::FwUdEfficient}) {
        for (int d : {2, 3, 4, 5}) {
            auto t = make_transform(kind, d);
            for (int trial = 0; trial < 20; ++trial) {
                auto u = random_interior(state, t->input_dim(), 0.01, 0.99);
                auto x = t->apply(u);
                double r = 0.0;
                for (double xi : x) r += xi * xi;
                CHECK(std::abs(std::sqrt(r) - 1.0) < 1e-12);
            }
        }
    }
    auto td = make_transform(TransformKind::FwTd, 3);
    auto vd = make_transform(TransformKind::FwVd, 3);
    for (int trial = 0; trial < 20; ++trial) {
        auto u2 = random_interior(state, 2, 0.01, 0.99);
        auto x = td->apply(u2);
        double s = x[0] + x[1] + x[2];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
        auto u3 = random_interior(state, 3, 0.01, 0.99);
        auto y = vd->apply(u3);
        CHECK(y[0] >= 0.0);
        CHECK(y[1] >= 0.0);
        CHECK(y[2] >= 0.0);
        CHECK(y[0] + y[1] + y[2] <= 1.0 + 1e-14);
    }
}

TEST_CASE("pushforward moments: ordered simplex order statistics") {
    // uniform order statistics on A_d have E[x_j] = j/(d+1)
    const int d = 3;
    const std::size_t n = 100000;
    auto t = make_transform(TransformKind::FwAd, d);
    auto pts = mc_points(d, n, 555);
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < n; ++i) {
        t->apply(pts.point(i), x);
        for (int j = 0; j < d; ++j) mean[j] += x[j];
    }
    for (int j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        t->apply(pts.point(i), x);
        for (int j = 0; j < d; ++j) var[j] += (x[j] - mean[j]) * (x[j] - mean[j]);
    }
    for (int j = 0; j < d; ++j) {
        double se = std::sqrt(var[j] / (n - 1) / static_cast<double>(n));
        CHECK(std::abs(mean[j] - (j + 1.0) / (d + 1.0)) < 4.0 * se);
    }
}

TEST_CASE("pushforward moments: spheres and ball") {
    const std::size_t n = 100000;
    std::vector<KindUnderTest> sphere_kinds = {{TransformKind::SphereGauss, 3, {}},
                                               {TransformKind::FwUd, 3, {}},
                                               {TransformKind::FwUdEfficient, 3, {}},
                                               {TransformKind::FwUdEfficient, 4, {}}};
    for (const auto& cfg : sphere_kinds) {
        auto t = make_transform(cfg.kind, cfg.dim);
        CAPTURE(t->name());
        CAPTURE(cfg.dim);
        auto pts = mc_points(t->input_dim(), n, 777);
        const int d = t->output_dim();
        std::vector<double> mean(d, 0.0), mean_sq(d, 0.0);
        std::vector<double> x(d);
        std::size_t used = 0;
        for (std::size_t i = 0; i < n; ++i) {
            t->apply(pts.point(i), x);
            ++used;
            for (int j = 0; j < d; ++j) {
                mean[j] += x[j];
                mean_sq[j] += x[j] * x[j];
            }
        }
        for (int j = 0; j < d; ++j) {
            mean[j] /= static_cast<double>(used);
            mean_sq[j] /= static_cast<double>(used);
            // Var(x_j) = 1/d, Var(x_j^2) = 3/(d(d+2)) - 1/d^2
            double se_mean = std::sqrt(1.0 / d / static_cast<double>(used));
            double var_sq = 3.0 / (d * (d + 2.0)) - 1.0 / (static_cast<double>(d) * d);
            double se_sq = std::sqrt(var_sq / static_cast<double>(used));
            CHECK(std::abs(mean[j]) < 4.0 * se_mean);
            CHECK(std::abs(mean_sq[j] - 1.0 / d) < 4.0 * se_sq);
        }
    }

    // ball: E[x_j] = 0, E[x_j^2] = 1/(d+2)
    auto ball = make_transform(TransformKind::FwBd, 3);
    auto pts = mc_points(3, n, 888);
    std::vector<double> x(3);
    double mean = 0.0, mean_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ball->apply(pts.point(i), x);
        mean += x[0];
        mean_sq += x[0] * x[0];
        double r = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        CHECK(r <= 1.0 + 1e-12);
    }
    mean /= static_cast<double>(n);
    mean_sq /= static_cast<double>(n);
    CHECK(std::abs(mean) < 4.0 * std::sqrt(0.2 / static_cast<double>(n)));
    CHECK(std::abs(mean_sq - 0.2) < 4.0 * std::sqrt(0.1 / static_cast<double>(n)));
}

TEST_CASE("jacobian weights") {
    // reciprocal-index exponents give the constant 1/d!
    auto t = make_transform(TransformKind::SimplexPower, 3, {1.0, 0.5, 1.0 / 3});
    std::uint64_t state = 11;
    for (int trial = 0; trial < 10; ++trial) {
        auto u = random_interior(state, 3, 0.01, 0.99);
        CHECK(t->jacobian_weight(u) == doctest::Approx(1.0 / 6).epsilon(1e-14));
    }

    // at u -> 1 the weight approaches A = prod a_j
    auto t2 = make_transform(TransformKind::SimplexPower, 2, {1.5, 0.75});
    std::vector<double> ones = {1.0, 1.0};
    CHECK(t2->jacobian_weight(ones) == doctest::Approx(9.0 / 8).epsilon(1e-14));

    // uniformity-preserving kinds weigh 1
    auto bd = make_transform(TransformKind::FwBd, 3);
    std::vector<double> u3 = {0.3, 0.4, 0.5};
    CHECK(bd->jacobian_weight(u3) == 1.0);

    // ratio kinds defer to the estimator level
    auto rb = rosenblatt2d_family(0.5);
    std::vector<double> u2 = {0.3, 0.4};
    CHECK_THROWS_AS(rb->jacobian_weight(u2), std::runtime_error);

    // mean of d! J over uniform inputs is 1 (within the MC band)
    auto spiky = make_transform(TransformKind::SimplexPower, 3, {1.6, 0.85, 0.6});
    auto pts = mc_points(3, 100000, 999);
    double mean = 0.0, mean_sq = 0.0;
    for (std::size_t i = 0; i < pts.n; ++i) {
        double w = 6.0 * spiky->jacobian_weight(pts.point(i));
        mean += w;
        mean_sq += w * w;
    }
    mean /= static_cast<double>(pts.n);
    mean_sq /= static_cast<double>(pts.n);
    double se = std::sqrt((mean_sq - mean * mean) / static_cast<double>(pts.n));
    CHECK(std::abs(mean - 1.0) < 4.0 * se);
}

TEST_CASE("sequential inversion map: special cases and root cross-check") {
    // independence
    auto t0 = rosenblatt2d_family(0.0);
    std::vector<double> u = {0.3, 0.7};
    auto x = t0->apply(u);
    CHECK(x[0] == 0.3);
    CHECK(x[1] == doctest::Approx(0.7).epsilon(1e-15));

    // the interaction dies at u_1 = 1/2
    auto t1 = rosenblatt2d_family(1.0);
    std::vector<double> mid = {0.5, 0.8};
    auto y = t1->apply(mid);
    CHECK(y[1] == doctest::Approx(0.8).epsilon(1e-14));

    // forward conditional CDF recovers u_2
    auto t = rosenblatt2d_family(0.5);
    std::uint64_t state = 3;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> uu = {urand(state, 0.01, 0.99), urand(state, 0.01, 0.99)};
        auto z = t->apply(uu);
        double c = 0.5 * (1.0 - 2.0 * uu[0]);
        double forward = z[1] + c * z[1] * (1.0 - z[1]);
        CHECK(forward == doctest::Approx(uu[1]).epsilon(1e-12));
        CHECK(z[1] >= 0.0);
        CHECK(z[1] <= 1.0);
    }

    // the quoted spot value: theta = 0.5, u = (0.25, 0.5)
    std::vector<double> spot = {0.25, 0.5};
    auto w = t->apply(spot);
    double c = 0.5 * 0.5;
    CHECK(w[1] + c * w[1] * (1.0 - w[1]) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("finite differences flag approximate fallbacks") {
    // a transform that exposes no closed form for |v| = 2
    class NoMixed final : public Transform {
      public:
        NoMixed()
            : Transform(TransformKind::Identity, 2, 1, WeightKind::UnitVolume,
                        {DomainKind::UnitSquare, 1}) {}
        bool has_closed_partial(int, VarSet v) const override { return v.count() <= 1; }

      private:
        void apply_impl(std::span<const double> u, std::span<double> x) const override {
            x[0] = u[0] * u[1];
        }
        double partial_impl(int, VarSet v, std::span<const double> u) const override {
            if (v == VarSet::of({0})) return u[1];
            if (v == VarSet::of({1})) return u[0];
            return 0.0;
        }
    };

    NoMixed t;
    std::vector<double> u = {0.3, 0.7};
    CHECK_THROWS_WITH_AS(t.partial(0, VarSet::of({0, 1}), u),
                         doctest::Contains("derivative oracle unavailable"), std::runtime_error);

    bool approx = false;
    double fd = partial_or_fd(t, 0, VarSet::of({0, 1}), u, &approx);
    CHECK(approx);
    CHECK(fd == doctest::Approx(1.0).epsilon(1e-6));

    approx = false;
    double exact = partial_or_fd(t, 0, VarSet::of({0}), u, &approx);
    CHECK_FALSE(approx);
    CHECK(exact == 0.7);
}

TEST_CASE("boundary clamps are counted") {
    auto t = make_transform(TransformKind::SphereGauss, 2);
    std::vector<double> u = {0.0, 0.25};
    auto x = t->apply(u);  // u_1 = 0 must be clamped, not rejected
    CHECK(std::isfinite(x[0]));
    CHECK(t->clamp_count() >= 1);

    auto fw = make_transform(TransformKind::FwAd, 2);
    std::vector<double> z = {0.0, 0.0};
    fw->apply(z);  // defined at zero, no clamp
    CHECK(fw->clamp_count() == 0);
}
