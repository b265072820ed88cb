#include "qmcx/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qmcx/hash.hpp"

namespace qmcx {

Integrand Integrand::monomial_on_simplex(std::vector<double> q) {
    for (double qj : q)
        if (qj < 0.0) throw std::invalid_argument("monomial: q_j must be >= 0");
    const int d = static_cast<int>(q.size());
    Integrand f;
    f.kind = Kind::Monomial;
    f.description = "monomial";
    for (double qj : q) f.description += ":" + std::to_string(qj);
    f.exact_value = exact_monomial_integral(q, d);
    f.eval = [q = std::move(q)](std::span<const double> x) {
        double prod = 1.0;
        for (std::size_t j = 0; j < q.size(); ++j) prod *= std::pow(x[j], q[j]);
        return prod;
    };
    return f;
}

Integrand Integrand::sum_of_monomials_on_simplex(std::vector<std::vector<double>> qs,
                                                 std::vector<double> coeffs) {
    if (qs.empty() || qs.size() != coeffs.size())
        throw std::invalid_argument("sum_of_monomials: need one coefficient per power tuple");
    const int d = static_cast<int>(qs.front().size());
    double exact = 0.0;
    for (std::size_t t = 0; t < qs.size(); ++t) exact += coeffs[t] * exact_monomial_integral(qs[t], d);
    Integrand f;
    f.kind = Kind::SumOfMonomials;
    f.description = "sum-of-monomials";
    f.exact_value = exact;
    f.eval = [qs = std::move(qs), coeffs = std::move(coeffs)](std::span<const double> x) {
        double sum = 0.0;
        for (std::size_t t = 0; t < qs.size(); ++t) {
            double prod = coeffs[t];
            for (std::size_t j = 0; j < qs[t].size(); ++j) prod *= std::pow(x[j], qs[t][j]);
            sum += prod;
        }
        return sum;
    };
    return f;
}

Integrand Integrand::smooth_exp(std::vector<double> c) {
    Integrand f;
    f.kind = Kind::SmoothTest;
    f.description = "exp-linear";
    f.eval = [c = std::move(c)](std::span<const double> x) {
        double dot = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) dot += c[j] * x[j];
        return std::exp(dot);
    };
    return f;
}

Integrand Integrand::custom(std::function<double(std::span<const double>)> f,
                            std::optional<double> exact, std::string description) {
    Integrand g;
    g.kind = Kind::Custom;
    g.description = std::move(description);
    g.eval = std::move(f);
    g.exact_value = exact;
    return g;
}

double estimate(const Integrand& f, const Transform& t, const PointSet& pts) {
    if (pts.dim != t.input_dim())
        throw std::invalid_argument("estimate: point dimension does not match the transform input");

    double d_factorial = 1.0;
    for (int i = 2; i <= t.output_dim(); ++i) d_factorial *= i;

    std::vector<double> x(static_cast<std::size_t>(t.output_dim()));
    double sum = 0.0;
    for (std::size_t i = 0; i < pts.n; ++i) {
        auto u = pts.point(i);
        t.apply(u, x);
        double w = 1.0;
        if (t.weight_kind() == WeightKind::Jacobian) w = d_factorial * t.jacobian_weight(u);
        sum += w * f.eval(x);
    }
    return sum / static_cast<double>(pts.n);
}

double exact_monomial_integral(std::span<const double> q, int d) {
    if (static_cast<int>(q.size()) != d)
        throw std::invalid_argument("exact_monomial_integral: |q| must equal d");
    double result = 1.0, running = 0.0;
    for (int k = 1; k <= d; ++k) {
        double qk = q[static_cast<std::size_t>(k - 1)];
        if (qk < 0.0) throw std::invalid_argument("exact_monomial_integral: q_j must be >= 0");
        running += qk;
        result *= static_cast<double>(k) / (k + running);  // d! folded in factor by factor
    }
    return result;
}

EssFactor ess_factor(std::span<const double> a, int d) {
    if (static_cast<int>(a.size()) != d)
        throw std::invalid_argument("ess_factor: |a| must equal d");
    EssFactor out;
    out.value = 1.0;
    for (int j = 1; j <= d; ++j) {
        double ja = j * a[static_cast<std::size_t>(j - 1)];
        if (!(2.0 * ja > 1.0)) {
            out.value = 0.0;
            out.divergent_second_moment = true;
            return out;
        }
        out.value *= (2.0 * ja - 1.0) / (ja * ja);
    }
    return out;
}

SamplerKind sampler_kind_from_name(const std::string& name) {
    if (name == "mc") return SamplerKind::MC;
    if (name == "owen") return SamplerKind::OwenNet;
    if (name == "linear") return SamplerKind::LinearNet;
    throw std::invalid_argument("unknown sampler: " + name + " (expected mc|owen|linear)");
}

std::string sampler_kind_name(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::MC: return "mc";
        case SamplerKind::OwenNet: return "owen";
        case SamplerKind::LinearNet: return "linear";
    }
    return "?";
}

ConvergenceReport converge(const Integrand& f, const Transform& t, SamplerKind sampler,
                           const ConvergeConfig& config) {
    if (config.log2_n_min < 0 || config.log2_n_max < config.log2_n_min)
        throw std::invalid_argument("converge: bad n schedule");
    if (config.replications < 2) throw std::invalid_argument("converge: need >= 2 replications");

    double exact;
    ConvergenceReport report;
    if (f.exact_value) {
        exact = *f.exact_value;
    } else {
        // brute-force reference at 10x the largest sample size
        report.approximate_reference = true;
        std::size_t n_ref = (std::size_t{1} << config.log2_n_max) * 10;
        exact = estimate(f, t, mc_points(t.input_dim(), n_ref, mix64(config.master_seed ^ 0x5efULL)));
    }

    report.sampler = sampler;
    report.transform_name = t.name();
    report.integrand_name = f.description;
    report.master_seed = config.master_seed;
    report.fit_points = config.fit_points;

    for (int k = config.log2_n_min; k <= config.log2_n_max; ++k) {
        const std::size_t n = std::size_t{1} << k;
        PointSet base_net;
        if (sampler != SamplerKind::MC) base_net = generate_net(t.input_dim(), k, 2);

        double sq_err_sum = 0.0;
        for (int r = 0; r < config.replications; ++r) {
            std::uint64_t seed = hash3(config.master_seed, static_cast<std::uint64_t>(k),
                                       static_cast<std::uint64_t>(r));
            report.replicate_seeds.push_back(seed);
            PointSet pts;
            switch (sampler) {
                case SamplerKind::MC: pts = mc_points(t.input_dim(), n, seed); break;
                case SamplerKind::OwenNet:
                    pts = scramble(base_net, ScrambleMethod::OwenNested, seed);
                    break;
                case SamplerKind::LinearNet:
                    pts = scramble(base_net, ScrambleMethod::LinearDigitalShift, seed);
                    break;
            }
            double err = estimate(f, t, pts) - exact;
            sq_err_sum += err * err;
        }
        report.records.push_back(
            {n, std::sqrt(sq_err_sum / config.replications), config.replications});
    }

    const int total = static_cast<int>(report.records.size());
    const int use = std::min(config.fit_points, total);
    SlopeFit fit = fit_slope(std::span<const ConvergenceRecord>(report.records)
                                 .subspan(static_cast<std::size_t>(total - use)));
    report.slope = fit.slope;
    report.intercept = fit.intercept;
    report.r2 = fit.r2;
    return report;
}

SlopeFit fit_slope(std::span<const ConvergenceRecord> records) {
    if (records.size() < 3) throw std::invalid_argument("fit_slope: need at least 3 records");
    const std::size_t n = records.size();
    double mx = 0, my = 0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = std::log2(static_cast<double>(records[i].n));
        ys[i] = std::log2(records[i].rmse);
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

}  // namespace qmcx
