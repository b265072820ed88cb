// qmcx command line: generate randomized nets, push them through the
// transform catalog, evaluate mixed partials of compositions, probe
// variation and integrability, and measure RMSE convergence.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qmcx/faa_di_bruno.hpp"
#include "qmcx/harness.hpp"
#include "qmcx/point_set.hpp"
#include "qmcx/transforms.hpp"
#include "qmcx/variation.hpp"

namespace {

using namespace qmcx;

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::vector<int> parse_ints(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

void write_point_set(const PointSet& ps, const std::string& path, char prefix) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    for (int j = 0; j < ps.dim; ++j) out << (j ? "," : "") << prefix << (j + 1);
    out << "\n";
    char buf[32];
    for (std::size_t i = 0; i < ps.n; ++i) {
        for (int j = 0; j < ps.dim; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", ps.at(i, j));
            out << (j ? "," : "") << buf;
        }
        out << "\n";
    }
}

PointSet read_point_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    PointSet ps;
    ps.dim = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = parse_doubles(line);
        if (static_cast<int>(row.size()) != ps.dim)
            throw std::runtime_error(path + ": ragged row");
        ps.data.insert(ps.data.end(), row.begin(), row.end());
    }
    ps.n = ps.data.size() / static_cast<std::size_t>(ps.dim);
    return ps;
}

DerivOracle parse_integrand_oracle(const std::string& expr, int dim) {
    if (expr.rfind("poly:", 0) == 0) {
        // poly:c,e1,...,ed;c,e1,...,ed
        std::vector<std::vector<int>> powers;
        std::vector<double> coeffs;
        std::stringstream ss(expr.substr(5));
        std::string term;
        while (std::getline(ss, term, ';')) {
            auto vals = parse_doubles(term);
            if (static_cast<int>(vals.size()) != dim + 1)
                throw std::runtime_error("poly term needs a coefficient plus " +
                                         std::to_string(dim) + " exponents");
            coeffs.push_back(vals[0]);
            std::vector<int> p;
            for (int j = 1; j <= dim; ++j)
                p.push_back(static_cast<int>(vals[static_cast<std::size_t>(j)]));
            powers.push_back(std::move(p));
        }
        return DerivOracle::polynomial(dim, std::move(powers), std::move(coeffs));
    }
    if (expr.rfind("exp:", 0) == 0) {
        auto c = parse_doubles(expr.substr(4));
        if (static_cast<int>(c.size()) != dim)
            throw std::runtime_error("exp integrand needs " + std::to_string(dim) +
                                     " coefficients");
        return DerivOracle::exp_linear(dim, std::move(c));
    }
    throw std::runtime_error("unknown integrand spec (expected poly:... or exp:...): " + expr);
}

std::unique_ptr<Transform> build_transform(const std::string& kind_name, int dim,
                                           const std::vector<double>& a, double theta) {
    TransformKind kind = transform_kind_from_name(kind_name);
    if (kind == TransformKind::SimplexPower) return make_transform(kind, dim, a);
    if (kind == TransformKind::Rosenblatt2D) return make_transform(kind, 2, {theta});
    return make_transform(kind, dim);
}

QuadratureSpec build_spec(const std::string& kind_name, bool lp_probe, int levels, int dim) {
    QuadratureSpec q;
    // inverse-Gaussian tails defeat graded midpoint panels; square-integrability
    // probes only need growth detection
    if (kind_name == "sphere-gauss" || lp_probe) q.boundary_refinement = GradedMesh::Uniform;
    if (levels <= 0) return q;
    int base_n = dim >= 3 ? 16 : (dim == 2 ? 32 : 64);
    int cap = dim >= 3 ? 512 : (dim == 2 ? 4096 : 1 << 20);
    int n = base_n;
    for (int k = 0; k < levels && n <= cap; ++k, n *= 2) q.levels.push_back(n);
    return q;
}

void write_svg_plot(const ConvergenceReport& report, const std::string& path) {
    const int w = 640, h = 480, margin = 60;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& r : report.records) {
        double x = std::log2(static_cast<double>(r.n)), y = std::log2(r.rmse);
        xmin = std::min(xmin, x), xmax = std::max(xmax, x);
        ymin = std::min(ymin, y), ymax = std::max(ymax, y);
    }
    auto px = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (w - 2 * margin); };
    auto py = [&](double y) { return h - margin - (y - ymin) / (ymax - ymin) * (h - 2 * margin); };
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<line x1='" << margin << "' y1='" << h - margin << "' x2='" << w - margin << "' y2='"
        << h - margin << "' stroke='black'/>\n";
    out << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
        << h - margin << "' stroke='black'/>\n";
    out << "<polyline fill='none' stroke='steelblue' stroke-width='2' points='";
    for (const auto& r : report.records)
        out << px(std::log2(static_cast<double>(r.n))) << "," << py(std::log2(r.rmse)) << " ";
    out << "'/>\n";
    for (const auto& r : report.records)
        out << "<circle cx='" << px(std::log2(static_cast<double>(r.n))) << "' cy='"
            << py(std::log2(r.rmse)) << "' r='3' fill='steelblue'/>\n";
    out << "<text x='" << w / 2 << "' y='" << h - 15
        << "' text-anchor='middle' font-family='sans-serif' font-size='14'>log2 n</text>\n";
    out << "<text x='18' y='" << h / 2
        << "' text-anchor='middle' font-family='sans-serif' font-size='14' "
           "transform='rotate(-90 18 "
        << h / 2 << ")'>log2 rmse</text>\n";
    out << "<text x='" << w - margin << "' y='" << margin
        << "' text-anchor='end' font-family='sans-serif' font-size='14'>slope " << report.slope
        << "</text>\n";
    out << "</svg>\n";
}

VarSet set_from_indices(const std::vector<int>& one_based, int dim) {
    VarSet v;
    for (int i : one_based) {
        if (i < 1 || i > dim)
            throw std::runtime_error("variable index out of range: " + std::to_string(i));
        v = v.with(i - 1);
    }
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasi-Monte Carlo sampling on simplices, spheres and balls"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate", "digital net / MC points to CSV");
    int g_dim = 2, g_m = 10, g_base = 2;
    std::string g_scramble, g_out = "points.csv";
    std::uint64_t g_seed = 1;
    bool g_mc = false;
    std::size_t g_n = 0;
    gen->add_option("--dim", g_dim, "dimension")->required();
    gen->add_option("--m", g_m, "net size exponent, n = base^m");
    gen->add_option("--base", g_base, "net base (2)");
    gen->add_option("--scramble", g_scramble, "owen|linear");
    gen->add_option("--seed", g_seed, "scramble / MC seed");
    gen->add_flag("--mc", g_mc, "iid uniform points instead of a net");
    gen->add_option("--n", g_n, "point count for --mc (default base^m)");
    gen->add_option("--out", g_out, "output CSV")->required();

    auto* tra = app.add_subcommand("transform", "map points through a catalog transform");
    std::string t_kind = "fw-ad", t_in, t_out = "mapped.csv", t_a_str;
    int t_dim = 3;
    double t_theta = 0.0;
    tra->add_option("--kind", t_kind, "transform kind")->required();
    tra->add_option("--dim", t_dim, "target dimension");
    tra->add_option("--a", t_a_str, "simplex-power exponents a_1,..,a_d");
    tra->add_option("--theta", t_theta, "rosenblatt FGM dependence parameter");
    tra->add_option("--in", t_in, "input CSV of cube points")->required();
    tra->add_option("--out", t_out, "output CSV")->required();

    auto* par = app.add_subcommand("partials", "mixed partial of f composed with a transform");
    std::string p_kind = "fw-ad", p_v_str = "1", p_f = "poly:1,1,0,0", p_at_str, p_a_str;
    int p_dim = 3;
    double p_theta = 0.0;
    bool p_check_fd = false;
    par->add_option("--kind", p_kind, "transform kind")->required();
    par->add_option("--dim", p_dim, "target dimension");
    par->add_option("--a", p_a_str, "simplex-power exponents");
    par->add_option("--theta", p_theta, "rosenblatt parameter");
    par->add_option("--v", p_v_str, "derivative variables, 1-based, e.g. 1,2,3")->required();
    par->add_option("--f", p_f, "integrand oracle: poly:c,e1,..,ed;... or exp:c1,..,cd")
        ->required();
    par->add_option("--at", p_at_str, "evaluation point u, comma separated")->required();
    par->add_flag("--check-fd", p_check_fd, "also report a central-difference residual");

    auto* var = app.add_subcommand("variation", "face integrals and integrability probes");
    std::string v_kind = "simplex-log", v_face_str, v_out, v_a_str;
    int v_dim = 3, v_component = 1, v_levels = 6;
    double v_theta = 0.0, v_p = 0.0;
    var->add_option("--kind", v_kind, "transform kind")->required();
    var->add_option("--dim", v_dim, "target dimension");
    var->add_option("--a", v_a_str, "simplex-power exponents");
    var->add_option("--theta", v_theta, "rosenblatt parameter");
    var->add_option("--component", v_component, "component j, 1-based")->required();
    var->add_option("--face", v_face_str, "variables of a single face, 1-based");
    var->add_option("--p", v_p, "L^p probe over the full cube instead of face integrals");
    var->add_option("--levels", v_levels, "refinement levels");
    var->add_option("--out", v_out, "report CSV (default stdout)");

    auto* con = app.add_subcommand("converge", "RMSE vs n with slope fit");
    std::string c_transform = "fw-ad", c_integrand = "monomial:1,0,2", c_sampler = "owen";
    std::string c_out, c_plot, c_a_str;
    int c_dim = 3, c_nmin = 6, c_nmax = 14, c_reps = 32;
    double c_theta = 0.0;
    std::uint64_t c_seed = 42;
    con->add_option("--transform", c_transform, "transform kind")->required();
    con->add_option("--dim", c_dim, "target dimension");
    con->add_option("--a", c_a_str, "simplex-power exponents");
    con->add_option("--theta", c_theta, "rosenblatt parameter");
    con->add_option("--integrand", c_integrand, "monomial:q1,..,qd (simplex) or xy (moment)");
    con->add_option("--sampler", c_sampler, "mc|owen|linear");
    con->add_option("--nmin", c_nmin, "smallest log2 n");
    con->add_option("--nmax", c_nmax, "largest log2 n");
    con->add_option("--reps", c_reps, "replications per n");
    con->add_option("--seed", c_seed, "master seed");
    con->add_option("--out", c_out, "CSV output");
    con->add_option("--plot", c_plot, "SVG log-log plot");

    auto* ess_cmd =
        app.add_subcommand("ess", "effective-sample-size factor of the power-map weight");
    std::string e_a_str;
    int e_d = 0;
    ess_cmd->add_option("--a", e_a_str, "exponents a_1,..,a_d")->required();
    ess_cmd->add_option("--d", e_d, "dimension (default |a|)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            PointSet ps;
            if (g_mc) {
                ps = mc_points(g_dim, g_n ? g_n : (std::size_t{1} << g_m), g_seed);
            } else {
                ps = generate_net(g_dim, g_m, g_base);
                if (g_scramble == "owen")
                    ps = scramble(ps, ScrambleMethod::OwenNested, g_seed);
                else if (g_scramble == "linear")
                    ps = scramble(ps, ScrambleMethod::LinearDigitalShift, g_seed);
                else if (!g_scramble.empty())
                    throw std::runtime_error("unknown scramble: " + g_scramble);
            }
            write_point_set(ps, g_out, 'u');
            std::cout << "wrote " << ps.n << " points in dimension " << ps.dim << " to " << g_out
                      << "\n";
        } else if (*tra) {
            auto t = build_transform(
                t_kind, t_dim, t_a_str.empty() ? std::vector<double>{} : parse_doubles(t_a_str),
                t_theta);
            auto pts = read_point_set(t_in);
            if (pts.dim != t->input_dim())
                throw std::runtime_error("input has dimension " + std::to_string(pts.dim) +
                                         " but the transform expects " +
                                         std::to_string(t->input_dim()));
            std::ofstream out(t_out);
            if (!out) throw std::runtime_error("cannot open " + t_out);
            const bool weighted = t->weight_kind() != WeightKind::UnitVolume;
            for (int j = 0; j < t->output_dim(); ++j) out << (j ? "," : "") << "x" << (j + 1);
            if (weighted) out << ",weight";
            out << "\n";
            std::vector<double> x(static_cast<std::size_t>(t->output_dim()));
            char buf[32];
            double d_factorial = 1.0;
            for (int i = 2; i <= t->output_dim(); ++i) d_factorial *= i;
            for (std::size_t i = 0; i < pts.n; ++i) {
                t->apply(pts.point(i), x);
                for (int j = 0; j < t->output_dim(); ++j) {
                    std::snprintf(buf, sizeof buf, "%.17g", x[static_cast<std::size_t>(j)]);
                    out << (j ? "," : "") << buf;
                }
                if (weighted) {
                    double w = t->weight_kind() == WeightKind::Jacobian
                                   ? d_factorial * t->jacobian_weight(pts.point(i))
                                   : 1.0;
                    std::snprintf(buf, sizeof buf, "%.17g", w);
                    out << "," << buf;
                }
                out << "\n";
            }
            std::cout << "wrote " << pts.n << " mapped points to " << t_out;
            if (t->clamp_count()) std::cout << " (" << t->clamp_count() << " boundary clamps)";
            std::cout << "\n";
        } else if (*par) {
            auto t = build_transform(
                p_kind, p_dim, p_a_str.empty() ? std::vector<double>{} : parse_doubles(p_a_str),
                p_theta);
            auto u = parse_doubles(p_at_str);
            if (static_cast<int>(u.size()) != t->input_dim())
                throw std::runtime_error("--at needs " + std::to_string(t->input_dim()) +
                                         " coordinates");
            VarSet v = set_from_indices(parse_ints(p_v_str), t->input_dim());
            auto f = parse_integrand_oracle(p_f, t->output_dim());
            auto r = compose_partial(f, *t, v, u);
            std::printf("d^%s (f o %s) = %.12g  (%lld terms%s)\n", v.to_string().c_str(),
                        t->name().c_str(), r.value, r.terms,
                        r.approximate ? ", approximate tau-partials" : "");
            if (p_check_fd) {
                auto composed = [&](std::span<const double> uu) {
                    auto x = t->apply(uu);
                    Lambda zero(static_cast<std::size_t>(t->output_dim()), 0);
                    return f.eval(zero, x);
                };
                double fd = central_mixed_difference(u, v, composed);
                std::printf("central-difference value %.12g, residual %.3g\n", fd,
                            std::abs(fd - r.value));
            }
        } else if (*var) {
            auto t = build_transform(
                v_kind, v_dim, v_a_str.empty() ? std::vector<double>{} : parse_doubles(v_a_str),
                v_theta);
            int j = v_component - 1;
            if (j < 0 || j >= t->output_dim())
                throw std::runtime_error("--component out of range");
            bool lp = v_p > 0.0;
            std::ostringstream report;
            report << "v,level,epsilon,estimate,verdict\n";
            bool any_diverging = false;
            auto emit = [&](VarSet face, const DivergenceVerdict& verdict) {
                for (std::size_t level = 0; level < verdict.estimates.size(); ++level) {
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "\"%s\",%zu,%.6g,%.12g,%s\n",
                                  face.to_string().c_str(), level + 1, verdict.epsilons[level],
                                  verdict.estimates[level], verdict_name(verdict.verdict).c_str());
                    report << buf;
                }
                any_diverging |= verdict.verdict == Verdict::Diverging;
            };

            if (lp) {
                VarSet v = v_face_str.empty()
                               ? VarSet::full(t->input_dim())
                               : set_from_indices(parse_ints(v_face_str), t->input_dim());
                QuadratureSpec q = build_spec(v_kind, true, v_levels, t->input_dim());
                auto fn = [&](std::span<const double> u) { return t->partial(j, v, u); };
                emit(v, lp_divergence_probe(fn, t->input_dim(), v_p, q));
            } else if (!v_face_str.empty()) {
                VarSet v = set_from_indices(parse_ints(v_face_str), t->input_dim());
                QuadratureSpec q = build_spec(v_kind, false, v_levels, v.count());
                emit(v, face_l1_integral(*t, j, v, q));
            } else {
                QuadratureSpec q = build_spec(v_kind, false, 0, 0);  // per-face defaults
                auto r = hk_upper_bound(*t, j, q);
                for (const auto& [face, verdict] : r.faces) emit(face, verdict);
                if (r.diverging)
                    std::cout << "component " << v_component << ": diverging, offending face "
                              << r.offender.to_string() << "\n";
                else
                    std::cout << "component " << v_component << ": hardy-krause upper bound "
                              << r.bound << "\n";
            }

            if (v_out.empty()) {
                std::cout << report.str();
            } else {
                std::ofstream out(v_out);
                if (!out) throw std::runtime_error("cannot open " + v_out);
                out << report.str();
                std::cout << "wrote report to " << v_out << "\n";
            }
            return any_diverging ? 2 : 0;
        } else if (*con) {
            auto t = build_transform(
                c_transform, c_dim, c_a_str.empty() ? std::vector<double>{} : parse_doubles(c_a_str),
                c_theta);
            Integrand f;
            if (c_integrand.rfind("monomial:", 0) == 0) {
                f = Integrand::monomial_on_simplex(parse_doubles(c_integrand.substr(9)));
            } else if (c_integrand == "xy") {
                double theta = c_theta;
                f = Integrand::custom([](std::span<const double> x) { return x[0] * x[1]; },
                                      0.25 + theta / 36.0, "xy");
            } else {
                throw std::runtime_error("unknown integrand: " + c_integrand);
            }
            ConvergeConfig cfg;
            cfg.log2_n_min = c_nmin;
            cfg.log2_n_max = c_nmax;
            cfg.replications = c_reps;
            cfg.master_seed = c_seed;
            auto report = converge(f, *t, sampler_kind_from_name(c_sampler), cfg);

            std::ostringstream csv;
            csv << "n,rmse,reps,seed\n";
            char buf[96];
            for (const auto& r : report.records) {
                std::snprintf(buf, sizeof buf, "%zu,%.12g,%d,%llu\n", r.n, r.rmse, r.replications,
                              static_cast<unsigned long long>(report.master_seed));
                csv << buf;
            }
            std::snprintf(buf, sizeof buf, "slope,%.6g,intercept,%.6g,r2,%.6g\n", report.slope,
                          report.intercept, report.r2);
            csv << buf;
            if (c_out.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream out(c_out);
                if (!out) throw std::runtime_error("cannot open " + c_out);
                out << csv.str();
            }
            if (!c_plot.empty()) write_svg_plot(report, c_plot);
            std::printf("%s + %s, %s: slope %.3f (r2 %.3f)\n",
                        sampler_kind_name(report.sampler).c_str(), report.transform_name.c_str(),
                        report.integrand_name.c_str(), report.slope, report.r2);
        } else if (*ess_cmd) {
            auto a = parse_doubles(e_a_str);
            int d = e_d ? e_d : static_cast<int>(a.size());
            auto f = ess_factor(a, d);
            if (f.divergent_second_moment) {
                std::printf("ess factor: 0 (second moment of the weight diverges)\n");
                return 2;
            }
            std::printf("ess factor: %.12g\n", f.value);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
