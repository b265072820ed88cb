#include "qmcx/transforms.hpp"

#include <cmath>
#include <stdexcept>

#include "qmcx/special_functions.hpp"

namespace qmcx {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kEps = 0x1.0p-53;  // boundary clamp offset

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}
}  // namespace

bool DomainDescriptor::contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim) return false;
    const double tol = tolerance;
    switch (kind) {
        case DomainKind::SimplexA: {
            double prev = -tol;
            for (double v : x) {
                if (v < prev - tol || v > 1.0 + tol) return false;
                prev = v;
            }
            return true;
        }
        case DomainKind::SimplexT: {
            double s = 0.0;
            for (double v : x) {
                if (v < -tol) return false;
                s += v;
            }
            return std::abs(s - 1.0) <= tol * dim;
        }
        case DomainKind::SimplexV: {
            double s = 0.0;
            for (double v : x) {
                if (v < -tol) return false;
                s += v;
            }
            return s <= 1.0 + tol * dim;
        }
        case DomainKind::Ball:
            return norm2(x) <= 1.0 + tol;
        case DomainKind::Sphere:
            return std::abs(norm2(x) - 1.0) <= tol;
        case DomainKind::UnitSquare:
            for (double v : x)
                if (v < -tol || v > 1.0 + tol) return false;
            return true;
    }
    return false;
}

std::string DomainDescriptor::name() const {
    switch (kind) {
        case DomainKind::SimplexA: return "A_" + std::to_string(dim);
        case DomainKind::SimplexT: return "T_" + std::to_string(dim);
        case DomainKind::SimplexV: return "V_" + std::to_string(dim);
        case DomainKind::Ball: return "B_" + std::to_string(dim);
        case DomainKind::Sphere: return "U_" + std::to_string(dim);
        case DomainKind::UnitSquare: return "[0,1]^" + std::to_string(dim);
    }
    return "?";
}

double Transform::clamped(double u) const {
    if (u < kEps) {
        clamp_count_.fetch_add(1, std::memory_order_relaxed);
        return kEps;
    }
    if (u > 1.0 - kEps) {
        clamp_count_.fetch_add(1, std::memory_order_relaxed);
        return 1.0 - kEps;
    }
    return u;
}

void Transform::check_args(int j, VarSet v) const {
    if (j < 0 || j >= d_) throw std::invalid_argument("partial: component index out of range");
    if (!v.subset_of(VarSet::full(m_)))
        throw std::invalid_argument("partial: v is not a subset of the input variables");
}

void Transform::apply(std::span<const double> u, std::span<double> x) const {
    if (static_cast<int>(u.size()) != m_ || static_cast<int>(x.size()) != d_)
        throw std::invalid_argument("apply: dimension mismatch");
    apply_impl(u, x);
}

std::vector<double> Transform::apply(std::span<const double> u) const {
    std::vector<double> x(static_cast<std::size_t>(d_));
    apply(u, x);
    return x;
}

double Transform::partial(int j, VarSet v, std::span<const double> u) const {
    check_args(j, v);
    if (static_cast<int>(u.size()) != m_) throw std::invalid_argument("partial: dimension mismatch");
    if (v.empty()) {
        std::vector<double> x(static_cast<std::size_t>(d_));
        apply_impl(u, x);
        return x[static_cast<std::size_t>(j)];
    }
    if (!has_closed_partial(j, v))
        throw std::runtime_error("derivative oracle unavailable for component " +
                                 std::to_string(j + 1) + ", v=" + v.to_string());
    return partial_impl(j, v, u);
}

bool Transform::has_closed_partial(int, VarSet) const { return true; }

double Transform::jacobian_weight(std::span<const double>) const {
    switch (weight_kind_) {
        case WeightKind::UnitVolume: return 1.0;
        case WeightKind::Jacobian:
            throw std::logic_error("jacobian_weight: kind declares Jacobian but has no override");
        case WeightKind::Ratio:
            throw std::runtime_error(
                "jacobian_weight: Ratio kinds take their density ratio at the estimator level");
    }
    return 1.0;
}

std::string Transform::name() const { return transform_kind_name(kind_); }

// ---------------------------------------------------------------------------
// Identity

namespace {

class IdentityTransform final : public Transform {
  public:
    explicit IdentityTransform(int d)
        : Transform(TransformKind::Identity, d, d, WeightKind::UnitVolume,
                    {DomainKind::UnitSquare, d}) {}

    bool partial_is_zero(int j, VarSet v) const override {
        return !v.empty() && !(v == VarSet::single(j));
    }

  private:
    void apply_impl(std::span<const double> u, std::span<double> x) const override {
        for (int j = 0; j < d_; ++j) x[j] = u[j];
    }
    double partial_impl(int j, VarSet v, std::span<const double>) const override {
        return v == VarSet::single(j) ? 1.0 : 0.0;
    }
};

// ---------------------------------------------------------------------------
// Separable products: tau_j(u) = prod_i h_{j,i}(u_i). Mixed partials are
// products of per-factor values/derivatives, which covers every Fang-Wang
// style map here.

struct Factor {
    enum class Type {
        One,                // constant 1 (variable unused)
        Power,              // u^alpha
        OneMinusPower,      // 1 - u^alpha
        SqrtOneMinusPower,  // sqrt(1 - u^alpha)
        Cos2Pi,             // cos(2 pi u)
        Sin2Pi,             // sin(2 pi u)
        CosPiCdfInv,        // cos(pi F^-1(u)), F the sin^k CDF
        SinPiCdfInv,        // sin(pi F^-1(u))
        OneMinusTwo,        // 1 - 2u
        ArchSine,           // 2 sqrt(u(1-u))
    };

    Type type = Type::One;
    double alpha = 0.0;
    std::shared_ptr<const SinPowerCdf> cdf;  // CosPiCdfInv / SinPiCdfInv only

    bool is_const() const { return type == Type::One; }

    double value(double u) const {
        switch (type) {
            case Type::One: return 1.0;
            case Type::Power: return std::pow(u, alpha);
            case Type::OneMinusPower: return one_minus_pow(u, alpha);
            case Type::SqrtOneMinusPower: return std::sqrt(one_minus_pow(u, alpha));
            case Type::Cos2Pi: return cos_two_pi(u);
            case Type::Sin2Pi: return sin_two_pi(u);
            case Type::CosPiCdfInv: return cos_pi(cdf->inverse(u));
            case Type::SinPiCdfInv: return sin_pi(cdf->inverse(u));
            case Type::OneMinusTwo: return 1.0 - 2.0 * u;
            case Type::ArchSine: return 2.0 * std::sqrt(u * (1.0 - u));
        }
        return 1.0;
    }

    double derivative(double u) const {
        switch (type) {
            case Type::One: return 0.0;
            case Type::Power: return alpha * std::pow(u, alpha - 1.0);
            case Type::OneMinusPower: return -alpha * std::pow(u, alpha - 1.0);
            case Type::SqrtOneMinusPower:
                return -0.5 * alpha * std::pow(u, alpha - 1.0) /
                       std::sqrt(one_minus_pow(u, alpha));
            case Type::Cos2Pi: return -2.0 * kPi * sin_two_pi(u);
            case Type::Sin2Pi: return 2.0 * kPi * cos_two_pi(u);
            case Type::CosPiCdfInv: {
                // d/du cos(pi b(u)) with b = F^-1, F' = pi sin^k(pi b)/norm
                double b = cdf->inverse(u);
                return -kPi * sin_pi(b) / cdf->pdf(b);
            }
            case Type::SinPiCdfInv: {
                double b = cdf->inverse(u);
                return kPi * cos_pi(b) / cdf->pdf(b);
            }
            case Type::OneMinusTwo: return -2.0;
            case Type::ArchSine: return (1.0 - 2.0 * u) / std::sqrt(u * (1.0 - u));
        }
        return 0.0;
    }
};

Factor power_factor(double alpha) { return {Factor::Type::Power, alpha, nullptr}; }
Factor one_minus_power_factor(double alpha) { return {Factor::Type::OneMinusPower, alpha, nullptr}; }
Factor sqrt_one_minus_power_factor(double alpha) {
    return {Factor::Type::SqrtOneMinusPower, alpha, nullptr};
}

class SeparableTransform : public Transform {
  public:
    SeparableTransform(TransformKind kind, int m, int d, WeightKind wk, DomainDescriptor dom,
                       std::vector<double> params = {})
        : Transform(kind, m, d, wk, dom, std::move(params)),
          factors_(static_cast<std::size_t>(d),
                   std::vector<Factor>(static_cast<std::size_t>(m))) {}

    bool partial_is_zero(int j, VarSet v) const override {
        for (int i : v.elements())
            if (factors_[j][i].is_const()) return true;
        return false;
    }

  protected:
    void set_factor(int j, int i, Factor f) { factors_[j][i] = std::move(f); }

    void apply_impl(std::span<const double> u, std::span<double> x) const override {
        for (int j = 0; j < d_; ++j) {
            double prod = 1.0;
            for (int i = 0; i < m_; ++i)
                if (!factors_[j][i].is_const()) prod *= factors_[j][i].value(u[i]);
            x[j] = prod;
        }
    }

    double partial_impl(int j, VarSet v, std::span<const double> u) const override {
        double prod = 1.0;
        for (int i = 0; i < m_; ++i) {
            const Factor& f = factors_[j][i];
            if (v.contains(i)) {
                if (f.is_const()) return 0.0;
                prod *= f.derivative(u[i]);
            } else if (!f.is_const()) {
                prod *= f.value(u[i]);
            }
        }
        return prod;
    }

    std::vector<std::vector<Factor>> factors_;  // [component][variable]
};

// ---------------------------------------------------------------------------
// tau_j = prod_{i>=j} u_i^{a_i}; Fang-Wang's A_d map is a_i = 1/i.

class SimplexPowerTransform final : public SeparableTransform {
  public:
    SimplexPowerTransform(TransformKind kind, int d, std::vector<double> a)
        : SeparableTransform(kind, d, d,
                             kind == TransformKind::FwAd ? WeightKind::UnitVolume
                                                         : WeightKind::Jacobian,
                             {DomainKind::SimplexA, d}, a) {
        for (int j = 0; j < d; ++j)
            for (int i = j; i < d; ++i) set_factor(j, i, power_factor(a[i]));
        log_A_ = 0.0;
        for (double aj : a) log_A_ += std::log(aj);
    }

    double jacobian_weight(std::span<const double> u) const override {
        if (weight_kind_ == WeightKind::UnitVolume) return 1.0;
        // J(u) = A prod_j u_j^{j a_j - 1}, A = prod_j a_j
        double j_val = std::exp(log_A_);
        for (int j = 0; j < d_; ++j) {
            double expo = (j + 1) * params_[j] - 1.0;
            double uj = u[j];
            if (uj <= 0.0 && expo < 0.0) uj = clamped(uj);
            j_val *= std::pow(uj, expo);
        }
        return j_val;
    }

  private:
    double log_A_;
};

// ---------------------------------------------------------------------------
// Ball map. Radius b_1 = u_1^{1/d}; angles b_i = F_i^{-1}(u_i) with
// sin-power densities of exponent d-i, the last angle plain 2 pi u_d.

class FwBdTransform final : public SeparableTransform {
  public:
    explicit FwBdTransform(int d)
        : SeparableTransform(TransformKind::FwBd, d, d, WeightKind::UnitVolume,
                             {DomainKind::Ball, d}) {
        std::vector<std::shared_ptr<const SinPowerCdf>> cdf(static_cast<std::size_t>(d));
        for (int i = 2; i <= d - 1; ++i) cdf[i] = std::make_shared<SinPowerCdf>(d - i);

        for (int j = 1; j <= d; ++j) {
            set_factor(j - 1, 0, power_factor(1.0 / d));
            int sin_up_to = (j <= d - 2) ? j : d - 1;
            for (int i = 2; i <= sin_up_to; ++i)
                set_factor(j - 1, i - 1, Factor{Factor::Type::SinPiCdfInv, 0.0, cdf[i]});
            if (j <= d - 2)
                set_factor(j - 1, j, Factor{Factor::Type::CosPiCdfInv, 0.0, cdf[j + 1]});
            else if (j == d - 1)
                set_factor(j - 1, d - 1, Factor{Factor::Type::Cos2Pi, 0.0, nullptr});
            else
                set_factor(j - 1, d - 1, Factor{Factor::Type::Sin2Pi, 0.0, nullptr});
        }
    }
};

// Sphere map with sin-power angle densities of exponent d-j-1.
class FwUdTransform final : public SeparableTransform {
  public:
    explicit FwUdTransform(int d)
        : SeparableTransform(TransformKind::FwUd, d - 1, d, WeightKind::UnitVolume,
                             {DomainKind::Sphere, d}) {
        std::vector<std::shared_ptr<const SinPowerCdf>> cdf(static_cast<std::size_t>(d));
        for (int i = 1; i <= d - 2; ++i) cdf[i] = std::make_shared<SinPowerCdf>(d - i - 1);

        for (int j = 1; j <= d; ++j) {
            int sin_up_to = (j <= d - 2) ? j - 1 : d - 2;
            for (int i = 1; i <= sin_up_to; ++i)
                set_factor(j - 1, i - 1, Factor{Factor::Type::SinPiCdfInv, 0.0, cdf[i]});
            if (j <= d - 2)
                set_factor(j - 1, j - 1, Factor{Factor::Type::CosPiCdfInv, 0.0, cdf[j]});
            else if (j == d - 1)
                set_factor(j - 1, d - 2, Factor{Factor::Type::Cos2Pi, 0.0, nullptr});
            else
                set_factor(j - 1, d - 2, Factor{Factor::Type::Sin2Pi, 0.0, nullptr});
        }
    }
};

// Corner simplex V_d: x_i = u_1^{1/d} prod_{j=2..i} u_j^{1/(d-j+1)} (1 - u_{i+1}^{1/(d-i)}).
class FwVdTransform final : public SeparableTransform {
  public:
    explicit FwVdTransform(int d)
        : SeparableTransform(TransformKind::FwVd, d, d, WeightKind::UnitVolume,
                             {DomainKind::SimplexV, d}) {
        for (int i = 1; i <= d; ++i) {
            set_factor(i - 1, 0, power_factor(1.0 / d));
            for (int j = 2; j <= i; ++j)
                set_factor(i - 1, j - 1, power_factor(1.0 / (d - j + 1)));
            if (i <= d - 1)
                set_factor(i - 1, i, one_minus_power_factor(1.0 / (d - i)));
        }
    }
};

// Probability simplex T_d: x_i = prod_{j<i} u_j^{1/(d-j)} (1 - u_i^{1/(d-i)}).
class FwTdTransform final : public SeparableTransform {
  public:
    explicit FwTdTransform(int d)
        : SeparableTransform(TransformKind::FwTd, d - 1, d, WeightKind::UnitVolume,
                             {DomainKind::SimplexT, d}) {
        for (int i = 1; i <= d; ++i) {
            for (int j = 1; j < i; ++j) set_factor(i - 1, j - 1, power_factor(1.0 / (d - j)));
            if (i <= d - 1) set_factor(i - 1, i - 1, one_minus_power_factor(1.0 / (d - i)));
        }
    }
};

// Sphere map that avoids incomplete-beta inversions. Radial split by the
// recursion g_l, trig angles; even and odd d differ in the split exponents
// and in the polar block handling the odd coordinate.
class FwUdEfficientTransform final : public SeparableTransform {
  public:
    explicit FwUdEfficientTransform(int d)
        : SeparableTransform(TransformKind::FwUdEfficient, d - 1, d, WeightKind::UnitVolume,
                             {DomainKind::Sphere, d}) {
        const int half = d / 2;
        if (d % 2 == 0) {
            // d_l = sqrt(g_l - g_{l-1}), g_j = prod_{k=j..half-1} u_k^{1/k}
            for (int l = 1; l <= half; ++l) {
                for (int k = l; k <= half - 1; ++k)
                    radial(l, k, power_factor(0.5 / k));
                if (l >= 2) radial(l, l - 1, sqrt_one_minus_power_factor(1.0 / (l - 1)));
                int angle = half + l - 1;
                set_factor(2 * l - 2, angle - 1, Factor{Factor::Type::Cos2Pi, 0.0, nullptr});
                set_factor(2 * l - 1, angle - 1, Factor{Factor::Type::Sin2Pi, 0.0, nullptr});
            }
        } else {
            // g_j = prod_{k=j..half-1} u_k^{2/(2k+1)}; the l = 1 slot splits
            // into three coordinates through the polar variable u_half.
            for (int l = 1; l <= half; ++l) {
                std::vector<int> comps = (l == 1) ? std::vector<int>{1, 2, 3}
                                                  : std::vector<int>{2 * l, 2 * l + 1};
                for (int c : comps) {
                    for (int k = l; k <= half - 1; ++k)
                        set_factor(c - 1, k - 1, power_factor(1.0 / (2 * k + 1)));
                    if (l >= 2)
                        set_factor(c - 1, l - 2, sqrt_one_minus_power_factor(2.0 / (2 * l - 1)));
                }
                if (l == 1) {
                    set_factor(0, half - 1, Factor{Factor::Type::OneMinusTwo, 0.0, nullptr});
                    set_factor(1, half - 1, Factor{Factor::Type::ArchSine, 0.0, nullptr});
                    set_factor(2, half - 1, Factor{Factor::Type::ArchSine, 0.0, nullptr});
                    set_factor(1, half, Factor{Factor::Type::Cos2Pi, 0.0, nullptr});
                    set_factor(2, half, Factor{Factor::Type::Sin2Pi, 0.0, nullptr});
                } else {
                    int angle = half + l;
                    set_factor(2 * l - 1, angle - 1, Factor{Factor::Type::Cos2Pi, 0.0, nullptr});
                    set_factor(2 * l, angle - 1, Factor{Factor::Type::Sin2Pi, 0.0, nullptr});
                }
            }
        }
    }

  private:
    void radial(int l, int k, Factor f) {
        set_factor(2 * l - 2, k - 1, f);
        set_factor(2 * l - 1, k - 1, std::move(f));
    }
};

// ---------------------------------------------------------------------------
// tau_j = log(u_j) / sum_i log(u_i). All mixed partials follow from the
// Leibniz rule applied to s_j * (1/L):
//   j not in v:  (-1)^{|v|} |v|!  s_j L^{-|v|-1} prod_{i in v} 1/u_i
//   j in v:      (-1)^{|v|-1} (|v|-1)! (L - |v| s_j) L^{-|v|-1} prod_{i in v} 1/u_i

class SimplexLogTransform final : public Transform {
  public:
    explicit SimplexLogTransform(int m)
        : Transform(TransformKind::SimplexLog, m, m, WeightKind::UnitVolume,
                    {DomainKind::SimplexT, m}) {}

  private:
    // The map is undefined at u_i = 0 and at the all-ones corner; clamp only
    // there.
    double interior(double ui) const {
        return (ui < kEps) ? clamped(ui) : ui;
    }

    std::vector<double> logs(std::span<const double> u) const {
        std::vector<double> s(static_cast<std::size_t>(m_));
        double total = 0.0;
        for (int i = 0; i < m_; ++i) {
            s[i] = std::log(interior(u[i]));
            total += s[i];
        }
        if (total == 0.0) {  // all-ones corner
            for (int i = 0; i < m_; ++i) s[i] = std::log(clamped(1.0));
        }
        return s;
    }

    void apply_impl(std::span<const double> u, std::span<double> x) const override {
        auto s = logs(u);
        double total = 0.0;
        for (double si : s) total += si;
        for (int i = 0; i < m_; ++i) x[i] = s[i] / total;
    }

    double partial_impl(int j, VarSet v, std::span<const double> u) const override {
        const int c = v.count();
        auto s = logs(u);
        double big_l = 0.0;
        for (double si : s) big_l += si;
        double inv_prod = 1.0;
        for (int i : v.elements()) inv_prod /= interior(u[i]);
        double fact = 1.0;
        for (int i = 2; i <= c; ++i) fact *= i;  // |v|!
        double sign = (c % 2 == 0) ? 1.0 : -1.0;
        if (!v.contains(j)) return sign * fact * s[j] * inv_prod / std::pow(big_l, c + 1);
        // one Leibniz term differentiates s_j itself
        return -sign * (fact / c) * (big_l - c * s[j]) * inv_prod / std::pow(big_l, c + 1);
    }
};

// ---------------------------------------------------------------------------
// Standardized inverse-Gaussian sphere map, tau_j = z_j / ||z|| with
// z_i = Phi^-1(u_i). Writing r = ||z||, g(n) = (2n-1)!!:
//   j not in v: (-1)^{|v|} g(|v|)   z_j                 / r^{2|v|+1} * prod_{i in v} z_i/phi(z_i)
//   j in v:     (-1)^{|v|} g(|v|-1) ((2|v|-1) z_j^2 - r^2)
//                                   / (r^{2|v|+1} phi(z_j)) * prod_{i in v-j} z_i/phi(z_i)

class SphereGaussTransform final : public Transform {
  public:
    explicit SphereGaussTransform(int d)
        : Transform(TransformKind::SphereGauss, d, d, WeightKind::UnitVolume,
                    {DomainKind::Sphere, d}) {}

    bool finite_at_one() const override { return false; }

  private:
    std::vector<double> gaussians(std::span<const double> u) const {
        std::vector<double> z(static_cast<std::size_t>(m_));
        for (int i = 0; i < m_; ++i) z[i] = inverse_normal_cdf(clamped(u[i]));
        return z;
    }

    void apply_impl(std::span<const double> u, std::span<double> x) const override {
        auto z = gaussians(u);
        double r = norm2(z);
        if (r == 0.0) throw std::domain_error("singular input: zero norm");
        for (int j = 0; j < d_; ++j) x[j] = z[j] / r;
    }

    double partial_impl(int j, VarSet v, std::span<const double> u) const override {
        auto z = gaussians(u);
        double r2 = 0.0;
        for (double zi : z) r2 += zi * zi;
        if (r2 == 0.0) throw std::domain_error("singular input: zero norm");
        const int c = v.count();
        double sign = (c % 2 == 0) ? 1.0 : -1.0;
        double denom = std::pow(r2, c + 0.5);
        if (!v.contains(j)) {
            double g = 1.0;
            for (int i = 1; i <= c; ++i) g *= 2 * i - 1;  // (2|v|-1)!!
            double prod = 1.0;
            for (int i : v.elements()) prod *= z[i] / normal_pdf(z[i]);
            return sign * g * z[j] * prod / denom;
        }
        double g = 1.0;
        for (int i = 1; i <= c - 1; ++i) g *= 2 * i - 1;  // (2|v|-3)!!
        double prod = 1.0;
        for (int i : v.elements())
            if (i != j) prod *= z[i] / normal_pdf(z[i]);
        double bracket = (2.0 * c - 1.0) * z[j] * z[j] - r2;
        return sign * g * bracket * prod / (denom * normal_pdf(z[j]));
    }
};

// ---------------------------------------------------------------------------
// Rosenblatt sequential inversion for the FGM density
// f(x,y) = 1 + theta (1-2x)(1-2y). The first marginal is uniform, and the
// conditional CDF y + c y(1-y), c = theta (1-2x), inverts as a quadratic.

class Rosenblatt2DTransform final : public Transform {
  public:
    explicit Rosenblatt2DTransform(double theta)
        : Transform(TransformKind::Rosenblatt2D, 2, 2, WeightKind::Ratio,
                    {DomainKind::UnitSquare, 2}, {theta}),
          theta_(theta) {}

  private:
    double theta_;

    static double conditional_inverse(double c, double u2) {
        // root in [0,1] of c y^2 - (1+c) y + u2 = 0, stable as c -> 0
        double disc = (1.0 + c) * (1.0 + c) - 4.0 * c * u2;
        return 2.0 * u2 / (1.0 + c + std::sqrt(disc));
    }

    void apply_impl(std::span<const double> u, std::span<double> x) const override {
        double c = theta_ * (1.0 - 2.0 * u[0]);
        x[0] = u[0];
        x[1] = conditional_inverse(c, u[1]);
    }

    double partial_impl(int j, VarSet v, std::span<const double> u) const override {
        double c = theta_ * (1.0 - 2.0 * u[0]);
        double y = conditional_inverse(c, u[1]);
        double fy = 1.0 + c * (1.0 - 2.0 * y);  // conditional density at y
        if (j == 0) return v == VarSet::single(0) ? 1.0 : 0.0;
        if (v == VarSet::single(1)) return 1.0 / fy;
        if (v == VarSet::single(0)) return 2.0 * theta_ * y * (1.0 - y) / fy;
        // d^2 tau_2 / du_1 du_2 = -fy^-2 dfy/du_1 with both c and y moving
        double dy_du1 = 2.0 * theta_ * y * (1.0 - y) / fy;
        return (2.0 * theta_ * (1.0 - 2.0 * y) + 2.0 * c * dy_du1) / (fy * fy);
    }
};

}  // namespace

// ---------------------------------------------------------------------------

std::unique_ptr<Transform> make_transform(TransformKind kind, int dim,
                                          std::vector<double> params) {
    switch (kind) {
        case TransformKind::Identity:
            if (dim < 1) throw std::invalid_argument("Identity: dim must be >= 1");
            return std::make_unique<IdentityTransform>(dim);
        case TransformKind::SimplexLog:
            if (dim < 2) throw std::invalid_argument("SimplexLog: dim must be >= 2");
            return std::make_unique<SimplexLogTransform>(dim);
        case TransformKind::SphereGauss:
            if (dim < 2) throw std::invalid_argument("SphereGauss: dim must be >= 2");
            return std::make_unique<SphereGaussTransform>(dim);
        case TransformKind::FwAd: {
            if (dim < 1) throw std::invalid_argument("FwAd: dim must be >= 1");
            std::vector<double> a(static_cast<std::size_t>(dim));
            for (int i = 0; i < dim; ++i) a[i] = 1.0 / (i + 1);
            return std::make_unique<SimplexPowerTransform>(TransformKind::FwAd, dim, a);
        }
        case TransformKind::FwBd:
            if (dim < 2) throw std::invalid_argument("FwBd: dim must be >= 2");
            return std::make_unique<FwBdTransform>(dim);
        case TransformKind::FwUd:
            if (dim < 2) throw std::invalid_argument("FwUd: dim must be >= 2");
            return std::make_unique<FwUdTransform>(dim);
        case TransformKind::FwVd:
            if (dim < 2) throw std::invalid_argument("FwVd: dim must be >= 2");
            return std::make_unique<FwVdTransform>(dim);
        case TransformKind::FwTd:
            if (dim < 2) throw std::invalid_argument("FwTd: dim must be >= 2");
            return std::make_unique<FwTdTransform>(dim);
        case TransformKind::FwUdEfficient:
            if (dim < 2) throw std::invalid_argument("FwUdEfficient: dim must be >= 2");
            return std::make_unique<FwUdEfficientTransform>(dim);
        case TransformKind::SimplexPower: {
            if (dim < 1) throw std::invalid_argument("SimplexPower: dim must be >= 1");
            if (static_cast<int>(params.size()) != dim)
                throw std::invalid_argument("SimplexPower: need one exponent a_j per dimension");
            for (double aj : params)
                if (!(aj > 0.0)) throw std::invalid_argument("SimplexPower: a_j must be positive");
            return std::make_unique<SimplexPowerTransform>(TransformKind::SimplexPower, dim,
                                                           std::move(params));
        }
        case TransformKind::Rosenblatt2D: {
            if (dim != 2) throw std::invalid_argument("Rosenblatt2D: dim must be 2");
            if (params.size() != 1)
                throw std::invalid_argument("Rosenblatt2D: params must be { theta }");
            return rosenblatt2d_family(params[0]);
        }
    }
    throw std::invalid_argument("make_transform: unknown kind");
}

std::unique_ptr<Transform> rosenblatt2d_family(double theta) {
    if (!(std::abs(theta) <= 1.0))
        throw std::invalid_argument("rosenblatt2d_family: |theta| <= 1 required for a valid density");
    return std::make_unique<Rosenblatt2DTransform>(theta);
}

double partial_or_fd(const Transform& t, int j, VarSet v, std::span<const double> u,
                     bool* approximate) {
    if (t.has_closed_partial(j, v)) return t.partial(j, v, u);
    if (approximate) *approximate = true;
    std::vector<double> base(u.begin(), u.end());
    return central_mixed_difference(base, v, [&](std::span<const double> uu) {
        std::vector<double> x(static_cast<std::size_t>(t.output_dim()));
        t.apply(uu, x);
        return x[static_cast<std::size_t>(j)];
    });
}

double central_mixed_difference(const std::vector<double>& u, VarSet v,
                                const std::function<double(std::span<const double>)>& f,
                                double step) {
    auto vars = v.elements();
    const int c = static_cast<int>(vars.size());
    if (c == 0) return f(u);
    std::vector<double> point = u;
    double sum = 0.0;
    for (std::uint32_t bits = 0; bits < (1u << c); ++bits) {
        int minus = 0;
        for (int i = 0; i < c; ++i) {
            bool plus = (bits >> i) & 1u;
            point[vars[i]] = u[vars[i]] + (plus ? step : -step);
            if (!plus) ++minus;
        }
        sum += ((minus % 2 == 0) ? 1.0 : -1.0) * f(point);
    }
    return sum / std::pow(2.0 * step, c);
}

TransformKind transform_kind_from_name(const std::string& name) {
    if (name == "identity") return TransformKind::Identity;
    if (name == "simplex-log") return TransformKind::SimplexLog;
    if (name == "sphere-gauss") return TransformKind::SphereGauss;
    if (name == "fw-ad") return TransformKind::FwAd;
    if (name == "fw-bd") return TransformKind::FwBd;
    if (name == "fw-ud") return TransformKind::FwUd;
    if (name == "fw-vd") return TransformKind::FwVd;
    if (name == "fw-td") return TransformKind::FwTd;
    if (name == "fw-ud-efficient") return TransformKind::FwUdEfficient;
    if (name == "simplex-power") return TransformKind::SimplexPower;
    if (name == "rosenblatt") return TransformKind::Rosenblatt2D;
    throw std::invalid_argument("unknown transform kind: " + name);
}

std::string transform_kind_name(TransformKind kind) {
    switch (kind) {
        case TransformKind::Identity: return "identity";
        case TransformKind::SimplexLog: return "simplex-log";
        case TransformKind::SphereGauss: return "sphere-gauss";
        case TransformKind::FwAd: return "fw-ad";
        case TransformKind::FwBd: return "fw-bd";
        case TransformKind::FwUd: return "fw-ud";
        case TransformKind::FwVd: return "fw-vd";
        case TransformKind::FwTd: return "fw-td";
        case TransformKind::FwUdEfficient: return "fw-ud-efficient";
        case TransformKind::SimplexPower: return "simplex-power";
        case TransformKind::Rosenblatt2D: return "rosenblatt";
    }
    return "?";
}

}  // namespace qmcx
