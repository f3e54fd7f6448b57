#include "nipaths/kernel_finite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nipaths/error.hpp"
#include "nipaths/quadrature.hpp"

namespace nipaths {

const char* route_name(FiniteRoute r)
{
    switch (r) {
    case FiniteRoute::Auto: return "auto";
    case FiniteRoute::General: return "general";
    case FiniteRoute::GeneralFull: return "general-full";
    case FiniteRoute::EqualDistinct: return "equal-distinct";
    case FiniteRoute::EqualQuadrature: return "equal-quadrature";
    case FiniteRoute::EqualConfluent: return "equal-confluent";
    case FiniteRoute::EynardMehta: return "eynard-mehta";
    }
    return "unknown";
}

FiniteRoute route_from_name(const std::string& name)
{
    for (auto r : {FiniteRoute::Auto, FiniteRoute::General, FiniteRoute::GeneralFull, FiniteRoute::EqualDistinct,
                   FiniteRoute::EqualQuadrature, FiniteRoute::EqualConfluent, FiniteRoute::EynardMehta}) {
        if (name == route_name(r))
            return r;
    }
    throw Error(ErrorCode::InvalidParams, "unknown finite kernel route '" + name + "'");
}

FiniteRoute default_route(const ValidatedModel& model)
{
    if (model.distinct_beta())
        return FiniteRoute::General;
    if (model.equal_beta() && model.equal_spacing())
        return FiniteRoute::EqualConfluent;
    return FiniteRoute::EynardMehta;
}

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

void check_point(const ValidatedModel& m, GridPoint p)
{
    if (p.s < 0 || p.s > m.lines() || p.x < 0)
        throw Error(ErrorCode::IndexError, "grid point (" + std::to_string(p.s) + "," + std::to_string(p.x) +
                                               ") outside the finite-N lattice");
}

void require_lower_half(const ValidatedModel& m, GridPoint p1, GridPoint p2, const char* route)
{
    if (p1.s > m.n() || p2.s > m.n())
        throw Error(ErrorCode::IndexError, std::string(route) + " route needs s1, s2 <= N");
}

std::vector<double> betas(const ValidatedModel& m)
{
    return m.params().beta;
}

std::vector<double> inverse(const std::vector<double>& v)
{
    std::vector<double> r(v.size());
    std::transform(v.begin(), v.end(), r.begin(), [](double x) { return 1.0 / x; });
    return r;
}

// [z^d] P(z) prod_up (1 - a z)^{-1} prod_down (1 - b/z)^{-1}
double poly_laurent(const PolyCoeffs& p, const std::vector<double>& up, const std::vector<double>& down, long d)
{
    double acc = 0.0;
    for (size_t a = 0; a < p.size(); ++a) {
        if (p[a] != 0.0)
            acc += p[a] * laurent_coefficient(up, down, d - static_cast<long>(a));
    }
    return acc;
}

}  // namespace

double indicator_term(const ValidatedModel& m, GridPoint p1, GridPoint p2)
{
    if (p1.s <= p2.s)
        return 0.0;
    return -laurent_coefficient(m.up_rates(p2.s, p1.s), m.down_rates(p2.s, p1.s), p1.x - p2.x);
}

struct FiniteKernel::Impl {
    ValidatedModel m;
    double tol;

    // biorthogonal data (distinct beta)
    std::vector<PolyCoeffs> phi_poly;  // h_k(beta; beta_j -> z)
    std::vector<PolyCoeffs> psi_poly;  // h_l(1/beta; 1/beta_j -> u)
    AlternantValue hk, hl;
    std::vector<double> prefactor;  // weight of the j-th term in the general formula
    std::vector<double> off_diag;   // prod_{s != j} (1 - beta_s/beta_j)

    // equal spacing, distinct beta
    std::vector<PolyCoeffs> lagrange;  // prod_{l != j}(z^k - beta_l^k) / prod_{l != j}(beta_j^k - beta_l^k)

    // Eynard-Mehta
    Eigen::MatrixXd gramm_inv_t;
    bool em_ready = false;

    std::unique_ptr<ConfluentKernel> confluent;

    Impl(const ValidatedModel& model, double t) : m(model), tol(t) {}

    void init_biorthogonal()
    {
        const auto& p = m.params();
        const int n = m.n();
        const auto beta = betas(m);
        const auto inv_beta = inverse(beta);
        hk = alternant(p.k, beta);
        hl = alternant(p.l, inv_beta);
        for (int j = 1; j <= n; ++j) {
            phi_poly.push_back(substituted_alternant(p.k, beta, j));
            psi_poly.push_back(substituted_alternant(p.l, inv_beta, j));
            const double bj = beta[static_cast<size_t>(j - 1)];
            double num = 1.0, od = 1.0;
            for (int r = 1; r <= n; ++r) {
                num *= 1.0 - m.alpha(r) * bj;
                if (r != j)
                    od *= 1.0 - m.beta(r) / bj;
            }
            off_diag.push_back(od);
            prefactor.push_back(num * od / (hk.value * hl.value));
        }
    }

    // Phi side: coefficient of z^{x1} in phi_poly_j * prod_{steps <= s1} F.
    double phi_side(int j, GridPoint p) const
    {
        return poly_laurent(phi_poly[static_cast<size_t>(j)], m.up_rates(0, p.s), m.down_rates(0, p.s), p.x);
    }

    // Psi side: integral of psi_poly_j(1/z) prod_{steps > s2} F z^{x2} dz/z.
    double psi_side(int j, GridPoint p) const
    {
        const int n = m.n();
        if (p.s >= n) {
            // Only beta factors remain: a pure series in u = 1/z.
            std::vector<double> rates;
            for (int r = 1; r <= 2 * n - p.s; ++r)
                rates.push_back(m.beta(r));
            return coeff_of_poly_times_geometric(psi_poly[static_cast<size_t>(j)], rates, p.x);
        }
        // Mixed case: residue at z = beta_j (no pole at 0 since l_N <= N-1).
        const double bj = m.beta(j + 1);
        double den = off_diag[static_cast<size_t>(j)];
        for (int step = p.s + 1; step <= n; ++step)
            den *= 1.0 - m.alpha(step) * bj;
        return std::pow(bj, static_cast<double>(p.x)) * hl.value / den;
    }

    KernelValue general_full(GridPoint p1, GridPoint p2) const
    {
        double sum = 0.0, abs_sum = 0.0;
        for (int j = 0; j < m.n(); ++j) {
            const double t = prefactor[static_cast<size_t>(j)] * phi_side(j, p1) * psi_side(j, p2);
            sum += t;
            abs_sum += std::fabs(t);
        }
        const double err = abs_sum * std::max({hk.rel_error, hl.rel_error, 64 * eps});
        return {indicator_term(m, p1, p2) + sum, err, FiniteRoute::GeneralFull};
    }

    KernelValue general(GridPoint p1, GridPoint p2) const
    {
        if (p1.s > m.n() || p2.s > m.n())
            return general_full(p1, p2);
        const auto alphas = m.up_rates(0, p1.s);
        double sum = 0.0, abs_sum = 0.0;
        for (int j = 1; j <= m.n(); ++j) {
            const double bj = m.beta(j);
            double right = std::pow(bj, static_cast<double>(p2.x));
            for (int r = 1; r <= p2.s; ++r)
                right *= 1.0 - m.alpha(r) * bj;
            const double t =
                coeff_of_poly_times_geometric(phi_poly[static_cast<size_t>(j - 1)], alphas, p1.x) / hk.value * right;
            sum += t;
            abs_sum += std::fabs(t);
        }
        const double err = abs_sum * std::max(hk.rel_error, 64 * eps);
        return {indicator_term(m, p1, p2) + sum, err, FiniteRoute::General};
    }

    void init_equal_distinct()
    {
        const int n = m.n();
        const int k = *m.equal_spacing();
        for (int j = 1; j <= n; ++j) {
            const double uj = std::pow(m.beta(j), k);
            PolyCoeffs p{1.0};
            double den = 1.0;
            for (int l = 1; l <= n; ++l) {
                if (l == j)
                    continue;
                const double ul = std::pow(m.beta(l), k);
                PolyCoeffs factor(static_cast<size_t>(k) + 1, 0.0);
                factor[0] = -ul;
                factor[static_cast<size_t>(k)] += 1.0;
                p = multiply(p, factor);
                den *= uj - ul;
            }
            for (auto& c : p)
                c /= den;
            lagrange.push_back(p);
        }
    }

    KernelValue equal_distinct(GridPoint p1, GridPoint p2) const
    {
        require_lower_half(m, p1, p2, "equal-distinct");
        const auto alphas = m.up_rates(0, p1.s);
        double sum = 0.0, abs_sum = 0.0;
        for (int j = 1; j <= m.n(); ++j) {
            const double bj = m.beta(j);
            double right = std::pow(bj, static_cast<double>(p2.x));
            for (int r = 1; r <= p2.s; ++r)
                right *= 1.0 - m.alpha(r) * bj;
            const double t = coeff_of_poly_times_geometric(lagrange[static_cast<size_t>(j - 1)], alphas, p1.x) * right;
            sum += t;
            abs_sum += std::fabs(t);
        }
        return {indicator_term(m, p1, p2) + sum, abs_sum * 64 * eps, FiniteRoute::EqualDistinct};
    }

    CircleSpec gamma_beta_contour() const
    {
        const int k = *m.equal_spacing();
        const auto& beta = m.params().beta;
        const double bmin = *std::min_element(beta.begin(), beta.end());
        const double bmax = *std::max_element(beta.begin(), beta.end());
        double amax = 0.0;
        for (int r = 1; r <= m.n(); ++r)
            amax = std::max(amax, m.alpha(r));
        const double root_gap = k > 1 ? std::abs(1.0 - std::polar(1.0, 2.0 * std::numbers::pi / k)) / 2.0 : 1.0;
        const double margin = bmin * std::min({1.0 - bmax, root_gap, 0.5 * (1.0 / amax - bmax)});
        CircleSpec c{cplx(0.5 * (bmin + bmax), 0.0), 0.5 * (bmax - bmin) + margin};
        // The circle must stay inside the unit disk and away from the rotated roots beta_t w^j.
        if (std::abs(c.center) + c.radius >= 1.0)
            throw Error(ErrorCode::InvalidParams, "contour around beta leaves the unit disk");
        for (double b : beta) {
            for (int j = 1; j < k; ++j) {
                const cplx root = b * std::polar(1.0, 2.0 * std::numbers::pi * j / k);
                if (std::abs(root - c.center) <= c.radius)
                    throw Error(ErrorCode::InvalidParams, "betas too spread to separate from their rotations");
            }
        }
        return c;
    }

    KernelValue equal_quadrature(GridPoint p1, GridPoint p2) const
    {
        require_lower_half(m, p1, p2, "equal-quadrature");
        const int n = m.n();
        const int k = *m.equal_spacing();
        const auto circle = gamma_beta_contour();

        // Numerator of the z-side: prod_t (z^k - beta_t^k).
        PolyCoeffs zpoly{1.0};
        for (int t = 1; t <= n; ++t) {
            PolyCoeffs factor(static_cast<size_t>(k) + 1, 0.0);
            factor[0] = -std::pow(m.beta(t), k);
            factor[static_cast<size_t>(k)] += 1.0;
            zpoly = multiply(zpoly, factor);
        }
        const auto alphas = m.up_rates(0, p1.s);

        double sum = 0.0, err = 0.0;
        int small_terms = 0;
        for (long mm = 0; mm < 100000; ++mm) {
            const double outer = coeff_of_poly_times_geometric(zpoly, alphas, p1.x + k * (mm + 1));
            const long power = p2.x + k - 1 + k * mm;
            auto inner_f = [&](cplx w) {
                cplx num = std::pow(w, static_cast<int>(power));
                for (int r = 1; r <= p2.s; ++r)
                    num *= 1.0 - m.alpha(r) * w;
                cplx den{1.0, 0.0};
                const cplx wk = std::pow(w, k);
                for (int t = 1; t <= n; ++t)
                    den *= wk - std::pow(m.beta(t), k);
                return static_cast<double>(k) * num / den;
            };
            const auto inner = circle_integral(inner_f, circle, tol * 1e-2);
            const double term = outer * inner.value.real();
            sum += term;
            err += std::fabs(outer) * inner.error;
            if (std::fabs(term) <= 1e-17 * std::max(std::fabs(sum), 1e-300))
                ++small_terms;
            else
                small_terms = 0;
            if (small_terms >= 3)
                return {indicator_term(m, p1, p2) + sum, err, FiniteRoute::EqualQuadrature};
        }
        throw Error(ErrorCode::NoConvergence, "double-integral expansion did not converge");
    }

    void init_em()
    {
        const int n = m.n();
        const auto& p = m.params();
        const auto up = m.up_rates(0, 2 * n);
        const auto down = m.down_rates(0, 2 * n);
        Eigen::MatrixXd g(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                g(i, j) = laurent_coefficient(up, down, p.l[static_cast<size_t>(j)] - p.k[static_cast<size_t>(i)]);
        }
        const auto lu = g.partialPivLu();
        const double rcond = lu.rcond();
        if (!(rcond > 1e-12))
            throw Error(ErrorCode::SingularGramm, "Gramm matrix condition exceeds 1e12");
        gramm_inv_t = lu.inverse().transpose();
        em_ready = true;
    }

    KernelValue em(GridPoint p1, GridPoint p2) const
    {
        const int n = m.n();
        const auto& p = m.params();
        const auto up1 = m.up_rates(0, p1.s), down1 = m.down_rates(0, p1.s);
        const auto up2 = m.up_rates(p2.s, 2 * n), down2 = m.down_rates(p2.s, 2 * n);
        Eigen::VectorXd phi(n), psi(n);
        for (int i = 0; i < n; ++i) {
            phi(i) = laurent_coefficient(up1, down1, p1.x - p.k[static_cast<size_t>(i)]);
            psi(i) = laurent_coefficient(up2, down2, p.l[static_cast<size_t>(i)] - p2.x);
        }
        const double main = phi.dot(gramm_inv_t * psi);
        const double scale = phi.cwiseAbs().dot(gramm_inv_t.cwiseAbs() * psi.cwiseAbs());
        return {indicator_term(m, p1, p2) + main, scale * 1e3 * eps, FiniteRoute::EynardMehta};
    }
};

FiniteKernel::FiniteKernel(const ValidatedModel& model, FiniteRoute route, double tol)
    : model_(model), route_(route == FiniteRoute::Auto ? default_route(model) : route)
{
    impl_ = std::make_unique<Impl>(model_, tol);
    switch (route_) {
    case FiniteRoute::General:
    case FiniteRoute::GeneralFull:
        if (!model_.distinct_beta())
            throw Error(ErrorCode::DegenerateBeta, "general route needs pairwise distinct beta");
        impl_->init_biorthogonal();
        break;
    case FiniteRoute::EqualDistinct:
        if (!model_.equal_spacing())
            throw Error(ErrorCode::NotEqualSpacing, "start offsets are not k(j-1)");
        if (!model_.distinct_beta())
            throw Error(ErrorCode::DegenerateBeta, "equal-distinct route needs pairwise distinct beta");
        impl_->init_equal_distinct();
        break;
    case FiniteRoute::EqualQuadrature:
        if (!model_.equal_spacing())
            throw Error(ErrorCode::NotEqualSpacing, "start offsets are not k(j-1)");
        impl_->gamma_beta_contour();
        break;
    case FiniteRoute::EqualConfluent:
        if (!model_.equal_spacing())
            throw Error(ErrorCode::NotEqualSpacing, "start offsets are not k(j-1)");
        if (!model_.equal_beta())
            throw Error(ErrorCode::InvalidParams, "equal-confluent route needs all beta equal");
        impl_->confluent = std::make_unique<ConfluentKernel>(model_);
        break;
    case FiniteRoute::EynardMehta:
        impl_->init_em();
        break;
    case FiniteRoute::Auto:
        break;
    }
    // Auto covers the upper half of a confluent model through the Gramm inverse.
    if (route == FiniteRoute::Auto && route_ == FiniteRoute::EqualConfluent) {
        try {
            impl_->init_em();
        } catch (const Error&) {
        }
    }
}

FiniteKernel::~FiniteKernel() = default;
FiniteKernel::FiniteKernel(FiniteKernel&&) noexcept = default;

KernelValue FiniteKernel::evaluate(GridPoint p1, GridPoint p2) const
{
    check_point(model_, p1);
    check_point(model_, p2);
    switch (route_) {
    case FiniteRoute::General: return impl_->general(p1, p2);
    case FiniteRoute::GeneralFull: return impl_->general_full(p1, p2);
    case FiniteRoute::EqualDistinct: return impl_->equal_distinct(p1, p2);
    case FiniteRoute::EqualQuadrature: return impl_->equal_quadrature(p1, p2);
    case FiniteRoute::EqualConfluent: {
        if ((p1.s > model_.n() || p2.s > model_.n()) && impl_->em_ready)
            return impl_->em(p1, p2);
        require_lower_half(model_, p1, p2, "equal-confluent");
        const auto r = impl_->confluent->rank_part(p1, p2);
        return {indicator_term(model_, p1, p2) + r.value, r.err_estimate, FiniteRoute::EqualConfluent};
    }
    case FiniteRoute::EynardMehta: return impl_->em(p1, p2);
    case FiniteRoute::Auto: break;
    }
    throw Error(ErrorCode::InvalidParams, "unresolved route");
}

double kernel_general(const ValidatedModel& model, GridPoint p1, GridPoint p2)
{
    return FiniteKernel(model, FiniteRoute::General).evaluate(p1, p2).value;
}

double kernel_equal_spacing(const ValidatedModel& model, GridPoint p1, GridPoint p2)
{
    const auto route = model.distinct_beta() ? FiniteRoute::EqualDistinct
                       : model.equal_beta()  ? FiniteRoute::EqualConfluent
                                             : FiniteRoute::EqualQuadrature;
    return FiniteKernel(model, route).evaluate(p1, p2).value;
}

double em_reference(const ValidatedModel& model, GridPoint p1, GridPoint p2)
{
    return FiniteKernel(model, FiniteRoute::EynardMehta).evaluate(p1, p2).value;
}

EMDecomposition em_decomposition(const ValidatedModel& m)
{
    const int n = m.n();
    const auto& p = m.params();
    const auto up = m.up_rates(0, 2 * n);
    const auto down = m.down_rates(0, 2 * n);
    EMDecomposition out;
    out.gramm.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            out.gramm(i, j) = laurent_coefficient(up, down, p.l[static_cast<size_t>(j)] - p.k[static_cast<size_t>(i)]);
    }
    const double rcond = out.gramm.partialPivLu().rcond();
    out.gramm_condition = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();

    FiniteKernel::Impl impl(m, 1e-12);
    impl.init_biorthogonal();
    out.gramm_tilde.resize(n, n);
    out.gramm_tilde_closed_form.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto& pi = impl.phi_poly[static_cast<size_t>(i)];
            const auto& qj = impl.psi_poly[static_cast<size_t>(j)];
            double acc = 0.0;
            for (size_t a = 0; a < pi.size(); ++a) {
                for (size_t b = 0; b < qj.size(); ++b) {
                    if (pi[a] != 0.0 && qj[b] != 0.0)
                        acc += pi[a] * qj[b] *
                               laurent_coefficient(up, down, static_cast<long>(b) - static_cast<long>(a));
                }
            }
            out.gramm_tilde(i, j) = acc;
        }
        out.gramm_tilde_closed_form(i) = 1.0 / impl.prefactor[static_cast<size_t>(i)];
    }
    return out;
}

}  // namespace nipaths
