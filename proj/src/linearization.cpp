#include "freefall/linearization.hpp"

#include <cmath>
#include <stdexcept>

#include "freefall/errors.hpp"

namespace freefall {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kResidualTol = 1e-6;

void check_grids(const FlowTrajectory& u, const CylinderField& f) {
    if (u.size() != f.size() || u.s_grid.size() != f.s_grid.size())
        throw GridMismatch("cylinder field and trajectory disagree on sampling");
    f.check_support();
}

void require_discrete_flow(const FlowTrajectory& u) {
    if (u.size() < 3)
        throw std::invalid_argument("trajectory too short for s-derivatives");
    if (!u.converged && heat_residual(u) > kResidualTol)
        throw std::invalid_argument(
            "trajectory is not a discrete heat flow line (scheme residual too large)");
}

// Second t-derivative: mode n scales by -(2 pi n)^2, constant mode dies.
FourierLoop second_t_derivative(const FourierLoop& q) {
    FourierLoop out(q.n_modes);
    for (int i = 0; i < q.n_modes; ++i) {
        const double w = kTwoPi * (i + 1);
        out.a[i] = -w * w * q.a[i];
        out.b[i] = -w * w * q.b[i];
    }
    return out;
}

void add_scaled(FourierLoop& y, double c, const FourierLoop& x) {
    y.a0 += c * x.a0;
    for (int i = 0; i < y.n_modes; ++i) {
        y.a[i] += c * x.a[i];
        y.b[i] += c * x.b[i];
    }
}

// Second-order d/ds of a sampled family, central inside, one-sided at ends.
FourierLoop s_derivative(const std::vector<FourierLoop>& v,
                         const std::vector<double>& s, size_t i) {
    const size_t n = v.size();
    const double h = s[1] - s[0];
    FourierLoop out(v[i].n_modes);
    if (i == 0) {
        add_scaled(out, -1.5 / h, v[0]);
        add_scaled(out, 2.0 / h, v[1]);
        add_scaled(out, -0.5 / h, v[2]);
    } else if (i == n - 1) {
        add_scaled(out, 1.5 / h, v[n - 1]);
        add_scaled(out, -2.0 / h, v[n - 2]);
        add_scaled(out, 0.5 / h, v[n - 3]);
    } else {
        add_scaled(out, 0.5 / h, v[i + 1]);
        add_scaled(out, -0.5 / h, v[i - 1]);
    }
    return out;
}

// Mode-diagonal part d_s xi + ((2 pi n)^2 + alpha) xi at sample i.
FourierLoop diagonal_part(const std::vector<FourierLoop>& xi,
                          const std::vector<double>& s, size_t i, double al) {
    FourierLoop out = s_derivative(xi, s, i);
    const FourierLoop& x = xi[i];
    out.a0 += al * x.a0;
    for (int j = 0; j < x.n_modes; ++j) {
        const double w = kTwoPi * (j + 1);
        out.a[j] += (w * w + al) * x.a[j];
        out.b[j] += (w * w + al) * x.b[j];
    }
    return out;
}

} // namespace

void CylinderField::check_support() const {
    if (!support) return;
    if (values.size() != s_grid.size())
        throw GridMismatch("cylinder field: values and s_grid lengths differ");
    for (size_t i = 0; i < values.size(); ++i) {
        const double s = s_grid[i];
        if (s > support->first && s < support->second) continue;
        if (sup_coeff(values[i]) != 0.0)
            throw GridMismatch("cylinder field: nonzero outside declared support");
    }
}

namespace {
// The s-derivative stencil reaches one sample past the input's support, so
// output fields carry a support widened by one grid cell.
std::optional<std::pair<double, double>> widened(
    const std::optional<std::pair<double, double>>& support,
    const std::vector<double>& s_grid) {
    if (!support || s_grid.size() < 2) return std::nullopt;
    const double h = s_grid[1] - s_grid[0];
    return std::make_pair(support->first - 1.5 * h, support->second + 1.5 * h);
}
} // namespace

CylinderField apply_D(const FlowTrajectory& u, const CylinderField& xi) {
    check_grids(u, xi);
    require_discrete_flow(u);

    CylinderField out;
    out.s_grid = xi.s_grid;
    out.support = widened(xi.support, xi.s_grid);
    out.values.reserve(xi.size());
    for (size_t i = 0; i < xi.size(); ++i) {
        const FourierLoop& us = u.states[i];
        const double p = norm_sq(us);
        if (p < kZeroNormTol)
            throw DomainError("apply_D: trajectory touches the zero loop");
        const double al = alpha(us);

        FourierLoop v = diagonal_part(xi.values, xi.s_grid, i, al);

        const FourierLoop utt = second_t_derivative(us);
        const double phi = -(2.0 / p) * (inner(utt, xi.values[i]) +
                                         (al - 1.0 / (p * p * p)) * inner(us, xi.values[i]));
        add_scaled(v, phi, us);
        out.values.push_back(std::move(v));
    }
    return out;
}

CylinderField apply_D_adjoint(const FlowTrajectory& u, const CylinderField& eta) {
    check_grids(u, eta);
    require_discrete_flow(u);

    CylinderField out;
    out.s_grid = eta.s_grid;
    out.support = widened(eta.support, eta.s_grid);
    out.values.reserve(eta.size());
    for (size_t i = 0; i < eta.size(); ++i) {
        const FourierLoop& us = u.states[i];
        const double p = norm_sq(us);
        if (p < kZeroNormTol)
            throw DomainError("apply_D_adjoint: trajectory touches the zero loop");
        const double al = alpha(us);
        const FourierLoop& es = eta.values[i];

        // -d_s eta + ((2 pi n)^2 + alpha) eta
        FourierLoop v = diagonal_part(eta.values, eta.s_grid, i, al);
        add_scaled(v, -2.0, s_derivative(eta.values, eta.s_grid, i));

        const FourierLoop dsu = s_derivative(u.states, u.s_grid, i);
        add_scaled(v, -2.0 * inner(us, dsu) / p, es);

        const FourierLoop utt = second_t_derivative(us);
        add_scaled(v, -2.0 * inner(us, es) / p, utt);

        const double dtn = deriv_norm_sq(us);
        const double w = dtn / (p * p) - 1.5 / (p * p * p * p);
        add_scaled(v, -2.0 * w * inner(us, es), us);
        out.values.push_back(std::move(v));
    }
    return out;
}

double inner_u(const FlowTrajectory& u, const CylinderField& xi,
               const CylinderField& eta) {
    check_grids(u, xi);
    check_grids(u, eta);
    const double h = u.s_grid.size() > 1 ? u.s_grid[1] - u.s_grid[0] : 1.0;
    double sum = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        const double w = (i == 0 || i + 1 == u.size()) ? 0.5 * h : h;
        sum += w * 4.0 * norm_sq(u.states[i]) * inner(xi.values[i], eta.values[i]);
    }
    return sum;
}

double adjoint_check(const FlowTrajectory& u, const CylinderField& xi,
                     const CylinderField& eta) {
    const double lhs = inner_u(u, apply_D(u, xi), eta);
    const double rhs = inner_u(u, xi, apply_D_adjoint(u, eta));
    return std::fabs(lhs - rhs) / (std::fabs(lhs) + std::fabs(rhs) + 1e-30);
}

CylinderField heat_residual_field(const FlowTrajectory& u) {
    CylinderField out;
    out.s_grid = u.s_grid;
    out.values.reserve(u.size());
    for (size_t i = 0; i < u.size(); ++i) {
        const FourierLoop& us = u.states[i];
        require_punctured(us);
        const double al = alpha(us);
        FourierLoop v = s_derivative(u.states, u.s_grid, i);
        v.a0 += al * us.a0;
        for (int j = 0; j < us.n_modes; ++j) {
            const double w = kTwoPi * (j + 1);
            v.a[j] += (w * w + al) * us.a[j];
            v.b[j] += (w * w + al) * us.b[j];
        }
        out.values.push_back(std::move(v));
    }
    return out;
}

double fd_check(const FlowTrajectory& u, const CylinderField& xi, double tau) {
    check_grids(u, xi);
    require_discrete_flow(u);
    if (tau <= 0) throw std::invalid_argument("fd_check: tau must be positive");

    auto shifted = [&](double t) {
        FlowTrajectory v = u;
        for (size_t i = 0; i < v.size(); ++i)
            add_scaled(v.states[i], t, xi.values[i]);
        return v;
    };
    const CylinderField rp = heat_residual_field(shifted(tau));
    const CylinderField rm = heat_residual_field(shifted(-tau));
    const CylinderField dxi = apply_D(u, xi);

    CylinderField diff;
    diff.s_grid = u.s_grid;
    diff.values.reserve(u.size());
    for (size_t i = 0; i < u.size(); ++i) {
        FourierLoop v = rp.values[i];
        add_scaled(v, -1.0, rm.values[i]);
        for (int j = 0; j < v.n_modes; ++j) {
            v.a[j] = v.a[j] / (2.0 * tau) - dxi.values[i].a[j];
            v.b[j] = v.b[j] / (2.0 * tau) - dxi.values[i].b[j];
        }
        v.a0 = v.a0 / (2.0 * tau) - dxi.values[i].a0;
        diff.values.push_back(std::move(v));
    }
    const double num = std::sqrt(inner_u(u, diff, diff));
    const double den = std::sqrt(inner_u(u, dxi, dxi));
    return num / (den + 1e-30);
}

int cascade_index(GeneratorKind kind, int k) {
    if (k < 1) throw std::invalid_argument("cascade_index: k must be >= 1");
    return kind == GeneratorKind::Max ? 2 * k : 2 * k - 1;
}

int cascade_index(const CascadeGenerator& g) { return cascade_index(g.kind, g.k); }

int fredholm_index(const CascadeGenerator& from, const CascadeGenerator& to) {
    return cascade_index(from) - cascade_index(to);
}

} // namespace freefall
