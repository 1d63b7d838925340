#ifndef FREEFALL_LINEARIZATION_HPP
#define FREEFALL_LINEARIZATION_HPP

#include <optional>
#include <utility>
#include <vector>

#include "freefall/fourier_loop.hpp"
#include "freefall/generators.hpp"
#include "freefall/heatflow.hpp"

namespace freefall {

// A perturbation field along a trajectory: one coefficient loop per s-sample.
struct CylinderField {
    std::vector<double> s_grid;             // shared with the base trajectory
    std::vector<FourierLoop> values;
    std::optional<std::pair<double, double>> support;  // compact s-support

    size_t size() const { return values.size(); }

    // Invariant check: declared support must really bound the field
    // (coefficients outside it exactly zero). Throws GridMismatch.
    void check_support() const;
};

// Linearization of the discrete heat-flow residual along u, applied to xi:
//
//   (D_u xi)_s = d_s xi + ((2 pi n)^2 + alpha_s) xi   (mode-diagonal part)
//                + Phi(u_s, xi_s) u_s                 (rank-one non-local part)
//
// with Phi(u, xi) = -(2/||u||^2) ( <u'', xi> + (alpha - 1/||u||^6) <u, xi> ),
// u'' the second t-derivative. d_s is the second-order central difference on
// the trajectory grid (one-sided at the ends). This is the exact derivative
// of the discrete residual map F(u) = d_s u - u'' + alpha_s u.
//
// Requires the trajectory to be a discrete flow line of its own scheme
// (heat_residual below 1e-6) and the field to share its grid.
CylinderField apply_D(const FlowTrajectory& u, const CylinderField& xi);

// Adjoint of apply_D in the weighted pairing <.,.>_u (see inner_u):
//
//   (D_u* eta)_s = -d_s eta + ((2 pi n)^2 + alpha_s) eta
//                  - 2 (<u, d_s u> / ||u||^2) eta
//                  - 2 (<u, eta> / ||u||^2) u''
//                  - 2 ( ||u'||^2/||u||^4 - (3/2)/||u||^8 ) <u, eta> u
CylinderField apply_D_adjoint(const FlowTrajectory& u, const CylinderField& eta);

// Trapezoid-weighted pairing sum_s w_s 4 ||u_s||^2 <xi_s, eta_s>.
double inner_u(const FlowTrajectory& u, const CylinderField& xi,
               const CylinderField& eta);

// Relative defect of <D_u xi, eta>_u = <xi, D_u* eta>_u. Second order in the
// grid spacing for compactly supported fields.
double adjoint_check(const FlowTrajectory& u, const CylinderField& xi,
                     const CylinderField& eta);

// Relative deviation, in the weighted norm, between the central finite
// difference (F(u + tau xi) - F(u - tau xi)) / (2 tau) of the discrete
// heat-flow residual and apply_D(u, xi). Second order in tau.
double fd_check(const FlowTrajectory& u, const CylinderField& xi, double tau);

// Discrete heat-flow residual F(u) sample-by-sample (exposed for tests).
CylinderField heat_residual_field(const FlowTrajectory& u);

// Degree of a generator in the cascade complex: 2k for a maximum on C_k,
// 2k - 1 for a minimum.
int cascade_index(GeneratorKind kind, int k);
int cascade_index(const CascadeGenerator& g);

// Fredholm index of the linearization along a connection from one generator
// to another: the difference of their cascade indices. Equals 1 for the
// consecutive connections m_{k+1} -> M_k.
int fredholm_index(const CascadeGenerator& from, const CascadeGenerator& to);

} // namespace freefall

#endif
