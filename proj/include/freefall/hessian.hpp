#ifndef FREEFALL_HESSIAN_HPP
#define FREEFALL_HESSIAN_HPP

#include <string>
#include <vector>

#include "freefall/critical.hpp"
#include "freefall/fourier_loop.hpp"
#include "freefall/la.hpp"

namespace freefall {

// Spectrum of the second variation at a point of C_k, truncated to 2N+1
// Fourier dimensions.
struct HessianSpectrumReport {
    struct EigenPair {
        double value = 0.0;
        int multiplicity = 0;
        std::string mode_label;
    };

    int k = 0;
    std::vector<EigenPair> eigenpairs;  // ascending by value
    int morse_index = 0;                // negatives, with multiplicity
    int nullity = 0;                    // |value| below the zero tolerance
    double spectral_gap = 0.0;          // smallest nonzero |value|
    int truncation = 0;                 // N

    int total_multiplicity() const;     // must equal 2N+1
};

// Second variation of the action at the critical point cp, applied to the
// perturbation xi. Diagonal on every mode plane except mode k, where the
// radial direction (the one aligned with cp) is stretched by 12(2 pi k)^2 and
// the tangent direction is annihilated.
FourierLoop hessian_apply(const CriticalPoint& cp, const FourierLoop& xi);

// Matrix of hessian_apply on coefficient vectors ordered (a0, a_1..a_N,
// b_1..b_N). Symmetric. Requires N >= k.
Matrix hessian_matrix(const CriticalPoint& cp, int n_modes);

// Closed-form spectrum: mu_0 = -4 pi^2 k^2 (constant mode), mu_n =
// 4 pi^2 (n^2 - k^2) with multiplicity 2 for modes n != k, 0 on the circle
// tangent and 12 (2 pi k)^2 on the circle normal. Requires N >= k + 1 so the
// tangent direction is representable.
HessianSpectrumReport spectrum_closed_form(int k, int n_modes);

// Numeric route: dense symmetric diagonalization of hessian_matrix, clustered
// into eigenpairs. Eigenvalues with |value| <= zero_tol count as kernel.
HessianSpectrumReport spectrum_numeric(const CriticalPoint& cp, int n_modes,
                                       double zero_tol = 1e-8);

// True iff the normal eigenvalue 12 (2 pi k)^2 collides with no mu_n for
// n <= n_max, i.e. 13 k^2 is not a perfect square. Always true.
bool verify_distinctness(int k, int n_max);

// Smallest nonzero |eigenvalue| at C_k: 4 pi^2 (2k - 1).
double spectral_gap(int k);

// Coefficients of xi in the basis whose mode-k plane is rotated to align with
// cp (the basis in which the second variation is diagonal), and back.
FourierLoop to_shifted_basis(const CriticalPoint& cp, const FourierLoop& xi);
FourierLoop from_shifted_basis(const CriticalPoint& cp, const FourierLoop& xi);

} // namespace freefall

#endif
