#include "freefall/hessian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "freefall/errors.hpp"

namespace freefall {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kFourPiSq = 4.0 * kPi * kPi;

double mu_const(int k) { return -kFourPiSq * k * k; }
double mu_mode(int n, int k) { return kFourPiSq * (double(n) * n - double(k) * k); }
double mu_normal(int k) { return 12.0 * kFourPiSq * k * k; }
} // namespace

int HessianSpectrumReport::total_multiplicity() const {
    int s = 0;
    for (const auto& p : eigenpairs) s += p.multiplicity;
    return s;
}

FourierLoop to_shifted_basis(const CriticalPoint& cp, const FourierLoop& xi) {
    if (cp.k < 1 || cp.k > xi.n_modes)
        throw std::invalid_argument("to_shifted_basis: mode k not representable");
    FourierLoop out = xi;
    const double c = std::cos(cp.phase), s = std::sin(cp.phase);
    const double ak = xi.cos_coeff(cp.k), bk = xi.sin_coeff(cp.k);
    out.cos_coeff(cp.k) = c * ak - s * bk;   // radial component (along cp)
    out.sin_coeff(cp.k) = s * ak + c * bk;   // tangent component
    return out;
}

FourierLoop from_shifted_basis(const CriticalPoint& cp, const FourierLoop& xi) {
    if (cp.k < 1 || cp.k > xi.n_modes)
        throw std::invalid_argument("from_shifted_basis: mode k not representable");
    FourierLoop out = xi;
    const double c = std::cos(cp.phase), s = std::sin(cp.phase);
    const double rk = xi.cos_coeff(cp.k), tk = xi.sin_coeff(cp.k);
    out.cos_coeff(cp.k) = c * rk + s * tk;
    out.sin_coeff(cp.k) = -s * rk + c * tk;
    return out;
}

FourierLoop hessian_apply(const CriticalPoint& cp, const FourierLoop& xi) {
    if (cp.k < 1) throw std::invalid_argument("hessian_apply: k must be >= 1");
    if (cp.k > xi.n_modes)
        throw std::invalid_argument("hessian_apply: truncation below circle mode");

    const int k = cp.k;
    FourierLoop out(xi.n_modes);
    out.a0 = mu_const(k) * xi.a0;
    for (int n = 1; n <= xi.n_modes; ++n) {
        if (n == k) continue;
        const double mu = mu_mode(n, k);
        out.cos_coeff(n) = mu * xi.cos_coeff(n);
        out.sin_coeff(n) = mu * xi.sin_coeff(n);
    }
    // Mode-k plane: diagonal only after rotating into the frame aligned
    // with cp.
    const FourierLoop sh = to_shifted_basis(cp, xi);
    FourierLoop shk(xi.n_modes);
    shk.cos_coeff(k) = mu_normal(k) * sh.cos_coeff(k);
    shk.sin_coeff(k) = 0.0;
    const FourierLoop back = from_shifted_basis(cp, shk);
    out.cos_coeff(k) = back.cos_coeff(k);
    out.sin_coeff(k) = back.sin_coeff(k);
    return out;
}

Matrix hessian_matrix(const CriticalPoint& cp, int n_modes) {
    if (n_modes < cp.k)
        throw std::invalid_argument("hessian_matrix: truncation below circle mode");
    const int k = cp.k;
    const int dim = 2 * n_modes + 1;
    Matrix h(dim, dim);
    h(0, 0) = mu_const(k);
    for (int n = 1; n <= n_modes; ++n) {
        if (n == k) continue;
        h(n, n) = mu_mode(n, k);
        h(n_modes + n, n_modes + n) = mu_mode(n, k);
    }
    // Mode-k block: mu_normal times the projector onto the cp direction
    // (cos phase, -sin phase); sharing the off-diagonal product keeps the
    // block exactly symmetric in floating point.
    const double c = std::cos(cp.phase), s = std::sin(cp.phase);
    const double mu = mu_normal(k);
    const double off = -mu * c * s;
    h(k, k) = mu * c * c;
    h(n_modes + k, n_modes + k) = mu * s * s;
    h(k, n_modes + k) = off;
    h(n_modes + k, k) = off;
    return h;
}

HessianSpectrumReport spectrum_closed_form(int k, int n_modes) {
    if (k < 1) throw std::invalid_argument("spectrum_closed_form: k must be >= 1");
    if (n_modes <= k)
        throw std::invalid_argument(
            "spectrum_closed_form: need N >= k+1 (circle tangent absent otherwise)");

    HessianSpectrumReport rep;
    rep.k = k;
    rep.truncation = n_modes;
    rep.eigenpairs.push_back({mu_const(k), 1, "const"});
    for (int n = 1; n <= n_modes; ++n) {
        if (n == k) continue;
        rep.eigenpairs.push_back({mu_mode(n, k), 2, "mode " + std::to_string(n)});
    }
    rep.eigenpairs.push_back({0.0, 1, "tangent"});
    rep.eigenpairs.push_back({mu_normal(k), 1, "normal"});
    std::sort(rep.eigenpairs.begin(), rep.eigenpairs.end(),
              [](const auto& x, const auto& y) { return x.value < y.value; });

    rep.morse_index = 2 * k - 1;
    rep.nullity = 1;
    rep.spectral_gap = spectral_gap(k);
    return rep;
}

HessianSpectrumReport spectrum_numeric(const CriticalPoint& cp, int n_modes,
                                       double zero_tol) {
    if (n_modes <= cp.k)
        throw std::invalid_argument(
            "spectrum_numeric: need N >= k+1 (circle tangent absent otherwise)");
    const Matrix h = hessian_matrix(cp, n_modes);
    const SymmetricEigen eig = eig_symmetric(h);

    HessianSpectrumReport rep;
    rep.k = cp.k;
    rep.truncation = n_modes;

    // Cluster ascending eigenvalues; distinct true eigenvalues are separated
    // by at least 4 pi^2, so the absolute tolerance is generous.
    const double cluster_tol = 1e-3;
    size_t i = 0;
    while (i < eig.values.size()) {
        size_t j = i + 1;
        while (j < eig.values.size() && eig.values[j] - eig.values[i] < cluster_tol) ++j;
        const double mean =
            std::accumulate(eig.values.begin() + i, eig.values.begin() + j, 0.0) /
            double(j - i);
        rep.eigenpairs.push_back({mean, int(j - i), ""});
        i = j;
    }

    rep.morse_index = 0;
    rep.nullity = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (auto& p : rep.eigenpairs) {
        if (std::fabs(p.value) <= zero_tol) {
            p.mode_label = "kernel";
            rep.nullity += p.multiplicity;
        } else {
            if (p.value < 0.0) rep.morse_index += p.multiplicity;
            gap = std::min(gap, std::fabs(p.value));
        }
    }
    rep.spectral_gap = gap;
    return rep;
}

bool verify_distinctness(int k, int n_max) {
    if (k < 1 || n_max < k)
        throw std::invalid_argument("verify_distinctness: need k >= 1, n_max >= k");
    const long long target = 13LL * k * k;  // mu_normal == mu_n iff n^2 = 13 k^2
    const long long r = static_cast<long long>(std::llround(std::sqrt(double(target))));
    for (long long s = std::max(0LL, r - 2); s <= r + 2; ++s)
        if (s * s == target && s <= n_max) return false;
    for (long long n = 0; n <= n_max; ++n)
        if (n * n == target) return false;
    return true;
}

double spectral_gap(int k) {
    if (k < 1) throw std::invalid_argument("spectral_gap: k must be >= 1");
    // Candidates: |mu_0| = 4 pi^2 k^2, |mu_{k-1}| = 4 pi^2 (2k-1),
    // mu_{k+1} = 4 pi^2 (2k+1), the normal value. The smallest is
    // 4 pi^2 (2k-1) (equal to |mu_0| when k = 1).
    return kFourPiSq * (2.0 * k - 1.0);
}

} // namespace freefall
