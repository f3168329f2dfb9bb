#include "tdl/covariance.hpp"

#include "tdl/errors.hpp"
#include "tdl/parallel.hpp"
#include "tdl/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace tdl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Integral of exp(-j 2 pi d s) over the overlap of [-1/2, 1/2] and
// [-1/2, 1/2] - x. For d = 0 this is the triangle 1 - |x|.
std::complex<double> overlap_kernel(int d, double x)
{
    if (d == 0) return {1.0 - std::abs(x), 0.0};
    const double theta = kTwoPi * d * x;
    const double half_sin = std::sin(0.5 * theta);
    // exp(j theta) - 1 without cancellation for small theta.
    const std::complex<double> em1(-2.0 * half_sin * half_sin, std::sin(theta));
    const double sign = (d % 2 == 0) ? 1.0 : -1.0;
    const double side = x >= 0.0 ? 1.0 : -1.0;
    return sign * side * em1 / std::complex<double>(0.0, -kTwoPi * d);
}

// Delay range that still matters for panel sizing; tails beyond a few delay
// spreads are left to the adaptive refinement.
double sizing_extent(const PdpSpec& spec)
{
    const DelaySpan span = delay_span(spec);
    return std::min(std::max(std::abs(span.lo), std::abs(span.hi)), 4.0 * spec.tau_ds);
}

} // namespace

TapGrid TapGrid::make(double bandwidth, int l1, int l2)
{
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw DomainError("tap grid: bandwidth must be positive and finite");
    }
    if (l1 < 0 || l2 < 0) throw DomainError("tap grid: L1 and L2 must be nonnegative");
    return {bandwidth, l1, l2};
}

TapCovariance TapCovariance::from_matrix(const TapGrid& grid, const Eigen::MatrixXcd& matrix)
{
    const int n = grid.size();
    if (matrix.rows() != n || matrix.cols() != n) {
        throw ContractViolation("tap covariance: matrix size does not match the tap grid");
    }
    TapCovariance cov;
    cov.grid = grid;
    cov.matrix = 0.5 * (matrix + matrix.adjoint());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(cov.matrix);
    if (solver.info() != Eigen::Success) {
        throw ConditioningError("tap covariance: eigendecomposition failed", 0.0);
    }
    // Eigen sorts ascending; store descending.
    cov.eigenvalues = solver.eigenvalues().reverse();
    cov.eigenvectors = solver.eigenvectors().rowwise().reverse();
    cov.min_raw_eigenvalue = cov.eigenvalues(n - 1);
    if (cov.min_raw_eigenvalue < -1e-10) {
        std::ostringstream msg;
        msg << "tap covariance: not positive semidefinite (min eigenvalue "
            << cov.min_raw_eigenvalue << ")";
        throw ConditioningError(msg.str(), cov.min_raw_eigenvalue);
    }
    for (int i = 0; i < n; ++i) {
        if (cov.eigenvalues(i) < 0.0) {
            cov.eigenvalues(i) = 0.0;
            ++cov.clamp_count;
        }
    }
    cov.total_energy = cov.matrix.trace().real();
    return cov;
}

Eigen::MatrixXcd TapCovariance::factor() const
{
    return eigenvectors * eigenvalues.cwiseSqrt().asDiagonal();
}

std::complex<double> tap_cross_covariance(const PdpSpec& spec, double bandwidth, int l, int p,
                                          const CovarianceQuadrature& quad_opts)
{
    if (!(bandwidth > 0.0)) throw DomainError("tap_cross_covariance: bandwidth must be positive");

    // With f1 = f2 + u and x = u / 2B, the double integral over the square
    // collapses to a single integral over x in [-1, 1]; the integral along
    // f2 is done in closed form by overlap_kernel.
    const int d = l - p;
    const double two_b = 2.0 * bandwidth;
    auto integrand = [&](double x) {
        const std::complex<double> carrier = std::polar(1.0, -kTwoPi * l * x);
        return channel_autocorr(spec, two_b * x) * carrier * overlap_kernel(d, x);
    };

    // Oscillation frequency in x is at most max(|l|, |p|) plus the profile's
    // delay extent measured in taps. Panels hold one period.
    const double freq = std::max(2.0, std::max(std::abs(l), std::abs(p)) +
                                          two_b * sizing_extent(spec));
    quad::Options opts;
    opts.rel_tol = quad_opts.rel_tol;
    opts.abs_tol = quad_opts.abs_tol;
    opts.max_panel_width = 1.0 / freq;
    const std::array<double, 3> edges{-1.0, 0.0, 1.0};
    const auto result = quad::integrate(integrand, edges, opts);
    if (!result.converged) {
        std::ostringstream msg;
        msg << "tap_cross_covariance(" << l << ", " << p << "): quadrature reached only "
            << result.error << " (estimate " << result.value << ")";
        throw AccuracyError(msg.str(), result.value, result.error);
    }
    return result.value;
}

double tap_energy(const PdpSpec& spec, double bandwidth, int l, const CovarianceQuadrature& quad)
{
    const std::complex<double> value = tap_cross_covariance(spec, bandwidth, l, l, quad);
    if (std::abs(value.imag()) > 1e-10) {
        throw ContractViolation("tap_energy: imaginary residue " + std::to_string(value.imag()) +
                                " for tap " + std::to_string(l));
    }
    return std::max(value.real(), 0.0);
}

double wideband_tap_energy(const PdpSpec& spec, double bandwidth, int l)
{
    const double two_b = 2.0 * bandwidth;
    return pdp_value(spec, l / two_b) / two_b;
}

std::vector<double> tap_energies(const PdpSpec& spec, double bandwidth, int first, int last,
                                 unsigned threads, const CovarianceQuadrature& quad)
{
    if (last < first) return {};
    std::vector<double> out(static_cast<std::size_t>(last - first + 1));
    parallel_for(
        out.size(),
        [&](std::size_t i) {
            out[i] = tap_energy(spec, bandwidth, first + static_cast<int>(i), quad);
        },
        threads);
    return out;
}

TapCovariance build_covariance(const PdpSpec& spec, const TapGrid& grid, unsigned threads,
                               const CovarianceQuadrature& quad)
{
    const int n = grid.size();
    Eigen::MatrixXcd raw(n, n);
    // Upper triangle only; the lower one is its conjugate transpose.
    const std::size_t pairs = static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2;
    parallel_for(
        pairs,
        [&](std::size_t k) {
            int row = 0;
            std::size_t rest = k;
            while (rest >= static_cast<std::size_t>(n - row)) {
                rest -= static_cast<std::size_t>(n - row);
                ++row;
            }
            const int col = row + static_cast<int>(rest);
            const int l = grid.first() + row;
            const int p = grid.first() + col;
            try {
                raw(row, col) = tap_cross_covariance(spec, grid.bandwidth, l, p, quad);
                raw(col, row) = std::conj(raw(row, col));
            } catch (const AccuracyError& e) {
                throw AccuracyError(std::string("build_covariance at (l, p) = (") +
                                        std::to_string(l) + ", " + std::to_string(p) +
                                        "): " + e.what(),
                                    e.estimate(), e.error_bound());
            }
        },
        threads);
    return TapCovariance::from_matrix(grid, raw);
}

int window_search_cap(const PdpSpec& spec, double bandwidth)
{
    return static_cast<int>(std::ceil(40.0 * bandwidth * spec.tau_ds)) + 80;
}

Window min_window(const PdpSpec& spec, double bandwidth, const WindowSearch& search)
{
    if (!(search.threshold > 0.0 && search.threshold < 1.0)) {
        throw DomainError("min_window: threshold must lie in (0, 1)");
    }
    if (search.min_side < 0) throw DomainError("min_window: min_side must be nonnegative");

    const int cap = window_search_cap(spec, bandwidth);
    // energies[cap + l] holds tap l once computed; NaN marks a gap.
    std::vector<double> energies(static_cast<std::size_t>(2 * cap + 1),
                                 std::numeric_limits<double>::quiet_NaN());
    auto energy = [&](int l) -> double {
        double& slot = energies[static_cast<std::size_t>(cap + l)];
        if (std::isnan(slot)) slot = tap_energy(spec, bandwidth, l);
        return slot;
    };

    for (int length = 2 * search.min_side + 1;; ++length) {
        const int reach = length - 1 - search.min_side;
        if (reach > cap) {
            std::ostringstream msg;
            msg << "min_window: no window within |l| <= " << cap << " captures "
                << search.threshold << " of the energy for " << describe(spec);
            throw RangeError(msg.str());
        }
        bool found = false;
        Window best;
        for (int l1 = search.min_side; l1 <= reach; ++l1) {
            const int l2 = length - 1 - l1;
            double sum = 0.0;
            for (int l = -l1; l <= l2; ++l) sum += energy(l);
            if (sum < search.threshold) continue;
            if (!found || sum > best.energy + 1e-12) {
                best = {l1, l2, sum};
                found = true;
            }
        }
        if (found) return best;
    }
}

} // namespace tdl
