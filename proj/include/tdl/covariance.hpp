#pragma once

#include "tdl/pdp.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace tdl {

/// Tap positions of the tapped-delay-line model: taps l = -L1..L2 sit at
/// delays l / (2B).
struct TapGrid
{
    double bandwidth = 1.0;
    int l1 = 0;
    int l2 = 0;

    /// Validates B > 0 and L1, L2 >= 0; throws DomainError.
    static TapGrid make(double bandwidth, int l1, int l2);

    int size() const { return l1 + l2 + 1; }
    int first() const { return -l1; }
    int last() const { return l2; }
    double sampling_period() const { return 1.0 / (2.0 * bandwidth); }
    double delay(int l) const { return l * sampling_period(); }
    /// Row/column of tap l in an L x L matrix.
    int slot(int l) const { return l + l1; }
};

/// Hermitian PSD covariance of the tap vector over a grid, with its
/// eigendecomposition (eigenvalues descending, clamped at zero).
struct TapCovariance
{
    TapGrid grid;
    Eigen::MatrixXcd matrix;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXcd eigenvectors;
    double total_energy = 0.0;
    /// Smallest eigenvalue before clamping.
    double min_raw_eigenvalue = 0.0;
    int clamp_count = 0;

    /// Symmetrizes `matrix` as (M + M^H)/2, then decomposes it. Eigenvalues
    /// in [-1e-10, 0) are set to zero; anything more negative throws
    /// ConditioningError.
    static TapCovariance from_matrix(const TapGrid& grid, const Eigen::MatrixXcd& matrix);

    int size() const { return grid.size(); }

    /// U * sqrt(Lambda), so that factor * factor^H == matrix.
    Eigen::MatrixXcd factor() const;
};

/// Quadrature controls for the tap covariance integrals.
struct CovarianceQuadrature
{
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
};

/// E{h_l h_p^*} for bandwidth B. Throws AccuracyError if the quadrature
/// misses its tolerance.
std::complex<double> tap_cross_covariance(const PdpSpec& spec, double bandwidth, int l, int p,
                                          const CovarianceQuadrature& quad = {});

/// E{|h_l|^2}; real and nonnegative.
double tap_energy(const PdpSpec& spec, double bandwidth, int l,
                  const CovarianceQuadrature& quad = {});

/// Uncorrelated-tap approximation P_h(l / 2B) / 2B.
double wideband_tap_energy(const PdpSpec& spec, double bandwidth, int l);

/// Tap energies for l = first..last, evaluated on `threads` workers
/// (0 = all cores). Element i belongs to tap first + i.
std::vector<double> tap_energies(const PdpSpec& spec, double bandwidth, int first, int last,
                                 unsigned threads = 0, const CovarianceQuadrature& quad = {});

TapCovariance build_covariance(const PdpSpec& spec, const TapGrid& grid, unsigned threads = 0,
                               const CovarianceQuadrature& quad = {});

struct WindowSearch
{
    double threshold = 0.9;
    /// Smallest allowed L1 and L2. The model uses L1, L2 > 0, so the
    /// default is 1; 0 admits one-sided windows.
    int min_side = 1;
};

struct Window
{
    int l1 = 0;
    int l2 = 0;
    /// Energy captured by taps -l1..l2.
    double energy = 0.0;

    int size() const { return l1 + l2 + 1; }
};

/// Largest |l| min_window may inspect: ceil(40 B tau_ds) + 80.
int window_search_cap(const PdpSpec& spec, double bandwidth);

/// Shortest window whose tap energies sum to at least the threshold. Among
/// windows of that length the one capturing the most energy wins; windows
/// within 1e-12 of each other count as tied and the smaller L1 is taken.
/// Throws RangeError past window_search_cap.
Window min_window(const PdpSpec& spec, double bandwidth, const WindowSearch& search = {});

} // namespace tdl
