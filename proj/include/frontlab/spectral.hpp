#pragma once

// Eigenvalue problems for -L + diag(q) in the mass-weighted inner product:
// Neumann spectra of bounded graphs, Poincaré constants, and the principal
// Dirichlet eigenvalue of the linearization around a limit profile.

#include <cstddef>
#include <string>
#include <vector>

#include "frontlab/grid.hpp"
#include "frontlab/nonlinearity.hpp"

namespace frontlab {

struct SpectrumResult {
    std::vector<double> eigenvalues;  // ascending
    std::vector<GridField> eigenfields;  // w-orthonormal, zero on Dirichlet DOFs
    std::vector<std::size_t> dirichlet;
    double h = 0.0;

    /// Indices grouped into multiplets: consecutive eigenvalues within `tol`
    /// (default 10 h²) belong to one group.
    std::vector<std::vector<std::size_t>> multiplets(double tol = -1.0) const;
    /// Size of the multiplet containing eigenvalue `index`.
    std::size_t multiplicity(std::size_t index, double tol = -1.0) const;
};

/// Lowest k eigenpairs of (K + W diag(q)) φ = λ W φ with the listed DOFs
/// eliminated. Throws ConvergenceFailure if the iteration stalls.
SpectrumResult operator_spectrum(GridPtr grid, const Eigen::VectorXd& q, const std::vector<std::size_t>& dirichlet,
                                 int k);

/// First k eigenvalues of -L with no boundary conditions (μ₀ = 0).
SpectrumResult neumann_spectrum(GridPtr grid, int k);

/// Smallest eigenvalue of -L vanishing at the given vertices. Throws
/// EmptyBoundary.
double poincare_constant(GridPtr grid, const std::vector<std::string>& boundary_vertices);

/// ∫ρ|∇w|² / ∫ρw² on the grid.
double rayleigh_quotient(const Grid& grid, const Eigen::VectorXd& w);

struct PrincipalEigen {
    double lambda = 0.0;
    GridField field;  // positive, w-normalized
    double R = 0.0;   // effective cut, a multiple of the outer spacing
    bool marginal = false;  // λ in (-1e-6, 1e-4)
};

/// λ^R of -Δφ - f'(v)φ on Ω^R: the center graph plus [0, R) of every outer
/// path, with φ = 0 at x = R.
PrincipalEigen dirichlet_principal_eig(const GridField& v, const Bistable& b, double R);

/// Sign changes of the discrete slope along a segment, ignoring increments
/// below `tol`.
int slope_sign_changes(const GridField& v, const std::string& segment_id, double tol = 1e-12);

}  // namespace frontlab
