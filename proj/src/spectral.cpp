#include "frontlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "frontlab/errors.hpp"

namespace frontlab {

namespace {

constexpr int kDenseLimit = 600;
constexpr int kMaxIterations = 5000;

struct Reduced {
    std::vector<Eigen::Index> free;  // reduced index -> global DOF
    SparseMatrix A;                  // W^{-1/2}(K + W q)W^{-1/2} on free DOFs
    Eigen::VectorXd inv_sqrt_w;      // on free DOFs
};

Reduced reduce(const Grid& grid, const Eigen::VectorXd& q, const std::vector<std::size_t>& dirichlet) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), 0);
    for (auto d : dirichlet) slot.at(d) = -1;
    Reduced r;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (slot[static_cast<std::size_t>(k)] == 0) {
            slot[static_cast<std::size_t>(k)] = static_cast<Eigen::Index>(r.free.size());
            r.free.push_back(k);
        }
    }
    const auto nf = static_cast<Eigen::Index>(r.free.size());
    r.inv_sqrt_w.resize(nf);
    for (Eigen::Index i = 0; i < nf; ++i) r.inv_sqrt_w[i] = 1.0 / std::sqrt(grid.mass()[r.free[static_cast<std::size_t>(i)]]);
    std::vector<Eigen::Triplet<double>> trip;
    const SparseMatrix& K = grid.stiffness();
    for (int col = 0; col < K.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
            const auto i = slot[static_cast<std::size_t>(it.row())], j = slot[static_cast<std::size_t>(it.col())];
            if (i < 0 || j < 0) continue;
            trip.emplace_back(i, j, it.value() * r.inv_sqrt_w[i] * r.inv_sqrt_w[j]);
        }
    }
    for (Eigen::Index i = 0; i < nf; ++i) trip.emplace_back(i, i, q[r.free[static_cast<std::size_t>(i)]]);
    r.A.resize(nf, nf);
    r.A.setFromTriplets(trip.begin(), trip.end());
    return r;
}

// Lowest k eigenpairs of a symmetric sparse matrix whose spectrum lies above
// `lower`, by shift-invert block subspace iteration with Rayleigh–Ritz.
void lowest_eigenpairs(const SparseMatrix& A, int k, double lower, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
    const Eigen::Index n = A.rows();
    if (n <= kDenseLimit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(A)};
        if (es.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "dense eigensolver failed");
        values = es.eigenvalues().head(k);
        vectors = es.eigenvectors().leftCols(k);
        return;
    }
    const double sigma = lower - 1.0;
    SparseMatrix shifted = A;
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
    Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "shifted factorization failed");

    const Eigen::Index p = std::min<Eigen::Index>(n, 2 * k + 8);
    Eigen::MatrixXd X(n, p);
    // Deterministic pseudo-random start block.
    std::uint64_t state = 0x9E3779B97F4A7C15ull;
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            X(i, j) = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
        }
    }
    Eigen::VectorXd prev = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::infinity());
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        for (Eigen::Index j = 0; j < p; ++j) X.col(j) = solver.solve(X.col(j)).eval();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
        X = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
        const Eigen::MatrixXd H = X.transpose() * (A * X);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        X = X * es.eigenvectors();
        const Eigen::VectorXd now = es.eigenvalues().head(k);
        const double change = (now - prev).cwiseAbs().maxCoeff();
        prev = now;
        if (change <= 1e-10 * std::max(1.0, now.cwiseAbs().maxCoeff())) {
            // Confirm with residuals so a stalled block is not mistaken for convergence.
            double worst = 0.0;
            for (int j = 0; j < k; ++j) worst = std::max(worst, (A * X.col(j) - now[j] * X.col(j)).norm());
            if (worst <= 1e-7 * std::max(1.0, now.cwiseAbs().maxCoeff())) {
                values = now;
                vectors = X.leftCols(k);
                return;
            }
        }
    }
    throw Error(ErrorCode::ConvergenceFailure, "subspace iteration did not converge");
}

}  // namespace

std::vector<std::vector<std::size_t>> SpectrumResult::multiplets(double tol) const {
    if (tol < 0.0) tol = 10.0 * h * h;
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        if (!out.empty() && eigenvalues[k] - eigenvalues[out.back().back()] <= tol) {
            out.back().push_back(k);
        } else {
            out.push_back({k});
        }
    }
    return out;
}

std::size_t SpectrumResult::multiplicity(std::size_t index, double tol) const {
    for (const auto& group : multiplets(tol)) {
        if (std::find(group.begin(), group.end(), index) != group.end()) return group.size();
    }
    throw Error(ErrorCode::OutOfRange, "no eigenvalue " + std::to_string(index));
}

SpectrumResult operator_spectrum(GridPtr grid, const Eigen::VectorXd& q, const std::vector<std::size_t>& dirichlet,
                                 int k) {
    if (q.size() != static_cast<Eigen::Index>(grid->size())) throw Error(ErrorCode::OutOfRange, "potential size mismatch");
    const Reduced r = reduce(*grid, q, dirichlet);
    const auto nf = static_cast<int>(r.free.size());
    if (k < 1 || k > nf) throw Error(ErrorCode::OutOfRange, "requested eigenvalue count outside the problem size");

    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    lowest_eigenpairs(r.A, k, q.minCoeff(), values, vectors);

    SpectrumResult out;
    out.dirichlet = dirichlet;
    out.h = grid->target_spacing();
    for (int j = 0; j < k; ++j) {
        out.eigenvalues.push_back(values[j]);
        GridField field = GridField::constant(grid, 0.0);
        for (int i = 0; i < nf; ++i) {
            field.values[r.free[static_cast<std::size_t>(i)]] = vectors(i, j) * r.inv_sqrt_w[i];
        }
        out.eigenfields.push_back(std::move(field));
    }
    return out;
}

SpectrumResult neumann_spectrum(GridPtr grid, int k) {
    const Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid->size()));
    auto out = operator_spectrum(grid, q, {}, k);
    if (out.eigenfields[0].values.sum() < 0.0) out.eigenfields[0].values = -out.eigenfields[0].values;
    return out;
}

double poincare_constant(GridPtr grid, const std::vector<std::string>& boundary_vertices) {
    if (boundary_vertices.empty()) throw Error(ErrorCode::EmptyBoundary, "Poincare constant needs a boundary");
    std::vector<std::size_t> dofs;
    for (const auto& v : boundary_vertices) dofs.push_back(grid->vertex_dof(v));
    const Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid->size()));
    return operator_spectrum(grid, q, dofs, 1).eigenvalues[0];
}

double rayleigh_quotient(const Grid& grid, const Eigen::VectorXd& w) {
    return w.dot(grid.stiffness() * w) / grid.weighted_dot(w, w);
}

PrincipalEigen dirichlet_principal_eig(const GridField& v, const Bistable& b, double R) {
    const Grid& grid = *v.grid;
    if (!(R > 0.0)) throw Error(ErrorCode::OutOfRange, "R must be positive");
    std::vector<std::size_t> cut;
    double effective = R;
    for (const auto& s : grid.segments()) {
        if (!s.is_outer()) continue;
        const int node = static_cast<int>(std::llround(R / s.h));
        if (node < 1 || node > s.cells) {
            std::ostringstream msg;
            msg << "R=" << R << " outside outer path " << s.outer_index << " of length " << s.length;
            throw Error(ErrorCode::OutOfRange, msg.str());
        }
        effective = s.position(node);
        for (int j = node; j <= s.cells; ++j) cut.push_back(s.dof(j));
    }
    Eigen::VectorXd q(v.values.size());
    for (Eigen::Index k = 0; k < q.size(); ++k) q[k] = -b.df(v.values[k]);
    auto spec = operator_spectrum(v.grid, q, cut, 1);
    PrincipalEigen out;
    out.lambda = spec.eigenvalues[0];
    out.field = std::move(spec.eigenfields[0]);
    if (out.field.values.sum() < 0.0) out.field.values = -out.field.values;
    out.R = effective;
    out.marginal = out.lambda > -1e-6 && out.lambda < 1e-4;
    return out;
}

int slope_sign_changes(const GridField& v, const std::string& segment_id, double tol) {
    const Segment& s = v.grid->segment(segment_id);
    int changes = 0, last = 0;
    for (int j = 0; j < s.cells; ++j) {
        const double d = v.values[static_cast<Eigen::Index>(s.dof(j + 1))] - v.values[static_cast<Eigen::Index>(s.dof(j))];
        const int sign = d > tol ? 1 : (d < -tol ? -1 : 0);
        if (sign == 0) continue;
        if (last != 0 && sign != last) ++changes;
        last = sign;
    }
    return changes;
}

}  // namespace frontlab
