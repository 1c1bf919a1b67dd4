#include "thinfree/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

// Reference LCP solver, kept deliberately separate from the sweep code.
// The grid operator is assembled as an explicit matrix over the unknown
// (non-boundary) nodes and the complementarity system is solved either by
// enumerating contact assignments on the Schur complement restricted to the
// plane, or by a long projected Gauss-Seidel iteration on the assembled rows.

namespace thinfree {

namespace {

struct Assembled {
    std::vector<std::size_t> nodes;     // node id per unknown, ascending
    std::vector<int> unknown_of;        // node id -> unknown index or -1
    std::vector<std::vector<std::pair<int, double>>> offdiag;  // weight w: diag*u - sum w*u_nb = b
    std::vector<double> b;
    std::vector<double> phi;            // plane rows only, by unknown index
    int plane_unknowns = 0;
    double diag = 0.0;
};

Assembled assemble(const ObstacleProblemSpec& spec, const std::vector<double>& bvals) {
    const SolverDomain& d = spec.domain;
    Assembled a;
    a.unknown_of.assign(static_cast<std::size_t>(d.num_nodes()), -1);
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i)
                if (!d.on_boundary(i, j, k)) {
                    a.unknown_of[d.index(i, j, k)] = static_cast<int>(a.nodes.size());
                    a.nodes.push_back(d.index(i, j, k));
                    if (k == 0) ++a.plane_unknowns;
                }
    const int M = static_cast<int>(a.nodes.size());
    a.offdiag.resize(M);
    a.b.assign(M, 0.0);
    a.phi.assign(a.plane_unknowns, 0.0);
    a.diag = 2.0 * d.n + 2.0;

    // Unknowns are ordered by node id, which is k-major, so the plane block
    // occupies the first plane_unknowns rows.
    for (int r = 0; r < M; ++r) {
        const std::size_t id = a.nodes[r];
        const int k = static_cast<int>(id / (std::size_t(d.nx) * d.ny));
        const std::size_t rem = id % (std::size_t(d.nx) * d.ny);
        const int j = static_cast<int>(rem / d.nx);
        const int i = static_cast<int>(rem % d.nx);
        if (k == 0) a.phi[r] = spec.obstacle[d.plane_index(i, j)];

        auto couple = [&](int ii, int jj, int kk, double w) {
            const std::size_t nid = d.index(ii, jj, kk);
            const int c = a.unknown_of[nid];
            if (c >= 0)
                a.offdiag[r].emplace_back(c, w);
            else
                a.b[r] += w * bvals[nid];
        };
        couple(i - 1, j, k, 1.0);
        couple(i + 1, j, k, 1.0);
        if (d.n == 2) {
            couple(i, j - 1, k, 1.0);
            couple(i, j + 1, k, 1.0);
        }
        if (k == 0) {
            couple(i, j, 1, 2.0);  // ghost layer mirrors the first one above
        } else {
            couple(i, j, k - 1, 1.0);
            couple(i, j, k + 1, 1.0);
        }
    }
    return a;
}

// Expand boundary values back onto the full grid for a SolutionField.
std::vector<double> boundary_grid(const ObstacleProblemSpec& spec) {
    const SolverDomain& d = spec.domain;
    std::vector<double> g(static_cast<std::size_t>(d.num_nodes()), 0.0);
    std::size_t b = 0;
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i)
                if (d.on_boundary(i, j, k)) g[d.index(i, j, k)] = spec.boundary[b++];
    return g;
}

SolutionField pack_solution(const ObstacleProblemSpec& spec, const Assembled& a,
                            const Eigen::VectorXd& u, std::int64_t work) {
    SolutionField field;
    field.domain = spec.domain;
    field.values = boundary_grid(spec);
    for (int r = 0; r < static_cast<int>(a.nodes.size()); ++r)
        field.values[a.nodes[r]] = u[r];
    field.sweeps_used = work;
    field.converged = true;
    return field;
}

SolutionField solve_by_enumeration(const ObstacleProblemSpec& spec, const Assembled& a,
                                   double eps) {
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    const int M = static_cast<int>(a.nodes.size());
    const int m = a.plane_unknowns;
    const int mi = M - m;

    MatrixXd A = MatrixXd::Zero(M, M);
    VectorXd b(M);
    for (int r = 0; r < M; ++r) {
        A(r, r) = a.diag;
        for (auto [c, w] : a.offdiag[r]) A(r, c) -= w;
        b[r] = a.b[r];
    }

    // Schur-reduce the unconstrained block: S uP = bt encodes the full system.
    MatrixXd S = A.topLeftCorner(m, m);
    VectorXd bt = b.head(m);
    Eigen::PartialPivLU<MatrixXd> lu_ii;
    if (mi > 0) {
        lu_ii.compute(A.bottomRightCorner(mi, mi));
        const MatrixXd X = lu_ii.solve(A.bottomLeftCorner(mi, m));
        S -= A.topRightCorner(m, mi) * X;
        bt -= A.topRightCorner(m, mi) * lu_ii.solve(b.tail(mi));
    }
    const Eigen::Map<const VectorXd> phi(a.phi.data(), m);

    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << m); ++mask) {
        std::vector<int> freeIdx, contactIdx;
        for (int p = 0; p < m; ++p)
            ((mask >> p) & 1u ? contactIdx : freeIdx).push_back(p);
        const int nf = static_cast<int>(freeIdx.size());

        VectorXd uP(m);
        for (int p : contactIdx) uP[p] = phi[p];
        if (nf > 0) {
            MatrixXd Sff(nf, nf);
            VectorXd rhs(nf);
            for (int r = 0; r < nf; ++r) {
                rhs[r] = bt[freeIdx[r]];
                for (int c = 0; c < nf; ++c) Sff(r, c) = S(freeIdx[r], freeIdx[c]);
                for (int p : contactIdx) rhs[r] -= S(freeIdx[r], p) * phi[p];
            }
            const VectorXd uF = Sff.partialPivLu().solve(rhs);
            for (int r = 0; r < nf; ++r) uP[freeIdx[r]] = uF[r];
        }

        const VectorXd lambda = S * uP - bt;
        bool ok = true;
        for (int p : freeIdx)
            if (uP[p] < phi[p] - eps) { ok = false; break; }
        if (ok)
            for (int p : contactIdx)
                if (lambda[p] < -eps) { ok = false; break; }
        if (!ok) continue;

        VectorXd u(M);
        u.head(m) = uP;
        if (mi > 0)
            u.tail(mi) = lu_ii.solve(b.tail(mi) - A.bottomLeftCorner(mi, m) * uP);
        return pack_solution(spec, a, u, static_cast<std::int64_t>(mask) + 1);
    }
    throw std::runtime_error("no sign-consistent contact assignment found");
}

SolutionField solve_by_iteration(const ObstacleProblemSpec& spec, const Assembled& a,
                                 double tol) {
    const int M = static_cast<int>(a.nodes.size());
    const int m = a.plane_unknowns;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(M);
    for (int p = 0; p < m; ++p) u[p] = std::max(0.0, a.phi[p]);

    const std::int64_t cap = 500000;
    for (std::int64_t sweep = 1; sweep <= cap; ++sweep) {
        double maxupd = 0.0;
        for (int r = 0; r < M; ++r) {
            double s = a.b[r];
            for (auto [c, w] : a.offdiag[r]) s += w * u[c];
            double nu = s / a.diag;
            if (r < m && nu < a.phi[r]) nu = a.phi[r];
            maxupd = std::max(maxupd, std::abs(nu - u[r]));
            u[r] = nu;
        }
        if (maxupd < tol) return pack_solution(spec, a, u, sweep);
    }
    throw std::runtime_error("reference iteration did not converge");
}

}  // namespace

SolutionField lcp_bruteforce(const ObstacleProblemSpec& spec, const BruteforceOptions& opts) {
    const SolverDomain& d = spec.domain;
    if (static_cast<int>(spec.obstacle.size()) != d.plane_count())
        throw std::invalid_argument("obstacle array does not match the plane");
    if (static_cast<std::int64_t>(spec.boundary.size()) != d.boundary_count())
        throw std::invalid_argument("boundary array does not match the boundary");

    const std::vector<double> bvals = boundary_grid(spec);
    const Assembled a = assemble(spec, bvals);
    const int M = static_cast<int>(a.nodes.size());
    if (M > 2000)
        throw std::invalid_argument("problem too large for the reference solver");

    double scale = 1.0;
    for (double v : spec.obstacle) scale = std::max(scale, std::abs(v));
    for (double v : spec.boundary) scale = std::max(scale, std::abs(v));

    if (a.plane_unknowns <= opts.enum_limit)
        return solve_by_enumeration(spec, a, 1e-9 * scale);
    return solve_by_iteration(spec, a, opts.tol);
}

}  // namespace thinfree
