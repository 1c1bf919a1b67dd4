// Discrete variational-inequality solver on a half grid.
//
// The domain is the upper half box [-L,L]^n x [0,L] with uniform spacing h.
// Solutions are even across the plane z = 0, which enters the plane stencil
// through a ghost layer: the neighbour below the plane equals the neighbour
// above it.  On the plane an obstacle is enforced; all outer faces carry
// Dirichlet data.  The solver is projected SOR; a small brute-force LCP
// solver doubles as an independent oracle for tests.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace thinfree {

struct SolverDomain {
    int n = 2;          // thin dimension, 1 or 2
    double L = 4.0;
    double h = 1.0 / 16;
    int nx = 0, ny = 0, nz = 0;  // ny == 1 when n == 1

    std::int64_t num_nodes() const { return std::int64_t(nx) * ny * nz; }
    int plane_count() const { return nx * ny; }

    std::size_t index(int i, int j, int k) const {
        return (std::size_t(k) * ny + j) * nx + i;
    }
    std::size_t plane_index(int i, int j) const { return std::size_t(j) * nx + i; }

    double x(int i) const { return -L + i * h; }
    double y(int j) const { return n == 2 ? -L + j * h : 0.0; }
    double z(int k) const { return k * h; }

    bool on_boundary(int i, int j, int k) const {
        if (i == 0 || i == nx - 1 || k == nz - 1) return true;
        return n == 2 && (j == 0 || j == ny - 1);
    }
    bool plane_interior(int i, int j) const {
        if (i == 0 || i == nx - 1) return false;
        return n == 1 || (j > 0 && j < ny - 1);
    }

    std::int64_t boundary_count() const;
};

/// Validates n in {1,2}, positive spacing, integral L/h and the node budget.
SolverDomain build_domain(int n, double L, double h);

struct ObstacleProblemSpec {
    SolverDomain domain;
    /// Obstacle per plane node (nx*ny values); rim entries are ignored
    /// because the plane rim belongs to the Dirichlet boundary.
    std::vector<double> obstacle;
    /// Dirichlet data for boundary nodes, in increasing node-index order.
    std::vector<double> boundary;
    double omega = 1.8;
    double tol = 1e-8;
    std::int64_t max_sweeps = 0;  // 0: use 50*(L/h)^2
};

/// Spec with zero boundary data and the obstacle left for the caller.
ObstacleProblemSpec make_spec(const SolverDomain& domain);

std::int64_t default_max_sweeps(const SolverDomain& domain);

struct SolutionField {
    SolverDomain domain;
    std::vector<double> values;
    std::int64_t sweeps_used = 0;
    bool converged = false;
};

enum class SweepMode { Lexicographic, RedBlack };

struct SolveOptions {
    SweepMode sweep = SweepMode::Lexicographic;
    /// Worker count for red-black sweeps.  The result is bitwise
    /// independent of this value: nodes of one colour only read the other.
    int threads = 1;
};

SolutionField solve_thin_obstacle(const ObstacleProblemSpec& spec,
                                  const SolveOptions& opts = {});

struct SolveDiagnostics {
    double max_free_residual = 0.0;          // |L_h u| off the contact set
    double max_superharmonic_violation = 0.0;  // positive part of L_h u
    double max_complementarity = 0.0;        // |min(u - phi, -L_h u)| on plane
    double max_boundary_mismatch = 0.0;
    double min_plane_slack = 0.0;            // min(u - phi), exact >= 0
};

SolveDiagnostics residuals(const ObstacleProblemSpec& spec, const SolutionField& field);

struct BruteforceOptions {
    /// Enumerate contact assignments when the plane has at most this many
    /// interior nodes; beyond it fall back to a long projected iteration.
    int enum_limit = 16;
    double tol = 1e-12;
};

/// Reference LCP solve: enumerates contact/free assignments of the plane
/// nodes (Schur-reduced to the plane) and returns the sign-consistent one.
SolutionField lcp_bruteforce(const ObstacleProblemSpec& spec,
                             const BruteforceOptions& opts = {});

// --- serialization -------------------------------------------------------

/// CSV "i,j,k,x,y,z,u", nodes in lexicographic (i,j,k) order.
void write_grid_csv(const std::string& path, const SolutionField& field);

/// CSV "i,j,x,y,u,phi" for the plane slice.
void write_plane_csv(const std::string& path, const SolutionField& field,
                     const std::vector<double>& obstacle);

/// Binary checkpoint: magic "THINFREE1", three little-endian int64 dims,
/// float64 values in lexicographic (i,j,k) node order.
void write_checkpoint(const std::string& path, const SolutionField& field);
SolutionField read_checkpoint(const std::string& path, const SolverDomain& domain);

}  // namespace thinfree
