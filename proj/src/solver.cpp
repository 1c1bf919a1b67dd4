#include "thinfree/solver.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <thread>

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace thinfree {

std::int64_t SolverDomain::boundary_count() const {
    const std::int64_t inner =
        std::int64_t(nx - 2) * (n == 2 ? ny - 2 : 1) * (nz - 1);
    return num_nodes() - inner;
}

SolverDomain build_domain(int n, double L, double h) {
    if (n != 1 && n != 2) throw std::invalid_argument("thin dimension must be 1 or 2");
    if (!(L > 0.0) || !(h > 0.0)) throw std::invalid_argument("L and h must be positive");
    const double ratio = L / h;
    const double r = std::round(ratio);
    if (std::abs(ratio - r) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("non-integral L/h");
    const int m = static_cast<int>(r);
    if (m < 2) throw std::invalid_argument("domain needs at least two layers (L/h >= 2)");
    SolverDomain d;
    d.n = n;
    d.L = L;
    d.h = h;
    d.nx = 2 * m + 1;
    d.ny = (n == 2) ? d.nx : 1;
    d.nz = m + 1;
    if (d.num_nodes() > (std::int64_t(1) << 26))
        throw std::invalid_argument("node budget exceeded");
    return d;
}

std::int64_t default_max_sweeps(const SolverDomain& domain) {
    const double m = domain.L / domain.h;
    return static_cast<std::int64_t>(50.0 * m * m);
}

ObstacleProblemSpec make_spec(const SolverDomain& domain) {
    ObstacleProblemSpec spec;
    spec.domain = domain;
    spec.obstacle.assign(static_cast<std::size_t>(domain.plane_count()), 0.0);
    spec.boundary.assign(static_cast<std::size_t>(domain.boundary_count()), 0.0);
    spec.max_sweeps = default_max_sweeps(domain);
    return spec;
}

namespace {

void validate_spec(const ObstacleProblemSpec& spec) {
    const SolverDomain& d = spec.domain;
    if (d.nx < 3 || d.nz < 2) throw std::invalid_argument("domain is not built");
    if (static_cast<int>(spec.obstacle.size()) != d.plane_count())
        throw std::invalid_argument("obstacle array does not match the plane");
    if (static_cast<std::int64_t>(spec.boundary.size()) != d.boundary_count())
        throw std::invalid_argument("boundary array does not match the boundary");
    if (!(spec.omega > 0.0 && spec.omega < 2.0))
        throw std::invalid_argument("relaxation factor must lie in (0,2)");
    if (!(spec.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    for (double v : spec.obstacle)
        if (!std::isfinite(v)) throw std::invalid_argument("obstacle values must be finite");
    for (double v : spec.boundary)
        if (!std::isfinite(v)) throw std::invalid_argument("boundary values must be finite");
}

void apply_boundary(const ObstacleProblemSpec& spec, std::vector<double>& v) {
    const SolverDomain& d = spec.domain;
    std::size_t b = 0;
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i)
                if (d.on_boundary(i, j, k)) v[d.index(i, j, k)] = spec.boundary[b++];
}

// One lexicographic projected SOR sweep; returns the max nodal update.
double sweep_lex(const SolverDomain& d, const std::vector<double>& phi, double omega,
                 std::vector<double>& v) {
    const int nx = d.nx, ny = d.ny, nz = d.nz;
    const std::size_t sk = std::size_t(nx) * ny;
    double maxupd = 0.0;
    if (d.n == 2) {
        const double inv = 1.0 / 6.0;
        for (int j = 1; j < ny - 1; ++j) {
            std::size_t id = std::size_t(j) * nx + 1;
            for (int i = 1; i < nx - 1; ++i, ++id) {
                const double old = v[id];
                const double s =
                    v[id - 1] + v[id + 1] + v[id - nx] + v[id + nx] + 2.0 * v[id + sk];
                double nu = old + omega * (s * inv - old);
                if (nu < phi[id]) nu = phi[id];
                const double delta = std::abs(nu - old);
                if (delta > maxupd) maxupd = delta;
                v[id] = nu;
            }
        }
        for (int k = 1; k < nz - 1; ++k)
            for (int j = 1; j < ny - 1; ++j) {
                std::size_t id = k * sk + std::size_t(j) * nx + 1;
                for (int i = 1; i < nx - 1; ++i, ++id) {
                    const double old = v[id];
                    const double s = v[id - 1] + v[id + 1] + v[id - nx] + v[id + nx] +
                                     v[id - sk] + v[id + sk];
                    const double nu = old + omega * (s * inv - old);
                    const double delta = std::abs(nu - old);
                    if (delta > maxupd) maxupd = delta;
                    v[id] = nu;
                }
            }
    } else {
        const double inv = 1.0 / 4.0;
        {
            std::size_t id = 1;
            for (int i = 1; i < nx - 1; ++i, ++id) {
                const double old = v[id];
                const double s = v[id - 1] + v[id + 1] + 2.0 * v[id + sk];
                double nu = old + omega * (s * inv - old);
                if (nu < phi[id]) nu = phi[id];
                const double delta = std::abs(nu - old);
                if (delta > maxupd) maxupd = delta;
                v[id] = nu;
            }
        }
        for (int k = 1; k < nz - 1; ++k) {
            std::size_t id = k * sk + 1;
            for (int i = 1; i < nx - 1; ++i, ++id) {
                const double old = v[id];
                const double s = v[id - 1] + v[id + 1] + v[id - sk] + v[id + sk];
                const double nu = old + omega * (s * inv - old);
                const double delta = std::abs(nu - old);
                if (delta > maxupd) maxupd = delta;
                v[id] = nu;
            }
        }
    }
    return maxupd;
}

// Red-black half sweep over one colour for a k-slab.  Nodes of one colour
// only read the other colour, so slabs can run concurrently and the result
// does not depend on the partition.
double sweep_color_slab(const SolverDomain& d, const std::vector<double>& phi,
                        double omega, int color, int k0, int k1,
                        std::vector<double>& v) {
    const int nx = d.nx, ny = d.ny;
    const std::size_t sk = std::size_t(nx) * ny;
    double maxupd = 0.0;
    const double inv = d.n == 2 ? 1.0 / 6.0 : 1.0 / 4.0;
    for (int k = k0; k < k1; ++k) {
        const int jlo = d.n == 2 ? 1 : 0, jhi = d.n == 2 ? ny - 1 : 1;
        for (int j = jlo; j < jhi; ++j) {
            int i = 1 + ((1 + j + k + color) & 1);
            std::size_t id = k * sk + std::size_t(j) * nx + i;
            for (; i < nx - 1; i += 2, id += 2) {
                const double old = v[id];
                double s = v[id - 1] + v[id + 1];
                if (d.n == 2) s += v[id - nx] + v[id + nx];
                s += (k == 0) ? 2.0 * v[id + sk] : v[id - sk] + v[id + sk];
                double nu = old + omega * (s * inv - old);
                if (k == 0 && nu < phi[id]) nu = phi[id];
                const double delta = std::abs(nu - old);
                if (delta > maxupd) maxupd = delta;
                v[id] = nu;
            }
        }
    }
    return maxupd;
}

double sweep_redblack(const SolverDomain& d, const std::vector<double>& phi, double omega,
                      int threads, std::vector<double>& v) {
    const int kmax = d.nz - 1;
    double maxupd = 0.0;
    for (int color = 0; color < 2; ++color) {
        if (threads <= 1 || kmax < 2) {
            maxupd = std::max(maxupd, sweep_color_slab(d, phi, omega, color, 0, kmax, v));
            continue;
        }
        const int nt = std::min(threads, kmax);
        std::vector<double> local(nt, 0.0);
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (int t = 0; t < nt; ++t) {
            const int k0 = kmax * t / nt, k1 = kmax * (t + 1) / nt;
            pool.emplace_back([&, t, k0, k1] {
                local[t] = sweep_color_slab(d, phi, omega, color, k0, k1, v);
            });
        }
        for (auto& th : pool) th.join();
        for (double m : local) maxupd = std::max(maxupd, m);
    }
    return maxupd;
}

}  // namespace

SolutionField solve_thin_obstacle(const ObstacleProblemSpec& spec, const SolveOptions& opts) {
    validate_spec(spec);
    const SolverDomain& d = spec.domain;
    SolutionField field;
    field.domain = d;
    field.values.assign(static_cast<std::size_t>(d.num_nodes()), 0.0);
    apply_boundary(spec, field.values);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i)
            if (d.plane_interior(i, j))
                field.values[d.plane_index(i, j)] = std::max(0.0, spec.obstacle[d.plane_index(i, j)]);

    const std::int64_t cap = spec.max_sweeps > 0 ? spec.max_sweeps : default_max_sweeps(d);
    for (std::int64_t s = 0; s < cap; ++s) {
        const double upd = (opts.sweep == SweepMode::Lexicographic)
                               ? sweep_lex(d, spec.obstacle, spec.omega, field.values)
                               : sweep_redblack(d, spec.obstacle, spec.omega,
                                                std::max(1, opts.threads), field.values);
        ++field.sweeps_used;
        if (upd < spec.tol) {
            field.converged = true;
            break;
        }
    }
    return field;
}

SolveDiagnostics residuals(const ObstacleProblemSpec& spec, const SolutionField& field) {
    validate_spec(spec);
    const SolverDomain& d = spec.domain;
    const std::vector<double>& v = field.values;
    const double invh2 = 1.0 / (d.h * d.h);
    const std::size_t sk = std::size_t(d.nx) * d.ny;
    SolveDiagnostics out;
    out.min_plane_slack = 0.0;
    bool plane_seen = false;

    for (int k = 0; k < d.nz - 1; ++k) {
        const int jlo = d.n == 2 ? 1 : 0, jhi = d.n == 2 ? d.ny - 1 : 1;
        for (int j = jlo; j < jhi; ++j)
            for (int i = 1; i < d.nx - 1; ++i) {
                const std::size_t id = d.index(i, j, k);
                double s = v[id - 1] + v[id + 1];
                if (d.n == 2) s += v[id - d.nx] + v[id + d.nx];
                s += (k == 0) ? 2.0 * v[id + sk] : v[id - sk] + v[id + sk];
                const double lap = (s - (2.0 * d.n + 2.0) * v[id]) * invh2;
                out.max_superharmonic_violation =
                    std::max(out.max_superharmonic_violation, lap);
                if (k == 0) {
                    const double slack = v[id] - spec.obstacle[d.plane_index(i, j)];
                    if (!plane_seen || slack < out.min_plane_slack) out.min_plane_slack = slack;
                    plane_seen = true;
                    const double comp = std::min(slack, -lap);
                    out.max_complementarity = std::max(out.max_complementarity, std::abs(comp));
                    if (slack != 0.0)  // off the contact set (projection is exact)
                        out.max_free_residual = std::max(out.max_free_residual, std::abs(lap));
                } else {
                    out.max_free_residual = std::max(out.max_free_residual, std::abs(lap));
                }
            }
    }

    std::size_t b = 0;
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i)
                if (d.on_boundary(i, j, k)) {
                    out.max_boundary_mismatch = std::max(
                        out.max_boundary_mismatch,
                        std::abs(v[d.index(i, j, k)] - spec.boundary[b++]));
                }
    return out;
}

// --- serialization -------------------------------------------------------

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_or_throw(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    return f;
}

void append_double(std::string& out, double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

constexpr char kCheckpointMagic[9] = {'T', 'H', 'I', 'N', 'F', 'R', 'E', 'E', '1'};

}  // namespace

void write_grid_csv(const std::string& path, const SolutionField& field) {
    const SolverDomain& d = field.domain;
    FilePtr f = open_or_throw(path, "wb");
    std::string line = "i,j,k,x,y,z,u\n";
    std::fwrite(line.data(), 1, line.size(), f.get());
    for (int i = 0; i < d.nx; ++i)
        for (int j = 0; j < d.ny; ++j)
            for (int k = 0; k < d.nz; ++k) {
                line.clear();
                line += std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + ",";
                append_double(line, d.x(i));
                line += ",";
                append_double(line, d.y(j));
                line += ",";
                append_double(line, d.z(k));
                line += ",";
                append_double(line, field.values[d.index(i, j, k)]);
                line += "\n";
                std::fwrite(line.data(), 1, line.size(), f.get());
            }
}

void write_plane_csv(const std::string& path, const SolutionField& field,
                     const std::vector<double>& obstacle) {
    const SolverDomain& d = field.domain;
    if (static_cast<int>(obstacle.size()) != d.plane_count())
        throw std::invalid_argument("obstacle array does not match the plane");
    FilePtr f = open_or_throw(path, "wb");
    std::string line = "i,j,x,y,u,phi\n";
    std::fwrite(line.data(), 1, line.size(), f.get());
    for (int i = 0; i < d.nx; ++i)
        for (int j = 0; j < d.ny; ++j) {
            line.clear();
            line += std::to_string(i) + "," + std::to_string(j) + ",";
            append_double(line, d.x(i));
            line += ",";
            append_double(line, d.y(j));
            line += ",";
            append_double(line, field.values[d.plane_index(i, j)]);
            line += ",";
            append_double(line, obstacle[d.plane_index(i, j)]);
            line += "\n";
            std::fwrite(line.data(), 1, line.size(), f.get());
        }
}

void write_checkpoint(const std::string& path, const SolutionField& field) {
    const SolverDomain& d = field.domain;
    FilePtr f = open_or_throw(path, "wb");
    std::fwrite(kCheckpointMagic, 1, sizeof kCheckpointMagic, f.get());
    const std::int64_t dims[3] = {d.nx, d.ny, d.nz};
    std::fwrite(dims, sizeof(std::int64_t), 3, f.get());
    std::vector<double> buf;
    buf.reserve(static_cast<std::size_t>(d.num_nodes()));
    for (int i = 0; i < d.nx; ++i)
        for (int j = 0; j < d.ny; ++j)
            for (int k = 0; k < d.nz; ++k) buf.push_back(field.values[d.index(i, j, k)]);
    std::fwrite(buf.data(), sizeof(double), buf.size(), f.get());
}

SolutionField read_checkpoint(const std::string& path, const SolverDomain& domain) {
    FilePtr f = open_or_throw(path, "rb");
    char magic[sizeof kCheckpointMagic];
    if (std::fread(magic, 1, sizeof magic, f.get()) != sizeof magic ||
        std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    std::int64_t dims[3];
    if (std::fread(dims, sizeof(std::int64_t), 3, f.get()) != 3)
        throw std::runtime_error("truncated checkpoint header: " + path);
    if (dims[0] != domain.nx || dims[1] != domain.ny || dims[2] != domain.nz)
        throw std::runtime_error("checkpoint dimensions do not match the domain");
    SolutionField field;
    field.domain = domain;
    field.values.assign(static_cast<std::size_t>(domain.num_nodes()), 0.0);
    std::vector<double> buf(field.values.size());
    if (std::fread(buf.data(), sizeof(double), buf.size(), f.get()) != buf.size())
        throw std::runtime_error("truncated checkpoint payload: " + path);
    std::size_t pos = 0;
    for (int i = 0; i < domain.nx; ++i)
        for (int j = 0; j < domain.ny; ++j)
            for (int k = 0; k < domain.nz; ++k)
                field.values[domain.index(i, j, k)] = buf[pos++];
    field.converged = true;
    return field;
}

}  // namespace thinfree
