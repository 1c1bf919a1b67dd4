#include "thinfree/setgeom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>

namespace thinfree {

namespace {

constexpr double kInf = 1e30;

void check_same_domain(const ThinSet& a, const ThinSet& b) {
    if (a.domain.nx != b.domain.nx || a.domain.ny != b.domain.ny ||
        a.domain.h != b.domain.h)
        throw std::invalid_argument("thin sets live on different domains");
}

// 1D squared distance transform, lower envelope of parabolas.
void dt1d(const std::vector<double>& f, int n, std::vector<int>& v, std::vector<double>& z,
          std::vector<double>& out) {
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            const int p = v[k];
            s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
            if (s <= z[k] && k > 0)
                --k;
            else
                break;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = double(q) - v[k];
        out[q] = dq * dq + f[v[k]];
    }
}

// Exact squared distance (index units) to the nearest member node.
std::vector<double> edt2(const ThinSet& s) {
    const int nx = s.domain.nx, ny = s.domain.ny;
    std::vector<double> g(std::size_t(nx) * ny);
    for (std::size_t idx = 0; idx < g.size(); ++idx) g[idx] = s.mask[idx] ? 0.0 : kInf;

    const int nmax = std::max(nx, ny);
    std::vector<double> f(nmax), out(nmax), z(nmax + 1);
    std::vector<int> v(nmax);

    if (ny > 1)
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) f[j] = g[std::size_t(j) * nx + i];
            dt1d(f, ny, v, z, out);
            for (int j = 0; j < ny; ++j) g[std::size_t(j) * nx + i] = out[j];
        }
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) f[i] = g[std::size_t(j) * nx + i];
        dt1d(f, nx, v, z, out);
        for (int i = 0; i < nx; ++i) g[std::size_t(j) * nx + i] = out[i];
    }
    return g;
}

double point_segment_dist(double px, double py, double ax, double ay, double bx, double by) {
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double qx = ax + t * dx - px, qy = ay + t * dy - py;
    return std::hypot(qx, qy);
}

FILE* open_or_throw(const std::string& path, const char* mode) {
    FILE* f = std::fopen(path.c_str(), mode);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    return f;
}

}  // namespace

std::int64_t ThinSet::count() const {
    std::int64_t c = 0;
    for (std::uint8_t b : mask) c += b != 0;
    return c;
}

ThinSet make_thin_set(const SolverDomain& domain) {
    ThinSet s;
    s.domain = domain;
    s.mask.assign(static_cast<std::size_t>(domain.plane_count()), 0);
    return s;
}

ThinSetPair extract_thin_sets(const SolutionField& field, const ObstacleProblemSpec& spec,
                              double tau_c) {
    if (!(tau_c > 0.0)) throw std::invalid_argument("contact band must be positive");
    const SolverDomain& d = field.domain;
    if (static_cast<int>(spec.obstacle.size()) != d.plane_count())
        throw std::invalid_argument("obstacle array does not match the plane");
    ThinSetPair out;
    out.contact = make_thin_set(d);
    out.positivity = make_thin_set(d);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            const std::size_t idx = d.plane_index(i, j);
            const double u = field.values[idx];
            const bool inContact = u - spec.obstacle[idx] <= tau_c;
            const bool positive = u > tau_c;
            out.contact.mask[idx] = inContact;
            out.positivity.mask[idx] = positive;
            if (!inContact && !positive) ++out.unclassified;
        }
    return out;
}

std::vector<ThinSet> connected_components(const ThinSet& s) {
    const int nx = s.domain.nx, ny = s.domain.ny;
    std::vector<ThinSet> comps;
    std::vector<std::uint8_t> seen(s.mask.size(), 0);
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < s.mask.size(); ++start) {
        if (!s.mask[start] || seen[start]) continue;
        ThinSet comp = make_thin_set(s.domain);
        stack.assign(1, start);
        seen[start] = 1;
        while (!stack.empty()) {
            const std::size_t idx = stack.back();
            stack.pop_back();
            comp.mask[idx] = 1;
            const int i = static_cast<int>(idx % nx), j = static_cast<int>(idx / nx);
            const std::array<std::array<int, 2>, 4> nb = {{{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}}};
            for (const auto& [ni, nj] : nb) {
                if (ni < 0 || ni >= nx || nj < 0 || nj >= ny) continue;
                const std::size_t nidx = s.domain.plane_index(ni, nj);
                if (s.mask[nidx] && !seen[nidx]) {
                    seen[nidx] = 1;
                    stack.push_back(nidx);
                }
            }
        }
        comps.push_back(std::move(comp));
    }
    return comps;
}

BoundingBox bounding_box(const ThinSet& s) {
    BoundingBox bb;
    bb.imin = s.domain.nx;
    bb.jmin = s.domain.ny;
    bool any = false;
    for (int j = 0; j < s.domain.ny; ++j)
        for (int i = 0; i < s.domain.nx; ++i)
            if (s.at(i, j)) {
                any = true;
                bb.imin = std::min(bb.imin, i);
                bb.imax = std::max(bb.imax, i);
                bb.jmin = std::min(bb.jmin, j);
                bb.jmax = std::max(bb.jmax, j);
            }
    if (!any) throw std::invalid_argument("bounding box of an empty set");
    return bb;
}

double directed_excess(const ThinSet& a, const ThinSet& b) {
    check_same_domain(a, b);
    if (a.count() == 0 || b.count() == 0)
        throw std::invalid_argument("distance of an empty set");
    const std::vector<double> db = edt2(b);
    double worst = 0.0;
    for (std::size_t idx = 0; idx < a.mask.size(); ++idx)
        if (a.mask[idx]) worst = std::max(worst, db[idx]);
    return std::sqrt(worst) * a.domain.h;
}

double hausdorff(const ThinSet& a, const ThinSet& b) {
    return std::max(directed_excess(a, b), directed_excess(b, a));
}

double separation(const ThinSet& a, const ThinSet& b) {
    check_same_domain(a, b);
    if (a.count() == 0 || b.count() == 0)
        throw std::invalid_argument("distance of an empty set");
    const std::vector<double> db = edt2(b);
    double best = kInf;
    for (std::size_t idx = 0; idx < a.mask.size(); ++idx)
        if (a.mask[idx]) best = std::min(best, db[idx]);
    return std::sqrt(best) * a.domain.h;
}

StarVerdict star_shaped(const ThinSet& s, double cx, double cy) {
    if (s.count() == 0) throw std::invalid_argument("star test on an empty set");
    const SolverDomain& d = s.domain;
    const double tube = 0.5 * d.h + 1e-12;
    StarVerdict v;
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            if (!s.at(i, j)) continue;
            ++v.rays_checked;
            const double px = d.x(i), py = d.y(j);
            // Index-space bounding box of the tube around [center, node].
            const int ilo = std::max(0, int(std::floor((std::min(cx, px) - tube + d.L) / d.h)) - 1);
            const int ihi = std::min(d.nx - 1, int(std::ceil((std::max(cx, px) + tube + d.L) / d.h)) + 1);
            int jlo = 0, jhi = d.ny - 1;
            if (d.n == 2) {
                jlo = std::max(0, int(std::floor((std::min(cy, py) - tube + d.L) / d.h)) - 1);
                jhi = std::min(d.ny - 1, int(std::ceil((std::max(cy, py) + tube + d.L) / d.h)) + 1);
            }
            int missing = 0;
            for (int jj = jlo; jj <= jhi && missing < 2; ++jj)
                for (int ii = ilo; ii <= ihi; ++ii) {
                    if (s.at(ii, jj)) continue;
                    if (point_segment_dist(d.x(ii), d.y(jj), cx, cy, px, py) <= tube) {
                        if (++missing >= 2) break;
                    }
                }
            if (missing >= 2) ++v.rays_failed;
        }
    v.star_shaped = v.rays_failed == 0;
    return v;
}

namespace {

// Monotone-chain hull over integer node indices; exact arithmetic.
std::vector<std::array<std::int64_t, 2>> hull_of(const ThinSet& s) {
    std::vector<std::array<std::int64_t, 2>> pts;
    for (int j = 0; j < s.domain.ny; ++j)
        for (int i = 0; i < s.domain.nx; ++i)
            if (s.at(i, j)) pts.push_back({i, j});
    std::sort(pts.begin(), pts.end());
    auto cross = [](const std::array<std::int64_t, 2>& o, const std::array<std::int64_t, 2>& a,
                    const std::array<std::int64_t, 2>& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    const int n = static_cast<int>(pts.size());
    if (n <= 2) return pts;
    std::vector<std::array<std::int64_t, 2>> hull(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const int lower = k + 1;
    for (int i = n - 2; i >= 0; --i) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);  // last point repeats the first
    return hull;
}

}  // namespace

bool convexity_check(const ThinSet& s) {
    if (s.count() == 0) throw std::invalid_argument("convexity test on an empty set");
    const std::vector<std::array<std::int64_t, 2>> hull = hull_of(s);
    if (hull.size() <= 2) return true;  // segment or point: nothing strictly inside

    const BoundingBox bb = bounding_box(s);
    for (int j = bb.jmin; j <= bb.jmax; ++j)
        for (int i = bb.imin; i <= bb.imax; ++i) {
            if (s.at(i, j)) continue;
            bool inside = true;
            double edgeDist = kInf;
            for (std::size_t e = 0; e < hull.size() && inside; ++e) {
                const auto& a = hull[e];
                const auto& b = hull[(e + 1) % hull.size()];
                const std::int64_t cr =
                    (b[0] - a[0]) * (j - a[1]) - (b[1] - a[1]) * (i - a[0]);
                if (cr < 0) inside = false;
                edgeDist = std::min(edgeDist,
                                    point_segment_dist(i, j, double(a[0]), double(a[1]),
                                                       double(b[0]), double(b[1])));
            }
            // A one-node layer along the hull boundary is forgiven.
            if (inside && edgeDist > 1.0 + 1e-9) return false;
        }
    return true;
}

EtaBarResult eta_bar(const SolverDomain& domain, const std::vector<double>& g, double eps) {
    if (static_cast<int>(g.size()) != domain.plane_count())
        throw std::invalid_argument("sample array does not match the plane");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (domain.L < 1.0) throw std::invalid_argument("domain does not cover the unit disc");

    const double r2max = 1.0 + 1e-12;
    auto inDisc = [&](int i, int j) {
        if (i < 0 || i >= domain.nx || j < 0 || j >= domain.ny) return false;
        const double x = domain.x(i), y = domain.y(j);
        return x * x + y * y <= r2max;
    };

    ThinSet sub = make_thin_set(domain);
    for (int j = 0; j < domain.ny; ++j)
        for (int i = 0; i < domain.nx; ++i)
            if (g[domain.plane_index(i, j)] <= 0.0) sub.mask[domain.plane_index(i, j)] = 1;

    // Hypothesis check: positive on the rim of the unit-disc raster.
    for (int j = 0; j < domain.ny; ++j)
        for (int i = 0; i < domain.nx; ++i) {
            if (!inDisc(i, j)) continue;
            const bool rim = !inDisc(i - 1, j) || !inDisc(i + 1, j) ||
                             (domain.n == 2 && (!inDisc(i, j - 1) || !inDisc(i, j + 1)));
            if (rim && g[domain.plane_index(i, j)] <= 0.0)
                throw std::invalid_argument("sublevel set reaches the unit-disc rim");
        }

    const bool haveSub = sub.count() > 0;
    const std::vector<double> d2 = haveSub ? edt2(sub) : std::vector<double>();

    EtaBarResult out;
    double filtered = kInf, unfiltered = kInf;
    for (int j = 0; j < domain.ny; ++j)
        for (int i = 0; i < domain.nx; ++i) {
            if (!inDisc(i, j)) continue;
            const std::size_t idx = domain.plane_index(i, j);
            unfiltered = std::min(unfiltered, g[idx]);
            const double dist = haveSub ? std::sqrt(d2[idx]) * domain.h : kInf;
            if (dist > eps) filtered = std::min(filtered, g[idx]);
        }
    if (filtered < kInf) {
        out.value = filtered;
        out.fallback = false;
    } else {
        out.value = unfiltered;
        out.fallback = true;
    }
    return out;
}

std::vector<double> distance_grid(const std::vector<std::array<double, 2>>& K,
                                  const SolverDomain& domain) {
    if (K.empty()) throw std::invalid_argument("distance to an empty point set");
    std::vector<double> d(static_cast<std::size_t>(domain.plane_count()));
    for (int j = 0; j < domain.ny; ++j)
        for (int i = 0; i < domain.nx; ++i) {
            const double x = domain.x(i), y = domain.y(j);
            double best = kInf;
            for (const auto& p : K) best = std::min(best, std::hypot(x - p[0], y - p[1]));
            d[domain.plane_index(i, j)] = best;
        }
    return d;
}

ThinSet erode4(const ThinSet& s) {
    ThinSet out = make_thin_set(s.domain);
    for (int j = 0; j < s.domain.ny; ++j)
        for (int i = 0; i < s.domain.nx; ++i) {
            if (!s.at(i, j)) continue;
            auto in = [&](int ii, int jj) {
                return ii >= 0 && ii < s.domain.nx && jj >= 0 && jj < s.domain.ny &&
                       s.at(ii, jj);
            };
            const bool keep = in(i - 1, j) && in(i + 1, j) &&
                              (s.domain.n == 1 || (in(i, j - 1) && in(i, j + 1)));
            out.set(i, j, keep);
        }
    return out;
}

ThinSet raster_boundary(const ThinSet& s) { return set_diff(s, erode4(s)); }

ThinSet neighborhood(const ThinSet& s, double radius) {
    if (!(radius >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
    ThinSet out = make_thin_set(s.domain);
    if (s.count() == 0) return out;
    const std::vector<double> d2 = edt2(s);
    const double r2 = (radius / s.domain.h) * (radius / s.domain.h) * (1.0 + 1e-12);
    for (std::size_t i = 0; i < out.mask.size(); ++i) out.mask[i] = d2[i] <= r2;
    return out;
}

ThinSet set_and(const ThinSet& a, const ThinSet& b) {
    check_same_domain(a, b);
    ThinSet out = make_thin_set(a.domain);
    for (std::size_t i = 0; i < out.mask.size(); ++i) out.mask[i] = a.mask[i] && b.mask[i];
    return out;
}

ThinSet set_diff(const ThinSet& a, const ThinSet& b) {
    check_same_domain(a, b);
    ThinSet out = make_thin_set(a.domain);
    for (std::size_t i = 0; i < out.mask.size(); ++i) out.mask[i] = a.mask[i] && !b.mask[i];
    return out;
}

bool subset_of(const ThinSet& a, const ThinSet& b) {
    check_same_domain(a, b);
    for (std::size_t i = 0; i < a.mask.size(); ++i)
        if (a.mask[i] && !b.mask[i]) return false;
    return true;
}

ThinSet raster_points(const std::vector<std::array<double, 2>>& pts,
                      const SolverDomain& domain) {
    ThinSet out = make_thin_set(domain);
    for (const auto& p : pts) {
        int i = static_cast<int>(std::lround((p[0] + domain.L) / domain.h));
        i = std::clamp(i, 0, domain.nx - 1);
        int j = 0;
        if (domain.n == 2) {
            j = static_cast<int>(std::lround((p[1] + domain.L) / domain.h));
            j = std::clamp(j, 0, domain.ny - 1);
        }
        out.set(i, j, true);
    }
    return out;
}

ThinSet raster_sublevel(const Polynomial& p, double level, const SolverDomain& domain) {
    if (p.dim() != domain.n)
        throw std::invalid_argument("polynomial dimension does not match the plane");
    ThinSet out = make_thin_set(domain);
    std::vector<double> x(p.dim());
    for (int j = 0; j < domain.ny; ++j)
        for (int i = 0; i < domain.nx; ++i) {
            x[0] = domain.x(i);
            if (p.dim() == 2) x[1] = domain.y(j);
            out.set(i, j, p.eval(x) <= level);
        }
    return out;
}

ThinSet raster_disc(double cx, double cy, double r, const SolverDomain& domain) {
    ThinSet out = make_thin_set(domain);
    const double r2 = r * r * (1.0 + 1e-12);
    for (int j = 0; j < domain.ny; ++j)
        for (int i = 0; i < domain.nx; ++i) {
            const double dx = domain.x(i) - cx, dy = domain.y(j) - cy;
            out.set(i, j, dx * dx + dy * dy <= r2);
        }
    return out;
}

void write_pgm(const std::string& path, const ThinSet& s) {
    write_pgm_overlay(path, s, make_thin_set(s.domain));
}

void write_pgm_overlay(const std::string& path, const ThinSet& base, const ThinSet& overlay) {
    check_same_domain(base, overlay);
    FILE* f = open_or_throw(path, "wb");
    std::fprintf(f, "P2\n%d %d\n255\n", base.domain.nx, base.domain.ny);
    for (int j = base.domain.ny - 1; j >= 0; --j) {
        for (int i = 0; i < base.domain.nx; ++i) {
            const int v = overlay.at(i, j) ? 128 : (base.at(i, j) ? 255 : 0);
            std::fprintf(f, "%d%c", v, i + 1 == base.domain.nx ? '\n' : ' ');
        }
    }
    std::fclose(f);
}

void write_mask_csv(const std::string& path, const ThinSet& s) {
    FILE* f = open_or_throw(path, "wb");
    std::fprintf(f, "i,j,x,y,in\n");
    for (int i = 0; i < s.domain.nx; ++i)
        for (int j = 0; j < s.domain.ny; ++j)
            std::fprintf(f, "%d,%d,%.17g,%.17g,%d\n", i, j, s.domain.x(i), s.domain.y(j),
                         s.at(i, j) ? 1 : 0);
    std::fclose(f);
}

}  // namespace thinfree
