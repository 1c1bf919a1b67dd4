// Pipeline orchestration: polynomial -> obstacle spec -> solve -> plane sets
// -> predicted checks.  Reports carry no timing and have a fixed key order,
// so a repeated run is byte-identical; wall-clock lives in runs.csv only.

#include "thinfree/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

namespace thinfree {

namespace {

// Positivity classification threshold.  Contact clamps the solution to the
// obstacle exactly, so anything a few solver tolerances above zero counts
// as genuinely positive.
constexpr double kTauPositivity = 1e-6;

// Relaxation factors tuned for the two pinned grids of the named examples
// (129x129x65 at L=4 and 193x193x97 at L=6).
constexpr double kOmegaDesk = 1.95;
constexpr double kOmegaTall = 1.968;

// Reported in distance rows when a raster is empty: larger than any plane
// distance the box can produce, but finite so the JSON stays clean.
double empty_distance(const PipelineParams& params) { return 3.0 * params.L; }

std::string sweep_name(SweepMode m) {
    return m == SweepMode::Lexicographic ? "lexicographic" : "redblack";
}

void push_row(PipelineReport& r, std::string desc, std::string basis, double predicted,
              double measured, bool pass) {
    CheckRow row;
    row.description = std::move(desc);
    row.basis = std::move(basis);
    row.predicted = predicted;
    row.measured = measured;
    row.pass = pass;
    r.checks.push_back(std::move(row));
}

void append_params(ordered_json& j, const PipelineParams& params, double band) {
    j["L"] = params.L;
    j["h"] = params.h;
    j["omega"] = params.omega;
    j["tol"] = params.tol;
    j["tau_c"] = band;
    j["max_sweeps"] = params.max_sweeps;
    j["sweep"] = sweep_name(params.sweep);
    j["threads"] = params.threads;
}

struct PlaneProblem {
    SolverDomain domain;
    ObstacleProblemSpec spec;
};

// Internal solves run a factor 20 below the requested tolerance so the
// 10*tol row slacks measure the construction, not leftover iteration error.
PlaneProblem setup_plane_problem(int n, const PipelineParams& params) {
    PlaneProblem p;
    p.domain = build_domain(n, params.L, params.h);
    p.spec = make_spec(p.domain);
    p.spec.omega = params.omega;
    p.spec.tol = params.tol / 20.0;
    if (params.max_sweeps > 0) p.spec.max_sweeps = params.max_sweeps;
    return p;
}

void fill_plane_obstacle(PlaneProblem& p, const std::function<double(double, double)>& value) {
    const SolverDomain& d = p.domain;
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i)
            p.spec.obstacle[d.plane_index(i, j)] = value(d.x(i), d.y(j));
}

SolutionField solve_problem(const PlaneProblem& p, const PipelineParams& params, const char* what) {
    SolveOptions opts;
    opts.sweep = params.sweep;
    opts.threads = params.threads;
    SolutionField field = solve_thin_obstacle(p.spec, opts);
    if (!field.converged)
        throw std::runtime_error(std::string(what) + " solve did not converge within the sweep budget");
    return field;
}

double min_value(const SolutionField& f) {
    return *std::min_element(f.values.begin(), f.values.end());
}

double max_value(const SolutionField& f) {
    return *std::max_element(f.values.begin(), f.values.end());
}

/// Largest |u - reference| over interior nodes one layer inside the outer faces.
double ring_max(const SolutionField& f, const std::function<double(int, int, int)>& ref) {
    const SolverDomain& d = f.domain;
    double worst = 0.0;
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                if (d.on_boundary(i, j, k)) continue;
                const bool shell = i == 1 || i == d.nx - 2 || k == d.nz - 2 ||
                                   (d.n == 2 && (j == 1 || j == d.ny - 2));
                if (!shell) continue;
                worst = std::max(worst,
                                 std::abs(f.values[d.index(i, j, k)] - ref(i, j, k)));
            }
    return worst;
}

void add_artifact(PipelineReport& report, const std::string& path) {
    report.artifacts.push_back(path);
}

void write_set_artifacts(PipelineReport& report, const PipelineParams& params, const ThinSet& s,
                         const SolutionField& field, const ObstacleProblemSpec& spec,
                         const char* suffix) {
    if (params.artifact_dir.empty()) return;
    std::filesystem::create_directories(params.artifact_dir);
    const std::string base = params.artifact_dir + "/" + report.name;
    const std::string pgm = base + "_" + suffix + ".pgm";
    const std::string csv = base + "_plane.csv";
    write_pgm(pgm, s);
    write_plane_csv(csv, field, spec.obstacle);
    add_artifact(report, pgm);
    add_artifact(report, csv);
}

// --- compact-contact core ---------------------------------------------------

struct CompactOutcome {
    PlaneProblem problem;
    SolutionField field;
    ThinSetPair sets;
    double band = 0.0;
};

/// Shared tail of every compact-contact style run: solve with plane obstacle
/// -p and zero boundary data, extract the plane sets, attach the generic rows.
CompactOutcome compact_core(PipelineReport& report, int n,
                            const std::function<double(double, double)>& pvalue,
                            const PipelineParams& params) {
    CompactOutcome out;
    out.band = contact_band(params);
    out.problem = setup_plane_problem(n, params);
    fill_plane_obstacle(out.problem, [&](double x, double y) { return -pvalue(x, y); });
    out.field = solve_problem(out.problem, params, "compact-contact");
    out.sets = extract_thin_sets(out.field, out.problem.spec, out.band);

    const SolverDomain& d = out.problem.domain;
    const double slack = 10.0 * params.tol;

    std::int64_t band_violations = 0;
    double min_interior_p = std::numeric_limits<double>::infinity();
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            if (!d.plane_interior(i, j)) continue;
            const double p = pvalue(d.x(i), d.y(j));
            min_interior_p = std::min(min_interior_p, p);
            if (out.sets.contact.at(i, j) && p > out.band + slack) ++band_violations;
        }
    push_row(report,
             "contact nodes where the obstacle polynomial exceeds the contact band (count, at most)",
             "at contact the solution equals -p yet stays nonnegative by the minimum principle, "
             "so p cannot exceed the classification band there",
             0.0, static_cast<double>(band_violations), band_violations == 0);

    const bool has_negative = min_interior_p < 0.0;
    const bool has_contact = out.sets.contact.count() > 0;
    push_row(report,
             "disagreement between contact nonemptiness and raster negativity of p (count, at most)",
             "with p nonnegative the zero field solves the system and touches only inside the "
             "shallow band; with p negative somewhere a contact-free solution would be harmonic "
             "with zero boundary data yet above a positive obstacle",
             0.0, (has_negative == has_contact) ? 0.0 : 1.0, has_negative == has_contact);

    const double neg_excursion = std::max(0.0, -min_value(out.field));
    push_row(report, "largest negative excursion of the solution (at most)",
             "plane rows of the complementarity system are superharmonic and the boundary data "
             "vanish, so the discrete minimum principle keeps the solution nonnegative",
             slack, neg_excursion, neg_excursion <= slack);

    const double ring = ring_max(out.field, [](int, int, int) { return 0.0; });
    push_row(report, "largest solution magnitude on the outermost interior shell (at most)",
             "beyond the contact region the solution is dominated by a capacity potential "
             "decaying like the fundamental solution, leaving at most 2/L at the faces",
             report.truncation_budget, ring, ring <= report.truncation_budget + slack);
    return out;
}

void fill_compact_summary(PipelineReport& report, const CompactOutcome& out) {
    report.summary["contact_count"] = out.sets.contact.count();
    report.summary["positivity_count"] = out.sets.positivity.count();
    report.summary["unclassified"] = out.sets.unclassified;
    report.summary["components"] =
        static_cast<std::int64_t>(connected_components(out.sets.contact).size());
    report.summary["sweeps_used"] = out.field.sweeps_used;
    report.summary["min_value"] = min_value(out.field);
    report.summary["max_value"] = max_value(out.field);
}

PipelineReport compact_report(const std::string& name, const Polynomial& pbar,
                              const PipelineParams& params, CompactOutcome* outcome) {
    const int n = pbar.dim();
    if (n != 1 && n != 2)
        throw std::invalid_argument("compact contact expects a plane polynomial in 1 or 2 variables");
    const ClassVerdict verdict = negativity_bounded(pbar);
    if (verdict.status != Negativity::Bounded)
        throw std::invalid_argument("compact contact needs a polynomial whose negativity set is bounded");

    PipelineReport report;
    report.name = name;
    report.truncation_budget = 2.0 / params.L;
    report.inputs["op"] = "compact_contact";
    report.inputs["poly"] = print_poly(pbar);
    report.inputs["n"] = n;
    append_params(report.inputs, params, contact_band(params));

    std::vector<double> pt(n);
    auto pv = [&](double x, double y) {
        pt[0] = x;
        if (n == 2) pt[1] = y;
        return pbar.eval(pt);
    };
    CompactOutcome out = compact_core(report, n, pv, params);
    fill_compact_summary(report, out);
    report.summary["negativity_radius"] = verdict.radius;
    write_set_artifacts(report, params, out.sets.contact, out.field, out.problem.spec, "contact");
    if (outcome) *outcome = std::move(out);
    return report;
}

// --- bounded positivity -----------------------------------------------------

struct PositivityOutcome {
    PlaneProblem problem;
    SolutionField field;
    SolutionField bump;
    ThinSetPair sets;
    double rho = 0.0, c_rho = 0.0, c_q = 0.0, kappa = 0.0;
};

PipelineReport positivity_report(const std::string& name, const Polynomial& qbar,
                                 const PipelineParams& params, PositivityOutcome* outcome) {
    const int n = qbar.dim();
    if (n != 1 && n != 2)
        throw std::invalid_argument("bounded positivity expects a plane polynomial in 1 or 2 variables");
    const ClassVerdict verdict = negativity_bounded(qbar);
    if (verdict.status != Negativity::Bounded)
        throw std::invalid_argument("bounded positivity needs q with a bounded negativity set");

    PipelineReport report;
    report.name = name;
    report.truncation_budget = 2.0 / params.L;
    report.inputs["op"] = "bounded_positivity";
    report.inputs["poly"] = print_poly(qbar);
    report.inputs["n"] = n;
    append_params(report.inputs, params, kTauPositivity);

    PositivityOutcome out;
    out.problem = setup_plane_problem(n, params);
    const SolverDomain& d = out.problem.domain;

    const Polynomial Q = harmonic_extension(qbar, Parity::Odd);
    std::vector<double> Qv(static_cast<std::size_t>(d.num_nodes()));
    {
        std::vector<double> pt(n + 1);
        for (int k = 0; k < d.nz; ++k)
            for (int j = 0; j < d.ny; ++j)
                for (int i = 0; i < d.nx; ++i) {
                    pt[0] = d.x(i);
                    if (n == 2) pt[1] = d.y(j);
                    pt[n] = d.z(k);
                    Qv[d.index(i, j, k)] = Q.eval(pt);
                }
    }
    {
        std::size_t b = 0;
        for (int k = 0; k < d.nz; ++k)
            for (int j = 0; j < d.ny; ++j)
                for (int i = 0; i < d.nx; ++i)
                    if (d.on_boundary(i, j, k)) out.problem.spec.boundary[b++] = -Qv[d.index(i, j, k)];
    }
    out.field = solve_problem(out.problem, params, "bounded-positivity");

    // Bump barrier: obstacle 1 on B_rho, cosine-squared taper to rho+1.
    out.rho = std::max(1.0, verdict.radius);
    PlaneProblem bump_problem = setup_plane_problem(n, params);
    const double rho = out.rho;
    fill_plane_obstacle(bump_problem, [rho](double x, double y) {
        const double r = std::sqrt(x * x + y * y);
        if (r <= rho) return 1.0;
        if (r >= rho + 1.0) return 0.0;
        const double c = std::cos(0.5 * M_PI * (r - rho));
        return c * c;
    });
    out.bump = solve_problem(bump_problem, params, "bump barrier");

    // One-sided plane slopes: the bump solution must fall off the plane at a
    // definite rate under the contact plateau, and the odd extension rises at
    // most c_q; kappa = c_q / c_rho then makes -Q + kappa*Phi a supersolution
    // row by row.
    double c_rho = std::numeric_limits<double>::infinity();
    double c_q = 0.0;
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            if (!d.plane_interior(i, j)) continue;
            const double x = d.x(i), y = d.y(j);
            const double up = -Qv[d.index(i, j, 1)] / params.h;
            c_q = std::max(c_q, up);
            if (x * x + y * y <= rho * rho) {
                const double slope = (out.bump.values[d.index(i, j, 0)] -
                                      out.bump.values[d.index(i, j, 1)]) / params.h;
                c_rho = std::min(c_rho, slope);
            }
        }
    if (!(c_rho > 0.0))
        throw std::runtime_error("bump solution lost its one-sided plane slope; inconsistent solve");
    out.c_rho = c_rho;
    out.c_q = c_q;
    out.kappa = c_q / c_rho;

    const double slack = 10.0 * params.tol;
    double below = 0.0, above = 0.0;
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                const std::size_t id = d.index(i, j, k);
                const double ref = -Qv[id];
                below = std::max(below, ref - out.field.values[id]);
                above = std::max(above, out.field.values[id] -
                                            (ref + out.kappa * out.bump.values[id]));
            }
    push_row(report, "largest drop of the solution below the odd-extension barrier (at most)",
             "the solution matches the barrier on the outer faces and dominates it on the plane, "
             "where the barrier vanishes while the obstacle pins the solution at or above zero; "
             "the maximum principle propagates the ordering inward",
             slack, std::max(0.0, below), below <= slack);
    push_row(report, "largest rise of the solution above the barrier plus kappa times the bump (at most)",
             "the shifted barrier is a discrete supersolution: its plane rows stay superharmonic "
             "once kappa clears the measured one-sided slopes, and it dominates both the boundary "
             "data and the zero obstacle",
             slack, std::max(0.0, above), above <= slack);

    out.sets = extract_thin_sets(out.field, out.problem.spec, kTauPositivity);
    double r0 = 0.0;
    std::int64_t missing = 0;
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            const double x = d.x(i), y = d.y(j);
            if (out.sets.positivity.at(i, j)) r0 = std::max(r0, std::sqrt(x * x + y * y));
            if (!d.plane_interior(i, j)) continue;
            std::vector<double> pt(n);
            pt[0] = x;
            if (n == 2) pt[1] = y;
            if (qbar.eval(pt) < 0.0 && !out.sets.positivity.at(i, j)) ++missing;
        }
    push_row(report, "radius of the smallest origin-centred ball holding the positivity set (at most)",
             "the negative part of q is compactly supported, so far plane nodes fall into contact "
             "and only a bounded region can stay positive",
             0.5 * params.L, r0, r0 < 0.5 * params.L);
    push_row(report, "plane nodes with q negative that miss the positivity set (count, at most)",
             "contact where q is negative would make the plane row subharmonic: the neighbours "
             "above the plane stay positive by comparison with the barrier",
             0.0, static_cast<double>(missing), missing == 0);

    const double ring = ring_max(out.field, [&](int i, int j, int k) {
        return -Qv[d.index(i, j, k)];
    });
    push_row(report, "largest deviation from the odd-extension barrier on the outermost shell (at most)",
             "the far field of the solution is the barrier plus a capacity potential of the "
             "contact pressure, which has decayed to the truncation budget at the faces",
             report.truncation_budget, ring, ring <= report.truncation_budget + slack);

    report.summary["rho"] = out.rho;
    report.summary["c_rho"] = out.c_rho;
    report.summary["c_q"] = out.c_q;
    report.summary["kappa"] = out.kappa;
    report.summary["positivity_count"] = out.sets.positivity.count();
    report.summary["contact_count"] = out.sets.contact.count();
    report.summary["unclassified"] = out.sets.unclassified;
    report.summary["sweeps_used"] = out.field.sweeps_used;
    report.summary["bump_sweeps_used"] = out.bump.sweeps_used;
    report.summary["min_value"] = min_value(out.field);
    report.summary["max_value"] = max_value(out.field);
    write_set_artifacts(report, params, out.sets.positivity, out.field, out.problem.spec,
                        "positivity");
    if (outcome) *outcome = std::move(out);
    return report;
}

// --- prescribed zero sets ---------------------------------------------------

PipelineReport polysets_report(const std::string& name, const Polynomial& f, double eps,
                               KChoice variant, const PipelineParams& params,
                               CompactOutcome* outcome, ThinSet* zero_set) {
    if (f.dim() != 2)
        throw std::invalid_argument("polyset pipeline expects a polynomial in two variables");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    const double band = contact_band(params);
    const double slack = 10.0 * params.tol;

    const SolverDomain domain = build_domain(2, params.L, params.h);
    std::vector<double> fv(static_cast<std::size_t>(domain.plane_count()));
    {
        std::vector<double> pt(2);
        double fmin = std::numeric_limits<double>::infinity();
        for (int j = 0; j < domain.ny; ++j)
            for (int i = 0; i < domain.nx; ++i) {
                pt[0] = domain.x(i);
                pt[1] = domain.y(j);
                fv[domain.plane_index(i, j)] = f.eval(pt);
                fmin = std::min(fmin, fv[domain.plane_index(i, j)]);
            }
        if (fmin < -1e-9 * std::max(1.0, f.max_abs_coeff()))
            throw std::invalid_argument("polyset pipeline needs a nonnegative polynomial on the raster");
    }

    int k = 2;
    if (variant == KChoice::FixedK) {
        const int m = f.degree();
        const bool homogeneous = m >= 2 && m % 2 == 0 && (f - f.homogeneous_part(m)).is_zero();
        k = homogeneous ? m : 2;
    } else {
        while (k <= 64 && 1.0 / rho_bar(k, 2) > 1.0 + eps) k += 2;
        if (k > 64)
            throw std::invalid_argument("eps too small: the rescaling radius cannot reach 1+eps by exponent 64");
    }
    const double rho = rho_bar(k, 2);

    const double ztol = 1e-12 * std::max(1.0, f.max_abs_coeff());
    ThinSet zset = raster_sublevel(f, ztol, domain);
    ThinSet zone = neighborhood(zset, eps);

    // Raise beta until the shifted profile is safely positive outside the
    // eps-collar of the zero set, so contact cannot survive there.
    double beta = 1.0;
    bool settled = false;
    std::int64_t blockers = 0;
    double block_x = 0.0, block_y = 0.0;
    for (; beta <= 1048576.0; beta *= 2.0) {
        blockers = 0;
        for (int j = 0; j < domain.ny; ++j)
            for (int i = 0; i < domain.nx; ++i) {
                if (!domain.plane_interior(i, j)) continue;
                if (zone.at(i, j)) continue;
                const double x = domain.x(i), y = domain.y(j);
                const double s = std::pow(rho * rho * (x * x + y * y), 0.5 * k) - 1.0 +
                                 beta * fv[domain.plane_index(i, j)];
                if (s <= band + slack) {
                    if (blockers == 0) { block_x = x; block_y = y; }
                    ++blockers;
                }
            }
        if (blockers == 0) { settled = true; break; }
    }
    if (!settled) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "beta ladder exhausted at 2^20 with %lld raster nodes still blocking, first at (%g, %g)",
                      static_cast<long long>(blockers), block_x, block_y);
        throw std::runtime_error(msg);
    }

    PipelineReport report;
    report.name = name;
    report.truncation_budget = 2.0 / params.L;
    report.inputs["op"] = "prop_polysets";
    report.inputs["poly"] = print_poly(f);
    report.inputs["eps"] = eps;
    report.inputs["variant"] = variant == KChoice::FixedK ? "fixed_k" : "large_k";
    report.inputs["n"] = 2;
    append_params(report.inputs, params, band);

    std::vector<double> pt(2);
    auto sval = [&](double x, double y) {
        pt[0] = x;
        pt[1] = y;
        return std::pow(rho * rho * (x * x + y * y), 0.5 * k) - 1.0 + beta * f.eval(pt);
    };
    CompactOutcome out = compact_core(report, 2, sval, params);

    ThinSet inner_target = set_and(zset, raster_disc(0.0, 0.0, 1.0, domain));
    std::int64_t missing = 0;
    for (int j = 0; j < domain.ny; ++j)
        for (int i = 0; i < domain.nx; ++i)
            if (inner_target.at(i, j) && !out.sets.contact.at(i, j)) ++missing;
    push_row(report, "zero-set raster nodes inside the unit ball missing from contact (count, at most)",
             "the rescaled radial profile alone keeps the whole unit ball in contact, and raising "
             "beta leaves the obstacle untouched on the zero set of f",
             0.0, static_cast<double>(missing), missing == 0);

    const double r_out = std::pow(1.0 + band + slack, 1.0 / k) / rho;
    ThinSet allowed = set_and(zone, raster_disc(0.0, 0.0, r_out, domain));
    std::int64_t escapes = 0;
    for (int j = 0; j < domain.ny; ++j)
        for (int i = 0; i < domain.nx; ++i)
            if (out.sets.contact.at(i, j) && !allowed.at(i, j)) ++escapes;
    push_row(report, "contact nodes outside the eps-collar of the zero set within radius 1/rho (count, at most)",
             "past the chosen beta the shifted profile exceeds the band outside the collar, and "
             "the radial term alone seals everything beyond radius 1/rho",
             0.0, static_cast<double>(escapes), escapes == 0);

    fill_compact_summary(report, out);
    report.summary["k"] = k;
    report.summary["rho_bar"] = rho;
    report.summary["beta"] = beta;
    report.summary["zero_count"] = zset.count();
    write_set_artifacts(report, params, out.sets.contact, out.field, out.problem.spec, "contact");
    if (!params.artifact_dir.empty()) {
        const std::string overlay = params.artifact_dir + "/" + report.name + "_overlay.pgm";
        write_pgm_overlay(overlay, out.sets.contact, zset);
        add_artifact(report, overlay);
    }
    if (zero_set) *zero_set = std::move(zset);
    if (outcome) *outcome = std::move(out);
    return report;
}

// --- prescribed sublevel sets -----------------------------------------------

struct SubsetsOutcome {
    SolverDomain domain;
    ObstacleProblemSpec spec;
    SolutionField field;
    ThinSet contact;
    int final_k = 0;
    bool covered = false;
};

/// Ladder of obstacle solves with the family 1 - ((f+1)/(1-delta/2))^(2k);
/// appends the per-rung and final inclusion rows to `report`.
SubsetsOutcome subsets_core(PipelineReport& report, const Polynomial& f, double delta,
                            const PipelineParams& params) {
    const int n = f.dim();
    if (n != 1 && n != 2)
        throw std::invalid_argument("sublevel pipeline expects a polynomial in 1 or 2 variables");
    if (!(delta > 0.0 && delta <= 0.5))
        throw std::invalid_argument("delta must lie in (0, 1/2]");
    const double band = contact_band(params);
    const double slack = 10.0 * params.tol;

    SubsetsOutcome out;
    out.domain = build_domain(n, params.L, params.h);
    const SolverDomain& d = out.domain;
    std::vector<double> fv(static_cast<std::size_t>(d.plane_count()));
    {
        std::vector<double> pt(n);
        double fmin = std::numeric_limits<double>::infinity();
        std::int64_t outside_violations = 0;
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                pt[0] = d.x(i);
                if (n == 2) pt[1] = d.y(j);
                const double v = f.eval(pt);
                fv[d.plane_index(i, j)] = v;
                fmin = std::min(fmin, v);
                if (d.plane_interior(i, j) && pt[0] * pt[0] + (n == 2 ? pt[1] * pt[1] : 0.0) > 1.0 + 1e-12 &&
                    v <= 0.0)
                    ++outside_violations;
            }
        if (fmin < -1.0 - 1e-9)
            throw std::invalid_argument("sublevel hypothesis failure: f dips below -1 on the raster");
        if (outside_violations > 0)
            throw std::invalid_argument("sublevel hypothesis failure: f must be positive outside the unit ball on the raster");
    }

    const double delta_int = 0.5 * delta;
    const ThinSet target = raster_sublevel(f, -delta, d);
    std::vector<double> prev;
    std::int64_t missing = 0;
    for (int k = 2; k <= 64; k += 2) {
        PlaneProblem prob = setup_plane_problem(n, params);
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                const std::size_t pi = d.plane_index(i, j);
                // clamp very negative obstacle values: the solution is
                // nonnegative, so anything below -2 never binds, and the clamp
                // keeps the far-field powers finite
                prob.spec.obstacle[pi] = std::max(p2k_value(fv[pi], delta_int, k), -2.0);
            }
        SolutionField w = solve_problem(prob, params, "sublevel ladder");
        const std::string rung = "rung k=" + std::to_string(k);

        const double wmax = max_value(w);
        push_row(report, rung + ": largest solution value (at most)",
                 "the obstacle family never exceeds one and the boundary data vanish, so the "
                 "discrete maximum principle caps the solution at one",
                 1.0, wmax, wmax <= 1.0 + slack);

        const double ring = ring_max(w, [](int, int, int) { return 0.0; });
        push_row(report, rung + ": largest value on the outermost interior shell (at most)",
                 "the solution is bounded by the capacity potential of the unit ball, which has "
                 "decayed to the truncation budget at the faces",
                 report.truncation_budget, ring, ring <= report.truncation_budget + slack);

        if (!prev.empty()) {
            double viol = 0.0;
            for (std::size_t id = 0; id < w.values.size(); ++id)
                viol = std::max(viol, prev[id] - w.values[id]);
            push_row(report, rung + ": largest monotonicity violation against the previous rung (at most)",
                     "raising the exponent raises the positive part of the obstacle family "
                     "pointwise while solutions ignore the negative part, so the ladder is "
                     "nodewise nondecreasing",
                     0.0, viol, viol <= slack);
        }
        prev = w.values;

        out.contact = extract_thin_sets(w, prob.spec, band).contact;
        missing = 0;
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i)
                if (target.at(i, j) && !out.contact.at(i, j)) ++missing;
        out.field = std::move(w);
        out.spec = std::move(prob.spec);
        out.final_k = k;
        if (missing == 0) { out.covered = true; break; }
    }

    push_row(report, "nodes with f <= -delta missing from the final contact raster (count, at most)",
             "the ladder stops only once the deep sublevel set is swallowed by contact; an "
             "exhausted ladder leaves the count positive",
             0.0, static_cast<double>(missing), missing == 0);

    std::int64_t outside = 0;
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i)
            if (out.contact.at(i, j) && fv[d.plane_index(i, j)] > 0.0) ++outside;
    push_row(report, "final contact nodes where f is positive (count, at most)",
             "contact pins the solution to the obstacle, which is nonnegative only where f sits "
             "below the band shift; for the chosen delta that region lies inside {f < 0}",
             0.0, static_cast<double>(outside), outside == 0);

    report.summary["ladder_final_k"] = out.final_k;
    report.summary["ladder_covered"] = out.covered;
    report.summary["target_count"] = target.count();
    report.summary["contact_count"] = out.contact.count();
    report.summary["components"] =
        static_cast<std::int64_t>(connected_components(out.contact).size());
    report.summary["sweeps_used"] = out.field.sweeps_used;
    report.summary["max_value"] = max_value(out.field);
    return out;
}

PipelineParams pinned_params(const PipelineParams& user) {
    PipelineParams p;
    p.omega = kOmegaDesk;
    p.artifact_dir = user.artifact_dir;
    return p;
}

std::string format_radius(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r);
    return buf;
}

}  // namespace

// --- public surface ---------------------------------------------------------

bool PipelineReport::pass() const {
    for (const CheckRow& c : checks)
        if (!c.pass) return false;
    return true;
}

ordered_json PipelineReport::to_json() const {
    ordered_json j;
    j["name"] = name;
    j["inputs"] = inputs;
    j["summary"] = summary;
    j["truncation_budget"] = truncation_budget;
    ordered_json rows = ordered_json::array();
    for (const CheckRow& c : checks) {
        ordered_json r;
        r["description"] = c.description;
        r["basis"] = c.basis;
        r["predicted"] = c.predicted;
        r["measured"] = c.measured;
        r["pass"] = c.pass;
        rows.push_back(std::move(r));
    }
    j["checks"] = std::move(rows);
    j["artifacts"] = artifacts;
    j["pass"] = pass();
    return j;
}

std::string PipelineReport::to_string() const { return to_json().dump(2) + "\n"; }

double contact_band(const PipelineParams& params) {
    if (params.tau_c > 0.0) return params.tau_c;
    return 10.0 * params.h * params.h;
}

double rho_bar(int k, int n) {
    if (k < 2 || n < 2) throw std::invalid_argument("rho_bar needs k >= 2 and n >= 2");
    const double kappa = static_cast<double>(k) / (n - 1);
    const double lead = std::pow(kappa, -1.0 / ((n - 1) * (kappa + 1.0)));
    const double inner = std::pow(kappa, -kappa / (kappa + 1.0)) + std::pow(kappa, 1.0 / (kappa + 1.0));
    return lead * std::pow(inner, -1.0 / ((n - 1) * kappa));
}

namespace {

// Minimum of A r^(1-n) - 1 + r^k over r > 0, located by bisecting the
// monotone radial derivative; also reports the argmin.
double profile_min(double A, int k, int n, double* argmin) {
    double lo = 1e-12, hi = 8.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double slope = A * (1.0 - n) * std::pow(mid, -n) + k * std::pow(mid, k - 1);
        (slope < 0.0 ? lo : hi) = mid;
    }
    const double r = 0.5 * (lo + hi);
    if (argmin) *argmin = r;
    return A * std::pow(r, 1.0 - n) - 1.0 + std::pow(r, k);
}

}  // namespace

double rho_bar_oracle(int k, int n) {
    if (k < 2 || n < 2) throw std::invalid_argument("rho_bar_oracle needs k >= 2 and n >= 2");
    // At A -> 0 the radial profile dips to -1; at A = 1 it is nonnegative
    // (r^(1-n) > 1 covers the dip for r < 1, r^k > 1 for r > 1).  Bisect for
    // the critical level where the minimum just vanishes.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (profile_min(mid, k, n, nullptr) < 0.0 ? lo : hi) = mid;
    }
    double argmin = 0.0;
    profile_min(0.5 * (lo + hi), k, n, &argmin);
    return argmin;
}

PipelineReport run_compact_contact(const Polynomial& pbar, const PipelineParams& params) {
    return compact_report("compact_contact", pbar, params, nullptr);
}

PipelineReport run_bounded_positivity(const Polynomial& qbar, const PipelineParams& params) {
    return positivity_report("bounded_positivity", qbar, params, nullptr);
}

PipelineReport run_prop_polysets(const Polynomial& f, double eps, KChoice variant,
                                 const PipelineParams& params) {
    return polysets_report("prop_polysets", f, eps, variant, params, nullptr, nullptr);
}

PipelineReport run_prop_subsets(const Polynomial& f, double delta,
                                const PipelineParams& params) {
    PipelineReport report;
    report.name = "prop_subsets";
    report.truncation_budget = 2.0 / params.L;
    report.inputs["op"] = "prop_subsets";
    report.inputs["poly"] = print_poly(f);
    report.inputs["delta"] = delta;
    report.inputs["n"] = f.dim();
    append_params(report.inputs, params, contact_band(params));
    SubsetsOutcome out = subsets_core(report, f, delta, params);
    write_set_artifacts(report, params, out.contact, out.field, out.spec, "contact");
    return report;
}

PipelineReport run_thm_approx(const std::vector<std::array<double, 2>>& K, double eps,
                              const PipelineParams& params) {
    if (K.empty()) throw std::invalid_argument("target point set must be nonempty");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");

    double max_norm = 0.0;
    for (const auto& p : K) max_norm = std::max(max_norm, std::hypot(p[0], p[1]));
    const double prescale = max_norm > 0.25 ? 0.25 / max_norm : 1.0;
    std::vector<std::array<double, 2>> Ks = K;
    if (prescale != 1.0)
        for (auto& p : Ks) { p[0] *= prescale; p[1] *= prescale; }

    PipelineReport report;
    report.name = "thm_approx";
    report.truncation_budget = 2.0 / params.L;
    report.inputs["op"] = "thm_approx";
    {
        ordered_json pts = ordered_json::array();
        for (const auto& p : K) pts.push_back(ordered_json::array({p[0], p[1]}));
        report.inputs["points"] = std::move(pts);
    }
    report.inputs["eps"] = eps;
    report.inputs["prescale"] = prescale;
    report.inputs["n"] = 2;
    append_params(report.inputs, params, contact_band(params));

    const SolverDomain domain = build_domain(2, params.L, params.h);
    const std::vector<double> dist = distance_grid(Ks, domain);
    const ThinSet Kr = raster_points(Ks, domain);

    // Clearance of the target: minimum raster distance over nodes more than
    // eps away from the rasterised targets.  The shift by the rasterisation
    // offset lets the sublevel-based helper see the target nodes as its zero
    // set even when the points sit between nodes.
    double d_off = 0.0;
    for (int j = 0; j < domain.ny; ++j)
        for (int i = 0; i < domain.nx; ++i)
            if (Kr.at(i, j)) d_off = std::max(d_off, dist[domain.plane_index(i, j)]);
    std::vector<double> g = dist;
    for (double& v : g) v -= d_off;
    const EtaBarResult eb = eta_bar(domain, g, eps);
    const double eta = eb.value + d_off;

    // Fit the raster distance field on the unit-disc raster, raising the
    // degree until the residual clears a quarter of eta.
    std::vector<std::vector<double>> pts;
    std::vector<double> vals;
    for (int j = 0; j < domain.ny; ++j)
        for (int i = 0; i < domain.nx; ++i) {
            const double x = domain.x(i), y = domain.y(j);
            if (x * x + y * y > 1.0 + 1e-12) continue;
            pts.push_back({x, y});
            vals.push_back(dist[domain.plane_index(i, j)]);
        }
    FitResult fit;
    for (int deg = 2; deg <= 10; deg += 2) {
        fit = fit_distance_poly(pts, vals, deg);
        if (fit.max_residual <= 0.25 * eta) break;
    }
    push_row(report, "largest distance-fit residual over the unit-disc raster (at most)",
             "the shifted polynomial separates target from complement only if the fit stays "
             "within a quarter of the measured clearance",
             0.25 * eta, fit.max_residual, fit.max_residual <= 0.25 * eta);

    // Confinement term: an even power of (3/2)|x| that stays below eta/12 on
    // the half ball yet lifts the field clear of the shifts outside the unit
    // ball.  The shift 2*delta moves the whole zero sublevel set, target
    // included, into the deep sublevel set of the ladder; delta itself is
    // half the measured clearance of the shifted field, which keeps the
    // final raster within eps of {f <= 0}.
    int twok = fit.degree_used + (fit.degree_used % 2 ? 1 : 2);
    while (twok <= 64 && std::pow(0.75, twok) > eta / 12.0) twok += 2;

    const Polynomial x1 = Polynomial::variable(2, 1);
    const Polynomial x2 = Polynomial::variable(2, 2);
    Polynomial fpoly;
    std::vector<double> fvals(static_cast<std::size_t>(domain.plane_count()));
    EtaBarResult clearance;
    double delta = 0.0;
    for (;; twok += 2) {
        if (twok > 64) throw std::runtime_error("confinement exponent search exhausted at 64");
        fpoly = fit.poly + ((x1 * x1 + x2 * x2) * 2.25).pow(twok / 2) -
                Polynomial::constant(2, 2.0 * eta / 3.0);
        std::vector<double> pt(2);
        double fmin = std::numeric_limits<double>::infinity();
        for (int j = 0; j < domain.ny; ++j)
            for (int i = 0; i < domain.nx; ++i) {
                pt[0] = domain.x(i);
                pt[1] = domain.y(j);
                fvals[domain.plane_index(i, j)] = fpoly.eval(pt);
                fmin = std::min(fmin, fvals[domain.plane_index(i, j)]);
            }
        clearance = eta_bar(domain, fvals, eps);
        delta = std::min({0.5, 0.5 * clearance.value, 0.5 * (1.0 + fmin)});
        bool sealed = true;
        for (int j = 0; sealed && j < domain.ny; ++j)
            for (int i = 0; i < domain.nx; ++i) {
                if (!domain.plane_interior(i, j)) continue;
                const double x = domain.x(i), y = domain.y(j);
                if (x * x + y * y <= 1.0 + 1e-12) continue;
                if (fvals[domain.plane_index(i, j)] <= 2.0 * delta) {
                    sealed = false;
                    break;
                }
            }
        if (sealed) break;
    }

    SubsetsOutcome out =
        subsets_core(report, fpoly - Polynomial::constant(2, 2.0 * delta), delta, params);

    std::int64_t k_missing = 0;
    for (int j = 0; j < domain.ny; ++j)
        for (int i = 0; i < domain.nx; ++i)
            if (Kr.at(i, j) && !out.contact.at(i, j)) ++k_missing;
    push_row(report, "target raster nodes missing from the final contact raster (count, at most)",
             "the fitted field at the target points sits well below the applied shift, placing "
             "them in the deep sublevel set that a covered ladder must swallow",
             0.0, static_cast<double>(k_missing), k_missing == 0);

    double d_full, d_bdry;
    if (out.contact.count() == 0) {
        d_full = empty_distance(params);
        d_bdry = empty_distance(params);
    } else {
        d_full = hausdorff(out.contact, Kr);
        const ThinSet gamma = raster_boundary(out.contact);
        const ThinSet bk = raster_boundary(Kr);
        d_bdry = (gamma.count() > 0 && bk.count() > 0) ? hausdorff(gamma, bk)
                                                       : empty_distance(params);
    }
    push_row(report, "Hausdorff distance between the final contact raster and the target raster (at most)",
             "the contact set is squeezed between the deep sublevel set holding the target and "
             "the zero sublevel set inside the clearance collar, both within 2*eps of the target",
             2.0 * eps, d_full, d_full <= 2.0 * eps);
    push_row(report, "Hausdorff distance between the contact boundary raster and the target boundary raster (at most)",
             "the free boundary tracks the rim of the clearance collar around the target, which "
             "stays within 2*eps of the target boundary",
             2.0 * eps, d_bdry, d_bdry <= 2.0 * eps);

    report.summary["eta"] = eta;
    report.summary["eta_fallback"] = eb.fallback;
    report.summary["raster_offset"] = d_off;
    report.summary["fit_degree"] = fit.degree_used;
    report.summary["fit_residual"] = fit.max_residual;
    report.summary["confinement_power"] = twok;
    report.summary["sublevel_clearance"] = clearance.value;
    report.summary["delta"] = delta;
    report.summary["target_nodes"] = Kr.count();

    write_set_artifacts(report, params, out.contact, out.field, out.spec, "contact");
    if (!params.artifact_dir.empty()) {
        const std::string overlay = params.artifact_dir + "/" + report.name + "_overlay.pgm";
        write_pgm_overlay(overlay, out.contact, Kr);
        add_artifact(report, overlay);
    }
    return report;
}

const std::vector<std::string>& named_examples() {
    static const std::vector<std::string> names = {"twoballs", "annulus", "starshaped",
                                                   "globk2",   "globk8",  "cubicq"};
    return names;
}

PipelineReport run_named_example(const std::string& name, const PipelineParams& params) {
    PipelineParams p = pinned_params(params);

    if (name == "globk2" || name == "globk8") {
        const bool quadratic = name == "globk2";
        const Polynomial pbar =
            parse_poly(quadratic ? "x1^2 + x2^2 - 1" : "(x1^2 + x2^2)^4 - 1", 2);
        CompactOutcome out;
        PipelineReport report = compact_report(name, pbar, p, &out);
        const double r_in = quadratic ? 0.50 : rho_bar(8, 2) - 0.08;
        const double r_out = 1.08;
        const SolverDomain& d = out.problem.domain;
        const ThinSet inner = raster_disc(0.0, 0.0, r_in, d);
        const ThinSet outer = raster_disc(0.0, 0.0, r_out, d);
        std::int64_t missing = 0, escapes = 0;
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                if (inner.at(i, j) && !out.sets.contact.at(i, j)) ++missing;
                if (out.sets.contact.at(i, j) && !outer.at(i, j)) ++escapes;
            }
        push_row(report, "ball raster of radius " + format_radius(r_in) + " missing from contact (count, at most)",
                 "the critical rescaling radius of the radial profile keeps a concentric ball in "
                 "contact, reduced by the 0.08 discretization-plus-truncation allowance",
                 0.0, static_cast<double>(missing), missing == 0);
        push_row(report, "contact nodes beyond radius " + format_radius(r_out) + " (count, at most)",
                 "the profile is positive past the unit radius, so contact cannot reach beyond it "
                 "once the 0.08 allowance is granted",
                 0.0, static_cast<double>(escapes), escapes == 0);
        return report;
    }

    if (name == "twoballs") {
        const Polynomial pbar = parse_poly("8*x1^2 + 8*(x2^2 - 1)^2 - 1", 2);
        CompactOutcome out;
        PipelineReport report = compact_report(name, pbar, p, &out);
        const SolverDomain& d = out.problem.domain;
        const auto comps = connected_components(out.sets.contact);
        push_row(report, "number of contact components (exactly)",
                 "the obstacle polynomial is negative precisely on two separated balls around "
                 "plus and minus e2, each trapping one component",
                 2.0, static_cast<double>(comps.size()), comps.size() == 2);

        const ThinSet ball_up = raster_disc(0.0, 1.0, 0.5, d);
        const ThinSet ball_dn = raster_disc(0.0, -1.0, 0.5, d);
        double worst = comps.empty() ? empty_distance(p) : 0.0;
        for (const ThinSet& c : comps)
            worst = std::max(worst, std::min(directed_excess(c, ball_up),
                                             directed_excess(c, ball_dn)));
        push_row(report, "largest one-sided excess of a component over its nearest half-radius ball (at most)",
                 "outside the half-radius balls the obstacle polynomial is positive with margin, "
                 "so contact hugs a thin collar of each ball",
                 0.1, worst, worst <= 0.1);

        const double sep = comps.size() == 2 ? separation(comps[0], comps[1]) : 0.0;
        push_row(report, "separation between the two contact components (at least)",
                 "the obstacle exceeds the band on the strip between the balls, so the components "
                 "keep the balls' mutual gap",
                 0.5, sep, sep >= 0.5);

        const bool convex = convexity_check(out.sets.contact);
        push_row(report, "convex-hull fill of the contact raster (expected absent)",
                 "two separated components cannot fill their joint convex hull",
                 0.0, convex ? 1.0 : 0.0, !convex);
        return report;
    }

    if (name == "annulus") {
        const Polynomial pbar = parse_poly("4*(x1^2 + x2^2 - 1)^2 - 1", 2);
        CompactOutcome out;
        PipelineReport report = compact_report(name, pbar, p, &out);
        const SolverDomain& d = out.problem.domain;
        const int i0 = (d.nx - 1) / 2, j0 = (d.ny - 1) / 2;

        const bool origin_contact = out.sets.contact.at(i0, j0);
        push_row(report, "contact at the origin node (count, at most)",
                 "the obstacle polynomial equals 3 at the origin, keeping the solution strictly "
                 "above the obstacle there",
                 0.0, origin_contact ? 1.0 : 0.0, !origin_contact);

        // the origin's off-contact component must be walled off from the rim
        ThinSet complement = make_thin_set(d);
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) complement.set(i, j, !out.sets.contact.at(i, j));
        double rim_touch = 1.0;
        for (const ThinSet& c : connected_components(complement))
            if (c.at(i0, j0)) {
                const BoundingBox bb = bounding_box(c);
                rim_touch = (bb.imin == 0 || bb.imax == d.nx - 1 || bb.jmin == 0 ||
                             bb.jmax == d.ny - 1)
                                ? 1.0
                                : 0.0;
                break;
            }
        push_row(report, "origin's off-contact component reaching the domain rim (count, at most)",
                 "the contact ring around the radial band encloses the origin and cuts its "
                 "component off from the far field",
                 0.0, rim_touch, rim_touch == 0.0);

        std::int64_t outside_band = 0;
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                if (!out.sets.contact.at(i, j)) continue;
                const double r2 = d.x(i) * d.x(i) + d.y(j) * d.y(j);
                if (r2 < 0.45 || r2 > 1.55) ++outside_band;
            }
        push_row(report, "contact nodes with squared radius outside [0.45, 1.55] (count, at most)",
                 "contact needs the quartic below the band, which confines the squared radius to "
                 "the stated interval with a 0.05 margin",
                 0.0, static_cast<double>(outside_band), outside_band == 0);
        return report;
    }

    if (name == "starshaped") {
        const Polynomial f = parse_poly("x1^2*x2^2", 2);
        CompactOutcome out;
        PipelineReport report = polysets_report(name, f, 0.15, KChoice::FixedK, p, &out, nullptr);
        const StarVerdict sv = star_shaped(out.sets.contact, 0.0, 0.0);
        push_row(report, "star-shape verdict about the origin (expected present)",
                 "along every ray from the origin both the radial profile and beta times f grow "
                 "outward, so the obstacle only sinks with radius and contact cannot reappear "
                 "once lost",
                 1.0, sv.star_shaped ? 1.0 : 0.0, sv.star_shaped);
        const bool convex = convexity_check(out.sets.contact);
        push_row(report, "convex-hull fill of the contact raster (expected absent)",
                 "the contact set follows the thickened coordinate cross, whose arms leave the "
                 "hull empty between them",
                 0.0, convex ? 1.0 : 0.0, !convex);
        report.summary["rays_checked"] = sv.rays_checked;
        report.summary["rays_failed"] = sv.rays_failed;
        return report;
    }

    if (name == "cubicq") {
        p.L = 6.0;
        p.omega = kOmegaTall;
        const Polynomial qbar = parse_poly("x1^2 + x2^2 - 1", 2);
        PositivityOutcome out;
        PipelineReport report = positivity_report(name, qbar, p, &out);
        const SolverDomain& d = out.problem.domain;
        const ThinSet disc = raster_disc(0.0, 0.0, 1.0, d);
        std::int64_t missing = 0;
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i)
                if (disc.at(i, j) && !out.sets.positivity.at(i, j)) ++missing;
        push_row(report, "closed unit-disc raster nodes missing from the positivity set (count, at most)",
                 "q is negative inside the unit disc, where contact is impossible, and the free "
                 "boundary sits strictly outside the closed disc",
                 0.0, static_cast<double>(missing), missing == 0);
        return report;
    }

    throw std::invalid_argument("unknown example: " + name);
}

namespace {

// Uniform double in [lo, hi) from the standardized mt19937_64 bit stream.
// std::uniform_real_distribution is implementation-defined, which would make
// verify reports differ across standard libraries for the same seed.
double urand(std::mt19937_64& rng, double lo, double hi) {
    const double u = (rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

ObstacleProblemSpec random_small_spec(std::mt19937_64& rng) {
    ObstacleProblemSpec spec;
    if (rng() % 2 == 0) {
        const int m = 2 + static_cast<int>(rng() % 12);  // plane interior 3..25
        spec.domain = build_domain(1, 1.0, 1.0 / m);
    } else {
        const int m = 2 + static_cast<int>(rng() % 2);  // plane interior 9 or 25
        spec.domain = build_domain(2, 1.0, 1.0 / m);
    }
    spec.obstacle.assign(spec.domain.plane_count(), 0.0);
    for (double& v : spec.obstacle) v = urand(rng, -1.0, 1.0);
    spec.boundary.assign(spec.domain.boundary_count(), 0.0);
    for (double& v : spec.boundary) v = urand(rng, -0.5, 0.5);
    spec.omega = urand(rng, 1.0, 1.9);
    spec.tol = 1e-10;
    spec.max_sweeps = 200000;
    return spec;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

PipelineReport run_verify(std::uint64_t seed, int trials, int pairs) {
    if (trials < 1 || pairs < 1) throw std::invalid_argument("verify: trials and pairs must be positive");
    PipelineReport report;
    report.name = "verify";
    report.inputs["op"] = "verify";
    report.inputs["seed"] = seed;
    report.inputs["trials"] = trials;
    report.inputs["pairs"] = pairs;

    std::mt19937_64 rng(seed);

    double worst_oracle = 0.0;
    for (int t = 0; t < trials; ++t) {
        const ObstacleProblemSpec spec = random_small_spec(rng);
        const SolutionField psor = solve_thin_obstacle(spec);
        const SolutionField ref = lcp_bruteforce(spec);
        worst_oracle = std::max(worst_oracle, max_abs_diff(psor.values, ref.values));
    }
    push_row(report, "largest deviation between the relaxation solve and the reference solve over random small specs (at most)",
             "the discrete complementarity system has a unique solution, so two convergent "
             "solution routes must agree to solver tolerance",
             1e-8, worst_oracle, worst_oracle <= 1e-8);

    double worst_order = 0.0;
    for (int t = 0; t < pairs; ++t) {
        const ObstacleProblemSpec lo = random_small_spec(rng);
        ObstacleProblemSpec hi = lo;
        for (double& v : hi.obstacle) v += urand(rng, 0.0, 0.5);
        for (double& v : hi.boundary) v += urand(rng, 0.0, 0.5);
        const SolutionField ulo = solve_thin_obstacle(lo);
        const SolutionField uhi = solve_thin_obstacle(hi);
        for (std::size_t i = 0; i < ulo.values.size(); ++i)
            worst_order = std::max(worst_order, ulo.values[i] - uhi.values[i]);
    }
    push_row(report, "largest ordering violation between solves with nodewise-ordered obstacle and boundary data (at most)",
             "raising the obstacle and the boundary data can only raise the solution of the "
             "variational inequality",
             1e-7, worst_order, worst_order <= 1e-7);

    double worst_sym = 0.0;
    for (int t = 0; t < std::max(1, trials / 10); ++t) {
        ObstacleProblemSpec spec;
        spec.domain = build_domain(2, 1.0, 1.0 / 3);
        spec.obstacle.assign(spec.domain.plane_count(), 0.0);
        const int nx = spec.domain.nx;
        for (int j = 0; j < nx; ++j)
            for (int i = 0; i <= j; ++i) {
                if (i + j > nx - 1) continue;  // fundamental wedge of the dihedral group
                const double v = urand(rng, -1.0, 1.0);
                const int ii[4] = {i, nx - 1 - i, j, nx - 1 - j};
                const int jj[4] = {j, j, i, i};
                for (int s = 0; s < 4; ++s) {
                    spec.obstacle[spec.domain.plane_index(ii[s], jj[s])] = v;
                    spec.obstacle[spec.domain.plane_index(jj[s], ii[s])] = v;
                    spec.obstacle[spec.domain.plane_index(nx - 1 - ii[s], nx - 1 - jj[s])] = v;
                    spec.obstacle[spec.domain.plane_index(nx - 1 - jj[s], nx - 1 - ii[s])] = v;
                }
            }
        spec.boundary.assign(spec.domain.boundary_count(), 0.2);
        spec.tol = 1e-12;
        spec.max_sweeps = 200000;
        const SolutionField u = solve_thin_obstacle(spec);
        const SolverDomain& d = spec.domain;
        for (int k = 0; k < d.nz; ++k)
            for (int j = 0; j < d.ny; ++j)
                for (int i = 0; i < d.nx; ++i) {
                    const double v = u.values[d.index(i, j, k)];
                    worst_sym = std::max(worst_sym, std::abs(v - u.values[d.index(j, i, k)]));
                    worst_sym = std::max(worst_sym, std::abs(v - u.values[d.index(d.nx - 1 - i, j, k)]));
                }
    }
    push_row(report, "largest asymmetry of the solution for square-symmetric data (at most)",
             "a lexicographic sweep breaks the square symmetry of the data only below the "
             "convergence tolerance",
             1e-10, worst_sym, worst_sym <= 1e-10);

    report.summary["trials"] = trials;
    report.summary["pairs"] = pairs;
    report.summary["max_oracle_diff"] = worst_oracle;
    report.summary["max_order_violation"] = worst_order;
    report.summary["max_asymmetry"] = worst_sym;
    return report;
}

std::string params_hash(const ordered_json& inputs) {
    const std::string s = inputs.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void append_manifest(const std::string& dir, const std::string& name, const std::string& hash,
                     bool pass, double wall_ms) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/runs.csv";
    const bool fresh = !std::filesystem::exists(path);
    FILE* f = std::fopen(path.c_str(), "a");
    if (!f) throw std::runtime_error("cannot open " + path);
    if (fresh) std::fputs("name,params,pass,wall_ms\n", f);
    std::fprintf(f, "%s,%s,%d,%.3f\n", name.c_str(), hash.c_str(), pass ? 1 : 0, wall_ms);
    std::fclose(f);
}

}  // namespace thinfree
