// End-to-end experiment pipelines: build an obstacle from a polynomial,
// solve the thin obstacle problem on a truncated box, extract the plane
// sets and check the predicted inclusions and bounds.  Each run produces a
// deterministic report; wall-clock time lives only in the runs.csv
// manifest so reports stay byte-reproducible.

#pragma once

#include "thinfree/poly.hpp"
#include "thinfree/setgeom.hpp"
#include "thinfree/solver.hpp"

#include "json.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace thinfree {

using ordered_json = nlohmann::ordered_json;

struct CheckRow {
    std::string description;
    /// Mathematical origin of the predicted bound (e.g. a maximum
    /// principle or a barrier construction); never empty.
    std::string basis;
    double predicted = 0.0;
    double measured = 0.0;
    bool pass = false;
};

struct PipelineReport {
    std::string name;
    ordered_json inputs;   // echoed configuration, fixed key order
    ordered_json summary;  // derived scalars (counts, measured constants)
    std::vector<CheckRow> checks;
    double truncation_budget = 0.0;
    std::vector<std::string> artifacts;

    bool pass() const;
    ordered_json to_json() const;
    std::string to_string() const;  // canonical two-space indented dump
};

struct PipelineParams {
    double L = 4.0;
    double h = 1.0 / 16.0;
    double omega = 1.8;
    double tol = 1e-8;
    double tau_c = 0.0;          // 0: use the default band 10*h^2
    std::int64_t max_sweeps = 0; // 0: solver default
    SweepMode sweep = SweepMode::Lexicographic;
    int threads = 1;
    std::string artifact_dir;    // empty: write no rasters
};

/// Contact-band width actually used for the given parameters.
double contact_band(const PipelineParams& params);

/// Critical rescaling radius of the degree-k global profile, closed form.
double rho_bar(int k, int n);

/// The same constant from an independent route: bisect the barrier level A
/// until the radial profile A r^(1-n) - 1 + r^k has minimum zero; the
/// minimizer is the radius.
double rho_bar_oracle(int k, int n);

/// Solve with obstacle -p on the plane and zero boundary data; check that
/// the contact set sits inside {p <= band}, is nonempty exactly when p
/// goes negative on the raster, that the solution is nonnegative and that
/// it has decayed by the truncation ring.
PipelineReport run_compact_contact(const Polynomial& pbar, const PipelineParams& params);

/// Solve with zero obstacle and boundary data -Q, where Q is the odd
/// harmonic extension of qbar; certify the barrier sandwich
/// -Q <= u <= -Q + kappa*Phi with a measured Hopf constant, and locate the
/// positivity set.
PipelineReport run_bounded_positivity(const Polynomial& qbar, const PipelineParams& params);

enum class KChoice { FixedK, LargeK };

/// Contact set prescribed as the zero set of a nonnegative polynomial f:
/// raise beta until s = (rho*|x|)^k - 1 + beta*f is positive outside the
/// eps-neighbourhood of {f = 0}, then run the compact-contact solve on s.
PipelineReport run_prop_polysets(const Polynomial& f, double eps, KChoice variant,
                                 const PipelineParams& params);

/// Contact set prescribed as a sublevel set: solve the ladder of obstacle
/// problems with obstacles 1 - ((f+1)/(1-delta/2))^(2k) until the contact
/// set swallows {f <= -delta}, checking monotonicity and the decay bound
/// along the way.
PipelineReport run_prop_subsets(const Polynomial& f, double delta,
                                const PipelineParams& params);

/// Approximate an arbitrary finite target set by a contact set: fit a
/// polynomial to the distance function of K, shape it into an admissible
/// f, and run the sublevel pipeline so both Hausdorff checks come out
/// within 2*eps.
PipelineReport run_thm_approx(const std::vector<std::array<double, 2>>& K, double eps,
                              const PipelineParams& params);

/// Canned experiments with pinned parameters.  Only artifact_dir is taken
/// from params; everything else is fixed so reports are canonical.
PipelineReport run_named_example(const std::string& name, const PipelineParams& params);

/// Randomized property suite on small grids: relaxation-vs-enumeration
/// agreement, the ordering principle for ordered data, and symmetry of the
/// solution under square-symmetric data.  Seed-deterministic.
PipelineReport run_verify(std::uint64_t seed, int trials, int pairs);

const std::vector<std::string>& named_examples();

/// Stable short hash of the echoed inputs (FNV-1a over the canonical dump).
std::string params_hash(const ordered_json& inputs);

/// Append "name,params,pass,wall_ms" to <dir>/runs.csv (header on first
/// write).  Timing deliberately lives here and not in reports.
void append_manifest(const std::string& dir, const std::string& name,
                     const std::string& hash, bool pass, double wall_ms);

}  // namespace thinfree
