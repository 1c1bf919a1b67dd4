// C shim over the pipeline layer.  Exceptions stop here: every entry point
// traps them, stashes the message in a thread-local slot and returns a
// status code.  Reports cross the boundary as opaque heap objects that own
// their serialized form.

#include "thinfree.h"

#include "thinfree/pipeline.hpp"

#include <cstring>
#include <exception>
#include <new>
#include <stdexcept>
#include <string>

using namespace thinfree;

struct tf_report {
    PipelineReport report;
    std::string json;
    std::string hash;
};

namespace {

thread_local std::string g_last_error;

tf_status fail(tf_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

PipelineParams to_params(const tf_params* p) {
    PipelineParams out;
    if (!p) return out;
    out.L = p->L;
    out.h = p->h;
    out.omega = p->omega;
    out.tol = p->tol;
    out.tau_c = p->tau_c;
    out.max_sweeps = p->max_sweeps;
    out.sweep = p->sweep == 1 ? SweepMode::RedBlack : SweepMode::Lexicographic;
    out.threads = p->threads;
    if (p->artifact_dir) out.artifact_dir = p->artifact_dir;
    return out;
}

tf_status finish(PipelineReport&& report, tf_report** out) {
    auto* r = new (std::nothrow) tf_report;
    if (!r) return fail(TF_ERR_RUNTIME, "out of memory");
    r->report = std::move(report);
    r->json = r->report.to_string();
    r->hash = params_hash(r->report.inputs);
    *out = r;
    g_last_error.clear();
    return TF_OK;
}

// Runs fn, mapping invalid_argument to TF_ERR_ARGUMENT and everything else
// to TF_ERR_RUNTIME.
template <typename Fn>
tf_status guarded(tf_report** out, Fn&& fn) {
    if (!out) return fail(TF_ERR_ARGUMENT, "null report output pointer");
    try {
        return finish(fn(), out);
    } catch (const std::invalid_argument& e) {
        return fail(TF_ERR_ARGUMENT, e.what());
    } catch (const ParseError& e) {
        // Malformed polynomial text is a caller mistake, not a solver failure.
        return fail(TF_ERR_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(TF_ERR_RUNTIME, e.what());
    }
}

}  // namespace

extern "C" {

void tf_params_init(tf_params* p) {
    if (!p) return;
    const PipelineParams d;
    p->L = d.L;
    p->h = d.h;
    p->omega = d.omega;
    p->tol = d.tol;
    p->tau_c = d.tau_c;
    p->max_sweeps = d.max_sweeps;
    p->sweep = d.sweep == SweepMode::RedBlack ? 1 : 0;
    p->threads = d.threads;
    p->artifact_dir = nullptr;
}

const char* tf_version(void) { return "1.0.0"; }

const char* tf_last_error(void) { return g_last_error.c_str(); }

tf_status tf_run_example(const char* name, const tf_params* p, tf_report** out) {
    if (!name) return fail(TF_ERR_ARGUMENT, "null example name");
    return guarded(out, [&] { return run_named_example(name, to_params(p)); });
}

const char* tf_example_name(size_t idx) {
    const auto& names = named_examples();
    return idx < names.size() ? names[idx].c_str() : nullptr;
}

tf_status tf_run_compact(const char* poly, int n, const tf_params* p, tf_report** out) {
    if (!poly) return fail(TF_ERR_ARGUMENT, "null polynomial text");
    return guarded(out, [&] { return run_compact_contact(parse_poly(poly, n), to_params(p)); });
}

tf_status tf_run_positivity(const char* poly, int n, const tf_params* p, tf_report** out) {
    if (!poly) return fail(TF_ERR_ARGUMENT, "null polynomial text");
    return guarded(out, [&] { return run_bounded_positivity(parse_poly(poly, n), to_params(p)); });
}

tf_status tf_run_polysets(const char* poly, int n, double eps, int large_k, const tf_params* p,
                          tf_report** out) {
    if (!poly) return fail(TF_ERR_ARGUMENT, "null polynomial text");
    return guarded(out, [&] {
        return run_prop_polysets(parse_poly(poly, n), eps,
                                 large_k ? KChoice::LargeK : KChoice::FixedK, to_params(p));
    });
}

tf_status tf_run_subsets(const char* poly, int n, double delta, const tf_params* p,
                         tf_report** out) {
    if (!poly) return fail(TF_ERR_ARGUMENT, "null polynomial text");
    return guarded(out, [&] { return run_prop_subsets(parse_poly(poly, n), delta, to_params(p)); });
}

tf_status tf_run_approx(const double* xy, size_t npoints, double eps, const tf_params* p,
                        tf_report** out) {
    if (!xy && npoints > 0) return fail(TF_ERR_ARGUMENT, "null point array");
    return guarded(out, [&] {
        std::vector<std::array<double, 2>> K(npoints);
        for (size_t i = 0; i < npoints; ++i) K[i] = {xy[2 * i], xy[2 * i + 1]};
        return run_thm_approx(K, eps, to_params(p));
    });
}

tf_status tf_run_verify(uint64_t seed, int trials, int pairs, tf_report** out) {
    return guarded(out, [&] { return run_verify(seed, trials, pairs); });
}

int tf_report_pass(const tf_report* r) { return r && r->report.pass() ? 1 : 0; }

const char* tf_report_name(const tf_report* r) { return r ? r->report.name.c_str() : ""; }

const char* tf_report_json(const tf_report* r) { return r ? r->json.c_str() : ""; }

const char* tf_report_params_hash(const tf_report* r) { return r ? r->hash.c_str() : ""; }

void tf_report_free(tf_report* r) { delete r; }

tf_status tf_rho_bar(int k, int n, double* out) {
    if (!out) return fail(TF_ERR_ARGUMENT, "null output pointer");
    try {
        *out = rho_bar(k, n);
        g_last_error.clear();
        return TF_OK;
    } catch (const std::invalid_argument& e) {
        return fail(TF_ERR_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(TF_ERR_RUNTIME, e.what());
    }
}

tf_status tf_manifest_append(const char* dir, const tf_report* r, double wall_ms) {
    if (!dir || !r) return fail(TF_ERR_ARGUMENT, "null manifest arguments");
    try {
        append_manifest(dir, r->report.name, r->hash, r->report.pass(), wall_ms);
        g_last_error.clear();
        return TF_OK;
    } catch (const std::exception& e) {
        return fail(TF_ERR_RUNTIME, e.what());
    }
}

}  // extern "C"
