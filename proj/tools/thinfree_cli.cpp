// Command-line front end.  Talks to the library exclusively through the C
// interface; the only extra dependencies are CLI11 for argument handling
// and the JSON reader for pretty-printing report rows.
//
// Exit codes: 0 all checks passed, 2 a check failed or the pipeline
// stopped (report written either way), 1 usage or configuration error.

#include "thinfree.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

struct GlobalOpts {
    tf_params params{};
    std::string out;
    unsigned long long seed = 1;
};

std::string output_root() {
    const char* env = std::getenv("THINFREE_OUT");
    return env && *env ? env : "runs";
}

// Points file: one "x,y" pair per line; blank lines and '#' comments skipped.
std::vector<double> read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--points", "cannot open " + path);
    std::vector<double> xy;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        double x = 0.0, y = 0.0;
        char rest = 0;
        const int got = std::sscanf(line.c_str(), " %lf , %lf %c", &x, &y, &rest);
        if (got < 2 || (got == 3 && rest != '\r'))
            throw CLI::ValidationError(
                "--points", path + ":" + std::to_string(lineno) + ": expected \"x,y\"");
        xy.push_back(x);
        xy.push_back(y);
    }
    if (xy.empty()) throw CLI::ValidationError("--points", path + ": no points");
    return xy;
}

void print_rows(const std::string& json_text) {
    const json j = json::parse(json_text);
    for (const auto& row : j.at("checks")) {
        std::printf("[%s] %-10.4g vs %-10.4g  %s\n",
                    row.at("pass").get<bool>() ? "PASS" : "FAIL",
                    row.at("measured").get<double>(), row.at("predicted").get<double>(),
                    row.at("description").get<std::string>().c_str());
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

// Runs one pipeline call, persists the report and manifest row, prints the
// row table.  `run` receives the artifact directory already created.
template <typename Run>
int run_and_persist(const GlobalOpts& g, const std::string& default_name, Run&& run) {
    const std::string root = output_root();
    const std::string outdir = g.out.empty() ? root + "/" + default_name : g.out;
    std::filesystem::create_directories(outdir);

    tf_report* report = nullptr;
    const auto t0 = std::chrono::steady_clock::now();
    const tf_status status = run(outdir.c_str(), &report);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    if (status == TF_ERR_ARGUMENT) {
        std::fprintf(stderr, "error: %s\n", tf_last_error());
        return 1;
    }
    if (status != TF_OK) {
        // Pipeline stopped mid-run; leave a stub so the directory still
        // explains what happened.
        const json stub = {{"name", default_name}, {"error", tf_last_error()}, {"pass", false}};
        write_file(outdir + "/report.json", stub.dump(2) + "\n");
        std::fprintf(stderr, "error: %s\n", tf_last_error());
        std::printf("report: %s/report.json\n", outdir.c_str());
        return 2;
    }

    const std::string text = tf_report_json(report);
    write_file(outdir + "/report.json", text);
    tf_manifest_append(root.c_str(), report, wall_ms);
    print_rows(text);
    const int pass = tf_report_pass(report);
    std::printf("%s: %s  (report: %s/report.json)\n", tf_report_name(report),
                pass ? "all checks passed" : "CHECKS FAILED", outdir.c_str());
    tf_report_free(report);
    return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thin obstacle laboratory: contact-set experiments on a half grid"};
    app.set_help_flag("--help", "print this help and exit");  // frees -h for the spacing flag
    app.require_subcommand(1);
    app.set_config("--config", "", "file with key = value lines; flags take precedence");
    app.allow_config_extras(false);

    GlobalOpts g;
    tf_params_init(&g.params);
    app.add_option("--L", g.params.L, "half-width of the box")->capture_default_str();
    app.add_option("--h", g.params.h, "grid spacing (L/h integral)")->capture_default_str();
    app.add_option("--omega", g.params.omega, "relaxation factor in (0,2)")
        ->capture_default_str();
    app.add_option("--tol", g.params.tol, "convergence tolerance")->capture_default_str();
    app.add_option("--tauc", g.params.tau_c, "contact band (0: default 10*h^2)")
        ->capture_default_str();
    app.add_option("--out", g.out, "output directory (default <root>/<name>)");
    app.add_option("--seed", g.seed, "seed for the randomized suites")->capture_default_str();

    std::string example_name;
    auto* cmd_example = app.add_subcommand("example", "run a canned experiment");
    cmd_example->add_option("name", example_name, "one of the named examples")->required();
    cmd_example->fallthrough();

    std::string poly_text, solve_mode = "compact";
    int dim = 2;
    auto* cmd_solve = app.add_subcommand("solve", "contact or positivity run for a polynomial");
    cmd_solve->add_option("--poly", poly_text, "plane polynomial, e.g. \"x1^2+x2^2-1\"")
        ->required();
    cmd_solve->add_option("--mode", solve_mode, "compact|positivity")
        ->check(CLI::IsMember({"compact", "positivity"}))
        ->capture_default_str();
    cmd_solve->add_option("--n", dim, "plane dimension (1 or 2)")->capture_default_str();
    cmd_solve->fallthrough();

    std::string points_path;
    double eps = 0.2;
    auto* cmd_approx = app.add_subcommand("approx", "approximate a point cloud by a contact set");
    cmd_approx->add_option("--points", points_path, "CSV file, one \"x,y\" per line")->required();
    cmd_approx->add_option("--eps", eps, "target Hausdorff scale")->capture_default_str();
    cmd_approx->fallthrough();

    std::string subsets_poly;
    double delta = 0.1;
    auto* cmd_subsets = app.add_subcommand("subsets", "sublevel-set contact prescription");
    cmd_subsets->add_option("--poly", subsets_poly, "polynomial f with f(x) >= -1")->required();
    cmd_subsets->add_option("--delta", delta, "sublevel depth in (0, 1/2]")
        ->capture_default_str();
    cmd_subsets->add_option("--n", dim, "plane dimension (1 or 2)")->capture_default_str();
    cmd_subsets->fallthrough();

    auto* cmd_verify = app.add_subcommand("verify", "run the randomized property suites");
    cmd_verify->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Normalize every usage/config failure to exit 1; --help stays 0.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_example->parsed()) {
            return run_and_persist(g, example_name, [&](const char* dir, tf_report** out) {
                tf_params p = g.params;  // named runs read only the artifact dir
                p.artifact_dir = dir;
                return tf_run_example(example_name.c_str(), &p, out);
            });
        }
        if (cmd_solve->parsed()) {
            const std::string name =
                solve_mode == "compact" ? "compact_contact" : "bounded_positivity";
            return run_and_persist(g, name, [&](const char* dir, tf_report** out) {
                tf_params p = g.params;
                p.artifact_dir = dir;
                return solve_mode == "compact"
                           ? tf_run_compact(poly_text.c_str(), dim, &p, out)
                           : tf_run_positivity(poly_text.c_str(), dim, &p, out);
            });
        }
        if (cmd_approx->parsed()) {
            const std::vector<double> xy = read_points_csv(points_path);
            return run_and_persist(g, "thm_approx", [&](const char* dir, tf_report** out) {
                tf_params p = g.params;
                p.artifact_dir = dir;
                return tf_run_approx(xy.data(), xy.size() / 2, eps, &p, out);
            });
        }
        if (cmd_subsets->parsed()) {
            return run_and_persist(g, "prop_subsets", [&](const char* dir, tf_report** out) {
                tf_params p = g.params;
                p.artifact_dir = dir;
                return tf_run_subsets(subsets_poly.c_str(), dim, delta, &p, out);
            });
        }
        if (cmd_verify->parsed()) {
            return run_and_persist(g, "verify", [&](const char*, tf_report** out) {
                return tf_run_verify(g.seed, 200, 50, out);
            });
        }
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
