#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "thinfree.h"

#include "json.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("params defaults") {
    tf_params p;
    tf_params_init(&p);
    CHECK(p.L == 4.0);
    CHECK(p.h == 1.0 / 16.0);
    CHECK(p.tol == 1e-8);
    CHECK(p.tau_c == 0.0);
    CHECK(p.max_sweeps == 0);
    CHECK(p.sweep == 0);
    CHECK(p.threads == 1);
    CHECK(p.artifact_dir == nullptr);
    CHECK(p.omega > 0.0);
    CHECK(p.omega < 2.0);
    tf_params_init(nullptr);  // tolerated
}

TEST_CASE("rho_bar values and errors") {
    double v = 0.0;
    REQUIRE(tf_rho_bar(2, 2, &v) == TF_OK);
    CHECK(v == doctest::Approx(0.57735026918962573).epsilon(1e-12));
    CHECK(std::strcmp(tf_last_error(), "") == 0);

    CHECK(tf_rho_bar(1, 2, &v) == TF_ERR_ARGUMENT);
    CHECK(std::strlen(tf_last_error()) > 0);
    CHECK(tf_rho_bar(2, 2, nullptr) == TF_ERR_ARGUMENT);
}

TEST_CASE("compact run through the C surface") {
    tf_params p;
    tf_params_init(&p);
    p.L = 2.0;
    p.h = 0.125;

    tf_report* r = nullptr;
    REQUIRE(tf_run_compact("x1^2+x2^2-1", 2, &p, &r) == TF_OK);
    REQUIRE(r != nullptr);
    CHECK(tf_report_pass(r) == 1);
    CHECK(std::string(tf_report_name(r)) == "compact_contact");
    CHECK(std::strlen(tf_report_params_hash(r)) == 16);

    const auto j = nlohmann::json::parse(std::string(tf_report_json(r)));
    CHECK(j.at("name") == "compact_contact");
    CHECK(j.at("pass") == true);
    CHECK(j.at("inputs").at("poly") == "-1 + x2^2 + x1^2");  // canonical term order
    CHECK(j.at("checks").size() > 0);

    // Same inputs, same bytes.
    tf_report* r2 = nullptr;
    REQUIRE(tf_run_compact("x1^2+x2^2-1", 2, &p, &r2) == TF_OK);
    CHECK(std::string(tf_report_json(r)) == std::string(tf_report_json(r2)));
    CHECK(std::string(tf_report_params_hash(r)) == std::string(tf_report_params_hash(r2)));
    tf_report_free(r2);
    tf_report_free(r);
}

TEST_CASE("argument errors leave the output untouched") {
    tf_report* r = reinterpret_cast<tf_report*>(0x1);
    tf_report* sentinel = r;

    CHECK(tf_run_compact(nullptr, 2, nullptr, &r) == TF_ERR_ARGUMENT);
    CHECK(r == sentinel);

    CHECK(tf_run_compact("x1^2 +", 2, nullptr, &r) == TF_ERR_ARGUMENT);
    CHECK(r == sentinel);
    CHECK(std::strlen(tf_last_error()) > 0);

    CHECK(tf_run_compact("x1", 2, nullptr, &r) == TF_ERR_ARGUMENT);  // unbounded negativity
    CHECK(r == sentinel);

    CHECK(tf_run_example("no_such_example", nullptr, &r) == TF_ERR_ARGUMENT);
    CHECK(r == sentinel);

    tf_params p;
    tf_params_init(&p);
    p.h = 0.3;  // L/h not integral
    CHECK(tf_run_compact("x1^2+x2^2-1", 2, &p, &r) == TF_ERR_ARGUMENT);
    CHECK(r == sentinel);

    CHECK(tf_run_verify(1, 0, 5, &r) == TF_ERR_ARGUMENT);
    CHECK(r == sentinel);

    CHECK(tf_run_compact("x1^2-1", 2, nullptr, nullptr) == TF_ERR_ARGUMENT);
}

TEST_CASE("example names enumerate the registry") {
    size_t count = 0;
    while (tf_example_name(count) != nullptr) ++count;
    CHECK(count == 6);
    bool saw_twoballs = false;
    for (size_t i = 0; i < count; ++i)
        if (std::string(tf_example_name(i)) == "twoballs") saw_twoballs = true;
    CHECK(saw_twoballs);
    CHECK(tf_example_name(count + 5) == nullptr);
}

TEST_CASE("approx run accepts a raw coordinate array") {
    tf_params p;
    tf_params_init(&p);
    p.L = 2.0;
    p.h = 0.125;

    const double xy[2] = {0.125, 0.0};
    tf_report* r = nullptr;
    REQUIRE(tf_run_approx(xy, 1, 0.3, &p, &r) == TF_OK);
    CHECK(std::string(tf_report_name(r)) == "thm_approx");
    const auto j = nlohmann::json::parse(std::string(tf_report_json(r)));
    CHECK(j.at("summary").at("target_nodes").get<int>() >= 1);
    tf_report_free(r);

    tf_report* r2 = nullptr;
    CHECK(tf_run_approx(nullptr, 3, 0.3, &p, &r2) == TF_ERR_ARGUMENT);
    CHECK(tf_run_approx(xy, 0, 0.3, &p, &r2) == TF_ERR_ARGUMENT);  // empty cloud
}

TEST_CASE("verify suite and manifest append") {
    tf_report* r = nullptr;
    REQUIRE(tf_run_verify(7, 10, 5, &r) == TF_OK);
    CHECK(tf_report_pass(r) == 1);
    CHECK(std::string(tf_report_name(r)) == "verify");

    const std::string dir = "capi_manifest_dir";
    std::filesystem::remove_all(dir);
    REQUIRE(tf_manifest_append(dir.c_str(), r, 12.5) == TF_OK);
    REQUIRE(tf_manifest_append(dir.c_str(), r, 13.0) == TF_OK);
    const std::string text = slurp(dir + "/runs.csv");
    CHECK(text.find("name,params,pass,wall_ms\n") == 0);
    CHECK(text.find("verify," + std::string(tf_report_params_hash(r)) + ",1,12.500\n") !=
          std::string::npos);

    CHECK(tf_manifest_append(nullptr, r, 0.0) == TF_ERR_ARGUMENT);
    tf_report_free(r);
    std::filesystem::remove_all(dir);
}

TEST_CASE("report accessors tolerate null") {
    CHECK(tf_report_pass(nullptr) == 0);
    CHECK(std::string(tf_report_name(nullptr)).empty());
    CHECK(std::string(tf_report_json(nullptr)).empty());
    CHECK(std::string(tf_report_params_hash(nullptr)).empty());
    tf_report_free(nullptr);
}
