#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "thinfree/setgeom.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

using namespace thinfree;

namespace {

// O(|A||B|) Hausdorff straight from the definition, for cross-checking.
double hausdorff_brute(const ThinSet& a, const ThinSet& b) {
    std::vector<std::array<double, 2>> pa, pb;
    for (int j = 0; j < a.domain.ny; ++j)
        for (int i = 0; i < a.domain.nx; ++i) {
            if (a.at(i, j)) pa.push_back({a.domain.x(i), a.domain.y(j)});
            if (b.at(i, j)) pb.push_back({b.domain.x(i), b.domain.y(j)});
        }
    auto directed = [](const auto& from, const auto& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = 1e300;
            for (const auto& q : to) best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(pa, pb), directed(pb, pa));
}

ThinSet random_mask(std::mt19937& rng, const SolverDomain& d, double fill) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ThinSet s = make_thin_set(d);
    for (auto& c : s.mask) c = u(rng) < fill;
    return s;
}

}  // namespace

TEST_CASE("extraction splits the plane into contact, positivity and a band") {
    const SolverDomain d = build_domain(2, 1.0, 0.25);
    ObstacleProblemSpec spec = make_spec(d);
    SolutionField field;
    field.domain = d;
    field.values.assign(static_cast<std::size_t>(d.num_nodes()), 0.0);

    SUBCASE("zero solution on a zero obstacle is all contact") {
        const ThinSetPair sets = extract_thin_sets(field, spec, 1e-6);
        CHECK(sets.contact.count() == d.plane_count());
        CHECK(sets.positivity.count() == 0);
        CHECK(sets.unclassified == 0);
    }
    SUBCASE("a lifted solution is all positivity") {
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) field.values[d.plane_index(i, j)] = 1.0;
        const ThinSetPair sets = extract_thin_sets(field, spec, 1e-6);
        CHECK(sets.contact.count() == 0);
        CHECK(sets.positivity.count() == d.plane_count());
    }
    SUBCASE("the gap over a deep obstacle is reported") {
        std::fill(spec.obstacle.begin(), spec.obstacle.end(), -5.0);
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) field.values[d.plane_index(i, j)] = 1e-9;
        const ThinSetPair sets = extract_thin_sets(field, spec, 1e-6);
        CHECK(sets.contact.count() == 0);
        CHECK(sets.positivity.count() == 0);
        CHECK(sets.unclassified == d.plane_count());
    }
    CHECK_THROWS(extract_thin_sets(field, spec, 0.0));
}

TEST_CASE("connected components") {
    const SolverDomain d = build_domain(2, 1.0, 0.25);

    SUBCASE("empty set has no components") {
        CHECK(connected_components(make_thin_set(d)).empty());
    }
    SUBCASE("full plane is one component") {
        ThinSet s = make_thin_set(d);
        std::fill(s.mask.begin(), s.mask.end(), 1);
        const auto comps = connected_components(s);
        REQUIRE(comps.size() == 1);
        CHECK(comps[0].mask == s.mask);
    }
    SUBCASE("diagonal neighbours are separate under 4-connectivity") {
        ThinSet s = make_thin_set(d);
        s.set(2, 2, true);
        s.set(3, 3, true);
        CHECK(connected_components(s).size() == 2);
    }
    SUBCASE("components partition the set, ordered by first node") {
        std::mt19937 rng(42);
        for (int trial = 0; trial < 20; ++trial) {
            const ThinSet s = random_mask(rng, d, 0.35);
            const auto comps = connected_components(s);
            ThinSet uni = make_thin_set(d);
            std::size_t prevFirst = 0;
            for (std::size_t c = 0; c < comps.size(); ++c) {
                std::size_t first = comps[c].mask.size();
                for (std::size_t idx = 0; idx < comps[c].mask.size(); ++idx)
                    if (comps[c].mask[idx]) {
                        CHECK(uni.mask[idx] == 0);  // pairwise disjoint
                        uni.mask[idx] = 1;
                        first = std::min(first, idx);
                    }
                if (c > 0) CHECK(first > prevFirst);
                prevFirst = first;
            }
            CHECK(uni.mask == s.mask);
        }
    }
}

TEST_CASE("hausdorff distance") {
    SUBCASE("worked examples") {
        const SolverDomain d = build_domain(2, 4.0, 1.0);
        ThinSet a = make_thin_set(d), b = make_thin_set(d);
        a.set(4, 4, true);  // physical (0,0)
        b.set(4, 4, true);
        CHECK(hausdorff(a, b) == 0.0);
        b.set(4, 4, false);
        b.set(7, 8, true);  // physical (3,4)
        CHECK(hausdorff(a, b) == doctest::Approx(5.0).epsilon(1e-12));
    }
    SUBCASE("nested discs differ by their radii") {
        const SolverDomain d = build_domain(2, 4.0, 1.0 / 8.0);
        const ThinSet b1 = raster_disc(0, 0, 1.0, d);
        const ThinSet b2 = raster_disc(0, 0, 2.0, d);
        CHECK(hausdorff(b1, b2) == doctest::Approx(1.0).epsilon(0.13));
        CHECK(directed_excess(b1, b2) == 0.0);
        CHECK(directed_excess(b2, b1) == doctest::Approx(1.0).epsilon(0.13));
    }
    SUBCASE("agrees with the definition on random masks") {
        const SolverDomain d = build_domain(2, 1.5, 0.25);
        std::mt19937 rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            ThinSet a = random_mask(rng, d, 0.2);
            ThinSet b = random_mask(rng, d, 0.2);
            if (a.count() == 0 || b.count() == 0) continue;
            CHECK(hausdorff(a, b) == doctest::Approx(hausdorff_brute(a, b)).epsilon(1e-12));
            CHECK(hausdorff(a, b) == hausdorff(b, a));
        }
    }
    SUBCASE("triangle inequality") {
        const SolverDomain d = build_domain(2, 1.5, 0.25);
        std::mt19937 rng(11);
        for (int trial = 0; trial < 20; ++trial) {
            const ThinSet a = random_mask(rng, d, 0.15);
            const ThinSet b = random_mask(rng, d, 0.15);
            const ThinSet c = random_mask(rng, d, 0.15);
            if (a.count() == 0 || b.count() == 0 || c.count() == 0) continue;
            CHECK(hausdorff(a, c) <= hausdorff(a, b) + hausdorff(b, c) + 1e-12);
        }
    }
    SUBCASE("empty operands are rejected") {
        const SolverDomain d = build_domain(2, 1.0, 0.25);
        ThinSet a = make_thin_set(d);
        ThinSet b = make_thin_set(d);
        b.set(1, 1, true);
        CHECK_THROWS(hausdorff(a, b));
        CHECK_THROWS(separation(b, a));
    }
    SUBCASE("separation of two points") {
        const SolverDomain d = build_domain(2, 4.0, 1.0);
        ThinSet a = make_thin_set(d), b = make_thin_set(d);
        a.set(1, 1, true);
        a.set(2, 1, true);
        b.set(6, 1, true);
        CHECK(separation(a, b) == doctest::Approx(4.0));
        CHECK(separation(b, a) == doctest::Approx(4.0));
    }
}

TEST_CASE("star-shape test") {
    const SolverDomain d = build_domain(2, 2.0, 0.125);

    SUBCASE("disc is star-shaped and dihedrally invariant") {
        const ThinSet disc = raster_disc(0, 0, 1.0, d);
        const StarVerdict v = star_shaped(disc, 0.0, 0.0);
        CHECK(v.star_shaped);
        CHECK(v.rays_checked == disc.count());

        ThinSet swapped = make_thin_set(d);
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) swapped.set(j, i, disc.at(i, j));
        CHECK(star_shaped(swapped, 0.0, 0.0).star_shaped == v.star_shaped);

        ThinSet flipped = make_thin_set(d);
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) flipped.set(d.nx - 1 - i, j, disc.at(i, j));
        CHECK(star_shaped(flipped, 0.0, 0.0).star_shaped == v.star_shaped);
    }
    SUBCASE("two separated discs fail from either center") {
        ThinSet two = raster_disc(-0.75, 0, 0.35, d);
        const ThinSet right = raster_disc(0.75, 0, 0.35, d);
        for (std::size_t i = 0; i < two.mask.size(); ++i)
            two.mask[i] = two.mask[i] || right.mask[i];
        CHECK_FALSE(star_shaped(two, -0.75, 0.0).star_shaped);
    }
    SUBCASE("coordinate cross is star-shaped at the origin") {
        ThinSet cross = make_thin_set(d);
        const int mid = (d.nx - 1) / 2;
        for (int t = 0; t < d.nx; ++t) {
            if (std::abs(d.x(t)) <= 1.0) {
                cross.set(t, mid, true);
                cross.set(mid, t, true);
            }
        }
        CHECK(star_shaped(cross, 0.0, 0.0).star_shaped);
    }
    SUBCASE("empty set is rejected") {
        CHECK_THROWS(star_shaped(make_thin_set(d), 0.0, 0.0));
    }
}

TEST_CASE("convexity check") {
    const SolverDomain d = build_domain(2, 2.0, 0.125);
    CHECK(convexity_check(raster_disc(0, 0, 1.0, d)));

    ThinSet two = raster_disc(-0.75, 0, 0.3, d);
    const ThinSet right = raster_disc(0.75, 0, 0.3, d);
    for (std::size_t i = 0; i < two.mask.size(); ++i) two.mask[i] = two.mask[i] || right.mask[i];
    CHECK_FALSE(convexity_check(two));

    const ThinSet annulus =
        set_diff(raster_disc(0, 0, 1.5, d), raster_disc(0, 0, 0.75, d));
    CHECK_FALSE(convexity_check(annulus));

    ThinSet point = make_thin_set(d);
    point.set(3, 3, true);
    CHECK(convexity_check(point));
    CHECK_THROWS(convexity_check(make_thin_set(d)));
}

TEST_CASE("eta_bar threshold") {
    const SolverDomain d = build_domain(2, 2.0, 1.0 / 32.0);
    std::vector<double> g(static_cast<std::size_t>(d.plane_count()));

    SUBCASE("cone above a half-radius well") {
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i)
                g[d.plane_index(i, j)] = std::hypot(d.x(i), d.y(j)) - 0.5;
        const EtaBarResult r = eta_bar(d, g, 0.1);
        CHECK_FALSE(r.fallback);
        CHECK(r.value == doctest::Approx(0.1).epsilon(0.7 * 2.0 / 32.0 / 0.1));

        // Shrinking eps can only widen the qualifying region.
        double prev = r.value;
        for (double eps : {0.08, 0.05, 0.02}) {
            const EtaBarResult rr = eta_bar(d, g, eps);
            CHECK(rr.value <= prev + 1e-12);
            prev = rr.value;
        }

        const EtaBarResult far = eta_bar(d, g, 10.0);
        CHECK(far.fallback);
        CHECK(far.value == doctest::Approx(-0.5).epsilon(0.1));
    }
    SUBCASE("empty sublevel set qualifies every node") {
        std::fill(g.begin(), g.end(), 1.0);
        const EtaBarResult r = eta_bar(d, g, 0.1);
        CHECK_FALSE(r.fallback);
        CHECK(r.value == 1.0);
    }
    SUBCASE("sublevel set touching the rim violates the hypothesis") {
        std::fill(g.begin(), g.end(), -1.0);
        CHECK_THROWS(eta_bar(d, g, 0.1));
    }
}

TEST_CASE("distance grid") {
    const SolverDomain d = build_domain(2, 1.0, 0.25);
    SUBCASE("single point gives the norm") {
        const std::vector<double> dist = distance_grid({{0.0, 0.0}}, d);
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i)
                CHECK(dist[d.plane_index(i, j)] ==
                      doctest::Approx(std::hypot(d.x(i), d.y(j))).epsilon(1e-14));
        CHECK(dist[d.plane_index(4, 4)] == 0.0);
    }
    SUBCASE("two points give the min, and values are 1-Lipschitz") {
        const std::vector<double> dist = distance_grid({{-0.5, 0.0}, {0.5, 0.25}}, d);
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                const double expect = std::min(std::hypot(d.x(i) + 0.5, d.y(j)),
                                               std::hypot(d.x(i) - 0.5, d.y(j) - 0.25));
                CHECK(dist[d.plane_index(i, j)] == doctest::Approx(expect).epsilon(1e-14));
                if (i + 1 < d.nx)
                    CHECK(std::abs(dist[d.plane_index(i + 1, j)] - dist[d.plane_index(i, j)]) <=
                          d.h + 1e-12);
                if (j + 1 < d.ny)
                    CHECK(std::abs(dist[d.plane_index(i, j + 1)] - dist[d.plane_index(i, j)]) <=
                          d.h + 1e-12);
            }
    }
    CHECK_THROWS(distance_grid({}, d));
}

TEST_CASE("mask algebra and morphology") {
    const SolverDomain d = build_domain(2, 1.0, 0.25);
    const ThinSet disc = raster_disc(0, 0, 0.6, d);
    const ThinSet small = raster_disc(0, 0, 0.3, d);
    CHECK(subset_of(small, disc));
    CHECK_FALSE(subset_of(disc, small));
    CHECK(set_and(disc, small).mask == small.mask);
    CHECK(set_diff(small, disc).count() == 0);

    const ThinSet inner = erode4(disc);
    CHECK(subset_of(inner, disc));
    CHECK(inner.count() < disc.count());
    const ThinSet ring = raster_boundary(disc);
    CHECK(set_and(ring, inner).count() == 0);
    CHECK(ring.count() + inner.count() == disc.count());

    const ThinSet level = raster_sublevel(parse_poly("x1^2+x2^2-1", 2), -0.64, d);
    CHECK(level.mask == disc.mask);

    ThinSet seed = make_thin_set(d);
    seed.set(4, 4, true);
    const ThinSet grown = neighborhood(seed, 0.6);
    CHECK(grown.mask == disc.mask);
    CHECK(neighborhood(make_thin_set(d), 1.0).count() == 0);

    const ThinSet pts = raster_points({{0.0, 0.0}, {0.26, 0.0}}, d);
    CHECK(pts.count() == 2);
    CHECK(pts.at(4, 4));
    CHECK(pts.at(5, 4));
}

TEST_CASE("exports") {
    const SolverDomain d = build_domain(2, 1.0, 0.25);
    const ThinSet disc = raster_disc(0, 0, 0.6, d);
    ThinSet dot = make_thin_set(d);
    dot.set(4, 4, true);

    const std::string pgm = "test_setgeom.pgm";
    write_pgm_overlay(pgm, disc, dot);
    std::ifstream in(pgm);
    std::string magic;
    int w = 0, hgt = 0, maxval = 0;
    in >> magic >> w >> hgt >> maxval;
    CHECK(magic == "P2");
    CHECK(w == d.nx);
    CHECK(hgt == d.ny);
    CHECK(maxval == 255);
    int npix = 0, mid = 0, bright = 0;
    for (int v; in >> v;) {
        ++npix;
        mid += v == 128;
        bright += v == 255;
    }
    CHECK(npix == d.plane_count());
    CHECK(mid == 1);
    CHECK(bright == disc.count() - 1);
    in.close();
    std::remove(pgm.c_str());

    const std::string csv = "test_setgeom.csv";
    write_mask_csv(csv, disc);
    std::ifstream cin2(csv);
    std::string header;
    std::getline(cin2, header);
    CHECK(header == "i,j,x,y,in");
    int lines = 0;
    for (std::string line; std::getline(cin2, line);) ++lines;
    CHECK(lines == d.plane_count());
    cin2.close();
    std::remove(csv.c_str());
}
