#include <catch2/catch_amalgamated.hpp>

#include "pacifier/metrics.hpp"
#include "pacifier/rng.hpp"

using namespace pacifier;

TEST_CASE("polarization index") {
    Vec zero = Vec::Zero(5);
    CHECK(polarization_index(zero) == 0.0);

    Vec z(2);
    z << 1.0 / 3, -1.0 / 3;
    CHECK(polarization_index(z) == Catch::Approx(1.0 / 9).margin(1e-12));

    Vec extreme(7);
    for (int i = 0; i < 7; ++i) extreme[i] = (i % 2 == 0) ? 1.0 : -1.0;
    CHECK(polarization_index(extreme) == Catch::Approx(1.0));

    CHECK_THROWS_AS(polarization_index(Vec()), InvalidInput);
}

TEST_CASE("polarization scaling and positivity") {
    RngStream rng(3);
    for (int t = 0; t < 50; ++t) {
        Vec z(1 + static_cast<int>(rng.uniform_int(0, 20)));
        for (int i = 0; i < z.size(); ++i) z[i] = rng.uniform(-1, 1);
        const double a = rng.uniform(0.1, 3.0);
        CHECK(polarization_index(z) >= 0.0);
        CHECK(polarization_index(a * z) == Catch::Approx(a * a * polarization_index(z)).margin(1e-12));
    }
}

TEST_CASE("normalized polarization divides by n once more") {
    Vec z(2);
    z << 1.0 / 3, -1.0 / 3;
    CHECK(normalized_polarization(z, PolNorm::paper) == Catch::Approx(1.0 / 18).margin(1e-12));
    CHECK(normalized_polarization(z, PolNorm::raw) == Catch::Approx(1.0 / 9).margin(1e-12));
    CHECK(normalized_polarization(Vec::Zero(4), PolNorm::paper) == 0.0);
    CHECK(normalized_polarization(Vec::Zero(4), PolNorm::raw) == 0.0);
}

TEST_CASE("accumulated normalized polarization") {
    CHECK(anp({0.3, 0.3, 0.3}, 2) == Catch::Approx(0.45).margin(1e-12));
    CHECK(anp({1.0, 0.0, 0.0}, 2) == Catch::Approx(0.5).margin(1e-12));
    CHECK(anp({1.0, 0.5, 0.25, 0.0}, 3) == Catch::Approx(1.75 / 3).margin(1e-12));
    CHECK(anp({0.0, 0.0}, 1) == 0.0);
    CHECK_THROWS_AS(anp({1.0, 0.5}, 2), InvalidInput);
    CHECK_THROWS_AS(anp({1.0}, 0), InvalidInput);
}

TEST_CASE("anp is monotone in each step value") {
    RngStream rng(4);
    for (int t = 0; t < 20; ++t) {
        const int k = 1 + static_cast<int>(rng.uniform_int(0, 6));
        std::vector<double> steps(k + 1);
        for (double& s : steps) s = rng.uniform(0, 1);
        double base = anp(steps, k);
        const int bump = static_cast<int>(rng.uniform_int(0, k));
        steps[bump] += 0.5;
        CHECK(anp(steps, k) > base);
    }
}

TEST_CASE("dataset stats on the path graph") {
    Graph p2 = Graph::build(2, {{0, 1, 1.0}});
    DatasetStats st = dataset_stats(p2, {1, -1}, "p2");
    CHECK(st.n == 2);
    CHECK(st.m == 1);
    CHECK(st.camp_pos == 1);
    CHECK(st.camp_neg == 1);
    CHECK(st.avg_degree == Catch::Approx(1.0));
    CHECK(st.cross_camp_ratio == Catch::Approx(1.0));
    CHECK(st.initial_polarization == Catch::Approx(1.0 / 9).margin(1e-12));
}

TEST_CASE("dataset stats with a single camp") {
    Graph k3 = Graph::build(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
    DatasetStats st = dataset_stats(k3, {1, 1, 1});
    CHECK(st.cross_camp_ratio == 0.0);
    CHECK(st.camp_neg == 0);
    CHECK(st.avg_degree_pos == Catch::Approx(2.0));
    // consensus camp: z = s = 1 everywhere, polarization 1
    CHECK(st.initial_polarization == Catch::Approx(1.0).margin(1e-10));
    CHECK_THROWS_AS(dataset_stats(k3, {1, -1}), InvalidInput);
    CHECK_THROWS_AS(dataset_stats(k3, {1, 0, -1}), InvalidInput);
}

TEST_CASE("polarization filter keeps strictly-above entries") {
    DatasetStats a;
    a.initial_polarization = 0.44;
    DatasetStats b;
    b.initial_polarization = 0.18;
    auto kept = filter_by_polarization({a, b}, 0.4);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].initial_polarization == Catch::Approx(0.44));
    CHECK(filter_by_polarization({a, b}, 0.0).size() == 2);
    CHECK(filter_by_polarization({}, 0.4).empty());
    CHECK_THROWS_AS(filter_by_polarization({a}, -1.0), InvalidInput);
}
