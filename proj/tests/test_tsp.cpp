#include <doctest.h>

#include "helpers.hpp"
#include "uavplan/tsp.hpp"

using namespace uavplan;
using namespace uavplan::tsp;
using testutil::brute_force_optimum;
using testutil::random_instance;

TEST_CASE("distance_matrix: Euclidean, symmetric, zero diagonal") {
    const auto m = distance_matrix({0, 0, 0}, {{3, 4, 0}});
    REQUIRE(m.n == 2);
    CHECK(m.at(0, 1) == doctest::Approx(5.0));
    CHECK(m.at(1, 0) == doctest::Approx(5.0));
    CHECK(m.at(0, 0) == 0.0);
    CHECK(m.at(1, 1) == 0.0);

    const auto c = distance_matrix({0, 0, 0}, {{10, 0, 0}, {20, 0, 0}});
    CHECK(c.at(0, 1) == doctest::Approx(10.0));
    CHECK(c.at(0, 2) == doctest::Approx(20.0));
    CHECK(c.at(1, 2) == doctest::Approx(10.0));

    CHECK_THROWS_AS(distance_matrix({0, 0, 0}, {}), std::invalid_argument);
}

TEST_CASE("tour_length: closing edge, rotation invariance, oracle sum") {
    const auto m = distance_matrix({0, 0, 0}, {{7, 0, 0}});
    CHECK(tour_length(Tour{{0, 1}}, m) == doctest::Approx(14.0));

    Rng rng(11);
    const auto d = random_instance(5, rng);
    Tour t{{0, 3, 1, 5, 2, 4}};
    // Oracle: independent edge-by-edge summation.
    double want = 0.0;
    for (std::size_t i = 0; i < t.order.size(); ++i)
        want += d.at(t.order[i], t.order[(i + 1) % t.order.size()]);
    CHECK(tour_length(t, d) == doctest::Approx(want));

    Tour rotated{{1, 5, 2, 4, 0, 3}};
    CHECK(tour_length(rotated, d) == doctest::Approx(tour_length(t, d)));
    Tour reversed{{0, 4, 2, 5, 1, 3}};
    CHECK(tour_length(reversed, d) == doctest::Approx(tour_length(t, d)));

    CHECK_THROWS_AS(tour_length(Tour{{0, 1}}, d), std::invalid_argument);
}

TEST_CASE("validate_tour reports the first violation") {
    CHECK(validate_tour(Tour{{0, 2, 1, 3}}, 3).ok);
    CHECK_FALSE(validate_tour(Tour{{0, 1, 1}}, 2).ok);       // duplicate
    CHECK_FALSE(validate_tour(Tour{{1, 2}}, 2).ok);          // wrong size
    CHECK_FALSE(validate_tour(Tour{{2, 1, 0}}, 2).ok);       // depot not first
    CHECK_FALSE(validate_tour(Tour{{0, 1, 3}}, 2).ok);       // out of range
    const auto r = validate_tour(Tour{{0, 1, 1}}, 2);
    CHECK(r.violation.find("more than once") != std::string::npos);
}

TEST_CASE("solve_exact: trivial instances and the lexicographic tie rule") {
    const auto m1 = distance_matrix({0, 0, 0}, {{3, 4, 0}});
    CHECK(solve_exact(m1).order == std::vector<std::size_t>{0, 1});

    // Symmetric two-item instance: both orders tie, node 1 first.
    const auto m2 = distance_matrix({0, 0, 0}, {{3, 4, 0}, {6, 8, 0}});
    CHECK(solve_exact(m2).order == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("solve_exact: unit square perimeter, against full enumeration") {
    const auto m = distance_matrix({0, 0, 0}, {{1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
    const Tour t = solve_exact(m);
    CHECK(tour_length(t, m) == doctest::Approx(4.0));
    CHECK(tour_length(t, m) == doctest::Approx(brute_force_optimum(m)));
}

TEST_CASE("solve_exact matches brute force on random instances") {
    Rng rng(123);
    for (std::size_t K = 2; K <= 7; ++K) {
        for (int rep = 0; rep < 5; ++rep) {
            const auto d = random_instance(K, rng);
            const Tour t = solve_exact(d);
            CHECK(validate_tour(t, K).ok);
            CHECK(tour_length(t, d) == doctest::Approx(brute_force_optimum(d)));
        }
    }
}

TEST_CASE("solve_exact refuses oversized instances") {
    Rng rng(5);
    const auto d = random_instance(13, rng);  // n = 14
    CHECK_THROWS_AS(solve_exact(d), std::invalid_argument);
}

TEST_CASE("solve_lk: single item and collinear sweep") {
    const auto m1 = distance_matrix({0, 0, 0}, {{5, 5, 5}});
    CHECK(solve_lk(m1, 0).order == std::vector<std::size_t>{0, 1});

    // Four points on a line: the monotone sweep is optimal.
    const auto m = distance_matrix({0, 0, 0},
                                   {{10, 0, 0}, {20, 0, 0}, {30, 0, 0}, {40, 0, 0}});
    const Tour t = solve_lk(m, 1);
    CHECK(tour_length(t, m) == doctest::Approx(tour_length(solve_exact(m), m)));
    CHECK(tour_length(t, m) == doctest::Approx(80.0));
}

TEST_CASE("solve_lk: valid, never worse than its initialization, deterministic") {
    Rng rng(99);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t K = 3 + rng.uniform_int(10);
        const auto d = random_instance(K, rng);
        const Tour t = solve_lk(d, rep);
        CHECK(validate_tour(t, K).ok);
        CHECK(tour_length(t, d) <=
              tour_length(nearest_neighbor_tour(d), d) + 1e-9);
        const Tour again = solve_lk(d, rep);
        CHECK(t.order == again.order);  // bit-for-bit reproducible
    }
}

TEST_CASE("solve_lk is near-exact on small instances") {
    Rng rng(2024);
    int optimal = 0;
    const int instances = 30;
    for (int rep = 0; rep < instances; ++rep) {
        const auto d = random_instance(8, rng);
        const double lk = tour_length(solve_lk(d, rep), d);
        const double exact = tour_length(solve_exact(d), d);
        CHECK(lk <= 1.02 * exact);
        if (lk <= exact + 1e-6) ++optimal;
    }
    CHECK(optimal >= instances * 9 / 10);
}
