#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavplan/vec3.hpp"

namespace uavplan::tsp {

// Symmetric Euclidean distances over K+1 nodes; node 0 is the depot.
struct DistanceMatrix {
    std::size_t n = 0;
    std::vector<double> d;  // row-major n*n

    double at(std::size_t i, std::size_t j) const { return d[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return d[i * n + j]; }
};

// Visiting order starting at node 0; the closing edge back to 0 is implicit.
struct Tour {
    std::vector<std::size_t> order;
};

struct LKParams {
    std::size_t max_depth = 5;      // chained edge exchanges per move
    std::size_t candidates = 8;     // nearest-neighbor candidate list size
    std::size_t restarts = 5;       // double-bridge restarts beyond the first descent
};

struct TourValidation {
    bool ok = false;
    std::string violation;  // first violation found, empty when ok
};

DistanceMatrix distance_matrix(const Vec3& depot, const std::vector<Vec3>& items);

// Sum of consecutive edges plus the closing edge. Throws on size mismatch.
double tour_length(const Tour& tour, const DistanceMatrix& d);

// Permutation and single-cycle checks: each node exactly once, depot present,
// order starts at the depot.
TourValidation validate_tour(const Tour& tour, std::size_t K);

// Exact minimum tour by subset dynamic programming; the testing oracle for the
// heuristic. Refuses n > 13 (2^n * n^2 memory guard). Among optimal tours the
// lexicographically smallest order is returned.
Tour solve_exact(const DistanceMatrix& d);

// Lin-Kernighan variable-depth local search: nearest-neighbor start, chained
// 2-opt exchanges under the positive-gain rule, best-improvement acceptance,
// seeded double-bridge restarts. Never returns a tour longer than the
// nearest-neighbor initialization; deterministic for fixed seed and params.
Tour solve_lk(const DistanceMatrix& d, std::uint64_t seed, const LKParams& params = {});

Tour nearest_neighbor_tour(const DistanceMatrix& d);

}  // namespace uavplan::tsp
