#include "uavplan/tsp.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "uavplan/rng.hpp"

namespace uavplan::tsp {

namespace {

constexpr double kGainEps = 1e-9;  // gains below this are float noise, not moves

std::vector<std::size_t> positions_of(const std::vector<std::size_t>& order) {
    std::vector<std::size_t> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    return pos;
}

// Nearest-neighbor candidate lists, ties broken by node index.
std::vector<std::vector<std::size_t>> candidate_lists(const DistanceMatrix& d,
                                                      std::size_t count) {
    std::vector<std::vector<std::size_t>> cand(d.n);
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < d.n; ++i) {
        others.clear();
        for (std::size_t j = 0; j < d.n; ++j)
            if (j != i) others.push_back(j);
        std::sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
            return d.at(i, a) != d.at(i, b) ? d.at(i, a) < d.at(i, b) : a < b;
        });
        if (others.size() > count) others.resize(count);
        cand[i] = others;
    }
    return cand;
}

// Working tour with O(1) successor lookups and cyclic segment reversal.
struct WorkTour {
    std::vector<std::size_t> order;
    std::vector<std::size_t> pos;

    explicit WorkTour(std::vector<std::size_t> o) : order(std::move(o)), pos(positions_of(order)) {}

    std::size_t n() const { return order.size(); }
    std::size_t rel(std::size_t anchor, std::size_t city) const {
        return (pos[city] + n() - pos[anchor]) % n();
    }
    std::size_t at_rel(std::size_t anchor, std::size_t r) const {
        return order[(pos[anchor] + r) % n()];
    }

    // Reverse the cyclic block [anchor+a .. anchor+b] (relative offsets).
    void reverse_rel(std::size_t anchor, std::size_t a, std::size_t b) {
        std::size_t i = (pos[anchor] + a) % n();
        std::size_t j = (pos[anchor] + b) % n();
        std::size_t steps = (b - a + 1) / 2;
        for (std::size_t s = 0; s < steps; ++s) {
            std::swap(order[i], order[j]);
            pos[order[i]] = i;
            pos[order[j]] = j;
            i = (i + 1) % n();
            j = (j + n() - 1) % n();
        }
    }
};

using EdgeKey = std::uint64_t;
EdgeKey edge_key(std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

// Depth-first search for the best sequential exchange chain anchored at t1.
// Each level applies one tentative 2-opt move: break (t1, succ(t1)), add the
// candidate edge, and close back to t1. The cumulative positive-gain rule
// prunes; the deepest profitable closing is kept. Moves are recorded as the
// relative reversal ranges so the winner can be replayed on the real tour.
struct ChainSearch {
    const DistanceMatrix& d;
    const std::vector<std::vector<std::size_t>>& cand;
    const LKParams& params;
    WorkTour& t;
    std::size_t t1;

    ChainSearch(const DistanceMatrix& d_, const std::vector<std::vector<std::size_t>>& cand_,
                const LKParams& params_, WorkTour& t_, std::size_t t1_)
        : d(d_), cand(cand_), params(params_), t(t_), t1(t1_) {}

    double best_gain = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> best_moves;
    std::vector<std::pair<std::size_t, std::size_t>> cur_moves;
    std::vector<EdgeKey> removed, added;

    void search(std::size_t level, double budget, double realized) {
        const std::size_t u = t.at_rel(t1, 1);
        // Deeper levels only follow the most promising candidates.
        const std::size_t breadth = level <= 2 ? params.candidates : 2;
        std::size_t tried = 0;

        for (std::size_t c : cand[u]) {
            if (tried >= breadth) break;
            const std::size_t rc = t.rel(t1, c);
            if (rc < 2) continue;  // c is t1 or u
            if (rc == 2) continue;  // (u, c) already a tour edge
            const double gain_rule = budget - d.at(u, c);
            if (gain_rule <= 0.0) continue;
            if (std::find(removed.begin(), removed.end(), edge_key(u, c)) != removed.end())
                continue;
            const std::size_t v = t.at_rel(t1, rc - 1);
            if (std::find(added.begin(), added.end(), edge_key(v, c)) != added.end()) continue;
            ++tried;

            const double move_gain =
                d.at(t1, u) + d.at(v, c) - d.at(u, c) - d.at(t1, v);
            t.reverse_rel(t1, 1, rc - 1);
            cur_moves.emplace_back(1, rc - 1);
            removed.push_back(edge_key(v, c));
            added.push_back(edge_key(u, c));

            const double new_realized = realized + move_gain;
            if (new_realized > best_gain + kGainEps) {
                best_gain = new_realized;
                best_moves = cur_moves;
            }
            if (level < params.max_depth) {
                search(level + 1, gain_rule + d.at(v, c), new_realized);
            }

            added.pop_back();
            removed.pop_back();
            cur_moves.pop_back();
            t.reverse_rel(t1, 1, rc - 1);  // reversal is its own inverse
        }
    }
};

// One best-improvement pass: evaluate chains from every anchor in both tour
// orientations, apply the single best, repeat until no positive gain remains.
double lk_descent(WorkTour& tour, const DistanceMatrix& d,
                  const std::vector<std::vector<std::size_t>>& cand, const LKParams& params) {
    double total_gain = 0.0;
    while (true) {
        double best_gain = 0.0;
        std::vector<std::pair<std::size_t, std::size_t>> best_moves;
        std::size_t best_t1 = 0;
        bool best_reversed = false;

        for (int orientation = 0; orientation < 2; ++orientation) {
            WorkTour probe = tour;
            if (orientation == 1) {
                std::reverse(probe.order.begin(), probe.order.end());
                probe.pos = positions_of(probe.order);
            }
            for (std::size_t i = 0; i < probe.n(); ++i) {
                ChainSearch cs{d, cand, params, probe, probe.order[i]};
                cs.search(1, d.at(probe.order[i], probe.at_rel(probe.order[i], 1)), 0.0);
                if (cs.best_gain > best_gain + kGainEps) {
                    best_gain = cs.best_gain;
                    best_moves = cs.best_moves;
                    best_t1 = probe.order[i];
                    best_reversed = orientation == 1;
                }
            }
        }
        if (best_gain <= kGainEps) break;

        if (best_reversed) {
            std::reverse(tour.order.begin(), tour.order.end());
            tour.pos = positions_of(tour.order);
        }
        for (const auto& [a, b] : best_moves) tour.reverse_rel(best_t1, a, b);
        total_gain += best_gain;
    }
    return total_gain;
}

std::vector<std::size_t> double_bridge(const std::vector<std::size_t>& order, Rng& rng) {
    const std::size_t n = order.size();
    if (n < 8) {
        // Too short for three interior cuts; fall back to swapping two cities.
        auto kicked = order;
        const std::size_t i = 1 + rng.uniform_int(n - 1);
        const std::size_t j = 1 + rng.uniform_int(n - 1);
        std::swap(kicked[i], kicked[j]);
        return kicked;
    }
    std::size_t p = 1 + rng.uniform_int(n - 3);
    std::size_t q = p + 1 + rng.uniform_int(n - p - 2);
    std::size_t r = q + 1 + rng.uniform_int(n - q - 1);
    std::vector<std::size_t> kicked;
    kicked.reserve(n);
    kicked.insert(kicked.end(), order.begin(), order.begin() + p);
    kicked.insert(kicked.end(), order.begin() + q, order.begin() + r);
    kicked.insert(kicked.end(), order.begin() + p, order.begin() + q);
    kicked.insert(kicked.end(), order.begin() + r, order.end());
    return kicked;
}

std::vector<std::size_t> rotate_to_depot(std::vector<std::size_t> order) {
    auto it = std::find(order.begin(), order.end(), std::size_t{0});
    std::rotate(order.begin(), it, order.end());
    return order;
}

}  // namespace

DistanceMatrix distance_matrix(const Vec3& depot, const std::vector<Vec3>& items) {
    if (items.empty()) throw std::invalid_argument("distance_matrix: items must be nonempty");
    std::vector<Vec3> nodes;
    nodes.reserve(items.size() + 1);
    nodes.push_back(depot);
    nodes.insert(nodes.end(), items.begin(), items.end());

    DistanceMatrix m;
    m.n = nodes.size();
    m.d.assign(m.n * m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = i + 1; j < m.n; ++j)
            m.at(i, j) = m.at(j, i) = distance(nodes[i], nodes[j]);
    return m;
}

double tour_length(const Tour& tour, const DistanceMatrix& d) {
    if (tour.order.size() != d.n)
        throw std::invalid_argument("tour_length: tour size does not match matrix");
    double len = 0.0;
    for (std::size_t i = 0; i < tour.order.size(); ++i) {
        const std::size_t a = tour.order[i];
        const std::size_t b = tour.order[(i + 1) % tour.order.size()];
        len += d.at(a, b);
    }
    return len;
}

TourValidation validate_tour(const Tour& tour, std::size_t K) {
    if (tour.order.size() != K + 1)
        return {false, "expected " + std::to_string(K + 1) + " nodes, got " +
                           std::to_string(tour.order.size())};
    std::vector<std::size_t> degree(K + 1, 0);
    for (std::size_t node : tour.order) {
        if (node > K) return {false, "node " + std::to_string(node) + " out of range"};
        if (++degree[node] > 1)
            return {false, "node " + std::to_string(node) + " visited more than once"};
    }
    for (std::size_t node = 0; node <= K; ++node)
        if (degree[node] == 0) return {false, "node " + std::to_string(node) + " missing"};
    if (tour.order.front() != 0) return {false, "tour must start at the depot (node 0)"};
    return {true, ""};
}

Tour solve_exact(const DistanceMatrix& d) {
    const std::size_t n = d.n;
    if (n < 2) throw std::invalid_argument("solve_exact: need at least 2 nodes");
    if (n > 13) throw std::invalid_argument("solve_exact: n > 13 exceeds the DP memory guard");

    const std::size_t m = n - 1;  // items, bit i <-> node i+1
    const std::size_t full = (std::size_t{1} << m) - 1;

    // finish[mask][j]: cheapest path from node j through every item in mask,
    // ending back at the depot.
    std::vector<double> finish((full + 1) * n, 0.0);
    auto F = [&](std::size_t mask, std::size_t j) -> double& { return finish[mask * n + j]; };

    for (std::size_t j = 0; j < n; ++j) F(0, j) = d.at(j, 0);
    for (std::size_t mask = 1; mask <= full; ++mask) {
        for (std::size_t j = 0; j < n; ++j) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < m; ++c) {
                if (!(mask & (std::size_t{1} << c))) continue;
                best = std::min(best, d.at(j, c + 1) + F(mask ^ (std::size_t{1} << c), c + 1));
            }
            F(mask, j) = best;
        }
    }

    // Greedy forward reconstruction: always take the smallest next node that
    // still completes optimally, so ties yield the lexicographically smallest
    // optimal tour.
    Tour tour;
    tour.order.push_back(0);
    std::size_t cur = 0;
    std::size_t mask = full;
    while (mask != 0) {
        for (std::size_t c = 0; c < m; ++c) {
            const std::size_t bit = std::size_t{1} << c;
            if (!(mask & bit)) continue;
            if (d.at(cur, c + 1) + F(mask ^ bit, c + 1) == F(mask, cur)) {
                tour.order.push_back(c + 1);
                cur = c + 1;
                mask ^= bit;
                break;
            }
        }
    }
    return tour;
}

Tour nearest_neighbor_tour(const DistanceMatrix& d) {
    std::vector<bool> used(d.n, false);
    Tour tour;
    tour.order.reserve(d.n);
    tour.order.push_back(0);
    used[0] = true;
    std::size_t cur = 0;
    for (std::size_t step = 1; step < d.n; ++step) {
        std::size_t best = d.n;
        for (std::size_t j = 0; j < d.n; ++j) {
            if (used[j]) continue;
            if (best == d.n || d.at(cur, j) < d.at(cur, best)) best = j;
        }
        tour.order.push_back(best);
        used[best] = true;
        cur = best;
    }
    return tour;
}

Tour solve_lk(const DistanceMatrix& d, std::uint64_t seed, const LKParams& params) {
    if (d.n < 2) throw std::invalid_argument("solve_lk: need at least 2 nodes");
    if (d.n == 2) return Tour{{0, 1}};

    const auto cand = candidate_lists(d, params.candidates);
    Rng rng(seed);

    WorkTour best(nearest_neighbor_tour(d).order);
    lk_descent(best, d, cand, params);
    double best_len = tour_length(Tour{best.order}, d);

    for (std::size_t restart = 0; restart < params.restarts; ++restart) {
        WorkTour trial(double_bridge(best.order, rng));
        lk_descent(trial, d, cand, params);
        const double len = tour_length(Tour{trial.order}, d);
        if (len < best_len - kGainEps) {
            best = trial;
            best_len = len;
        }
    }
    return Tour{rotate_to_depot(best.order)};
}

}  // namespace uavplan::tsp
