#include <doctest.h>

#include "gradcheck.hpp"
#include "uavplan/network.hpp"
#include "uavplan/rng.hpp"

using namespace uavplan;
using namespace uavplan::ddpg;
using testutil::GradSample;

namespace {

std::vector<GradSample> random_batch(std::size_t n, std::size_t sdim, Rng& rng) {
    std::vector<GradSample> batch(n);
    for (auto& b : batch) {
        b.s.resize(sdim);
        for (auto& v : b.s) v = rng.uniform(-1.0, 1.0);
        b.a = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        b.target = rng.uniform(-5.0, 5.0);
    }
    return batch;
}

// Nonzero output layers, unlike the near-zero default initialization, so the
// finite-difference probes see meaningful curvature everywhere.
void randomize(Network& net, Rng& rng, double scale = 0.5) {
    for (auto& p : net.params) p = rng.uniform(-scale, scale);
}

}  // namespace

TEST_CASE("network shapes, parameter layout and determinism") {
    Rng rng(1);
    const Network net = Network::make({4, 8, 3}, OutputSquash::scaled_tanh, 2.0, rng);
    CHECK(net.param_count() == 4 * 8 + 8 + 8 * 3 + 3);
    CHECK(net.bias_offset(0) == 32);
    CHECK(net.weight_offset(1) == 40);

    NetScratch s1, s2;
    const std::vector<double> x{0.1, -0.2, 0.3, 0.7};
    forward(net, x.data(), s1);
    forward(net, x.data(), s2);
    CHECK(s1.act.back() == s2.act.back());
    for (double y : s1.act.back()) CHECK(std::abs(y) <= 2.0);
}

TEST_CASE("zero parameters give zero output through either squash") {
    Rng rng(2);
    for (auto squash : {OutputSquash::identity, OutputSquash::scaled_tanh}) {
        Network net = Network::make({5, 6, 2}, squash, 3.0, rng);
        std::fill(net.params.begin(), net.params.end(), 0.0);
        NetScratch s;
        const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
        forward(net, x.data(), s);
        CHECK(s.act.back() == std::vector<double>{0.0, 0.0});
    }
}

TEST_CASE("critic gradient matches central finite differences") {
    Rng rng(3);
    Network critic = Network::make({8, 10, 8, 1}, OutputSquash::identity, 1.0, rng);
    randomize(critic, rng);
    const auto batch = random_batch(6, 5, rng);

    const auto report = testutil::fd_check_critic(critic, batch);
    CHECK(report.max_rel_err <= 1e-4);
    CHECK(report.checked > critic.param_count() * 9 / 10);
}

TEST_CASE("actor gradient through the composed critic matches finite differences") {
    Rng rng(4);
    Network actor = Network::make({5, 10, 8, 3}, OutputSquash::scaled_tanh, 2.0, rng);
    Network critic = Network::make({8, 10, 8, 1}, OutputSquash::identity, 1.0, rng);
    randomize(actor, rng);
    randomize(critic, rng);
    const auto batch = random_batch(6, 5, rng);

    const auto report = testutil::fd_check_actor(actor, critic, batch);
    CHECK(report.max_rel_err <= 1e-4);
    CHECK(report.checked > actor.param_count() * 9 / 10);
}

TEST_CASE("global norm clipping rescales only oversized vectors") {
    std::vector<double> v{3.0, 4.0};
    clip_global_norm(v, 10.0);
    CHECK(v == std::vector<double>{3.0, 4.0});
    clip_global_norm(v, 1.0);
    CHECK(global_norm(v) == doctest::Approx(1.0));
    CHECK(v[0] == doctest::Approx(0.6));
}
