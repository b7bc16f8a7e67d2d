#pragma once

// Central finite-difference oracle for the actor/critic gradients. The probes
// skip parameters whose +/-h evaluations straddle a rectifier kink, where a
// secant is not a derivative estimate; skipped fractions are reported so the
// caller can assert they stay negligible.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "uavplan/ddpg.hpp"

namespace testutil {

using uavplan::StateVector;
using uavplan::Vec3;
using uavplan::ddpg::Network;
using uavplan::ddpg::NetScratch;

struct GradSample {
    StateVector s;
    Vec3 a;
    double target = 0.0;
};

inline std::vector<char> relu_signs(const Network& net, const double* input) {
    NetScratch scratch;
    forward(net, input, scratch);
    std::vector<char> signs;
    for (std::size_t l = 0; l + 1 < net.layer_count(); ++l)
        for (double z : scratch.pre[l]) signs.push_back(z > 0.0 ? 1 : 0);
    return signs;
}

inline double critic_loss(const Network& critic, const std::vector<GradSample>& batch) {
    NetScratch scratch;
    double loss = 0.0;
    for (const auto& b : batch) {
        StateVector x = b.s;
        x.push_back(b.a.x / critic.action_scale);
        x.push_back(b.a.y / critic.action_scale);
        x.push_back(b.a.z / critic.action_scale);
        forward(critic, x.data(), scratch);
        const double e = scratch.act.back()[0] - b.target;
        loss += e * e / static_cast<double>(batch.size());
    }
    return loss;
}

inline std::vector<double> critic_loss_grad(const Network& critic,
                                            const std::vector<GradSample>& batch) {
    NetScratch scratch;
    std::vector<double> grad(critic.param_count(), 0.0);
    for (const auto& b : batch) {
        StateVector x = b.s;
        x.push_back(b.a.x / critic.action_scale);
        x.push_back(b.a.y / critic.action_scale);
        x.push_back(b.a.z / critic.action_scale);
        forward(critic, x.data(), scratch);
        const double upstream =
            2.0 * (scratch.act.back()[0] - b.target) / static_cast<double>(batch.size());
        backward(critic, scratch, &upstream, &grad, nullptr);
    }
    return grad;
}

inline double actor_objective(const Network& actor, const Network& critic,
                              const std::vector<GradSample>& batch) {
    NetScratch scratch;
    double total = 0.0;
    for (const auto& b : batch) {
        forward(actor, b.s.data(), scratch);
        StateVector x = b.s;
        for (double v : scratch.act.back()) x.push_back(v / critic.action_scale);
        forward(critic, x.data(), scratch);
        total += scratch.act.back()[0] / static_cast<double>(batch.size());
    }
    return total;
}

inline std::vector<double> actor_objective_grad(const Network& actor, const Network& critic,
                                                const std::vector<GradSample>& batch) {
    NetScratch actor_scratch, critic_scratch;
    std::vector<double> grad(actor.param_count(), 0.0);
    std::vector<double> critic_in(critic.input_size());
    for (const auto& b : batch) {
        forward(actor, b.s.data(), actor_scratch);
        StateVector x = b.s;
        for (double v : actor_scratch.act.back()) x.push_back(v / critic.action_scale);
        forward(critic, x.data(), critic_scratch);
        const double upstream = 1.0 / static_cast<double>(batch.size());
        backward(critic, critic_scratch, &upstream, nullptr, critic_in.data());
        double da[3];
        for (std::size_t i = 0; i < 3; ++i)
            da[i] = critic_in[b.s.size() + i] / critic.action_scale;
        backward(actor, actor_scratch, da, &grad, nullptr);
    }
    return grad;
}

struct FdReport {
    double max_rel_err = 0.0;
    std::size_t checked = 0;
    std::size_t skipped = 0;
};

inline double rel_err(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-6});
    return std::abs(a - b) / scale;
}

// Collects the rectifier sign pattern over every sample for each involved net.
template <typename SignFn>
FdReport fd_compare(Network& probed, const std::vector<double>& analytic, double h,
                    const std::function<double()>& objective, const SignFn& signs) {
    FdReport report;
    for (std::size_t j = 0; j < probed.params.size(); ++j) {
        const double saved = probed.params[j];
        probed.params[j] = saved + h;
        const double f_plus = objective();
        const auto signs_plus = signs();
        probed.params[j] = saved - h;
        const double f_minus = objective();
        const auto signs_minus = signs();
        probed.params[j] = saved;
        if (signs_plus != signs_minus) {
            ++report.skipped;  // kink crossed; the secant is invalid here
            continue;
        }
        const double fd = (f_plus - f_minus) / (2.0 * h);
        report.max_rel_err = std::max(report.max_rel_err, rel_err(fd, analytic[j]));
        ++report.checked;
    }
    return report;
}

inline FdReport fd_check_critic(Network& critic, const std::vector<GradSample>& batch,
                                double h = 1e-5) {
    const auto analytic = critic_loss_grad(critic, batch);
    auto all_signs = [&] {
        std::vector<char> signs;
        for (const auto& b : batch) {
            StateVector x = b.s;
            x.push_back(b.a.x / critic.action_scale);
            x.push_back(b.a.y / critic.action_scale);
            x.push_back(b.a.z / critic.action_scale);
            const auto s = relu_signs(critic, x.data());
            signs.insert(signs.end(), s.begin(), s.end());
        }
        return signs;
    };
    return fd_compare(critic, analytic, h, [&] { return critic_loss(critic, batch); },
                      all_signs);
}

inline FdReport fd_check_actor(Network& actor, const Network& critic,
                               const std::vector<GradSample>& batch, double h = 1e-5) {
    const auto analytic = actor_objective_grad(actor, critic, batch);
    NetScratch scratch;
    auto all_signs = [&] {
        std::vector<char> signs;
        for (const auto& b : batch) {
            const auto sa = relu_signs(actor, b.s.data());
            signs.insert(signs.end(), sa.begin(), sa.end());
            forward(actor, b.s.data(), scratch);
            StateVector x = b.s;
            for (double v : scratch.act.back()) x.push_back(v / critic.action_scale);
            const auto sc = relu_signs(critic, x.data());
            signs.insert(signs.end(), sc.begin(), sc.end());
        }
        return signs;
    };
    return fd_compare(actor, analytic, h,
                      [&] { return actor_objective(actor, critic, batch); }, all_signs);
}

}  // namespace testutil
