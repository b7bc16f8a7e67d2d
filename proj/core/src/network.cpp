#include "uavplan/network.hpp"

#include <cmath>
#include <stdexcept>

namespace uavplan::ddpg {

namespace {

std::size_t total_params(const std::vector<std::size_t>& sizes) {
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) total += sizes[l] * sizes[l + 1] + sizes[l + 1];
    return total;
}

}  // namespace

std::size_t Network::weight_offset(std::size_t layer) const {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l) off += sizes[l] * sizes[l + 1] + sizes[l + 1];
    return off;
}

std::size_t Network::bias_offset(std::size_t layer) const {
    return weight_offset(layer) + sizes[layer] * sizes[layer + 1];
}

bool Network::finite() const {
    for (double p : params)
        if (!std::isfinite(p)) return false;
    return true;
}

Network Network::make(std::vector<std::size_t> sizes, OutputSquash squash, double squash_scale,
                      Rng& rng) {
    if (sizes.size() < 2) throw std::invalid_argument("Network: need input and output layers");
    Network net;
    net.sizes = std::move(sizes);
    net.squash = squash;
    net.squash_scale = squash_scale;
    net.params.resize(total_params(net.sizes));

    // He-uniform for the rectifier layers; the output layer starts near zero
    // so initial actions and values are small.
    for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
        const std::size_t fan_in = net.sizes[l];
        const std::size_t fan_out = net.sizes[l + 1];
        const bool last = l + 2 == net.sizes.size();
        const double limit = last ? 3e-3 : std::sqrt(6.0 / static_cast<double>(fan_in));
        double* w = net.params.data() + net.weight_offset(l);
        for (std::size_t k = 0; k < fan_in * fan_out; ++k) w[k] = rng.uniform(-limit, limit);
        double* b = net.params.data() + net.bias_offset(l);
        for (std::size_t k = 0; k < fan_out; ++k) b[k] = 0.0;
    }
    return net;
}

void forward(const Network& net, const double* input, NetScratch& s) {
    const std::size_t L = net.layer_count();
    s.act.resize(L + 1);
    s.pre.resize(L);
    s.act[0].assign(input, input + net.input_size());

    for (std::size_t l = 0; l < L; ++l) {
        const std::size_t in = net.sizes[l];
        const std::size_t out = net.sizes[l + 1];
        const double* W = net.params.data() + net.weight_offset(l);
        const double* b = net.params.data() + net.bias_offset(l);
        const double* a = s.act[l].data();

        s.pre[l].resize(out);
        s.act[l + 1].resize(out);
        double* z = s.pre[l].data();
        double* y = s.act[l + 1].data();

        for (std::size_t o = 0; o < out; ++o) {
            const double* row = W + o * in;
            double acc = b[o];
            for (std::size_t i = 0; i < in; ++i) acc += row[i] * a[i];
            z[o] = acc;
        }
        if (l + 1 < L) {
            for (std::size_t o = 0; o < out; ++o) y[o] = z[o] > 0.0 ? z[o] : 0.0;
        } else if (net.squash == OutputSquash::scaled_tanh) {
            for (std::size_t o = 0; o < out; ++o) y[o] = net.squash_scale * std::tanh(z[o]);
        } else {
            for (std::size_t o = 0; o < out; ++o) y[o] = z[o];
        }
    }
}

void backward(const Network& net, NetScratch& s, const double* out_grad,
              std::vector<double>* grad_accum, double* input_grad) {
    const std::size_t L = net.layer_count();
    std::vector<double>& delta = s.delta_a;
    std::vector<double>& next = s.delta_b;

    // Output-layer delta through the squash.
    delta.assign(out_grad, out_grad + net.output_size());
    if (net.squash == OutputSquash::scaled_tanh) {
        const auto& z = s.pre[L - 1];
        for (std::size_t o = 0; o < delta.size(); ++o) {
            const double t = std::tanh(z[o]);
            delta[o] *= net.squash_scale * (1.0 - t * t);
        }
    }

    for (std::size_t l = L; l-- > 0;) {
        const std::size_t in = net.sizes[l];
        const std::size_t out = net.sizes[l + 1];
        const double* W = net.params.data() + net.weight_offset(l);
        const double* a = s.act[l].data();

        if (grad_accum) {
            double* gW = grad_accum->data() + net.weight_offset(l);
            double* gb = grad_accum->data() + net.bias_offset(l);
            for (std::size_t o = 0; o < out; ++o) {
                const double dz = delta[o];
                if (dz == 0.0) continue;
                double* grow = gW + o * in;
                for (std::size_t i = 0; i < in; ++i) grow[i] += dz * a[i];
                gb[o] += dz;
            }
        }

        const bool need_input = l > 0 || input_grad != nullptr;
        if (!need_input) break;

        next.assign(in, 0.0);
        for (std::size_t o = 0; o < out; ++o) {
            const double dz = delta[o];
            if (dz == 0.0) continue;
            const double* row = W + o * in;
            for (std::size_t i = 0; i < in; ++i) next[i] += dz * row[i];
        }
        if (l > 0) {
            const auto& z = s.pre[l - 1];
            for (std::size_t i = 0; i < in; ++i)
                if (z[i] <= 0.0) next[i] = 0.0;  // rectifier gate
        }
        std::swap(delta, next);
    }

    if (input_grad) {
        for (std::size_t i = 0; i < net.input_size(); ++i) input_grad[i] = delta[i];
    }
}

double global_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

void clip_global_norm(std::vector<double>& v, double max_norm) {
    const double n = global_norm(v);
    if (n <= max_norm || n == 0.0) return;
    const double scale = max_norm / n;
    for (double& x : v) x *= scale;
}

}  // namespace uavplan::ddpg
