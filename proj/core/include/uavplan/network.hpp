#pragma once

#include <cstddef>
#include <vector>

#include "uavplan/rng.hpp"

namespace uavplan::ddpg {

enum class OutputSquash { identity, scaled_tanh };

// Dense feedforward net with rectifier hidden units. Parameters live in one
// flat vector (W then b per layer) so soft updates, clipping, serialization
// and finite-difference probes all operate on a single array.
struct Network {
    std::vector<std::size_t> sizes;  // [input, hidden..., output]
    OutputSquash squash = OutputSquash::identity;
    double squash_scale = 1.0;       // output bound for scaled_tanh
    // Critics divide the concatenated action by this before the first layer,
    // keeping every input near unit scale; actors ignore it.
    double action_scale = 1.0;
    std::vector<double> params;

    static Network make(std::vector<std::size_t> sizes, OutputSquash squash, double squash_scale,
                        Rng& rng);

    std::size_t input_size() const { return sizes.front(); }
    std::size_t output_size() const { return sizes.back(); }
    std::size_t layer_count() const { return sizes.size() - 1; }
    std::size_t param_count() const { return params.size(); }
    std::size_t weight_offset(std::size_t layer) const;
    std::size_t bias_offset(std::size_t layer) const;
    bool same_architecture(const Network& o) const {
        return sizes == o.sizes && squash == o.squash && squash_scale == o.squash_scale &&
               action_scale == o.action_scale;
    }
    bool finite() const;
};

// Per-layer activations cached by forward() for the matching backward() call.
struct NetScratch {
    std::vector<std::vector<double>> act;  // act[0] = input, act[L] = output
    std::vector<std::vector<double>> pre;  // pre-activation of each layer
    std::vector<double> delta_a;           // backprop work buffers
    std::vector<double> delta_b;
};

// Evaluates the net on `input` (length input_size); output is act.back().
void forward(const Network& net, const double* input, NetScratch& scratch);

// Reverse-mode sweep of dL/d(output) through the cached trace. Parameter
// gradients accumulate into grad_accum (layout of params) when non-null;
// dL/d(input) is written to input_grad when non-null.
void backward(const Network& net, NetScratch& scratch, const double* out_grad,
              std::vector<double>* grad_accum, double* input_grad);

double global_norm(const std::vector<double>& v);
void clip_global_norm(std::vector<double>& v, double max_norm);

}  // namespace uavplan::ddpg
