// Copyright 2026 The PhaseForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small dense networks with ReLU hidden layers and a linear output, trained
// with Adam. Parameters live in one flat array, layer by layer, each layer
// stored as its row-major weight matrix (out x in) followed by its biases.

#ifndef PHASEFORGE_NN_HPP_
#define PHASEFORGE_NN_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phaseforge/random.hpp"

namespace phaseforge {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DenseNet {
 public:
  // All parameters zero.
  explicit DenseNet(std::vector<std::size_t> layer_dims);
  // He-uniform weights, zero biases.
  DenseNet(std::vector<std::size_t> layer_dims, Rng& rng);

  const std::vector<std::size_t>& layer_dims() const { return dims_; }
  std::size_t input_size() const { return dims_.front(); }
  std::size_t output_size() const { return dims_.back(); }
  std::size_t num_layers() const { return dims_.size() - 1; }
  std::size_t num_params() const { return params_.size(); }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::span<double> weights(std::size_t layer);
  std::span<double> biases(std::size_t layer);
  std::span<const double> weights(std::size_t layer) const;
  std::span<const double> biases(std::size_t layer) const;

  // Activations of every layer, input first; kept for backprop.
  struct Tape {
    std::vector<std::vector<double>> activations;
  };

  // Throws std::invalid_argument on an input size mismatch.
  std::vector<double> forward(std::span<const double> x) const;
  std::vector<double> forward(std::span<const double> x, Tape& tape) const;

  // Accumulates d(loss)/d(params) into `grad` (num_params long) given
  // d(loss)/d(output). `relu_mask = false` skips the ReLU derivative; that is
  // wrong on purpose and exists for negative-control gradient checks.
  void backward(const Tape& tape, std::span<const double> grad_out,
                std::span<double> grad, bool relu_mask = true) const;

  friend bool operator==(const DenseNet&, const DenseNet&) = default;

 private:
  std::size_t offset(std::size_t layer) const { return offsets_[layer]; }

  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

class Adam {
 public:
  struct Options {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
  };

  Adam(std::size_t num_params, Options options);

  void step(std::span<double> params, std::span<const double> grad);
  const Options& options() const { return options_; }

 private:
  Options options_;
  std::vector<double> m_;
  std::vector<double> v_;
  long t_ = 0;
};

// Per-sample loss: returns the loss for network output `out` and writes
// d(loss)/d(out) into `grad_out`.
using SampleLoss =
    std::function<double(std::span<const double> out, std::span<double> grad_out)>;

// One optimiser step on the mean loss over the batch. Returns the loss before
// the update. Throws TrainingError if the loss is not finite.
double train_step(DenseNet& net, Adam& opt,
                  std::span<const std::vector<double>> inputs,
                  std::span<const SampleLoss> losses);

// Mean loss and its parameter gradient over a batch, without updating.
double loss_and_gradient(const DenseNet& net,
                         std::span<const std::vector<double>> inputs,
                         std::span<const SampleLoss> losses,
                         std::span<double> grad, bool relu_mask = true);

struct GradCheckOptions {
  double step = 1e-5;
  std::size_t max_params = 200;  // random subset when the net is larger
  bool corrupt_backward = false;
};

// Compares the analytic gradient to central finite differences on a random
// subset of parameters. The error is ||analytic - numeric|| /
// max(||analytic|| + ||numeric||, 1e-12) over the checked coordinates.
double grad_check(const DenseNet& net, std::span<const double> x,
                  const SampleLoss& loss, Rng& rng,
                  const GradCheckOptions& options = {});

// Common losses.
SampleLoss squared_error(std::vector<double> target);
SampleLoss selected_squared_error(std::size_t index, double target);

std::vector<double> softmax(std::span<const double> logits);
std::size_t argmax(std::span<const double> values);  // ties: lowest index

}  // namespace phaseforge

#endif  // PHASEFORGE_NN_HPP_
