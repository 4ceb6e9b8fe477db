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

#include "phaseforge/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace phaseforge {

DenseNet::DenseNet(std::vector<std::size_t> layer_dims)
    : dims_(std::move(layer_dims)) {
  if (dims_.size() < 2) {
    throw std::invalid_argument("a network needs input and output dims");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    if (dims_[l] == 0 || dims_[l + 1] == 0) {
      throw std::invalid_argument("layer dims must be positive");
    }
    offsets_.push_back(total);
    total += dims_[l] * dims_[l + 1] + dims_[l + 1];
  }
  params_.assign(total, 0.0);
}

DenseNet::DenseNet(std::vector<std::size_t> layer_dims, Rng& rng)
    : DenseNet(std::move(layer_dims)) {
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(dims_[l]));
    for (double& w : weights(l)) w = rng.uniform(-bound, bound);
  }
}

std::span<double> DenseNet::weights(std::size_t layer) {
  return {params_.data() + offset(layer), dims_[layer] * dims_[layer + 1]};
}
std::span<double> DenseNet::biases(std::size_t layer) {
  return {params_.data() + offset(layer) + dims_[layer] * dims_[layer + 1],
          dims_[layer + 1]};
}
std::span<const double> DenseNet::weights(std::size_t layer) const {
  return {params_.data() + offset(layer), dims_[layer] * dims_[layer + 1]};
}
std::span<const double> DenseNet::biases(std::size_t layer) const {
  return {params_.data() + offset(layer) + dims_[layer] * dims_[layer + 1],
          dims_[layer + 1]};
}

std::vector<double> DenseNet::forward(std::span<const double> x) const {
  Tape tape;
  return forward(x, tape);
}

std::vector<double> DenseNet::forward(std::span<const double> x,
                                      Tape& tape) const {
  if (x.size() != input_size()) {
    throw std::invalid_argument("network input has " + std::to_string(x.size()) +
                                " entries, expected " +
                                std::to_string(input_size()));
  }
  tape.activations.assign(1, std::vector<double>(x.begin(), x.end()));
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const std::vector<double>& in = tape.activations.back();
    const std::size_t n_in = dims_[l];
    const std::size_t n_out = dims_[l + 1];
    auto w = weights(l);
    auto b = biases(l);
    std::vector<double> out(n_out);
    for (std::size_t o = 0; o < n_out; ++o) {
      double acc = b[o];
      const double* row = w.data() + o * n_in;
      for (std::size_t i = 0; i < n_in; ++i) acc += row[i] * in[i];
      // Hidden layers are ReLU; the output layer is linear.
      out[o] = (l + 1 < num_layers()) ? std::max(acc, 0.0) : acc;
    }
    tape.activations.push_back(std::move(out));
  }
  return tape.activations.back();
}

void DenseNet::backward(const Tape& tape, std::span<const double> grad_out,
                        std::span<double> grad, bool relu_mask) const {
  std::vector<double> delta(grad_out.begin(), grad_out.end());
  for (std::size_t l = num_layers(); l-- > 0;) {
    const std::vector<double>& in = tape.activations[l];
    const std::size_t n_in = dims_[l];
    const std::size_t n_out = dims_[l + 1];
    double* gw = grad.data() + offset(l);
    double* gb = gw + n_in * n_out;
    auto w = weights(l);
    for (std::size_t o = 0; o < n_out; ++o) {
      gb[o] += delta[o];
      for (std::size_t i = 0; i < n_in; ++i) gw[o * n_in + i] += delta[o] * in[i];
    }
    if (l == 0) break;
    std::vector<double> prev(n_in, 0.0);
    for (std::size_t o = 0; o < n_out; ++o) {
      const double* row = w.data() + o * n_in;
      for (std::size_t i = 0; i < n_in; ++i) prev[i] += row[i] * delta[o];
    }
    if (relu_mask) {
      // `in` is this layer's input, i.e. the previous layer's ReLU output.
      for (std::size_t i = 0; i < n_in; ++i) {
        if (in[i] <= 0.0) prev[i] = 0.0;
      }
    }
    delta = std::move(prev);
  }
}

Adam::Adam(std::size_t num_params, Options options)
    : options_(options), m_(num_params, 0.0), v_(num_params, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = options_.beta1 * m_[i] + (1.0 - options_.beta1) * grad[i];
    v_[i] = options_.beta2 * v_[i] + (1.0 - options_.beta2) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= options_.learning_rate * m_hat / (std::sqrt(v_hat) + options_.epsilon);
  }
}

double loss_and_gradient(const DenseNet& net,
                         std::span<const std::vector<double>> inputs,
                         std::span<const SampleLoss> losses,
                         std::span<double> grad, bool relu_mask) {
  if (inputs.size() != losses.size() || inputs.empty()) {
    throw std::invalid_argument("batch inputs and losses must match and be non-empty");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  const double scale = 1.0 / static_cast<double>(inputs.size());
  double total = 0.0;
  DenseNet::Tape tape;
  std::vector<double> grad_out(net.output_size());
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    std::vector<double> out = net.forward(inputs[s], tape);
    std::fill(grad_out.begin(), grad_out.end(), 0.0);
    total += losses[s](out, grad_out);
    for (double& g : grad_out) g *= scale;
    net.backward(tape, grad_out, grad, relu_mask);
  }
  return total * scale;
}

double train_step(DenseNet& net, Adam& opt,
                  std::span<const std::vector<double>> inputs,
                  std::span<const SampleLoss> losses) {
  std::vector<double> grad(net.num_params());
  const double loss = loss_and_gradient(net, inputs, losses, grad);
  if (!std::isfinite(loss)) {
    throw TrainingError("non-finite loss (" + std::to_string(loss) +
                        ") over a batch of " + std::to_string(inputs.size()));
  }
  opt.step(net.params(), grad);
  return loss;
}

double grad_check(const DenseNet& net, std::span<const double> x,
                  const SampleLoss& loss, Rng& rng,
                  const GradCheckOptions& options) {
  const std::vector<double> input(x.begin(), x.end());
  std::vector<double> analytic(net.num_params());
  loss_and_gradient(net, std::span(&input, 1), std::span(&loss, 1), analytic,
                    !options.corrupt_backward);

  std::vector<std::size_t> idx(net.num_params());
  std::iota(idx.begin(), idx.end(), 0);
  if (idx.size() > options.max_params) {
    // Partial Fisher-Yates for an unbiased subset.
    for (std::size_t i = 0; i < options.max_params; ++i) {
      std::swap(idx[i], idx[i + rng.uniform_int(idx.size() - i)]);
    }
    idx.resize(options.max_params);
  }

  DenseNet probe = net;
  std::vector<double> scratch(net.output_size());
  auto eval = [&] {
    std::vector<double> out = probe.forward(input);
    std::fill(scratch.begin(), scratch.end(), 0.0);
    return loss(out, scratch);
  };
  double diff2 = 0.0;
  double a2 = 0.0;
  double n2 = 0.0;
  for (std::size_t i : idx) {
    double& p = probe.params()[i];
    const double saved = p;
    p = saved + options.step;
    const double plus = eval();
    p = saved - options.step;
    const double minus = eval();
    p = saved;
    const double numeric = (plus - minus) / (2.0 * options.step);
    diff2 += (analytic[i] - numeric) * (analytic[i] - numeric);
    a2 += analytic[i] * analytic[i];
    n2 += numeric * numeric;
  }
  return std::sqrt(diff2) / std::max(std::sqrt(a2) + std::sqrt(n2), 1e-12);
}

SampleLoss squared_error(std::vector<double> target) {
  return [target = std::move(target)](std::span<const double> out,
                                       std::span<double> grad_out) {
    double l = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double d = out[i] - target[i];
      l += d * d;
      grad_out[i] = 2.0 * d;
    }
    return l;
  };
}

SampleLoss selected_squared_error(std::size_t index, double target) {
  return [index, target](std::span<const double> out, std::span<double> grad_out) {
    const double d = out[index] - target;
    grad_out[index] = 2.0 * d;
    return d * d;
  };
}

std::vector<double> softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace phaseforge
