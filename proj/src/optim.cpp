#include "influencerrank/optim.hpp"

#include <cmath>
#include <string>

#include "influencerrank/errors.hpp"

namespace infrank {

AdamState AdamState::for_params(std::span<const DenseMatrix> params) {
  AdamState s;
  for (const auto& p : params) {
    s.first_moment.emplace_back(p.rows(), p.cols());
    s.second_moment.emplace_back(p.rows(), p.cols());
  }
  return s;
}

void adam_step(std::span<DenseMatrix> params, std::span<const DenseMatrix> grads,
               AdamState& state, double lr) {
  if (!(lr >= 0.0)) throw ContractError("adam_step: learning rate must be >= 0");
  if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size())
    throw ShapeError("adam_step: parameter, gradient and state counts differ");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].same_shape(grads[i]) || !params[i].same_shape(state.first_moment[i]) ||
        !params[i].same_shape(state.second_moment[i]))
      throw ShapeError("adam_step: shape mismatch for parameter " + std::to_string(i));
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].data();
    auto g = grads[i].data();
    auto m = state.first_moment[i].data();
    auto v = state.second_moment[i].data();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      p[j] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

}  // namespace infrank
