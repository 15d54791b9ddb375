#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "influencerrank/matrix.hpp"

namespace infrank {

struct AdamState {
  std::vector<DenseMatrix> first_moment;
  std::vector<DenseMatrix> second_moment;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  // Zero accumulators shaped like `params`.
  static AdamState for_params(std::span<const DenseMatrix> params);
};

// One bias-corrected Adam update of every parameter in place.
// lr = 0 is accepted and leaves parameters untouched.
void adam_step(std::span<DenseMatrix> params, std::span<const DenseMatrix> grads,
               AdamState& state, double lr);

}  // namespace infrank
