#pragma once

#include <span>
#include <vector>

#include "influencerrank/hetnet.hpp"
#include "influencerrank/model.hpp"
#include "influencerrank/trainer.hpp"

namespace infrank {

// Plain eval-mode forward pass in long double, written without the tape.
// Serves as the loss oracle for finite differences (its rounding noise sits
// far below the double-precision gradient being checked) and as an
// independent check of forward().
std::vector<long double> reference_scores(const TemporalNetwork& net, const ModelParams& params,
                                          std::span<const DenseMatrix> tensors,
                                          const ForwardOptions& options = {});

// Mean ListMLE over `lists` of reference_scores.
long double reference_loss(const TemporalNetwork& net, const ModelParams& params,
                           std::span<const DenseMatrix> tensors, std::span<const LabeledList> lists,
                           const ForwardOptions& options = {});

}  // namespace infrank
