// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsecue/generator.hpp"

namespace sparsecue {

/// Squared error averaged over masked frames and all pose dimensions.
/// `grad` (same shape as `pred`) is overwritten when non-null.
double loss_base(const Matrix& pred, const Matrix& target, const MaskSpec& mask, Matrix* grad = nullptr);

/// Mean over (block, frame) of ||f3 - f2||. `grad_f2` is overwritten when non-null;
/// the teacher side receives no gradient.
double loss_3d_align(const FeatureSeq& f3, const FeatureSeq& f2, FeatureSeq* grad_f2 = nullptr);

/// Mean over (block, frame) of the squared cosine between g and l. Pairs where
/// either vector norm is below 1e-12 count as orthogonal.
double loss_ortho(const FeatureSeq& g, const FeatureSeq& l, FeatureSeq* grad_g = nullptr,
                  FeatureSeq* grad_l = nullptr);

inline constexpr double kNormFloor = 1e-12;

}  // namespace sparsecue
