// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include "sparsecue/losses.hpp"

#include "sparsecue/error.hpp"

namespace sparsecue {
namespace {

void require_same(const FeatureSeq& a, const FeatureSeq& b, const char* what) {
  if (!a.same_shape(b) || a.num_blocks() == 0) throw ValidationError(std::string(what) + ": feature shapes differ");
}

FeatureSeq zeros_shaped(const FeatureSeq& like) {
  return FeatureSeq::zeros(like.num_blocks(), like.num_frames(), like.width());
}

}  // namespace

double loss_base(const Matrix& pred, const Matrix& target, const MaskSpec& mask, Matrix* grad) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ValidationError("loss_base: prediction and target shapes differ");
  }
  if (mask.num_frames() != pred.rows()) throw ValidationError("loss_base: mask length differs");
  const int masked = mask.count();
  if (masked == 0) throw ValidationError("loss_base: empty mask");
  const double denom = static_cast<double>(masked) * static_cast<double>(pred.cols());
  if (grad != nullptr) *grad = Matrix::Zero(pred.rows(), pred.cols());
  double sum = 0.0;
  for (Eigen::Index n = 0; n < pred.rows(); ++n) {
    if (!mask.is_masked(static_cast<int>(n))) continue;
    const Eigen::RowVectorXd diff = pred.row(n) - target.row(n);
    sum += diff.squaredNorm();
    if (grad != nullptr) grad->row(n) = (2.0 / denom) * diff;
  }
  return sum / denom;
}

double loss_3d_align(const FeatureSeq& f3, const FeatureSeq& f2, FeatureSeq* grad_f2) {
  require_same(f3, f2, "loss_3d_align");
  const double count = static_cast<double>(f3.num_blocks()) * f3.num_frames();
  if (grad_f2 != nullptr) *grad_f2 = zeros_shaped(f2);
  double sum = 0.0;
  for (int b = 0; b < f3.num_blocks(); ++b) {
    for (int n = 0; n < f3.num_frames(); ++n) {
      const Eigen::RowVectorXd diff = f2.blocks[b].row(n) - f3.blocks[b].row(n);
      const double norm = diff.norm();
      sum += norm;
      if (grad_f2 != nullptr && norm >= kNormFloor) grad_f2->blocks[b].row(n) = diff / (norm * count);
    }
  }
  return sum / count;
}

double loss_ortho(const FeatureSeq& g, const FeatureSeq& l, FeatureSeq* grad_g, FeatureSeq* grad_l) {
  require_same(g, l, "loss_ortho");
  const double count = static_cast<double>(g.num_blocks()) * g.num_frames();
  if (grad_g != nullptr) *grad_g = zeros_shaped(g);
  if (grad_l != nullptr) *grad_l = zeros_shaped(l);
  double sum = 0.0;
  for (int b = 0; b < g.num_blocks(); ++b) {
    for (int n = 0; n < g.num_frames(); ++n) {
      const auto gv = g.blocks[b].row(n);
      const auto lv = l.blocks[b].row(n);
      const double ng = gv.norm();
      const double nl = lv.norm();
      if (ng < kNormFloor || nl < kNormFloor) continue;
      const double c = gv.dot(lv) / (ng * nl);
      sum += c * c;
      // d(c^2)/dg = 2c (l / (|g||l|) - c g / |g|^2), symmetric for l.
      if (grad_g != nullptr) {
        grad_g->blocks[b].row(n) = (2.0 * c / count) * (lv / (ng * nl) - c * gv / (ng * ng));
      }
      if (grad_l != nullptr) {
        grad_l->blocks[b].row(n) = (2.0 * c / count) * (gv / (ng * nl) - c * lv / (nl * nl));
      }
    }
  }
  return sum / count;
}

}  // namespace sparsecue
