#pragma once

#include <array>
#include <string>

namespace pathground::geom {

/// Normalized center-format box. cx and cy are fractions of image width and
/// height in [0,1]; w and h are fractions in (0,1]. Degenerate extents
/// (w or h <= kMinExtent) are rejected at construction, never clamped.
struct BoundingBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
};

/// Corner form (x0,y0) top-left, (x1,y1) bottom-right, x0 <= x1 and y0 <= y1.
struct CornerBox {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
};

inline constexpr double kMinExtent = 1e-6;

enum class IouVariant { plain, generalized };

/// Weights and variant for the combined regression loss. The defaults are
/// the 5/2 trade-off used throughout training.
struct LossConfig {
  double lambda_l1 = 5.0;
  double lambda_iou = 2.0;
  IouVariant iou_variant = IouVariant::generalized;
};

struct LossBreakdown {
  double l1_term = 0.0;   // mean absolute difference over the 4 coordinates
  double iou_term = 0.0;  // 1 - IoU or 1 - GIoU depending on the variant
  double total = 0.0;     // lambda_l1 * l1_term + lambda_iou * iou_term
};

/// Gradient of LossBreakdown::total with respect to the predicted box's
/// (cx, cy, w, h), in that order.
using BoxGrad = std::array<double, 4>;

bool is_valid(const BoundingBox& b);
bool is_valid(const LossConfig& c);

/// Builds a validated box; throws ValidationError on bad input.
BoundingBox make_box(double cx, double cy, double w, double h);

/// Throws ValidationError naming `context` if the box is invalid.
void validate_box(const BoundingBox& b, const std::string& context);

CornerBox to_corners(const BoundingBox& b);
BoundingBox from_corners(const CornerBox& c);

/// Intersection over union of the corner forms. Symmetric, in [0,1],
/// exactly 1 for identical boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Generalized IoU: iou - (enclosure - union) / enclosure, in [-1,1].
/// Carries gradient even for disjoint boxes, unlike plain 1-IoU.
double giou(const BoundingBox& a, const BoundingBox& b);

LossBreakdown loss(const BoundingBox& pred, const BoundingBox& gt,
                   const LossConfig& cfg = {});

/// Analytic gradient of loss(...).total w.r.t. pred. Matches central finite
/// differences away from the measure-zero corner-coincidence sets.
BoxGrad loss_grad(const BoundingBox& pred, const BoundingBox& gt,
                  const LossConfig& cfg = {});

}  // namespace pathground::geom
