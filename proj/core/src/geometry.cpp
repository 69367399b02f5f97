#include "pathground/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pathground/errors.hpp"

namespace pathground::geom {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Partial derivatives in corner space, ordered (ax0, ay0, ax1, ay1).
using CornerGrad = std::array<double, 4>;

// Chain rule from corner space to (cx, cy, w, h):
//   ax0 = cx - w/2, ax1 = cx + w/2 and likewise for y.
BoxGrad corners_to_center(const CornerGrad& g) {
  return BoxGrad{
      g[0] + g[2],
      g[1] + g[3],
      0.5 * (g[2] - g[0]),
      0.5 * (g[3] - g[1]),
  };
}

struct Overlap {
  CornerBox a, b;
  double inter = 0.0;
  double uni = 0.0;
  bool overlapping = false;
};

Overlap overlap_of(const BoundingBox& pa, const BoundingBox& pb) {
  Overlap o;
  o.a = to_corners(pa);
  o.b = to_corners(pb);
  const double iw = std::min(o.a.x1, o.b.x1) - std::max(o.a.x0, o.b.x0);
  const double ih = std::min(o.a.y1, o.b.y1) - std::max(o.a.y0, o.b.y0);
  o.overlapping = iw > 0.0 && ih > 0.0;
  o.inter = o.overlapping ? iw * ih : 0.0;
  o.uni = pa.w * pa.h + pb.w * pb.h - o.inter;
  return o;
}

// d inter / d (pred corners); zero when the boxes do not overlap.
CornerGrad inter_grad(const Overlap& o) {
  if (!o.overlapping) return {0, 0, 0, 0};
  const double iw = std::min(o.a.x1, o.b.x1) - std::max(o.a.x0, o.b.x0);
  const double ih = std::min(o.a.y1, o.b.y1) - std::max(o.a.y0, o.b.y0);
  CornerGrad g{};
  g[0] = (o.a.x0 >= o.b.x0) ? -ih : 0.0;
  g[2] = (o.a.x1 <= o.b.x1) ? ih : 0.0;
  g[1] = (o.a.y0 >= o.b.y0) ? -iw : 0.0;
  g[3] = (o.a.y1 <= o.b.y1) ? iw : 0.0;
  return g;
}

// d areaA / d (pred corners) where areaA = (ax1-ax0)(ay1-ay0).
CornerGrad area_grad(const Overlap& o) {
  const double w = o.a.x1 - o.a.x0;
  const double h = o.a.y1 - o.a.y0;
  return CornerGrad{-h, -w, h, w};
}

}  // namespace

bool is_valid(const BoundingBox& b) {
  if (!std::isfinite(b.cx) || !std::isfinite(b.cy) || !std::isfinite(b.w) ||
      !std::isfinite(b.h)) {
    return false;
  }
  if (b.cx < 0.0 || b.cx > 1.0 || b.cy < 0.0 || b.cy > 1.0) return false;
  if (b.w <= kMinExtent || b.w > 1.0) return false;
  if (b.h <= kMinExtent || b.h > 1.0) return false;
  return true;
}

bool is_valid(const LossConfig& c) {
  return std::isfinite(c.lambda_l1) && std::isfinite(c.lambda_iou) &&
         c.lambda_l1 > 0.0 && c.lambda_iou > 0.0;
}

BoundingBox make_box(double cx, double cy, double w, double h) {
  BoundingBox b{cx, cy, w, h};
  validate_box(b, "make_box");
  return b;
}

void validate_box(const BoundingBox& b, const std::string& context) {
  if (is_valid(b)) return;
  std::ostringstream os;
  os << context << ": invalid box (cx=" << b.cx << ", cy=" << b.cy
     << ", w=" << b.w << ", h=" << b.h
     << "); need cx,cy in [0,1] and w,h in (" << kMinExtent << ",1]";
  throw ValidationError(os.str());
}

CornerBox to_corners(const BoundingBox& b) {
  return CornerBox{b.cx - b.w / 2.0, b.cy - b.h / 2.0, b.cx + b.w / 2.0,
                   b.cy + b.h / 2.0};
}

BoundingBox from_corners(const CornerBox& c) {
  return BoundingBox{(c.x0 + c.x1) / 2.0, (c.y0 + c.y1) / 2.0, c.x1 - c.x0,
                     c.y1 - c.y0};
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const Overlap o = overlap_of(a, b);
  return o.inter / o.uni;
}

double giou(const BoundingBox& a, const BoundingBox& b) {
  const Overlap o = overlap_of(a, b);
  const double ew = std::max(o.a.x1, o.b.x1) - std::min(o.a.x0, o.b.x0);
  const double eh = std::max(o.a.y1, o.b.y1) - std::min(o.a.y0, o.b.y0);
  const double enclosure = ew * eh;
  return o.inter / o.uni - (enclosure - o.uni) / enclosure;
}

LossBreakdown loss(const BoundingBox& pred, const BoundingBox& gt,
                   const LossConfig& cfg) {
  LossBreakdown out;
  out.l1_term = (std::abs(pred.cx - gt.cx) + std::abs(pred.cy - gt.cy) +
                 std::abs(pred.w - gt.w) + std::abs(pred.h - gt.h)) /
                4.0;
  const double v =
      cfg.iou_variant == IouVariant::plain ? iou(pred, gt) : giou(pred, gt);
  out.iou_term = 1.0 - v;
  out.total = cfg.lambda_l1 * out.l1_term + cfg.lambda_iou * out.iou_term;
  return out;
}

BoxGrad loss_grad(const BoundingBox& pred, const BoundingBox& gt,
                  const LossConfig& cfg) {
  const Overlap o = overlap_of(pred, gt);
  const CornerGrad dI = inter_grad(o);
  const CornerGrad dA = area_grad(o);

  // dU = dareaA - dI (gt's area is constant).
  CornerGrad dU{};
  for (int i = 0; i < 4; ++i) dU[i] = dA[i] - dI[i];

  // d iou = (dI * U - I * dU) / U^2
  CornerGrad dIou{};
  const double u2 = o.uni * o.uni;
  for (int i = 0; i < 4; ++i) dIou[i] = (dI[i] * o.uni - o.inter * dU[i]) / u2;

  CornerGrad dV = dIou;
  if (cfg.iou_variant == IouVariant::generalized) {
    const double ew = std::max(o.a.x1, o.b.x1) - std::min(o.a.x0, o.b.x0);
    const double eh = std::max(o.a.y1, o.b.y1) - std::min(o.a.y0, o.b.y0);
    const double e = ew * eh;
    CornerGrad dE{};
    dE[0] = (o.a.x0 <= o.b.x0) ? -eh : 0.0;
    dE[2] = (o.a.x1 >= o.b.x1) ? eh : 0.0;
    dE[1] = (o.a.y0 <= o.b.y0) ? -ew : 0.0;
    dE[3] = (o.a.y1 >= o.b.y1) ? ew : 0.0;
    // giou = iou - 1 + U/E, so d giou = d iou + (dU*E - U*dE)/E^2.
    const double e2 = e * e;
    for (int i = 0; i < 4; ++i) dV[i] += (dU[i] * e - o.uni * dE[i]) / e2;
  }

  const BoxGrad dv_center = corners_to_center(dV);

  BoxGrad g{};
  const double l1s[4] = {sign(pred.cx - gt.cx), sign(pred.cy - gt.cy),
                         sign(pred.w - gt.w), sign(pred.h - gt.h)};
  for (int i = 0; i < 4; ++i) {
    g[i] = cfg.lambda_l1 * l1s[i] / 4.0 - cfg.lambda_iou * dv_center[i];
  }
  return g;
}

}  // namespace pathground::geom
