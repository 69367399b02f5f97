#include "pathground/generator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pathground/errors.hpp"
#include "pathground/rng.hpp"

namespace pathground::data {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Color {
  double r, g, b;
};

Color lerp(Color a, Color b, double t) {
  return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

const Color kBase{235, 210, 218};       // stroma background
const Color kPaleCell{214, 182, 205};   // unremarkable background nuclei
const Color kRegionLow{168, 128, 178};  // region nucleus at darkness 0
const Color kRegionHigh{52, 20, 88};    // region nucleus at darkness 1
const Color kHalo{248, 242, 246};
const Color kNucleolus{236, 216, 242};

// Per-magnification texture scale: 40x shows few large cells, 20x shows
// many small ones.
double base_radius(Magnification m) { return m == Magnification::x40 ? 7.5 : 3.4; }
double base_spacing(Magnification m) { return m == Magnification::x40 ? 26.0 : 11.0; }

void blend_px(img::ImageU8& img, int x, int y, Color c, double alpha) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  std::uint8_t* p = img.px(x, y);
  auto mixc = [alpha](std::uint8_t old, double v) {
    const double out = old * (1.0 - alpha) + v * alpha;
    return static_cast<std::uint8_t>(std::clamp(out + 0.5, 0.0, 255.0));
  };
  p[0] = mixc(p[0], c.r);
  p[1] = mixc(p[1], c.g);
  p[2] = mixc(p[2], c.b);
}

struct CellShape {
  double cx, cy;
  double a, b;    // semi-axes, a along phi
  double phi;     // rotation
  bool rough = false;
  double ph1 = 0, ph2 = 0;  // contour perturbation phases
};

void draw_cell(img::ImageU8& img, const CellShape& s, Color color) {
  const double rmax = std::max(s.a, s.b) * (s.rough ? 1.4 : 1.0) + 1.5;
  const int x0 = static_cast<int>(std::floor(s.cx - rmax));
  const int x1 = static_cast<int>(std::ceil(s.cx + rmax));
  const int y0 = static_cast<int>(std::floor(s.cy - rmax));
  const int y1 = static_cast<int>(std::ceil(s.cy + rmax));
  const double cphi = std::cos(s.phi), sphi = std::sin(s.phi);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - s.cx, dy = y - s.cy;
      const double u = dx * cphi + dy * sphi;
      const double v = -dx * sphi + dy * cphi;
      double rho = std::sqrt((u / s.a) * (u / s.a) + (v / s.b) * (v / s.b));
      if (s.rough && rho > 1e-9) {
        const double theta = std::atan2(v, u);
        const double bump =
            1.0 + 0.22 * std::sin(3.0 * theta + s.ph1) + 0.14 * std::sin(5.0 * theta + s.ph2);
        rho /= std::max(0.3, bump);
      }
      const double alpha = std::clamp((1.0 - rho) * std::max(s.a, s.b), 0.0, 1.0);
      if (alpha > 0.0) blend_px(img, x, y, color, alpha);
    }
  }
}

bool inside_inset(const RectPx& r, double x, double y, double inset) {
  return x >= r.x0 + inset && x <= r.x1 - inset && y >= r.y0 + inset && y <= r.y1 - inset;
}

bool rects_apart(const RectPx& a, const RectPx& b, int gap) {
  return a.x1 + gap <= b.x0 || b.x1 + gap <= a.x0 || a.y1 + gap <= b.y0 ||
         b.y1 + gap <= a.y0;
}

std::vector<std::pair<double, double>> place_grid(rng::Stream& rng, const RectPx& r,
                                                  double spacing, double jitter,
                                                  double inset) {
  std::vector<std::pair<double, double>> out;
  for (double gy = r.y0 + inset; gy <= r.y1 - inset; gy += spacing)
    for (double gx = r.x0 + inset; gx <= r.x1 - inset; gx += spacing) {
      const double x = gx + rng.uniform(-jitter, jitter);
      const double y = gy + rng.uniform(-jitter, jitter);
      if (inside_inset(r, x, y, inset)) out.emplace_back(x, y);
    }
  return out;
}

std::vector<std::pair<double, double>> place_glands(rng::Stream& rng, const RectPx& r,
                                                    double cell_r, double inset) {
  std::vector<std::pair<double, double>> out;
  const double ring = 2.3 * cell_r;
  const double spacing = 2.6 * ring;
  for (double gy = r.y0 + inset + ring; gy <= r.y1 - inset - ring; gy += spacing)
    for (double gx = r.x0 + inset + ring; gx <= r.x1 - inset - ring; gx += spacing) {
      const double cx = gx + rng.uniform(-0.25, 0.25) * ring;
      const double cy = gy + rng.uniform(-0.25, 0.25) * ring;
      const int n = std::max(6, static_cast<int>(2.0 * kPi * ring / (2.1 * cell_r) + 0.5));
      for (int i = 0; i < n; ++i) {
        const double ang = 2.0 * kPi * i / n + rng.uniform(-0.15, 0.15);
        const double rr = ring * rng.uniform(0.9, 1.1);
        const double x = cx + rr * std::cos(ang);
        const double y = cy + rr * std::sin(ang);
        if (inside_inset(r, x, y, inset)) out.emplace_back(x, y);
      }
    }
  return out;
}

std::vector<std::pair<double, double>> place_papillae(rng::Stream& rng, const RectPx& r,
                                                      double cell_r, double inset) {
  std::vector<std::pair<double, double>> out;
  const double cx = (r.x0 + r.x1) / 2.0 + rng.uniform(-0.1, 0.1) * r.width();
  const double cy = (r.y0 + r.y1) / 2.0 + rng.uniform(-0.1, 0.1) * r.height();
  const int fingers = 4 + rng.uniform_int(4);
  const double reach = 0.5 * std::min(r.width(), r.height());
  for (int f = 0; f < fingers; ++f) {
    const double theta = 2.0 * kPi * f / fingers + rng.uniform(-0.2, 0.2);
    const double len = reach * rng.uniform(0.6, 0.95);
    const double bend = rng.uniform(-0.5, 0.5);
    for (double t = cell_r; t <= len; t += 2.05 * cell_r) {
      const double ang = theta + bend * (t / len);
      const double x = cx + t * std::cos(ang) + rng.uniform(-0.3, 0.3) * cell_r;
      const double y = cy + t * std::sin(ang) + rng.uniform(-0.3, 0.3) * cell_r;
      if (inside_inset(r, x, y, inset)) out.emplace_back(x, y);
    }
  }
  return out;
}

std::vector<std::pair<double, double>> place_cords(rng::Stream& rng, const RectPx& r,
                                                   double cell_r, double inset) {
  std::vector<std::pair<double, double>> out;
  const double theta = rng.uniform(0.0, kPi);
  const double dx = std::cos(theta), dy = std::sin(theta);
  const double cx = (r.x0 + r.x1) / 2.0, cy = (r.y0 + r.y1) / 2.0;
  const double half_diag = std::hypot(r.width(), r.height()) / 2.0;
  const int rows = static_cast<int>(half_diag / (3.2 * cell_r)) + 1;
  for (int k = -rows; k <= rows; ++k) {
    const double ox = cx - dy * k * 3.2 * cell_r;
    const double oy = cy + dx * k * 3.2 * cell_r;
    for (double t = -half_diag; t <= half_diag; t += 2.05 * cell_r) {
      const double x = ox + dx * t + rng.uniform(-0.25, 0.25) * cell_r;
      const double y = oy + dy * t + rng.uniform(-0.25, 0.25) * cell_r;
      if (inside_inset(r, x, y, inset)) out.emplace_back(x, y);
    }
  }
  return out;
}

void draw_region(img::ImageU8& img, rng::Stream& rng, const RectPx& rect,
                 const VisualParams& p, Magnification mag, double scale) {
  const double cell_r = std::max(1.2, base_radius(mag) * scale * p.size_mul);
  const double inset = cell_r * std::sqrt(std::max(1.0, p.elongation)) + 1.0;

  std::vector<std::pair<double, double>> centers;
  switch (p.pattern) {
    case LayoutPattern::glands:
      centers = place_glands(rng, rect, cell_r, inset);
      break;
    case LayoutPattern::papillae:
      centers = place_papillae(rng, rect, cell_r, inset);
      break;
    case LayoutPattern::cords:
      centers = place_cords(rng, rect, cell_r, inset);
      break;
    case LayoutPattern::sheets:
      centers = place_grid(rng, rect, 2.05 * cell_r, 0.15 * cell_r, inset);
      break;
    case LayoutPattern::scatter: {
      const double sp = base_spacing(mag) * scale * std::sqrt(p.size_mul) /
                        std::sqrt(std::max(0.05, p.density_mul));
      centers = place_grid(rng, rect, sp, 0.3 * sp, inset);
      break;
    }
  }
  if (centers.empty())
    centers.emplace_back((rect.x0 + rect.x1) / 2.0, (rect.y0 + rect.y1) / 2.0);

  const Color nucleus = lerp(kRegionLow, kRegionHigh, std::clamp(p.darkness, 0.0, 1.0));
  for (const auto& [x, y] : centers) {
    const double jitter = 1.0 + p.size_jitter * rng.normal() * 0.45;
    const double r = std::max(1.0, cell_r * std::clamp(jitter, 0.35, 2.2));
    CellShape s;
    s.cx = x;
    s.cy = y;
    s.a = r * std::sqrt(p.elongation);
    s.b = r / std::sqrt(p.elongation);
    s.phi = rng.uniform(0.0, kPi);
    s.rough = p.rough_contour;
    s.ph1 = rng.uniform(0.0, 2.0 * kPi);
    s.ph2 = rng.uniform(0.0, 2.0 * kPi);
    const double cj = rng.uniform(-6.0, 6.0);
    if (p.halo) {
      CellShape h = s;
      h.a *= 1.55;
      h.b *= 1.55;
      h.rough = false;
      draw_cell(img, h, kHalo);
    }
    draw_cell(img, s, {nucleus.r + cj, nucleus.g + cj, nucleus.b + cj});
    if (p.nucleolus) {
      CellShape dot;
      dot.cx = x;
      dot.cy = y;
      dot.a = dot.b = std::max(0.9, 0.3 * r);
      dot.phi = 0.0;
      draw_cell(img, dot, kNucleolus);
    }
  }
}

void draw_background(img::ImageU8& img, rng::Stream& rng, Magnification mag, double scale,
                     const std::vector<RectPx>& exclude) {
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const double n = rng.uniform(-5.0, 5.0);
      std::uint8_t* p = img.px(x, y);
      p[0] = static_cast<std::uint8_t>(std::clamp(kBase.r + n, 0.0, 255.0));
      p[1] = static_cast<std::uint8_t>(std::clamp(kBase.g + n, 0.0, 255.0));
      p[2] = static_cast<std::uint8_t>(std::clamp(kBase.b + n, 0.0, 255.0));
    }

  const double cell_r = std::max(1.2, base_radius(mag) * scale);
  const double spacing = base_spacing(mag) * scale;
  RectPx whole{0, 0, img.width, img.height};
  for (auto& [x, y] : place_grid(rng, whole, spacing, 0.35 * spacing, cell_r + 1.0)) {
    bool excluded = false;
    for (const auto& r : exclude)
      if (x > r.x0 - cell_r - 2 && x < r.x1 + cell_r + 2 && y > r.y0 - cell_r - 2 &&
          y < r.y1 + cell_r + 2) {
        excluded = true;
        break;
      }
    // Stream draws below must happen whether or not the cell lands inside an
    // excluded rect, so cell placement never depends on region geometry.
    CellShape s;
    s.cx = x;
    s.cy = y;
    const double r = cell_r * rng.uniform(0.85, 1.15);
    const double e = rng.uniform(1.0, 1.35);
    s.a = r * std::sqrt(e);
    s.b = r / std::sqrt(e);
    s.phi = rng.uniform(0.0, kPi);
    const double cj = rng.uniform(-6.0, 6.0);
    if (!excluded)
      draw_cell(img, s, {kPaleCell.r + cj, kPaleCell.g + cj, kPaleCell.b + cj});
  }
}

struct ExpressionDraw {
  std::string text;
  std::vector<int> attr_terms;  // bank indices, expression order
  int head_term = -1;
  std::vector<int> attr_concepts;
};

int pick_surface(rng::Stream& rng, const std::vector<int>& group, Split split) {
  if (split == Split::train || group.size() == 1) return group[0];
  return group[rng.uniform_int(group.size())];
}

ExpressionDraw build_expression(rng::Stream& rng, const TermBank& bank,
                                Magnification mag, Split split) {
  const Affinity aff = mag == Magnification::x40 ? Affinity::x40 : Affinity::x20;
  auto concepts = bank.attribute_concepts(aff);
  auto heads = bank.head_concepts();
  if (heads.empty() || concepts.size() < 2)
    throw ValidationError("term bank too small: need a head noun and >= 2 attribute "
                          "concepts per magnification");

  const int want = concepts.size() >= 3 ? 2 + static_cast<int>(rng.uniform_int(2)) : 2;
  // Fisher-Yates over concept groups, then greedy pick honoring conflicts.
  for (std::size_t i = concepts.size(); i > 1; --i)
    std::swap(concepts[i - 1], concepts[rng.uniform_int(i)]);

  ExpressionDraw out;
  std::vector<int> used_conflicts;
  for (const auto& group : concepts) {
    if (static_cast<int>(out.attr_terms.size()) == want) break;
    const int cg = bank.terms[static_cast<std::size_t>(group[0])].conflict_group;
    if (cg >= 0 && std::find(used_conflicts.begin(), used_conflicts.end(), cg) !=
                       used_conflicts.end())
      continue;
    if (cg >= 0) used_conflicts.push_back(cg);
    const int term = pick_surface(rng, group, split);
    out.attr_terms.push_back(term);
    out.attr_concepts.push_back(bank.terms[static_cast<std::size_t>(term)].concept_id);
  }
  if (out.attr_terms.size() < 2)
    throw ValidationError("term bank cannot supply 2 non-conflicting attribute concepts");

  out.head_term = pick_surface(rng, heads[rng.uniform_int(heads.size())], split);

  static const char* kNouns[] = {"region", "area", "cluster", "focus"};
  static const char* kVerbs[] = {"showing", "with", "exhibiting", "demonstrating"};
  std::string text = "the ";
  text += kNouns[rng.uniform_int(4)];
  text += " of ";
  text += bank.terms[static_cast<std::size_t>(out.head_term)].term;
  text += ' ';
  text += kVerbs[rng.uniform_int(4)];
  text += ' ';
  for (std::size_t i = 0; i < out.attr_terms.size(); ++i) {
    if (i > 0) text += i + 1 == out.attr_terms.size() ? " and " : ", ";
    text += bank.terms[static_cast<std::size_t>(out.attr_terms[i])].term;
  }
  out.text = std::move(text);
  return out;
}

VisualParams compose_params(const TermBank& bank, int head_term,
                            const std::vector<int>& attr_terms,
                            int skip_concept = -1) {
  VisualParams p = bank.terms[static_cast<std::size_t>(head_term)].params;
  for (int idx : attr_terms) {
    const TermSpec& t = bank.terms[static_cast<std::size_t>(idx)];
    if (t.concept_id == skip_concept) continue;
    const VisualParams& q = t.params;
    p.size_mul *= q.size_mul;
    p.elongation *= q.elongation;
    p.darkness = std::max(p.darkness, q.darkness);
    p.density_mul *= q.density_mul;
    p.size_jitter = std::max(p.size_jitter, q.size_jitter);
    p.halo |= q.halo;
    p.nucleolus |= q.nucleolus;
    p.rough_contour |= q.rough_contour;
    if (q.sets_pattern) {
      p.pattern = q.pattern;
      p.sets_pattern = true;
    }
  }
  return p;
}

RectPx sample_rect(rng::Stream& rng, int size, int margin) {
  const int lo = static_cast<int>(0.22 * size);
  const int hi = static_cast<int>(0.42 * size);
  const int w = lo + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(hi - lo + 1)));
  const int h = lo + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(hi - lo + 1)));
  const int x0 = margin + static_cast<int>(rng.uniform_int(
                              static_cast<std::uint64_t>(size - 2 * margin - w + 1)));
  const int y0 = margin + static_cast<int>(rng.uniform_int(
                              static_cast<std::uint64_t>(size - 2 * margin - h + 1)));
  return {x0, y0, x0 + w, y0 + h};
}

geom::BoundingBox rect_to_box(const RectPx& r, int size) {
  return geom::make_box((r.x0 + r.x1) / (2.0 * size), (r.y0 + r.y1) / (2.0 * size),
                            static_cast<double>(r.width()) / size,
                            static_cast<double>(r.height()) / size);
}

}  // namespace

std::vector<SampleTrace> generate_corpus(const CorpusManifest& manifest,
                                         const TermBank& bank,
                                         const std::filesystem::path& out_dir) {
  manifest.validate();
  bank.validate();
  for (Affinity aff : {Affinity::x40, Affinity::x20}) {
    int terms = 0;
    for (const auto& t : bank.terms)
      if (!t.head_noun && (t.affinity == aff || t.affinity == Affinity::both)) ++terms;
    if (terms < 4)
      throw ValidationError("term bank needs at least 4 attribute terms per "
                            "magnification affinity");
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir / "images", ec);
  if (ec) throw IoError("cannot create " + (out_dir / "images").string());

  const int size = manifest.image_size;
  const double scale = size / 256.0;
  const int margin = std::max(4, size / 32);

  std::vector<SampleTrace> traces;
  traces.reserve(static_cast<std::size_t>(manifest.total()));

  for (Split split : {Split::train, Split::test}) {
    for (Magnification mag : {Magnification::x40, Magnification::x20}) {
      const int n = manifest.count(split, mag);
      for (int i = 0; i < n; ++i) {
        char idbuf[64];
        std::snprintf(idbuf, sizeof(idbuf), "%s_%s_%05d", to_string(split).c_str(),
                      to_string(mag).c_str(), i);
        const std::string image_id = idbuf;
        rng::Stream rng(rng::mix(manifest.seed, rng::hash_str(image_id)));

        const ExpressionDraw expr = build_expression(rng, bank, mag, split);
        const RectPx target = sample_rect(rng, size, margin);

        std::optional<RectPx> decoy;
        int dropped = -1;
        if (rng.bernoulli(manifest.decoy_fraction)) {
          dropped = expr.attr_concepts[rng.uniform_int(expr.attr_concepts.size())];
          for (int attempt = 0; attempt < 200 && !decoy; ++attempt) {
            const RectPx cand = sample_rect(rng, size, margin);
            if (rects_apart(cand, target, std::max(8, size / 32))) decoy = cand;
          }
          if (!decoy) dropped = -1;  // no room; fall back to a single region
        }

        img::ImageU8 img = img::make_image(size, size, {0, 0, 0});
        std::vector<RectPx> exclude{target};
        if (decoy) exclude.push_back(*decoy);
        draw_background(img, rng, mag, scale, exclude);
        draw_region(img, rng, target, compose_params(bank, expr.head_term, expr.attr_terms),
                    mag, scale);
        if (decoy)
          draw_region(img, rng, *decoy,
                      compose_params(bank, expr.head_term, expr.attr_terms, dropped), mag,
                      scale);

        SampleTrace trace;
        trace.sample.image_id = image_id;
        trace.sample.image_file = "images/" + image_id + ".png";
        trace.sample.expression = expr.text;
        trace.sample.box = rect_to_box(target, size);
        trace.sample.magnification = mag;
        trace.sample.split = split;
        trace.sample.width = size;
        trace.sample.height = size;
        trace.target_rect = target;
        trace.decoy_rect = decoy;
        trace.attr_terms = expr.attr_terms;
        trace.head_term = expr.head_term;
        trace.dropped_concept = decoy ? dropped : -1;

        img::write_png(img, out_dir / trace.sample.image_file);
        traces.push_back(std::move(trace));
      }
    }
  }

  std::vector<GroundingSample> samples;
  samples.reserve(traces.size());
  for (const auto& t : traces) samples.push_back(t.sample);
  write_annotations(samples, out_dir / "annotations.jsonl");
  write_glossary_json(bank, out_dir / "glossary.json");
  write_manifest(manifest, out_dir / "manifest.json");
  return traces;
}

}  // namespace pathground::data
