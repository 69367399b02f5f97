#include "pathground/term_bank.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "pathground/errors.hpp"

namespace pathground::data {

const TermSpec* TermBank::find(const std::string& term) const {
  for (const auto& t : terms)
    if (t.term == term) return &t;
  return nullptr;
}

std::map<std::string, std::string> TermBank::glossary() const {
  std::map<std::string, std::string> out;
  for (const auto& t : terms) out[t.term] = t.glossary;
  return out;
}

int TermBank::count_with_affinity(Affinity a) const {
  int n = 0;
  for (const auto& t : terms)
    if (t.affinity == a || t.affinity == Affinity::both) ++n;
  return n;
}

static std::vector<std::vector<int>> group_by_concept(
    const std::vector<TermSpec>& terms, bool head, Affinity a) {
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(terms.size()); ++i) {
    const TermSpec& t = terms[i];
    if (t.head_noun != head) continue;
    if (!head && t.affinity != a && t.affinity != Affinity::both) continue;
    groups[t.concept_id].push_back(i);
  }
  std::vector<std::vector<int>> out;
  out.reserve(groups.size());
  for (auto& [id, idx] : groups) out.push_back(std::move(idx));
  return out;
}

std::vector<std::vector<int>> TermBank::attribute_concepts(Affinity a) const {
  return group_by_concept(terms, false, a);
}

std::vector<std::vector<int>> TermBank::head_concepts() const {
  return group_by_concept(terms, true, Affinity::both);
}

void TermBank::validate() const {
  std::set<std::string> seen;
  std::map<int, Affinity> concept_affinity;
  for (const auto& t : terms) {
    if (t.term.empty())
      throw ValidationError("term bank: empty term string");
    if (!seen.insert(t.term).second)
      throw ValidationError("term bank: duplicate term '" + t.term + "'");
    if (t.glossary.empty())
      throw ValidationError("term bank: '" + t.term + "' has no glossary entry");
    auto [it, fresh] = concept_affinity.emplace(t.concept_id, t.affinity);
    if (!fresh && it->second != t.affinity)
      throw ValidationError("term bank: concept " + std::to_string(t.concept_id) +
                            " mixes magnification affinities");
  }
}

namespace {

// Three surface forms per concept. The generator trains on the first form
// only and tests on any of the three, so models that memorise expression
// strings fail on held-out surfaces while the shared glossary text carries
// the meaning across.
struct ConceptDef {
  const char* surfaces[3];
  Affinity affinity;
  VisualParams params;
  const char* glossary;
  bool head;
  int conflict;
};

const ConceptDef kConcepts[] = {
    {{"tumor cells", "atypical cells", "malignant cells"},
     Affinity::both,
     {.darkness = 0.35},
     "the cells in question stain a noticeably darker purple than the pale "
     "cells around them",
     true,
     -1},

    // 40x cell-structure concepts
    {{"enlarged nuclei", "nuclear enlargement", "nucleomegaly"},
     Affinity::x40,
     {.size_mul = 1.9},
     "each nucleus is close to twice the diameter of a resting nucleus, so "
     "the dark round bodies look conspicuously big",
     false,
     -1},
    {{"hyperchromatic nuclei", "hyperchromasia", "deeply stained nuclei"},
     Affinity::x40,
     {.darkness = 0.95},
     "the nuclei take up stain intensely and appear almost black purple "
     "rather than medium purple",
     false,
     -1},
    {{"spindle shaped cells", "spindle cells", "fusiform cells"},
     Affinity::x40,
     {.elongation = 3.2},
     "the cells are stretched into thin elongated ovals about three times "
     "longer than they are wide",
     false,
     -1},
    {{"clear cytoplasm", "cytoplasmic clearing", "pale cytoplasm"},
     Affinity::x40,
     {.halo = true},
     "every dark nucleus sits inside a pale almost white ring of cytoplasm",
     false,
     -1},
    {{"prominent nucleoli", "conspicuous nucleoli", "macronucleoli"},
     Affinity::x40,
     {.nucleolus = true},
     "a single bright dot stands out at the centre of each dark nucleus",
     false,
     -1},
    {{"irregular nuclear contours", "nuclear membrane irregularity",
      "irregular nuclear outlines"},
     Affinity::x40,
     {.rough_contour = true},
     "the outline of each nucleus is lumpy and indented instead of a smooth "
     "oval",
     false,
     -1},

    // 20x arrangement concepts; crowding and sparseness exclude each other,
    // as do the four growth patterns.
    {{"crowded cells", "cellular crowding", "dense cellularity"},
     Affinity::x20,
     {.density_mul = 2.4},
     "the cells are packed so closely together that almost no background "
     "shows between them",
     false,
     0},
    {{"sparse cellularity", "scattered cells", "low cellularity"},
     Affinity::x20,
     {.density_mul = 0.4},
     "only a few cells are present and they sit widely spaced with broad "
     "background between them",
     false,
     0},
    {{"glandular structures", "gland formation", "tubular structures"},
     Affinity::x20,
     {.pattern = LayoutPattern::glands, .sets_pattern = true},
     "the cells line up around small open lumens forming little rings or "
     "tubes",
     false,
     1},
    {{"papillary structures", "papillary fronds", "finger like projections"},
     Affinity::x20,
     {.pattern = LayoutPattern::papillae, .sets_pattern = true},
     "the cells grow along slender finger like stalks that radiate outwards",
     false,
     1},
    {{"cord like growth", "trabecular growth", "cords of cells"},
     Affinity::x20,
     {.pattern = LayoutPattern::cords, .sets_pattern = true},
     "the cells are arranged in narrow parallel rows one or two cells wide",
     false,
     1},
    {{"solid sheets", "sheet like growth", "diffuse sheets"},
     Affinity::x20,
     {.pattern = LayoutPattern::sheets, .sets_pattern = true},
     "the cells fill the area edge to edge as one continuous carpet with no "
     "intervening pattern",
     false,
     1},
    {{"dark staining", "deep staining", "intense basophilia"},
     Affinity::x20,
     {.darkness = 0.85},
     "the whole cluster stains much darker purple than the surrounding "
     "tissue",
     false,
     -1},
    {{"marked pleomorphism", "pleomorphic cells", "variation in cell size"},
     Affinity::x20,
     {.size_jitter = 0.55},
     "neighbouring cells differ strongly in size, small and large forms "
     "mixed together",
     false,
     -1},
};

}  // namespace

TermBank default_bank() {
  TermBank bank;
  int concept_id = 0;
  for (const auto& def : kConcepts) {
    for (const char* surface : def.surfaces) {
      TermSpec spec;
      spec.term = surface;
      spec.affinity = def.affinity;
      spec.params = def.params;
      spec.glossary = def.glossary;
      spec.concept_id = concept_id;
      spec.head_noun = def.head;
      spec.conflict_group = def.conflict;
      bank.terms.push_back(std::move(spec));
    }
    ++concept_id;
  }
  bank.validate();
  return bank;
}

void write_glossary_json(const TermBank& bank,
                         const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [term, text] : bank.glossary()) j[term] = text;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace pathground::data
