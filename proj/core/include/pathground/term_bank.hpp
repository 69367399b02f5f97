#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace pathground::data {

enum class Affinity { x40, x20, both };

enum class LayoutPattern { scatter, sheets, glands, papillae, cords };

/// Rendering recipe a term contributes to its region. Parameters compose
/// multiplicatively / by override when several terms describe one region.
struct VisualParams {
  double size_mul = 1.0;      // nucleus radius multiplier
  double elongation = 1.0;    // major/minor axis ratio
  double darkness = 0.0;      // 0 = background stain, 1 = maximal stain
  double density_mul = 1.0;   // cell count multiplier inside the region
  double size_jitter = 0.0;   // relative spread of per-cell radius
  bool halo = false;          // pale cytoplasm ring around each nucleus
  bool nucleolus = false;     // bright central dot inside each nucleus
  bool rough_contour = false; // lumpy nuclear outline
  LayoutPattern pattern = LayoutPattern::scatter;
  bool sets_pattern = false;  // whether this term dictates the cell layout
};

struct TermSpec {
  std::string term;       // surface form as it appears in expressions
  Affinity affinity;
  VisualParams params;
  std::string glossary;   // explicit visual description of the term
  int concept_id = 0;     // surface forms of one concept share params+glossary
  bool head_noun = false; // usable as the expression's head noun phrase
  int conflict_group = -1; // concepts sharing a group never co-occur
};

struct TermBank {
  std::vector<TermSpec> terms;

  const TermSpec* find(const std::string& term) const;

  /// term -> glossary entry, over every surface form.
  std::map<std::string, std::string> glossary() const;

  int count_with_affinity(Affinity a) const;  // 'both' counts everywhere

  /// Indices into `terms`, grouped by concept, restricted to non-head-noun
  /// terms of the given affinity. Surface order within a group follows bank
  /// order (index 0 = canonical form).
  std::vector<std::vector<int>> attribute_concepts(Affinity a) const;

  std::vector<std::vector<int>> head_concepts() const;

  /// Throws ValidationError if term strings collide, a glossary entry is
  /// empty, or surface forms of one concept disagree on affinity.
  void validate() const;
};

/// The built-in bank used by the corpus generator: 6 cell-structure concepts
/// (40x), 8 arrangement concepts (20x) and one head-noun concept, each with
/// three surface forms sharing identical render parameters and glossary text.
TermBank default_bank();

void write_glossary_json(const TermBank& bank,
                         const std::filesystem::path& path);

}  // namespace pathground::data
