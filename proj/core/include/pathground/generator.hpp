#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "pathground/corpus.hpp"
#include "pathground/term_bank.hpp"

namespace pathground::data {

struct RectPx {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open pixel bounds
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
};

/// Generation record kept in memory for tests; the on-disk corpus carries
/// only the GroundingSample fields.
struct SampleTrace {
  GroundingSample sample;
  RectPx target_rect;
  std::optional<RectPx> decoy_rect;
  std::vector<int> attr_terms;   // bank indices of the chosen surface forms
  int head_term = -1;            // bank index of the head-noun surface
  int dropped_concept = -1;      // concept the decoy omits, -1 without decoy
};

/// Writes images/, annotations.jsonl, glossary.json and finally
/// manifest.json under out_dir. Every sample is seeded independently from
/// (manifest.seed, image_id), so regeneration is byte-identical and order
/// independent. Train-split expressions use each concept's first surface
/// form; test-split expressions draw any of its surface forms.
std::vector<SampleTrace> generate_corpus(const CorpusManifest& manifest,
                                         const TermBank& bank,
                                         const std::filesystem::path& out_dir);

}  // namespace pathground::data
