#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pathground/geometry.hpp"
#include "pathground/image.hpp"
#include "pathground/term_bank.hpp"

namespace pathground::data {

enum class Magnification { x40, x20 };
enum class Split { train, test };

std::string to_string(Magnification m);
std::string to_string(Split s);
Magnification parse_magnification(const std::string& s);  // throws ValidationError
Split parse_split(const std::string& s);                  // throws ValidationError

struct GroundingSample {
  std::string image_id;
  std::string image_file;  // relative to the corpus directory
  std::string expression;
  std::optional<std::string> knowledge;
  geom::BoundingBox box;
  Magnification magnification = Magnification::x40;
  Split split = Split::train;
  int width = 0;   // filled by the loader from the PNG header
  int height = 0;
};

struct CorpusManifest {
  std::uint64_t seed = 0;
  int train_x40 = 0;
  int train_x20 = 0;
  int test_x40 = 0;
  int test_x20 = 0;
  int image_size = 256;  // square images, multiple of 32
  std::string generator_version;
  double decoy_fraction = 0.5;

  int count(Split s, Magnification m) const;
  int total() const;
  void validate() const;  // throws ValidationError
};

struct Corpus {
  std::filesystem::path dir;
  CorpusManifest manifest;
  std::vector<GroundingSample> samples;  // sorted by image_id
};

void write_manifest(const CorpusManifest& m, const std::filesystem::path& path);
CorpusManifest read_manifest(const std::filesystem::path& path);

/// One JSON object per line, keys sorted, shortest float round trip; the
/// knowledge key is omitted while unset so expansion can add it later.
void write_annotations(const std::vector<GroundingSample>& samples,
                       const std::filesystem::path& path);
std::string annotation_line(const GroundingSample& s);
GroundingSample parse_annotation(const std::string& line, int line_no);

/// Loads manifest + annotations, verifies every GroundingSample invariant
/// (box inside the unit square after corner conversion, image file present,
/// dimensions divisible by 32, counts matching the manifest) and returns
/// samples sorted by image_id. When a bank is given, each expression must
/// contain at least one bank term of the sample's magnification affinity.
Corpus load_corpus(const std::filesystem::path& dir,
                   const TermBank* bank = nullptr);

img::ImageU8 load_image(const Corpus& corpus, const GroundingSample& s);

struct CorpusStats {
  int count[2][2] = {{0, 0}, {0, 0}};  // [split][magnification]
  std::array<int, 10> box_w_hist{};    // box widths bucketed over [0,1]
  std::array<int, 10> box_h_hist{};
  std::vector<std::pair<std::string, int>> top_words;  // freq desc, word asc
  int with_knowledge = 0;
};

CorpusStats corpus_stats(const Corpus& corpus, int top_k = 20);
std::string format_stats(const CorpusStats& stats);

}  // namespace pathground::data
