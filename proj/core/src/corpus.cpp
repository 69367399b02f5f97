#include "pathground/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pathground/errors.hpp"

namespace pathground::data {

using nlohmann::json;

std::string to_string(Magnification m) {
  return m == Magnification::x40 ? "x40" : "x20";
}

std::string to_string(Split s) { return s == Split::train ? "train" : "test"; }

Magnification parse_magnification(const std::string& s) {
  if (s == "x40") return Magnification::x40;
  if (s == "x20") return Magnification::x20;
  throw ValidationError("unknown magnification '" + s + "'");
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  throw ValidationError("unknown split '" + s + "'");
}

int CorpusManifest::count(Split s, Magnification m) const {
  if (s == Split::train)
    return m == Magnification::x40 ? train_x40 : train_x20;
  return m == Magnification::x40 ? test_x40 : test_x20;
}

int CorpusManifest::total() const {
  return train_x40 + train_x20 + test_x40 + test_x20;
}

void CorpusManifest::validate() const {
  if (train_x40 < 0 || train_x20 < 0 || test_x40 < 0 || test_x20 < 0)
    throw ValidationError("manifest: negative sample count");
  if (image_size <= 0 || image_size % 32 != 0)
    throw ValidationError("manifest: image_size must be a positive multiple of 32, got " +
                          std::to_string(image_size));
  if (!(decoy_fraction >= 0.0 && decoy_fraction <= 1.0))
    throw ValidationError("manifest: decoy_fraction outside [0,1]");
  if (generator_version.empty())
    throw ValidationError("manifest: missing generator version");
}

void write_manifest(const CorpusManifest& m, const std::filesystem::path& path) {
  m.validate();
  json j;
  j["seed"] = m.seed;
  j["counts"] = {{"train", {{"x40", m.train_x40}, {"x20", m.train_x20}}},
                 {"test", {{"x40", m.test_x40}, {"x20", m.test_x20}}}};
  j["image_size"] = m.image_size;
  j["generator_version"] = m.generator_version;
  j["decoy_fraction"] = m.decoy_fraction;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  CorpusManifest m;
  try {
    m.seed = j.at("seed").get<std::uint64_t>();
    m.train_x40 = j.at("counts").at("train").at("x40").get<int>();
    m.train_x20 = j.at("counts").at("train").at("x20").get<int>();
    m.test_x40 = j.at("counts").at("test").at("x40").get<int>();
    m.test_x20 = j.at("counts").at("test").at("x20").get<int>();
    m.image_size = j.at("image_size").get<int>();
    m.generator_version = j.at("generator_version").get<std::string>();
    m.decoy_fraction = j.at("decoy_fraction").get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  m.validate();
  return m;
}

std::string annotation_line(const GroundingSample& s) {
  json j;
  j["image_id"] = s.image_id;
  j["image_file"] = s.image_file;
  j["expression"] = s.expression;
  if (s.knowledge) j["knowledge"] = *s.knowledge;
  j["box"] = {{"cx", s.box.cx}, {"cy", s.box.cy}, {"w", s.box.w}, {"h", s.box.h}};
  j["magnification"] = to_string(s.magnification);
  j["split"] = to_string(s.split);
  return j.dump();
}

void write_annotations(const std::vector<GroundingSample>& samples,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& s : samples) out << annotation_line(s) << '\n';
}

GroundingSample parse_annotation(const std::string& line, int line_no) {
  const std::string where = "annotations.jsonl line " + std::to_string(line_no);
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
  GroundingSample s;
  try {
    s.image_id = j.at("image_id").get<std::string>();
    s.image_file = j.at("image_file").get<std::string>();
    s.expression = j.at("expression").get<std::string>();
    if (j.contains("knowledge") && !j.at("knowledge").is_null())
      s.knowledge = j.at("knowledge").get<std::string>();
    s.magnification = parse_magnification(j.at("magnification").get<std::string>());
    s.split = parse_split(j.at("split").get<std::string>());
    const json& b = j.at("box");
    s.box = geom::make_box(b.at("cx").get<double>(), b.at("cy").get<double>(),
                               b.at("w").get<double>(), b.at("h").get<double>());
  } catch (const json::exception& e) {
    throw ValidationError(where + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(where + " (image_id '" + s.image_id + "'): " + e.what());
  }
  if (s.image_id.empty()) throw ValidationError(where + ": empty image_id");
  if (s.expression.empty())
    throw ValidationError(where + " (image_id '" + s.image_id + "'): empty expression");
  const auto c = geom::to_corners(s.box);
  if (c.x0 < 0.0 || c.y0 < 0.0 || c.x1 > 1.0 || c.y1 > 1.0)
    throw ValidationError(where + " (image_id '" + s.image_id +
                          "'): box extends outside the unit square");
  return s;
}

namespace {

// Word-boundary substring test for multiword terms.
bool contains_term(const std::string& text, const std::string& term) {
  auto boundary = [](char ch) { return !std::isalnum(static_cast<unsigned char>(ch)); };
  std::size_t pos = 0;
  while ((pos = text.find(term, pos)) != std::string::npos) {
    const bool left_ok = pos == 0 || boundary(text[pos - 1]);
    const std::size_t end = pos + term.size();
    const bool right_ok = end == text.size() || boundary(text[end]);
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& dir, const TermBank* bank) {
  Corpus corpus;
  corpus.dir = dir;
  corpus.manifest = read_manifest(dir / "manifest.json");

  std::ifstream in(dir / "annotations.jsonl");
  if (!in) throw IoError("cannot read " + (dir / "annotations.jsonl").string());

  std::set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    GroundingSample s = parse_annotation(line, line_no);
    const std::string where =
        "annotations.jsonl line " + std::to_string(line_no) + " (image_id '" + s.image_id + "')";
    if (!ids.insert(s.image_id).second)
      throw ValidationError(where + ": duplicate image_id");

    const auto image_path = dir / s.image_file;
    if (!std::filesystem::exists(image_path))
      throw ValidationError(where + ": missing image file " + s.image_file);
    try {
      const auto [w, h] = img::read_png_size(image_path);
      s.width = w;
      s.height = h;
    } catch (const IoError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    if (s.width % 32 != 0 || s.height % 32 != 0)
      throw ValidationError(where + ": image dimensions " + std::to_string(s.width) + "x" +
                            std::to_string(s.height) + " not divisible by 32");

    if (bank) {
      const Affinity want =
          s.magnification == Magnification::x40 ? Affinity::x40 : Affinity::x20;
      bool found = false;
      for (const auto& t : bank->terms) {
        if (t.head_noun || (t.affinity != want && t.affinity != Affinity::both)) continue;
        if (contains_term(s.expression, t.term)) {
          found = true;
          break;
        }
      }
      if (!found)
        throw ValidationError(where + ": expression lacks any " +
                              to_string(s.magnification) + "-affinity bank term");
    }
    corpus.samples.push_back(std::move(s));
  }

  std::sort(corpus.samples.begin(), corpus.samples.end(),
            [](const GroundingSample& a, const GroundingSample& b) {
              return a.image_id < b.image_id;
            });

  int counted[2][2] = {{0, 0}, {0, 0}};
  for (const auto& s : corpus.samples)
    ++counted[static_cast<int>(s.split)][static_cast<int>(s.magnification)];
  for (Split sp : {Split::train, Split::test})
    for (Magnification m : {Magnification::x40, Magnification::x20}) {
      const int got = counted[static_cast<int>(sp)][static_cast<int>(m)];
      const int want = corpus.manifest.count(sp, m);
      if (got != want)
        throw ValidationError("corpus has " + std::to_string(got) + " " + to_string(sp) +
                              "/" + to_string(m) + " samples but manifest declares " +
                              std::to_string(want));
    }
  return corpus;
}

img::ImageU8 load_image(const Corpus& corpus, const GroundingSample& s) {
  return img::read_png(corpus.dir / s.image_file);
}

CorpusStats corpus_stats(const Corpus& corpus, int top_k) {
  CorpusStats stats;
  std::map<std::string, int> freq;
  for (const auto& s : corpus.samples) {
    ++stats.count[static_cast<int>(s.split)][static_cast<int>(s.magnification)];
    if (s.knowledge) ++stats.with_knowledge;
    const int wb = std::min(9, static_cast<int>(s.box.w * 10.0));
    const int hb = std::min(9, static_cast<int>(s.box.h * 10.0));
    ++stats.box_w_hist[static_cast<std::size_t>(wb)];
    ++stats.box_h_hist[static_cast<std::size_t>(hb)];
    for (auto& word : split_words(s.expression)) ++freq[word];
  }
  std::vector<std::pair<std::string, int>> words(freq.begin(), freq.end());
  std::sort(words.begin(), words.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<int>(words.size()) > top_k) words.resize(static_cast<std::size_t>(top_k));
  stats.top_words = std::move(words);
  return stats;
}

std::string format_stats(const CorpusStats& stats) {
  std::ostringstream out;
  out << "split    x40    x20  total\n";
  const char* names[2] = {"train", "test"};
  int col40 = 0, col20 = 0;
  for (int sp = 0; sp < 2; ++sp) {
    const int a = stats.count[sp][0], b = stats.count[sp][1];
    col40 += a;
    col20 += b;
    out << names[sp];
    for (std::size_t i = std::string(names[sp]).size(); i < 5; ++i) out << ' ';
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%7d%7d%7d\n", a, b, a + b);
    out << buf;
  }
  char buf[64];
  out << "all  ";
  std::snprintf(buf, sizeof(buf), "%7d%7d%7d\n", col40, col20, col40 + col20);
  out << buf;
  out << "samples with knowledge: " << stats.with_knowledge << "\n";
  auto hist = [&out](const char* label, const std::array<int, 10>& h) {
    out << label;
    for (int v : h) out << ' ' << v;
    out << '\n';
  };
  hist("box width bins (0.1):", stats.box_w_hist);
  hist("box height bins (0.1):", stats.box_h_hist);
  out << "top words:\n";
  for (const auto& [word, n] : stats.top_words) out << "  " << word << ' ' << n << '\n';
  return out.str();
}

}  // namespace pathground::data
