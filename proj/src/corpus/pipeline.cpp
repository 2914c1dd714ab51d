// Copyright 2026 The Lacuna Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lacuna/corpus/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lacuna/text/unicode.hpp"
#include "lacuna/text/utf8.hpp"

namespace lacuna::corpus {

namespace {

using text::is_whitespace;

// Lacuna annotations travel through stages 1-3 as single opaque codepoints
// in supplementary private use plane A: kLacunaBase + N.
constexpr char32_t kLacunaBase = 0xF0000;
constexpr char32_t kLacunaMaxLength = 0xFFFD;

bool is_lacuna_marker(char32_t cp) { return cp > kLacunaBase && cp <= kLacunaBase + kLacunaMaxLength; }
bool is_private_plane(char32_t cp) { return cp >= 0xF0000 && cp <= 0x10FFFF; }

bool contains(std::u32string_view set, char32_t cp) { return set.find(cp) != std::u32string_view::npos; }

struct StageError {
  DiscardReason reason;
  Stage stage;
  std::string detail;
};

// Replaces every {N} by one marker; validates brace structure.
std::u32string parse_lacunae(std::u32string_view in, NormalizationReport& report, StageError*& error,
                             StageError& storage) {
  std::u32string out;
  out.reserve(in.size());
  for (size_t i = 0; i < in.size(); ++i) {
    const char32_t cp = in[i];
    if (is_private_plane(cp)) {
      ++report.characters_filtered;
      continue;
    }
    if (cp == U'}') {
      storage = {DiscardReason::kMalformedAnnotation, Stage::kLacunae,
                 "unmatched '}' at position " + std::to_string(i)};
      error = &storage;
      return {};
    }
    if (cp != U'{') {
      out.push_back(cp);
      continue;
    }
    const size_t close = in.find(U'}', i + 1);
    if (close == std::u32string_view::npos) {
      storage = {DiscardReason::kMalformedAnnotation, Stage::kLacunae,
                 "unclosed '{' at position " + std::to_string(i)};
      error = &storage;
      return {};
    }
    const auto body = in.substr(i + 1, close - i - 1);
    uint64_t n = 0;
    bool ok = !body.empty() && body.size() <= 6;
    for (char32_t d : body) {
      if (d < U'0' || d > U'9') {
        ok = false;
        break;
      }
      n = n * 10 + (d - U'0');
    }
    if (!ok || n == 0 || n > kLacunaMaxLength) {
      storage = {DiscardReason::kMalformedAnnotation, Stage::kLacunae,
                 "malformed lacuna annotation '{" + text::encode_utf8(body) + "}' at position " +
                     std::to_string(i)};
      error = &storage;
      return {};
    }
    out.push_back(kLacunaBase + static_cast<char32_t>(n));
    i = close;
  }
  return out;
}

bool in_numeral_range(const NormalizerConfig& config, char32_t cp) {
  return std::any_of(config.numeral_ranges.begin(), config.numeral_ranges.end(),
                     [cp](const CodepointRange& r) { return r.contains(cp); });
}

std::u32string replace_numerals(std::u32string_view in, const NormalizerConfig& config,
                                 NormalizationReport& report) {
  std::u32string out;
  out.reserve(in.size());
  size_t i = 0;
  while (i < in.size()) {
    const char32_t cp = in[i];
    if (in_numeral_range(config, cp)) {
      size_t j = i;
      while (j < in.size() && in_numeral_range(config, in[j])) ++j;
      if (!(j == i + 1 && cp == U'0')) ++report.numerals_replaced;
      out.push_back(text::kNumeralChar);
      i = j;
    } else if (contains(config.numeral_suffix_signs, cp)) {
      // Letters already emitted belong to the numeral.
      size_t k = out.size();
      while (k > 0 && text::is_greek_letter(out[k - 1])) --k;
      out.resize(k);
      out.push_back(text::kNumeralChar);
      ++report.numerals_replaced;
      ++i;
    } else if (contains(config.numeral_prefix_signs, cp)) {
      size_t j = i + 1;
      while (j < in.size() && text::is_greek_letter(in[j])) ++j;
      out.push_back(text::kNumeralChar);
      ++report.numerals_replaced;
      i = j;
    } else {
      out.push_back(cp);
      ++i;
    }
  }
  // Adjacent replacements form one run.
  std::u32string merged;
  merged.reserve(out.size());
  for (size_t k = 0; k < out.size(); ++k) {
    if (out[k] == text::kNumeralChar && !merged.empty() && merged.back() == text::kNumeralChar) continue;
    merged.push_back(out[k]);
  }
  return merged;
}

std::u32string strip_editorial(std::u32string_view in, const NormalizerConfig& config,
                               NormalizationReport& report) {
  std::u32string out;
  out.reserve(in.size());
  for (char32_t cp : in) {
    if (contains(config.editorial_symbols, cp)) {
      ++report.annotations_stripped;
    } else {
      out.push_back(cp);
    }
  }
  return out;
}

std::u32string drop_notes(std::u32string_view in, const NormalizerConfig& config, NormalizationReport& report) {
  // Comments first; an unclosed comment runs to the end of the text.
  std::u32string uncommented;
  uncommented.reserve(in.size());
  size_t i = 0;
  while (i < in.size()) {
    bool matched = false;
    for (const auto& [open, close] : config.comment_delimiters) {
      if (open.empty() || in.substr(i, open.size()) != open) continue;
      const size_t end = in.find(close, i + open.size());
      i = end == std::u32string_view::npos ? in.size() : end + close.size();
      uncommented.push_back(U' ');
      ++report.comments_dropped;
      matched = true;
      break;
    }
    if (!matched) uncommented.push_back(in[i++]);
  }
  if (!config.drop_latin_tokens) return uncommented;

  std::u32string out;
  out.reserve(uncommented.size());
  i = 0;
  while (i < uncommented.size()) {
    if (is_whitespace(uncommented[i])) {
      out.push_back(uncommented[i++]);
      continue;
    }
    size_t j = i;
    bool latin = false;
    while (j < uncommented.size() && !is_whitespace(uncommented[j])) {
      latin = latin || text::is_latin_letter(uncommented[j]);
      ++j;
    }
    if (latin) {
      ++report.notes_dropped;
    } else {
      out.append(uncommented, i, j - i);
    }
    i = j;
  }
  return out;
}

std::u32string expand_lacunae(std::u32string_view in, NormalizationReport& report) {
  std::u32string out;
  out.reserve(in.size());
  for (char32_t cp : in) {
    if (is_lacuna_marker(cp)) {
      out.append(static_cast<size_t>(cp - kLacunaBase), text::kMissingChar);
      ++report.lacunae_expanded;
    } else {
      out.push_back(cp);
    }
  }
  return out;
}

// Simple lowercase mapping plus the final-sigma rule for capital sigma.
std::u32string lowercase(std::u32string_view in) {
  std::u32string out = text::to_lower(in);
  for (size_t i = 0; i < in.size(); ++i) {
    if (in[i] != U'Σ') continue;
    const bool after_letter = i > 0 && text::is_greek_letter(in[i - 1]);
    const bool before_letter = i + 1 < in.size() && text::is_greek_letter(in[i + 1]);
    if (after_letter && !before_letter) out[i] = U'ς';
  }
  return out;
}

// Collapses whitespace to single spaces, trims, removes the space before
// punctuation and collapses runs of one punctuation mark. Idempotent.
std::u32string fix_spacing(std::u32string_view in, const NormalizerConfig& config) {
  std::u32string out;
  out.reserve(in.size());
  for (char32_t cp : in) {
    if (is_whitespace(cp)) {
      if (!out.empty() && out.back() != text::kSpaceChar) out.push_back(text::kSpaceChar);
      continue;
    }
    if (contains(config.punctuation, cp)) {
      if (!out.empty() && out.back() == text::kSpaceChar) out.pop_back();
      if (!out.empty() && out.back() == cp) continue;
    }
    out.push_back(cp);
  }
  if (!out.empty() && out.back() == text::kSpaceChar) out.pop_back();
  // A punctuation mark may now follow an identical one across a removed space.
  std::u32string collapsed;
  collapsed.reserve(out.size());
  for (char32_t cp : out) {
    if (contains(config.punctuation, cp) && !collapsed.empty() && collapsed.back() == cp) continue;
    collapsed.push_back(cp);
  }
  return collapsed;
}

std::u32string filter_alphabet(std::u32string_view in, const text::CharAlphabet& alphabet,
                               const NormalizerConfig& config, NormalizationReport& report) {
  std::u32string out;
  out.reserve(in.size());
  for (char32_t cp : in) {
    const bool keep = cp == text::kMissingChar ||
                      (alphabet.is_text_symbol(cp) && cp != U'{' && cp != U'}' &&
                       !contains(config.editorial_symbols, cp));
    if (keep) {
      out.push_back(cp);
    } else {
      ++report.characters_filtered;
    }
  }
  return fix_spacing(out, config);
}

}  // namespace

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::kDecode: return "decode";
    case Stage::kNumerals: return "numerals";
    case Stage::kEditorialSymbols: return "editorial-symbols";
    case Stage::kNotes: return "notes";
    case Stage::kLacunae: return "lacunae";
    case Stage::kLowercase: return "lowercase";
    case Stage::kSpacing: return "spacing";
    case Stage::kAlphabetFilter: return "alphabet-filter";
    case Stage::kLengthFilter: return "length-filter";
  }
  return "unknown";
}

std::string_view discard_reason_name(DiscardReason reason) {
  switch (reason) {
    case DiscardReason::kMalformedAnnotation: return "malformed-annotation";
    case DiscardReason::kInvalidEncoding: return "invalid-encoding";
    case DiscardReason::kNonGreek: return "non-greek";
    case DiscardReason::kTooShort: return "too-short";
  }
  return "unknown";
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "valid" || name == "validation") return Split::kValid;
  if (name == "test") return Split::kTest;
  throw std::invalid_argument("unknown split '" + std::string(name) + "'");
}

NormalizationReport& NormalizationReport::operator+=(const NormalizationReport& o) {
  input_records += o.input_records;
  kept += o.kept;
  numerals_replaced += o.numerals_replaced;
  annotations_stripped += o.annotations_stripped;
  comments_dropped += o.comments_dropped;
  notes_dropped += o.notes_dropped;
  lacunae_expanded += o.lacunae_expanded;
  characters_filtered += o.characters_filtered;
  discarded_malformed += o.discarded_malformed;
  discarded_encoding += o.discarded_encoding;
  discarded_non_greek += o.discarded_non_greek;
  discarded_length += o.discarded_length;
  return *this;
}

Split assign_split(uint64_t id) {
  switch (id % 10) {
    case 3: return Split::kTest;
    case 4: return Split::kValid;
    default: return Split::kTrain;
  }
}

NormalizeResult normalize_text(uint64_t id, std::string_view raw_text, const text::CharAlphabet& alphabet,
                               const NormalizerConfig& config, NormalizationReport* report) {
  NormalizationReport local;
  local.input_records = 1;
  auto finish = [&](NormalizeResult result) {
    if (std::holds_alternative<CleanRecord>(result)) {
      local.kept = 1;
    } else {
      switch (std::get<Discarded>(result).reason) {
        case DiscardReason::kMalformedAnnotation: local.discarded_malformed = 1; break;
        case DiscardReason::kInvalidEncoding: local.discarded_encoding = 1; break;
        case DiscardReason::kNonGreek: local.discarded_non_greek = 1; break;
        case DiscardReason::kTooShort: local.discarded_length = 1; break;
      }
    }
    if (report) *report += local;
    return result;
  };

  auto decoded = text::try_decode_utf8(raw_text);
  if (!decoded) {
    return finish(Discarded{DiscardReason::kInvalidEncoding, Stage::kDecode, "invalid UTF-8"});
  }
  StageError storage;
  StageError* error = nullptr;
  std::u32string t = parse_lacunae(*decoded, local, error, storage);
  if (error) return finish(Discarded{error->reason, error->stage, error->detail});

  t = replace_numerals(t, config, local);
  t = strip_editorial(t, config, local);
  t = drop_notes(t, config, local);
  t = expand_lacunae(t, local);
  t = lowercase(t);
  t = fix_spacing(t, config);
  t = filter_alphabet(t, alphabet, config, local);

  if (std::none_of(t.begin(), t.end(), [](char32_t cp) { return text::is_greek_letter(cp); })) {
    return finish(Discarded{DiscardReason::kNonGreek, Stage::kAlphabetFilter, "no Greek letters remain"});
  }
  if (t.size() < kMinRecordLength) {
    return finish(Discarded{DiscardReason::kTooShort, Stage::kLengthFilter,
                            "length " + std::to_string(t.size()) + " < " + std::to_string(kMinRecordLength)});
  }
  return finish(CleanRecord{id, text::encode_utf8(t), assign_split(id)});
}

NormalizeResult normalize_record(const RawRecord& raw, const text::CharAlphabet& alphabet,
                                 const NormalizerConfig& config, NormalizationReport* report) {
  return normalize_text(raw.id, raw.raw_text, alphabet, config, report);
}

void count_record(const CleanRecord& record, SplitCounts& counts) {
  const std::u32string t = text::decode_utf8(record.text);
  ++counts.inscriptions;
  bool in_word = false;
  for (char32_t cp : t) {
    if (is_whitespace(cp)) {
      in_word = false;
      continue;
    }
    ++counts.characters;
    if (!in_word) ++counts.words;
    in_word = true;
  }
}

CorpusManifest compute_manifest(const std::vector<CleanRecord>& records, const text::CharAlphabet& alphabet) {
  CorpusManifest manifest;
  manifest.alphabet_fingerprint = alphabet.fingerprint();
  for (const auto& r : records) count_record(r, manifest.at(r.split));
  return manifest;
}

std::vector<RawRecord> read_raw_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read raw file " + path.string());
  std::vector<RawRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    uint64_t id = 0;
    const auto r = std::from_chars(line.data(), line.data() + (tab == std::string::npos ? 0 : tab), id);
    if (tab == std::string::npos || tab == 0 || r.ec != std::errc() || r.ptr != line.data() + tab) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected id<TAB>raw_text");
    }
    records.push_back(RawRecord{id, line.substr(tab + 1), {}});
  }
  if (in.bad()) throw std::runtime_error("error while reading raw file " + path.string());
  return records;
}

std::string to_jsonl(const std::vector<CleanRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["text"] = r.text;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_split(const std::filesystem::path& dir, Split split, const std::vector<CleanRecord>& records) {
  const auto path = dir / (std::string(split_name(split)) + ".jsonl");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_jsonl(records);
}

std::vector<CleanRecord> read_split(const std::filesystem::path& dir, Split split) {
  const auto path = dir / (std::string(split_name(split)) + ".jsonl");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<CleanRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      records.push_back(CleanRecord{j.at("id").get<uint64_t>(), j.at("text").get<std::string>(), split});
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::string manifest_to_json(const CorpusManifest& manifest, const NormalizationReport* report) {
  nlohmann::ordered_json j;
  for (Split s : {Split::kTrain, Split::kValid, Split::kTest}) {
    const auto& c = manifest.at(s);
    j["splits"][std::string(split_name(s))] = {
        {"inscriptions", c.inscriptions}, {"words", c.words}, {"characters", c.characters}};
  }
  j["alphabet_fingerprint"] = manifest.alphabet_fingerprint;
  if (report) {
    j["report"] = {{"input_records", report->input_records},
                   {"kept", report->kept},
                   {"numerals_replaced", report->numerals_replaced},
                   {"annotations_stripped", report->annotations_stripped},
                   {"comments_dropped", report->comments_dropped},
                   {"notes_dropped", report->notes_dropped},
                   {"lacunae_expanded", report->lacunae_expanded},
                   {"characters_filtered", report->characters_filtered},
                   {"discarded_malformed", report->discarded_malformed},
                   {"discarded_encoding", report->discarded_encoding},
                   {"discarded_non_greek", report->discarded_non_greek},
                   {"discarded_length", report->discarded_length}};
  }
  return j.dump(2) + "\n";
}

CorpusManifest manifest_from_json(std::string_view json) {
  const auto j = nlohmann::json::parse(json);
  CorpusManifest manifest;
  for (Split s : {Split::kTrain, Split::kValid, Split::kTest}) {
    const auto& c = j.at("splits").at(std::string(split_name(s)));
    manifest.at(s) = SplitCounts{c.at("inscriptions").get<int64_t>(), c.at("words").get<int64_t>(),
                                 c.at("characters").get<int64_t>()};
  }
  manifest.alphabet_fingerprint = j.at("alphabet_fingerprint").get<std::string>();
  return manifest;
}

CorpusManifest read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json", std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + (dir / "manifest.json").string());
  std::stringstream buf;
  buf << in.rdbuf();
  return manifest_from_json(buf.str());
}

BuildResult build_corpus(const std::filesystem::path& raw_dir, const std::filesystem::path& out_dir,
                         const text::CharAlphabet& alphabet, const NormalizerConfig& config) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(raw_dir)) throw std::runtime_error("raw input is not a directory: " + raw_dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(raw_dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<RawRecord> raw;
  std::set<uint64_t> seen;
  for (const auto& file : files) {
    for (auto& r : read_raw_file(file)) {
      if (!seen.insert(r.id).second) {
        throw std::runtime_error(file.string() + ": duplicate inscription id " + std::to_string(r.id));
      }
      raw.push_back(std::move(r));
    }
  }
  std::sort(raw.begin(), raw.end(), [](const RawRecord& a, const RawRecord& b) { return a.id < b.id; });

  const long n = static_cast<long>(raw.size());
  std::vector<NormalizeResult> results(raw.size(), Discarded{});
  std::vector<NormalizationReport> reports(raw.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < n; ++i) {
    results[static_cast<size_t>(i)] =
        normalize_record(raw[static_cast<size_t>(i)], alphabet, config, &reports[static_cast<size_t>(i)]);
  }

  BuildResult result;
  std::array<std::vector<CleanRecord>, 3> splits;
  std::vector<CleanRecord> kept;
  for (size_t i = 0; i < raw.size(); ++i) {
    result.report += reports[i];
    if (auto* clean = std::get_if<CleanRecord>(&results[i])) {
      kept.push_back(*clean);
      splits[static_cast<size_t>(clean->split)].push_back(std::move(*clean));
    }
  }
  result.manifest = compute_manifest(kept, alphabet);

  fs::create_directories(out_dir);
  for (Split s : {Split::kTrain, Split::kValid, Split::kTest}) {
    write_split(out_dir, s, splits[static_cast<size_t>(s)]);
  }
  std::ofstream manifest(out_dir / "manifest.json", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot write " + (out_dir / "manifest.json").string());
  manifest << manifest_to_json(result.manifest, &result.report);
  return result;
}

}  // namespace lacuna::corpus
