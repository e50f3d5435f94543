// include/phoneval/corpus.hpp

// Copyright 2026  PhonEval Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PHONEVAL_CORPUS_HPP_
#define PHONEVAL_CORPUS_HPP_

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phoneval/error.hpp"
#include "phoneval/inventory.hpp"

namespace phoneval {

// One utterance with up to three phone transcription tiers:
//   ide  canonical pronunciation of the prompt (always present),
//   man  manually corrected transcription of what was actually said,
//   asr  automatic transcription.
struct Utterance {
  std::string id;
  std::string speaker;
  std::string corpus_tag;
  std::vector<std::string> words;
  PhoneSeq ide;
  std::optional<PhoneSeq> man;
  std::optional<PhoneSeq> asr;
};

enum class Tier { kIde, kMan, kAsr };

inline const char *tier_name(Tier t) {
  switch (t) {
    case Tier::kIde: return "ide";
    case Tier::kMan: return "man";
    case Tier::kAsr: return "asr";
  }
  return "?";
}

inline std::optional<Tier> parse_tier(std::string_view s) {
  if (s == "ide") return Tier::kIde;
  if (s == "man") return Tier::kMan;
  if (s == "asr") return Tier::kAsr;
  return std::nullopt;
}

// Returns the requested tier, or nullptr if the utterance does not have it.
inline const PhoneSeq *tier_of(const Utterance &u, Tier t) {
  switch (t) {
    case Tier::kIde: return &u.ide;
    case Tier::kMan: return u.man ? &*u.man : nullptr;
    case Tier::kAsr: return u.asr ? &*u.asr : nullptr;
  }
  return nullptr;
}

namespace detail {

inline std::vector<std::string> split_tabs(const std::string &line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

inline std::vector<std::string> split_spaces(const std::string &text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string upper_ascii(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::toupper(c));
  });
  return s;
}

}  // namespace detail

// Corpus files are 7-column TSV:
//   id  speaker  corpus_tag  words  ide  man  asr
// where words and the phone tiers are space-separated within their column,
// and "-" marks an absent man or asr tier. The ide tier is required.
inline std::vector<Utterance> load_corpus(const std::filesystem::path &path,
                                          const PhoneInventory &inv) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open corpus file: " + path.string());
  std::vector<Utterance> utts;
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  auto parse_tier_field = [&](const std::string &field, const std::string &id,
                              const char *tier) -> PhoneSeq {
    try {
      return inv.parse_seq(field);
    } catch (const UnknownPhoneError &e) {
      throw UnknownPhoneError(std::string(e.what()) + " in tier " + tier +
                                  " of utterance " + id,
                              path.string(), lineno);
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split_tabs(line);
    if (fields.size() != 7) {
      throw FormatError("expected 7 tab-separated fields, got " +
                            std::to_string(fields.size()),
                        path.string(), lineno);
    }
    Utterance u;
    u.id = fields[0];
    u.speaker = fields[1];
    u.corpus_tag = fields[2];
    u.words = detail::split_spaces(fields[3]);
    if (u.id.empty()) throw FormatError("empty utterance id", path.string(), lineno);
    if (auto it = seen.find(u.id); it != seen.end()) {
      throw FormatError("duplicate utterance id '" + u.id + "' (first at line " +
                            std::to_string(it->second) + ")",
                        path.string(), lineno);
    }
    seen.emplace(u.id, lineno);
    if (fields[4] == "-") {
      throw FormatError("utterance '" + u.id + "' lacks the required ide tier",
                        path.string(), lineno);
    }
    u.ide = parse_tier_field(fields[4], u.id, "ide");
    if (fields[5] != "-") u.man = parse_tier_field(fields[5], u.id, "man");
    if (fields[6] != "-") u.asr = parse_tier_field(fields[6], u.id, "asr");
    utts.push_back(std::move(u));
  }
  return utts;
}

inline void write_corpus(const std::filesystem::path &path,
                         const std::vector<Utterance> &utts,
                         const PhoneInventory &inv) {
  std::ofstream out(path);
  if (!out) throw UserError("cannot write corpus file: " + path.string());
  for (const auto &u : utts) {
    out << u.id << '\t' << u.speaker << '\t' << u.corpus_tag << '\t';
    for (std::size_t i = 0; i < u.words.size(); ++i) {
      if (i > 0) out << ' ';
      out << u.words[i];
    }
    out << '\t' << inv.format_seq(u.ide);
    out << '\t' << (u.man ? inv.format_seq(*u.man) : "-");
    out << '\t' << (u.asr ? inv.format_seq(*u.asr) : "-");
    out << '\n';
  }
  if (!out) throw UserError("error writing corpus file: " + path.string());
}

// Pronunciation dictionary. Words are stored uppercase; each word keeps its
// pronunciations in insertion order with the first one as canonical.
class Lexicon {
 public:
  // Adds a pronunciation. Identical duplicates are ignored; an empty
  // pronunciation is rejected.
  void add(const std::string &word, PhoneSeq pron) {
    if (word.empty()) throw FormatError("empty word in lexicon");
    if (pron.empty()) {
      throw FormatError("empty pronunciation for word '" + word + "'");
    }
    auto &prons = entries_[detail::upper_ascii(word)];
    if (std::find(prons.begin(), prons.end(), pron) == prons.end()) {
      prons.push_back(std::move(pron));
    }
  }

  const std::vector<PhoneSeq> *find(const std::string &word) const {
    auto it = entries_.find(detail::upper_ascii(word));
    if (it == entries_.end()) return nullptr;
    return &it->second;
  }

  const PhoneSeq &canonical(const std::string &word) const {
    const auto *prons = find(word);
    if (prons == nullptr) {
      throw UserError("word '" + word + "' is not in the lexicon");
    }
    return prons->front();
  }

  const std::map<std::string, std::vector<PhoneSeq>> &entries() const {
    return entries_;
  }

  std::size_t word_count() const { return entries_.size(); }

  std::size_t pron_count() const {
    std::size_t n = 0;
    for (const auto &[word, prons] : entries_) n += prons.size();
    return n;
  }

 private:
  std::map<std::string, std::vector<PhoneSeq>> entries_;
};

// Lexicon files are "WORD<TAB>phone phone ..." with '#' comments and blank
// lines skipped. Words are uppercased on load.
inline Lexicon load_lexicon(const std::filesystem::path &path,
                            const PhoneInventory &inv) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open lexicon file: " + path.string());
  Lexicon lex;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("expected 'WORD<TAB>phones'", path.string(), lineno);
    }
    try {
      lex.add(line.substr(0, tab), inv.parse_seq(line.substr(tab + 1)));
    } catch (const UnknownPhoneError &e) {
      throw UnknownPhoneError(e.what(), path.string(), lineno);
    } catch (const FormatError &e) {
      throw FormatError(e.what(), path.string(), lineno);
    }
  }
  return lex;
}

inline void write_lexicon(const std::filesystem::path &path, const Lexicon &lex,
                          const PhoneInventory &inv) {
  std::ofstream out(path);
  if (!out) throw UserError("cannot write lexicon file: " + path.string());
  for (const auto &[word, prons] : lex.entries()) {
    for (const auto &pron : prons) {
      out << word << '\t' << inv.format_seq(pron) << '\n';
    }
  }
  if (!out) throw UserError("error writing lexicon file: " + path.string());
}

}  // namespace phoneval

#endif  // PHONEVAL_CORPUS_HPP_
