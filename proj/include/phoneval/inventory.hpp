// include/phoneval/inventory.hpp

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

#ifndef PHONEVAL_INVENTORY_HPP_
#define PHONEVAL_INVENTORY_HPP_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "phoneval/error.hpp"

namespace phoneval {

// A phone is an index into a PhoneInventory. Sequences are plain vectors so
// they compare and hash like any other container.
using Phone = int;
using PhoneSeq = std::vector<Phone>;

enum class PhoneOrigin { kEnglish, kItalian, kShared };

inline const char *origin_name(PhoneOrigin o) {
  switch (o) {
    case PhoneOrigin::kEnglish: return "english";
    case PhoneOrigin::kItalian: return "italian";
    case PhoneOrigin::kShared: return "shared";
  }
  return "?";
}

inline std::optional<PhoneOrigin> parse_origin(std::string_view s) {
  if (s == "english") return PhoneOrigin::kEnglish;
  if (s == "italian") return PhoneOrigin::kItalian;
  if (s == "shared") return PhoneOrigin::kShared;
  return std::nullopt;
}

// Closed set of phone symbols for one analysis run. Index 0 is always the
// silence token SIL and index 1 the empty token EPS; symbols loaded from a
// file start at index 2. EPS never appears in a stored phone sequence, it
// only marks empty slots in alignments and rewrite rules.
class PhoneInventory {
 public:
  static constexpr Phone kSil = 0;
  static constexpr Phone kEps = 1;

  PhoneInventory() {
    add_unchecked("SIL", PhoneOrigin::kShared);
    add_unchecked("EPS", PhoneOrigin::kShared);
  }

  // Registers a symbol and returns its index. Symbols must be non-empty,
  // free of whitespace and of the rule-notation delimiters "/" and "–",
  // and must not collide with an existing or reserved symbol.
  Phone add(std::string_view symbol, PhoneOrigin origin) {
    validate_symbol(symbol);
    std::string key(symbol);
    if (index_.count(key) > 0) {
      throw DuplicateSymbolError("duplicate phone symbol '" + key + "'");
    }
    return add_unchecked(key, origin);
  }

  // Total symbol count, reserved tokens included.
  std::size_t size() const { return symbols_.size(); }
  // Count of real phones, i.e. size() minus SIL and EPS.
  std::size_t phone_count() const { return symbols_.size() - 2; }

  bool valid(Phone p) const {
    return p >= 0 && static_cast<std::size_t>(p) < symbols_.size();
  }

  const std::string &symbol(Phone p) const {
    check(p);
    return symbols_[static_cast<std::size_t>(p)];
  }

  PhoneOrigin origin(Phone p) const {
    check(p);
    return origins_[static_cast<std::size_t>(p)];
  }

  std::optional<Phone> find(std::string_view symbol) const {
    auto it = index_.find(std::string(symbol));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Like find() but throws UnknownPhoneError for missing symbols.
  Phone require(std::string_view symbol) const {
    auto p = find(symbol);
    if (!p) throw UnknownPhoneError("unknown phone '" + std::string(symbol) + "'");
    return *p;
  }

  // Parses a space-separated symbol string. SIL is accepted; EPS is rejected
  // because stored sequences must not contain the empty token. An empty or
  // all-space string yields an empty sequence.
  PhoneSeq parse_seq(std::string_view text) const {
    PhoneSeq seq;
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && text[i] == ' ') ++i;
      std::size_t j = i;
      while (j < text.size() && text[j] != ' ') ++j;
      if (j > i) {
        Phone p = require(text.substr(i, j - i));
        if (p == kEps) {
          throw UnknownPhoneError("the empty token EPS is not a phone");
        }
        seq.push_back(p);
      }
      i = j;
    }
    return seq;
  }

  std::string format_seq(const PhoneSeq &seq) const {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i > 0) out += ' ';
      out += symbol(seq[i]);
    }
    return out;
  }

 private:
  void check(Phone p) const {
    if (!valid(p)) {
      throw ContractError("phone index " + std::to_string(p) +
                          " out of range (inventory size " +
                          std::to_string(symbols_.size()) + ")");
    }
  }

  static void validate_symbol(std::string_view s) {
    if (s.empty()) throw FormatError("empty phone symbol");
    if (s == "-") throw FormatError("'-' is reserved for absent fields");
    for (char c : s) {
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        throw FormatError("phone symbol '" + std::string(s) +
                          "' contains whitespace");
      }
    }
    if (s.find('/') != std::string_view::npos ||
        s.find("–") != std::string_view::npos) {
      throw FormatError("phone symbol '" + std::string(s) +
                        "' uses a reserved delimiter");
    }
  }

  Phone add_unchecked(std::string key, PhoneOrigin origin) {
    Phone p = static_cast<Phone>(symbols_.size());
    index_.emplace(key, p);
    symbols_.push_back(std::move(key));
    origins_.push_back(origin);
    return p;
  }

  std::vector<std::string> symbols_;
  std::vector<PhoneOrigin> origins_;
  std::unordered_map<std::string, Phone> index_;
};

// Reads "symbol<TAB>origin" lines. Blank lines and lines starting with '#'
// are skipped; a trailing '\r' is tolerated. SIL and EPS are implicit, so a
// file that names them fails as a duplicate.
inline PhoneInventory load_inventory(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open inventory file: " + path.string());
  PhoneInventory inv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError("expected 'symbol<TAB>origin'", path.string(), lineno);
    }
    std::string symbol = line.substr(0, tab);
    std::string origin_text = line.substr(tab + 1);
    auto origin = parse_origin(origin_text);
    if (!origin) {
      throw FormatError("unknown origin '" + origin_text + "'", path.string(),
                        lineno);
    }
    try {
      inv.add(symbol, *origin);
    } catch (const FormatError &e) {
      // Re-throw with location; keep the more specific exception type.
      if (dynamic_cast<const DuplicateSymbolError *>(&e) != nullptr) {
        throw DuplicateSymbolError(e.what(), path.string(), lineno);
      }
      throw FormatError(e.what(), path.string(), lineno);
    }
  }
  if (inv.phone_count() == 0) {
    throw FormatError("inventory file defines no phones: " + path.string());
  }
  return inv;
}

}  // namespace phoneval

#endif  // PHONEVAL_INVENTORY_HPP_
