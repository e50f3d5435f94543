// include/phoneval/rules.hpp

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

#ifndef PHONEVAL_RULES_HPP_
#define PHONEVAL_RULES_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "phoneval/corpus.hpp"
#include "phoneval/error.hpp"
#include "phoneval/inventory.hpp"

namespace phoneval {

enum class RuleKind { kSubstitution, kDeletion, kInsertion };

inline char rule_letter(RuleKind k) {
  switch (k) {
    case RuleKind::kSubstitution: return 'S';
    case RuleKind::kDeletion: return 'D';
    case RuleKind::kInsertion: return 'I';
  }
  return '?';
}

// One pronunciation error rule. The left-hand side matches a phone window in
// a canonical pronunciation; exactly one slot of that window is mutable and
// `alternatives` lists the candidate contents of that slot:
//
//   substitution  lhs = {p}     slot is p itself, alternatives are single
//                               phones that may replace it,
//   deletion      lhs = {c, p}  slot is p after context c, alternatives are
//                               {p} (kept) and {} (dropped),
//   insertion     lhs = {c} or  slot is the gap after c (and before the
//                 {c, d}        second lhs phone if present), alternatives
//                               are the phone strings that may fill it.
//
// The notation in rule files writes the slot inline, e.g.
//   S<TAB>dh<TAB>dh/d          D<TAB>n d<TAB>n d/      I<TAB>er<TAB>er r/R/
// where '/' separates alternatives and a trailing '/' is an empty one.
struct ErrorRule {
  RuleKind kind;
  PhoneSeq lhs;
  std::vector<PhoneSeq> alternatives;

  // Slot content that reproduces the input unchanged.
  PhoneSeq identity() const {
    switch (kind) {
      case RuleKind::kSubstitution: return {lhs.front()};
      case RuleKind::kDeletion: return {lhs.back()};
      case RuleKind::kInsertion: return {};
    }
    return {};
  }

  bool has_identity_alternative() const {
    const PhoneSeq id = identity();
    return std::find(alternatives.begin(), alternatives.end(), id) !=
           alternatives.end();
  }

  bool operator==(const ErrorRule &) const = default;
};

namespace detail {

inline std::vector<std::string> split_on(const std::string &text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

// Parses one rule from its three tab-separated fields. `where` is used in
// error messages only.
inline ErrorRule parse_rule(const std::string &kind_text,
                            const std::string &lhs_text,
                            const std::string &alts_text,
                            const PhoneInventory &inv,
                            const std::string &where = "") {
  auto fail = [&](const std::string &msg) -> void {
    throw FormatError(where.empty() ? msg : msg + " (" + where + ")");
  };
  ErrorRule rule{};
  if (kind_text == "S") {
    rule.kind = RuleKind::kSubstitution;
  } else if (kind_text == "D") {
    rule.kind = RuleKind::kDeletion;
  } else if (kind_text == "I") {
    rule.kind = RuleKind::kInsertion;
  } else {
    fail("rule kind must be S, D or I, got '" + kind_text + "'");
  }
  rule.lhs = inv.parse_seq(lhs_text);
  const auto parts = detail::split_on(alts_text, '/');
  switch (rule.kind) {
    case RuleKind::kSubstitution: {
      if (rule.lhs.size() != 1) fail("substitution rules take a single phone");
      for (const auto &part : parts) {
        PhoneSeq alt = inv.parse_seq(part);
        if (alt.size() != 1) {
          fail("substitution alternatives must be single phones, got '" +
               part + "'");
        }
        rule.alternatives.push_back(std::move(alt));
      }
      break;
    }
    case RuleKind::kDeletion: {
      if (rule.lhs.size() != 2) {
        fail("deletion rules take a context phone and a deleted phone");
      }
      if (parts.size() != 2 || !parts[1].empty()) {
        fail("deletion alternatives must be 'c p/' with a trailing empty "
             "option");
      }
      if (inv.parse_seq(parts[0]) != rule.lhs) {
        fail("deletion alternative '" + parts[0] +
             "' does not repeat the left-hand side");
      }
      rule.alternatives.push_back({rule.lhs[1]});
      rule.alternatives.push_back({});
      break;
    }
    case RuleKind::kInsertion: {
      if (rule.lhs.empty() || rule.lhs.size() > 2) {
        fail("insertion rules take one or two context phones");
      }
      std::vector<PhoneSeq> alt_tokens;
      for (const auto &part : parts) alt_tokens.push_back(inv.parse_seq(part));
      // The first alternative repeats the left context; the last repeats the
      // right context when the lhs has one. Strip both to get slot contents.
      if (alt_tokens.front().empty() || alt_tokens.front()[0] != rule.lhs[0]) {
        fail("first insertion alternative must start with the context phone");
      }
      alt_tokens.front().erase(alt_tokens.front().begin());
      if (rule.lhs.size() == 2) {
        if (alt_tokens.back().empty() ||
            alt_tokens.back().back() != rule.lhs[1]) {
          fail("last insertion alternative must end with the second context "
               "phone");
        }
        alt_tokens.back().pop_back();
      }
      rule.alternatives = std::move(alt_tokens);
      break;
    }
  }
  if (rule.alternatives.empty()) fail("rule has no alternatives");
  return rule;
}

// Renders a rule back into file notation, inverse of parse_rule.
inline std::string format_rule(const ErrorRule &rule,
                               const PhoneInventory &inv) {
  std::string out(1, rule_letter(rule.kind));
  out += '\t';
  out += inv.format_seq(rule.lhs);
  out += '\t';
  switch (rule.kind) {
    case RuleKind::kSubstitution: {
      for (std::size_t i = 0; i < rule.alternatives.size(); ++i) {
        if (i > 0) out += '/';
        out += inv.format_seq(rule.alternatives[i]);
      }
      break;
    }
    case RuleKind::kDeletion: {
      out += inv.format_seq(rule.lhs);
      out += '/';
      break;
    }
    case RuleKind::kInsertion: {
      const std::string left = inv.symbol(rule.lhs[0]);
      const std::string right =
          rule.lhs.size() == 2 ? inv.symbol(rule.lhs[1]) : "";
      for (std::size_t i = 0; i < rule.alternatives.size(); ++i) {
        if (i > 0) out += '/';
        std::string slot = inv.format_seq(rule.alternatives[i]);
        if (i == 0) slot = slot.empty() ? left : left + " " + slot;
        if (i + 1 == rule.alternatives.size() && !right.empty()) {
          slot = slot.empty() ? right : slot + " " + right;
        }
        out += slot;
      }
      break;
    }
  }
  return out;
}

// Rule files hold one rule per line: kind<TAB>lhs<TAB>alternatives, with '#'
// comments and blank lines skipped. Rule order in the file is meaningful; it
// breaks ties when rules compete for the same phone.
inline std::vector<ErrorRule> load_rules(const std::filesystem::path &path,
                                         const PhoneInventory &inv) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open rule file: " + path.string());
  std::vector<ErrorRule> rules;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split_tabs(line);
    if (fields.size() != 3) {
      throw FormatError("expected kind<TAB>lhs<TAB>alternatives",
                        path.string(), lineno);
    }
    const std::string where = path.string() + ":" + std::to_string(lineno);
    try {
      rules.push_back(parse_rule(fields[0], fields[1], fields[2], inv, where));
    } catch (const UnknownPhoneError &e) {
      throw UnknownPhoneError(e.what(), path.string(), lineno);
    }
  }
  return rules;
}

inline void write_rules(const std::filesystem::path &path,
                        const std::vector<ErrorRule> &rules,
                        const PhoneInventory &inv) {
  std::ofstream out(path);
  if (!out) throw UserError("cannot write rule file: " + path.string());
  for (const auto &rule : rules) out << format_rule(rule, inv) << '\n';
  if (!out) throw UserError("error writing rule file: " + path.string());
}

// Counts per kind, in S, D, I order.
struct RuleCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
};

inline RuleCounts count_rules(const std::vector<ErrorRule> &rules) {
  RuleCounts c;
  for (const auto &r : rules) {
    switch (r.kind) {
      case RuleKind::kSubstitution: ++c.substitutions; break;
      case RuleKind::kDeletion: ++c.deletions; break;
      case RuleKind::kInsertion: ++c.insertions; break;
    }
  }
  return c;
}

}  // namespace phoneval

#endif  // PHONEVAL_RULES_HPP_
