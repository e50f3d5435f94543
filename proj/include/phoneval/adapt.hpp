// include/phoneval/adapt.hpp

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

#ifndef PHONEVAL_ADAPT_HPP_
#define PHONEVAL_ADAPT_HPP_

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "phoneval/corpus.hpp"
#include "phoneval/error.hpp"
#include "phoneval/inventory.hpp"
#include "phoneval/rules.hpp"

namespace phoneval {

// Records that `rule` fired at `position` (index of the lhs start in the
// canonical pronunciation) choosing `alternative` (index into the rule's
// alternative list).
struct RuleApplication {
  std::size_t rule;
  std::size_t position;
  std::size_t alternative;

  bool operator==(const RuleApplication &) const = default;
};

struct PronVariant {
  PhoneSeq phones;
  std::vector<RuleApplication> applied;  // empty for the canonical form
  std::size_t edit_count = 0;

  bool is_canonical() const { return applied.empty(); }
  bool operator==(const PronVariant &) const = default;
};

namespace detail {

// A place in the canonical pronunciation where one rule can fire. Rewrite
// sites (substitution, deletion) own the phone at `slot`; insertion sites
// own the gap after `slot`.
struct ExpansionSite {
  std::size_t rule_index;
  std::size_t lhs_start;
  std::size_t slot;
  bool rewrites;
  // Candidate slot contents. Entry 0 is always the identity choice; entries
  // with alt_index >= 0 map back to the rule's alternative list.
  std::vector<PhoneSeq> choices;
  std::vector<int> alt_index;
};

inline bool symbol_seq_less(const PhoneSeq &a, const PhoneSeq &b,
                            const PhoneInventory &inv) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return inv.symbol(a[i]) < inv.symbol(b[i]);
  }
  return a.size() < b.size();
}

inline std::vector<ExpansionSite> find_sites(const PhoneSeq &canonical,
                                             std::span<const ErrorRule> rules) {
  std::vector<ExpansionSite> sites;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const ErrorRule &rule = rules[r];
    if (rule.lhs.empty()) throw ContractError("rule with empty lhs");
    for (std::size_t pos = 0; pos + rule.lhs.size() <= canonical.size();
         ++pos) {
      bool hit = true;
      for (std::size_t k = 0; k < rule.lhs.size(); ++k) {
        if (canonical[pos + k] != rule.lhs[k]) {
          hit = false;
          break;
        }
      }
      if (!hit) continue;
      ExpansionSite site;
      site.rule_index = r;
      site.lhs_start = pos;
      switch (rule.kind) {
        case RuleKind::kSubstitution:
          site.slot = pos;
          site.rewrites = true;
          break;
        case RuleKind::kDeletion:
          site.slot = pos + 1;
          site.rewrites = true;
          break;
        case RuleKind::kInsertion:
          site.slot = pos;  // gap after this phone
          site.rewrites = false;
          break;
      }
      const PhoneSeq identity = rule.identity();
      site.choices.push_back(identity);
      site.alt_index.push_back(-1);
      for (std::size_t a = 0; a < rule.alternatives.size(); ++a) {
        const PhoneSeq &alt = rule.alternatives[a];
        if (alt == identity) continue;
        if (std::find(site.choices.begin(), site.choices.end(), alt) !=
            site.choices.end()) {
          continue;
        }
        site.choices.push_back(alt);
        site.alt_index.push_back(static_cast<int>(a));
      }
      if (site.choices.size() > 1) sites.push_back(std::move(site));
    }
  }
  // Rewrite sites competing for the same phone: the longer lhs wins, then
  // the earlier rule. Insertion sites never conflict; several rules may
  // fill the same gap.
  std::vector<ExpansionSite> kept;
  for (auto &site : sites) {
    if (!site.rewrites) {
      kept.push_back(std::move(site));
      continue;
    }
    bool dominated = false;
    for (auto &other : kept) {
      if (!other.rewrites || other.slot != site.slot) continue;
      const auto rank = [&rules](const ExpansionSite &s) {
        return std::make_pair(rules[s.rule_index].lhs.size(),
                              rules.size() - s.rule_index);
      };
      if (rank(other) >= rank(site)) {
        dominated = true;
      } else {
        other = site;
        dominated = true;
      }
      break;
    }
    if (!dominated) kept.push_back(std::move(site));
  }
  // Apply left to right; insertions into the same gap fire in rule order.
  std::sort(kept.begin(), kept.end(),
            [](const ExpansionSite &a, const ExpansionSite &b) {
              if (a.slot != b.slot) return a.slot < b.slot;
              if (a.rewrites != b.rewrites) return a.rewrites;
              return a.rule_index < b.rule_index;
            });
  return kept;
}

}  // namespace detail

// Expands one canonical pronunciation into its variant set under the given
// rules. Every matching site independently picks either its identity choice
// or one of its alternatives; the cross product of those picks, deduplicated
// by phone string, is the variant set. Rules fire on canonical positions
// only, never on the output of another rule. The result starts with the
// canonical form, followed by the other variants ordered by edit count and
// then by symbol string, truncated to `cap` entries in total.
inline std::vector<PronVariant> expand_pronunciation(
    const PhoneSeq &canonical, std::span<const ErrorRule> rules,
    std::size_t cap, const PhoneInventory &inv) {
  if (cap < 1) throw ConfigError("variant cap must be >= 1");
  const auto sites = detail::find_sites(canonical, rules);
  double combinations = 1.0;
  for (const auto &site : sites) {
    combinations *= static_cast<double>(site.choices.size());
  }
  if (combinations > 1e6) {
    throw UserError("rule expansion of '" + inv.format_seq(canonical) +
                    "' is too large (" + std::to_string(sites.size()) +
                    " sites)");
  }

  std::map<PhoneSeq, PronVariant> best;
  std::vector<std::size_t> pick(sites.size(), 0);
  while (true) {
    PronVariant v;
    std::size_t site_at = 0;
    for (std::size_t pos = 0; pos <= canonical.size(); ++pos) {
      // Rewrite site owning this position, if any, else the phone itself.
      if (pos < canonical.size()) {
        bool rewritten = false;
        for (std::size_t s = site_at; s < sites.size() && sites[s].slot == pos;
             ++s) {
          if (sites[s].rewrites) {
            const auto &content = sites[s].choices[pick[s]];
            v.phones.insert(v.phones.end(), content.begin(), content.end());
            rewritten = true;
            break;
          }
        }
        if (!rewritten) v.phones.push_back(canonical[pos]);
      }
      if (pos < canonical.size()) {
        for (std::size_t s = site_at; s < sites.size(); ++s) {
          if (sites[s].slot != pos) break;
          if (!sites[s].rewrites) {
            const auto &content = sites[s].choices[pick[s]];
            v.phones.insert(v.phones.end(), content.begin(), content.end());
          }
        }
        while (site_at < sites.size() && sites[site_at].slot == pos) ++site_at;
      }
    }
    for (std::size_t s = 0; s < sites.size(); ++s) {
      if (pick[s] == 0) continue;
      v.applied.push_back(RuleApplication{
          sites[s].rule_index, sites[s].lhs_start,
          static_cast<std::size_t>(sites[s].alt_index[pick[s]])});
      ++v.edit_count;
    }
    auto it = best.find(v.phones);
    if (it == best.end()) {
      best.emplace(v.phones, std::move(v));
    } else if (v.edit_count < it->second.edit_count) {
      it->second = std::move(v);
    }
    // Advance the odometer over site choices.
    std::size_t s = 0;
    while (s < sites.size()) {
      if (++pick[s] < sites[s].choices.size()) break;
      pick[s] = 0;
      ++s;
    }
    if (s == sites.size()) break;
  }

  std::vector<PronVariant> out;
  out.reserve(best.size());
  PronVariant canonical_variant;
  for (auto &[phones, v] : best) {
    if (phones == canonical && v.edit_count == 0) {
      canonical_variant = std::move(v);
    } else {
      out.push_back(std::move(v));
    }
  }
  std::sort(out.begin(), out.end(),
            [&inv](const PronVariant &a, const PronVariant &b) {
              if (a.edit_count != b.edit_count) {
                return a.edit_count < b.edit_count;
              }
              return detail::symbol_seq_less(a.phones, b.phones, inv);
            });
  out.insert(out.begin(), std::move(canonical_variant));
  if (out.size() > cap) out.resize(cap);
  return out;
}

struct AdaptedLexicon {
  // Word -> variant set, canonical first.
  std::map<std::string, std::vector<PronVariant>> entries;

  std::size_t variant_count() const {
    std::size_t n = 0;
    for (const auto &[w, vs] : entries) n += vs.size();
    return n;
  }
};

// Expands the canonical pronunciation of every lexicon word. Extra
// dictionary pronunciations beyond the first are kept as extra variants
// (deduplicated, counted as zero-edit) after the canonical one.
inline AdaptedLexicon expand_lexicon(const Lexicon &lex,
                                     std::span<const ErrorRule> rules,
                                     std::size_t cap,
                                     const PhoneInventory &inv) {
  AdaptedLexicon adapted;
  for (const auto &[word, prons] : lex.entries()) {
    auto variants = expand_pronunciation(prons.front(), rules, cap, inv);
    for (std::size_t i = 1; i < prons.size(); ++i) {
      const PhoneSeq &extra = prons[i];
      bool present = std::any_of(
          variants.begin(), variants.end(),
          [&extra](const PronVariant &v) { return v.phones == extra; });
      if (!present && variants.size() < cap) {
        variants.push_back(PronVariant{extra, {}, 0});
      }
    }
    adapted.entries.emplace(word, std::move(variants));
  }
  return adapted;
}

// Writes "WORD<TAB>phones" lines, each followed by a comment describing how
// the variant was derived. Loading the file back with load_lexicon yields
// the same phone strings (comments are skipped).
inline void write_adapted_lexicon(const std::filesystem::path &path,
                                  const AdaptedLexicon &adapted,
                                  std::span<const ErrorRule> rules,
                                  const PhoneInventory &inv) {
  std::ofstream out(path);
  if (!out) throw UserError("cannot write lexicon file: " + path.string());
  for (const auto &[word, variants] : adapted.entries) {
    for (const auto &v : variants) {
      out << word << '\t' << inv.format_seq(v.phones) << '\n';
      if (v.is_canonical()) {
        out << "#   canonical\n";
        continue;
      }
      out << "#   via";
      for (const auto &app : v.applied) {
        const ErrorRule &rule = rules[app.rule];
        out << ' ' << rule_letter(rule.kind) << '['
            << inv.format_seq(rule.lhs) << "]@" << app.position << "->";
        const PhoneSeq &alt = rule.alternatives[app.alternative];
        out << (alt.empty() ? "()" : inv.format_seq(alt)) << ';';
      }
      out << '\n';
    }
  }
  if (!out) throw UserError("error writing lexicon file: " + path.string());
}

}  // namespace phoneval

#endif  // PHONEVAL_ADAPT_HPP_
