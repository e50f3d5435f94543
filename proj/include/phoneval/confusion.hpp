// include/phoneval/confusion.hpp

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

#ifndef PHONEVAL_CONFUSION_HPP_
#define PHONEVAL_CONFUSION_HPP_

#include <algorithm>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phoneval/align.hpp"
#include "phoneval/error.hpp"
#include "phoneval/inventory.hpp"
#include "phoneval/rules.hpp"

namespace phoneval {

// Error counts mined from alignments of canonical (reference) against
// manually corrected (hypothesis) transcriptions. Substitutions are a dense
// ref-by-hyp matrix; deletions and insertions are additionally keyed by the
// left-context phone, because that context is what the rule notation needs.
class ConfusionTable {
 public:
  explicit ConfusionTable(std::size_t inventory_size)
      : n_(inventory_size),
        sub_(inventory_size * inventory_size, 0),
        del_uni_(inventory_size, 0),
        ins_uni_(inventory_size, 0),
        ref_totals_(inventory_size, 0) {
    if (inventory_size < 2) {
      throw ContractError("confusion table needs a real inventory");
    }
  }

  std::size_t inventory_size() const { return n_; }

  void add_ref(Phone p) { ++ref_totals_[idx(p)]; }

  void add_substitution(Phone ref, Phone hyp) {
    if (ref == hyp) throw ContractError("substitution of a phone by itself");
    ++sub_[idx(ref) * n_ + idx(hyp)];
  }

  void add_deletion(Phone context, Phone deleted) {
    ++del_[{check(context), check(deleted)}];
    ++del_uni_[idx(deleted)];
  }

  void add_insertion(Phone context, Phone inserted) {
    ++ins_[{check(context), check(inserted)}];
    ++ins_uni_[idx(inserted)];
  }

  long ref_total(Phone p) const { return ref_totals_[idx(p)]; }
  long sub_count(Phone ref, Phone hyp) const {
    return sub_[idx(ref) * n_ + idx(hyp)];
  }
  long del_count(Phone context, Phone deleted) const {
    auto it = del_.find({context, deleted});
    return it == del_.end() ? 0 : it->second;
  }
  long del_count(Phone deleted) const { return del_uni_[idx(deleted)]; }
  long ins_count(Phone context, Phone inserted) const {
    auto it = ins_.find({context, inserted});
    return it == ins_.end() ? 0 : it->second;
  }
  long ins_count(Phone inserted) const { return ins_uni_[idx(inserted)]; }

  const std::map<std::pair<Phone, Phone>, long> &deletions() const {
    return del_;
  }
  const std::map<std::pair<Phone, Phone>, long> &insertions() const {
    return ins_;
  }

  long total_errors() const {
    long t = 0;
    for (long c : sub_) t += c;
    for (const auto &[k, c] : del_) t += c;
    for (const auto &[k, c] : ins_) t += c;
    return t;
  }

  // Merging tables from corpus shards is the same as mining the
  // concatenated corpus.
  ConfusionTable &operator+=(const ConfusionTable &o) {
    if (o.n_ != n_) throw ContractError("merging tables of different size");
    for (std::size_t i = 0; i < sub_.size(); ++i) sub_[i] += o.sub_[i];
    for (std::size_t i = 0; i < n_; ++i) {
      del_uni_[i] += o.del_uni_[i];
      ins_uni_[i] += o.ins_uni_[i];
      ref_totals_[i] += o.ref_totals_[i];
    }
    for (const auto &[k, c] : o.del_) del_[k] += c;
    for (const auto &[k, c] : o.ins_) ins_[k] += c;
    return *this;
  }

  bool operator==(const ConfusionTable &) const = default;

 private:
  Phone check(Phone p) const {
    idx(p);
    return p;
  }
  std::size_t idx(Phone p) const {
    if (p < 0 || static_cast<std::size_t>(p) >= n_) {
      throw ContractError("phone index out of range in confusion table");
    }
    return static_cast<std::size_t>(p);
  }

  std::size_t n_;
  std::vector<long> sub_;
  std::map<std::pair<Phone, Phone>, long> del_;
  std::map<std::pair<Phone, Phone>, long> ins_;
  std::vector<long> del_uni_;
  std::vector<long> ins_uni_;
  std::vector<long> ref_totals_;
};

// Mines a confusion table from (canonical, corrected) sequence pairs using
// minimum-cost alignment at unit costs. Left contexts are taken from the
// canonical side: a deletion's context is the last canonical phone that the
// corrected side actually realized (SIL at the start), an insertion's
// context is the canonical phone just before the insertion point.
inline ConfusionTable mine_confusions(
    std::span<const std::pair<PhoneSeq, PhoneSeq>> pairs,
    std::size_t inventory_size) {
  ConfusionTable table(inventory_size);
  for (const auto &[ref, hyp] : pairs) {
    for (Phone p : ref) table.add_ref(p);
    const Alignment a = align(ref, hyp);
    Phone realized_ctx = PhoneInventory::kSil;
    int ref_cursor = 0;
    for (const auto &op : a.ops) {
      switch (op.kind) {
        case OpKind::kMatch:
          realized_ctx = op.ref;
          ++ref_cursor;
          break;
        case OpKind::kSubstitute:
          table.add_substitution(op.ref, op.hyp);
          realized_ctx = op.ref;
          ++ref_cursor;
          break;
        case OpKind::kDelete:
          table.add_deletion(realized_ctx, op.ref);
          ++ref_cursor;
          break;
        case OpKind::kInsert: {
          const Phone before = ref_cursor > 0
                                   ? ref[static_cast<std::size_t>(ref_cursor) - 1]
                                   : PhoneInventory::kSil;
          table.add_insertion(before, op.hyp);
          break;
        }
      }
    }
  }
  return table;
}

enum class ErrorClass { kSub, kDel, kIns };

inline const char *error_class_name(ErrorClass c) {
  switch (c) {
    case ErrorClass::kSub: return "sub";
    case ErrorClass::kDel: return "del";
    case ErrorClass::kIns: return "ins";
  }
  return "?";
}

// One line of an error profile: for `phone`, the error happened `count`
// times at relative frequency `rate`. `other` is the substitution target,
// the deletion left context, or the inserted phone respectively.
struct ProfileRow {
  Phone phone;
  ErrorClass kind;
  Phone other;
  long count;
  double rate;

  bool operator==(const ProfileRow &) const = default;
};

struct ErrorProfile {
  std::vector<ProfileRow> rows;
};

namespace detail {

inline double safe_rate(long count, long total) {
  if (total <= 0) return 0.0;
  return std::min(1.0, static_cast<double>(count) / static_cast<double>(total));
}

inline bool profile_rank_less(const ProfileRow &a, const ProfileRow &b) {
  if (a.count != b.count) return a.count > b.count;
  if (a.other != b.other) return a.other < b.other;
  return static_cast<int>(a.kind) < static_cast<int>(b.kind);
}

}  // namespace detail

// Per-phone error profile: for every phone, its error events ranked by count
// descending (ties by the other phone's index, then sub < del < ins), capped
// at top_k per phone. Substitution and deletion rates are relative to the
// phone's reference occurrences; insertion rates are relative to the context
// phone's reference occurrences (rows are anchored at the context phone).
inline ErrorProfile profile_errors(const ConfusionTable &t,
                                   std::size_t top_k = 10) {
  if (top_k == 0) throw ConfigError("profile top_k must be positive");
  const std::size_t n = t.inventory_size();
  std::vector<std::vector<ProfileRow>> per_phone(n);
  for (Phone p = 0; static_cast<std::size_t>(p) < n; ++p) {
    for (Phone q = 0; static_cast<std::size_t>(q) < n; ++q) {
      long c = t.sub_count(p, q);
      if (c > 0) {
        per_phone[p].push_back(ProfileRow{
            p, ErrorClass::kSub, q, c, detail::safe_rate(c, t.ref_total(p))});
      }
    }
  }
  for (const auto &[key, c] : t.deletions()) {
    const auto [ctx, p] = key;
    per_phone[static_cast<std::size_t>(p)].push_back(ProfileRow{
        p, ErrorClass::kDel, ctx, c, detail::safe_rate(c, t.ref_total(p))});
  }
  for (const auto &[key, c] : t.insertions()) {
    const auto [ctx, q] = key;
    per_phone[static_cast<std::size_t>(ctx)].push_back(ProfileRow{
        ctx, ErrorClass::kIns, q, c, detail::safe_rate(c, t.ref_total(ctx))});
  }
  ErrorProfile prof;
  for (auto &rows : per_phone) {
    std::sort(rows.begin(), rows.end(), detail::profile_rank_less);
    if (rows.size() > top_k) rows.resize(top_k);
    prof.rows.insert(prof.rows.end(), rows.begin(), rows.end());
  }
  return prof;
}

inline std::string profile_to_csv(const ErrorProfile &prof,
                                  const PhoneInventory &inv) {
  std::string out = "phone,kind,target,count,rate\n";
  char buf[64];
  for (const auto &row : prof.rows) {
    std::snprintf(buf, sizeof(buf), "%ld,%.6f", row.count, row.rate);
    out += inv.symbol(row.phone);
    out += ',';
    out += error_class_name(row.kind);
    out += ',';
    out += inv.symbol(row.other);
    out += ',';
    out += buf;
    out += '\n';
  }
  return out;
}

// Turns frequent confusions into rewrite rules. An error event qualifies
// when it was seen at least min_count times and at a rate of at least
// min_rate relative to its anchor phone (the mis-said phone for
// substitutions and deletions, the left context for insertions). Output is
// ordered by count descending; ties by kind (S, D, I), then lhs, then the
// alternative phone.
inline std::vector<ErrorRule> induce_rules(const ConfusionTable &t,
                                           long min_count = 5,
                                           double min_rate = 0.05) {
  if (min_count < 1) throw ConfigError("induce min_count must be >= 1");
  if (!(min_rate > 0.0) || min_rate > 1.0) {
    throw ConfigError("induce min_rate must be in (0, 1]");
  }
  struct Candidate {
    long count;
    ErrorRule rule;
    Phone alt;
  };
  std::vector<Candidate> cands;
  const std::size_t n = t.inventory_size();
  for (Phone p = 0; static_cast<std::size_t>(p) < n; ++p) {
    for (Phone q = 0; static_cast<std::size_t>(q) < n; ++q) {
      const long c = t.sub_count(p, q);
      if (c >= min_count && detail::safe_rate(c, t.ref_total(p)) >= min_rate) {
        cands.push_back({c,
                         ErrorRule{RuleKind::kSubstitution,
                                   {p},
                                   {{p}, {q}}},
                         q});
      }
    }
  }
  for (const auto &[key, c] : t.deletions()) {
    const auto [ctx, p] = key;
    if (c >= min_count && detail::safe_rate(c, t.ref_total(p)) >= min_rate) {
      cands.push_back({c,
                       ErrorRule{RuleKind::kDeletion, {ctx, p}, {{p}, {}}},
                       p});
    }
  }
  for (const auto &[key, c] : t.insertions()) {
    const auto [ctx, q] = key;
    if (c >= min_count && detail::safe_rate(c, t.ref_total(ctx)) >= min_rate) {
      cands.push_back({c,
                       ErrorRule{RuleKind::kInsertion, {ctx}, {{q}, {}}},
                       q});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate &a,
                                           const Candidate &b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.rule.kind != b.rule.kind) {
      return static_cast<int>(a.rule.kind) < static_cast<int>(b.rule.kind);
    }
    if (a.rule.lhs != b.rule.lhs) return a.rule.lhs < b.rule.lhs;
    return a.alt < b.alt;
  });
  std::vector<ErrorRule> rules;
  rules.reserve(cands.size());
  for (auto &c : cands) rules.push_back(std::move(c.rule));
  return rules;
}

}  // namespace phoneval

#endif  // PHONEVAL_CONFUSION_HPP_
