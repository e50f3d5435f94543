// include/phoneval/align.hpp

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

#ifndef PHONEVAL_ALIGN_HPP_
#define PHONEVAL_ALIGN_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phoneval/error.hpp"
#include "phoneval/inventory.hpp"

namespace phoneval {

enum class OpKind { kMatch, kSubstitute, kDelete, kInsert };

inline char op_letter(OpKind k) {
  switch (k) {
    case OpKind::kMatch: return 'M';
    case OpKind::kSubstitute: return 'S';
    case OpKind::kDelete: return 'D';
    case OpKind::kInsert: return 'I';
  }
  return '?';
}

// One step of an alignment trace. ref_pos/hyp_pos are indices into the
// aligned sequences; -1 where the op does not touch that side (hyp side of a
// deletion, ref side of an insertion). The untouched phone slot holds kEps.
struct EditOp {
  OpKind kind;
  int ref_pos;
  int hyp_pos;
  Phone ref;
  Phone hyp;

  bool operator==(const EditOp &) const = default;
};

struct AlignCosts {
  double substitute = 1.0;
  double remove = 1.0;
  double insert = 1.0;
};

struct Alignment {
  std::vector<EditOp> ops;
  double cost = 0.0;
};

// Counts over one or more alignments. ref_len is the phone count of the
// reference side, the denominator of the error rate.
struct AlignmentStats {
  long matches = 0;
  long substitutions = 0;
  long deletions = 0;
  long insertions = 0;
  long ref_len = 0;
  long hyp_len = 0;

  long errors() const { return substitutions + deletions + insertions; }

  AlignmentStats &operator+=(const AlignmentStats &o) {
    matches += o.matches;
    substitutions += o.substitutions;
    deletions += o.deletions;
    insertions += o.insertions;
    ref_len += o.ref_len;
    hyp_len += o.hyp_len;
    return *this;
  }

  bool operator==(const AlignmentStats &) const = default;
};

// Minimum-cost alignment of hyp against ref by dynamic programming over edit
// operations. Matches cost 0 and are only taken for equal phones. Where
// several operations tie, match/substitute wins over delete wins over
// insert, which makes the trace deterministic.
inline Alignment align(const PhoneSeq &ref, const PhoneSeq &hyp,
                       const AlignCosts &costs = AlignCosts{}) {
  if (costs.substitute < 0 || costs.remove < 0 || costs.insert < 0) {
    throw ConfigError("alignment costs must be non-negative");
  }
  const std::size_t m = ref.size();
  const std::size_t n = hyp.size();
  const std::size_t w = n + 1;
  std::vector<double> dist((m + 1) * (n + 1), 0.0);
  // Back-pointers: 'd' diagonal (match/substitute), 'u' up (delete),
  // 'l' left (insert).
  std::vector<char> from((m + 1) * (n + 1), 0);
  for (std::size_t i = 1; i <= m; ++i) {
    dist[i * w] = static_cast<double>(i) * costs.remove;
    from[i * w] = 'u';
  }
  for (std::size_t j = 1; j <= n; ++j) {
    dist[j] = static_cast<double>(j) * costs.insert;
    from[j] = 'l';
  }
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const bool eq = ref[i - 1] == hyp[j - 1];
      const double diag =
          dist[(i - 1) * w + (j - 1)] + (eq ? 0.0 : costs.substitute);
      const double up = dist[(i - 1) * w + j] + costs.remove;
      const double left = dist[i * w + (j - 1)] + costs.insert;
      double best = diag;
      char move = 'd';
      if (up < best) {
        best = up;
        move = 'u';
      }
      if (left < best) {
        best = left;
        move = 'l';
      }
      dist[i * w + j] = best;
      from[i * w + j] = move;
    }
  }
  Alignment result;
  result.cost = dist[m * w + n];
  std::size_t i = m, j = n;
  while (i > 0 || j > 0) {
    switch (from[i * w + j]) {
      case 'd': {
        const bool eq = ref[i - 1] == hyp[j - 1];
        result.ops.push_back(EditOp{eq ? OpKind::kMatch : OpKind::kSubstitute,
                                    static_cast<int>(i) - 1,
                                    static_cast<int>(j) - 1, ref[i - 1],
                                    hyp[j - 1]});
        --i;
        --j;
        break;
      }
      case 'u':
        result.ops.push_back(EditOp{OpKind::kDelete, static_cast<int>(i) - 1,
                                    -1, ref[i - 1], PhoneInventory::kEps});
        --i;
        break;
      case 'l':
        result.ops.push_back(EditOp{OpKind::kInsert, -1,
                                    static_cast<int>(j) - 1,
                                    PhoneInventory::kEps, hyp[j - 1]});
        --j;
        break;
      default:
        throw ContractError("corrupt alignment back-pointer");
    }
  }
  std::reverse(result.ops.begin(), result.ops.end());
  return result;
}

inline AlignmentStats stats(const Alignment &a) {
  AlignmentStats s;
  for (const auto &op : a.ops) {
    switch (op.kind) {
      case OpKind::kMatch: ++s.matches; break;
      case OpKind::kSubstitute: ++s.substitutions; break;
      case OpKind::kDelete: ++s.deletions; break;
      case OpKind::kInsert: ++s.insertions; break;
    }
    if (op.ref_pos >= 0) ++s.ref_len;
    if (op.hyp_pos >= 0) ++s.hyp_len;
  }
  return s;
}

// Phone error rate in percent: 100 * (S + D + I) / P with P the reference
// length. Deliberately unclamped; heavy insertion pushes it past 100.
inline double per(const AlignmentStats &s) {
  if (s.ref_len <= 0) {
    throw UndefinedMetricError("error rate of an empty reference is undefined");
  }
  return 100.0 * static_cast<double>(s.errors()) /
         static_cast<double>(s.ref_len);
}

// Accuracy as the literal complement of the error rate. Negative whenever
// the error rate exceeds 100.
inline double accuracy(const AlignmentStats &s) { return 100.0 - per(s); }

// Micro-averaged error rate: operation counts are pooled over all pairs and
// the rate is taken once at the end.
inline AlignmentStats corpus_stats(
    std::span<const std::pair<PhoneSeq, PhoneSeq>> pairs,
    const AlignCosts &costs = AlignCosts{}) {
  AlignmentStats total;
  for (const auto &[ref, hyp] : pairs) {
    total += stats(align(ref, hyp, costs));
  }
  return total;
}

inline double corpus_per(std::span<const std::pair<PhoneSeq, PhoneSeq>> pairs,
                         const AlignCosts &costs = AlignCosts{}) {
  return per(corpus_stats(pairs, costs));
}

// Renders an alignment as three padded text rows (ref, ops, hyp), one column
// per edit operation. Intended for logs and reports.
inline std::string format_alignment(const Alignment &a,
                                    const PhoneInventory &inv) {
  std::string ref_row, op_row, hyp_row;
  for (const auto &op : a.ops) {
    std::string r = op.ref_pos >= 0 ? inv.symbol(op.ref) : "*";
    std::string h = op.hyp_pos >= 0 ? inv.symbol(op.hyp) : "*";
    std::string o(1, op_letter(op.kind));
    std::size_t width = std::max({r.size(), h.size(), o.size()}) + 1;
    r.resize(width, ' ');
    o.resize(width, ' ');
    h.resize(width, ' ');
    ref_row += r;
    op_row += o;
    hyp_row += h;
  }
  auto rtrim = [](std::string &s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
  };
  rtrim(ref_row);
  rtrim(op_row);
  rtrim(hyp_row);
  return ref_row + "\n" + op_row + "\n" + hyp_row + "\n";
}

}  // namespace phoneval

#endif  // PHONEVAL_ALIGN_HPP_
