// include/phoneval/detect.hpp

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

#ifndef PHONEVAL_DETECT_HPP_
#define PHONEVAL_DETECT_HPP_

#include <vector>

#include "phoneval/align.hpp"
#include "phoneval/error.hpp"
#include "phoneval/inventory.hpp"

namespace phoneval {

// Marks each canonical position whose realization differs from the
// canonical plan: substituted and deleted positions are flagged directly;
// an inserted phone flags the canonical position just before it (the first
// position when the insertion precedes everything). The alignment is
// computed at unit costs.
inline std::vector<bool> error_positions(const PhoneSeq &ide,
                                         const PhoneSeq &observed) {
  std::vector<bool> flags(ide.size(), false);
  const Alignment a = align(ide, observed);
  int cursor = 0;
  for (const auto &op : a.ops) {
    switch (op.kind) {
      case OpKind::kMatch:
        ++cursor;
        break;
      case OpKind::kSubstitute:
      case OpKind::kDelete:
        flags[static_cast<std::size_t>(cursor)] = true;
        ++cursor;
        break;
      case OpKind::kInsert: {
        if (!flags.empty()) {
          const int at = cursor > 0 ? cursor - 1 : 0;
          flags[static_cast<std::size_t>(at)] = true;
        }
        break;
      }
    }
  }
  return flags;
}

struct DetectionCounts {
  long tp = 0;  // gold error, flagged
  long fp = 0;  // no gold error, flagged
  long fn = 0;  // gold error, missed
  long tn = 0;  // no gold error, not flagged

  long total() const { return tp + fp + fn + tn; }

  // Precision/recall of error detection. Empty denominators score 1: a
  // system that flags nothing is perfectly precise, a corpus without errors
  // is perfectly recalled.
  double precision() const {
    return tp + fp == 0 ? 1.0
                        : static_cast<double>(tp) /
                              static_cast<double>(tp + fp);
  }
  double recall() const {
    return tp + fn == 0 ? 1.0
                        : static_cast<double>(tp) /
                              static_cast<double>(tp + fn);
  }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
  // Fraction of canonical positions classified correctly.
  double accuracy() const {
    return total() == 0 ? 1.0
                        : static_cast<double>(tp + tn) /
                              static_cast<double>(total());
  }

  DetectionCounts &operator+=(const DetectionCounts &o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }

  bool operator==(const DetectionCounts &) const = default;
};

// Per-position comparison of detected errors (from the automatic
// transcription) against gold errors (from the manual one). Both inputs are
// projections onto the same canonical sequence, so the counts line up
// position by position.
inline DetectionCounts score_detection(const std::vector<bool> &gold,
                                       const std::vector<bool> &detected) {
  if (gold.size() != detected.size()) {
    throw ContractError("detection flag vectors differ in length");
  }
  DetectionCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] && detected[i]) ++c.tp;
    else if (!gold[i] && detected[i]) ++c.fp;
    else if (gold[i] && !detected[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

}  // namespace phoneval

#endif  // PHONEVAL_DETECT_HPP_
