// include/phoneval/report.hpp

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

#ifndef PHONEVAL_REPORT_HPP_
#define PHONEVAL_REPORT_HPP_

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "phoneval/align.hpp"
#include "phoneval/corpus.hpp"
#include "phoneval/detect.hpp"
#include "phoneval/error.hpp"
#include "phoneval/inventory.hpp"

namespace phoneval {

struct PhoneReportRow {
  Phone phone = 0;
  long ref_count = 0;     // occurrences in the canonical tier
  long gold_errors = 0;   // positions the speaker actually mispronounced
  DetectionCounts detection;
};

// Full evaluation of a corpus whose utterances carry all three tiers.
// Utterances missing man or asr are skipped and counted.
struct EvaluationReport {
  long scored = 0;
  long skipped = 0;
  AlignmentStats asr_vs_man;  // how well the system transcribed the speech
  AlignmentStats asr_vs_ide;  // how far the system strayed from canonical
  AlignmentStats man_vs_ide;  // how far the speaker strayed from canonical
  DetectionCounts detection;
  std::vector<PhoneReportRow> per_phone;

  double per_asr_vs_man() const { return per(asr_vs_man); }
  double per_asr_vs_ide() const { return per(asr_vs_ide); }
  double per_man_vs_ide() const { return per(man_vs_ide); }
};

// Scores every utterance that has both a man and an asr tier. Alignments
// use unit costs. Detection flags are projections onto the canonical tier:
// gold flags from man vs ide, detected flags from asr vs ide.
inline EvaluationReport evaluate_corpus(std::span<const Utterance> utts,
                                        std::size_t inventory_size) {
  EvaluationReport report;
  report.per_phone.resize(inventory_size);
  for (std::size_t p = 0; p < inventory_size; ++p) {
    report.per_phone[p].phone = static_cast<Phone>(p);
  }
  for (const auto &u : utts) {
    if (!u.man || !u.asr) {
      ++report.skipped;
      continue;
    }
    ++report.scored;
    report.asr_vs_man += stats(align(*u.man, *u.asr));
    report.asr_vs_ide += stats(align(u.ide, *u.asr));
    report.man_vs_ide += stats(align(u.ide, *u.man));
    const auto gold = error_positions(u.ide, *u.man);
    const auto detected = error_positions(u.ide, *u.asr);
    report.detection += score_detection(gold, detected);
    for (std::size_t i = 0; i < u.ide.size(); ++i) {
      auto &row = report.per_phone[static_cast<std::size_t>(u.ide[i])];
      ++row.ref_count;
      if (gold[i]) ++row.gold_errors;
      if (gold[i] && detected[i]) ++row.detection.tp;
      else if (!gold[i] && detected[i]) ++row.detection.fp;
      else if (gold[i] && !detected[i]) ++row.detection.fn;
      else ++row.detection.tn;
    }
  }
  if (report.scored == 0) {
    throw UserError("no utterance carries both man and asr tiers");
  }
  return report;
}

namespace detail {

inline nlohmann::json stats_to_json(const AlignmentStats &s) {
  return nlohmann::json{{"matches", s.matches},
                        {"substitutions", s.substitutions},
                        {"deletions", s.deletions},
                        {"insertions", s.insertions},
                        {"ref_len", s.ref_len},
                        {"hyp_len", s.hyp_len},
                        {"per", per(s)},
                        {"accuracy", accuracy(s)}};
}

inline nlohmann::json detection_to_json(const DetectionCounts &d) {
  return nlohmann::json{{"tp", d.tp},           {"fp", d.fp},
                        {"fn", d.fn},           {"tn", d.tn},
                        {"precision", d.precision()},
                        {"recall", d.recall()}, {"f1", d.f1()},
                        {"accuracy", d.accuracy()}};
}

}  // namespace detail

// JSON form of the report. Keys are emitted sorted, so the same report
// always serializes to the same bytes. The two accuracy readings are both
// present: "accuracy" inside each alignment block is 100 minus the error
// rate, "accuracy" inside detection blocks is the classification accuracy
// over canonical positions.
inline std::string report_to_json(const EvaluationReport &r,
                                  const PhoneInventory &inv) {
  nlohmann::json j;
  j["utterances"] = {{"scored", r.scored}, {"skipped", r.skipped}};
  j["asr_vs_man"] = detail::stats_to_json(r.asr_vs_man);
  j["asr_vs_ide"] = detail::stats_to_json(r.asr_vs_ide);
  j["man_vs_ide"] = detail::stats_to_json(r.man_vs_ide);
  j["detection"] = detail::detection_to_json(r.detection);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto &row : r.per_phone) {
    if (row.ref_count == 0) continue;
    rows.push_back(nlohmann::json{{"phone", inv.symbol(row.phone)},
                                  {"ref_count", row.ref_count},
                                  {"gold_errors", row.gold_errors},
                                  {"detection",
                                   detail::detection_to_json(row.detection)}});
  }
  j["per_phone"] = std::move(rows);
  return j.dump(2) + "\n";
}

// CSV form: one block of overall rows, then one row per phone that occurs
// in the canonical tier.
inline std::string report_to_csv(const EvaluationReport &r,
                                 const PhoneInventory &inv) {
  char buf[256];
  std::string out =
      "section,name,matches,substitutions,deletions,insertions,ref_len,"
      "hyp_len,per\n";
  auto stat_row = [&](const char *name, const AlignmentStats &s) {
    std::snprintf(buf, sizeof(buf), "overall,%s,%ld,%ld,%ld,%ld,%ld,%ld,%.6f\n",
                  name, s.matches, s.substitutions, s.deletions, s.insertions,
                  s.ref_len, s.hyp_len, per(s));
    out += buf;
  };
  stat_row("asr_vs_man", r.asr_vs_man);
  stat_row("asr_vs_ide", r.asr_vs_ide);
  stat_row("man_vs_ide", r.man_vs_ide);
  std::snprintf(buf, sizeof(buf),
                "detection,overall,tp=%ld,fp=%ld,fn=%ld,tn=%ld,precision=%.6f,"
                "recall=%.6f,f1=%.6f,accuracy=%.6f\n",
                r.detection.tp, r.detection.fp, r.detection.fn, r.detection.tn,
                r.detection.precision(), r.detection.recall(),
                r.detection.f1(), r.detection.accuracy());
  out += buf;
  out += "phone,symbol,ref_count,gold_errors,tp,fp,fn,tn,precision,recall\n";
  for (const auto &row : r.per_phone) {
    if (row.ref_count == 0) continue;
    std::snprintf(buf, sizeof(buf),
                  "phone,%s,%ld,%ld,%ld,%ld,%ld,%ld,%.6f,%.6f\n",
                  inv.symbol(row.phone).c_str(), row.ref_count,
                  row.gold_errors, row.detection.tp, row.detection.fp,
                  row.detection.fn, row.detection.tn, row.detection.precision(),
                  row.detection.recall());
    out += buf;
  }
  return out;
}

inline void write_text_file(const std::filesystem::path &path,
                            const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UserError("cannot write file: " + path.string());
  out << content;
  if (!out) throw UserError("error writing file: " + path.string());
}

}  // namespace phoneval

#endif  // PHONEVAL_REPORT_HPP_
