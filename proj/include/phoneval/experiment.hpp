// include/phoneval/experiment.hpp

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

#ifndef PHONEVAL_EXPERIMENT_HPP_
#define PHONEVAL_EXPERIMENT_HPP_

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "phoneval/adapt.hpp"
#include "phoneval/channel.hpp"
#include "phoneval/config.hpp"
#include "phoneval/corpus.hpp"
#include "phoneval/decode.hpp"
#include "phoneval/lm.hpp"
#include "phoneval/report.hpp"
#include "phoneval/rng.hpp"

namespace phoneval {

// Candidate pronunciations for a whole utterance: the cross product of each
// word's variants, enumerated best-first by total edit count (ties by index
// tuple, so the all-canonical combination always comes out first) and
// truncated to `cap` distinct phone strings.
inline std::vector<PhoneSeq> utterance_variants(
    const std::vector<std::string> &words, const AdaptedLexicon &adapted,
    std::size_t cap) {
  if (cap < 1) throw ConfigError("utterance variant cap must be >= 1");
  std::vector<const std::vector<PronVariant> *> lists;
  lists.reserve(words.size());
  for (const auto &word : words) {
    auto it = adapted.entries.find(detail::upper_ascii(word));
    if (it == adapted.entries.end() || it->second.empty()) {
      throw UserError("word '" + word + "' has no adapted lexicon entry");
    }
    lists.push_back(&it->second);
  }

  using Tuple = std::vector<std::size_t>;
  std::set<std::pair<long, Tuple>> frontier;
  std::set<Tuple> seen;
  Tuple zero(lists.size(), 0);
  frontier.emplace(0, zero);
  seen.insert(zero);

  std::vector<PhoneSeq> out;
  std::set<PhoneSeq> emitted;
  while (!frontier.empty() && out.size() < cap) {
    auto [edits, tuple] = *frontier.begin();
    frontier.erase(frontier.begin());
    PhoneSeq phones;
    for (std::size_t i = 0; i < lists.size(); ++i) {
      const PhoneSeq &part = (*lists[i])[tuple[i]].phones;
      phones.insert(phones.end(), part.begin(), part.end());
    }
    if (emitted.insert(phones).second) out.push_back(std::move(phones));
    for (std::size_t i = 0; i < lists.size(); ++i) {
      if (tuple[i] + 1 >= lists[i]->size()) continue;
      Tuple next = tuple;
      ++next[i];
      if (!seen.insert(next).second) continue;
      long next_edits = 0;
      for (std::size_t j = 0; j < lists.size(); ++j) {
        next_edits += static_cast<long>((*lists[j])[next[j]].edit_count);
      }
      frontier.emplace(next_edits, std::move(next));
    }
  }
  return out;
}

struct ExperimentResult {
  std::string config_hash;
  std::filesystem::path out_dir;
  long utterances = 0;
  long lm_tokens = 0;
  double lm_perplexity = 0.0;
  std::size_t adapted_variants = 0;
  EvaluationReport baseline;
  EvaluationReport errormodel;
};

namespace detail {

template <typename Fn>
void run_stage(const char *name, std::ostream &log, Fn &&fn) {
  log << "[phoneval] stage " << name << "\n";
  try {
    fn();
  } catch (const UserError &e) {
    throw UserError(std::string("stage ") + name + ": " + e.what());
  } catch (const std::logic_error &e) {
    throw ContractError(std::string("stage ") + name + ": " + e.what());
  }
}

inline std::string comparison_row(const std::string &hash, const char *system,
                                  const EvaluationReport &r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                hash.c_str(), system, r.per_asr_vs_man(), r.per_asr_vs_ide(),
                r.per_man_vs_ide(), r.detection.precision(),
                r.detection.recall(), r.detection.f1(),
                r.detection.accuracy());
  return buf;
}

inline std::string system_summary(const char *title,
                                  const EvaluationReport &r) {
  char buf[512];
  std::snprintf(
      buf, sizeof(buf),
      "%s\n"
      "  PER vs man: %.2f   PER vs ide: %.2f\n"
      "  detection: precision %.3f  recall %.3f  f1 %.3f  accuracy %.3f\n",
      title, r.per_asr_vs_man(), r.per_asr_vs_ide(), r.detection.precision(),
      r.detection.recall(), r.detection.f1(), r.detection.accuracy());
  return buf;
}

}  // namespace detail

// Runs the whole pipeline into cfg.out_dir and returns the headline numbers.
// Every file written is a pure function of the config (minus out_dir), so a
// rerun with the same config reproduces every byte. Progress lines go to
// `log` (stderr in the CLI); nothing here reads the clock.
inline ExperimentResult run_experiment(const ExperimentConfig &cfg,
                                       std::ostream &log) {
  namespace fs = std::filesystem;
  cfg.validate();
  ExperimentResult result;
  result.config_hash = cfg.hash();
  result.out_dir = fs::path(cfg.out_dir);

  PhoneInventory inv;
  std::vector<ErrorRule> rules;
  Lexicon lexicon;
  detail::run_stage("load-inputs", log, [&] {
    if (cfg.inventory.empty() || cfg.lexicon.empty() || cfg.rules.empty()) {
      throw ConfigError(
          "config needs 'inventory', 'lexicon', and 'rules' paths");
    }
    inv = load_inventory(cfg.inventory);
    rules = load_rules(cfg.rules, inv);
    lexicon = load_lexicon(cfg.lexicon, inv);
    fs::create_directories(result.out_dir);
  });

  ChannelModel channel;
  detail::run_stage("build-channel", log, [&] {
    channel = ChannelModel::from_rules(rules, cfg.channel_rate, inv);
    channel.sharpness = cfg.channel_sharpness;
    channel.validate();
  });

  std::vector<Utterance> utts;
  std::vector<std::pair<std::string, Posteriorgram>> posts;
  detail::run_stage("generate-corpus", log, [&] {
    if (cfg.corpus.empty()) {
      std::vector<std::string> word_list;
      for (const auto &[word, prons] : lexicon.entries()) {
        word_list.push_back(word);
      }
      if (word_list.empty()) throw UserError("lexicon has no words");
      char id_buf[32];
      for (long u = 0; u < cfg.n_utterances; ++u) {
        Rng rng(derive_seed(cfg.seed, "prompt", static_cast<std::uint64_t>(u)));
        const long span = cfg.words_max - cfg.words_min + 1;
        const long count =
            cfg.words_min +
            static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(span)));
        Utterance utt;
        std::snprintf(id_buf, sizeof(id_buf), "syn%04ld", u + 1);
        utt.id = id_buf;
        std::snprintf(id_buf, sizeof(id_buf), "spk%02ld", u % 10 + 1);
        utt.speaker = id_buf;
        utt.corpus_tag = "synthetic";
        for (long w = 0; w < count; ++w) {
          const auto pick = rng.uniform_int(word_list.size());
          utt.words.push_back(word_list[pick]);
          const PhoneSeq &pron = lexicon.canonical(word_list[pick]);
          utt.ide.insert(utt.ide.end(), pron.begin(), pron.end());
        }
        utts.push_back(std::move(utt));
      }
    } else {
      utts = load_corpus(cfg.corpus, inv);
      if (utts.empty()) throw UserError("prompt corpus is empty");
    }
    for (std::size_t u = 0; u < utts.size(); ++u) {
      auto sim = simulate_utterance(
          utts[u].ide, channel,
          derive_seed(cfg.seed, "channel", static_cast<std::uint64_t>(u)));
      utts[u].man = std::move(sim.realized);
      utts[u].asr.reset();
      posts.emplace_back(utts[u].id, std::move(sim.frames));
    }
    write_corpus(result.out_dir / "corpus.tsv", utts, inv);
    write_posteriorgrams(result.out_dir / "posteriorgrams.txt", posts,
                         inv.size());
    result.utterances = static_cast<long>(utts.size());
  });

  PhoneLm lm(cfg.lm_order, inv.size(), cfg.smoothing, cfg.smoothing_k);
  detail::run_stage("train-lm", log, [&] {
    std::vector<PhoneSeq> train_set;
    train_set.reserve(utts.size());
    for (const auto &u : utts) {
      train_set.push_back(u.ide);
      result.lm_tokens += static_cast<long>(u.ide.size());
    }
    lm.train(train_set);
    result.lm_perplexity = lm.perplexity(train_set);
    lm.save(result.out_dir / "lm.txt");
  });

  AdaptedLexicon adapted;
  detail::run_stage("expand-lexicon", log, [&] {
    adapted = expand_lexicon(lexicon, rules, cfg.variant_cap, inv);
    result.adapted_variants = adapted.variant_count();
    write_adapted_lexicon(result.out_dir / "adapted_lexicon.tsv", adapted,
                          inv);
  });

  detail::run_stage("decode-baseline", log, [&] {
    std::vector<Utterance> decoded = utts;
    for (std::size_t u = 0; u < decoded.size(); ++u) {
      decoded[u].asr =
          decode_free(posts[u].second, lm, cfg.lm_weight, cfg.beam);
    }
    write_corpus(result.out_dir / "baseline_decoded.tsv", decoded, inv);
    result.baseline = evaluate_corpus(decoded, inv.size());
    write_text_file(result.out_dir / "baseline_report.json",
                    report_to_json(result.baseline, inv, result.config_hash));
    write_text_file(result.out_dir / "baseline_report.csv",
                    report_to_csv(result.baseline, inv));
  });

  detail::run_stage("decode-errormodel", log, [&] {
    std::vector<Utterance> decoded = utts;
    for (std::size_t u = 0; u < decoded.size(); ++u) {
      const auto variants = utterance_variants(decoded[u].words, adapted,
                                               cfg.utterance_variant_cap);
      const auto choice =
          decode_forced(posts[u].second, variants, lm, cfg.forced_lm_weight,
                        cfg.skip_penalty);
      decoded[u].asr = variants[choice.variant];
    }
    write_corpus(result.out_dir / "errormodel_decoded.tsv", decoded, inv);
    result.errormodel = evaluate_corpus(decoded, inv.size());
    write_text_file(
        result.out_dir / "errormodel_report.json",
        report_to_json(result.errormodel, inv, result.config_hash));
    write_text_file(result.out_dir / "errormodel_report.csv",
                    report_to_csv(result.errormodel, inv));
  });

  detail::run_stage("write-summary", log, [&] {
    std::string csv =
        "config_hash,system,per_asr_vs_man,per_asr_vs_ide,per_man_vs_ide,"
        "detection_precision,detection_recall,detection_f1,"
        "detection_accuracy\n";
    csv += detail::comparison_row(result.config_hash, "baseline",
                                  result.baseline);
    csv += detail::comparison_row(result.config_hash, "error_model",
                                  result.errormodel);
    write_text_file(result.out_dir / "comparison.csv", csv);

    char buf[512];
    std::string text = "phoneval experiment summary\n";
    text += "config " + result.config_hash + "\n\n";
    std::snprintf(buf, sizeof(buf),
                  "utterances: %ld scored, %ld skipped\n"
                  "language model: order %d, %ld training tokens, "
                  "perplexity %.3f\n"
                  "adapted lexicon: %zu variants across %zu words\n"
                  "speaker error rate (man vs ide): %.2f PER\n\n",
                  result.baseline.scored, result.baseline.skipped,
                  cfg.lm_order, result.lm_tokens, result.lm_perplexity,
                  result.adapted_variants, adapted.entries.size(),
                  result.baseline.per_man_vs_ide());
    text += buf;
    text += detail::system_summary(
        "baseline (free decoding with the phone language model):",
        result.baseline);
    text += "\n";
    text += detail::system_summary(
        "error model (forced choice over the adapted lexicon):",
        result.errormodel);
    std::snprintf(buf, sizeof(buf),
                  "\nerror model minus baseline, PER vs man: %+.2f "
                  "(negative is better)\n",
                  result.errormodel.per_asr_vs_man() -
                      result.baseline.per_asr_vs_man());
    text += buf;
    write_text_file(result.out_dir / "summary.txt", text);

    write_text_file(result.out_dir / "config_resolved.txt",
                    cfg.canonical() + "config_hash = " + result.config_hash +
                        "\n");
  });

  return result;
}

}  // namespace phoneval

#endif  // PHONEVAL_EXPERIMENT_HPP_
