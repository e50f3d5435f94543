// include/phoneval/lm.hpp

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

#ifndef PHONEVAL_LM_HPP_
#define PHONEVAL_LM_HPP_

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "phoneval/error.hpp"
#include "phoneval/inventory.hpp"

namespace phoneval {

enum class Smoothing { kAddK, kWittenBell };

inline const char *smoothing_name(Smoothing s) {
  switch (s) {
    case Smoothing::kAddK: return "add_k";
    case Smoothing::kWittenBell: return "witten_bell";
  }
  return "?";
}

inline std::optional<Smoothing> parse_smoothing(std::string_view s) {
  if (s == "add_k") return Smoothing::kAddK;
  if (s == "witten_bell") return Smoothing::kWittenBell;
  return std::nullopt;
}

// N-gram model over phone sequences with sentence boundaries. The token
// space is the phone inventory (vocab ids 0..V-1) plus a stop token V that
// is predicted at the end of every sequence and a start token V+1 that only
// ever appears as context padding, so every conditional distributes over
// V+1 outcomes. Out-of-range phone ids fall back to the EPS slot, which is
// otherwise unused in real data.
class PhoneLm {
 public:
  static constexpr int kMinOrder = 1;
  static constexpr int kMaxOrder = 5;

  PhoneLm(int order, std::size_t vocab, Smoothing smoothing, double k = 0.1)
      : order_(order), vocab_(vocab), smoothing_(smoothing), k_(k) {
    if (order < kMinOrder || order > kMaxOrder) {
      throw ConfigError("n-gram order must be between " +
                        std::to_string(kMinOrder) + " and " +
                        std::to_string(kMaxOrder) + ", got " +
                        std::to_string(order));
    }
    if (vocab < 2) throw ConfigError("vocabulary too small");
    if (smoothing == Smoothing::kAddK && !(k > 0.0)) {
      throw ConfigError("add-k smoothing needs k > 0");
    }
  }

  int order() const { return order_; }
  std::size_t vocab() const { return vocab_; }
  // Outcome count of every conditional: the phones plus the stop token.
  std::size_t outcomes() const { return vocab_ + 1; }
  int stop_token() const { return static_cast<int>(vocab_); }
  int start_token() const { return static_cast<int>(vocab_) + 1; }
  Smoothing smoothing() const { return smoothing_; }
  double k() const { return k_; }
  long event_count() const { return trained_events_; }

  // Accumulates counts from training sequences. Counts are kept for every
  // context length from 0 to order-1 so that backoff smoothing can
  // interpolate towards shorter histories.
  void train(std::span<const PhoneSeq> seqs) {
    long events = 0;
    for (const auto &seq : seqs) {
      std::vector<int> ctx(static_cast<std::size_t>(order_ - 1),
                           start_token());
      for (std::size_t i = 0; i <= seq.size(); ++i) {
        const int event =
            i < seq.size() ? clamp_token(seq[i]) : stop_token();
        for (std::size_t drop = 0; drop <= ctx.size(); ++drop) {
          std::vector<int> suffix(ctx.begin() + static_cast<long>(drop),
                                  ctx.end());
          auto &cc = counts_[suffix];
          ++cc.events[event];
          ++cc.total;
        }
        push_context(ctx, event);
        ++events;
      }
    }
    if (events == 0) {
      throw ConfigError("language model training set is empty");
    }
    trained_events_ += events;
  }

  // P(event | context). `context` must hold exactly order-1 tokens; event
  // ranges over 0..vocab (vocab meaning stop). Always strictly positive.
  double prob(const std::vector<int> &context, int event) const {
    if (context.size() != static_cast<std::size_t>(order_ - 1)) {
      throw ContractError("context length does not match model order");
    }
    if (event < 0 || event > stop_token()) {
      throw ContractError("event token out of range");
    }
    return smoothing_ == Smoothing::kAddK ? prob_add_k(context, event)
                                          : prob_witten_bell(context, 0, event);
  }

  // Distribution over the next token (phones then stop) given a phone
  // history of any length; only the last order-1 phones matter.
  std::vector<double> next_dist(const PhoneSeq &history) const {
    const auto ctx = make_context(history);
    std::vector<double> dist(outcomes());
    for (int e = 0; e <= stop_token(); ++e) {
      dist[static_cast<std::size_t>(e)] = prob(ctx, e);
    }
    return dist;
  }

  double log_prob_next(const PhoneSeq &history, Phone next) const {
    return std::log(prob(make_context(history), clamp_token(next)));
  }

  // Natural-log probability of the sequence including its stop event.
  double score(const PhoneSeq &seq) const {
    std::vector<int> ctx(static_cast<std::size_t>(order_ - 1), start_token());
    double lp = 0.0;
    for (std::size_t i = 0; i <= seq.size(); ++i) {
      const int event = i < seq.size() ? clamp_token(seq[i]) : stop_token();
      lp += std::log(prob(ctx, event));
      push_context(ctx, event);
    }
    return lp;
  }

  // exp of the average per-event negative log probability, stop events
  // included. Always >= 1 because every conditional is <= 1.
  double perplexity(std::span<const PhoneSeq> seqs) const {
    long events = 0;
    double lp = 0.0;
    for (const auto &seq : seqs) {
      lp += score(seq);
      events += static_cast<long>(seq.size()) + 1;
    }
    if (events == 0) {
      throw UndefinedMetricError("perplexity of an empty set is undefined");
    }
    return std::exp(-lp / static_cast<double>(events));
  }

  void save(const std::filesystem::path &path) const {
    std::ofstream out(path);
    if (!out) throw UserError("cannot write model file: " + path.string());
    char buf[64];
    out << "phoneval-lm 1\n";
    out << "order " << order_ << "\n";
    if (smoothing_ == Smoothing::kAddK) {
      std::snprintf(buf, sizeof(buf), "%.17g", k_);
      out << "smoothing add_k " << buf << "\n";
    } else {
      out << "smoothing witten_bell\n";
    }
    out << "vocab " << vocab_ << "\n";
    std::size_t rows = 0;
    for (const auto &[ctx, cc] : counts_) rows += cc.events.size();
    out << "counts " << rows << "\n";
    for (const auto &[ctx, cc] : counts_) {
      std::string ctx_text;
      for (std::size_t i = 0; i < ctx.size(); ++i) {
        if (i > 0) ctx_text += ' ';
        ctx_text += std::to_string(ctx[i]);
      }
      if (ctx_text.empty()) ctx_text = "-";
      for (const auto &[event, count] : cc.events) {
        out << ctx_text << '\t' << event << '\t' << count << '\n';
      }
    }
    if (!out) throw UserError("error writing model file: " + path.string());
  }

  static PhoneLm load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw UserError("cannot open model file: " + path.string());
    std::string line;
    auto next_line = [&]() -> std::string {
      if (!std::getline(in, line)) {
        throw FormatError("truncated model file: " + path.string());
      }
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    };
    if (next_line() != "phoneval-lm 1") {
      throw FormatError("not a phoneval language model: " + path.string());
    }
    int order = 0;
    std::size_t vocab = 0;
    std::size_t rows = 0;
    Smoothing smoothing = Smoothing::kAddK;
    double k = 0.0;
    {
      std::istringstream ss(next_line());
      std::string tag;
      if (!(ss >> tag >> order) || tag != "order") {
        throw FormatError("bad order line in " + path.string());
      }
    }
    {
      std::istringstream ss(next_line());
      std::string tag, name;
      ss >> tag >> name;
      if (tag != "smoothing") {
        throw FormatError("bad smoothing line in " + path.string());
      }
      auto parsed = parse_smoothing(name);
      if (!parsed) {
        throw FormatError("unknown smoothing '" + name + "' in " +
                          path.string());
      }
      smoothing = *parsed;
      if (smoothing == Smoothing::kAddK && !(ss >> k)) {
        throw FormatError("missing k value in " + path.string());
      }
    }
    {
      std::istringstream ss(next_line());
      std::string tag;
      if (!(ss >> tag >> vocab) || tag != "vocab") {
        throw FormatError("bad vocab line in " + path.string());
      }
    }
    {
      std::istringstream ss(next_line());
      std::string tag;
      if (!(ss >> tag >> rows) || tag != "counts") {
        throw FormatError("bad counts line in " + path.string());
      }
    }
    PhoneLm lm(order, vocab,
               smoothing == Smoothing::kAddK ? Smoothing::kAddK
                                             : Smoothing::kWittenBell,
               smoothing == Smoothing::kAddK ? k : 0.1);
    long events = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string &row = next_line();
      auto fields = lm_split_tabs(row);
      if (fields.size() != 3) {
        throw FormatError("bad count row '" + row + "' in " + path.string());
      }
      std::vector<int> ctx;
      if (fields[0] != "-") {
        std::istringstream ss(fields[0]);
        int id;
        while (ss >> id) ctx.push_back(id);
      }
      int event = 0;
      long count = 0;
      try {
        event = std::stoi(fields[1]);
        count = std::stol(fields[2]);
      } catch (const std::exception &) {
        throw FormatError("bad count row '" + row + "' in " + path.string());
      }
      if (ctx.size() >= static_cast<std::size_t>(order) || count <= 0 ||
          event < 0 || event > lm.stop_token()) {
        throw FormatError("inconsistent count row '" + row + "' in " +
                          path.string());
      }
      auto &cc = lm.counts_[ctx];
      cc.events[event] += count;
      cc.total += count;
      if (ctx.empty()) events += count;
    }
    lm.trained_events_ = events;
    if (events == 0) {
      throw FormatError("model has no events: " + path.string());
    }
    return lm;
  }

  bool operator==(const PhoneLm &) const = default;

 private:
  struct ContextCounts {
    std::map<int, long> events;
    long total = 0;
    bool operator==(const ContextCounts &) const = default;
  };

  static std::vector<std::string> lm_split_tabs(const std::string &s) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = s.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(s.substr(start));
        return fields;
      }
      fields.push_back(s.substr(start, tab - start));
      start = tab + 1;
    }
  }

  int clamp_token(Phone p) const {
    if (p < 0 || static_cast<std::size_t>(p) >= vocab_) {
      return PhoneInventory::kEps;
    }
    return p;
  }

  void push_context(std::vector<int> &ctx, int event) const {
    if (order_ == 1) return;
    ctx.push_back(event);
    ctx.erase(ctx.begin());
  }

  std::vector<int> make_context(const PhoneSeq &history) const {
    std::vector<int> ctx(static_cast<std::size_t>(order_ - 1), start_token());
    const std::size_t keep =
        std::min(history.size(), static_cast<std::size_t>(order_ - 1));
    for (std::size_t i = 0; i < keep; ++i) {
      ctx[ctx.size() - keep + i] =
          clamp_token(history[history.size() - keep + i]);
    }
    return ctx;
  }

  double prob_add_k(const std::vector<int> &context, int event) const {
    long c = 0, total = 0;
    if (auto it = counts_.find(context); it != counts_.end()) {
      total = it->second.total;
      if (auto jt = it->second.events.find(event);
          jt != it->second.events.end()) {
        c = jt->second;
      }
    }
    const double denom =
        static_cast<double>(total) + k_ * static_cast<double>(outcomes());
    return (static_cast<double>(c) + k_) / denom;
  }

  // Interpolated backoff: each context blends its counts with the next
  // shorter context's estimate, weighted by the number of distinct events
  // seen after it; the zero-length context blends with the uniform
  // distribution. Unseen contexts defer entirely to their backoff.
  double prob_witten_bell(const std::vector<int> &context, std::size_t drop,
                          int event) const {
    const double uniform = 1.0 / static_cast<double>(outcomes());
    std::vector<int> suffix(context.begin() + static_cast<long>(drop),
                            context.end());
    const bool at_base = suffix.empty();
    const double backoff =
        at_base ? uniform : prob_witten_bell(context, drop + 1, event);
    auto it = counts_.find(suffix);
    if (it == counts_.end() || it->second.total == 0) return backoff;
    const auto &cc = it->second;
    long c = 0;
    if (auto jt = cc.events.find(event); jt != cc.events.end()) c = jt->second;
    const double distinct = static_cast<double>(cc.events.size());
    return (static_cast<double>(c) + distinct * backoff) /
           (static_cast<double>(cc.total) + distinct);
  }

  int order_;
  std::size_t vocab_;
  Smoothing smoothing_;
  double k_;
  long trained_events_ = 0;
  std::map<std::vector<int>, ContextCounts> counts_;
};

}  // namespace phoneval

#endif  // PHONEVAL_LM_HPP_
