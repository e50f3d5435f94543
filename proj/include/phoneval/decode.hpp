// include/phoneval/decode.hpp

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

#ifndef PHONEVAL_DECODE_HPP_
#define PHONEVAL_DECODE_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "phoneval/channel.hpp"
#include "phoneval/error.hpp"
#include "phoneval/inventory.hpp"
#include "phoneval/lm.hpp"

namespace phoneval {

// Probabilities below this floor are treated as the floor inside logs, so a
// zero posterior stays finite but loses to any real evidence.
inline constexpr double kLogFloorProb = 1e-300;

inline double floored_log(double p) {
  return std::log(p < kLogFloorProb ? kLogFloorProb : p);
}

// Beam search over frames: each frame emits exactly one phone, scored by
// log posterior plus lm_weight times the phone's conditional log
// probability. Hypotheses that share the same language model context are
// merged (only the best survives), then the beam keeps the highest-scoring
// contexts. Ties prefer the output that is lexicographically smaller by
// phone index, which pins the result down deterministically.
inline PhoneSeq decode_free(const Posteriorgram &frames, const PhoneLm &lm,
                            double lm_weight, std::size_t beam) {
  if (beam < 1) throw ConfigError("beam width must be >= 1");
  if (lm_weight < 0.0) throw ConfigError("lm weight must be >= 0");
  if (frames.empty()) return {};
  const std::size_t dim = frames[0].size();
  if (dim == 0 || dim > lm.vocab()) {
    throw ContractError("frame dimension does not fit the language model");
  }

  struct Hyp {
    double score;
    PhoneSeq out;
  };
  // Context -> best hypothesis with that context.
  std::map<PhoneSeq, Hyp> beam_states;
  beam_states.emplace(PhoneSeq{}, Hyp{0.0, {}});
  const std::size_t ctx_len = static_cast<std::size_t>(lm.order()) - 1;

  for (const auto &frame : frames) {
    if (frame.size() != dim) {
      throw ContractError("ragged posteriorgram");
    }
    std::map<PhoneSeq, Hyp> next;
    for (const auto &[ctx, hyp] : beam_states) {
      for (std::size_t p = 0; p < dim; ++p) {
        const Phone phone = static_cast<Phone>(p);
        double s = hyp.score + floored_log(frame[p]);
        if (lm_weight > 0.0) {
          s += lm_weight * lm.log_prob_next(ctx, phone);
        }
        PhoneSeq nctx = ctx;
        nctx.push_back(phone);
        if (nctx.size() > ctx_len) {
          nctx.erase(nctx.begin(),
                     nctx.begin() + static_cast<long>(nctx.size() - ctx_len));
        }
        auto it = next.find(nctx);
        if (it == next.end()) {
          PhoneSeq out = hyp.out;
          out.push_back(phone);
          next.emplace(std::move(nctx), Hyp{s, std::move(out)});
        } else if (s > it->second.score ||
                   (s == it->second.score &&
                    [&] {
                      PhoneSeq out = hyp.out;
                      out.push_back(phone);
                      return out < it->second.out;
                    }())) {
          it->second.score = s;
          it->second.out = hyp.out;
          it->second.out.push_back(phone);
        }
      }
    }
    if (next.size() > beam) {
      std::vector<std::pair<PhoneSeq, Hyp>> ranked;
      ranked.reserve(next.size());
      for (auto &[ctx, hyp] : next) {
        ranked.emplace_back(ctx, std::move(hyp));
      }
      std::sort(ranked.begin(), ranked.end(),
                [](const auto &a, const auto &b) {
                  if (a.second.score != b.second.score) {
                    return a.second.score > b.second.score;
                  }
                  return a.second.out < b.second.out;
                });
      ranked.resize(beam);
      next.clear();
      for (auto &[ctx, hyp] : ranked) {
        next.emplace(std::move(ctx), std::move(hyp));
      }
    }
    beam_states = std::move(next);
  }

  const Hyp *best = nullptr;
  for (const auto &[ctx, hyp] : beam_states) {
    if (best == nullptr || hyp.score > best->score ||
        (hyp.score == best->score && hyp.out < best->out)) {
      best = &hyp;
    }
  }
  return best->out;
}

struct ForcedChoice {
  std::size_t variant = 0;
  double score = -std::numeric_limits<double>::infinity();
};

// Picks the candidate phone string that best explains the frames. Frames
// are assigned to candidate phones monotonically: every frame lands on some
// phone, consecutive frames land on the same or a later phone, and phones
// that receive no frame at all cost skip_penalty each (log domain, so it
// should be negative). Each candidate's acoustic score is the best such
// assignment; lm_weight times the candidate's sequence log probability is
// added on top. Ties keep the lowest variant index.
inline ForcedChoice decode_forced(const Posteriorgram &frames,
                                  std::span<const PhoneSeq> variants,
                                  const PhoneLm &lm, double lm_weight,
                                  double skip_penalty) {
  if (variants.empty()) {
    throw ContractError("forced decoding needs at least one candidate");
  }
  if (lm_weight < 0.0) throw ConfigError("lm weight must be >= 0");
  const double neg_inf = -std::numeric_limits<double>::infinity();
  ForcedChoice best;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const PhoneSeq &phones = variants[v];
    const std::size_t t_count = frames.size();
    const std::size_t m = phones.size();
    double acoustic;
    if (m == 0) {
      acoustic = t_count == 0 ? 0.0 : neg_inf;
    } else if (t_count == 0) {
      acoustic = skip_penalty * static_cast<double>(m);
    } else {
      // dp[j]: best score with the current frame on phone j.
      std::vector<double> dp(m, neg_inf), prev(m, neg_inf);
      for (std::size_t j = 0; j < m; ++j) {
        const auto p = static_cast<std::size_t>(phones[j]);
        if (p >= frames[0].size()) {
          throw ContractError("candidate phone outside frame dimension");
        }
        dp[j] = skip_penalty * static_cast<double>(j) + floored_log(frames[0][p]);
      }
      for (std::size_t t = 1; t < t_count; ++t) {
        std::swap(dp, prev);
        // from_below = max over i < j of prev[i] plus one skip per phone
        // strictly between i and j; staying on phone j costs nothing.
        double from_below = neg_inf;
        for (std::size_t j = 0; j < m; ++j) {
          if (j > 0) {
            from_below = std::max(from_below + skip_penalty, prev[j - 1]);
          }
          const auto p = static_cast<std::size_t>(phones[j]);
          dp[j] = std::max(from_below, prev[j]) + floored_log(frames[t][p]);
        }
      }
      acoustic = neg_inf;
      for (std::size_t j = 0; j < m; ++j) {
        const double tail =
            dp[j] + skip_penalty * static_cast<double>(m - 1 - j);
        if (tail > acoustic) acoustic = tail;
      }
    }
    const double total = acoustic + lm_weight * lm.score(phones);
    if (total > best.score) {
      best.score = total;
      best.variant = v;
    }
  }
  return best;
}

}  // namespace phoneval

#endif  // PHONEVAL_DECODE_HPP_
