// include/phoneval/channel.hpp

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

#ifndef PHONEVAL_CHANNEL_HPP_
#define PHONEVAL_CHANNEL_HPP_

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "phoneval/confusion.hpp"
#include "phoneval/error.hpp"
#include "phoneval/inventory.hpp"
#include "phoneval/rng.hpp"
#include "phoneval/rules.hpp"

namespace phoneval {

// A frame is one per-phone probability vector; a posteriorgram is one frame
// per realized phone of an utterance.
using Frame = std::vector<double>;
using Posteriorgram = std::vector<Frame>;

// Generative noise model standing in for a speaker who mispronounces. Each
// canonical phone is independently deleted, emitted through a confusion
// row, and optionally followed by an inserted phone conditioned on the
// canonical left context. The same confusion matrix also synthesizes the
// acoustic evidence: the frame for an emitted phone is the normalized
// column of the matrix, sharpened by raising it to `sharpness` and
// renormalizing.
struct ChannelModel {
  std::size_t dim = 0;
  std::vector<double> sub;       // dim x dim, row p = P(emitted | true p)
  std::vector<double> p_del;     // per true phone
  std::vector<double> p_ins;     // per left-context phone
  std::vector<double> ins_dist;  // dim x dim, row c = P(inserted | ctx c)
  double sharpness = 1.0;

  double sub_at(Phone t, Phone e) const {
    return sub[static_cast<std::size_t>(t) * dim + static_cast<std::size_t>(e)];
  }
  double &sub_at(Phone t, Phone e) {
    return sub[static_cast<std::size_t>(t) * dim + static_cast<std::size_t>(e)];
  }
  double ins_at(Phone c, Phone e) const {
    return ins_dist[static_cast<std::size_t>(c) * dim +
                    static_cast<std::size_t>(e)];
  }
  double &ins_at(Phone c, Phone e) {
    return ins_dist[static_cast<std::size_t>(c) * dim +
                    static_cast<std::size_t>(e)];
  }

  // Channel that reproduces its input exactly and emits one-hot frames.
  static ChannelModel identity(std::size_t dim) {
    if (dim < 2) throw ContractError("channel needs a real inventory");
    ChannelModel ch;
    ch.dim = dim;
    ch.sub.assign(dim * dim, 0.0);
    ch.p_del.assign(dim, 0.0);
    ch.p_ins.assign(dim, 0.0);
    ch.ins_dist.assign(dim * dim, 1.0 / static_cast<double>(dim));
    for (std::size_t p = 0; p < dim; ++p) ch.sub[p * dim + p] = 1.0;
    return ch;
  }

  // Builds a channel that commits each rule's errors at the given rate. A
  // substitution rule moves `rate` of its phone's mass onto the non-identity
  // alternatives, split evenly; a deletion rule sets the deletion chance of
  // its target phone; an insertion rule sets the insertion chance after its
  // context phone, with the inserted phone drawn evenly from the rule's
  // single-phone alternatives.
  static ChannelModel from_rules(std::span<const ErrorRule> rules, double rate,
                                 const PhoneInventory &inv) {
    if (!(rate >= 0.0) || rate >= 1.0) {
      throw ConfigError("channel error rate must be in [0, 1)");
    }
    ChannelModel ch = identity(inv.size());
    std::vector<std::vector<double>> ins_weights(ch.dim);
    for (const auto &rule : rules) {
      switch (rule.kind) {
        case RuleKind::kSubstitution: {
          const Phone p = rule.lhs[0];
          std::vector<Phone> targets;
          for (const auto &alt : rule.alternatives) {
            if (alt.size() == 1 && alt[0] != p) targets.push_back(alt[0]);
          }
          if (targets.empty()) break;
          ch.sub_at(p, p) -= rate;
          if (ch.sub_at(p, p) <= 0.0) {
            throw ConfigError("substitution rules for phone '" +
                              inv.symbol(p) + "' leave it no identity mass");
          }
          for (Phone q : targets) {
            ch.sub_at(p, q) += rate / static_cast<double>(targets.size());
          }
          break;
        }
        case RuleKind::kDeletion: {
          ch.p_del[static_cast<std::size_t>(rule.lhs[1])] = rate;
          break;
        }
        case RuleKind::kInsertion: {
          const Phone c = rule.lhs[0];
          auto &weights = ins_weights[static_cast<std::size_t>(c)];
          weights.assign(ch.dim, 0.0);
          for (const auto &alt : rule.alternatives) {
            if (alt.size() == 1) {
              weights[static_cast<std::size_t>(alt[0])] += 1.0;
            }
          }
          double total = 0.0;
          for (double w : weights) total += w;
          if (total > 0.0) {
            ch.p_ins[static_cast<std::size_t>(c)] = rate;
            for (std::size_t e = 0; e < ch.dim; ++e) {
              ch.ins_at(c, static_cast<Phone>(e)) = weights[e] / total;
            }
          }
          break;
        }
      }
    }
    ch.validate();
    return ch;
  }

  // Estimates a channel from mined confusion counts, add-0.5 smoothing on
  // every row. Matches are recovered from the reference totals.
  static ChannelModel from_confusion(const ConfusionTable &t,
                                     double smoothing = 0.5) {
    if (!(smoothing > 0.0)) throw ConfigError("channel smoothing must be > 0");
    const std::size_t dim = t.inventory_size();
    ChannelModel ch = identity(dim);
    for (Phone p = 0; static_cast<std::size_t>(p) < dim; ++p) {
      long subs = 0;
      for (Phone q = 0; static_cast<std::size_t>(q) < dim; ++q) {
        if (q != p) subs += t.sub_count(p, q);
      }
      long deleted = 0;
      for (const auto &[key, c] : t.deletions()) {
        if (key.second == p) deleted += c;
      }
      const long matches = t.ref_total(p) - subs - deleted;
      double row_total = 0.0;
      for (Phone q = 0; static_cast<std::size_t>(q) < dim; ++q) {
        const double c =
            (q == p ? static_cast<double>(matches < 0 ? 0 : matches)
                    : static_cast<double>(t.sub_count(p, q))) +
            smoothing;
        ch.sub_at(p, q) = c;
        row_total += c;
      }
      for (Phone q = 0; static_cast<std::size_t>(q) < dim; ++q) {
        ch.sub_at(p, q) /= row_total;
      }
      ch.p_del[static_cast<std::size_t>(p)] =
          (static_cast<double>(deleted) + smoothing) /
          (static_cast<double>(t.ref_total(p)) + 2.0 * smoothing);
    }
    for (Phone c = 0; static_cast<std::size_t>(c) < dim; ++c) {
      long inserted = 0;
      for (const auto &[key, n] : t.insertions()) {
        if (key.first == c) inserted += n;
      }
      if (inserted == 0) continue;
      ch.p_ins[static_cast<std::size_t>(c)] = std::min(
          0.9, static_cast<double>(inserted) /
                   (static_cast<double>(t.ref_total(c)) + 2.0 * smoothing));
      double row_total = 0.0;
      for (Phone q = 0; static_cast<std::size_t>(q) < dim; ++q) {
        const double w = static_cast<double>(t.ins_count(c, q)) + smoothing;
        ch.ins_at(c, q) = w;
        row_total += w;
      }
      for (Phone q = 0; static_cast<std::size_t>(q) < dim; ++q) {
        ch.ins_at(c, q) /= row_total;
      }
    }
    ch.validate();
    return ch;
  }

  void validate() const {
    if (dim < 2 || sub.size() != dim * dim || p_del.size() != dim ||
        p_ins.size() != dim || ins_dist.size() != dim * dim) {
      throw ContractError("channel model fields have inconsistent sizes");
    }
    if (!(sharpness > 0.0)) throw ConfigError("channel sharpness must be > 0");
    for (std::size_t p = 0; p < dim; ++p) {
      double row = 0.0;
      for (std::size_t e = 0; e < dim; ++e) {
        const double v = sub[p * dim + e];
        if (v < 0.0) throw ConfigError("negative confusion probability");
        row += v;
      }
      if (std::abs(row - 1.0) > 1e-9) {
        throw ConfigError("confusion row does not sum to 1");
      }
      if (p_del[p] < 0.0 || p_del[p] >= 1.0 || p_ins[p] < 0.0 ||
          p_ins[p] >= 1.0) {
        throw ConfigError("deletion/insertion chances must be in [0, 1)");
      }
      if (p_ins[p] > 0.0) {
        double irow = 0.0;
        for (std::size_t e = 0; e < dim; ++e) irow += ins_dist[p * dim + e];
        if (std::abs(irow - 1.0) > 1e-9) {
          throw ConfigError("insertion distribution does not sum to 1");
        }
      }
    }
  }
};

namespace detail {

inline Frame column_frame(const ChannelModel &ch, Phone emitted) {
  Frame frame(ch.dim, 0.0);
  double total = 0.0;
  for (std::size_t t = 0; t < ch.dim; ++t) {
    frame[t] = ch.sub_at(static_cast<Phone>(t), emitted);
    total += frame[t];
  }
  if (total <= 0.0) {
    frame.assign(ch.dim, 0.0);
    frame[static_cast<std::size_t>(emitted)] = 1.0;
    return frame;
  }
  double sharp_total = 0.0;
  for (std::size_t t = 0; t < ch.dim; ++t) {
    frame[t] = std::pow(frame[t] / total, ch.sharpness);
    sharp_total += frame[t];
  }
  for (std::size_t t = 0; t < ch.dim; ++t) frame[t] /= sharp_total;
  return frame;
}

}  // namespace detail

struct SimulatedUtterance {
  PhoneSeq realized;
  Posteriorgram frames;  // one frame per realized phone
};

// Passes a canonical pronunciation through the channel. Draw order per
// canonical phone is fixed (delete? emit? insert? inserted-what?) so a seed
// fully determines the outcome.
inline SimulatedUtterance simulate_utterance(const PhoneSeq &ide,
                                             const ChannelModel &ch,
                                             std::uint64_t seed) {
  ch.validate();
  Rng rng(seed);
  SimulatedUtterance out;
  for (Phone p : ide) {
    if (p < 0 || static_cast<std::size_t>(p) >= ch.dim) {
      throw ContractError("phone out of channel range");
    }
    const bool erased = rng.uniform() < ch.p_del[static_cast<std::size_t>(p)];
    if (!erased) {
      std::span<const double> row(ch.sub.data() +
                                      static_cast<std::size_t>(p) * ch.dim,
                                  ch.dim);
      const Phone emitted = static_cast<Phone>(rng.categorical(row));
      out.realized.push_back(emitted);
      out.frames.push_back(detail::column_frame(ch, emitted));
    }
    if (rng.uniform() < ch.p_ins[static_cast<std::size_t>(p)]) {
      std::span<const double> row(ch.ins_dist.data() +
                                      static_cast<std::size_t>(p) * ch.dim,
                                  ch.dim);
      const Phone inserted = static_cast<Phone>(rng.categorical(row));
      out.realized.push_back(inserted);
      out.frames.push_back(detail::column_frame(ch, inserted));
    }
  }
  return out;
}

// Posteriorgram files: a header line, then per utterance an id line and one
// line of space-separated probabilities per frame. %.17g keeps doubles
// exact across a write/read cycle.
inline void write_posteriorgrams(
    const std::filesystem::path &path,
    const std::vector<std::pair<std::string, Posteriorgram>> &entries,
    std::size_t dim) {
  std::ofstream out(path);
  if (!out) throw UserError("cannot write posteriorgram file: " + path.string());
  out << "phoneval-post 1 " << dim << "\n";
  char buf[32];
  for (const auto &[id, frames] : entries) {
    out << id << ' ' << frames.size() << "\n";
    for (const auto &frame : frames) {
      if (frame.size() != dim) {
        throw ContractError("frame dimension mismatch in utterance " + id);
      }
      for (std::size_t i = 0; i < dim; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", frame[i]);
        if (i > 0) out << ' ';
        out << buf;
      }
      out << "\n";
    }
  }
  if (!out) throw UserError("error writing posteriorgram file: " + path.string());
}

inline std::vector<std::pair<std::string, Posteriorgram>> load_posteriorgrams(
    const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open posteriorgram file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("empty posteriorgram file: " + path.string());
  }
  std::istringstream header(line);
  std::string magic;
  int version = 0;
  std::size_t dim = 0;
  if (!(header >> magic >> version >> dim) || magic != "phoneval-post" ||
      version != 1 || dim == 0) {
    throw FormatError("not a phoneval posteriorgram file: " + path.string());
  }
  std::vector<std::pair<std::string, Posteriorgram>> entries;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream utt_header(line);
    std::string id;
    std::size_t frames = 0;
    if (!(utt_header >> id >> frames)) {
      throw FormatError("bad utterance header '" + line + "' in " +
                        path.string());
    }
    Posteriorgram post;
    post.reserve(frames);
    for (std::size_t f = 0; f < frames; ++f) {
      if (!std::getline(in, line)) {
        throw FormatError("truncated posteriorgram for utterance " + id +
                          " in " + path.string());
      }
      std::istringstream row(line);
      Frame frame(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        if (!(row >> frame[i])) {
          throw FormatError("bad frame row for utterance " + id + " in " +
                            path.string());
        }
      }
      post.push_back(std::move(frame));
    }
    entries.emplace_back(id, std::move(post));
  }
  return entries;
}

}  // namespace phoneval

#endif  // PHONEVAL_CHANNEL_HPP_
