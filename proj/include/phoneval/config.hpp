// include/phoneval/config.hpp

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

#ifndef PHONEVAL_CONFIG_HPP_
#define PHONEVAL_CONFIG_HPP_

#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "phoneval/error.hpp"
#include "phoneval/lm.hpp"
#include "phoneval/rng.hpp"

namespace phoneval {

// Everything a full experiment run needs, with working defaults. A config
// file is a flat list of `key = value` lines; unknown keys are rejected so
// typos fail loudly instead of silently running with a default.
struct ExperimentConfig {
  // Input files. An empty corpus means the experiment generates its own
  // prompts from the lexicon.
  std::string inventory;
  std::string lexicon;
  std::string rules;
  std::string corpus;
  // Output directory. Deliberately excluded from canonical() and the config
  // hash: the same experiment written to two directories is the same
  // experiment, and its reports must come out byte-identical.
  std::string out_dir = "out";

  std::uint64_t seed = 20260815;
  long n_utterances = 500;
  long words_min = 3;
  long words_max = 7;

  int lm_order = 5;
  Smoothing smoothing = Smoothing::kAddK;
  double smoothing_k = 0.1;

  double channel_rate = 0.15;
  double channel_sharpness = 1.0;

  // decode_free leans on the language model; decode_forced keeps it as a
  // light tie-breaker because its candidate set is already constrained by
  // the adapted lexicon.
  double lm_weight = 0.7;
  double forced_lm_weight = 0.05;
  std::size_t beam = 8;
  double skip_penalty = -4.0;

  std::size_t variant_cap = 16;
  std::size_t utterance_variant_cap = 64;

  long induce_min_count = 5;
  double induce_min_rate = 0.05;

  void validate() const {
    if (lm_order < 1 || lm_order > 5) {
      throw ConfigError("lm_order must be between 1 and 5");
    }
    if (!(smoothing_k > 0.0)) throw ConfigError("smoothing_k must be > 0");
    if (!(channel_rate >= 0.0) || channel_rate >= 1.0) {
      throw ConfigError("channel_rate must be in [0, 1)");
    }
    if (!(channel_sharpness > 0.0)) {
      throw ConfigError("channel_sharpness must be > 0");
    }
    if (lm_weight < 0.0 || forced_lm_weight < 0.0) {
      throw ConfigError("language model weights must be >= 0");
    }
    if (beam < 1) throw ConfigError("beam must be >= 1");
    if (skip_penalty > 0.0) {
      throw ConfigError("skip_penalty must be <= 0 (log domain)");
    }
    if (variant_cap < 1 || utterance_variant_cap < 1) {
      throw ConfigError("variant caps must be >= 1");
    }
    if (n_utterances < 1) throw ConfigError("n_utterances must be >= 1");
    if (words_min < 1 || words_max < words_min) {
      throw ConfigError("need 1 <= words_min <= words_max");
    }
    if (induce_min_count < 0) {
      throw ConfigError("induce_min_count must be >= 0");
    }
    if (induce_min_rate < 0.0 || induce_min_rate > 1.0) {
      throw ConfigError("induce_min_rate must be in [0, 1]");
    }
  }

  // Canonical text rendering of every parameter that defines the
  // experiment. out_dir is omitted on purpose; see its declaration.
  std::string canonical() const {
    char buf[64];
    std::string s;
    auto put = [&](const char *key, const std::string &value) {
      s += key;
      s += " = ";
      s += value;
      s += "\n";
    };
    auto put_d = [&](const char *key, double v) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      put(key, buf);
    };
    put("inventory", inventory);
    put("lexicon", lexicon);
    put("rules", rules);
    put("corpus", corpus);
    put("seed", std::to_string(seed));
    put("n_utterances", std::to_string(n_utterances));
    put("words_min", std::to_string(words_min));
    put("words_max", std::to_string(words_max));
    put("lm_order", std::to_string(lm_order));
    put("smoothing", smoothing_name(smoothing));
    put_d("smoothing_k", smoothing_k);
    put_d("channel_rate", channel_rate);
    put_d("channel_sharpness", channel_sharpness);
    put_d("lm_weight", lm_weight);
    put_d("forced_lm_weight", forced_lm_weight);
    put("beam", std::to_string(beam));
    put_d("skip_penalty", skip_penalty);
    put("variant_cap", std::to_string(variant_cap));
    put("utterance_variant_cap", std::to_string(utterance_variant_cap));
    put("induce_min_count", std::to_string(induce_min_count));
    put_d("induce_min_rate", induce_min_rate);
    return s;
  }

  std::string hash() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical())));
    return buf;
  }
};

namespace detail {

inline std::string trim(const std::string &s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) {
    --e;
  }
  return s.substr(b, e - b);
}

inline long config_long(const std::string &key, const std::string &value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception &) {
    throw ConfigError("config key '" + key + "': bad integer '" + value + "'");
  }
}

inline std::uint64_t config_u64(const std::string &key,
                                const std::string &value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size() || value[0] == '-') {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception &) {
    throw ConfigError("config key '" + key + "': bad unsigned integer '" +
                      value + "'");
  }
}

inline double config_double(const std::string &key, const std::string &value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception &) {
    throw ConfigError("config key '" + key + "': bad number '" + value + "'");
  }
}

}  // namespace detail

// Applies one key/value pair. Unknown keys are errors.
inline void apply_config_value(ExperimentConfig &cfg, const std::string &key,
                               const std::string &value) {
  using detail::config_double;
  using detail::config_long;
  using detail::config_u64;
  if (key == "inventory") cfg.inventory = value;
  else if (key == "lexicon") cfg.lexicon = value;
  else if (key == "rules") cfg.rules = value;
  else if (key == "corpus") cfg.corpus = value;
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "seed") cfg.seed = config_u64(key, value);
  else if (key == "n_utterances") cfg.n_utterances = config_long(key, value);
  else if (key == "words_min") cfg.words_min = config_long(key, value);
  else if (key == "words_max") cfg.words_max = config_long(key, value);
  else if (key == "lm_order") {
    cfg.lm_order = static_cast<int>(config_long(key, value));
  } else if (key == "smoothing") {
    const auto parsed = parse_smoothing(value);
    if (!parsed) throw ConfigError("unknown smoothing '" + value + "'");
    cfg.smoothing = *parsed;
  } else if (key == "smoothing_k") {
    cfg.smoothing_k = config_double(key, value);
  } else if (key == "channel_rate") {
    cfg.channel_rate = config_double(key, value);
  } else if (key == "channel_sharpness") {
    cfg.channel_sharpness = config_double(key, value);
  } else if (key == "lm_weight") {
    cfg.lm_weight = config_double(key, value);
  } else if (key == "forced_lm_weight") {
    cfg.forced_lm_weight = config_double(key, value);
  } else if (key == "beam") {
    const long b = config_long(key, value);
    if (b < 0) throw ConfigError("beam must be >= 1");
    cfg.beam = static_cast<std::size_t>(b);
  } else if (key == "skip_penalty") {
    cfg.skip_penalty = config_double(key, value);
  } else if (key == "variant_cap") {
    const long c = config_long(key, value);
    if (c < 0) throw ConfigError("variant_cap must be >= 1");
    cfg.variant_cap = static_cast<std::size_t>(c);
  } else if (key == "utterance_variant_cap") {
    const long c = config_long(key, value);
    if (c < 0) throw ConfigError("utterance_variant_cap must be >= 1");
    cfg.utterance_variant_cap = static_cast<std::size_t>(c);
  } else if (key == "induce_min_count") {
    cfg.induce_min_count = config_long(key, value);
  } else if (key == "induce_min_rate") {
    cfg.induce_min_rate = config_double(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

// Reads a flat `key = value` config file. Blank lines and lines starting
// with '#' are skipped.
inline ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open config file: " + path.string());
  ExperimentConfig cfg;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = detail::trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw FormatError("expected 'key = value'", path.string(), line_no);
    }
    const std::string key = detail::trim(text.substr(0, eq));
    const std::string value = detail::trim(text.substr(eq + 1));
    if (key.empty()) {
      throw FormatError("empty config key", path.string(), line_no);
    }
    try {
      apply_config_value(cfg, key, value);
    } catch (const ConfigError &e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return cfg;
}

}  // namespace phoneval

#endif  // PHONEVAL_CONFIG_HPP_
