// tests/test_confusion.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "phoneval/confusion.hpp"
#include "phoneval/corpus.hpp"
#include "test_util.hpp"

using namespace phoneval;

namespace {

using Pairs = std::vector<std::pair<PhoneSeq, PhoneSeq>>;

PhoneInventory full_inventory() {
  return load_inventory(testutil::data_dir() / "inventory.tsv");
}

}  // namespace

TEST_CASE("mining attributes substitutions deletions and insertions") {
  auto inv = full_inventory();
  Pairs pairs;
  pairs.emplace_back(inv.parse_seq("dh ax"), inv.parse_seq("d ax"));
  pairs.emplace_back(inv.parse_seq("ae n d"), inv.parse_seq("ae n"));
  pairs.emplace_back(inv.parse_seq("hh er"), inv.parse_seq("hh er r"));
  auto table = mine_confusions(pairs, inv.size());

  CHECK(table.sub_count(inv.require("dh"), inv.require("d")) == 1);
  CHECK(table.del_count(inv.require("n"), inv.require("d")) == 1);
  CHECK(table.del_count(inv.require("d")) == 1);
  CHECK(table.ins_count(inv.require("er"), inv.require("r")) == 1);
  CHECK(table.ins_count(inv.require("r")) == 1);
  CHECK(table.total_errors() == 3);
  CHECK(table.ref_total(inv.require("dh")) == 1);
  CHECK(table.ref_total(inv.require("n")) == 1);
  CHECK(table.ref_total(inv.require("er")) == 1);
}

TEST_CASE("contexts at the start of an utterance fall back to SIL") {
  auto inv = full_inventory();
  SECTION("deletion of the first phone") {
    Pairs pairs;
    pairs.emplace_back(inv.parse_seq("d ax"), inv.parse_seq("ax"));
    auto table = mine_confusions(pairs, inv.size());
    CHECK(table.del_count(PhoneInventory::kSil, inv.require("d")) == 1);
  }
  SECTION("insertion before the first phone") {
    Pairs pairs;
    pairs.emplace_back(inv.parse_seq("ax"), inv.parse_seq("r ax"));
    auto table = mine_confusions(pairs, inv.size());
    CHECK(table.ins_count(PhoneInventory::kSil, inv.require("r")) == 1);
  }
}

TEST_CASE("deletion context skips phones the speaker did not realize") {
  auto inv = full_inventory();
  // Both 'n' and 'd' are dropped: the context of the 'd' deletion is the
  // last canonical phone that was actually said ('ae'), not the unsaid 'n'.
  Pairs pairs;
  pairs.emplace_back(inv.parse_seq("ae n d"), inv.parse_seq("ae"));
  auto table = mine_confusions(pairs, inv.size());
  CHECK(table.del_count(inv.require("ae"), inv.require("n")) == 1);
  CHECK(table.del_count(inv.require("ae"), inv.require("d")) == 1);
  CHECK(table.del_count(inv.require("n"), inv.require("d")) == 0);
}

TEST_CASE("merging tables equals mining the concatenation") {
  auto inv = full_inventory();
  Pairs first, second, both;
  first.emplace_back(inv.parse_seq("dh ih s"), inv.parse_seq("d i s"));
  first.emplace_back(inv.parse_seq("hh er"), inv.parse_seq("hh er r"));
  second.emplace_back(inv.parse_seq("ae n d"), inv.parse_seq("ae n"));
  second.emplace_back(inv.parse_seq("dh ax"), inv.parse_seq("d ax"));
  both = first;
  both.insert(both.end(), second.begin(), second.end());

  auto merged = mine_confusions(first, inv.size());
  merged += mine_confusions(second, inv.size());
  CHECK(merged == mine_confusions(both, inv.size()));
}

TEST_CASE("substitution and deletion counts never exceed occurrences") {
  auto inv = testutil::tiny_inventory();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> len(0, 8);
  std::uniform_int_distribution<int> phone(2, 6);
  for (int trial = 0; trial < 200; ++trial) {
    Pairs pairs;
    for (int u = 0; u < 5; ++u) {
      PhoneSeq ref(static_cast<std::size_t>(len(rng)));
      PhoneSeq hyp(static_cast<std::size_t>(len(rng)));
      for (auto &p : ref) p = phone(rng);
      for (auto &p : hyp) p = phone(rng);
      pairs.emplace_back(std::move(ref), std::move(hyp));
    }
    auto table = mine_confusions(pairs, inv.size());
    for (Phone p = 0; static_cast<std::size_t>(p) < inv.size(); ++p) {
      long subs = 0;
      for (Phone q = 0; static_cast<std::size_t>(q) < inv.size(); ++q) {
        if (p != q) subs += table.sub_count(p, q);
      }
      REQUIRE(subs + table.del_count(p) <= table.ref_total(p));
    }
  }
}

TEST_CASE("profiles rank errors by count then by phone index") {
  auto inv = full_inventory();
  Pairs pairs;
  // dh -> d three times, dh -> t once, and one tie pair on 'ih'.
  for (int i = 0; i < 3; ++i) {
    pairs.emplace_back(inv.parse_seq("dh"), inv.parse_seq("d"));
  }
  pairs.emplace_back(inv.parse_seq("dh"), inv.parse_seq("t"));
  pairs.emplace_back(inv.parse_seq("ih"), inv.parse_seq("i"));
  pairs.emplace_back(inv.parse_seq("ih"), inv.parse_seq("iy"));
  auto table = mine_confusions(pairs, inv.size());
  auto prof = profile_errors(table);

  REQUIRE(prof.rows.size() == 4);
  // Rows come out grouped by phone index; dh precedes ih in the inventory.
  CHECK(prof.rows[0].phone == inv.require("dh"));
  CHECK(prof.rows[0].other == inv.require("d"));
  CHECK(prof.rows[0].count == 3);
  CHECK(prof.rows[0].rate == Catch::Approx(0.75));
  CHECK(prof.rows[1].other == inv.require("t"));
  // The two 'ih' errors tie at count 1: lower phone index first, and 'iy'
  // precedes 'i' in the inventory because English symbols were added first.
  CHECK(prof.rows[2].phone == inv.require("ih"));
  CHECK(prof.rows[2].other == inv.require("iy"));
  CHECK(prof.rows[3].other == inv.require("i"));

  SECTION("top_k caps each phone's rows") {
    auto capped = profile_errors(table, 1);
    REQUIRE(capped.rows.size() == 2);
    CHECK(capped.rows[0].other == inv.require("d"));
    CHECK(capped.rows[1].phone == inv.require("ih"));
    CHECK_THROWS_AS(profile_errors(table, 0), ConfigError);
  }
  SECTION("csv rendering") {
    auto csv = profile_to_csv(prof, inv);
    CHECK(csv.find("phone,kind,target,count,rate\n") == 0);
    CHECK(csv.find("dh,sub,d,3,0.750000\n") != std::string::npos);
  }
}

TEST_CASE("insertion rates anchor at the context phone") {
  auto inv = full_inventory();
  Pairs pairs;
  pairs.emplace_back(inv.parse_seq("hh er"), inv.parse_seq("hh er r"));
  pairs.emplace_back(inv.parse_seq("w er"), inv.parse_seq("w er"));
  auto table = mine_confusions(pairs, inv.size());
  auto prof = profile_errors(table);
  REQUIRE(prof.rows.size() == 1);
  CHECK(prof.rows[0].phone == inv.require("er"));
  CHECK(prof.rows[0].kind == ErrorClass::kIns);
  CHECK(prof.rows[0].other == inv.require("r"));
  // 'er' occurs twice in the canonical tier, the insertion fired once.
  CHECK(prof.rows[0].rate == Catch::Approx(0.5));
}

TEST_CASE("rates are clamped and safe on zero denominators") {
  auto inv = full_inventory();
  ConfusionTable table(inv.size());
  // Hand-built pathological table: insertions after a phone that never
  // occurs in the reference.
  table.add_insertion(inv.require("er"), inv.require("r"));
  table.add_insertion(inv.require("er"), inv.require("r"));
  auto prof = profile_errors(table);
  REQUIRE(prof.rows.size() == 1);
  CHECK(prof.rows[0].count == 2);
  CHECK(prof.rows[0].rate == 0.0);
}

TEST_CASE("rule induction applies both thresholds") {
  auto inv = full_inventory();
  Pairs pairs;
  // dh -> d: 8 of 10 (qualifies), z -> s: 1 of 1 (rate 1 but count 1).
  for (int i = 0; i < 8; ++i) {
    pairs.emplace_back(inv.parse_seq("dh"), inv.parse_seq("d"));
  }
  pairs.emplace_back(inv.parse_seq("dh ax dh ax"), inv.parse_seq("dh ax dh ax"));
  pairs.emplace_back(inv.parse_seq("z"), inv.parse_seq("s"));
  auto table = mine_confusions(pairs, inv.size());

  auto rules = induce_rules(table, 2, 0.1);
  REQUIRE(rules.size() == 1);
  CHECK(format_rule(rules[0], inv) == "S\tdh\tdh/d");

  // Lowering the count threshold lets the rare z -> s in.
  auto loose = induce_rules(table, 1, 0.1);
  REQUIRE(loose.size() == 2);
  CHECK(format_rule(loose[1], inv) == "S\tz\tz/s");

  // A rate threshold above 0.8 kicks dh -> d out.
  auto strict = induce_rules(table, 1, 0.9);
  REQUIRE(strict.size() == 1);
  CHECK(format_rule(strict[0], inv) == "S\tz\tz/s");

  CHECK_THROWS_AS(induce_rules(table, 0, 0.1), ConfigError);
  CHECK_THROWS_AS(induce_rules(table, 1, 0.0), ConfigError);
  CHECK_THROWS_AS(induce_rules(table, 1, 1.5), ConfigError);
}

TEST_CASE("induced deletion and insertion rules use the context notation") {
  auto inv = full_inventory();
  Pairs pairs;
  for (int i = 0; i < 8; ++i) {
    pairs.emplace_back(inv.parse_seq("ae n d"), inv.parse_seq("ae n"));
  }
  for (int i = 0; i < 2; ++i) {
    pairs.emplace_back(inv.parse_seq("ae n d"), inv.parse_seq("ae n d"));
  }
  for (int i = 0; i < 5; ++i) {
    pairs.emplace_back(inv.parse_seq("hh er"), inv.parse_seq("hh er r"));
  }
  auto table = mine_confusions(pairs, inv.size());
  CHECK(table.del_count(inv.require("n"), inv.require("d")) == 8);
  CHECK(table.ref_total(inv.require("d")) == 10);

  auto rules = induce_rules(table, 2, 0.1);
  REQUIRE(rules.size() == 2);
  // Ordered by count descending: the deletion (8) before the insertion (5).
  CHECK(format_rule(rules[0], inv) == "D\tn d\tn d/");
  CHECK(format_rule(rules[1], inv) == "I\ter\ter r/");

  // Induced rules survive a write/parse round trip.
  testutil::TempDir tmp;
  write_rules(tmp.file("induced.tsv"), rules, inv);
  CHECK(load_rules(tmp.file("induced.tsv"), inv) == rules);
}

TEST_CASE("induction output order is deterministic under ties") {
  auto inv = full_inventory();
  Pairs pairs;
  for (int i = 0; i < 3; ++i) {
    pairs.emplace_back(inv.parse_seq("dh"), inv.parse_seq("d"));
    pairs.emplace_back(inv.parse_seq("z"), inv.parse_seq("s"));
    pairs.emplace_back(inv.parse_seq("ae n d"), inv.parse_seq("ae n"));
  }
  auto table = mine_confusions(pairs, inv.size());
  auto rules = induce_rules(table, 1, 0.1);
  REQUIRE(rules.size() == 3);
  // All counts tie at 3: substitutions first, ordered by lhs index, then
  // the deletion.
  CHECK(rules[0].kind == RuleKind::kSubstitution);
  CHECK(rules[0].lhs == inv.parse_seq("dh"));
  CHECK(rules[1].kind == RuleKind::kSubstitution);
  CHECK(rules[1].lhs == inv.parse_seq("z"));
  CHECK(rules[2].kind == RuleKind::kDeletion);
  for (int i = 0; i < 3; ++i) {
    CHECK(induce_rules(table, 1, 0.1) == rules);
  }
}
