// tests/test_corpus.cpp

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

#include "phoneval/corpus.hpp"
#include "phoneval/inventory.hpp"
#include "test_util.hpp"

using namespace phoneval;
using testutil::TempDir;
using testutil::write_file;

TEST_CASE("inventory reserves SIL and EPS at fixed indices") {
  PhoneInventory inv;
  CHECK(inv.size() == 2);
  CHECK(inv.phone_count() == 0);
  CHECK(inv.symbol(PhoneInventory::kSil) == "SIL");
  CHECK(inv.symbol(PhoneInventory::kEps) == "EPS");
  CHECK(inv.origin(PhoneInventory::kSil) == PhoneOrigin::kShared);

  inv.add("aa", PhoneOrigin::kEnglish);
  inv.add("R", PhoneOrigin::kItalian);
  CHECK(inv.size() == 4);
  CHECK(inv.phone_count() == 2);
  CHECK(inv.require("aa") == 2);
  CHECK(inv.require("R") == 3);
  CHECK(inv.origin(3) == PhoneOrigin::kItalian);
}

TEST_CASE("inventory rejects bad symbols") {
  PhoneInventory inv;
  inv.add("aa", PhoneOrigin::kEnglish);
  CHECK_THROWS_AS(inv.add("aa", PhoneOrigin::kItalian), DuplicateSymbolError);
  CHECK_THROWS_AS(inv.add("SIL", PhoneOrigin::kEnglish), DuplicateSymbolError);
  CHECK_THROWS_AS(inv.add("EPS", PhoneOrigin::kEnglish), DuplicateSymbolError);
  CHECK_THROWS_AS(inv.add("", PhoneOrigin::kEnglish), FormatError);
  CHECK_THROWS_AS(inv.add("a b", PhoneOrigin::kEnglish), FormatError);
  CHECK_THROWS_AS(inv.add("a/b", PhoneOrigin::kEnglish), FormatError);
  CHECK_THROWS_AS(inv.add("a–b", PhoneOrigin::kEnglish), FormatError);
  CHECK_THROWS_AS(inv.add("-", PhoneOrigin::kEnglish), FormatError);
}

TEST_CASE("sequence parsing accepts SIL but never EPS") {
  auto inv = testutil::tiny_inventory();
  PhoneSeq seq = inv.parse_seq("a b SIL c");
  REQUIRE(seq.size() == 4);
  CHECK(seq[2] == PhoneInventory::kSil);
  CHECK(inv.format_seq(seq) == "a b SIL c");
  CHECK(inv.parse_seq("").empty());
  CHECK(inv.parse_seq("   ").empty());
  CHECK_THROWS_AS(inv.parse_seq("a EPS b"), UnknownPhoneError);
  CHECK_THROWS_AS(inv.parse_seq("a qq"), UnknownPhoneError);
}

TEST_CASE("inventory file round trip with comments and CRLF") {
  TempDir tmp;
  auto path = write_file(tmp.file("inv.tsv"),
                         "# test inventory\n"
                         "aa\tenglish\r\n"
                         "\n"
                         "R\titalian\n"
                         "zz\tshared\n");
  auto inv = load_inventory(path);
  CHECK(inv.size() == 5);
  CHECK(inv.require("aa") == 2);
  CHECK(inv.require("R") == 3);
  CHECK(inv.origin(inv.require("zz")) == PhoneOrigin::kShared);
}

TEST_CASE("inventory file errors carry file and line") {
  TempDir tmp;
  SECTION("duplicate symbol") {
    auto path = write_file(tmp.file("inv.tsv"), "aa\tenglish\naa\titalian\n");
    try {
      load_inventory(path);
      FAIL("expected DuplicateSymbolError");
    } catch (const DuplicateSymbolError &e) {
      CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
  }
  SECTION("bad origin") {
    auto path = write_file(tmp.file("inv.tsv"), "aa\tfrench\n");
    CHECK_THROWS_AS(load_inventory(path), FormatError);
  }
  SECTION("wrong field count") {
    auto path = write_file(tmp.file("inv.tsv"), "aa english\n");
    CHECK_THROWS_AS(load_inventory(path), FormatError);
  }
  SECTION("no phones at all") {
    auto path = write_file(tmp.file("inv.tsv"), "# nothing\n");
    CHECK_THROWS_AS(load_inventory(path), FormatError);
  }
}

static std::string corpus_line(const std::string &id, const std::string &ide,
                               const std::string &man, const std::string &asr) {
  return id + "\tspk01\tdemo\tWORD\t" + ide + "\t" + man + "\t" + asr + "\n";
}

TEST_CASE("corpus loads three tiers with '-' for absent") {
  auto inv = testutil::tiny_inventory();
  TempDir tmp;
  auto path = write_file(tmp.file("c.tsv"),
                         "# header comment\n" +
                             corpus_line("u1", "a b c", "a b", "-") +
                             corpus_line("u2", "a", "-", "b c"));
  auto utts = load_corpus(path, inv);
  REQUIRE(utts.size() == 2);
  CHECK(utts[0].id == "u1");
  CHECK(utts[0].speaker == "spk01");
  CHECK(utts[0].corpus_tag == "demo");
  CHECK(utts[0].words == std::vector<std::string>{"WORD"});
  CHECK(utts[0].ide.size() == 3);
  REQUIRE(utts[0].man.has_value());
  CHECK(utts[0].man->size() == 2);
  CHECK_FALSE(utts[0].asr.has_value());
  CHECK_FALSE(utts[1].man.has_value());
  REQUIRE(utts[1].asr.has_value());
  CHECK(tier_of(utts[1], Tier::kAsr)->size() == 2);
  CHECK(tier_of(utts[1], Tier::kMan) == nullptr);
}

TEST_CASE("corpus rejects malformed rows") {
  auto inv = testutil::tiny_inventory();
  TempDir tmp;
  SECTION("wrong column count") {
    auto path = write_file(tmp.file("c.tsv"), "u1\tspk\ttag\tW\ta b\t-\n");
    CHECK_THROWS_AS(load_corpus(path, inv), FormatError);
  }
  SECTION("missing ide tier") {
    auto path = write_file(tmp.file("c.tsv"), corpus_line("u1", "-", "a", "-"));
    CHECK_THROWS_AS(load_corpus(path, inv), FormatError);
  }
  SECTION("duplicate utterance id") {
    auto path = write_file(tmp.file("c.tsv"),
                           corpus_line("u1", "a", "-", "-") +
                               corpus_line("u1", "b", "-", "-"));
    CHECK_THROWS_AS(load_corpus(path, inv), FormatError);
  }
  SECTION("unknown phone names the utterance and tier") {
    auto path = write_file(tmp.file("c.tsv"), corpus_line("u1", "a qq", "-", "-"));
    try {
      load_corpus(path, inv);
      FAIL("expected UnknownPhoneError");
    } catch (const UnknownPhoneError &e) {
      std::string msg = e.what();
      CHECK(msg.find("qq") != std::string::npos);
      CHECK(msg.find("u1") != std::string::npos);
      CHECK(msg.find("ide") != std::string::npos);
    }
  }
}

TEST_CASE("corpus write/load round trip") {
  auto inv = testutil::tiny_inventory();
  TempDir tmp;
  std::vector<Utterance> utts;
  utts.push_back(Utterance{"u1", "spk01", "demo", {"ONE", "TWO"},
                           inv.parse_seq("a b c"), inv.parse_seq("a c"),
                           std::nullopt});
  utts.push_back(Utterance{"u2", "spk02", "demo", {"THREE"},
                           inv.parse_seq("d"), std::nullopt,
                           inv.parse_seq("d e")});
  auto path = tmp.file("c.tsv");
  write_corpus(path, utts, inv);
  auto loaded = load_corpus(path, inv);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].words == utts[0].words);
  CHECK(loaded[0].ide == utts[0].ide);
  CHECK(loaded[0].man == utts[0].man);
  CHECK(loaded[0].asr == utts[0].asr);
  CHECK(loaded[1].asr == utts[1].asr);

  // Writing the loaded corpus again is byte-identical.
  auto path2 = tmp.file("c2.tsv");
  write_corpus(path2, loaded, inv);
  CHECK(testutil::read_file(path) == testutil::read_file(path2));
}

TEST_CASE("lexicon keeps the first pronunciation as canonical") {
  auto inv = testutil::tiny_inventory();
  Lexicon lex;
  lex.add("play", inv.parse_seq("a b"));
  lex.add("PLAY", inv.parse_seq("a c"));
  lex.add("PLAY", inv.parse_seq("a b"));  // duplicate, ignored
  REQUIRE(lex.find("PLAY") != nullptr);
  CHECK(lex.find("PLAY")->size() == 2);
  CHECK(lex.canonical("PLAY") == inv.parse_seq("a b"));
  CHECK(lex.canonical("play") == inv.parse_seq("a b"));
  CHECK(lex.word_count() == 1);
  CHECK(lex.pron_count() == 2);
  CHECK(lex.find("GONE") == nullptr);
  CHECK_THROWS_AS(lex.canonical("GONE"), UserError);
  CHECK_THROWS_AS(lex.add("BAD", PhoneSeq{}), FormatError);
}

TEST_CASE("lexicon file round trip") {
  auto inv = testutil::tiny_inventory();
  TempDir tmp;
  auto path = write_file(tmp.file("lex.tsv"),
                         "# demo lexicon\n"
                         "PLAY\ta b\n"
                         "play\ta c\n"
                         "BLUE\td e\n");
  auto lex = load_lexicon(path, inv);
  CHECK(lex.word_count() == 2);
  CHECK(lex.find("PLAY")->size() == 2);

  auto out = tmp.file("lex_out.tsv");
  write_lexicon(out, lex, inv);
  auto lex2 = load_lexicon(out, inv);
  CHECK(lex2.entries() == lex.entries());

  SECTION("empty pronunciation is an error") {
    auto bad = write_file(tmp.file("bad.tsv"), "WORD\t\n");
    CHECK_THROWS_AS(load_lexicon(bad, inv), FormatError);
  }
}
