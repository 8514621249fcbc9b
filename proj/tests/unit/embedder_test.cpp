#include "ontorag/embedder.h"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "ontorag/errors.h"

using namespace ontorag;

using Words = std::vector<std::string>;

TEST(LexicalWords, SplitsCamelCaseDigitsAndPunctuation) {
  EXPECT_EQ(LexicalEmbedder::words("hasLine"), (Words{"has", "line"}));
  EXPECT_EQ(LexicalEmbedder::words("How many Stations are on Line X?"),
            (Words{"how", "many", "stations", "are", "on", "line", "x"}));
  EXPECT_EQ(LexicalEmbedder::words("line42b"), (Words{"line", "42", "b"}));
  EXPECT_EQ(LexicalEmbedder::words("HTTPServer"), (Words{"http", "server"}));
  EXPECT_EQ(LexicalEmbedder::words("  --  "), Words{});
  EXPECT_EQ(LexicalEmbedder::words("plant_id"), (Words{"plant", "id"}));
}

TEST(LexicalEmbedder, MatchesIndependentHashBuckets) {
  // FNV-1a over "#has#" and "#line#" 3-grams, computed in Python.
  LexicalEmbedder e;
  Vector v = e.embed("hasLine");
  ASSERT_EQ(v.size(), 512u);
  for (std::size_t i : {50, 54, 202, 245, 406, 423, 436}) EXPECT_EQ(v[i], 1.0) << i;
  EXPECT_EQ(std::accumulate(v.begin(), v.end(), 0.0), 7.0);
}

TEST(LexicalEmbedder, MassEqualsTrigramCount) {
  LexicalEmbedder e(64);
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    std::string text;
    int len = rng() % 30;
    for (int j = 0; j < len; ++j) text += "aB3 ,x"[rng() % 6];
    double expected = 0;
    for (const auto& w : LexicalEmbedder::words(text)) expected += static_cast<double>(w.size());
    Vector v = e.embed(text);
    EXPECT_EQ(std::accumulate(v.begin(), v.end(), 0.0), expected) << text;
  }
}

TEST(LexicalEmbedder, DeterministicAndSeeded) {
  LexicalEmbedder a, b;
  EXPECT_EQ(a.embed("Plant hasLine Line"), b.embed("Plant hasLine Line"));
  LexicalEmbedder other(LexicalEmbedder::kDefaultDimension, 99);
  EXPECT_NE(a.embed("Plant hasLine Line"), other.embed("Plant hasLine Line"));
  EXPECT_EQ(a.name(), "lexical-3gram-512");
}

TEST(LexicalEmbedder, CaseInsensitive) {
  LexicalEmbedder e;
  EXPECT_EQ(e.embed("STATION"), e.embed("station"));
}

TEST(LexicalEmbedder, EmptyTextIsZero) {
  Vector v = LexicalEmbedder(16).embed("");
  EXPECT_EQ(std::accumulate(v.begin(), v.end(), 0.0), 0.0);
}

TEST(LexicalEmbedder, RejectsZeroDimension) { EXPECT_THROW(LexicalEmbedder(0), ConfigError); }

TEST(HttpEmbedder, RequiresKeyInEnvironment) {
  ::unsetenv("ONTORAG_TEST_ABSENT_KEY");
  HttpEmbedder::Options o;
  o.endpoint = "http://127.0.0.1:9";
  o.api_key_env = "ONTORAG_TEST_ABSENT_KEY";
  EXPECT_THROW(HttpEmbedder{o}, AuthMissing);
  o.endpoint.clear();
  EXPECT_THROW(HttpEmbedder{o}, ConfigError);
}
