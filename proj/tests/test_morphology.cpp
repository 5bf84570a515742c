#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>
#include <random>

#include "umorph/morphology.hpp"
#include "umorph/rng.hpp"
#include "umorph/utf8.hpp"

using namespace umorph;

namespace {

MorphModel make_model(std::map<std::string, long long> counts) {
  MorphModel m;
  m.counts = std::move(counts);
  for (const auto& [morph, c] : m.counts) m.total_tokens += c;
  return m;
}

// independent oracle: enumerate all 2^(L-1) segmentations, price morphs
// exactly like the closed-mode contract
constexpr double kInf = std::numeric_limits<double>::infinity();

double oracle_morph_cost(const MorphModel& m, const std::string& morph,
                         std::size_t units) {
  auto it = m.counts.find(morph);
  if (it != m.counts.end())
    return -std::log(static_cast<double>(it->second) /
                     static_cast<double>(m.total_tokens));
  if (units == 1)
    return std::log(static_cast<double>(m.total_tokens) +
                    static_cast<double>(m.counts.size()) + 1.0);
  return kInf;
}

void oracle_enumerate(const MorphModel& m,
                      const std::vector<std::string>& units, std::size_t pos,
                      double cost, std::vector<std::string>& acc,
                      std::vector<std::pair<double, std::vector<std::string>>>& out) {
  if (pos == units.size()) {
    out.emplace_back(cost, acc);
    return;
  }
  std::string morph;
  for (std::size_t end = pos; end < units.size(); ++end) {
    morph += units[end];
    double c = oracle_morph_cost(m, morph, end - pos + 1);
    if (c == kInf) continue;
    acc.push_back(morph);
    oracle_enumerate(m, units, end + 1, cost + c, acc, out);
    acc.pop_back();
  }
}

}  // namespace

TEST_CASE("corpus_cost") {
  auto m = make_model({{"a", 1}});
  CHECK(corpus_cost(m, {{{"a"}, 0}}) == doctest::Approx(0.0));

  auto m2 = make_model({{"ab", 2}, {"c", 2}});
  double cost = corpus_cost(m2, {{{"ab", "c"}, 0}});
  CHECK(cost == doctest::Approx(1.3862943611198906).epsilon(1e-12));

  auto m3 = make_model({{"ab", 4}, {"c", 4}});
  CHECK(corpus_cost(m3, {{{"ab", "c"}, 0}}) == doctest::Approx(cost));

  CHECK_THROWS_AS(corpus_cost(m2, {{{"zz"}, 0}}), std::runtime_error);
}

TEST_CASE("lexicon_cost") {
  MorphModel empty;
  CHECK(lexicon_cost(empty) == 0.0);

  MorphModel m;
  double c = std::log(27.0);
  for (char ch = 'a'; ch <= 'z'; ++ch) m.char_costs[std::string(1, ch)] = c;
  m.end_cost = c;
  m.counts = {{"ab", 1}};
  m.total_tokens = 1;
  CHECK(lexicon_cost(m) == doctest::Approx(3.0 * std::log(27.0)).epsilon(1e-12));

  // the lexicon is a set: higher counts do not change its cost
  m.counts["ab"] = 2;
  CHECK(lexicon_cost(m) == doctest::Approx(3.0 * std::log(27.0)).epsilon(1e-12));

  m.counts["q\xcf\x80"] = 1;  // character without a probability
  CHECK_THROWS_AS(lexicon_cost(m), std::runtime_error);
}

TEST_CASE("total_cost weights the corpus side by alpha") {
  MorphModel m;
  double c = std::log(27.0);
  for (char ch = 'a'; ch <= 'z'; ++ch) m.char_costs[std::string(1, ch)] = c;
  m.end_cost = c;
  m.counts = {{"ab", 2}, {"c", 2}};
  m.total_tokens = 4;
  std::vector<Segmentation> segs = {{{"ab", "c"}, 0}};
  double corpus = corpus_cost(m, segs);
  double lex = lexicon_cost(m);
  m.alpha = 1.0;
  CHECK(total_cost(m, segs) == doctest::Approx(corpus + lex));
  m.alpha = 2.0;
  CHECK(total_cost(m, segs) == doctest::Approx(2.0 * 1.3862943611198906 + lex)
                                    .epsilon(1e-9));
}

TEST_CASE("viterbi_segment closed examples") {
  auto m = make_model({{"ab", 2}, {"c", 1}, {"abc", 1}});
  auto seg = viterbi_segment_closed(m, "abc");
  CHECK(seg.morphs == std::vector<std::string>{"abc"});
  CHECK(seg.cost == doctest::Approx(-std::log(0.25)).epsilon(1e-12));

  auto single = make_model({{"c", 1}});
  auto seg2 = viterbi_segment_closed(single, "c");
  CHECK(seg2.morphs == std::vector<std::string>{"c"});
  CHECK(seg2.cost == doctest::Approx(0.0));

  CHECK_THROWS_AS(viterbi_segment_closed(m, ""), std::invalid_argument);
}

TEST_CASE("viterbi_segment falls back to floor-priced unseen characters") {
  auto m = make_model({{"ab", 3}});
  auto seg = viterbi_segment_closed(m, "abz");
  CHECK(seg.morphs == std::vector<std::string>{"ab", "z"});
  // multi-byte unknown characters segment as one unit
  auto seg2 = viterbi_segment_closed(m, "ab\xd0\xb6");
  CHECK(seg2.morphs == std::vector<std::string>{"ab", "\xd0\xb6"});
}

TEST_CASE("viterbi_segment matches brute-force enumeration") {
  std::mt19937_64 rng(99);
  const std::string alphabet = "abc";
  for (int trial = 0; trial < 20; ++trial) {
    // random lexicon over substrings of the 3-letter alphabet
    MorphModel m;
    int entries = 2 + static_cast<int>(bounded(rng, 8));
    for (int e = 0; e < entries; ++e) {
      std::size_t len = 1 + bounded(rng, 4);
      std::string morph;
      for (std::size_t i = 0; i < len; ++i)
        morph += alphabet[bounded(rng, 3)];
      m.counts[morph] += 1 + static_cast<long long>(bounded(rng, 5));
    }
    m.total_tokens = 0;
    for (const auto& [morph, c] : m.counts) m.total_tokens += c;

    for (int it = 0; it < 60; ++it) {
      std::size_t len = 1 + bounded(rng, 7);
      std::string word;
      for (std::size_t i = 0; i < len; ++i)
        word += alphabet[bounded(rng, 3)];

      std::vector<std::pair<double, std::vector<std::string>>> all;
      std::vector<std::string> acc;
      oracle_enumerate(m, utf8_units(word), 0, 0.0, acc, all);
      REQUIRE(!all.empty());
      double best = kInf;
      for (const auto& [c, morphs] : all) best = std::min(best, c);

      auto seg = viterbi_segment_closed(m, word);
      CHECK(seg.cost == doctest::Approx(best).epsilon(1e-12));
      // chosen segmentation must be in the tie set and respect tie-breaks
      bool in_tie_set = false;
      for (const auto& [c, morphs] : all) {
        if (std::abs(c - best) > 1e-9) continue;
        if (morphs == seg.morphs) in_tie_set = true;
        CHECK(seg.morphs.size() <= morphs.size());
        if (seg.morphs.size() == morphs.size()) CHECK(seg.morphs <= morphs);
      }
      CHECK(in_tie_set);
      // concatenation property
      std::string joined;
      for (const auto& morph : seg.morphs) joined += morph;
      CHECK(joined == word);
    }
  }
}

TEST_CASE("viterbi decisions are invariant to uniform count scaling") {
  // scaling all counts by k leaves every -ln(count/N) unchanged; the
  // unknown-character floor is NOT scale invariant, so keep every single
  // character in the lexicon to pin all paths to known morphs
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    MorphModel m;
    for (char c : {'a', 'b', 'c'})
      m.counts[std::string(1, c)] = 1 + static_cast<long long>(bounded(rng, 4));
    for (int e = 0; e < 6; ++e) {
      std::size_t len = 1 + bounded(rng, 3);
      std::string morph;
      for (std::size_t i = 0; i < len; ++i)
        morph += static_cast<char>('a' + bounded(rng, 3));
      m.counts[morph] += 1 + static_cast<long long>(bounded(rng, 4));
    }
    MorphModel scaled = m;
    for (auto& [morph, c] : scaled.counts) c *= 7;
    for (const auto& [morph, c] : m.counts) m.total_tokens += c;
    for (const auto& [morph, c] : scaled.counts) scaled.total_tokens += c;
    for (int it = 0; it < 20; ++it) {
      std::string word;
      std::size_t len = 1 + bounded(rng, 6);
      for (std::size_t i = 0; i < len; ++i)
        word += static_cast<char>('a' + bounded(rng, 3));
      CHECK(viterbi_segment_closed(m, word).morphs ==
            viterbi_segment_closed(scaled, word).morphs);
    }
  }
}

TEST_CASE("train_morph keeps an unsplittable type whole") {
  std::vector<std::string> corpus(100, "aaa");
  auto result = train_morph(corpus, {});
  REQUIRE(result.model.counts.size() == 1);
  CHECK(result.model.counts.count("aaa") == 1);
}

TEST_CASE("train_morph recovers shared parts of the 4-type corpus") {
  std::vector<std::string> corpus = {"johncat", "johndog", "marycat",
                                     "marydog"};
  MorphTrainOptions options;
  options.alpha = 1.0;
  options.seed = 1;
  auto result = train_morph(corpus, options);
  REQUIRE(result.model.counts.size() == 4);
  for (const char* m : {"john", "mary", "cat", "dog"})
    CHECK(result.model.counts.count(m) == 1);
}

TEST_CASE("train_morph argument validation") {
  CHECK_THROWS_AS(train_morph({}, {}), std::invalid_argument);
  MorphTrainOptions bad;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(train_morph({"abc"}, bad), std::invalid_argument);
}

TEST_CASE("train_morph is deterministic given seed") {
  std::vector<std::string> corpus;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    std::string w;
    std::size_t len = 3 + bounded(rng, 8);
    for (std::size_t k = 0; k < len; ++k)
      w += static_cast<char>('a' + bounded(rng, 5));
    corpus.push_back(w);
  }
  MorphTrainOptions options;
  options.seed = 9;
  auto a = train_morph(corpus, options);
  auto b = train_morph(corpus, options);
  CHECK(a.model.counts == b.model.counts);
  CHECK(a.final_cost == b.final_cost);
}

TEST_CASE("tune_alpha picks the arg-best, ties to the smaller alpha") {
  auto trivial_train = [](double alpha) {
    MorphModel m;
    m.alpha = alpha;
    return m;
  };
  CHECK(tune_alpha({0.7}, trivial_train,
                   [](const MorphModel&) { return 1.0; }) == 0.7);
  CHECK(tune_alpha({0.1, 1.0}, trivial_train, [](const MorphModel& m) {
          return m.alpha == 1.0 ? 0.2 : 0.5;
        }) == 1.0);
  CHECK(tune_alpha({2.0, 0.5, 1.0}, trivial_train,
                   [](const MorphModel&) { return 0.3; }) == 0.5);
  CHECK_THROWS_AS(tune_alpha({}, trivial_train,
                             [](const MorphModel&) { return 0.0; }),
                  std::invalid_argument);
}
