#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "phk/covering.hpp"
#include "phk/hashcode.hpp"
#include "phk/rng.hpp"

using namespace phk;

namespace {

Code all_words_of_length_one(int k) {
  std::string text;
  for (int s = 1; s <= k; ++s) text += std::to_string(s) + "\n";
  return parse_code(text, k);
}

Code random_code(int k, int n, int size, Rng& rng) {
  std::set<std::vector<std::uint8_t>> words;
  while (static_cast<int>(words.size()) < size) {
    std::vector<std::uint8_t> w(static_cast<std::size_t>(n));
    for (auto& sym : w) sym = static_cast<std::uint8_t>(rng.below_int(k));
    words.insert(w);
  }
  Code code;
  code.k = k;
  code.n = n;
  code.words.assign(words.begin(), words.end());
  return code;
}

std::vector<int> all_ids(const Code& code) {
  std::vector<int> ids(static_cast<std::size_t>(code.size()));
  for (int i = 0; i < code.size(); ++i) ids[static_cast<std::size_t>(i)] = i;
  return ids;
}

}  // namespace

TEST_CASE("parse_code reads digit words") {
  const Code code = parse_code("123\n231\n312", 3);
  CHECK(code.n == 3);
  CHECK(code.size() == 3);
  CHECK(code.rate() == Catch::Approx(std::log2(3.0) / 3).margin(1e-12));
  CHECK(code.word_string(0) == "123");
}

TEST_CASE("parse_code accepts spaced symbols and blank lines") {
  const Code code = parse_code("1 2 3\n\n2 31\n", 3);
  CHECK(code.size() == 2);
  CHECK(code.word_string(1) == "231");
}

TEST_CASE("parse_code rejects malformed input") {
  CHECK_THROWS_AS(parse_code("12\n12", 2), std::invalid_argument);   // duplicate
  CHECK_THROWS_AS(parse_code("14", 3), std::invalid_argument);       // out of range
  CHECK_THROWS_AS(parse_code("12\n123", 3), std::invalid_argument);  // ragged
  CHECK_THROWS_AS(parse_code("", 3), std::invalid_argument);         // empty
  CHECK_THROWS_AS(parse_code("11", 10), std::invalid_argument);      // k > 9
}

TEST_CASE("is_k_hash accepts the full length-one code") {
  for (int k : {3, 4, 5}) {
    const HashVerdict v = is_k_hash(all_words_of_length_one(k));
    CHECK(v.ok);
  }
}

TEST_CASE("is_k_hash finds the first violating subset") {
  const Code code = parse_code("11\n12\n13\n21", 3);
  const HashVerdict v = is_k_hash(code);
  REQUIRE_FALSE(v.ok);
  REQUIRE(v.witness.size() == 3);
  // {11,12,13} separates at coordinate 2, so the first violator is {11,12,21}
  CHECK(code.word_string(v.witness[0]) == "11");
  CHECK(code.word_string(v.witness[1]) == "12");
  CHECK(code.word_string(v.witness[2]) == "21");
}

TEST_CASE("is_k_hash is vacuous below k words") {
  const Code code = parse_code("11\n12", 3);
  CHECK(is_k_hash(code).ok);
}

TEST_CASE("is_k_hash enforces its work guard") {
  Code big;
  big.k = 4;
  big.n = 100;
  for (int i = 0; i < 200; ++i) {
    std::vector<std::uint8_t> w(100, 0);
    int x = i;
    for (int t = 0; t < 4; ++t) {
      w[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(x % 4);
      x /= 4;
    }
    big.words.push_back(w);
  }
  CHECK_THROWS_AS(is_k_hash(big), std::invalid_argument);
}

TEST_CASE("empirical_dist counts symbol frequencies") {
  const Code one = all_words_of_length_one(3);
  const ProbVector u = empirical_dist(one, 1);
  for (int i = 0; i < 3; ++i) CHECK(u[i] == Catch::Approx(1.0 / 3).margin(1e-15));

  const Code code = parse_code("11\n12\n13\n21", 3);
  const ProbVector d1 = empirical_dist(code, 1);
  CHECK(d1[0] == Catch::Approx(0.75).margin(1e-15));
  CHECK(d1[1] == Catch::Approx(0.25).margin(1e-15));
  CHECK(d1[2] == 0.0);
  const ProbVector d2 = empirical_dist(code, 2);
  CHECK(d2[0] == Catch::Approx(0.5).margin(1e-15));
  CHECK(d2[1] == Catch::Approx(0.25).margin(1e-15));
  CHECK(d2[2] == Catch::Approx(0.25).margin(1e-15));
  CHECK_THROWS_AS(empirical_dist(code, 0), std::invalid_argument);
  CHECK_THROWS_AS(empirical_dist(code, 3), std::invalid_argument);
}

TEST_CASE("hansel_graph splits the two free symbols") {
  const Code code = parse_code("11\n12\n13\n21", 3);
  const std::vector<int> anchor = {0};  // word 11
  const HanselGraph g1 = hansel_graph(code, anchor, 1);
  // anchor symbol 1 at coordinate 1: classes carry symbols 2 and 3
  CHECK(g1.left == std::vector<int>{3});       // 21
  CHECK(g1.right.empty());                     // no word with symbol 3 at coordinate 1
  CHECK(g1.isolated == std::vector<int>{1, 2});
  CHECK(g1.r() == 3);

  const HanselGraph g2 = hansel_graph(code, anchor, 2);
  CHECK(g2.left == std::vector<int>{1});   // 12
  CHECK(g2.right == std::vector<int>{2});  // 13
  CHECK(g2.isolated == std::vector<int>{3});
  CHECK(tau_fraction(g2) == Catch::Approx(2.0 / 3.0).margin(1e-15));
}

TEST_CASE("colliding anchors empty the graph") {
  const Code code = parse_code("111\n112\n121\n211\n222", 4);  // k=4: two anchors
  const std::vector<int> anchors = {0, 1};                     // 111 and 112 share coordinate 1
  const HanselGraph g = hansel_graph(code, anchors, 1);
  CHECK(g.left.empty());
  CHECK(g.right.empty());
  CHECK(g.isolated.size() == 3);
  CHECK(tau_fraction(g) == 0.0);
}

TEST_CASE("hansel_graph validates anchors") {
  const Code code = parse_code("11\n12\n13\n21", 3);
  CHECK_THROWS_AS(hansel_graph(code, std::vector<int>{0, 1}, 1), std::invalid_argument);
  CHECK_THROWS_AS(hansel_graph(code, std::vector<int>{9}, 1), std::invalid_argument);
  const Code code4 = parse_code("111\n222\n333\n123", 4);
  CHECK_THROWS_AS(hansel_graph(code4, std::vector<int>{0, 0}, 1), std::invalid_argument);
}

TEST_CASE("tau_fraction equals the frequency form") {
  Rng rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const Code code = random_code(5, 4, 40, rng);
    const std::vector<int> anchors = {0, 1, 2};
    for (int i = 1; i <= code.n; ++i) {
      const HanselGraph g = hansel_graph(code, anchors, i);
      // frequency form: (|C|/(|C|-k+2)) (1 - sum of anchor-symbol frequencies)
      unsigned syms = 0;
      bool collide = false;
      for (int a : anchors) {
        const unsigned bit = 1u << code.words[static_cast<std::size_t>(a)][static_cast<std::size_t>(i - 1)];
        if (syms & bit) collide = true;
        syms |= bit;
      }
      double formula = 0.0;
      if (!collide) {
        const ProbVector f = empirical_dist(code, i);
        double anchor_mass = 0.0;
        for (int s = 0; s < 5; ++s)
          if (syms & (1u << s)) anchor_mass += f[s];
        formula = (static_cast<double>(code.size()) / (code.size() - 5 + 2)) * (1.0 - anchor_mass);
      }
      CHECK(std::abs(tau_fraction(g) - formula) <= 1e-12);
      CHECK(std::abs(tau_fraction(g) - formula) <= 5.0 / code.size());
    }
  }
}

TEST_CASE("hansel_check on the two-graph K4 cover is tight") {
  HanselGraph g1, g2;
  g1.left = {1, 2};
  g1.right = {3, 4};
  g2.left = {1, 3};
  g2.right = {2, 4};
  const std::vector<HanselGraph> graphs = {g1, g2};
  const HanselCheckResult res = hansel_check(graphs);
  CHECK(res.ok);
  CHECK(res.tau_sum == 2.0);  // exactly log2(4)
  CHECK(res.threshold == 2.0);
}

TEST_CASE("hansel_check on a single edge") {
  HanselGraph g;
  g.left = {1};
  g.right = {2};
  const std::vector<HanselGraph> graphs = {g};
  const HanselCheckResult res = hansel_check(graphs);
  CHECK(res.ok);
  CHECK(res.tau_sum == 1.0);
}

TEST_CASE("hansel_check rejects incomplete unions and mismatched vertex sets") {
  HanselGraph g1;
  g1.left = {1, 2};
  g1.right = {3, 4};
  const std::vector<HanselGraph> incomplete = {g1};  // pairs (1,2) and (3,4) uncovered
  CHECK_THROWS_AS(hansel_check(incomplete), std::invalid_argument);

  HanselGraph g2;
  g2.left = {1};
  g2.right = {5};
  const std::vector<HanselGraph> mismatched = {g1, g2};
  CHECK_THROWS_AS(hansel_check(mismatched), std::invalid_argument);
}

TEST_CASE("anchored graphs of a verified code satisfy the log bound") {
  // all of [5]^1: one coordinate, every anchor triple leaves one pair
  const Code code = all_words_of_length_one(5);
  std::vector<int> c = {0, 1, 2};
  do {
    std::vector<HanselGraph> graphs;
    graphs.push_back(hansel_graph(code, c, 1));
    const HanselCheckResult res = hansel_check(graphs);
    CHECK(res.ok);
    CHECK(res.tau_sum == Catch::Approx(1.0).margin(1e-15));  // log2(2)
    // advance the combination
    int j = 2;
    while (j >= 0 && c[static_cast<std::size_t>(j)] == 5 - 3 + j) --j;
    if (j < 0) break;
    ++c[static_cast<std::size_t>(j)];
    for (int t = j + 1; t < 3; ++t) c[static_cast<std::size_t>(t)] = c[static_cast<std::size_t>(t - 1)] + 1;
  } while (true);
}

TEST_CASE("partition_by_prefix classifies cells and weights") {
  Rng rng(5);
  const auto cover = build_cover(5, 1, 2.6, rng, 100);  // h = floor(5.1) = 5 windows
  REQUIRE(cover.has_value());
  Rng code_rng(17);
  const Code code = random_code(5, 4, 60, code_rng);
  const SubcodePartition part = partition_by_prefix(code, *cover);
  double weight_sum = 0.0;
  int words = 0;
  for (const auto& cell : part.cells) {
    weight_sum += cell.weight;
    words += static_cast<int>(cell.word_ids.size());
    CHECK(cell.heavy == (static_cast<int>(cell.word_ids.size()) > code.n));
  }
  CHECK(words == code.size());
  CHECK(std::abs(weight_sum - 1.0) <= 1e-12);

  // any k-2 words of one cell collide inside the prefix
  for (const auto& cell : part.cells) {
    if (cell.word_ids.size() < 3) continue;
    for (std::size_t a = 0; a < cell.word_ids.size(); ++a)
      for (std::size_t b = a + 1; b < cell.word_ids.size(); ++b)
        for (std::size_t d = b + 1; d < cell.word_ids.size(); ++d)
          for (int t = 0; t < part.prefix_len; ++t) {
            const int sa = code.words[static_cast<std::size_t>(cell.word_ids[a])][static_cast<std::size_t>(t)];
            const int sb = code.words[static_cast<std::size_t>(cell.word_ids[b])][static_cast<std::size_t>(t)];
            const int sd = code.words[static_cast<std::size_t>(cell.word_ids[d])][static_cast<std::size_t>(t)];
            CHECK((sa == sb || sa == sd || sb == sd));
          }
  }

  // light-cell mass is bounded by n per cell
  long light_mass = 0;
  for (const auto& cell : part.cells)
    if (!cell.heavy) light_mass += static_cast<long>(cell.word_ids.size());
  CHECK(light_mass <= static_cast<long>(code.n) * static_cast<long>(cover->blocks.size()));
}

TEST_CASE("partition_by_prefix validates dimensions") {
  Rng rng(5);
  const auto cover = build_cover(5, 2, 1.5, rng, 100);
  REQUIRE(cover.has_value());
  Rng code_rng(18);
  const Code code6 = random_code(6, 4, 20, code_rng);
  CHECK_THROWS_AS(partition_by_prefix(code6, *cover), std::invalid_argument);
  const Code short_code = random_code(5, 1, 4, code_rng);
  CHECK_THROWS_AS(partition_by_prefix(short_code, *cover), std::invalid_argument);
}

TEST_CASE("symmetrized_expectation of a single cell is psi of the coordinate") {
  // all prefixes land in the {1,2} block, so one cell carries everything
  CoverPartition cover;
  cover.k = 5;
  cover.ell = 1;
  cover.epsilon = 0.6;
  cover.h = cover_block_bound(5, 1, 0.6);
  cover.blocks = {{word_from_string("1", 5, 1), word_from_string("2", 5, 1)},
                  {word_from_string("3", 5, 1), word_from_string("4", 5, 1)},
                  {word_from_string("5", 5, 1)}};
  REQUIRE(verify_partition(cover).ok);
  const Code code = parse_code("111\n122\n133\n145\n154\n223", 5);
  const SubcodePartition part = partition_by_prefix(code, cover);
  REQUIRE(part.cells.size() == 1);
  for (int i = 2; i <= 3; ++i) {
    const ProbVector f = empirical_dist(code, i);
    CHECK(symmetrized_expectation(part, i) == Catch::Approx(psi(f, f)).margin(1e-14));
  }
}

TEST_CASE("symmetrized_expectation matches a direct double sum") {
  Rng rng(5);
  const auto cover = build_cover(5, 1, 2.6, rng, 100);
  REQUIRE(cover.has_value());
  Rng code_rng(19);
  const Code code = random_code(5, 4, 50, code_rng);
  const SubcodePartition part = partition_by_prefix(code, *cover);
  for (int i = 2; i <= code.n; ++i) {
    // independent summation oracle
    double direct = 0.0;
    for (const auto& ca : part.cells)
      for (const auto& cb : part.cells) {
        const ProbVector fa = empirical_dist(code, ca.word_ids, i);
        const ProbVector fb = empirical_dist(code, cb.word_ids, i);
        direct += 0.5 * ca.weight * cb.weight * (psi(fa, fb) + psi(fb, fa));
      }
    CHECK(symmetrized_expectation(part, i) == Catch::Approx(direct).margin(1e-14));
  }
  CHECK_THROWS_AS(symmetrized_expectation(part, 1), std::invalid_argument);
  CHECK_THROWS_AS(symmetrized_expectation(part, code.n + 1), std::invalid_argument);
}

TEST_CASE("expected_tau_exact agrees with literal subset enumeration") {
  Rng rng(41);
  for (int k : {4, 5}) {
    const Code code = random_code(k, 3, 18, rng);
    const std::vector<int> cell = all_ids(code);
    for (int i = 1; i <= code.n; ++i) {
      // oracle: enumerate all (k-2)-subsets of words, average tau_fraction
      std::vector<int> c(static_cast<std::size_t>(k - 2));
      for (int j = 0; j < k - 2; ++j) c[static_cast<std::size_t>(j)] = j;
      double total = 0.0;
      long count = 0;
      for (;;) {
        total += tau_fraction(hansel_graph(code, c, i));
        ++count;
        int j = k - 3;
        while (j >= 0 && c[static_cast<std::size_t>(j)] == code.size() - (k - 2) + j) --j;
        if (j < 0) break;
        ++c[static_cast<std::size_t>(j)];
        for (int t = j + 1; t < k - 2; ++t) c[static_cast<std::size_t>(t)] = c[static_cast<std::size_t>(t - 1)] + 1;
      }
      CHECK(expected_tau_exact(code, cell, i) == Catch::Approx(total / count).margin(1e-13));
    }
  }
}

TEST_CASE("expected_tau_exact degenerate cases") {
  // all cell members share a symbol at the coordinate: anchors always collide
  const Code code = parse_code("11\n12\n13\n14\n15\n21\n22", 5);
  const std::vector<int> cell = {0, 1, 2, 3, 4};  // all start with 1
  CHECK(expected_tau_exact(code, cell, 1) == 0.0);

  // cell of exactly k-2 words: single draw
  const std::vector<int> tiny = {0, 1, 5};
  const double single = tau_fraction(hansel_graph(code, tiny, 2));
  CHECK(expected_tau_exact(code, std::vector<int>{0, 1, 5}, 2) == Catch::Approx(single).margin(1e-15));

  CHECK_THROWS_AS(expected_tau_exact(code, std::vector<int>{0, 1}, 1), std::invalid_argument);
}

TEST_CASE("expected_tau_exact converges to psi of the empirical distributions") {
  Rng rng(43);
  const Code code = random_code(5, 6, 600, rng);
  const std::vector<int> cell = all_ids(code);
  for (int i = 1; i <= 3; ++i) {
    const ProbVector f = empirical_dist(code, i);
    const double gap = std::abs(expected_tau_exact(code, cell, i) - psi(f, f));
    CHECK(gap <= 25.0 * 25.0 / code.size());
    CHECK(gap <= 0.05);
  }
}
