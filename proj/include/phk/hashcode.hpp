#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phk/covering.hpp"
#include "phk/psi.hpp"
#include "phk/simplex.hpp"

namespace phk {

// A set of distinct length-n words over the alphabet [1,k]. Symbols are
// stored 0-based; coordinates in the public operations are 1-based.
struct Code {
  int k = 0;
  int n = 0;
  std::vector<std::vector<std::uint8_t>> words;

  int size() const { return static_cast<int>(words.size()); }
  double rate() const { return size() <= 1 ? 0.0 : std::log2(static_cast<double>(size())) / n; }
  std::string word_string(int idx) const {
    std::string s;
    for (std::uint8_t sym : words[static_cast<std::size_t>(idx)]) s += static_cast<char>('1' + sym);
    return s;
  }
};

// One word per line, symbols as digits 1..k, optional spaces between
// symbols, blank lines ignored. Duplicates and ragged lines are rejected.
inline Code parse_code(const std::string& text, int k) {
  if (k < 2 || k > 9) throw std::invalid_argument("parse_code: k must be in [2,9]");
  Code code;
  code.k = k;
  std::set<std::vector<std::uint8_t>> seen;
  std::vector<std::uint8_t> word;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    ++line_no;
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    word.clear();
    for (std::size_t i = pos; i < eol; ++i) {
      const char c = text[i];
      if (c == ' ' || c == '\t' || c == '\r') continue;
      const int sym = c - '1';
      if (sym < 0 || sym >= k)
        throw std::invalid_argument("parse_code: line " + std::to_string(line_no) +
                                    ": symbol '" + std::string(1, c) + "' out of range 1.." +
                                    std::to_string(k));
      word.push_back(static_cast<std::uint8_t>(sym));
    }
    pos = eol + 1;
    if (word.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    if (code.words.empty()) {
      code.n = static_cast<int>(word.size());
    } else if (static_cast<int>(word.size()) != code.n) {
      throw std::invalid_argument("parse_code: line " + std::to_string(line_no) +
                                  ": word length " + std::to_string(word.size()) +
                                  " differs from " + std::to_string(code.n));
    }
    if (!seen.insert(word).second)
      throw std::invalid_argument("parse_code: line " + std::to_string(line_no) +
                                  ": duplicate word");
    code.words.push_back(word);
    if (eol == text.size()) break;
  }
  if (code.words.empty()) throw std::invalid_argument("parse_code: no words");
  return code;
}

struct HashVerdict {
  bool ok = true;
  std::vector<int> witness;  // indices of k words with no separating coordinate
};

inline constexpr std::uint64_t kHashWorkGuard = 100'000'000;  // subset-coordinate checks

// Brute-force check of the perfect k-hash property: every k distinct words
// must have a coordinate where all k symbols differ. Returns the first
// violating k-subset in lexicographic index order. Vacuously ok for
// |C| < k.
inline HashVerdict is_k_hash(const Code& code, std::uint64_t work_guard = kHashWorkGuard) {
  HashVerdict v;
  const int m = code.size();
  const int k = code.k;
  if (m < k) return v;
  // work estimate: C(m,k) * n, capped as computed
  long double est = 1.0L;
  for (int i = 0; i < k; ++i) est = est * (m - i) / (i + 1);
  est *= code.n;
  if (est > static_cast<long double>(work_guard))
    throw std::invalid_argument("is_k_hash: work guard exceeded (" + std::to_string(m) +
                                " words, k=" + std::to_string(k) + ")");
  std::vector<int> c(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) c[static_cast<std::size_t>(j)] = j;
  for (;;) {
    bool separated = false;
    for (int t = 0; t < code.n && !separated; ++t) {
      unsigned seen = 0;
      bool distinct = true;
      for (int j = 0; j < k; ++j) {
        const unsigned bit = 1u << code.words[static_cast<std::size_t>(c[static_cast<std::size_t>(j)])][static_cast<std::size_t>(t)];
        if (seen & bit) {
          distinct = false;
          break;
        }
        seen |= bit;
      }
      separated = distinct;
    }
    if (!separated) {
      v.ok = false;
      v.witness = c;
      return v;
    }
    int j = k - 1;
    while (j >= 0 && c[static_cast<std::size_t>(j)] == m - k + j) --j;
    if (j < 0) break;
    ++c[static_cast<std::size_t>(j)];
    for (int t = j + 1; t < k; ++t) c[static_cast<std::size_t>(t)] = c[static_cast<std::size_t>(t - 1)] + 1;
  }
  return v;
}

// Symbol frequencies of coordinate i (1-based) over the whole code.
inline ProbVector empirical_dist(const Code& code, int i) {
  if (i < 1 || i > code.n) throw std::invalid_argument("empirical_dist: coordinate out of range");
  std::vector<double> counts(static_cast<std::size_t>(code.k), 0.0);
  for (const auto& w : code.words) counts[w[static_cast<std::size_t>(i - 1)]] += 1.0;
  for (double& c : counts) c /= code.size();
  return make_prob_vector(counts, code.k);
}

// Symbol frequencies of coordinate i restricted to the given word indices.
inline ProbVector empirical_dist(const Code& code, std::span<const int> word_ids, int i) {
  if (i < 1 || i > code.n) throw std::invalid_argument("empirical_dist: coordinate out of range");
  if (word_ids.empty()) throw std::invalid_argument("empirical_dist: empty word set");
  std::vector<double> counts(static_cast<std::size_t>(code.k), 0.0);
  for (int id : word_ids) counts[code.words[static_cast<std::size_t>(id)][static_cast<std::size_t>(i - 1)]] += 1.0;
  for (double& c : counts) c /= static_cast<double>(word_ids.size());
  return make_prob_vector(counts, code.k);
}

// Bipartite graph induced by fixing k-2 anchor codewords and one
// coordinate: the two non-anchor symbols at that coordinate split the
// remaining codewords into the left and right classes (complete bipartite
// between them); codewords reusing an anchor symbol are isolated. When the
// anchors collide at the coordinate the graph is empty.
struct HanselGraph {
  int coordinate = 0;          // 1-based; 0 for hand-built graphs
  std::vector<int> anchors;    // word indices (empty for hand-built graphs)
  std::vector<int> left, right, isolated;

  int r() const { return static_cast<int>(left.size() + right.size() + isolated.size()); }
};

inline HanselGraph hansel_graph(const Code& code, std::span<const int> anchor_ids, int i) {
  if (i < 1 || i > code.n) throw std::invalid_argument("hansel_graph: coordinate out of range");
  if (static_cast<int>(anchor_ids.size()) != code.k - 2)
    throw std::invalid_argument("hansel_graph: need exactly k-2 anchors");
  std::set<int> uniq(anchor_ids.begin(), anchor_ids.end());
  if (static_cast<int>(uniq.size()) != code.k - 2)
    throw std::invalid_argument("hansel_graph: anchors must be distinct");
  for (int id : anchor_ids)
    if (id < 0 || id >= code.size())
      throw std::invalid_argument("hansel_graph: anchor index out of range");

  HanselGraph g;
  g.coordinate = i;
  g.anchors.assign(anchor_ids.begin(), anchor_ids.end());
  unsigned anchor_syms = 0;
  bool collide = false;
  for (int id : anchor_ids) {
    const unsigned bit = 1u << code.words[static_cast<std::size_t>(id)][static_cast<std::size_t>(i - 1)];
    if (anchor_syms & bit) collide = true;
    anchor_syms |= bit;
  }
  int sym_a = -1, sym_b = -1;
  if (!collide) {
    for (int s = 0; s < code.k; ++s) {
      if (anchor_syms & (1u << s)) continue;
      if (sym_a < 0)
        sym_a = s;
      else
        sym_b = s;
    }
  }
  for (int id = 0; id < code.size(); ++id) {
    if (uniq.count(id)) continue;
    if (collide) {
      g.isolated.push_back(id);
      continue;
    }
    const int s = code.words[static_cast<std::size_t>(id)][static_cast<std::size_t>(i - 1)];
    if (s == sym_a)
      g.left.push_back(id);
    else if (s == sym_b)
      g.right.push_back(id);
    else
      g.isolated.push_back(id);
  }
  return g;
}

// Fraction of vertices in the two bipartite classes among the r = |C|-k+2
// graph vertices; equals (|C|/r)(1 - sum of anchor-symbol frequencies) when
// the anchors do not collide, and 0 on an empty graph.
inline double tau_fraction(const HanselGraph& g) {
  const int r = g.r();
  if (r == 0) return 0.0;
  return static_cast<double>(g.left.size() + g.right.size()) / r;
}

struct HanselCheckResult {
  bool ok = true;
  double tau_sum = 0.0;
  double threshold = 0.0;  // log2(r)
  int r = 0;
};

// Verifies sum of tau over a family of bipartite graphs on one common
// vertex set against log2(r). Requires the edge union to be the complete
// graph; otherwise the inequality does not apply and an error is raised.
inline HanselCheckResult hansel_check(std::span<const HanselGraph> graphs) {
  if (graphs.empty()) throw std::invalid_argument("hansel_check: no graphs");
  std::vector<int> verts;
  auto collect = [](const HanselGraph& g) {
    std::vector<int> v;
    v.insert(v.end(), g.left.begin(), g.left.end());
    v.insert(v.end(), g.right.begin(), g.right.end());
    v.insert(v.end(), g.isolated.begin(), g.isolated.end());
    std::sort(v.begin(), v.end());
    return v;
  };
  verts = collect(graphs[0]);
  for (std::size_t gi = 1; gi < graphs.size(); ++gi)
    if (collect(graphs[gi]) != verts)
      throw std::invalid_argument("hansel_check: graphs have different vertex sets");
  const int r = static_cast<int>(verts.size());
  if (r < 2) throw std::invalid_argument("hansel_check: need at least 2 vertices");
  std::map<int, int> pos;
  for (int j = 0; j < r; ++j) pos[verts[static_cast<std::size_t>(j)]] = j;
  std::vector<bool> edge(static_cast<std::size_t>(r) * static_cast<std::size_t>(r), false);
  for (const auto& g : graphs)
    for (int a : g.left)
      for (int b : g.right) {
        edge[static_cast<std::size_t>(pos[a]) * static_cast<std::size_t>(r) + static_cast<std::size_t>(pos[b])] = true;
        edge[static_cast<std::size_t>(pos[b]) * static_cast<std::size_t>(r) + static_cast<std::size_t>(pos[a])] = true;
      }
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b)
      if (!edge[static_cast<std::size_t>(a) * static_cast<std::size_t>(r) + static_cast<std::size_t>(b)])
        throw std::invalid_argument("hansel_check: edge union is not complete (missing pair " +
                                    std::to_string(verts[static_cast<std::size_t>(a)]) + "," +
                                    std::to_string(verts[static_cast<std::size_t>(b)]) + ")");
  HanselCheckResult res;
  res.r = r;
  for (const auto& g : graphs) res.tau_sum += tau_fraction(g);
  res.threshold = std::log2(static_cast<double>(r));
  res.ok = res.tau_sum >= res.threshold - 1e-9;
  return res;
}

// Prefix subcodes: each codeword lands in the unique cover block containing
// its length-ell prefix.
struct SubcodeCell {
  int block_id = 0;               // index into the cover's block list
  std::vector<int> word_ids;      // indices into the parent code
  double weight = 0.0;            // |C_cell| / |C|
  bool heavy = false;             // |C_cell| > n
};

struct SubcodePartition {
  Code parent;
  int prefix_len = 0;
  std::vector<SubcodeCell> cells;  // nonempty cells only
};

inline SubcodePartition partition_by_prefix(const Code& code, const CoverPartition& cover) {
  if (cover.k != code.k) throw std::invalid_argument("partition_by_prefix: alphabet mismatch");
  if (cover.ell > code.n) throw std::invalid_argument("partition_by_prefix: prefix longer than words");
  const std::uint64_t nprefix = detail::pow_u64(static_cast<std::uint64_t>(code.k), cover.ell);
  std::vector<std::int32_t> block_of(nprefix, -1);
  for (std::size_t b = 0; b < cover.blocks.size(); ++b)
    for (std::uint32_t w : cover.blocks[b]) {
      if (w >= nprefix) throw std::invalid_argument("partition_by_prefix: bad cover word id");
      block_of[w] = static_cast<std::int32_t>(b);
    }
  std::map<int, std::vector<int>> cells;
  for (int id = 0; id < code.size(); ++id) {
    std::uint32_t prefix = 0;
    for (int t = 0; t < cover.ell; ++t)
      prefix = prefix * static_cast<std::uint32_t>(code.k) +
               code.words[static_cast<std::size_t>(id)][static_cast<std::size_t>(t)];
    const std::int32_t b = block_of[prefix];
    if (b < 0)
      throw std::invalid_argument("partition_by_prefix: prefix " +
                                  word_to_string(prefix, code.k, cover.ell) +
                                  " not covered by the partition");
    cells[b].push_back(id);
  }
  SubcodePartition part;
  part.parent = code;
  part.prefix_len = cover.ell;
  for (auto& [b, ids] : cells) {
    SubcodeCell cell;
    cell.block_id = b;
    cell.weight = static_cast<double>(ids.size()) / code.size();
    cell.heavy = static_cast<int>(ids.size()) > code.n;
    cell.word_ids = std::move(ids);
    part.cells.push_back(std::move(cell));
  }
  return part;
}

// (1/2) sum over cell pairs of w_a w_b [psi(f_a,f_b) + psi(f_b,f_a)] at
// coordinate i (1-based, beyond the prefix), with f_* the per-cell
// empirical distributions.
inline double symmetrized_expectation(const SubcodePartition& part, int i) {
  if (i <= part.prefix_len)
    throw std::invalid_argument("symmetrized_expectation: coordinate lies inside the prefix");
  if (i > part.parent.n)
    throw std::invalid_argument("symmetrized_expectation: coordinate out of range");
  std::vector<ProbVector> dists;
  dists.reserve(part.cells.size());
  for (const auto& cell : part.cells) dists.push_back(empirical_dist(part.parent, cell.word_ids, i));
  double total = 0.0;
  for (std::size_t a = 0; a < part.cells.size(); ++a)
    for (std::size_t b = 0; b < part.cells.size(); ++b)
      total += 0.5 * part.cells[a].weight * part.cells[b].weight *
               (psi(dists[a], dists[b]) + psi(dists[b], dists[a]));
  return total;
}

namespace detail {

inline double binomial(int n, int r) {
  double v = 1.0;
  for (int i = 0; i < r; ++i) v = v * (n - i) / (i + 1);
  return v;
}

}  // namespace detail

// Exact expectation of tau_fraction over all draws of k-2 distinct words
// from the given subcode (anchors from the cell, graph over the whole
// code). Since tau depends only on the anchors' symbol multiset at i, the
// enumeration over C(m,k-2) word subsets is folded into one over symbol
// subsets weighted by the per-symbol counts; the value is identical.
inline double expected_tau_exact(const Code& code, std::span<const int> cell_word_ids, int i) {
  const int k = code.k;
  const int m = static_cast<int>(cell_word_ids.size());
  if (m < k - 2) throw std::invalid_argument("expected_tau_exact: subcode smaller than k-2");
  if (i < 1 || i > code.n) throw std::invalid_argument("expected_tau_exact: coordinate out of range");
  const int r = code.size() - k + 2;
  if (r <= 0) return 0.0;
  std::vector<double> cell_count(static_cast<std::size_t>(k), 0.0);
  for (int id : cell_word_ids) cell_count[code.words[static_cast<std::size_t>(id)][static_cast<std::size_t>(i - 1)]] += 1.0;
  const ProbVector f = empirical_dist(code, i);
  const double scale = static_cast<double>(code.size()) / r;
  // enumerate (k-2)-subsets of symbols by their 2-element complement
  double total = 0.0;
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      double ways = 1.0;
      for (int s = 0; s < k; ++s) {
        if (s == a || s == b) continue;
        ways *= cell_count[static_cast<std::size_t>(s)];
        if (ways == 0.0) break;
      }
      if (ways == 0.0) continue;
      total += ways * scale * (f[a] + f[b]);
    }
  }
  return total / detail::binomial(m, k - 2);
}

}  // namespace phk
