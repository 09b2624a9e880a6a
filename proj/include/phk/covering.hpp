#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phk/rng.hpp"

namespace phk {

// Randomized covering partitions of [k]^ell: every block is carved out of a
// product of windows A_{s_1} x ... x A_{s_ell}, where A_i is the cyclic
// window {i, i+1, ..., i+(k-4)} of k-3 symbols. Each coordinate projection
// of a block therefore has at most k-3 symbols, so any k-2 words of one
// block collide (two share a symbol) in every coordinate.
//
// Symbols and coordinates are 1-based in the public interface and in the
// serialized form; words are stored as base-k integer ids.

inline constexpr std::uint64_t kDefaultWordLimit = 10'000'000;  // memory guard on k^ell

struct CoverPartition {
  int k = 0;
  int ell = 0;
  double epsilon = 0.0;
  std::uint64_t h = 0;  // block-count bound floor((k/(k-3)+epsilon)^ell)
  std::vector<std::vector<std::uint32_t>> blocks;      // disjoint, sorted word ids
  std::vector<std::vector<int>> generator_strings;     // sampled seed strings (1-based symbols)
};

struct Verdict {
  bool ok = true;
  std::vector<std::string> violations;
};

namespace detail {

inline std::uint64_t pow_u64(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline std::uint64_t checked_word_count(int k, int ell, std::uint64_t limit) {
  std::uint64_t n = 1;
  for (int i = 0; i < ell; ++i) {
    n *= static_cast<std::uint64_t>(k);
    if (n > limit)
      throw std::invalid_argument("covering: k^ell exceeds the word limit of " +
                                  std::to_string(limit));
  }
  return n;
}

// digits of a word id, most significant coordinate first, 0-based symbols
inline void word_digits(std::uint32_t id, int k, int ell, std::span<int> out) {
  for (int t = ell - 1; t >= 0; --t) {
    out[static_cast<std::size_t>(t)] = static_cast<int>(id % static_cast<std::uint32_t>(k));
    id /= static_cast<std::uint32_t>(k);
  }
}

inline bool in_window(int symbol0, int start0, int k) {
  return ((symbol0 - start0) % k + k) % k < k - 3;
}

}  // namespace detail

inline std::uint64_t cover_block_bound(int k, int ell, double epsilon) {
  const double raw = std::pow(static_cast<double>(k) / (k - 3) + epsilon, ell);
  return static_cast<std::uint64_t>(std::floor(raw + 1e-9));
}

// A_i = {i, i+1, ..., i+(k-4)} with wraparound into [1,k]; exactly k-3 symbols.
inline std::vector<int> window_set(int k, int i) {
  if (k < 5) throw std::invalid_argument("window_set: k must be >= 5");
  if (i < 1 || i > k) throw std::invalid_argument("window_set: index out of range");
  std::vector<int> w;
  for (int d = 0; d < k - 3; ++d) w.push_back((i - 1 + d) % k + 1);
  std::sort(w.begin(), w.end());
  return w;
}

inline std::string word_to_string(std::uint32_t id, int k, int ell) {
  std::vector<int> digits(static_cast<std::size_t>(ell));
  detail::word_digits(id, k, ell, digits);
  std::string s;
  for (int d : digits) s += static_cast<char>('1' + d);
  return s;
}

inline std::uint32_t word_from_string(const std::string& s, int k, int ell) {
  if (static_cast<int>(s.size()) != ell)
    throw std::invalid_argument("word '" + s + "': expected " + std::to_string(ell) + " symbols");
  std::uint32_t id = 0;
  for (char c : s) {
    const int d = c - '1';
    if (d < 0 || d >= k) throw std::invalid_argument("word '" + s + "': symbol out of range");
    id = id * static_cast<std::uint32_t>(k) + static_cast<std::uint32_t>(d);
  }
  return id;
}

// Samples h = floor((k/(k-3)+epsilon)^ell) window-product blocks per attempt
// and keeps the first attempt whose union covers [k]^ell. Words are then
// assigned to the lowest-index covering block (which only shrinks blocks,
// preserving the projection bound) and empty blocks are dropped. Returns
// nullopt when no attempt achieves coverage; callers can raise epsilon,
// max_attempts, or reconsider ell.
inline std::optional<CoverPartition> build_cover(int k, int ell, double epsilon, Rng& rng,
                                                 int max_attempts,
                                                 std::uint64_t word_limit = kDefaultWordLimit) {
  if (k < 5) throw std::invalid_argument("build_cover: k must be >= 5");
  if (ell < 1) throw std::invalid_argument("build_cover: ell must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("build_cover: epsilon must be positive");
  if (max_attempts < 1) throw std::invalid_argument("build_cover: max_attempts must be >= 1");
  const std::uint64_t nwords = detail::checked_word_count(k, ell, word_limit);
  const std::uint64_t h = cover_block_bound(k, ell, epsilon);
  if (h < 1) throw std::invalid_argument("build_cover: block bound is zero");

  std::vector<std::int32_t> assigned(nwords);
  std::vector<std::vector<int>> strings(h, std::vector<int>(static_cast<std::size_t>(ell)));
  std::vector<int> offsets(static_cast<std::size_t>(ell));
  const std::uint64_t members = detail::pow_u64(static_cast<std::uint64_t>(k - 3), ell);

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::fill(assigned.begin(), assigned.end(), -1);
    for (auto& s : strings)
      for (int& sym : s) sym = rng.below_int(k);
    std::uint64_t covered = 0;
    for (std::uint64_t j = 0; j < h; ++j) {
      const auto& s = strings[j];
      // odometer over the block A_{s_1} x ... x A_{s_ell}
      std::fill(offsets.begin(), offsets.end(), 0);
      for (std::uint64_t m = 0; m < members; ++m) {
        std::uint32_t id = 0;
        for (int t = 0; t < ell; ++t)
          id = id * static_cast<std::uint32_t>(k) +
               static_cast<std::uint32_t>((s[static_cast<std::size_t>(t)] + offsets[static_cast<std::size_t>(t)]) % k);
        if (assigned[id] < 0) {
          assigned[id] = static_cast<std::int32_t>(j);
          ++covered;
        }
        for (int t = ell - 1; t >= 0; --t) {
          if (++offsets[static_cast<std::size_t>(t)] < k - 3) break;
          offsets[static_cast<std::size_t>(t)] = 0;
        }
      }
    }
    if (covered != nwords) continue;

    CoverPartition part;
    part.k = k;
    part.ell = ell;
    part.epsilon = epsilon;
    part.h = h;
    std::vector<std::vector<std::uint32_t>> blocks(h);
    for (std::uint64_t w = 0; w < nwords; ++w)
      blocks[static_cast<std::uint64_t>(assigned[w])].push_back(static_cast<std::uint32_t>(w));
    for (auto& b : blocks)
      if (!b.empty()) part.blocks.push_back(std::move(b));
    for (const auto& s : strings) {
      std::vector<int> one_based(s.size());
      for (std::size_t t = 0; t < s.size(); ++t) one_based[t] = s[t] + 1;
      part.generator_strings.push_back(std::move(one_based));
    }
    return part;
  }
  return std::nullopt;
}

// Exhaustive structural check: disjointness, exact coverage of [k]^ell,
// block-count bound, and per-coordinate projection bound, each violation
// reported with a witness.
inline Verdict verify_partition(const CoverPartition& part,
                                std::uint64_t word_limit = kDefaultWordLimit) {
  Verdict v;
  auto fail = [&](std::string msg) {
    v.ok = false;
    v.violations.push_back(std::move(msg));
  };
  if (part.k < 5 || part.ell < 1) {
    fail("malformed partition: need k >= 5 and ell >= 1");
    return v;
  }
  const std::uint64_t nwords = detail::checked_word_count(part.k, part.ell, word_limit);
  const std::uint64_t bound = cover_block_bound(part.k, part.ell, part.epsilon);
  if (part.blocks.size() > bound)
    fail("block count " + std::to_string(part.blocks.size()) + " exceeds bound " +
         std::to_string(bound));
  if (part.h != bound)
    fail("recorded h " + std::to_string(part.h) + " differs from bound " + std::to_string(bound));

  std::vector<std::int32_t> owner(nwords, -1);
  for (std::size_t b = 0; b < part.blocks.size(); ++b) {
    for (std::uint32_t w : part.blocks[b]) {
      if (w >= nwords) {
        fail("block " + std::to_string(b) + " contains out-of-range word id " + std::to_string(w));
        continue;
      }
      if (owner[w] >= 0)
        fail("overlap at word " + word_to_string(w, part.k, part.ell) + " (blocks " +
             std::to_string(owner[w]) + " and " + std::to_string(b) + ")");
      else
        owner[w] = static_cast<std::int32_t>(b);
    }
  }
  for (std::uint64_t w = 0; w < nwords; ++w)
    if (owner[w] < 0) fail("uncovered word " + word_to_string(static_cast<std::uint32_t>(w), part.k, part.ell));

  std::vector<int> digits(static_cast<std::size_t>(part.ell));
  for (std::size_t b = 0; b < part.blocks.size(); ++b) {
    std::vector<std::vector<bool>> seen(static_cast<std::size_t>(part.ell),
                                        std::vector<bool>(static_cast<std::size_t>(part.k), false));
    for (std::uint32_t w : part.blocks[b]) {
      if (w >= nwords) continue;
      detail::word_digits(w, part.k, part.ell, digits);
      for (int t = 0; t < part.ell; ++t) seen[static_cast<std::size_t>(t)][static_cast<std::size_t>(digits[static_cast<std::size_t>(t)])] = true;
    }
    for (int t = 0; t < part.ell; ++t) {
      const auto cnt = static_cast<int>(std::count(seen[static_cast<std::size_t>(t)].begin(),
                                                   seen[static_cast<std::size_t>(t)].end(), true));
      if (cnt > part.k - 3)
        fail("block " + std::to_string(b) + " coordinate " + std::to_string(t + 1) +
             " projects onto " + std::to_string(cnt) + " symbols (max " +
             std::to_string(part.k - 3) + ")");
    }
  }
  return v;
}

namespace detail {

// checks one tuple of words: every coordinate must carry a repeated symbol
inline bool tuple_collides_everywhere(const CoverPartition& part,
                                      std::span<const std::uint32_t> words, int* bad_coord) {
  std::vector<std::vector<int>> digits(words.size(), std::vector<int>(static_cast<std::size_t>(part.ell)));
  for (std::size_t i = 0; i < words.size(); ++i) word_digits(words[i], part.k, part.ell, digits[i]);
  for (int t = 0; t < part.ell; ++t) {
    unsigned seen = 0;
    bool repeat = false;
    for (const auto& d : digits) {
      const unsigned bit = 1u << d[static_cast<std::size_t>(t)];
      if (seen & bit) {
        repeat = true;
        break;
      }
      seen |= bit;
    }
    if (!repeat) {
      if (bad_coord) *bad_coord = t + 1;
      return false;
    }
  }
  return true;
}

inline std::string tuple_to_string(const CoverPartition& part,
                                   std::span<const std::uint32_t> words) {
  std::string s;
  for (std::uint32_t w : words) {
    if (!s.empty()) s += ",";
    s += word_to_string(w, part.k, part.ell);
  }
  return s;
}

}  // namespace detail

// Randomized spot-check of the collision property: for sampled (k-2)-tuples
// drawn inside single blocks, every coordinate must contain a repeated
// symbol (forced by the projection bound when it holds).
inline Verdict collision_check(const CoverPartition& part, int samples, Rng& rng) {
  Verdict v;
  const int tuple = part.k - 2;
  std::vector<std::size_t> eligible;
  for (std::size_t b = 0; b < part.blocks.size(); ++b)
    if (static_cast<int>(part.blocks[b].size()) >= tuple) eligible.push_back(b);
  if (eligible.empty())
    throw std::invalid_argument("collision_check: no block has >= k-2 words");
  std::vector<std::uint32_t> pick(static_cast<std::size_t>(tuple));
  for (int s = 0; s < samples; ++s) {
    const auto& block = part.blocks[eligible[static_cast<std::size_t>(rng.below(eligible.size()))]];
    // partial Fisher-Yates over a copy of the block indices
    std::vector<std::uint32_t> idx(block);
    for (int j = 0; j < tuple; ++j) {
      const auto swap_with = static_cast<std::size_t>(j) + static_cast<std::size_t>(rng.below(idx.size() - static_cast<std::size_t>(j)));
      std::swap(idx[static_cast<std::size_t>(j)], idx[swap_with]);
      pick[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j)];
    }
    int bad = 0;
    if (!detail::tuple_collides_everywhere(part, pick, &bad)) {
      v.ok = false;
      v.violations.push_back("tuple {" + detail::tuple_to_string(part, pick) +
                             "} has all-distinct symbols at coordinate " + std::to_string(bad));
    }
  }
  return v;
}

// Exhaustive variant: every (k-2)-subset of every large-enough block.
inline Verdict collision_check_exhaustive(const CoverPartition& part,
                                          std::uint64_t work_guard = 100'000'000) {
  Verdict v;
  const int tuple = part.k - 2;
  bool any = false;
  std::uint64_t work = 0;
  std::vector<std::uint32_t> pick(static_cast<std::size_t>(tuple));
  for (const auto& block : part.blocks) {
    const int m = static_cast<int>(block.size());
    if (m < tuple) continue;
    any = true;
    std::vector<int> c(static_cast<std::size_t>(tuple));
    for (int j = 0; j < tuple; ++j) c[static_cast<std::size_t>(j)] = j;
    for (;;) {
      if (++work > work_guard)
        throw std::invalid_argument("collision_check_exhaustive: work guard exceeded");
      for (int j = 0; j < tuple; ++j) pick[static_cast<std::size_t>(j)] = block[static_cast<std::size_t>(c[static_cast<std::size_t>(j)])];
      int bad = 0;
      if (!detail::tuple_collides_everywhere(part, pick, &bad)) {
        v.ok = false;
        v.violations.push_back("tuple {" + detail::tuple_to_string(part, pick) +
                               "} has all-distinct symbols at coordinate " + std::to_string(bad));
      }
      int j = tuple - 1;
      while (j >= 0 && c[static_cast<std::size_t>(j)] == m - tuple + j) --j;
      if (j < 0) break;
      ++c[static_cast<std::size_t>(j)];
      for (int t = j + 1; t < tuple; ++t) c[static_cast<std::size_t>(t)] = c[static_cast<std::size_t>(t - 1)] + 1;
    }
  }
  if (!any) throw std::invalid_argument("collision_check: no block has >= k-2 words");
  return v;
}

}  // namespace phk
