// Command-line surface for the perfect k-hash bound toolkit. Every
// subcommand is reproducible: all randomness flows from --seed (default 0)
// and JSON output is byte-identical for identical arguments.
//
// Exit codes: 0 success / verdict ok, 1 verdict fail (witness printed),
// 2 usage or input error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phk/bounds.hpp"
#include "phk/covering.hpp"
#include "phk/hashcode.hpp"
#include "phk/json_util.hpp"
#include "phk/maximizer.hpp"
#include "phk/psi.hpp"
#include "phk/rng.hpp"
#include "phk/simplex.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdictFail = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::string vec_json(const phk::ProbVector& v) { return phk::json_num_array(v.entries()); }

std::string max_result_json(int k, const phk::MaxResult& r) {
  std::string out = "{\"k\":" + std::to_string(k) + ",\"value\":" + phk::json_num(r.value) +
                    ",\"family\":" + phk::json_str(r.family) +
                    ",\"params\":" + phk::json_num_array(r.params) +
                    ",\"argmax_p\":" + vec_json(r.argmax_p) +
                    ",\"argmax_q\":" + vec_json(r.argmax_q) +
                    ",\"method\":" + phk::json_str(phk::method_name(r.method)) +
                    ",\"certified\":" + phk::json_bool(r.certified) + "}";
  return out;
}

std::string bound_json(const phk::BoundReport& r) {
  return "{\"k\":" + std::to_string(r.k) + ",\"fk_bound\":" + phk::json_num(r.fk_bound) +
         ",\"M_k\":" + phk::json_num(r.M_k) + ",\"new_bound\":" + phk::json_num(r.new_bound) +
         ",\"certified\":" + phk::json_bool(r.certified) + "}";
}

void print_bound_text(const phk::BoundReport& r) {
  std::printf("k=%d\n", r.k);
  std::printf("  fk_bound   %.17g  (rounds up to %s)\n", r.fk_bound,
              fmt("%.5f", phk::round_up(r.fk_bound, 5)).c_str());
  std::printf("  M_k        %.17g%s\n", r.M_k, r.certified ? "" : "  (case-list maximum, not certified)");
  std::printf("  new_bound  %.17g  (rounds up to %s)\n", r.new_bound,
              fmt("%.5f", phk::round_up(r.new_bound, 5)).c_str());
  if (r.k == 6)
    std::printf("  note: the exact k=6 bound lies between 0.0875 (truncated) and 0.0876 "
                "(rounded up); displayed values round upward\n");
}

int run(int argc, char** argv) {
  CLI::App app{"phk: bounds on the rate of perfect k-hash codes"};
  app.fallthrough();
  app.require_subcommand(1);
  bool json = false;
  std::uint64_t seed = 0;
  app.add_flag("--json", json, "emit machine-readable JSON");
  app.add_option("--seed", seed, "seed for all randomized subcommands (default 0)");

  // maxpsi
  auto* maxpsi = app.add_subcommand("maxpsi", "maximize Psi over the boundary case families");
  int mp_k = 5;
  int mp_grid = 1000;
  maxpsi->add_option("--k", mp_k, "alphabet size (>= 5)")->required();
  maxpsi->add_option("--grid", mp_grid, "grid steps per parameter (>= 100)");

  // globalcheck
  auto* gcheck = app.add_subcommand("globalcheck", "multistart ascent safety net for the case-list maximum");
  int gc_k = 5;
  long gc_samples = 10000;
  int gc_threads = 0;
  gcheck->add_option("--k", gc_k, "alphabet size (5 or 6)")->required();
  gcheck->add_option("--samples", gc_samples, "number of random starts")->required();
  gcheck->add_option("--threads", gc_threads, "worker threads (default: hardware)");

  // bound
  auto* bound = app.add_subcommand("bound", "rate bound report for one k");
  int b_k = 5;
  bound->add_option("--k", b_k, "alphabet size (>= 5)")->required();

  // table
  auto* table = app.add_subcommand("table", "rate bound reports for a range of k");
  int t_kmin = 5, t_kmax = 6;
  bool t_lit = false;
  table->add_option("--kmin", t_kmin)->required();
  table->add_option("--kmax", t_kmax)->required();
  table->add_flag("--literature", t_lit, "append reference values from the literature (not computed)");

  // cover
  auto* cover = app.add_subcommand("cover", "build a covering partition of [k]^len");
  int c_k = 5, c_len = 1, c_attempts = 100;
  double c_eps = 0.5;
  std::string c_out;
  cover->add_option("--k", c_k)->required();
  cover->add_option("--len", c_len, "prefix length")->required();
  cover->add_option("--eps", c_eps, "slack epsilon (> 0)")->required();
  cover->add_option("--attempts", c_attempts, "max sampling attempts (default 100)");
  cover->add_option("--out", c_out, "write the partition JSON to this file");

  // verify-cover
  auto* vcover = app.add_subcommand("verify-cover", "verify a covering partition file");
  std::string vc_in;
  vcover->add_option("--in", vc_in, "partition JSON file")->required();

  // verify-code
  auto* vcode = app.add_subcommand("verify-code", "brute-force check of the perfect k-hash property");
  int vk_k = 3;
  std::string vk_file;
  vcode->add_option("--k", vk_k, "alphabet size")->required();
  vcode->add_option("file", vk_file, "code file (one word per line)")->required();

  // hansel
  auto* hansel = app.add_subcommand("hansel", "tau accounting for the anchored bipartite graphs of a code");
  int h_k = 3;
  long h_max_sets = 10000;
  std::string h_file;
  hansel->add_option("--k", h_k, "alphabet size")->required();
  hansel->add_option("--max-anchor-sets", h_max_sets, "exhaustive up to this many anchor sets, sampled beyond");
  hansel->add_option("file", h_file, "code file")->required();

  // constrained
  auto* constrained = app.add_subcommand("constrained", "max of psi(g,f) with f pinned at the gamma floor");
  int cn_k = 5;
  double cn_gamma = 0.0;
  int cn_grid = 1000;
  constrained->add_option("--k", cn_k)->required();
  constrained->add_option("--gamma", cn_gamma, "floor for the f entries, in [0, 1/k]")->required();
  constrained->add_option("--grid", cn_grid, "grid steps (>= 100)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (maxpsi->parsed()) {
    const phk::MaxResult r = phk::compute_Mk(mp_k, mp_grid);
    if (json) {
      std::printf("%s\n", max_result_json(mp_k, r).c_str());
    } else {
      std::printf("M_%d = %.17g at family %s, params %s, method %s\n", mp_k, r.value,
                  r.family.c_str(), phk::json_num_array(r.params).c_str(),
                  phk::method_name(r.method));
      if (!r.certified)
        std::printf("case-list maximum; global optimality is not certified for k > 6\n");
    }
    return kExitOk;
  }

  if (gcheck->parsed()) {
    phk::Rng rng(seed);
    const phk::GlobalCheckReport rep = phk::global_check(gc_k, gc_samples, rng, gc_threads);
    if (json) {
      std::printf("{\"k\":%d,\"samples\":%ld,\"seed\":%llu,\"max_found\":%s,\"case_list_max\":%s,"
                  "\"exceeded\":%s}\n",
                  gc_k, gc_samples, static_cast<unsigned long long>(seed),
                  phk::json_num(rep.max_found).c_str(), phk::json_num(rep.case_list_max).c_str(),
                  phk::json_bool(rep.exceeded).c_str());
    } else {
      std::printf("best of %ld ascents: %.17g (case-list maximum %.17g)\n", gc_samples,
                  rep.max_found, rep.case_list_max);
      std::printf(rep.exceeded ? "EXCEEDED: the case-list maximum is not global\n"
                               : "ok: no start exceeded the case-list maximum\n");
    }
    return rep.exceeded ? kExitVerdictFail : kExitOk;
  }

  if (bound->parsed()) {
    const phk::BoundReport r = phk::bound_report(b_k);
    if (json)
      std::printf("%s\n", bound_json(r).c_str());
    else
      print_bound_text(r);
    return kExitOk;
  }

  if (table->parsed()) {
    const std::vector<phk::BoundReport> rows = phk::table_report(t_kmin, t_kmax);
    if (json) {
      std::string out = "{\"rows\":[";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i) out += ",";
        out += bound_json(rows[i]);
      }
      out += "]";
      if (t_lit) {
        out += ",\"literature_reference\":{\"label\":\"from the literature, not computed\",\"rows\":[";
        bool first = true;
        for (const auto& lr : phk::literature_bounds()) {
          if (lr.k < t_kmin || lr.k > t_kmax) continue;
          if (!first) out += ",";
          first = false;
          out += "{\"k\":" + std::to_string(lr.k) + ",\"value\":" + phk::json_num(lr.value) + "}";
        }
        out += "]}";
      }
      out += "}";
      std::printf("%s\n", out.c_str());
    } else {
      std::printf("%-3s %-12s %-12s %-12s %s\n", "k", "fk_bound", "M_k", "new_bound", "certified");
      for (const auto& r : rows)
        std::printf("%-3d %-12.5f %-12.5f %-12.5f %s\n", r.k, phk::round_up(r.fk_bound, 5),
                    phk::round_up(r.M_k, 5), phk::round_up(r.new_bound, 5),
                    r.certified ? "yes" : "no");
      std::printf("(values rounded upward at the 5th decimal; exact values via --json)\n");
      if (t_kmin <= 6 && 6 <= t_kmax)
        std::printf("note: the exact k=6 bound lies between 0.0875 (truncated) and 0.0876 "
                    "(rounded up)\n");
      if (t_lit) {
        std::printf("reference bounds (from the literature, not computed):\n");
        for (const auto& lr : phk::literature_bounds())
          if (lr.k >= t_kmin && lr.k <= t_kmax) std::printf("%-3d %-12.6f\n", lr.k, lr.value);
      }
    }
    return kExitOk;
  }

  if (cover->parsed()) {
    phk::Rng rng(seed);
    const auto part = phk::build_cover(c_k, c_len, c_eps, rng, c_attempts);
    if (!part) {
      std::fprintf(stderr,
                   "coverage not achieved in %d attempts (h=%llu); consider a larger --eps or "
                   "more --attempts\n",
                   c_attempts, static_cast<unsigned long long>(phk::cover_block_bound(c_k, c_len, c_eps)));
      return kExitVerdictFail;
    }
    const std::string js = phk::cover_to_json(*part);
    if (!c_out.empty()) {
      std::ofstream out(c_out, std::ios::binary);
      if (!out) throw std::invalid_argument("cannot write file: " + c_out);
      out << js << "\n";
    }
    if (json)
      std::printf("%s\n", js.c_str());
    else
      std::printf("built cover: k=%d len=%d eps=%.17g h=%llu blocks=%zu%s%s\n", c_k, c_len, c_eps,
                  static_cast<unsigned long long>(part->h), part->blocks.size(),
                  c_out.empty() ? "" : " -> ", c_out.c_str());
    return kExitOk;
  }

  if (vcover->parsed()) {
    const phk::CoverPartition part = phk::cover_from_json(read_file(vc_in));
    const phk::Verdict sv = phk::verify_partition(part);
    bool collision_checked = false;
    phk::Verdict cv;
    if (sv.ok) {
      const int tuple = part.k - 2;
      for (const auto& b : part.blocks)
        if (static_cast<int>(b.size()) >= tuple) {
          collision_checked = true;
          break;
        }
      if (collision_checked) cv = phk::collision_check_exhaustive(part);
    }
    const bool ok = sv.ok && cv.ok;
    if (json) {
      std::string out = "{\"ok\":" + std::string(phk::json_bool(ok)) + ",\"violations\":[";
      bool first = true;
      for (const auto& lst : {sv.violations, cv.violations})
        for (const auto& viol : lst) {
          if (!first) out += ",";
          first = false;
          out += phk::json_str(viol);
        }
      out += "],\"collision_checked\":" + std::string(phk::json_bool(collision_checked)) + "}";
      std::printf("%s\n", out.c_str());
    } else {
      for (const auto& viol : sv.violations) std::printf("violation: %s\n", viol.c_str());
      for (const auto& viol : cv.violations) std::printf("violation: %s\n", viol.c_str());
      std::printf("%s (blocks=%zu%s)\n", ok ? "ok" : "FAILED", part.blocks.size(),
                  collision_checked ? ", collision check exhaustive" : ", collision check skipped: all blocks smaller than k-2");
    }
    return ok ? kExitOk : kExitVerdictFail;
  }

  if (vcode->parsed()) {
    const phk::Code code = phk::parse_code(read_file(vk_file), vk_k);
    const phk::HashVerdict v = phk::is_k_hash(code);
    if (json) {
      std::string out = "{\"ok\":" + std::string(phk::json_bool(v.ok));
      if (!v.ok) {
        out += ",\"witness\":[";
        for (std::size_t i = 0; i < v.witness.size(); ++i) {
          if (i) out += ",";
          out += phk::json_str(code.word_string(v.witness[static_cast<std::size_t>(i)]));
        }
        out += "]";
      }
      out += "}";
      std::printf("%s\n", out.c_str());
    } else if (v.ok) {
      std::printf("ok: %d words of length %d form a perfect %d-hash code (rate %.6f)\n",
                  code.size(), code.n, vk_k, code.rate());
    } else {
      std::printf("FAILED: no coordinate separates these %d words:\n", vk_k);
      for (int id : v.witness) std::printf("  %s\n", code.word_string(id).c_str());
    }
    return v.ok ? kExitOk : kExitVerdictFail;
  }

  if (hansel->parsed()) {
    const phk::Code code = phk::parse_code(read_file(h_file), h_k);
    const phk::HashVerdict hv = phk::is_k_hash(code);
    if (!hv.ok) {
      if (json) {
        std::string out = "{\"ok\":false,\"error\":\"not a perfect k-hash code\",\"witness\":[";
        for (std::size_t i = 0; i < hv.witness.size(); ++i) {
          if (i) out += ",";
          out += phk::json_str(code.word_string(hv.witness[i]));
        }
        out += "]}";
        std::printf("%s\n", out.c_str());
      } else {
        std::printf("FAILED: input is not a perfect %d-hash code; witness:\n", h_k);
        for (int id : hv.witness) std::printf("  %s\n", code.word_string(id).c_str());
      }
      return kExitVerdictFail;
    }
    const int anchors = h_k - 2;
    double total_sets = 1.0;
    for (int i = 0; i < anchors; ++i) total_sets = total_sets * (code.size() - i) / (i + 1);
    const bool exhaustive = total_sets <= static_cast<double>(h_max_sets);
    double min_slack = 1e300;
    double min_tau_sum = 0.0, threshold = 0.0;
    long sets_checked = 0;
    auto check_set = [&](const std::vector<int>& ids) {
      std::vector<phk::HanselGraph> graphs;
      graphs.reserve(static_cast<std::size_t>(code.n));
      for (int i = 1; i <= code.n; ++i) graphs.push_back(phk::hansel_graph(code, ids, i));
      const phk::HanselCheckResult res = phk::hansel_check(graphs);
      const double slack = res.tau_sum - res.threshold;
      if (slack < min_slack) {
        min_slack = slack;
        min_tau_sum = res.tau_sum;
        threshold = res.threshold;
      }
      ++sets_checked;
    };
    if (exhaustive) {
      std::vector<int> c(static_cast<std::size_t>(anchors));
      for (int j = 0; j < anchors; ++j) c[static_cast<std::size_t>(j)] = j;
      for (;;) {
        check_set(c);
        int j = anchors - 1;
        while (j >= 0 && c[static_cast<std::size_t>(j)] == code.size() - anchors + j) --j;
        if (j < 0) break;
        ++c[static_cast<std::size_t>(j)];
        for (int t = j + 1; t < anchors; ++t) c[static_cast<std::size_t>(t)] = c[static_cast<std::size_t>(t - 1)] + 1;
      }
    } else {
      phk::Rng rng(seed);
      for (long s = 0; s < h_max_sets; ++s) {
        std::vector<int> ids;
        while (static_cast<int>(ids.size()) < anchors) {
          const int cand = rng.below_int(code.size());
          if (std::find(ids.begin(), ids.end(), cand) == ids.end()) ids.push_back(cand);
        }
        std::sort(ids.begin(), ids.end());
        check_set(ids);
      }
    }
    const bool ok = min_slack >= -1e-9;
    if (json) {
      std::printf("{\"ok\":%s,\"k\":%d,\"n\":%d,\"size\":%d,\"rate\":%s,\"anchor_sets\":%ld,"
                  "\"exhaustive\":%s,\"min_tau_sum\":%s,\"threshold\":%s}\n",
                  phk::json_bool(ok).c_str(), h_k, code.n, code.size(),
                  phk::json_num(code.rate()).c_str(), sets_checked,
                  phk::json_bool(exhaustive).c_str(), phk::json_num(min_tau_sum).c_str(),
                  phk::json_num(threshold).c_str());
    } else {
      std::printf("%ld anchor set(s) checked (%s); min sum of tau = %.12f >= log2(%d) = %.12f: %s\n",
                  sets_checked, exhaustive ? "exhaustive" : "sampled", min_tau_sum,
                  code.size() - h_k + 2, threshold, ok ? "ok" : "VIOLATED");
    }
    return ok ? kExitOk : kExitVerdictFail;
  }

  if (constrained->parsed()) {
    const phk::MaxResult r = phk::constrained_psi_max(cn_k, cn_gamma, cn_grid);
    if (json) {
      std::printf("{\"k\":%d,\"gamma\":%s,\"value\":%s,\"beta\":%s,\"g\":%s,\"f\":%s}\n", cn_k,
                  phk::json_num(cn_gamma).c_str(), phk::json_num(r.value).c_str(),
                  phk::json_num(r.params[0]).c_str(), vec_json(r.argmax_p).c_str(),
                  vec_json(r.argmax_q).c_str());
    } else {
      std::printf("max psi(g,f) = %.17g at beta = %.17g (f pinned by gamma = %.17g)\n", r.value,
                  r.params[0], cn_gamma);
    }
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}
