// Acceptance suite. Each criterion prints one line:
//   PASS|FAIL|BLOCKED  <id>  <details>
// Exit status: 1 if any selected criterion failed, 77 if none failed but some
// were blocked (missing dataset), 0 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "brute_force.hpp"
#include "ecfsfdp/evaluate.hpp"
#include "ecfsfdp/pipeline.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using namespace ecfsfdp;

namespace {

enum class Status { kPass, kFail, kBlocked };

struct Outcome {
  Status status = Status::kPass;
  std::string detail;
};

struct Context {
  fs::path data_dir;
  fs::path record_dir;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  return os.str();
}

bool close_rel(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::optional<PointSet> load_dataset(const Context& ctx, const std::string& file, bool labeled,
                                     Outcome& blocked) {
  const auto path = ctx.data_dir / file;
  if (!fs::exists(path)) {
    blocked = {Status::kBlocked, "dataset " + path.string() + " not found (see data/README.md)"};
    return std::nullopt;
  }
  LoadOptions opts;
  if (labeled) opts.label_column = -1;
  return load_points(path, opts);
}

// Tallies mismatches per quantity and keeps the first few messages.
class Ledger {
 public:
  void check(bool ok, const std::string& quantity, const std::string& where) {
    ++compared_[quantity];
    if (ok) return;
    ++failed_[quantity];
    if (notes_.size() < 3) notes_.push_back(quantity + " @ " + where);
  }
  bool clean() const { return failed_.empty(); }
  std::string summary() const {
    std::ostringstream os;
    std::size_t total = 0;
    for (auto& [q, c] : compared_) total += c;
    os << total << " comparisons";
    if (!failed_.empty()) {
      os << "; mismatches:";
      for (auto& [q, c] : failed_) os << ' ' << q << '=' << c;
      for (auto& n : notes_) os << "; first: " << n;
    }
    return os.str();
  }

 private:
  std::map<std::string, std::size_t> compared_, failed_;
  std::vector<std::string> notes_;
};

// ---------------------------------------------------------------------------

Outcome oracle_equivalence(const Context&) {
  const auto start = std::chrono::steady_clock::now();
  Ledger ledger;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::size_t n = 60 + (s * 37) % 241;
    const double grid = s % 3 == 0 ? 0.5 : 0.0;  // every third set is tie-heavy
    const auto rows = fixtures::random_blobs(1000 + s, n, 2 + s % 5, grid);
    const std::string where = "dataset " + std::to_string(s);
    const double pct = 1.0 + static_cast<double>(s % 6);
    const std::size_t m = 2 + s % 9;
    const std::size_t nn = 3 + s % 12;
    const double beta = 0.5 * static_cast<double>(1 + s % 8);

    Session session(PointSet::from_rows(rows));
    const auto& dm = session.distances();
    const auto d = oracle::distances(rows);

    const std::size_t target = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(pct * static_cast<double>(n) / 100.0 - 1e-9)));
    const double dc = session.resolve(DcSpec::max_rho_percent(pct));
    const auto want_dc = oracle::max_rho_dc(d, target);
    ledger.check(want_dc && *want_dc == dc, "dc", where);

    const auto& prof = session.profile(dc);
    const auto rho = oracle::rho(d, dc);
    const auto dp = oracle::delta_parent(d, rho);
    for (std::size_t i = 0; i < n; ++i) {
      ledger.check(prof.rho[i] == rho[i], "rho", where);
      ledger.check(prof.delta[i] == dp.delta[i], "delta", where);
      const auto parent = prof.parent[i] == kNoParent ? oracle::kNone : prof.parent[i];
      ledger.check(parent == dp.parent[i], "parent", where);
    }

    const auto graph = decision_graph(prof);
    const auto gamma = oracle::gamma(rho, dp.delta);
    for (std::size_t i = 0; i < n; ++i) ledger.check(close_rel(graph[i].gamma, gamma[i]), "gamma", where);
    const auto centers = select_centers_auto(graph, m);
    const auto want_centers = oracle::top_gamma(gamma, m);
    auto sorted_centers = want_centers;
    std::sort(sorted_centers.begin(), sorted_centers.end());
    ledger.check(centers.indices() == sorted_centers, "centers", where);  // stored ascending

    const auto labeling = assign(prof, centers, dm);
    const auto to = oracle::assign_to_centers(
        d, dp, std::set<std::size_t>(want_centers.begin(), want_centers.end()));
    ledger.check(oracle::partition(labeling.label) == oracle::partition(to), "assignment", where);

    const auto g = session.graph(nn);
    const auto knn = oracle::knn(d, nn);
    for (std::size_t i = 0; i < n; ++i) {
      bool same = g.neighbors(i).size() == knn[i].size();
      for (std::size_t r = 0; same && r < knn[i].size(); ++r)
        same = g.neighbors(i)[r].index == knn[i][r];
      ledger.check(same, "knn", where);
    }

    const auto members = labeling.members();
    std::vector<oracle::Agg> want_inner;
    std::vector<EdgeAggregate> inner;
    for (const auto& mem : members) {
      want_inner.push_back(oracle::inner(d, knn, mem, dc));
      inner.push_back(mem.size() < 2 ? EdgeAggregate{}
                                     : internal_aggregate(mem, g, bisect_cluster(mem, dm, dc)));
    }
    for (ClusterId a = 0; a < static_cast<ClusterId>(members.size()); ++a) {
      for (ClusterId b = a + 1; b < static_cast<ClusterId>(members.size()); ++b) {
        const auto edges = mutual_cross_edges(g, labeling, a, b);
        const auto want = oracle::cross_edges(d, knn, members[a], members[b]);
        bool same = edges.size() == want.size();
        for (std::size_t e = 0; same && e < want.size(); ++e)
          same = edges[e].u == want[e].u && edges[e].v == want[e].v &&
                 close_rel(edges[e].weight, want[e].w);
        ledger.check(same, "cross-edges", where);

        const auto c = pair_criteria(aggregate(edges), inner[a], inner[b], members[a].size(),
                                     members[b].size(), beta);
        const auto w = oracle::criteria(oracle::agg(want), want_inner[a], want_inner[b],
                                        members[a].size(), members[b].size(), beta);
        ledger.check(close_rel(c.ri, w.ri), "RI", where);
        ledger.check(close_rel(c.rc, w.rc), "RC", where);
        ledger.check(close_rel(c.score, w.score), "score", where);
      }
    }

    const auto trace = merge_loop(labeling, g, dm, {dc, beta, Termination::target_count(1)});
    const auto steps = oracle::merge_steps(d, knn, fixtures::as_int(labeling.label), dc, beta, 1);
    ledger.check(trace.steps.size() == steps.size(), "merge-steps", where);
    for (std::size_t t = 0; t < std::min(trace.steps.size(), steps.size()); ++t) {
      const auto& a = trace.steps[t];
      const auto& b = steps[t];
      ledger.check(a.a == b.a && a.b == b.b && a.fallback == b.fallback, "merge-argmax",
                   where + " step " + std::to_string(t));
      ledger.check(close_rel(a.score, b.crit.score) && close_rel(a.ri, b.crit.ri) &&
                       close_rel(a.rc, b.crit.rc),
                   "merge-criteria", where + " step " + std::to_string(t));
    }
  }
  return {ledger.clean() ? Status::kPass : Status::kFail,
          "50 datasets, " + ledger.summary() + ", " + fmt(seconds_since(start), 1) + "s"};
}

// ---------------------------------------------------------------------------

Outcome jain_grid(const Context& ctx) {
  Outcome blocked;
  auto points = load_dataset(ctx, "jain.txt", true, blocked);
  if (!points) return blocked;
  const auto start = std::chrono::steady_clock::now();
  Session session(std::move(*points));

  std::size_t combos = 0, strong = 0, weak = 0;
  double worst = 1.0;
  std::string worst_at;
  for (double dc : {4.0, 5.0, 6.0}) {
    for (std::size_t nn : {5, 10, 15}) {
      for (double beta : {1.0, 2.0, 3.0, 4.0, 5.0}) {
        RunParams p;
        p.dc = DcSpec::max_rho_percent(dc);
        p.n_neighbor = nn;
        p.beta = beta;
        p.termination = Termination::target_count(2);
        const auto r = session.run(p);
        const auto rep = evaluate(r.trace.final.label, session.points().truth());
        ++combos;
        const bool two = r.trace.final.clusters == 2;
        if (two && rep.accuracy >= 0.98) ++strong;
        if (two && rep.accuracy >= 0.90) ++weak;
        if (!two || rep.accuracy < worst) {
          worst = two ? rep.accuracy : 0.0;
          worst_at = "dc " + fmt(dc, 0) + "% nn " + std::to_string(nn) + " beta " + fmt(beta, 0);
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  const bool all = strong == combos;
  const bool fallback = strong * 5 >= combos * 4 && weak == combos;
  std::string detail = std::to_string(strong) + "/" + std::to_string(combos) +
                       " combinations at accuracy >= 0.98, worst " + fmt(worst, 4) + " (" +
                       worst_at + "), " + fmt(elapsed, 1) + "s";
  if (!all && fallback) detail += "; passes on the >= 80% / all >= 0.90 rule";
  return {(all || fallback) && elapsed < 60.0 ? Status::kPass : Status::kFail, detail};
}

Outcome jain_baseline(const Context& ctx) {
  Outcome blocked;
  auto points = load_dataset(ctx, "jain.txt", true, blocked);
  if (!points) return blocked;
  Session session(std::move(*points));
  CenterChoice top2;
  top2.auto_count = 2;

  bool ok = true;
  std::string detail;
  auto probe = [&](double pct, bool expect_success) {
    const double dc = session.resolve(DcSpec::max_rho_percent(pct));
    const auto p = session.phase_one(dc, top2, 2);
    const double acc = evaluate(p.labeling.label, session.points().truth()).accuracy;
    const bool good = expect_success ? acc >= 0.98 : acc < 0.95;
    ok = ok && good;
    detail += (detail.empty() ? "" : ", ") + fmt(pct, 0) + "%: " + fmt(acc, 4) +
              (good ? "" : " (unexpected)");
  };
  for (double pct : {1.0, 2.0, 10.0}) probe(pct, false);
  for (double pct : {40.0, 45.0}) probe(pct, true);
  return {ok ? Status::kPass : Status::kFail, "plain CFSFDP accuracy " + detail};
}

// ---------------------------------------------------------------------------

Outcome chang_grid(const Context& ctx) {
  Outcome blocked;
  auto points = load_dataset(ctx, "pathbased.txt", true, blocked);
  if (!points) return blocked;
  const auto start = std::chrono::steady_clock::now();
  Session session(std::move(*points));

  std::size_t perfect = 0, runs = 0;
  double best = -1.0;
  std::string winner, best_at;
  for (int dc = 1; dc <= 10; ++dc) {
    for (std::size_t nn = 5; nn <= 20; ++nn) {
      for (int b2 = 1; b2 <= 10; ++b2) {
        RunParams p;
        p.dc = DcSpec::max_rho_percent(dc);
        p.n_neighbor = nn;
        p.beta = 0.5 * b2;
        p.termination = Termination::target_count(3);
        const auto r = session.run(p);
        const double acc = evaluate(r.trace.final.label, session.points().truth()).accuracy;
        ++runs;
        const std::string at = "--dc " + std::to_string(dc) + "% -n " + std::to_string(nn) +
                               " --beta " + fmt(p.beta, 1) + " -k 3";
        if (acc > best) {
          best = acc;
          best_at = at;
        }
        if (acc == 1.0 && perfect++ == 0) winner = at;
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (perfect == 0)
    return {Status::kFail, "no configuration reaches accuracy 1.0 over " + std::to_string(runs) +
                               " runs; best " + fmt(best, 4) + " at " + best_at};

  const auto record = ctx.record_dir / "chang_winner.txt";
  std::ofstream(record) << "ecfsfdp cluster -i pathbased.txt --label-column -1 " << winner
                        << "\n# " << perfect << " of " << runs
                        << " grid configurations reach accuracy 1.0\n";
  return {Status::kPass, "first perfect configuration: " + winner + " (" +
                             std::to_string(perfect) + "/" + std::to_string(runs) +
                             " perfect, recorded in " + record.string() + ", " +
                             fmt(elapsed, 1) + "s)"};
}

// ---------------------------------------------------------------------------

Outcome chameleon(const Context& ctx, const std::string& file, std::size_t k) {
  Outcome blocked;
  auto points = load_dataset(ctx, file, false, blocked);
  if (!points) return blocked;
  const std::size_t n = points->size();
  const std::size_t min_size = static_cast<std::size_t>(std::ceil(0.005 * static_cast<double>(n)));

  std::vector<std::vector<ClusterId>> first_pass;
  std::string problems;
  double slowest = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    // A fresh session per pass, so the rerun recomputes everything.
    const auto built = std::chrono::steady_clock::now();
    Session session(*points);
    const double setup = seconds_since(built);
    std::size_t run = 0;
    for (double dc : {1.0, 2.0, 3.0}) {
      for (std::size_t nn : {30, 35, 40}) {
        RunParams p;
        p.dc = DcSpec::max_rho_percent(dc);
        p.n_neighbor = nn;
        p.termination = Termination::target_count(k);
        const auto start = std::chrono::steady_clock::now();
        const auto r = session.run(p);
        const double elapsed = seconds_since(start) + setup;
        slowest = std::max(slowest, elapsed);
        const std::string at = "dc " + fmt(dc, 0) + "% nn " + std::to_string(nn);
        const auto& labels = r.trace.final.label;
        if (pass == 0) {
          first_pass.push_back(labels);
          std::vector<std::size_t> sizes(r.trace.final.clusters, 0);
          for (auto l : labels) ++sizes[static_cast<std::size_t>(l)];
          if (r.trace.final.clusters != k)
            problems += "; " + at + ": " + std::to_string(r.trace.final.clusters) + " clusters";
          else if (*std::min_element(sizes.begin(), sizes.end()) < min_size)
            problems += "; " + at + ": smallest cluster " +
                        std::to_string(*std::min_element(sizes.begin(), sizes.end())) +
                        " < " + std::to_string(min_size);
          if (elapsed >= 300.0) problems += "; " + at + ": " + fmt(elapsed, 1) + "s";
        } else if (labels != first_pass[run]) {
          problems += "; " + at + ": rerun differs";
        }
        ++run;
      }
    }
  }
  const std::string detail = file + " (n " + std::to_string(n) + ", k " + std::to_string(k) +
                             "), 9 configurations x 2 runs, slowest " + fmt(slowest, 1) + "s";
  if (!problems.empty()) return {Status::kFail, detail + problems};
  return {Status::kPass, detail + ", all exactly k clusters >= " + std::to_string(min_size) +
                             " points, reruns identical"};
}

// ---------------------------------------------------------------------------

Outcome properties(const Context&) {
  Ledger ledger;
  std::mt19937_64 rng(31);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::string where = "dataset " + std::to_string(s);
    const auto rows = fixtures::random_blobs(500 + s, 120 + 9 * s, 3 + s % 3, s % 2 ? 0.0 : 0.5);
    const std::size_t n = rows.size();
    Session session(PointSet::from_rows(rows));
    const auto& dm = session.distances();
    const double dc = session.resolve(DcSpec::max_rho_percent(3.0 + static_cast<double>(s % 4)));
    const auto& prof = session.profile(dc);

    // Density parents form a single tree rooted at the first point of the order,
    // and every parent chain reaches that root within n hops.
    std::size_t roots = 0;
    bool forest = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (prof.parent[i] == kNoParent) {
        ++roots;
        forest = forest && i == prof.order.front();
        continue;
      }
      const auto p = prof.parent[i];
      forest = forest && (prof.rho[p] > prof.rho[i] || (prof.rho[p] == prof.rho[i] && p < i));
      std::size_t hops = 0, at = i;
      while (prof.parent[at] != kNoParent && hops <= n) at = prof.parent[at], ++hops;
      forest = forest && hops <= n && at == prof.order.front();
    }
    ledger.check(forest && roots == 1, "parent-forest", where);

    // Single-pass assignment writes every label exactly once.
    const std::size_t m = 4 + s % 8;
    AssignStats stats;
    const auto labeling = assign(prof, select_centers_auto(decision_graph(prof), m), dm, &stats);
    ledger.check(stats.label_writes == n, "assign-writes", where);
    ledger.check(labeling.clusters == m, "assign-clusters", where);

    // Merging m clusters down to k takes exactly m - k steps.
    const auto g = session.graph(5 + s % 10);
    const std::size_t k = 1 + s % std::min<std::size_t>(m, 4);
    const auto trace = merge_loop(labeling, g, dm, {dc, 1.0 + s % 3, Termination::target_count(k)});
    bool counts = trace.steps.size() == m - k && trace.final.clusters == k;
    for (std::size_t t = 0; counts && t < trace.steps.size(); ++t)
      counts = trace.steps[t].clusters_after == m - t - 1 &&
               oracle::partition(labels_after(trace, t + 1)).size() == m - t - 1;
    ledger.check(counts, "merge-count", where);

    // Pair criteria and cross edges do not depend on argument order.
    const auto members = labeling.members();
    for (ClusterId a = 0; a < static_cast<ClusterId>(m); ++a) {
      for (ClusterId b = a + 1; b < static_cast<ClusterId>(m); ++b) {
        const auto ab = mutual_cross_edges(g, labeling, a, b);
        const auto ba = mutual_cross_edges(g, labeling, b, a);
        const EdgeAggregate ia{1.0 + a, 2, (1.0 + a) / 2}, ib{0.5 + b, 3, (0.5 + b) / 3};
        const auto x = pair_criteria(aggregate(ab), ia, ib, members[a].size(), members[b].size(), 2.0);
        const auto y = pair_criteria(aggregate(ba), ib, ia, members[b].size(), members[a].size(), 2.0);
        ledger.check(ab == ba && x.ri == y.ri && x.rc == y.rc && x.score == y.score,
                     "score-symmetry", where);
      }
    }

    // Relabeling points keeps the Phase I partition when equal-density points
    // keep their relative order (ties are keyed on index). Continuous sets only.
    if (s % 2) {
      std::vector<std::size_t> slot(n);
      std::iota(slot.begin(), slot.end(), std::size_t{0});
      std::shuffle(slot.begin(), slot.end(), rng);
      std::map<std::uint32_t, std::vector<std::size_t>> slots_of;
      for (std::size_t i = 0; i < n; ++i) slots_of[prof.rho[i]].push_back(slot[i]);
      for (auto& [r, v] : slots_of) std::sort(v.begin(), v.end());
      std::map<std::uint32_t, std::size_t> used;
      for (std::size_t i = 0; i < n; ++i) slot[i] = slots_of[prof.rho[i]][used[prof.rho[i]]++];
      fixtures::Rows shuffled(n);
      for (std::size_t i = 0; i < n; ++i) shuffled[slot[i]] = rows[i];

      CenterChoice choice;
      choice.auto_count = m;
      Session other(PointSet::from_rows(shuffled));
      const auto la = session.phase_one(dc, choice, 2).labeling;
      const auto lb = other.phase_one(dc, choice, 2).labeling;
      std::vector<ClusterId> back(n);
      for (std::size_t i = 0; i < n; ++i) back[i] = lb.label[slot[i]];
      ledger.check(oracle::partition(la.label) == oracle::partition(back), "permutation", where);
    }
  }
  return {ledger.clean() ? Status::kPass : Status::kFail, "20 datasets, " + ledger.summary()};
}

// ---------------------------------------------------------------------------

Outcome complexity(const Context&) {
  auto phase_one_seconds = [](std::size_t n) {
    const auto rows = fixtures::random_blobs(77, n, 6);
    double best = 1e300;
    for (int rep = 0; rep < 5; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      Session session(PointSet::from_rows(rows));
      const double dc = session.resolve(DcSpec::max_rho_percent(2.0));
      const auto p = session.phase_one(dc, CenterChoice{}, 2);
      best = std::min(best, seconds_since(start));
      if (p.labeling.size() != n) return -1.0;
    }
    return best;
  };
  const double t2 = phase_one_seconds(2000);
  const double t4 = phase_one_seconds(4000);
  const double ratio = t4 / t2;
  const bool ok = t2 > 0 && t4 > 0 && ratio >= 3.0 && ratio <= 6.0;
  return {ok ? Status::kPass : Status::kFail, "Phase I best of 5: n=2000 " + fmt(t2) +
                                                  "s, n=4000 " + fmt(t4) + "s, ratio " +
                                                  fmt(ratio, 2) + " (want 3..6)"};
}

struct Criterion {
  std::string id;
  std::function<Outcome(const Context&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"oracle-equivalence", oracle_equivalence},
      {"jain-grid", jain_grid},
      {"jain-baseline", jain_baseline},
      {"chang-grid", chang_grid},
      {"chameleon-1", [](const Context& c) { return chameleon(c, "t4.8k.dat", 6); }},
      {"chameleon-2", [](const Context& c) { return chameleon(c, "t7.10k.dat", 9); }},
      {"properties", properties},
      {"complexity", complexity},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ecfsfdp acceptance suite"};
  std::vector<std::string> selected;
  Context ctx;
  std::string data_dir;
  if (const char* env = std::getenv("ECFSFDP_DATA_DIR")) data_dir = env;
#ifdef ECFSFDP_DEFAULT_DATA_DIR
  if (data_dir.empty()) data_dir = ECFSFDP_DEFAULT_DATA_DIR;
#endif
  std::string record_dir;
  bool list = false;
  app.add_option("criteria", selected, "Criteria to run (default: all)");
  app.add_option("--data-dir", data_dir, "Directory holding the benchmark datasets");
  app.add_option("--record-dir", record_dir, "Where to write results (default: data dir)");
  app.add_flag("--list", list, "List criterion ids");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& c : criteria()) std::cout << c.id << '\n';
    return 0;
  }
  ctx.data_dir = data_dir.empty() ? fs::path("data") : fs::path(data_dir);
  ctx.record_dir = record_dir.empty() ? ctx.data_dir : fs::path(record_dir);

  std::vector<const Criterion*> to_run;
  for (const auto& c : criteria())
    if (selected.empty() || std::find(selected.begin(), selected.end(), c.id) != selected.end())
      to_run.push_back(&c);
  for (const auto& s : selected)
    if (std::none_of(criteria().begin(), criteria().end(), [&](auto& c) { return c.id == s; })) {
      std::cerr << "unknown criterion '" << s << "' (try --list)\n";
      return 2;
    }

  bool failed = false, blocked = false;
  for (const auto* c : to_run) {
    Outcome o;
    try {
      o = c->run(ctx);
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("error: ") + e.what()};
    }
    const char* tag = o.status == Status::kPass ? "PASS   " : o.status == Status::kFail ? "FAIL   " : "BLOCKED";
    std::cout << tag << "  " << c->id << "  " << o.detail << std::endl;
    failed = failed || o.status == Status::kFail;
    blocked = blocked || o.status == Status::kBlocked;
  }
  if (failed) return 1;
  return blocked ? 77 : 0;
}
