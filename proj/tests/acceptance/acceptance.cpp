// Acceptance run: one [PASS]/[FAIL] line per criterion, exit status 1 if any
// criterion fails. Every tolerance and budget is a named constant below.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "infgrowth/bottom_up.hpp"
#include "infgrowth/harness.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/random_kb.hpp"

using namespace infgrowth;
namespace fs = std::filesystem;

namespace {

constexpr int kOracleKbs = 200;
constexpr double kOracleBudgetS = 60.0;
constexpr int kModel1Samples = 1000;
constexpr double kAlphaRelTol = 1e-12;
constexpr int kAlphaTrials = 100;
constexpr double kSweepBudgetS = 600.0;
constexpr int kSchedules = 20;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_err(double got, double want) { return want == 0 ? std::abs(got) : std::abs(got - want) / std::abs(want); }

std::set<Symbol> as_set(const std::vector<Symbol>& v) { return {v.begin(), v.end()}; }

// ---------------------------------------------------------------------------
// 1. Backchaining with depth limit = rule count against the naive fixpoint.
// ---------------------------------------------------------------------------
Outcome engine_oracle() {
  Outcome out;
  auto t0 = Clock::now();
  std::size_t queries = 0, mismatched = 0, kbs_with_mismatch = 0, bounded_mismatch = 0;
  std::string first;
  for (std::uint64_t seed = 1; seed <= kOracleKbs; ++seed) {
    auto g = gen::random_small_kb(seed);
    const int depth = static_cast<int>(g.axioms.size());
    auto full = oracle::fixpoint(g.facts, g.axioms.clauses(), true);
    auto bounded = oracle::fixpoint(g.facts, g.axioms.clauses(), true, depth);
    Prover prover(g.kb, g.axioms, {depth, true});
    bool any = false;
    for (const auto& q : g.queries) {
      ++queries;
      auto got = as_set(prover.ask(q));
      if (got != oracle::answers(full, q.atom)) {
        ++mismatched;
        any = true;
        if (first.empty()) first = "seed " + std::to_string(seed) + " " + q.atom.to_string();
      }
      if (got != oracle::answers(bounded, q.atom)) ++bounded_mismatch;
    }
    kbs_with_mismatch += any;
  }
  double secs = seconds_since(t0);
  std::ostringstream s;
  s << kOracleKbs << " KBs, " << queries << " queries, " << mismatched << " mismatches vs fixpoint ("
    << kbs_with_mismatch << " KBs), " << bounded_mismatch << " vs depth-bounded fixpoint, " << secs << " s";
  if (!first.empty()) s << "; first: " << first;
  out.pass = mismatched == 0 && bounded_mismatch == 0 && secs < kOracleBudgetS;
  out.detail = s.str();
  return out;
}

std::vector<std::shared_ptr<const AndOrGraph>> test_graphs() {
  std::vector<std::shared_ptr<const AndOrGraph>> out;
  out.push_back(fixtures::skewed_graph());
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto k = gen::random_layered_kb(seed);
    out.push_back(std::make_shared<const AndOrGraph>(build_graph(k.axioms, root_schemas(k.templates))));
  }
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    SynthConfig c;
    c.seed = seed;
    c.rule_skew = 1.2;
    auto r = synth_kb(c);
    const KnowledgeBase& kb = r.kb;
    GraphOptions opts;
    opts.head_predicates = [&kb](Symbol p) { return matching_predicates(kb, p, true); };
    out.push_back(std::make_shared<const AndOrGraph>(build_graph(r.axioms, root_schemas(r.templates), opts)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// 2. Model 1 degree bound.
// ---------------------------------------------------------------------------
Outcome model1_bound() {
  auto graphs = test_graphs();
  std::size_t samples = 0, violations = 0, nodes = 0;
  std::mt19937_64 seeds(2024);
  while (samples < kModel1Samples) {
    for (const auto& g : graphs) {
      if (samples >= kModel1Samples) break;
      const int k = 2 + static_cast<int>(samples % 6);
      Rng rng(seeds());
      auto s = model1_sample(g, k, rng);
      for (auto d : or_out_degrees(s)) {
        ++nodes;
        violations += d > static_cast<std::size_t>(k);
      }
      ++samples;
    }
  }
  std::ostringstream s;
  s << samples << " samples over " << graphs.size() << " graphs, k in [2,7], " << nodes << " node checks, "
    << violations << " violations";
  return {violations == 0, s.str()};
}

// ---------------------------------------------------------------------------
// 3. Model 2: beta=100 is the identity; otherwise ceil(beta*c/100) per node.
// ---------------------------------------------------------------------------
Outcome model2_identity_fraction() {
  auto graphs = test_graphs();
  std::size_t identity_fail = 0, fraction_checks = 0, fraction_fail = 0;
  std::uint64_t seed = 0;
  for (const auto& g : graphs) {
    Rng rng(++seed);
    auto s = model2_sample(g, 100, rng);
    bool ors = std::all_of(s.or_members().begin(), s.or_members().end(), [](bool b) { return b; });
    bool ands = std::all_of(s.and_members().begin(), s.and_members().end(), [](bool b) { return b; });
    identity_fail += !(ors && ands && s.or_count() == g->or_count() && s.and_count() == g->and_count());
    for (int beta : {10, 15, 20, 30, 40, 50, 75, 99}) {
      for (int rep = 0; rep < 5; ++rep) {
        Rng r2(++seed);
        auto sp = model2_sample(g, beta, r2);
        for (OrId u : sp.member_ors()) {
          const std::size_t c = g->or_nodes()[u].children.size();
          const std::size_t want = (static_cast<std::size_t>(beta) * c + 99) / 100;  // integer ceiling
          ++fraction_checks;
          fraction_fail += sp.children(u).size() != want;
        }
      }
    }
  }
  std::ostringstream s;
  s << graphs.size() << " graphs; identity failures " << identity_fail << "; " << fraction_checks
    << " node checks, " << fraction_fail << " off ceil(beta*c/100)";
  return {identity_fail == 0 && fraction_fail == 0, s.str()};
}

// ---------------------------------------------------------------------------
// 4. Alpha fixtures, additivity and monotonicity.
// ---------------------------------------------------------------------------
Outcome alpha_checks() {
  using fixtures::atom;
  const Symbol r = Symbol::intern("r"), p = Symbol::intern("p");
  std::vector<std::string> failed;

  {
    auto g = fixtures::skewed_graph();
    double a = alpha(induced_space(g, std::vector<OrId>{}), 5, KnowledgeBase({atom("r", {"a", "b"})})).alpha;
    if (rel_err(a, 0.0) > kAlphaRelTol) failed.push_back("empty M");
  }
  {
    GoalSchema roots[] = {{p, 1, 0}};
    auto g = std::make_shared<const AndOrGraph>(build_graph({}, roots));
    KnowledgeBase kb({atom("p", {"a"}), atom("p", {"b"}), atom("p", {"c"}), atom("p", {"d"})});
    if (rel_err(alpha(SearchSpace::full(g), 4, kb).alpha, 1.0) > kAlphaRelTol) failed.push_back("single root");
  }
  {
    AxiomSet ax;
    ax.add(atom("r", {"?x"}), {atom("m", {"?x"})});
    GoalSchema roots[] = {{r, 1, 0}};
    auto g = std::make_shared<const AndOrGraph>(build_graph(ax, roots));
    OrId m = g->roots()[0] == 0 ? 1 : 0;
    KnowledgeBase kb({atom("m", {"a"}), atom("m", {"b"})});
    if (g->or_count() != 2 || rel_err(alpha(induced_space(g, std::vector<OrId>{m}), 4, kb).alpha, 0.125) > kAlphaRelTol)
      failed.push_back("depth-1 member");
  }

  std::mt19937_64 rng(4);
  std::size_t additivity = 0, fact_mono = 0, member_mono = 0;
  for (int trial = 0; trial < kAlphaTrials; ++trial) {
    auto k = gen::random_layered_kb(1000 + static_cast<std::uint64_t>(trial));
    auto g = std::make_shared<const AndOrGraph>(build_graph(k.axioms, root_schemas(k.templates)));
    std::vector<OrId> left, right, all;
    for (OrId u = 0; u < g->or_count(); ++u) {
      if (rng() % 3 == 0) continue;
      (rng() % 2 ? left : right).push_back(u);
    }
    all = left;
    all.insert(all.end(), right.begin(), right.end());
    std::sort(all.begin(), all.end());
    const std::size_t q = 1 + rng() % 30;
    const double whole = alpha(induced_space(g, all), q, k.kb).alpha;
    const double parts = alpha(induced_space(g, left), q, k.kb).alpha + alpha(induced_space(g, right), q, k.kb).alpha;
    additivity += rel_err(parts, whole) > kAlphaRelTol;

    member_mono += alpha(induced_space(g, left), q, k.kb).alpha > whole;

    std::vector<Fact> extra;
    for (const auto& o : g->or_nodes()) {
      Atom a{o.schema.predicate, {}};
      for (std::uint32_t i = 0; i < o.schema.arity; ++i) a.args.push_back(Term::constant("x" + std::to_string(rng() % 7)));
      extra.push_back(std::move(a));
    }
    fact_mono += alpha(induced_space(g, all), q, k.kb.add_facts(extra)).alpha < whole;
  }
  std::ostringstream s;
  s << "fixtures " << (3 - failed.size()) << "/3 within " << kAlphaRelTol << "; " << kAlphaTrials
    << " trials: additivity failures " << additivity << ", fact-monotonicity " << fact_mono
    << ", member-monotonicity " << member_mono;
  for (const auto& f : failed) s << "; failed " << f;
  return {failed.empty() && additivity == 0 && fact_mono == 0 && member_mono == 0, s.str()};
}

// ---------------------------------------------------------------------------
// 5. Degeneracy detector on the bottleneck fixture.
// ---------------------------------------------------------------------------
Outcome degeneracy() {
  auto bad = fixtures::bottleneck(false);
  auto good = fixtures::bottleneck(true);
  GoalSchema roots[] = {bad.root};
  auto g = std::make_shared<const AndOrGraph>(build_graph(bad.axioms, roots));
  auto space = SearchSpace::full(g);
  auto p_bad = depth_profile(space, KnowledgeBase(bad.facts), bad.axioms);
  auto p_good = depth_profile(space, KnowledgeBase(good.facts), good.axioms);
  auto r_bad = detect_degenerate(p_bad);
  auto r_good = detect_degenerate(p_good);

  // Peak strictly below the root, then non-increasing toward depth 0, ending at 0.
  int peak_depth = 0;
  std::size_t peak = 0;
  for (auto [d, n] : p_bad)
    if (n > peak) peak = n, peak_depth = d;
  bool shape = peak_depth > 0 && p_bad[0] == 0;
  for (int d = 0; d < peak_depth; ++d) shape = shape && p_bad[d] <= p_bad[d + 1];

  std::ostringstream s;
  s << "bottleneck profile {";
  for (auto [d, n] : p_bad) s << d << ":" << n << " ";
  s << "} -> " << to_string(r_bad.kind) << "; satisfiable profile root " << p_good[0] << " -> "
    << to_string(r_good.kind);
  return {r_bad.kind == DetectorKind::kDegenerate && r_good.kind == DetectorKind::kNone && shape, s.str()};
}

// ---------------------------------------------------------------------------
// 6. Transition detector on logistic, linear and flat sweeps.
// ---------------------------------------------------------------------------
Outcome transition() {
  constexpr int kPoints = 10;
  constexpr double kTop = 0.6, kMid = 0.45, kWidth = 0.02;
  auto make_rows = [&](const std::function<double(double)>& curve, const std::string& model) {
    std::vector<SweepRow> rows;
    for (int i = 0; i < kPoints; ++i) {
      SweepRow r;
      r.model = model;
      r.param = 3;
      r.snapshot = static_cast<std::size_t>(i);
      r.alpha = 0.1 * i;
      r.queries = 1000;
      r.answered_fraction = curve(r.alpha);
      rows.push_back(r);
    }
    return rows;
  };
  auto logistic = make_rows([&](double a) { return kTop / (1 + std::exp(-(a - kMid) / kWidth)); }, "model1");
  auto linear = make_rows([&](double a) { return kTop * a / (0.1 * (kPoints - 1)); }, "model1");
  auto flat = make_rows([](double) { return 0.05; }, "model1");

  auto verdict = [](const std::vector<SweepRow>& rows) {
    auto series = detect_series(rows, {});
    for (const auto& s : series)
      if (!s.snapshot) return s.report;
    return DetectorReport{};
  };
  auto lr = verdict(logistic), nr = verdict(linear), fr = verdict(flat);
  std::ostringstream s;
  s << "logistic (range " << lr.transition.range << ") -> " << to_string(lr.kind) << "; linear ramp -> "
    << to_string(nr.kind) << "; flat -> " << to_string(fr.kind);
  return {lr.kind == DetectorKind::kTransition && lr.transition.range >= 0.2 && nr.kind == DetectorKind::kNone &&
              fr.kind == DetectorKind::kNone,
          s.str()};
}

// ---------------------------------------------------------------------------
// 7. End-to-end sweep on the skewed synthetic family.
// ---------------------------------------------------------------------------
Outcome end_to_end() {
  const fs::path config_path = fs::path(INFGROWTH_SOURCE_DIR) / "configs" / "skewed_family.json";
  const fs::path out_dir = fs::current_path() / "acceptance_sweep";
  auto config = ExperimentConfig::load(config_path);

  auto t0 = Clock::now();
  auto inputs = load_inputs(config);
  auto result = run_sweep(config, inputs);
  write_sweep_outputs(result, config, out_dir);
  const double secs = seconds_since(t0);

  auto second = run_sweep(config, load_inputs(config));
  const bool deterministic =
      emit_csv(result.rows) == emit_csv(second.rows) && detectors_json(result) == detectors_json(second);

  auto rows = parse_sweep_csv(read_text_file(out_dir / "sweep.csv"));
  const std::size_t expected =
      config.sizes.size() * (config.model1_k.size() + config.model2_beta.size()) * static_cast<std::size_t>(config.replicates);
  std::size_t flag_mismatch = 0;
  for (const auto& r : rows) flag_mismatch += r.threshold_hit != (r.answered_fraction >= config.theta);

  auto perf = performance_table(rows);
  const bool perf_shape = perf.size() == config.sizes.size() * (config.model1_k.size() + config.model2_beta.size());
  auto comparison = compare_models(rows, config.match_tolerance);
  const std::string cmp_csv = read_text_file(out_dir / "comparison.csv");
  const bool cmp_shape = !comparison.rows.empty() && cmp_csv.find("change_pct") != std::string::npos;

  std::ostringstream s;
  s << rows.size() << "/" << expected << " rows, " << result.errors.size() << " errors, first run " << secs
    << " s (budget " << kSweepBudgetS << "), rerun identical: " << (deterministic ? "yes" : "no")
    << ", performance rows " << perf.size() << ", comparison rows " << comparison.rows.size()
    << ", threshold flag mismatches " << flag_mismatch << "; outputs in " << out_dir.string();
  return {rows.size() == expected && result.errors.empty() && secs < kSweepBudgetS && deterministic && perf_shape &&
              cmp_shape && flag_mismatch == 0,
          s.str()};
}

// ---------------------------------------------------------------------------
// 8. Answered fraction along inverse-ablation schedules.
// ---------------------------------------------------------------------------
Outcome growth_monotone() {
  std::size_t steps = 0, drops = 0;
  for (int i = 0; i < kSchedules; ++i) {
    SynthConfig c;
    c.predicates = 30;
    c.entities = 300;
    c.rules = 60;
    c.facts = 1500;
    c.levels = 4;
    c.roots = 3;
    c.seed = 100 + static_cast<std::uint64_t>(i % 5);
    auto r = synth_kb(c);

    // A sampled axiom subset, fixed along the schedule.
    const KnowledgeBase& kb = r.kb;
    GraphOptions opts;
    opts.head_predicates = [&kb](Symbol p) { return matching_predicates(kb, p, true); };
    auto g = std::make_shared<const AndOrGraph>(build_graph(r.axioms, root_schemas(r.templates), opts));
    Rng rng(static_cast<std::uint64_t>(i));
    auto space = i % 2 ? model1_sample(g, 3, rng) : model2_sample(g, 40, rng);
    auto axioms = r.axioms.subset(space.axiom_ids());
    auto queries = expand_templates(r.kb, r.templates);

    std::mt19937_64 sizes_rng(static_cast<std::uint64_t>(i) * 7 + 1);
    std::set<std::size_t> picks;
    while (picks.size() < 5) picks.insert(1 + sizes_rng() % r.kb.content_size());
    auto schedule = ablate_grow(r.kb, {picks.begin(), picks.end()}, static_cast<std::uint64_t>(i) * 13 + 5,
                                i % 3 == 0 ? AblationOrder::kStratified : AblationOrder::kUniform);
    double prev = -1;
    for (std::size_t k = 0; k < schedule.snapshot_count(); ++k) {
      auto res = answered_fraction(queries, schedule.snapshot(k), axioms, 10);
      ++steps;
      drops += res.fraction < prev;
      prev = res.fraction;
    }
  }
  std::ostringstream s;
  s << kSchedules << " schedules, " << steps << " snapshots, " << drops << " decreases";
  return {drops == 0, s.str()};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"1 engine oracle equivalence", engine_oracle},
      {"2 model1 degree bound", model1_bound},
      {"3 model2 identity and fraction", model2_identity_fraction},
      {"4 alpha correctness", alpha_checks},
      {"5 degeneracy detector", degeneracy},
      {"6 transition detector", transition},
      {"7 end-to-end sweep", end_to_end},
      {"8 growth monotonicity", growth_monotone},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
