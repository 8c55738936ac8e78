#include "infgrowth/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "infgrowth/bottom_up.hpp"
#include "infgrowth/metrics.hpp"
#include "json.hpp"

namespace infgrowth {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config

namespace {

std::string resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.string();
}

ProfileMode parse_profile_mode(const std::string& s) {
  if (s == "none") return ProfileMode::kNone;
  if (s == "first") return ProfileMode::kFirstReplicate;
  if (s == "all") return ProfileMode::kAll;
  throw std::invalid_argument("profiles must be none, first or all");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(std::string_view text, const fs::path& base_dir) {
  auto j = nlohmann::json::parse(text);
  ExperimentConfig c;
  if (j.contains("kb")) c.kb_path = resolve(base_dir, j["kb"].get<std::string>());
  if (j.contains("axioms")) c.axioms_path = resolve(base_dir, j["axioms"].get<std::string>());
  if (j.contains("templates")) c.templates_path = resolve(base_dir, j["templates"].get<std::string>());
  if (j.contains("synth")) c.synth = SynthConfig::from_json(j["synth"].dump());
  if (!c.kb_path && !c.synth) throw std::invalid_argument("config needs either \"kb\" or \"synth\"");
  if (c.kb_path && c.synth) throw std::invalid_argument("config may not give both \"kb\" and \"synth\"");

  if (j.contains("snapshots")) {
    const auto& s = j["snapshots"];
    c.sizes = s.value("sizes", c.sizes);
    c.snapshot_seed = s.value("seed", c.snapshot_seed);
    auto order = s.value("order", std::string("uniform"));
    if (order == "uniform") c.order = AblationOrder::kUniform;
    else if (order == "stratified") c.order = AblationOrder::kStratified;
    else throw std::invalid_argument("snapshot order must be uniform or stratified");
  }
  c.model1_k = j.value("model1_k", c.model1_k);
  c.model2_beta = j.value("model2_beta", c.model2_beta);
  auto rounding = j.value("rounding", std::string("ceil"));
  if (rounding == "ceil") c.rounding = BetaRounding::kCeil;
  else if (rounding == "bernoulli") c.rounding = BetaRounding::kBernoulli;
  else throw std::invalid_argument("rounding must be ceil or bernoulli");
  c.replicates = j.value("replicates", c.replicates);
  c.seed = j.value("seed", c.seed);
  c.depth = j.value("depth", c.depth);
  c.genlpreds = j.value("genlpreds", c.genlpreds);
  c.threads = j.value("threads", c.threads);
  c.theta = j.value("theta", c.theta);
  c.continue_on_error = j.value("continue_on_error", c.continue_on_error);
  c.timing = j.value("timing", c.timing);
  c.profiles = parse_profile_mode(j.value("profiles", std::string("first")));
  if (j.contains("detectors")) {
    const auto& d = j["detectors"];
    c.transition.min_range = d.value("min_range", c.transition.min_range);
    c.transition.jump_share = d.value("jump_share", c.transition.jump_share);
    c.degenerate.min_peak = d.value("min_peak", c.degenerate.min_peak);
    c.degenerate.root_share = d.value("root_share", c.degenerate.root_share);
  }
  c.match_tolerance = j.value("match_tolerance", c.match_tolerance);

  for (int k : c.model1_k)
    if (k < 1) throw std::invalid_argument("model1 k must be >= 1");
  for (double b : c.model2_beta)
    if (!(b > 0 && b <= 100)) throw std::invalid_argument("model2 beta must be in (0, 100]");
  if (c.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (c.depth < 0) throw std::invalid_argument("depth must be >= 0");
  if (c.threads < 1) throw std::invalid_argument("threads must be >= 1");
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  return from_json(read_text_file(path), path.parent_path());
}

ExperimentInputs load_inputs(const ExperimentConfig& config) {
  ExperimentInputs in;
  if (config.synth) {
    auto r = synth_kb(*config.synth);
    in.kb = std::move(r.kb);
    in.axioms = std::move(r.axioms);
    in.templates = std::move(r.templates);
  } else if (config.kb_path) {
    auto doc = load_kb_file(*config.kb_path);
    in.kb = std::move(doc.kb);
    in.axioms = std::move(doc.axioms);
  } else {
    throw std::invalid_argument("no KB source configured");
  }
  if (config.axioms_path) {
    auto extra = load_kb_file(*config.axioms_path);
    for (const auto& c : extra.axioms.clauses()) in.axioms.add(c.head, c.body);
  }
  if (config.templates_path) in.templates = load_templates_file(*config.templates_path);
  else if (!config.synth) throw std::invalid_argument("config needs \"templates\" for a KB file");
  return in;
}

// ---------------------------------------------------------------------------
// Sweep

namespace {

template <typename F>
void parallel_for(std::size_t n, int threads, F&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  for (auto& t : pool) t.join();
}

std::string cell_name(std::size_t snapshot, const SampleParams& p) {
  return "s" + std::to_string(snapshot) + "_" + to_string(p.model) + "_" + format_number(p.parameter()) + "_r" +
         std::to_string(p.replicate);
}

std::string describe_cell(std::size_t snapshot, const SampleParams& p) {
  return "cell snapshot=" + std::to_string(snapshot) + " model=" + to_string(p.model) +
         " param=" + format_number(p.parameter()) + " replicate=" + std::to_string(p.replicate);
}

struct PreparedSample {
  SampledSpace sampled;
  AxiomSet axioms;
  double avg_degree = 0;
};

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config, const ExperimentInputs& inputs) {
  SweepResult result;

  std::vector<KnowledgeBase> snapshots;
  if (config.sizes.empty()) {
    snapshots.push_back(inputs.kb);
  } else {
    auto schedule = ablate_grow(inputs.kb, config.sizes, config.snapshot_seed, config.order);
    for (std::size_t i = 0; i < schedule.snapshot_count(); ++i) snapshots.push_back(schedule.snapshot(i));
  }
  std::vector<std::vector<Query>> queries;
  for (const auto& kb : snapshots) {
    queries.push_back(expand_templates(kb, inputs.templates));
    result.snapshot_sizes.push_back(kb.size());
  }

  // The graph depends only on axioms, roots and the genlPreds lattice, which
  // every snapshot shares.
  auto roots = root_schemas(inputs.templates);
  GraphOptions gopt;
  gopt.depth_bound = config.depth;
  if (config.genlpreds) {
    const KnowledgeBase* kb = &inputs.kb;
    gopt.head_predicates = [kb](Symbol p) { return matching_predicates(*kb, p, true); };
  }
  auto graph = std::make_shared<const AndOrGraph>(build_graph(inputs.axioms, roots, gopt));

  std::vector<SampleParams> settings;
  for (int k : config.model1_k) settings.push_back({Model::kModel1, k, 0, 0, 0, config.rounding});
  for (double b : config.model2_beta) settings.push_back({Model::kModel2, 0, b, 0, 0, config.rounding});
  std::vector<PreparedSample> samples;
  for (auto& s : generate_replicates(graph, settings, config.replicates, config.seed)) {
    auto ids = s.space.axiom_ids();
    PreparedSample p{std::move(s), inputs.axioms.subset(ids), 0};
    p.avg_degree = graph->or_count() == 0 ? 0.0 : average_degree(p.sampled.space);
    samples.push_back(std::move(p));
  }

  const std::size_t n_cells = snapshots.size() * samples.size();
  std::vector<std::optional<SweepRow>> rows(n_cells);
  std::vector<std::optional<std::string>> failures(n_cells);
  std::vector<std::optional<ProfileReport>> profiles(n_cells);

  parallel_for(n_cells, config.threads, [&](std::size_t cell) {
    const std::size_t s = cell / samples.size();
    const auto& prepared = samples[cell % samples.size()];
    const auto& params = prepared.sampled.params;
    const auto& space = prepared.sampled.space;
    try {
      if (queries[s].empty()) throw SweepError("no queries expand against this snapshot");
      if (graph->or_count() == 0) throw SweepError("query graph is empty");
      auto start = std::chrono::steady_clock::now();
      const KnowledgeBase& kb = snapshots[s];
      SweepRow row;
      row.model = to_string(params.model);
      row.param = params.parameter();
      row.replicate = params.replicate;
      row.seed = params.seed;
      row.snapshot = s;
      row.kb_facts = kb.size();
      row.axiom_count = prepared.axioms.size();
      row.or_nodes = space.or_count();
      row.avg_degree = prepared.avg_degree;
      row.alpha = alpha(space, queries[s].size(), kb, config.genlpreds).alpha;
      auto qa = answered_fraction(queries[s], kb, prepared.axioms, config.depth, config.genlpreds);
      row.queries = qa.attempted;
      row.answered = qa.answered;
      row.answered_fraction = qa.fraction;
      row.total_answers = qa.total_answers;
      row.threshold_hit = threshold_hit(qa.fraction, config.theta);
      if (config.timing)
        row.wall_time_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      rows[cell] = std::move(row);

      if (config.profiles == ProfileMode::kAll ||
          (config.profiles == ProfileMode::kFirstReplicate && params.replicate == 0)) {
        ProfileReport pr;
        pr.name = cell_name(s, params);
        pr.snapshot = s;
        pr.model = to_string(params.model);
        pr.param = params.parameter();
        pr.replicate = params.replicate;
        pr.profile = depth_profile(space, kb, prepared.axioms, config.genlpreds);
        if (!pr.profile.empty()) pr.report = detect_degenerate(pr.profile, config.degenerate);
        profiles[cell] = std::move(pr);
      }
    } catch (const std::exception& e) {
      failures[cell] = describe_cell(s, params) + ": " + e.what();
    }
  });

  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    if (failures[cell]) {
      if (!config.continue_on_error) throw SweepError(*failures[cell]);
      const auto& params = samples[cell % samples.size()].sampled.params;
      result.errors.push_back({to_string(params.model), params.parameter(), params.replicate,
                               cell / samples.size(), *failures[cell]});
      continue;
    }
    result.rows.push_back(std::move(*rows[cell]));
    if (profiles[cell]) result.profiles.push_back(std::move(*profiles[cell]));
  }
  auto key = [](const SweepRow& r) { return std::tie(r.snapshot, r.model, r.param, r.replicate); };
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [&](const SweepRow& a, const SweepRow& b) { return key(a) < key(b); });
  result.series = detect_series(result.rows, config.transition);
  return result;
}

std::vector<SeriesReport> detect_series(const std::vector<SweepRow>& rows, TransitionParams params) {
  std::vector<SeriesReport> out;
  auto finish = [&](SeriesReport s) {
    std::sort(s.points.begin(), s.points.end());
    if (s.points.size() < 3) return;
    s.report = detect_transition(s.points, params);
    out.push_back(std::move(s));
  };

  std::map<std::tuple<std::size_t, std::string, double>, std::vector<const SweepRow*>> within;
  std::map<std::pair<std::string, double>, std::map<std::size_t, std::vector<const SweepRow*>>> across;
  for (const auto& r : rows) {
    within[{r.snapshot, r.model, r.param}].push_back(&r);
    across[{r.model, r.param}][r.snapshot].push_back(&r);
  }
  for (const auto& [key, group] : within) {
    SeriesReport s;
    const auto& [snap, model, param] = key;
    s.label = "s" + std::to_string(snap) + "/" + model + "/" + format_number(param);
    s.model = model;
    s.param = param;
    s.snapshot = snap;
    for (const auto* r : group) s.points.emplace_back(r->alpha, r->answered_fraction);
    finish(std::move(s));
  }
  for (const auto& [key, by_snap] : across) {
    SeriesReport s;
    s.label = "all/" + key.first + "/" + format_number(key.second);
    s.model = key.first;
    s.param = key.second;
    for (const auto& [_, group] : by_snap) {
      double a = 0, f = 0;
      for (const auto* r : group) a += r->alpha, f += r->answered_fraction;
      s.points.emplace_back(a / group.size(), f / group.size());
    }
    finish(std::move(s));
  }
  return out;
}

Comparison compare_models(const std::vector<SweepRow>& rows, double tolerance) {
  Comparison out;
  std::map<std::size_t, std::pair<std::vector<const SweepRow*>, std::vector<const SweepRow*>>> by_snapshot;
  for (const auto& r : rows) {
    auto& slot = by_snapshot[r.snapshot];
    if (r.model == "model1") slot.first.push_back(&r);
    else if (r.model == "model2") slot.second.push_back(&r);
  }
  for (const auto& [snap, group] : by_snapshot) {
    const auto& [m1, m2] = group;
    std::vector<double> d1, d2;
    for (const auto* r : m1) d1.push_back(r->avg_degree);
    for (const auto* r : m2) d2.push_back(r->avg_degree);
    auto pairs = matched_pairs(d1, d2, tolerance);
    if (pairs.empty()) {
      out.warnings.push_back("snapshot " + std::to_string(snap) + ": no matched pairs within tolerance " +
                             format_number(tolerance));
      continue;
    }
    ComparisonRow c;
    c.snapshot = snap;
    c.kb_facts = (m1.empty() ? m2 : m1).front()->kb_facts;
    c.pairs = pairs.size();
    double deg = 0, a1 = 0, a2 = 0;
    for (const auto& p : pairs) {
      deg += (d1[p.a] + d2[p.b]) / 2;
      a1 += static_cast<double>(m1[p.a]->total_answers);
      a2 += static_cast<double>(m2[p.b]->total_answers);
    }
    const double n = static_cast<double>(pairs.size());
    c.mean_degree = deg / n;
    c.model1_answers = a1 / n;
    c.model2_answers = a2 / n;
    if (c.model1_answers > 0) {
      c.change_pct = (c.model2_answers - c.model1_answers) / c.model1_answers * 100.0;
    } else {
      c.change_pct = c.model2_answers > 0 ? std::numeric_limits<double>::infinity() : 0.0;
      if (c.model2_answers > 0)
        out.warnings.push_back("snapshot " + std::to_string(snap) + ": model1 has no answers; change undefined");
    }
    out.rows.push_back(c);
  }
  return out;
}

std::vector<PerformanceRow> performance_table(const std::vector<SweepRow>& rows) {
  std::map<std::tuple<std::size_t, std::string, double>, std::vector<const SweepRow*>> groups;
  for (const auto& r : rows) groups[{r.snapshot, r.model, r.param}].push_back(&r);
  std::vector<PerformanceRow> out;
  for (const auto& [key, g] : groups) {
    PerformanceRow p;
    std::tie(p.snapshot, p.model, p.param) = key;
    p.kb_facts = g.front()->kb_facts;
    p.replicates = g.size();
    double a = 0, f = 0, h = 0;
    for (const auto* r : g) a += r->alpha, f += r->answered_fraction, h += r->threshold_hit ? 1 : 0;
    const double n = static_cast<double>(g.size());
    p.mean_alpha = a / n;
    p.mean_fraction = f / n;
    p.hit_share = h / n;
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace {

constexpr const char* kColumns[] = {"model",        "param",       "replicate",     "seed",
                                    "snapshot",     "kb_facts",    "axiom_count",   "or_nodes",
                                    "avg_degree",   "alpha",       "queries",       "answered",
                                    "answered_fraction", "total_answers", "threshold_hit", "wall_time_ms"};
constexpr std::size_t kColumnCount = std::size(kColumns);

template <typename T>
T parse_int(std::string_view s, std::size_t line) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::runtime_error("line " + std::to_string(line) + ": bad integer '" + std::string(s) + "'");
  return v;
}

double parse_double(std::string_view s, std::size_t line) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename... Ts>
std::string csv_line(const Ts&... fields) {
  std::string out;
  bool first = true;
  auto add = [&](const std::string& f) {
    if (!first) out += ',';
    out += f;
    first = false;
  };
  (add(fields), ...);
  out += '\n';
  return out;
}

std::string str(std::size_t v) { return std::to_string(v); }
std::string str(int v) { return std::to_string(v); }
std::string str(double v) { return format_number(v); }
std::string str(bool v) { return v ? "true" : "false"; }
std::string str(const std::string& v) { return v; }

}  // namespace

std::string sweep_csv_header() {
  std::string h;
  for (std::size_t i = 0; i < kColumnCount; ++i) {
    if (i) h += ',';
    h += kColumns[i];
  }
  return h + "\n";
}

std::string emit_csv(const std::vector<SweepRow>& rows) {
  std::string out = sweep_csv_header();
  for (const auto& r : rows)
    out += csv_line(str(r.model), str(r.param), str(r.replicate), str(r.seed), str(r.snapshot), str(r.kb_facts),
                    str(r.axiom_count), str(r.or_nodes), str(r.avg_degree), str(r.alpha), str(r.queries),
                    str(r.answered), str(r.answered_fraction), str(r.total_answers), str(r.threshold_hit),
                    str(r.wall_time_ms));
  return out;
}

std::string emit_json(const std::vector<SweepRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["model"] = r.model;
    j["param"] = r.param;
    j["replicate"] = r.replicate;
    j["seed"] = r.seed;
    j["snapshot"] = r.snapshot;
    j["kb_facts"] = r.kb_facts;
    j["axiom_count"] = r.axiom_count;
    j["or_nodes"] = r.or_nodes;
    j["avg_degree"] = r.avg_degree;
    j["alpha"] = r.alpha;
    j["queries"] = r.queries;
    j["answered"] = r.answered;
    j["answered_fraction"] = r.answered_fraction;
    j["total_answers"] = r.total_answers;
    j["threshold_hit"] = r.threshold_hit;
    j["wall_time_ms"] = r.wall_time_ms;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<SweepRow> parse_sweep_csv(std::string_view text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw std::runtime_error("line 1: missing header");
  if (std::string(lines[0]) + "\n" != sweep_csv_header()) throw std::runtime_error("line 1: unexpected header");
  std::vector<SweepRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    auto f = split(lines[i], ',');
    if (f.size() != kColumnCount)
      throw std::runtime_error("line " + std::to_string(ln) + ": expected " + std::to_string(kColumnCount) +
                               " fields, got " + std::to_string(f.size()));
    SweepRow r;
    r.model = std::string(f[0]);
    r.param = parse_double(f[1], ln);
    r.replicate = parse_int<int>(f[2], ln);
    r.seed = parse_int<std::uint64_t>(f[3], ln);
    r.snapshot = parse_int<std::size_t>(f[4], ln);
    r.kb_facts = parse_int<std::size_t>(f[5], ln);
    r.axiom_count = parse_int<std::size_t>(f[6], ln);
    r.or_nodes = parse_int<std::size_t>(f[7], ln);
    r.avg_degree = parse_double(f[8], ln);
    r.alpha = parse_double(f[9], ln);
    r.queries = parse_int<std::size_t>(f[10], ln);
    r.answered = parse_int<std::size_t>(f[11], ln);
    r.answered_fraction = parse_double(f[12], ln);
    r.total_answers = parse_int<std::size_t>(f[13], ln);
    if (f[14] == "true") r.threshold_hit = true;
    else if (f[14] == "false") r.threshold_hit = false;
    else throw std::runtime_error("line " + std::to_string(ln) + ": threshold_hit must be true or false");
    r.wall_time_ms = parse_double(f[15], ln);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit(const std::vector<SweepRow>& rows, const fs::path& path, EmitFormat format) {
  write_text_file(path, format == EmitFormat::kCsv ? emit_csv(rows) : emit_json(rows));
}

std::string emit_csv(const Comparison& c) {
  std::string out = "snapshot,kb_facts,pairs,mean_degree,model1_answers,model2_answers,change_pct\n";
  for (const auto& r : c.rows)
    out += csv_line(str(r.snapshot), str(r.kb_facts), str(r.pairs), str(r.mean_degree), str(r.model1_answers),
                    str(r.model2_answers), str(r.change_pct));
  return out;
}

std::string emit_csv(const std::vector<PerformanceRow>& rows) {
  std::string out = "snapshot,kb_facts,model,param,replicates,mean_alpha,mean_fraction,hit_share\n";
  for (const auto& r : rows)
    out += csv_line(str(r.snapshot), str(r.kb_facts), str(r.model), str(r.param), str(r.replicates),
                    str(r.mean_alpha), str(r.mean_fraction), str(r.hit_share));
  return out;
}

std::string emit_csv(const std::vector<CellError>& errors) {
  std::string out = "snapshot,model,param,replicate,message\n";
  for (const auto& e : errors) {
    std::string msg = e.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out += csv_line(str(e.snapshot), str(e.model), str(e.param), str(e.replicate), msg);
  }
  return out;
}

std::string emit_profile_csv(const std::map<int, std::size_t>& profile) {
  std::string out = "depth,count\n";
  for (const auto& [d, n] : profile) out += csv_line(str(d), str(n));
  return out;
}

std::string detectors_json(const SweepResult& result) {
  using nlohmann::ordered_json;
  ordered_json j;
  ordered_json series = ordered_json::array();
  std::size_t transitions = 0;
  for (const auto& s : result.series) {
    ordered_json e;
    e["label"] = s.label;
    e["model"] = s.model;
    e["param"] = s.param;
    if (s.snapshot) e["snapshot"] = *s.snapshot;
    e["points"] = s.points;
    e["report"] = ordered_json::parse(s.report.to_json());
    series.push_back(std::move(e));
    if (s.report.fired()) ++transitions;
  }
  ordered_json profiles = ordered_json::array();
  std::size_t degenerate = 0;
  for (const auto& p : result.profiles) {
    ordered_json e;
    e["name"] = p.name;
    e["snapshot"] = p.snapshot;
    e["model"] = p.model;
    e["param"] = p.param;
    e["replicate"] = p.replicate;
    e["report"] = ordered_json::parse(p.report.to_json());
    profiles.push_back(std::move(e));
    if (p.report.fired()) ++degenerate;
  }
  auto share = [](std::size_t a, std::size_t n) { return n == 0 ? 0.0 : static_cast<double>(a) / n; };
  j["rates"] = {{"series", result.series.size()},
                {"transition_share", share(transitions, result.series.size())},
                {"profiles", result.profiles.size()},
                {"degenerate_share", share(degenerate, result.profiles.size())}};
  j["series"] = std::move(series);
  j["profiles"] = std::move(profiles);
  return j.dump(2) + "\n";
}

void write_sweep_outputs(const SweepResult& result, const ExperimentConfig& config, const fs::path& dir) {
  fs::create_directories(dir);
  write_text_file(dir / "sweep.csv", emit_csv(result.rows));
  write_text_file(dir / "performance.csv", emit_csv(performance_table(result.rows)));
  auto cmp = compare_models(result.rows, config.match_tolerance);
  write_text_file(dir / "comparison.csv", emit_csv(cmp));
  write_text_file(dir / "errors.csv", emit_csv(result.errors));
  write_text_file(dir / "detectors.json", detectors_json(result));
  if (!result.profiles.empty()) {
    fs::create_directories(dir / "profiles");
    for (const auto& p : result.profiles) write_text_file(dir / "profiles" / (p.name + ".csv"), emit_profile_csv(p.profile));
  }
}

void write_text_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace infgrowth
