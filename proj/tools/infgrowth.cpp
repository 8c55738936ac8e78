// infgrowth: command-line front end for KB synthesis, query graphs, sampling,
// metrics and parameter sweeps.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "infgrowth/harness.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace infgrowth;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;

std::shared_ptr<const AndOrGraph> load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return std::make_shared<const AndOrGraph>(read_graph(in));
}

AxiomSet load_axioms(const std::string& kb_path, const std::string& extra) {
  AxiomSet axioms = load_kb_file(kb_path).axioms;
  if (!extra.empty())
    for (const auto& c : load_kb_file(extra).axioms.clauses()) axioms.add(c.head, c.body);
  return axioms;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t v = 0;
    auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || end != item.data() + item.size())
      throw CLI::ValidationError("--sizes", "bad size '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::map<int, std::size_t> read_profile_csv(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::getline(in, line);
  if (line != "depth,count") throw std::runtime_error(path.string() + ": expected header depth,count");
  std::map<int, std::size_t> profile;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error(path.string() + ": bad line '" + line + "'");
    profile[std::stoi(line.substr(0, comma))] = std::stoull(line.substr(comma + 1));
  }
  return profile;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inference growth experiments over Horn-clause knowledge bases"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic KB, rules and query templates");
  std::string synth_config, out_kb, out_templates;
  synth->add_option("--config", synth_config, "SynthConfig JSON")->required();
  synth->add_option("--out-kb", out_kb, "KB output path")->required();
  synth->add_option("--out-templates", out_templates, "Template JSON output path")->required();

  // build-graph
  auto* build = app.add_subcommand("build-graph", "Build the AND/OR query graph");
  std::string axioms_path, templates_path, graph_out;
  int depth = 10;
  bool no_genlpreds = false;
  build->add_option("--axioms", axioms_path, "KB file holding the rules (and genlPreds facts)")->required();
  build->add_option("--templates", templates_path, "Template JSON")->required();
  build->add_option("--depth", depth, "Depth bound")->capture_default_str();
  build->add_option("--out", graph_out, "Graph output path")->required();
  build->add_flag("--no-genlpreds", no_genlpreds, "Ignore genlPreds when collecting clauses");

  // sample
  auto* samp = app.add_subcommand("sample", "Sample Model 1 / Model 2 search spaces");
  std::string graph_path, sample_out;
  int model = 1, k = 2, replicates = 7;
  double beta = 50;
  std::uint64_t seed = 1;
  bool bernoulli = false;
  samp->add_option("--graph", graph_path, "Graph file")->required();
  samp->add_option("--model", model, "1 or 2")->required()->check(CLI::IsMember({1, 2}));
  auto* k_opt = samp->add_option("--k", k, "Model 1 children per OR node")->check(CLI::PositiveNumber);
  auto* beta_opt = samp->add_option("--beta", beta, "Model 2 percentage")->check(CLI::Range(0.0, 100.0));
  k_opt->excludes(beta_opt);
  samp->add_option("--replicates", replicates, "Replicates")->capture_default_str()->check(CLI::PositiveNumber);
  samp->add_option("--seed", seed, "Master seed")->capture_default_str();
  samp->add_flag("--bernoulli", bernoulli, "Model 2 keeps each child with probability beta/100");
  samp->add_option("--out", sample_out, "Output directory")->required();

  // alpha
  auto* alph = app.add_subcommand("alpha", "Compute alpha for a sampled space");
  std::string space_path, kb_path;
  alph->add_option("--graph", graph_path, "Graph file")->required();
  alph->add_option("--space", space_path, "Sample manifest")->required();
  alph->add_option("--kb", kb_path, "KB file")->required();
  alph->add_option("--templates", templates_path, "Template JSON")->required();
  alph->add_flag("--no-genlpreds", no_genlpreds, "Count facts of the node predicate only");

  // ask
  auto* ask = app.add_subcommand("ask", "Answer the expanded template queries");
  std::string extra_axioms;
  ask->add_option("--kb", kb_path, "KB file (its rules are the axioms)")->required();
  ask->add_option("--axioms", extra_axioms, "Additional rules file");
  ask->add_option("--graph", graph_path, "Graph file (needed with --space)");
  ask->add_option("--space", space_path, "Restrict to a sample manifest's axioms");
  ask->add_option("--templates", templates_path, "Template JSON")->required();
  ask->add_option("--depth", depth, "Depth limit")->capture_default_str();
  ask->add_flag("--no-genlpreds", no_genlpreds, "Disable genlPreds inheritance");

  // ablate
  auto* abl = app.add_subcommand("ablate", "Write nested KB snapshots by inverse ablation");
  std::string sizes_arg, ablate_out, order_arg = "uniform";
  abl->add_option("--kb", kb_path, "Full KB file")->required();
  abl->add_option("--sizes", sizes_arg, "Comma-separated content fact counts")->required();
  abl->add_option("--seed", seed, "Permutation seed")->capture_default_str();
  abl->add_option("--order", order_arg, "uniform or stratified")
      ->capture_default_str()
      ->check(CLI::IsMember({"uniform", "stratified"}));
  abl->add_option("--out", ablate_out, "Output directory")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  std::string sweep_config, sweep_out;
  int threads = 0;
  sweep->add_option("--config", sweep_config, "Experiment config JSON")->required();
  sweep->add_option("--out", sweep_out, "Output directory")->required();
  sweep->add_option("--threads", threads, "Worker threads (overrides config)");

  // detect
  auto* det = app.add_subcommand("detect", "Run the transition and degeneracy detectors");
  std::string rows_path, profiles_dir;
  TransitionParams tparams;
  DegenerateParams dparams;
  det->add_option("--rows", rows_path, "sweep.csv")->required();
  det->add_option("--profiles", profiles_dir, "Directory of depth profile CSVs");
  det->add_option("--min-range", tparams.min_range)->capture_default_str();
  det->add_option("--jump-share", tparams.jump_share)->capture_default_str();
  det->add_option("--min-peak", dparams.min_peak)->capture_default_str();
  det->add_option("--root-share", dparams.root_share)->capture_default_str();

  // compare
  auto* cmp = app.add_subcommand("compare", "Compare models at matched average degree");
  double tolerance = 0.1;
  cmp->add_option("--rows", rows_path, "sweep.csv")->required();
  cmp->add_option("--tolerance", tolerance)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth) {
      auto config = SynthConfig::from_json(read_text_file(synth_config));
      auto r = synth_kb(config);
      write_text_file(out_kb, serialize_kb(r.kb, r.axioms));
      write_text_file(out_templates, templates_to_json(r.templates));
      std::cerr << "wrote " << r.kb.size() << " facts, " << r.axioms.size() << " rules, " << r.templates.size()
                << " templates\n";
    } else if (*build) {
      auto doc = load_kb_file(axioms_path);
      auto templates = load_templates_file(templates_path);
      auto roots = root_schemas(templates);
      GraphOptions opt;
      opt.depth_bound = depth;
      if (!no_genlpreds) opt.head_predicates = [&](Symbol p) { return matching_predicates(doc.kb, p, true); };
      auto g = build_graph(doc.axioms, roots, opt);
      std::ofstream out(graph_out);
      if (!out) throw std::runtime_error("cannot write " + graph_out);
      write_graph(out, g);
      std::cerr << g.or_count() << " OR nodes, " << g.and_count() << " AND nodes\n";
    } else if (*samp) {
      if (model == 1 && beta_opt->count() > 0) throw CLI::ValidationError("--beta", "Model 1 takes --k");
      if (model == 2 && k_opt->count() > 0) throw CLI::ValidationError("--k", "Model 2 takes --beta");
      if (model == 2 && !(beta > 0)) throw CLI::ValidationError("--beta", "must be in (0, 100]");
      auto g = load_graph(graph_path);
      SampleParams p;
      p.model = model == 1 ? Model::kModel1 : Model::kModel2;
      p.k = k;
      p.beta = beta;
      p.rounding = bernoulli ? BetaRounding::kBernoulli : BetaRounding::kCeil;
      fs::create_directories(sample_out);
      for (const auto& s : generate_replicates(g, {p}, replicates, seed)) {
        auto name = to_string(p.model) + "_" + format_number(p.parameter()) + "_r" +
                    std::to_string(s.params.replicate) + ".json";
        write_text_file(fs::path(sample_out) / name, sample_manifest(s.params, s.space));
      }
    } else if (*alph) {
      auto g = load_graph(graph_path);
      auto space = space_from_manifest(g, read_text_file(space_path));
      auto doc = load_kb_file(kb_path);
      auto queries = expand_templates(doc.kb, load_templates_file(templates_path));
      std::cout << alpha(space, queries.size(), doc.kb, !no_genlpreds).to_json() << "\n";
    } else if (*ask) {
      auto doc = load_kb_file(kb_path);
      AxiomSet axioms = load_axioms(kb_path, extra_axioms);
      auto queries = expand_templates(doc.kb, load_templates_file(templates_path));
      QaResult r;
      if (!space_path.empty()) {
        if (graph_path.empty()) throw CLI::ValidationError("--space", "requires --graph");
        auto g = load_graph(graph_path);
        auto space = space_from_manifest(g, read_text_file(space_path));
        r = answered_fraction(space, doc.kb, axioms, queries, depth, !no_genlpreds);
      } else {
        r = answered_fraction(queries, doc.kb, axioms, depth, !no_genlpreds);
      }
      std::cout << r.to_json() << "\n";
    } else if (*abl) {
      auto doc = load_kb_file(kb_path);
      auto sizes = parse_sizes(sizes_arg);
      auto schedule = ablate_grow(doc.kb, sizes, seed,
                                  order_arg == "stratified" ? AblationOrder::kStratified : AblationOrder::kUniform);
      fs::create_directories(ablate_out);
      for (std::size_t i = 0; i < schedule.snapshot_count(); ++i)
        write_text_file(fs::path(ablate_out) / ("snapshot_" + std::to_string(i) + ".kb"),
                        serialize_kb(schedule.snapshot(i), doc.axioms));
    } else if (*sweep) {
      auto config = ExperimentConfig::load(sweep_config);
      if (threads > 0) config.threads = threads;
      auto inputs = load_inputs(config);
      auto result = run_sweep(config, inputs);
      write_sweep_outputs(result, config, sweep_out);
      for (const auto& w : compare_models(result.rows, config.match_tolerance).warnings)
        std::cerr << "warning: " << w << "\n";
      std::cerr << result.rows.size() << " rows, " << result.errors.size() << " errors\n";
    } else if (*det) {
      SweepResult result;
      result.rows = parse_sweep_csv(read_text_file(rows_path));
      result.series = detect_series(result.rows, tparams);
      if (!profiles_dir.empty()) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(profiles_dir))
          if (e.path().extension() == ".csv") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
          ProfileReport p;
          p.name = f.stem().string();
          p.profile = read_profile_csv(f);
          if (!p.profile.empty()) p.report = detect_degenerate(p.profile, dparams);
          result.profiles.push_back(std::move(p));
        }
      }
      std::cout << detectors_json(result);
    } else if (*cmp) {
      auto c = compare_models(parse_sweep_csv(read_text_file(rows_path)), tolerance);
      for (const auto& w : c.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << emit_csv(c);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SweepError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
