// encsel: generate instances, run encodings, featurize, train runtime models
// and evaluate encoding selectors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include "encsel/encsel.hpp"

namespace fs = std::filesystem;
using namespace encsel;

namespace {

// Effective configuration. Keys and defaults are listed in kv(); a config
// file may set any of them as `key = value`, and flags override the file.
struct RunConfig {
  std::uint64_t seed = 0;
  double cutoff_s = kDefaultCutoffSeconds;
  std::string backend = "synthetic";
  std::string solver_cmd;
  double grace_s = 5.0;
  std::size_t workers = 1;
  std::string instances_dir = "instances";
  std::string performance = "performance.csv";
  std::string features = "features.csv";
  std::string catalog = "catalog.json";
  std::string feature_times = "feature_times.csv";
  std::string models_dir = "models";
  std::string split = "split.csv";
  std::string hard = "hard.csv";
  std::string report = "report.json";
  std::string job_log;  // empty = stderr
  double hard_low_s = 50.0;
  double test_fraction = 0.2;
  bool stratify = true;
  std::size_t folds = 10;
  std::string model = "tree";
  std::string target = "log";
  std::string cv_objective = "rmse";
  std::string wins = "all";
  bool use_feature_times = false;
  std::size_t beam_width = kDefaultBeamWidth;
  std::string grid_knn_k;       // comma list; empty = default grid
  std::string grid_tree_depth;  // comma list, "none" = unlimited; empty = default grid

  std::vector<std::pair<std::string, std::string>> kv() const {
    auto q = [](const std::string& s) { return "\"" + s + "\""; };
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    return {{"seed", std::to_string(seed)},
            {"cutoff_s", format_decimal(cutoff_s, 1)},
            {"backend", q(backend)},
            {"solver_cmd", q(solver_cmd)},
            {"grace_s", format_decimal(grace_s, 1)},
            {"workers", std::to_string(workers)},
            {"instances_dir", q(instances_dir)},
            {"performance", q(performance)},
            {"features", q(features)},
            {"catalog", q(catalog)},
            {"feature_times", q(feature_times)},
            {"models_dir", q(models_dir)},
            {"split", q(split)},
            {"hard", q(hard)},
            {"report", q(report)},
            {"job_log", q(job_log)},
            {"hard_low_s", format_decimal(hard_low_s, 1)},
            {"test_fraction", format_decimal(test_fraction, 1)},
            {"stratify", b(stratify)},
            {"folds", std::to_string(folds)},
            {"model", q(model)},
            {"target", q(target)},
            {"cv_objective", q(cv_objective)},
            {"wins", q(wins)},
            {"use_feature_times", b(use_feature_times)},
            {"beam_width", std::to_string(beam_width)},
            {"grid_knn_k", q(grid_knn_k)},
            {"grid_tree_depth", q(grid_tree_depth)}};
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["cutoff_s"] = cutoff_s;
    j["backend"] = backend;
    j["solver_cmd"] = solver_cmd;
    j["grace_s"] = grace_s;
    j["workers"] = workers;
    j["hard_low_s"] = hard_low_s;
    j["test_fraction"] = test_fraction;
    j["stratify"] = stratify;
    j["folds"] = folds;
    j["model"] = model;
    j["target"] = target;
    j["cv_objective"] = cv_objective;
    j["wins"] = wins;
    j["use_feature_times"] = use_feature_times;
    j["beam_width"] = beam_width;
    j["grid_knn_k"] = grid_knn_k;
    j["grid_tree_depth"] = grid_tree_depth;
    return j;
  }
};

std::string unquote(std::string v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) return v.substr(1, v.size() - 2);
  return v;
}

std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    T out;
    if constexpr (std::is_floating_point_v<T>) {
      out = static_cast<T>(std::stod(v, &used));
    } else {
      if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
      out = static_cast<T>(std::stoull(v, &used));
    }
    if (used != v.size()) throw std::invalid_argument("trailing text");
    return out;
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': '" + v + "' is not a valid number");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ValidationError("config key '" + key + "': expected true or false, got '" + v + "'");
}

void set_key(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = unquote(raw);
  std::map<std::string, std::string*> strings{{"backend", &c.backend},       {"solver_cmd", &c.solver_cmd},
                                              {"instances_dir", &c.instances_dir}, {"performance", &c.performance},
                                              {"features", &c.features},     {"catalog", &c.catalog},
                                              {"feature_times", &c.feature_times}, {"models_dir", &c.models_dir},
                                              {"split", &c.split},           {"hard", &c.hard},
                                              {"report", &c.report},         {"job_log", &c.job_log},
                                              {"model", &c.model},           {"target", &c.target},
                                              {"cv_objective", &c.cv_objective}, {"wins", &c.wins},
                                              {"grid_knn_k", &c.grid_knn_k}, {"grid_tree_depth", &c.grid_tree_depth}};
  if (auto it = strings.find(key); it != strings.end()) {
    *it->second = v;
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, v);
  } else if (key == "cutoff_s") {
    c.cutoff_s = parse_number<double>(key, v);
  } else if (key == "grace_s") {
    c.grace_s = parse_number<double>(key, v);
  } else if (key == "workers") {
    c.workers = parse_number<std::size_t>(key, v);
  } else if (key == "hard_low_s") {
    c.hard_low_s = parse_number<double>(key, v);
  } else if (key == "test_fraction") {
    c.test_fraction = parse_number<double>(key, v);
  } else if (key == "stratify") {
    c.stratify = parse_bool(key, v);
  } else if (key == "folds") {
    c.folds = parse_number<std::size_t>(key, v);
  } else if (key == "use_feature_times") {
    c.use_feature_times = parse_bool(key, v);
  } else if (key == "beam_width") {
    c.beam_width = parse_number<std::size_t>(key, v);
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

// TOML-style subset: `key = value` lines, `#` comments, `[section]` headers
// ignored, strings optionally quoted.
void load_config(RunConfig& c, const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = strip(line);
    if (line.empty() || line.front() == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(path.string() + ":" + std::to_string(n) + ": expected key = value");
    set_key(c, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
  }
}

void validate(const RunConfig& c) {
  if (!(c.cutoff_s > 0)) throw ValidationError("cutoff_s must be positive");
  if (c.workers < 1) throw ValidationError("workers must be at least 1");
  if (c.folds < 2) throw ValidationError("folds must be at least 2");
  parse_backend_kind(c.backend);
  ml::parse_model_kind(c.model);
  ml::parse_target_transform(c.target);
  parse_cv_objective(c.cv_objective);
  parse_wins_rule(c.wins);
}

// --- instance store ----------------------------------------------------------

fs::path manifest_path(const RunConfig& c) { return fs::path(c.instances_dir) / "manifest.csv"; }

// Merges records into the manifest by instance id, keeping first-seen order.
void merge_manifest(const RunConfig& c, const std::vector<GeneratedInstance>& batch) {
  const std::string header = "instance_id,family,params,seed,nodes,arcs,hamiltonian_flag";
  std::vector<std::string> order;
  std::map<std::string, std::string> lines;
  if (fs::exists(manifest_path(c))) {
    std::istringstream in(read_text(manifest_path(c)));
    std::string line;
    std::getline(in, line);
    if (trim_cr(line) != header) throw LoadError(manifest_path(c).string() + ": unexpected header");
    while (std::getline(in, line)) {
      line = trim_cr(line);
      if (line.empty()) continue;
      auto id = line.substr(0, line.find(','));
      if (!lines.count(id)) order.push_back(id);
      lines[id] = line;
    }
  }
  std::istringstream fresh(manifest_csv(batch));
  std::string line;
  std::getline(fresh, line);
  while (std::getline(fresh, line)) {
    auto id = line.substr(0, line.find(','));
    if (!lines.count(id)) order.push_back(id);
    lines[id] = line;
  }
  std::string out = header + "\n";
  for (const auto& id : order) out += lines[id] + "\n";
  write_text(manifest_path(c), out);
}

void write_batch(const RunConfig& c, const std::vector<GeneratedInstance>& batch) {
  for (const auto& g : batch) {
    validate_identifier(g.id);
    write_text(fs::path(c.instances_dir) / (g.id + ".lp"), emit_facts(g.graph));
  }
  merge_manifest(c, batch);
  std::cerr << "wrote " << batch.size() << " instance(s) to " << c.instances_dir << "\n";
}

std::vector<std::string> manifest_ids(const RunConfig& c) {
  if (!fs::exists(manifest_path(c))) throw LoadError("no instance manifest at " + manifest_path(c).string() + "; run `encsel gen` first");
  std::istringstream in(read_text(manifest_path(c)));
  std::string line;
  std::getline(in, line);
  std::vector<std::string> ids;
  while (std::getline(in, line)) {
    line = trim_cr(line);
    if (!line.empty()) ids.push_back(line.substr(0, line.find(',')));
  }
  return ids;
}

Instance load_instance(const RunConfig& c, const std::string& id) {
  auto path = fs::path(c.instances_dir) / (id + ".lp");
  try {
    return {id, parse_facts(read_text(path))};
  } catch (const ParseError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

std::vector<Instance> load_instances(const RunConfig& c, const std::vector<std::string>& ids) {
  std::vector<Instance> out;
  for (const auto& id : ids) out.push_back(load_instance(c, id));
  return out;
}

// Optional single-column id list (header instance_id), e.g. the harden output.
std::vector<std::string> read_id_list(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::getline(in, line);
  if (trim_cr(line) != "instance_id") throw LoadError(path.string() + ": expected header instance_id");
  std::vector<std::string> ids;
  while (std::getline(in, line)) {
    line = trim_cr(line);
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

std::optional<HoleRect> parse_hole(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto f = split(text, ',');
  if (f.size() != 4) throw ValidationError("--hole expects row0,col0,height,width");
  std::array<std::size_t, 4> v{};
  for (std::size_t i = 0; i < 4; ++i) v[i] = parse_number<std::size_t>("hole", f[i]);
  return HoleRect{v[0], v[1], v[2], v[3]};
}

// --- models ------------------------------------------------------------------

fs::path model_path(const RunConfig& c, EncodingId e) { return fs::path(c.models_dir) / ("hc" + std::to_string(e.value()) + ".json"); }

std::vector<ml::RuntimeModel> load_models(const RunConfig& c, const std::vector<std::string>& feature_names) {
  std::vector<ml::RuntimeModel> models;
  for (EncodingId e : all_encoding_ids()) {
    auto p = model_path(c, e);
    if (!fs::exists(p)) throw LoadError("missing trained model " + p.string() + "; run `encsel train` first");
    models.push_back(ml::load_model(p));
    for (const auto& name : models.back().feature_names) {
      if (std::find(feature_names.begin(), feature_names.end(), name) == feature_names.end()) {
        throw LoadError(p.string() + " uses feature '" + name + "' that is absent from " + c.features);
      }
    }
  }
  return models;
}

std::string policy_label(ml::ModelKind k) {
  switch (k) {
    case ml::ModelKind::Knn: return "KNN";
    case ml::ModelKind::Tree: return "DT";
    case ml::ModelKind::Forest: return "RF";
  }
  return "learned";
}

std::vector<ml::Hyperparams> config_grid(const RunConfig& c, ml::ModelKind kind, std::size_t p) {
  auto grid = ml::default_grid(kind, p, c.seed);
  if (kind == ml::ModelKind::Knn && !c.grid_knn_k.empty()) {
    grid.clear();
    for (const auto& k : split(c.grid_knn_k, ',')) {
      ml::Hyperparams h;
      h.seed = c.seed;
      h.knn_k = parse_number<std::size_t>("grid_knn_k", strip(k));
      grid.push_back(h);
    }
  }
  if (kind == ml::ModelKind::Tree && !c.grid_tree_depth.empty()) {
    grid.clear();
    for (const auto& d : split(c.grid_tree_depth, ',')) {
      ml::Hyperparams h;
      h.seed = c.seed;
      if (strip(d) != "none") h.tree_max_depth = parse_number<std::size_t>("grid_tree_depth", strip(d));
      grid.push_back(h);
    }
  }
  return grid;
}

FeatureTable load_feature_table(const RunConfig& c) {
  if (!fs::exists(c.features)) throw LoadError("missing feature file " + c.features + "; run `encsel featurize` first");
  auto t = load_features(c.features);
  if (c.use_feature_times) {
    if (!fs::exists(c.feature_times)) throw LoadError("use_feature_times is set but " + c.feature_times + " does not exist");
    auto times = feature_times_from_csv(read_text(c.feature_times));
    for (const auto& id : t.instance_ids) {
      auto it = times.find(id);
      if (it == times.end()) throw DataError("no extraction time for '" + id + "' in " + c.feature_times);
      t.extract_seconds.push_back(it->second);
    }
  }
  return t;
}

PerformanceMatrix load_performance(const RunConfig& c) {
  if (!fs::exists(c.performance)) throw LoadError("missing performance file " + c.performance + "; run `encsel solve` first");
  return load_matrix(c.performance);
}

BackendSpec backend_from(const RunConfig& c) {
  BackendSpec b;
  b.kind = parse_backend_kind(c.backend);
  b.seed = c.seed;
  b.grace_s = c.grace_s;
  b.command_template = c.solver_cmd;
  if (b.command_template.empty()) {
    if (const char* env = std::getenv("ENCSEL_SOLVER_CMD")) b.command_template = env;
  }
  if (b.kind == BackendKind::ExternalAsp && b.command_template.empty()) {
    throw ValidationError("external backend needs solver_cmd or ENCSEL_SOLVER_CMD (e.g. 'clingo {program} --time-limit={cutoff}')");
  }
  return b;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encoding selection for hamiltonian cycle ASP programs"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  bool show_config = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> cutoff, grace, low;
  std::optional<std::size_t> workers, folds;
  std::optional<std::string> backend, target, cv_objective, wins, model, job_log;
  std::optional<bool> stratify, feature_times;
  app.add_option("--config", config_path, "TOML-style key = value config file")->check(CLI::ExistingFile);
  app.add_flag("--show-config", show_config, "print the effective configuration and exit");
  app.add_option("--seed", seed, "master seed (default 0)");
  app.add_option("--cutoff", cutoff, "per-run cutoff in seconds (default 200)");
  app.add_option("--workers", workers, "parallel solver jobs (default 1)");
  app.add_option("--backend", backend, "synthetic | reference | external (default synthetic)");
  app.add_option("--grace", grace, "seconds between SIGTERM and SIGKILL for external runs (default 5)");
  app.add_option("--model", model, "knn | tree | forest (default tree)");
  app.add_option("--target", target, "log | raw runtime target (default log)");
  app.add_option("--cv-objective", cv_objective, "rmse | selection-gap (default rmse)");
  app.add_option("--folds", folds, "cross-validation folds (default 10)");
  app.add_option("--wins", wins, "all | first: which tied encodings count as a win (default all)");
  app.add_option("--stratify", stratify, "stratify the train/test split by fastest encoding (default true)");
  app.add_option("--feature-times", feature_times, "report runtime including feature extraction (default false)");
  app.add_option("--low", low, "lower edge of the reasonably-hard window in seconds (default 50)");
  app.add_option("--job-log", job_log, "file for per-job log lines (default stderr)");

  auto* gen = app.add_subcommand("gen", "generate instances into instances_dir");
  std::string family = "grid", hole;
  std::size_t side = 4, rows = 5, cut_depth = 0, nodes = 10, arcs = 20, count = 1;
  gen->add_option("--family", family, "grid | triangular | random | mixed")->capture_default_str();
  gen->add_option("--side", side, "grid side")->capture_default_str();
  gen->add_option("--hole", hole, "grid hole as row0,col0,height,width");
  gen->add_option("--rows", rows, "triangular rows")->capture_default_str();
  gen->add_option("--cut-depth", cut_depth, "triangular rows removed from the apex")->capture_default_str();
  gen->add_option("--nodes", nodes, "random digraph nodes")->capture_default_str();
  gen->add_option("--arcs", arcs, "random digraph arcs")->capture_default_str();
  gen->add_option("--count", count, "random graphs (per seed offset) or mixed batch size")->capture_default_str();

  auto* thin = app.add_subcommand("thin", "thin a grid or triangular graph until it loses its hamiltonian cycle");
  std::string window;
  thin->add_option("--family", family, "grid | triangular")->capture_default_str();
  thin->add_option("--side", side, "grid side")->capture_default_str();
  thin->add_option("--hole", hole, "grid hole as row0,col0,height,width");
  thin->add_option("--rows", rows, "triangular rows")->capture_default_str();
  thin->add_option("--cut-depth", cut_depth, "triangular rows removed from the apex")->capture_default_str();
  thin->add_option("--window", window, "also keep steps whose undirected edge count lies in lo,hi");

  auto* harden = app.add_subcommand("harden", "list instances with a run inside [low, cutoff)");

  auto* encode = app.add_subcommand("encode", "render an encoding for one instance");
  int encoding_number = 1;
  std::string instance_id, out_path;
  encode->add_option("--encoding", encoding_number, "encoding 1..6")->capture_default_str();
  encode->add_option("--instance", instance_id, "instance id from the manifest")->required();
  encode->add_option("--out", out_path, "output file (default stdout)");

  auto* solve = app.add_subcommand("solve", "run every encoding on every instance");
  std::string only;
  solve->add_option("--only", only, "restrict to the ids in this instance_id list (e.g. hard.csv)");

  auto* featurize = app.add_subcommand("featurize", "extract the feature table");
  auto* train = app.add_subcommand("train", "split, tune and fit one runtime model per encoding");
  auto* select = app.add_subcommand("select", "print the selected encoding per instance");
  select->add_option("--instance", instance_id, "a single instance id (default all featurized instances)");
  auto* evaluate = app.add_subcommand("evaluate", "score single encodings, the oracle and the learned selector on the test split");
  bool all_instances = false;
  evaluate->add_flag("--all", all_instances, "evaluate on every instance instead of the test split");
  auto* report = app.add_subcommand("report", "print a saved report");
  std::string import_path;
  report->add_option("--import", import_path, "render a published summary CSV (policy, solved%, avg, wins) instead");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) load_config(cfg, config_path);
    if (seed) cfg.seed = *seed;
    if (cutoff) cfg.cutoff_s = *cutoff;
    if (workers) cfg.workers = *workers;
    if (backend) cfg.backend = *backend;
    if (grace) cfg.grace_s = *grace;
    if (model) cfg.model = *model;
    if (target) cfg.target = *target;
    if (cv_objective) cfg.cv_objective = *cv_objective;
    if (folds) cfg.folds = *folds;
    if (wins) cfg.wins = *wins;
    if (stratify) cfg.stratify = *stratify;
    if (feature_times) cfg.use_feature_times = *feature_times;
    if (low) cfg.hard_low_s = *low;
    if (job_log) cfg.job_log = *job_log;
    validate(cfg);

    if (show_config) {
      for (const auto& [k, v] : cfg.kv()) std::cout << k << " = " << v << "\n";
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return 2;
    }

    if (gen->parsed()) {
      std::vector<GeneratedInstance> batch;
      if (family == "grid") {
        GridSpec spec{side, parse_hole(hole), false};
        batch.push_back({instance_name("grid", grid_params(spec), cfg.seed, 0), "grid", grid_params(spec), cfg.seed, 0, gen_grid(spec), std::nullopt});
      } else if (family == "triangular") {
        TriangularSpec spec{rows, cut_depth};
        batch.push_back({instance_name("tri", triangular_params(spec), cfg.seed, 0), "tri", triangular_params(spec), cfg.seed, 0, gen_triangular(spec),
                         std::nullopt});
      } else if (family == "random") {
        for (std::size_t i = 0; i < count; ++i) {
          std::uint64_t s = cfg.seed + i;
          batch.push_back({instance_name("random", random_params(nodes, arcs), s, 0), "random", random_params(nodes, arcs), s, 0,
                           gen_random_digraph(nodes, arcs, s), std::nullopt});
        }
      } else if (family == "mixed") {
        batch = generate_mixed_batch(count, cfg.seed);
      } else {
        throw ValidationError("unknown family '" + family + "' (expected grid, triangular, random or mixed)");
      }
      write_batch(cfg, batch);
    } else if (thin->parsed()) {
      DirectedGraph start;
      std::string fam, params;
      if (family == "grid") {
        GridSpec spec{side, parse_hole(hole), false};
        start = gen_grid(spec);
        fam = "grid";
        params = grid_params(spec);
      } else if (family == "triangular") {
        TriangularSpec spec{rows, cut_depth};
        start = gen_triangular(spec);
        fam = "tri";
        params = triangular_params(spec);
      } else {
        throw ValidationError("thin supports the grid and triangular families");
      }
      std::optional<std::pair<std::size_t, std::size_t>> win;
      if (!window.empty()) {
        auto f = split(window, ',');
        if (f.size() != 2) throw ValidationError("--window expects lo,hi");
        win = std::make_pair(parse_number<std::size_t>("window", f[0]), parse_number<std::size_t>("window", f[1]));
      }
      auto traj = thin_until_nonhamiltonian(start, cfg.seed);
      std::vector<GeneratedInstance> batch;
      for (const auto& s : sample_trajectory(traj, win)) {
        batch.push_back({instance_name(fam, params, cfg.seed, s.step), fam, params, cfg.seed, s.step, *s.graph, s.hamiltonian});
      }
      std::cerr << "trajectory of " << traj.steps.size() << " removals\n";
      write_batch(cfg, batch);
    } else if (harden->parsed()) {
      auto hard = filter_reasonably_hard(load_performance(cfg), cfg.hard_low_s, cfg.cutoff_s);
      std::string out = "instance_id\n";
      for (const auto& id : hard) out += id + "\n";
      write_text(cfg.hard, out);
      std::cerr << hard.size() << " reasonably hard instance(s) written to " << cfg.hard << "\n";
    } else if (encode->parsed()) {
      auto inst = load_instance(cfg, instance_id);
      auto program = render_program(EncodingId(encoding_number), inst.graph);
      if (out_path.empty()) {
        std::cout << program;
      } else {
        write_text(out_path, program);
      }
    } else if (solve->parsed()) {
      auto ids = only.empty() ? manifest_ids(cfg) : read_id_list(only);
      auto instances = load_instances(cfg, ids);
      auto backend_spec = backend_from(cfg);
      std::ofstream log_file;
      if (!cfg.job_log.empty()) {
        log_file.open(cfg.job_log, std::ios::trunc);
        if (!log_file) throw Error("cannot write " + cfg.job_log);
      }
      std::ostream& log = cfg.job_log.empty() ? std::cerr : log_file;
      auto encs = all_encoding_ids();
      auto matrix = run_matrix(backend_spec, instances, {encs.begin(), encs.end()}, cfg.cutoff_s, cfg.workers, [&](const JobRecord& r) {
        log << "job instance=" << r.instance_id << " encoding=" << r.encoding.value() << " status=" << to_string(r.outcome.status)
            << " runtime_s=" << format_decimal(r.outcome.runtime_s, 3);
        if (!r.outcome.detail.empty()) log << " detail=\"" << r.outcome.detail.substr(0, 200) << "\"";
        log << "\n";
      });
      save_matrix(matrix, cfg.performance);
      auto errors = error_cells(matrix);
      std::cerr << "wrote " << cfg.performance << " (" << instances.size() << " x 6, " << errors.size() << " ERROR cell(s))\n";
    } else if (featurize->parsed()) {
      auto catalog = default_catalog(cfg.beam_width);
      auto table = build_feature_table(load_instances(cfg, manifest_ids(cfg)), catalog);
      save_features(table, cfg.features);
      write_text(cfg.catalog, catalog_to_json(catalog).dump(1) + "\n");
      write_text(cfg.feature_times, feature_times_csv(table));
      for (const auto& [id, msg] : table.row_errors) std::cerr << "feature error: " << id << ": " << msg << "\n";
      std::cerr << "wrote " << cfg.features << " (" << table.rows.size() << " rows, " << table.names.size() << " features)\n";
      if (!table.row_errors.empty()) return 1;
    } else if (train->parsed()) {
      auto matrix = load_performance(cfg);
      auto features = load_feature_table(cfg);
      auto sp = train_test_split(matrix, matrix.instances(), cfg.test_fraction, cfg.seed, cfg.stratify);
      write_text(cfg.split, split_to_csv(sp));
      TrainOptions opt;
      opt.kind = ml::parse_model_kind(cfg.model);
      opt.transform = ml::parse_target_transform(cfg.target);
      opt.objective = parse_cv_objective(cfg.cv_objective);
      opt.folds = cfg.folds;
      opt.seed = cfg.seed;
      opt.grid = config_grid(cfg, opt.kind, features.names.size());
      auto result = train_models(matrix, features, sp.train, opt);
      for (std::size_t i = 0; i < result.models.size(); ++i) {
        ml::save_model(result.models[i], model_path(cfg, result.models[i].encoding));
        const auto& d = result.details[i];
        std::cerr << to_string(d.encoding) << ": " << d.rows << " rows, " << ml::describe(opt.kind, d.search.best) << ", cv "
                  << to_string(opt.objective) << " " << format_decimal(d.search.scores[d.search.best_index], 4) << "\n";
      }
      std::cerr << "train " << sp.train.size() << " / test " << sp.test.size() << "; models in " << cfg.models_dir << "\n";
    } else if (select->parsed()) {
      auto features = load_feature_table(cfg);
      auto models = load_models(cfg, features.names);
      std::vector<std::string> ids = instance_id.empty() ? features.instance_ids : std::vector<std::string>{instance_id};
      std::cout << "instance_id,encoding_id\n";
      for (const auto& id : ids) {
        const auto& row = features.rows[features.row_of(id)];
        std::cout << id << "," << select_encoding(models, features.names, row).value() << "\n";
      }
    } else if (evaluate->parsed()) {
      auto features = load_feature_table(cfg);
      auto models = load_models(cfg, features.names);
      auto matrix = load_performance(cfg);
      std::vector<std::string> ids;
      if (all_instances) {
        ids = matrix.instances();
      } else {
        if (!fs::exists(cfg.split)) throw LoadError("missing split file " + cfg.split + "; run `encsel train` first or pass --all");
        ids = split_from_csv(read_text(cfg.split)).test;
      }
      EvaluationOptions eo;
      eo.wins = parse_wins_rule(cfg.wins);
      auto rep = build_report({learned_policy(models, policy_label(models.front().kind()))}, matrix, &features, ids, eo);
      rep.config = cfg.to_json();
      rep.config["evaluated_on"] = all_instances ? "all" : "test";
      write_text(cfg.report, report_to_json(rep).dump(1) + "\n");
      std::cout << report_to_text(rep);
    } else if (report->parsed()) {
      if (!import_path.empty()) {
        std::cout << report_to_text(import_summary(read_text(import_path)));
      } else {
        if (!fs::exists(cfg.report)) throw LoadError("missing report " + cfg.report + "; run `encsel evaluate` first");
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(read_text(cfg.report));
        } catch (const nlohmann::json::exception& e) {
          throw LoadError(cfg.report + ": " + e.what());
        }
        std::cout << report_to_text(report_from_json(j));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "encsel: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
