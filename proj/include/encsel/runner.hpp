#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <regex>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "encsel/encodings.hpp"
#include "encsel/hamiltonian.hpp"
#include "encsel/performance.hpp"
#include "encsel/subprocess.hpp"

namespace encsel {

struct Instance {
  std::string id;
  DirectedGraph graph;
};

enum class BackendKind { ExternalAsp, ReferenceOracle, Synthetic };

inline std::string to_string(BackendKind k) {
  switch (k) {
    case BackendKind::ExternalAsp: return "external";
    case BackendKind::ReferenceOracle: return "reference";
    case BackendKind::Synthetic: return "synthetic";
  }
  return {};
}

inline BackendKind parse_backend_kind(const std::string& s) {
  if (s == "external" || s == "external-asp") return BackendKind::ExternalAsp;
  if (s == "reference" || s == "reference-oracle") return BackendKind::ReferenceOracle;
  if (s == "synthetic") return BackendKind::Synthetic;
  throw ValidationError("unknown backend '" + s + "' (expected external, reference or synthetic)");
}

// Synthetic runtime r = scale * a^alpha * exp(shift * w) * exp(sigma * z), with
// a = max(arc count, 1), w the fraction of arcs without a reverse arc, and z
// standard normal drawn from a hash of (instance id, encoding, seed).
struct SyntheticParams {
  // Per-encoding (scale, alpha, shift); crossing power laws give each encoding
  // a range of sizes on which it is fastest, and the shift moves that range
  // between symmetric and one-way graphs.
  std::array<double, kEncodingCount> scale{};
  std::array<double, kEncodingCount> alpha{};
  std::array<double, kEncodingCount> one_way_shift{};
  double sigma = 0.3;

  // Builds the parameters from per-encoding exponents and the arc count at
  // which each encoding's median runtime reaches `cutoff_s` on a symmetric
  // graph (`sym_threshold`) and on a graph with no reciprocal arcs
  // (`one_way_threshold`).
  static SyntheticParams from_thresholds(const std::array<double, kEncodingCount>& alphas,
                                         const std::array<double, kEncodingCount>& sym_threshold,
                                         const std::array<double, kEncodingCount>& one_way_threshold, double cutoff_s,
                                         double sigma) {
    SyntheticParams p;
    p.sigma = sigma;
    for (std::size_t e = 0; e < kEncodingCount; ++e) {
      if (alphas[e] <= 0 || sym_threshold[e] <= 0 || one_way_threshold[e] <= 0) {
        throw PreconditionError("synthetic parameters must be positive");
      }
      p.alpha[e] = alphas[e];
      p.scale[e] = cutoff_s / std::pow(sym_threshold[e], alphas[e]);
      p.one_way_shift[e] = alphas[e] * std::log(sym_threshold[e] / one_way_threshold[e]);
    }
    return p;
  }

  static SyntheticParams defaults() {
    return from_thresholds({1.6, 2.2, 3.0, 1.1, 2.6, 1.9}, {140.0, 150.0, 120.0, 320.0, 135.0, 100.0},
                           {140.0, 150.0, 120.0, 180.0, 135.0, 330.0}, kDefaultCutoffSeconds, 0.2);
  }
};

struct BackendSpec {
  BackendKind kind = BackendKind::Synthetic;
  // External only: shell command with `{program}` and `{cutoff}` placeholders.
  std::string command_template;
  std::uint64_t seed = 0;  // synthetic only
  SyntheticParams synthetic = SyntheticParams::defaults();
  double grace_s = 5.0;  // external only: SIGKILL this long after SIGTERM
};

// Standard normal deviate fixed by (instance, encoding, seed).
inline double synthetic_noise(const std::string& instance_id, EncodingId enc, std::uint64_t seed) {
  std::uint64_t h = fnv1a(instance_id);
  h = fnv1a(std::to_string(enc.value()) + "/" + std::to_string(seed), h);
  std::mt19937_64 rng(h);
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng);
}

// Fraction of arcs whose reverse arc is absent; 0 for an arcless graph.
inline double one_way_fraction(const DirectedGraph& g) {
  if (g.arc_count() == 0) return 0.0;
  std::size_t one_way = 0;
  for (const Arc& arc : g.arcs()) one_way += !g.has_arc(arc.to, arc.from);
  return static_cast<double>(one_way) / static_cast<double>(g.arc_count());
}

// Median synthetic runtime, i.e. without the noise factor.
inline double synthetic_median(const SyntheticParams& p, EncodingId enc, std::size_t arcs, double one_way) {
  const double a = std::max<double>(1.0, static_cast<double>(arcs));
  const std::size_t e = enc.slot();
  return p.scale[e] * std::pow(a, p.alpha[e]) * std::exp(p.one_way_shift[e] * one_way);
}

// Unclipped synthetic runtime.
inline double synthetic_runtime(const SyntheticParams& p, EncodingId enc, const Instance& inst, std::uint64_t seed) {
  return synthetic_median(p, enc, inst.graph.arc_count(), one_way_fraction(inst.graph)) *
         std::exp(p.sigma * synthetic_noise(inst.id, enc, seed));
}

// Probability that the synthetic backend solves the instance within the cutoff.
inline double synthetic_solve_probability(const SyntheticParams& p, EncodingId enc, std::size_t arcs, double one_way,
                                          double cutoff_s) {
  const double z = (std::log(cutoff_s) - std::log(synthetic_median(p, enc, arcs, one_way))) / p.sigma;
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

namespace detail {

inline std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
  return text;
}

inline std::filesystem::path scratch_program_path() {
  static std::atomic<std::uint64_t> counter{0};
  auto dir = std::filesystem::temp_directory_path() / "encsel";
  std::filesystem::create_directories(dir);
  return dir / ("job_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".lp");
}

// Reads the solver verdict from its output. UNKNOWN means the solver gave up
// on its own limit, which is treated as a timeout.
inline std::optional<RunStatus> scan_verdict(const std::string& output) {
  static const std::regex unsat(R"((^|\s)UNSATISFIABLE(\s|$))");
  static const std::regex sat(R"((^|\s)SATISFIABLE(\s|$))");
  static const std::regex unknown(R"((^|\s)UNKNOWN(\s|$))");
  if (std::regex_search(output, unsat)) return RunStatus::UNSAT;
  if (std::regex_search(output, sat)) return RunStatus::SAT;
  if (std::regex_search(output, unknown)) return RunStatus::TIMEOUT;
  return std::nullopt;
}

inline RunOutcome solve_external(const BackendSpec& backend, EncodingId enc, const Instance& inst, double cutoff_s) {
  if (backend.command_template.empty()) return make_outcome(RunStatus::ERROR, 0.0, cutoff_s, "no external command configured");
  auto program = scratch_program_path();
  write_text(program, render_program(enc, inst.graph));
  std::string command = replace_all(backend.command_template, "{program}", program.string());
  command = replace_all(command, "{cutoff}", std::to_string(static_cast<long long>(std::ceil(cutoff_s))));
  ProcessResult proc = run_shell(command, cutoff_s, backend.grace_s);
  std::error_code ec;
  std::filesystem::remove(program, ec);

  if (!proc.started) return make_outcome(RunStatus::ERROR, 0.0, cutoff_s, "failed to start: " + command);
  if (proc.timed_out) return make_outcome(RunStatus::TIMEOUT, cutoff_s, cutoff_s);
  auto verdict = scan_verdict(proc.output);
  // Exit codes of clasp-style solvers: 10 SAT, 20 UNSAT, 30 SAT and exhausted; 0 from wrappers.
  const bool accepted_exit = proc.exit_code == 0 || proc.exit_code == 10 || proc.exit_code == 20 || proc.exit_code == 30;
  if (!accepted_exit) {
    return make_outcome(RunStatus::ERROR, proc.wall_s, cutoff_s,
                        "exit status " + std::to_string(proc.exit_code) + " signal " + std::to_string(proc.term_signal) + ": " + proc.output);
  }
  if (!verdict) return make_outcome(RunStatus::ERROR, proc.wall_s, cutoff_s, "no verdict in solver output: " + proc.output);
  return make_outcome(*verdict, proc.wall_s, cutoff_s);
}

}  // namespace detail

inline RunOutcome solve_one(const BackendSpec& backend, EncodingId enc, const Instance& inst, double cutoff_s) {
  if (!(cutoff_s > 0)) throw PreconditionError("cutoff must be positive");
  switch (backend.kind) {
    case BackendKind::ExternalAsp:
      return detail::solve_external(backend, enc, inst, cutoff_s);
    case BackendKind::ReferenceOracle: {
      auto start = std::chrono::steady_clock::now();
      bool ham = is_hamiltonian(inst.graph);
      double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return make_outcome(ham ? RunStatus::SAT : RunStatus::UNSAT, wall, cutoff_s);
    }
    case BackendKind::Synthetic: {
      double r = synthetic_runtime(backend.synthetic, enc, inst, backend.seed);
      return make_outcome(r < cutoff_s ? RunStatus::SAT : RunStatus::TIMEOUT, std::min(r, cutoff_s), cutoff_s);
    }
  }
  return make_outcome(RunStatus::ERROR, 0.0, cutoff_s, "unknown backend");
}

struct JobRecord {
  std::string instance_id;
  EncodingId encoding;
  RunOutcome outcome;
};

// Runs every (instance, encoding) job on `workers` threads. Results are
// assembled by key, so the matrix does not depend on scheduling. The
// optional logger sees jobs in matrix order after all of them finished.
inline PerformanceMatrix run_matrix(const BackendSpec& backend, const std::vector<Instance>& instances,
                                    const std::vector<EncodingId>& encodings, double cutoff_s, std::size_t workers,
                                    const std::function<void(const JobRecord&)>& log = {}) {
  if (workers < 1) throw PreconditionError("workers must be at least 1");
  PerformanceMatrix matrix(cutoff_s, encodings);
  const auto& cols = matrix.encodings();
  const std::size_t jobs = instances.size() * cols.size();
  std::vector<RunOutcome> results(jobs);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      results[j] = solve_one(backend, cols[j % cols.size()], instances[j / cols.size()], cutoff_s);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::min(workers, std::max<std::size_t>(jobs, 1)); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (const auto& inst : instances) matrix.add_instance(inst.id);
  for (std::size_t j = 0; j < jobs; ++j) {
    const auto& inst = instances[j / cols.size()];
    EncodingId enc = cols[j % cols.size()];
    if (log) log({inst.id, enc, results[j]});
    matrix.set(inst.id, enc, std::move(results[j]));
  }
  return matrix;
}

// "(instance, encoding)" labels of every ERROR cell.
inline std::vector<std::string> error_cells(const PerformanceMatrix& m) {
  std::vector<std::string> out;
  for (std::size_t r = 0; r < m.instance_count(); ++r) {
    for (std::size_t c = 0; c < m.encodings().size(); ++c) {
      const auto& cell = m.cell(r, c);
      if (cell && cell->status == RunStatus::ERROR) out.push_back("(" + m.instances()[r] + ", " + std::to_string(m.encodings()[c].value()) + ")");
    }
  }
  return out;
}

}  // namespace encsel
