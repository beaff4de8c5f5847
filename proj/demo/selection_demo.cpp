// Small tour of the library: render one encoding, then train and evaluate a
// decision-tree selector on a synthetic benchmark.

#include <iostream>

#include "encsel/encsel.hpp"

using namespace encsel;

int main(int argc, char** argv) {
  const std::size_t count = argc > 1 ? std::stoul(argv[1]) : 150;
  const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 1;

  auto g = parse_facts("node(1..4). link(1,2). link(1,3). link(2,1). link(3,4). link(4,2). link(4,3).");
  std::cout << "Encoding 1 on the four-node graph:\n" << render_program(EncodingId(1), g);
  auto counts = static_counts(EncodingId(1), g);
  std::cout << "ground rules " << counts.rules << ", constraints " << counts.constraints << ", problem variables "
            << counts.problem_variables << "\n\n";

  std::vector<Instance> instances;
  for (auto& gi : generate_mixed_batch(count, seed)) instances.push_back({gi.id, gi.graph});
  BackendSpec backend;
  backend.seed = seed;
  auto ids = all_encoding_ids();
  auto matrix = run_matrix(backend, instances, {ids.begin(), ids.end()}, kDefaultCutoffSeconds, 1);
  auto features = build_feature_table(instances, default_catalog());

  auto split = train_test_split(matrix, matrix.instances(), 0.2, seed);
  TrainOptions opt;
  opt.seed = seed;
  auto trained = train_models(matrix, features, split.train, opt);
  auto report = build_report({learned_policy(trained.models, "DT")}, matrix, &features, split.test);
  std::cout << count << " synthetic instances, " << split.test.size() << " held out:\n" << report_to_text(report);
  return 0;
}
