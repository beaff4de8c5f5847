#pragma once

#include "encsel/encodings.hpp"
#include "encsel/features.hpp"
#include "encsel/graph.hpp"
#include "encsel/hamiltonian.hpp"
#include "encsel/instance_gen.hpp"
#include "encsel/ml/cv.hpp"
#include "encsel/ml/feature_selection.hpp"
#include "encsel/ml/runtime_model.hpp"
#include "encsel/performance.hpp"
#include "encsel/pipeline.hpp"
#include "encsel/runner.hpp"
#include "encsel/selection.hpp"
#include "encsel/traversal.hpp"
