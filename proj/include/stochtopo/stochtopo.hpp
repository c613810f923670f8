#pragma once

#include "stochtopo/rng.hpp"
#include "stochtopo/simulation.hpp"
#include "stochtopo/embedding.hpp"
#include "stochtopo/persistence.hpp"
#include "stochtopo/reduction_oracle.hpp"
#include "stochtopo/diagram_distances.hpp"
#include "stochtopo/diagram_features.hpp"
#include "stochtopo/stat_features.hpp"
#include "stochtopo/classifiers.hpp"
#include "stochtopo/evaluation.hpp"
#include "stochtopo/parallel.hpp"
#include "stochtopo/featurize.hpp"
#include "stochtopo/io.hpp"
#include "stochtopo/experiment.hpp"
