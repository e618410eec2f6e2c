#pragma once

// Everything the library offers, in one include.

#include "metriko/bench.hpp"
#include "metriko/classify.hpp"
#include "metriko/data.hpp"
#include "metriko/dataset.hpp"
#include "metriko/dml_constrained.hpp"
#include "metriko/dml_eigen.hpp"
#include "metriko/dml_gradient.hpp"
#include "metriko/harness.hpp"
#include "metriko/kernel.hpp"
#include "metriko/learners.hpp"
#include "metriko/linalg.hpp"
#include "metriko/metric.hpp"
#include "metriko/optim.hpp"
