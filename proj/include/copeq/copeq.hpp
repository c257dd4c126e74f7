#pragma once

// Umbrella header: rank-based K-sample copula equality testing.

#include "copeq/chi_square.hpp"
#include "copeq/clustering.hpp"
#include "copeq/coefficients.hpp"
#include "copeq/copulas.hpp"
#include "copeq/csv.hpp"
#include "copeq/distributions.hpp"
#include "copeq/experiment.hpp"
#include "copeq/index_set.hpp"
#include "copeq/ksample.hpp"
#include "copeq/legendre.hpp"
#include "copeq/matrix.hpp"
#include "copeq/rng.hpp"
#include "copeq/sample.hpp"
#include "copeq/tuning.hpp"
