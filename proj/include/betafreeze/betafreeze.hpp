#pragma once

#include "betafreeze/bounds.hpp"
#include "betafreeze/errors.hpp"
#include "betafreeze/experiment.hpp"
#include "betafreeze/hermite.hpp"
#include "betafreeze/linalg.hpp"
#include "betafreeze/rng.hpp"
#include "betafreeze/sampler.hpp"
#include "betafreeze/spectral.hpp"
#include "betafreeze/stats.hpp"
