#pragma once

// Umbrella header for the whole library.

#include "lhnn/checkpoint.hpp"
#include "lhnn/cli.hpp"
#include "lhnn/density_spec.hpp"
#include "lhnn/diagnostics.hpp"
#include "lhnn/errors.hpp"
#include "lhnn/integrate.hpp"
#include "lhnn/io.hpp"
#include "lhnn/logistic.hpp"
#include "lhnn/loss.hpp"
#include "lhnn/network.hpp"
#include "lhnn/nuts.hpp"
#include "lhnn/phase.hpp"
#include "lhnn/provider.hpp"
#include "lhnn/rng.hpp"
#include "lhnn/samplers.hpp"
#include "lhnn/target.hpp"
#include "lhnn/train.hpp"
