// Umbrella header for the joint input-parameter-state identification toolkit.
#pragma once

#include "klid/chain_model.hpp"
#include "klid/errors.hpp"
#include "klid/estimator_common.hpp"
#include "klid/pseudo.hpp"
#include "klid/rkf.hpp"
#include "klid/runner.hpp"
#include "klid/scenario.hpp"
#include "klid/selection.hpp"
#include "klid/simulation.hpp"
#include "klid/state_space.hpp"
#include "klid/ukf.hpp"
