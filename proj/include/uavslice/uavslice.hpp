#pragma once

// Umbrella header.
#include "uavslice/baselines.hpp"
#include "uavslice/config.hpp"
#include "uavslice/env.hpp"
#include "uavslice/errors.hpp"
#include "uavslice/learn/checkpoint.hpp"
#include "uavslice/learn/dqn.hpp"
#include "uavslice/learn/mlp.hpp"
#include "uavslice/learn/observation.hpp"
#include "uavslice/learn/replay.hpp"
#include "uavslice/learn/trainer.hpp"
#include "uavslice/metrics.hpp"
#include "uavslice/oracle.hpp"
#include "uavslice/radio.hpp"
#include "uavslice/rng.hpp"
#include "uavslice/rollout.hpp"
#include "uavslice/slicing.hpp"
#include "uavslice/stats.hpp"
