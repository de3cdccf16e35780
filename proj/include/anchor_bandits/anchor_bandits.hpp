// anchor_bandits.hpp - umbrella header.
#pragma once

#include "analysis.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "environment.hpp"
#include "output.hpp"
#include "policies.hpp"
#include "rng.hpp"
#include "simulator.hpp"
