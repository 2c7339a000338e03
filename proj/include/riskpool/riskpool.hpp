#pragma once

#include "riskpool/model.hpp"
#include "riskpool/state_space.hpp"
#include "riskpool/fitness.hpp"
#include "riskpool/markov.hpp"
#include "riskpool/montecarlo.hpp"
#include "riskpool/sweeps.hpp"
#include "riskpool/config.hpp"
#include "riskpool/io.hpp"
