#pragma once

#include "zdaudit/error.hpp"
#include "zdaudit/game.hpp"
#include "zdaudit/chain.hpp"
#include "zdaudit/zd_control.hpp"
#include "zdaudit/diff_optimizer.hpp"
#include "zdaudit/simulator.hpp"
#include "zdaudit/experiments.hpp"
