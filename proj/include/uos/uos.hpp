#pragma once

#include "uos/altmin.hpp"
#include "uos/analysis.hpp"
#include "uos/errors.hpp"
#include "uos/experiments.hpp"
#include "uos/instance.hpp"
#include "uos/io.hpp"
#include "uos/matching.hpp"
#include "uos/parallel.hpp"
#include "uos/rip.hpp"
#include "uos/rng.hpp"
#include "uos/selection.hpp"
