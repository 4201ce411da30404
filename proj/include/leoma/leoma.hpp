#pragma once

#include "leoma/orbit.hpp"
#include "leoma/channel.hpp"
#include "leoma/fp.hpp"
#include "leoma/beamformer.hpp"
#include "leoma/placement.hpp"
#include "leoma/solver.hpp"
#include "leoma/scenario.hpp"
