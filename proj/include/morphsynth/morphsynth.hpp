#pragma once

#include "model.hpp"
#include "morphfile.hpp"
#include "oracle.hpp"
#include "quality.hpp"
#include "synthesis.hpp"
#include "trajectory.hpp"
