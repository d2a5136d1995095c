#pragma once

#include "epscope/errors.hpp"
#include "epscope/model.hpp"
#include "epscope/spectrum.hpp"
#include "epscope/eplocator.hpp"
#include "epscope/expansion.hpp"
#include "epscope/topology.hpp"
#include "epscope/counting.hpp"
#include "epscope/qpt.hpp"
