#pragma once

#include "segcap/asymptotics.hpp"
#include "segcap/bounds.hpp"
#include "segcap/capacity.hpp"
#include "segcap/channel.hpp"
#include "segcap/combinatorics.hpp"
#include "segcap/distribution.hpp"
#include "segcap/parallel.hpp"
#include "segcap/sampler.hpp"
#include "segcap/word.hpp"
