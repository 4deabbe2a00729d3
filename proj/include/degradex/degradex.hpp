#pragma once

#include "degradex/core.hpp"
#include "degradex/evaluation.hpp"
#include "degradex/inference.hpp"
#include "degradex/io.hpp"
#include "degradex/likelihood.hpp"
#include "degradex/optimizer.hpp"
#include "degradex/parallel.hpp"
#include "degradex/reliability.hpp"
#include "degradex/rng.hpp"
#include "degradex/synth.hpp"
#include "degradex/types.hpp"
