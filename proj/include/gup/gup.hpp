#pragma once

#include "gup/adam.hpp"
#include "gup/augment.hpp"
#include "gup/bench.hpp"
#include "gup/color.hpp"
#include "gup/engine.hpp"
#include "gup/error.hpp"
#include "gup/features.hpp"
#include "gup/grad.hpp"
#include "gup/graph.hpp"
#include "gup/image.hpp"
#include "gup/image_io.hpp"
#include "gup/metrics.hpp"
#include "gup/model.hpp"
#include "gup/resample.hpp"
#include "gup/rng.hpp"
#include "gup/scene.hpp"
#include "gup/solve.hpp"
#include "gup/sparse.hpp"
#include "gup/train.hpp"
