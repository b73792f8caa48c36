#pragma once

#include "seterm/closure.hpp"
#include "seterm/convex.hpp"
#include "seterm/ep_suprema.hpp"
#include "seterm/erm.hpp"
#include "seterm/harness.hpp"
#include "seterm/isotonic.hpp"
#include "seterm/max_flow.hpp"
#include "seterm/point_cloud.hpp"
#include "seterm/poset.hpp"
#include "seterm/region.hpp"
#include "seterm/rng.hpp"
#include "seterm/set_class.hpp"
#include "seterm/theory.hpp"
