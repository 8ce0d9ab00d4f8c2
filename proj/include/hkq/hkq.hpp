#pragma once

// Hyper-Kaehler Lie groups G_theta, their moment maps under left translation
// by abelian subgroups, and the resulting quotient metrics.

#include "hkq/classify.hpp"
#include "hkq/curvature.hpp"
#include "hkq/error.hpp"
#include "hkq/group.hpp"
#include "hkq/io.hpp"
#include "hkq/liealg.hpp"
#include "hkq/moment.hpp"
#include "hkq/parallel.hpp"
#include "hkq/quaternion.hpp"
#include "hkq/quotient.hpp"
#include "hkq/sampling.hpp"
#include "hkq/spec.hpp"
