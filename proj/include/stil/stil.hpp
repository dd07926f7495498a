#pragma once

#include "stil/error.hpp"
#include "stil/geom.hpp"
#include "stil/relations.hpp"
#include "stil/model.hpp"
#include "stil/qsr.hpp"
#include "stil/kernel.hpp"
#include "stil/fluents.hpp"
#include "stil/analytic/encode.hpp"
#include "stil/ilp/learner.hpp"
#include "stil/data/config.hpp"
#include "stil/data/generators.hpp"
