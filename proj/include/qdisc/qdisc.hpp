#pragma once

#include "qdisc/bounds.hpp"
#include "qdisc/constructions.hpp"
#include "qdisc/ensemble.hpp"
#include "qdisc/error.hpp"
#include "qdisc/linalg.hpp"
#include "qdisc/measurement.hpp"
#include "qdisc/random.hpp"
#include "qdisc/solvers.hpp"
