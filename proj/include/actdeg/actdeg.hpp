#pragma once

#include "actdeg/closed_loop.hpp"
#include "actdeg/conic.hpp"
#include "actdeg/degradation.hpp"
#include "actdeg/errors.hpp"
#include "actdeg/f16.hpp"
#include "actdeg/interior_point.hpp"
#include "actdeg/io.hpp"
#include "actdeg/lmi.hpp"
#include "actdeg/lti.hpp"
#include "actdeg/sim.hpp"
#include "actdeg/synthesis.hpp"
