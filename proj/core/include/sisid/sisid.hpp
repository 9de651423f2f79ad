#pragma once

#include "sisid/config.hpp"
#include "sisid/dynamics.hpp"
#include "sisid/errors.hpp"
#include "sisid/estimators.hpp"
#include "sisid/excitation.hpp"
#include "sisid/experiment.hpp"
#include "sisid/numerics.hpp"
