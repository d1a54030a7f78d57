#pragma once

#include "ldvdd/dataset.hpp"
#include "ldvdd/design.hpp"
#include "ldvdd/effects.hpp"
#include "ldvdd/errors.hpp"
#include "ldvdd/estimators.hpp"
#include "ldvdd/families.hpp"
#include "ldvdd/optimize.hpp"
#include "ldvdd/rng.hpp"
#include "ldvdd/simulate.hpp"
#include "ldvdd/vcov.hpp"
