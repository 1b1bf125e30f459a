#pragma once

#include "linrule/bounds.hpp"
#include "linrule/csv.hpp"
#include "linrule/errors.hpp"
#include "linrule/experiment.hpp"
#include "linrule/parallel.hpp"
#include "linrule/risk.hpp"
#include "linrule/rules.hpp"
#include "linrule/sampler.hpp"
#include "linrule/spectra.hpp"
