#pragma once

#include "riskmdp/axioms.hpp"
#include "riskmdp/bellman.hpp"
#include "riskmdp/bounds.hpp"
#include "riskmdp/distortion.hpp"
#include "riskmdp/distribution.hpp"
#include "riskmdp/error.hpp"
#include "riskmdp/examples.hpp"
#include "riskmdp/model.hpp"
#include "riskmdp/risk_measure.hpp"
#include "riskmdp/robust.hpp"
#include "riskmdp/solvers.hpp"
