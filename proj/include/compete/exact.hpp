#pragma once

#include "compete/exact/checks.hpp"
#include "compete/exact/dynamics.hpp"
#include "compete/exact/perturbation.hpp"
#include "compete/exact/prior.hpp"
#include "compete/exact/reward_curve.hpp"
