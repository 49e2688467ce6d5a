#pragma once

#include "basket_taylor/conditional_pricer.hpp"
#include "basket_taylor/core_model.hpp"
#include "basket_taylor/error.hpp"
#include "basket_taylor/gaussian_moments.hpp"
#include "basket_taylor/jet.hpp"
#include "basket_taylor/monte_carlo.hpp"
#include "basket_taylor/rng.hpp"
#include "basket_taylor/taylor_engine.hpp"
