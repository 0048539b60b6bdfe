#pragma once

#include "thermoflow/asymptotics.hpp"
#include "thermoflow/convertibility.hpp"
#include "thermoflow/error.hpp"
#include "thermoflow/lorenz.hpp"
#include "thermoflow/oneshot.hpp"
#include "thermoflow/simplex.hpp"
#include "thermoflow/tensor_power.hpp"
#include "thermoflow/theory.hpp"
#include "thermoflow/types.hpp"
