#pragma once

#include "dyson/dyson_flow.hpp"
#include "dyson/encoding.hpp"
#include "dyson/errors.hpp"
#include "dyson/io.hpp"
#include "dyson/model_catalog.hpp"
#include "dyson/operator_core.hpp"
#include "dyson/propagators.hpp"
#include "dyson/verify.hpp"
