#pragma once

#include "schmidtnorm/core.hpp"
#include "schmidtnorm/json_io.hpp"
#include "schmidtnorm/opnorm.hpp"
#include "schmidtnorm/random.hpp"
#include "schmidtnorm/schmidt.hpp"
#include "schmidtnorm/werner.hpp"
#include "schmidtnorm/witness.hpp"
