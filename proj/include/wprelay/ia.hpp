#pragma once

#include "wprelay/ia/driver.hpp"
#include "wprelay/ia/expansion.hpp"
#include "wprelay/ia/subproblem.hpp"
#include "wprelay/ia/surrogates.hpp"
