#pragma once

#include <catch_amalgamated.hpp>

#include "oracle.hpp"
