#pragma once

#include <realism/core.hpp>
#include <realism/models.hpp>
#include <realism/mixture.hpp>
#include <realism/critic.hpp>
#include <realism/typicality.hpp>
#include <realism/complexity.hpp>
#include <realism/divergence.hpp>
#include <realism/continuous.hpp>
#include <realism/bench.hpp>
