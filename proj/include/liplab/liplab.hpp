#pragma once

#include "liplab/errors.hpp"
#include "liplab/length_metric.hpp"
#include "liplab/lipschitz.hpp"
#include "liplab/metric_space.hpp"
#include "liplab/sard.hpp"
#include "liplab/spacegen.hpp"
#include "liplab/types.hpp"
