#pragma once

#include "cofuse/core/error.hpp"
#include "cofuse/core/label.hpp"
#include "cofuse/core/lmb.hpp"
#include "cofuse/core/odds.hpp"
#include "cofuse/core/particle_set.hpp"
#include "cofuse/core/random.hpp"
#include "cofuse/dynamics/ct_model.hpp"
#include "cofuse/dynamics/sensor.hpp"
#include "cofuse/dynamics/state.hpp"
#include "cofuse/experiment/csv.hpp"
#include "cofuse/experiment/evaluate.hpp"
#include "cofuse/experiment/simulate.hpp"
#include "cofuse/filter/association.hpp"
#include "cofuse/filter/birth.hpp"
#include "cofuse/filter/lmb_filter.hpp"
#include "cofuse/fusion/complementary.hpp"
#include "cofuse/fusion/consensus.hpp"
#include "cofuse/fusion/merge.hpp"
#include "cofuse/metrics/assignment.hpp"
#include "cofuse/metrics/ospa.hpp"
#include "cofuse/metrics/report.hpp"
#include "cofuse/network/graph.hpp"
#include "cofuse/network/message.hpp"
#include "cofuse/scenario/config.hpp"
#include "cofuse/scenario/measurements.hpp"
#include "cofuse/scenario/truth.hpp"
