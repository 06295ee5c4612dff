#pragma once

#include "scada_ids/cascade.hpp"
#include "scada_ids/dataset.hpp"
#include "scada_ids/error.hpp"
#include "scada_ids/forest.hpp"
#include "scada_ids/imputation.hpp"
#include "scada_ids/label.hpp"
#include "scada_ids/metrics.hpp"
#include "scada_ids/partitioning.hpp"
#include "scada_ids/reference_counts.hpp"
#include "scada_ids/rng.hpp"
#include "scada_ids/synthetic.hpp"
#include "scada_ids/taxonomy.hpp"
