#pragma once

// Umbrella header.

#include "biostate/ari.hpp"
#include "biostate/cluster_model.hpp"
#include "biostate/cohort_csv.hpp"
#include "biostate/csv.hpp"
#include "biostate/error.hpp"
#include "biostate/gmm.hpp"
#include "biostate/json_io.hpp"
#include "biostate/kmeans.hpp"
#include "biostate/linkage.hpp"
#include "biostate/matrix.hpp"
#include "biostate/model_selection.hpp"
#include "biostate/numeric.hpp"
#include "biostate/panel.hpp"
#include "biostate/pca.hpp"
#include "biostate/pipeline.hpp"
#include "biostate/profiles.hpp"
#include "biostate/rng.hpp"
#include "biostate/screening.hpp"
#include "biostate/seedgen.hpp"
#include "biostate/silhouette.hpp"
#include "biostate/svg.hpp"
#include "biostate/version.hpp"
