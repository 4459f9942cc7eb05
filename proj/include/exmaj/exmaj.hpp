// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "exmaj/constants.hpp"
#include "exmaj/error.hpp"
#include "exmaj/fields.hpp"
#include "exmaj/geometry.hpp"
#include "exmaj/harmonics.hpp"
#include "exmaj/majorant.hpp"
#include "exmaj/manufactured.hpp"
#include "exmaj/minorant.hpp"
#include "exmaj/norms.hpp"
#include "exmaj/poincare.hpp"
#include "exmaj/radial_fem.hpp"
#include "exmaj/report.hpp"
#include "exmaj/scenario.hpp"
#include "exmaj/summation.hpp"
#include "exmaj/trace.hpp"
