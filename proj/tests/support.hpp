// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

// Shared generators for the property tests.

#pragma once

#include "exmaj/fields.hpp"

#include <cstdint>
#include <random>

namespace exmaj::testing
{

/// Random smooth field supported in a sub-shell of (r0, r1): a bump profile
/// times a random combination of low-degree angular modes.
inline ScalarField
random_bump_field( int dimension, double r0, double r1, std::uint64_t seed, int max_degree = 2 )
{
   std::mt19937_64 gen( seed );
   std::uniform_real_distribution<double> unit( 0.0, 1.0 );
   const double w = r1 - r0;
   const double lo = r0 + ( 0.05 + 0.4 * unit( gen ) ) * w;
   const double top = std::min( lo + ( 0.2 + 0.3 * unit( gen ) ) * w, r1 - 0.02 * w );
   const AngularBasis basis( dimension, max_degree );
   ScalarField f = constant_field( 0.0 );
   for( std::size_t k = 0; k < basis.size(); ++k )
   {
      const double c = 2.0 * unit( gen ) - 1.0;
      f = f + separated_field( dimension, radial_bump( lo, top, c ), &basis, k );
   }
   f.label = "random_bump";
   return f;
}

} // namespace exmaj::testing
