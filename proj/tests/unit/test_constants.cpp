// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#include "catch_amalgamated.hpp"

#include "exmaj/constants.hpp"
#include "exmaj/norms.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace exmaj;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

using testing::shooting_eigenvalue;

/// Energy of the harmonic degree-l profile with psi(a) = 1, psi(c) = 0 in
/// N = 3: psi = alpha r^l + beta r^{-(l+1)}, energy = -a^2 psi'(a).
double
harmonic_extension_energy( int l, double a, double c )
{
   const double p = l, q = -( l + 1.0 );
   // alpha a^p + beta a^q = 1, alpha c^p + beta c^q = 0
   const double det = std::pow( a, p ) * std::pow( c, q ) - std::pow( a, q ) * std::pow( c, p );
   const double alpha = std::pow( c, q ) / det, beta = -std::pow( c, p ) / det;
   const double dpsi = alpha * p * std::pow( a, p - 1 ) + beta * q * std::pow( a, q - 1 );
   return -a * a * dpsi;
}

} // namespace

TEST_CASE( "Poincare constant c_N", "[constants]" )
{
   CHECK( c_N( 3 ) == 2.0 );
   CHECK( c_N( 4 ) == 1.0 );
   CHECK( c_N( 2 ) == 2.0 );
   CHECK( c_N( 1 ) == 2.0 );
   CHECK( c_N( 6 ) == 0.5 );
}

TEST_CASE( "formula residual weight", "[constants]" )
{
   CHECK( c_o_formula( ExteriorDomain::make( 3, 1.0, 2.0 ), Coefficient::identity( 3 ) ) == 6.0 );
   CHECK( c_o_formula( 4, 3.0, 4.0 ) == 2.0 );
   const double e = std::exp( 1.0 );
   CHECK_THAT( c_o_formula( ExteriorDomain::make( 2, 1.0, e ), Coefficient::identity( 2 ) ), WithinRel( 2.0 * e, 1e-15 ) );
   CHECK_THROWS_AS( c_o_formula( ExteriorDomain::make( 1, 1.0, 2.0 ), Coefficient::identity( 1 ) ), Error );
}

TEST_CASE( "radial FEM reproduces harmonic profiles", "[constants]" )
{
   const double a = 1.0, c = 2.0;
   const RadialFem fem( 3, a, c, 32 );
   for( int l : { 0, 1, 3, 6 } )
   {
      const auto prof = fem.minimal_energy_profile( l * ( l + 1.0 ), 1.0, 0.0 );
      CHECK_THAT( prof.energy(), WithinRel( harmonic_extension_energy( l, a, c ), 1e-8 ) );
      CHECK( prof.value( a ) == 1.0 );
      CHECK_THAT( prof.value( c ), WithinAbs( 0.0, 1e-15 ) );
      CHECK( prof.value( c + 0.1 ) == 0.0 );
   }
   // l = 0 in N = 2: psi = 1 - ln(r/a)/ln(c/a), energy = 1/ln(c/a)
   const RadialFem fem2( 2, 1.0, 3.0, 32 );
   CHECK_THAT( fem2.minimal_energy_profile( 0.0, 1.0, 0.0 ).energy(), WithinRel( 1.0 / std::log( 3.0 ), 1e-9 ) );
}

TEST_CASE( "annulus Friedrichs constant", "[constants]" )
{
   const auto d = ExteriorDomain::make( 3, 1.0, 2.0 );
   const auto rep = c_omega_i( d, 8, 64 );
   const double lambda = shooting_eigenvalue( 1.0, 2.0 );
   CHECK_THAT( rep.value, WithinRel( 1.0 / std::sqrt( lambda ), 1e-4 ) );
   CHECK( rep.value < c_o_formula( d, Coefficient::identity( 3 ) ) );
   CHECK( rep.extremal_index == 0 );
   CHECK( rep.mode_values.size() == 9 );
   CHECK( rep.relative_accuracy < 1e-6 );
   CHECK( rep.method == "eigensolve" );
   for( std::size_t l = 1; l < rep.mode_values.size(); ++l )
      CHECK( rep.mode_values[l] > rep.mode_values[l - 1] );

   // the ODE reduces to tan k = 2k with lambda = k^2
   const double k = std::sqrt( lambda );
   CHECK_THAT( std::tan( k ), WithinRel( 2.0 * k, 1e-8 ) );

   double previous = rep.value;
   for( double R : { 1.5, 1.25 } )
   {
      const double next = c_omega_i( ExteriorDomain::make( 3, 1.0, R ), 8, 64 ).value;
      CHECK( next < previous );
      previous = next;
   }
   CHECK_THROWS_AS( c_omega_i( d, 7, 64 ), Error );
   CHECK_THROWS_AS( c_omega_i( d, 8, 32 ), Error );
   CHECK_THROWS_AS( c_omega_i( ExteriorDomain::make( 1, 1.0, 2.0 ), 8, 64 ), Error );

   const auto d2 = ExteriorDomain::make( 2, 2.0, 4.0 );
   CHECK( c_omega_i( d2, 8, 64 ).value < c_o_formula( d2, Coefficient::identity( 2 ) ) );
}

TEST_CASE( "extension constant", "[constants]" )
{
   const int L = 6, mesh = 64;
   const auto d = ExteriorDomain::make( 3, 1.0, 2.0 );
   const auto A = Coefficient::constant( 3, Eigen::Vector3d( 1.0, 2.0, 4.0 ).asDiagonal().toDenseMatrix() );
   const auto I = Coefficient::identity( 3 );
   const double cutoff = 2.0;
   const auto rep = c_gamma_extension( d, I, cutoff, L, mesh );
   const auto repA = c_gamma_extension( d, A, cutoff, L, mesh );
   CHECK_THAT( repA.value, WithinRel( 2.0 * rep.value, 1e-15 ) );
   CHECK( rep.relative_accuracy < 1e-6 );
   CHECK_THAT( c_gamma_extension( d, I, cutoff, L, 2 * mesh ).value, WithinRel( rep.value, 1e-6 ) );
   CHECK_THROWS_AS( c_gamma_extension( d, I, 2.5, L, mesh ), Error );
   CHECK_THROWS_AS( c_gamma_extension( d, I, 1.0, L, mesh ), Error );

   // direct check on a cheaper mesh; the FEM elements line up with the shells
   const int small = 16;
   const double bound = c_gamma_extension( d, I, cutoff, L, small ).value;
   const TraceExtension ext( 3, 1.0, cutoff, L, 2 * small );
   const auto rule = annulus_rule( 3, 1.0, cutoff, 4, L + 2, 2 * small );
   std::mt19937_64 gen( 2024 );
   int violations = 0;
   for( int trial = 0; trial < 30; ++trial )
   {
      const auto t = testing::random_trace( 3, 1.0, L, gen );
      const double lhs = energy_norm( I, ext.field( t ), rule );
      if( lhs > bound * sobolev_norm( t, 0.5 ) )
         ++violations;
      CHECK_THAT( ext.energy( I, t ), WithinRel( lhs, 1e-10 ) );
   }
   CHECK( violations == 0 );

   // pure degree-0 data attains the degree-0 ratio
   SphereTrace t0 = SphereTrace::zero( 1.0, 3, L );
   t0.coefficients[0] = 0.7;
   const double ratio = energy_norm( I, ext.field( t0 ), rule ) / sobolev_norm( t0, 0.5 );
   CHECK_THAT( ratio, WithinRel( std::sqrt( ext.mode_ratio( 0 ) ), 1e-9 ) );
}

TEST_CASE( "trace constant", "[constants]" )
{
   const int L = 6, mesh = 64;
   const auto d = ExteriorDomain::make( 3, 1.0, 2.0 );
   const auto A = Coefficient::constant( 3, Eigen::Vector3d( 1.0, 2.0, 4.0 ).asDiagonal().toDenseMatrix() );
   const auto rep = c_Gamma_trace( d, A, L, mesh );
   CHECK( rep.relative_accuracy < 1e-6 );
   CHECK( rep.value > 0.0 );
   CHECK_THAT( c_Gamma_trace( d, A, L, 2 * mesh ).value, WithinRel( rep.value, 1e-6 ) );

   const auto sphere = sphere_rule( 3, 2.0, L + 1 );
   const AngularBasis basis( 3, L );
   std::mt19937_64 gen( 77 );
   std::uniform_real_distribution<double> unit( 0.0, 1.0 );
   int violations = 0;
   for( int trial = 0; trial < 20; ++trial )
   {
      const double outer = 2.2 + 3.0 * unit( gen );
      ScalarField w = constant_field( 0.0 );
      for( std::size_t k = 0; k < basis.size(); ++k )
         w = w + separated_field( 3, radial_bump( 1.0, outer, 2.0 * unit( gen ) - 1.0 ), &basis, k );
      const double lhs = sobolev_norm( analyze( w, sphere, L ), 0.5 );
      const double rhs = rep.value * energy_norm( A, w, annulus_rule( 3, 1.0, outer, 24, L + 2, 8 ) );
      if( lhs > rhs )
         ++violations;
   }
   CHECK( violations == 0 );

   // supported in the exterior part only: zero trace on the interface
   const auto outside = separated_field( 3, radial_bump( 2.5, 3.5 ), &basis, 3 );
   CHECK( sobolev_norm( analyze( outside, sphere, L ), 0.5 ) == 0.0 );
}

TEST_CASE( "formula weight dominates the eigen weight", "[constants][property]" )
{
   for( double R : { 1.5, 2.0, 3.0 } )
      for( double cA : { 0.5, 1.0, 4.0 } )
      {
         const auto d = ExteriorDomain::make( 3, 1.0, R );
         const auto A = Coefficient::constant( 3, cA * Mat::Identity() );
         CHECK( c_o_formula( d, A ) >= c_omega_i( d, 8, 64 ).value / std::sqrt( cA ) );
      }
}
