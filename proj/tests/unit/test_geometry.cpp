// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#include "catch_amalgamated.hpp"

#include "exmaj/norms.hpp"

#include <cmath>

using namespace exmaj;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

namespace
{

const ExteriorDomain kUnitAnnulus = ExteriorDomain::make( 3, 1.0, 2.0 );

bool
inside( const QuadratureRule& rule, double lo, double hi )
{
   for( const auto& x : rule.nodes() )
   {
      const double r = x.norm();
      if( !( r > lo && r < hi ) )
         return false;
   }
   return true;
}

} // namespace

TEST_CASE( "domain invariants", "[geometry]" )
{
   CHECK_NOTHROW( ExteriorDomain::make( 3, 1.0, 2.0 ) );
   CHECK_THROWS_AS( ExteriorDomain::make( 3, 2.0, 1.0 ), Error );
   CHECK_THROWS_AS( ExteriorDomain::make( 4, 1.0, 2.0 ), Error );
   CHECK_THROWS_AS( ExteriorDomain::make( 2, 0.5, 2.0 ), Error );
   CHECK_NOTHROW( ExteriorDomain::make( 2, 1.0, 2.0 ) );
   CHECK_NOTHROW( ExteriorDomain::make( 1, 0.5, 2.0 ) );
}

TEST_CASE( "gauss-legendre integrates polynomials exactly", "[geometry]" )
{
   const auto [x, w] = gauss_legendre( 7 );
   for( int p = 0; p <= 13; ++p )
   {
      double s = 0.0;
      for( std::size_t i = 0; i < x.size(); ++i )
         s += w[i] * std::pow( x[i], p );
      const double exact = p % 2 ? 0.0 : 2.0 / ( p + 1 );
      CHECK_THAT( s, WithinAbs( exact, 1e-14 ) );
   }
}

TEST_CASE( "rule shapes, regions and weights", "[geometry]" )
{
   const int ro = 6, ao = 5, shells = 3;
   const auto omi = build_quadrature( kUnitAnnulus, ro, ao, shells, Region::omega_i );
   const auto ome = build_quadrature( kUnitAnnulus, ro, ao, shells, Region::omega_e );
   const auto whole = build_quadrature( kUnitAnnulus, ro, ao, shells, Region::whole );
   const auto sph = build_quadrature( kUnitAnnulus, ro, ao, shells, Region::sphere_Gamma );

   const std::size_t dirs = std::size_t( ao ) * 2 * ao;
   CHECK( omi.size() == std::size_t( shells * ro ) * dirs );
   CHECK( ome.size() == std::size_t( ( shells >= 2 ? 2 * shells - 1 : 2 ) * ro ) * dirs );
   CHECK( whole.size() == omi.size() + ome.size() );
   CHECK( sph.size() == dirs );
   CHECK( inside( omi, 1.0, 2.0 ) );
   CHECK( inside( ome, 2.0, HUGE_VAL ) );
   CHECK( inside( whole, 1.0, HUGE_VAL ) );
   for( const auto* rule : { &omi, &ome, &whole, &sph } )
      for( double w : rule->weights() )
         CHECK( w > 0.0 );
   CHECK( ome.tail_map().find( "R/t" ) != std::string::npos );

   CHECK_THROWS_AS( build_quadrature( kUnitAnnulus, 0, ao, shells, Region::omega_i ), Error );
   CHECK_THROWS_AS( build_quadrature( kUnitAnnulus, ro, ao, 0, Region::omega_i ), Error );
   CHECK_THROWS_AS( build_quadrature( kUnitAnnulus, ro, ao, shells, Region::custom ), Error );
   CHECK_THROWS_AS( region_from_string( "omega_x" ), Error );
   CHECK( region_from_string( "sphere_gamma" ) == Region::sphere_gamma );
}

TEST_CASE( "shell volume", "[geometry]" )
{
   const auto omi = build_quadrature( kUnitAnnulus, 8, 2, 2, Region::omega_i );
   const double vol = integrate( omi, []( const Point& ) { return 1.0; } );
   CHECK_THAT( vol, WithinRel( 4.0 * pi * ( 8.0 - 1.0 ) / 3.0, 1e-12 ) );

   const auto d2 = ExteriorDomain::make( 2, 1.0, 3.0 );
   const double area = integrate( build_quadrature( d2, 8, 2, 2, Region::omega_i ), []( const Point& ) { return 1.0; } );
   CHECK_THAT( area, WithinRel( pi * ( 9.0 - 1.0 ), 1e-12 ) );
}

TEST_CASE( "closed-form integrals over the exterior", "[geometry]" )
{
   const auto whole = build_quadrature( kUnitAnnulus, 16, 2, 4, Region::whole );
   // 4 pi int_1^inf r^-2 dr
   const double a = integrate( whole, []( const Point& x ) { return std::pow( x.squaredNorm(), -2 ); } );
   CHECK_THAT( a, WithinRel( 4.0 * pi, 1e-10 ) );
   // 1/(r^2 (1 + r^2)) = 1/r^2 - 1/(1 + r^2)
   const double b = integrate( whole, []( const Point& x ) {
      const double r2 = x.squaredNorm();
      return 1.0 / ( r2 * r2 * ( 1.0 + r2 ) );
   } );
   CHECK_THAT( b, WithinRel( 4.0 * pi * ( 1.0 - pi / 4.0 ), 1e-10 ) );
}

TEST_CASE( "integrate basics", "[geometry]" )
{
   const auto sph = build_quadrature( kUnitAnnulus, 4, 6, 1, Region::sphere_Gamma );
   CHECK( integrate( sph, []( const Point& ) { return 0.0; } ) == 0.0 );
   CHECK_THAT( integrate( sph, []( const Point& ) { return 3.0; } ), WithinRel( 3.0 * 16.0 * pi, 1e-14 ) );

   const auto omi = build_quadrature( kUnitAnnulus, 4, 4, 1, Region::omega_i );
   try
   {
      integrate( omi, []( const Point& x ) { return x[2] > 0.5 ? std::nan( "" ) : 1.0; } );
      FAIL( "expected a non-finite error" );
   }
   catch( const Error& e )
   {
      CHECK( e.kind() == ErrorKind::non_finite );
      CHECK( std::string( e.what() ).find( "node" ) != std::string::npos );
   }
}

TEST_CASE( "bump integral converges under refinement", "[geometry]" )
{
   const auto bump = separated_field( 3, radial_bump( 1.2, 1.8 ), nullptr, 0 );
   auto value = [&]( int ro, int shells ) {
      return integrate( build_quadrature( kUnitAnnulus, ro, 2, shells, Region::omega_i ),
                        [&]( const Point& x ) { return bump.value( x ); } );
   };
   // the bump is flat to all orders at its ends, so the rule needs a few
   // shells before Gauss-Legendre sees it as smooth
   CHECK( std::abs( value( 16, 4 ) / value( 64, 32 ) - 1.0 ) > 1e-8 );
   const double coarse = value( 32, 16 ), fine = value( 64, 32 );
   CHECK_THAT( coarse, WithinRel( fine, 1e-10 ) );
}

TEST_CASE( "parallel reduction is bit-identical to serial", "[geometry]" )
{
   const auto whole = build_quadrature( kUnitAnnulus, 24, 12, 4, Region::whole );
   auto f = []( const Point& x ) { return std::exp( -x.norm() ) * ( 1.0 + x[0] * x[1] ); };
   const double serial = integrate( whole, f, { 1 } );
   for( unsigned t : { 2u, 3u, 7u } )
      CHECK( integrate( whole, f, { t } ) == serial );
}

TEST_CASE( "compensated sum recovers cancelled terms", "[geometry]" )
{
   CompensatedSum s;
   s.add( 1.0 );
   s.add( 1e100 );
   s.add( 1.0 );
   s.add( -1e100 );
   CHECK( s.value() == 2.0 );
}
