// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#include "catch_amalgamated.hpp"

#include "exmaj/poincare.hpp"

#include <cmath>
#include <numbers>

using namespace exmaj;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

double
bump( double t )
{
   return std::abs( t ) < 1.0 ? std::exp( -1.0 / ( 1.0 - t * t ) ) : 0.0;
}

double
bump_dt( double t )
{
   const double q = 1.0 - t * t;
   return std::abs( t ) < 1.0 ? -2.0 * t / ( q * q ) * std::exp( -1.0 / q ) : 0.0;
}

/// Trapezoid sum; spectrally accurate for integrands flat at both ends.
template <class F>
double
trapezoid( double lo, double hi, int n, F&& f )
{
   const double h = ( hi - lo ) / n;
   double s = 0.0;
   for( int k = 1; k < n; ++k )
      s += f( lo + k * h );
   return s * h;
}

BumpSum
one_bump( int N, Point c, double radius, double amplitude = 1.0 )
{
   BumpSum u;
   u.dimension = N;
   u.bumps.push_back( { c, radius, amplitude } );
   return u;
}

const ExteriorDomain d3 = ExteriorDomain::make( 3, 1.0, 2.0 );
const ExteriorDomain d2 = ExteriorDomain::make( 2, 1.0, 2.0 );

} // namespace

TEST_CASE( "radial derivative", "[poincare]" )
{
   const auto sq = separated_field( 3, power_profile( 2.0 ), nullptr, 0, "r^2" );
   const Point x( 1.0, 2.0, -2.0 );
   CHECK_THAT( radial_derivative( sq ).value( x ), WithinRel( 2.0 * 3.0, 1e-14 ) );

   ScalarField lin;
   lin.value = []( const Point& p ) { return p[0]; };
   lin.gradient = []( const Point& ) { return Vec( 1.0, 0.0, 0.0 ); };
   lin.label = "x1";
   CHECK_THAT( radial_derivative( lin ).value( x ), WithinRel( 1.0 / 3.0, 1e-15 ) );
   CHECK_THROWS_AS( radial_derivative( lin ).value( Point::Zero() ), Error );

   ScalarField flat;
   flat.value = []( const Point& ) { return 1.0; };
   CHECK_THROWS_AS( radial_derivative( flat ), Error );
}

TEST_CASE( "ball integrals against a 1D oracle", "[poincare]" )
{
   // beta = 1, N = 3: lhs = 3 ||u||; ||u||^2 = 4 pi A^2 int_0^rho bump(s/rho)^2 s^2 ds
   const double rho = 0.7, amp = -0.6;
   const auto u = one_bump( 3, Point( 0.0, 2.5, 0.0 ), rho, amp );
   const double l2 = 4.0 * std::numbers::pi * amp * amp *
                     trapezoid( 0.0, rho, 4000, [&]( double s ) { return std::pow( bump( s / rho ), 2 ) * s * s; } );
   const auto rec = verify_lemma_i( d3, u, 1.0 );
   CHECK_THAT( rec.lhs, WithinRel( 3.0 * std::sqrt( l2 ), 1e-10 ) );
   CHECK( rec.pass );
   CHECK( rec.id == "lemma_i" );
   CHECK( !rec.identity );
   CHECK( rec.margin == rec.rhs - rec.lhs );
}

TEST_CASE( "shell integrals against a 1D oracle", "[poincare]" )
{
   // lemma (i), beta = 0, N = 3 on a radial shell
   const RadialShell s{ 1.5, 3.5, 1.0 };
   const double c = 2.5, h = 1.0;
   const double A = trapezoid( s.r0, s.r1, 4000, [&]( double r ) { return std::pow( bump( ( r - c ) / h ), 2 ); } );
   const double B = trapezoid( s.r0, s.r1, 4000, [&]( double r ) { return std::pow( bump_dt( ( r - c ) / h ) / h * r, 2 ); } );
   const double ratio = std::sqrt( A ) / ( 2.0 * std::sqrt( B ) );
   BallRuleOptions fine;
   fine.panels = 32;
   const auto res = rayleigh_scan( d3, "lemma_i", 0.0, { s }, fine );
   CHECK_THAT( res.best_ratio, WithinRel( ratio, 1e-10 ) );

   // N = 4 chain: the last link is an equality
   const auto chain = verify_corollary_chain( 4, 1.0, s );
   REQUIRE( chain.size() == 5 );
   CHECK( chain[3].lhs == chain[3].rhs );
}

TEST_CASE( "lemma inequalities and identities on examples", "[poincare]" )
{
   const auto u3 = one_bump( 3, Point( 1.0, 1.5, 0.5 ), 0.6 );
   for( double beta : { -0.4, 0.0, 1.0, 2.5 } )
   {
      INFO( "beta " << beta );
      CHECK( verify_lemma_i( d3, u3, beta ).pass );
      const auto id = identity_lemma_i( d3, u3, beta );
      CHECK( id.identity );
      CHECK( id.pass );
      // any gamma_hat, not just the optimal one
      CHECK( identity_lemma_i( d3, u3, beta, 0.3 ).pass );
      CHECK( identity_lemma_i( d3, u3, beta, -1.7 ).pass );
   }

   const auto u2 = one_bump( 2, Point( 1.8, -1.4, 0.0 ), 0.5 );
   for( double beta : { 0.0, 0.5, 1.0, -1.0 } )
   {
      INFO( "beta " << beta );
      CHECK( verify_lemma_ii( d2, u2, beta ).pass );
      CHECK( identity_lemma_ii( d2, u2, beta ).pass );
      CHECK( identity_lemma_ii( d2, u2, beta, 2.0 ).pass );
   }

   HalfLineFunction h;
   h.bumps.push_back( { 0.2, 0.9, 0.8 } ); // straddles t = 0
   h.bumps.push_back( { 3.0, 1.0, -0.5 } );
   CHECK( h.at_origin() != 0.0 );
   for( double beta : { 0.0, 1.0, 0.25 } )
   {
      INFO( "beta " << beta );
      CHECK( verify_lemma_iii( h, beta ).pass );
      CHECK( identity_lemma_iii( h, beta ).pass );
      CHECK( identity_lemma_iii( h, beta, 0.7 ).pass );
   }
}

TEST_CASE( "zero function", "[poincare]" )
{
   BumpSum zero;
   zero.dimension = 3;
   const auto rec = verify_lemma_i( d3, zero, 0.0 );
   CHECK( rec.lhs == 0.0 );
   CHECK( rec.rhs == 0.0 );
   CHECK( rec.pass );
   CHECK( identity_lemma_i( d3, zero, 0.0 ).pass );
   CHECK( verify_corollary_chain( HalfLineFunction{} ).size() == 3 );
}

TEST_CASE( "lemma preconditions", "[poincare]" )
{
   const auto u3 = one_bump( 3, Point( 0.0, 0.0, 2.0 ), 0.5 );
   CHECK_THROWS_AS( verify_lemma_i( d3, u3, -0.5 ), Error );
   CHECK_THROWS_AS( identity_lemma_i( d3, u3, -0.6 ), Error );
   CHECK_THROWS_AS( verify_lemma_i( d2, u3, 0.0 ), Error );
   // support reaching the obstacle
   CHECK_THROWS_AS( verify_lemma_i( d3, one_bump( 3, Point( 0.0, 0.0, 1.4 ), 0.5 ), 0.0 ), Error );

   BumpSum overlap = u3;
   overlap.bumps.push_back( { Point( 0.0, 0.5, 2.0 ), 0.5, 1.0 } );
   CHECK_THROWS_AS( verify_lemma_i( d3, overlap, 0.0 ), Error );

   const auto u2 = one_bump( 2, Point( 2.0, 0.0, 0.0 ), 0.4 );
   // excluded band (1 - N/2, (3 - N)/2) = (0, 1/2) for N = 2
   CHECK_THROWS_AS( verify_lemma_ii( d2, u2, 0.25 ), Error );
   // a >= 1 is already enforced by the domain for N = 2
   CHECK_THROWS_AS( ExteriorDomain::make( 2, 0.5, 2.0 ), Error );
   CHECK_THROWS_AS( verify_corollary_chain( d3, u3, ChainCase::iii ), Error );
   CHECK_THROWS_AS( verify_corollary_chain( 2, 1.0, RadialShell{} ), Error );

   HalfLineFunction bad;
   bad.bumps.push_back( { -2.0, 0.5, 1.0 } );
   CHECK_THROWS_AS( verify_lemma_iii( bad, 0.0 ), Error );
}

TEST_CASE( "first link of the chains is reversed", "[poincare][property]" )
{
   // rho = sqrt(1 + r^2) <= 1 + r, so ||u/rho|| >= ||u/(1+r)||: the link never holds
   for( std::uint64_t k = 0; k < 10; ++k )
   {
      auto gen = detail::sample_stream( 7, 0, k );
      const auto chain = verify_corollary_chain( d3, random_bump_sum( 3, 1.0, gen ), ChainCase::i );
      REQUIRE( chain.size() == 5 );
      CHECK( chain[0].lhs > chain[0].rhs );
      CHECK( !chain[0].pass );
      for( std::size_t j = 1; j < 4; ++j )
         CHECK( chain[j].pass );
      const auto half = verify_corollary_chain( random_half_line( gen, k % 2 == 0 ) );
      CHECK( half[0].lhs >= half[0].rhs );
      CHECK( half[1].pass );
      CHECK( half[2].pass );
   }
}

TEST_CASE( "Rayleigh ratios", "[poincare][property]" )
{
   std::vector<RadialShell> wide;
   for( double w : { 1.0, 4.0, 16.0, 64.0 } )
      wide.push_back( { 2.0, 2.0 + w, 1.0 } );
   BallRuleOptions o;
   o.panels = 64;
   for( const char* id : { "lemma_i", "lemma_iii" } )
   {
      INFO( id );
      const auto res = rayleigh_scan( d3, id, 0.0, wide, o );
      REQUIRE( res.ratios.size() == 4 );
      for( std::size_t k = 0; k < res.ratios.size(); ++k )
      {
         CHECK( res.ratios[k] < 1.0 + kRatioSlack );
         if( k )
            CHECK( res.ratios[k] > res.ratios[k - 1] );
      }
      CHECK( res.best_index == 3 );
   }
   CHECK( rayleigh_scan( d2, "lemma_ii", 1.0, wide, o ).best_ratio < 1.0 );
   CHECK_THROWS_AS( rayleigh_scan( d3, "lemma_i", 0.0, {} ), Error );
   CHECK_THROWS_AS( rayleigh_scan( d3, "lemma_iv", 0.0, wide ), Error );
   CHECK_THROWS_AS( rayleigh_scan( d3, "lemma_i", 0.0, { RadialShell{ 0.5, 2.0, 1.0 } } ), Error );
}

TEST_CASE( "suite layout and determinism", "[poincare]" )
{
   PoincareSuiteOptions opt;
   opt.samples = 3;
   const auto a = poincare_suite( opt );
   opt.threads = 3;
   const auto b = poincare_suite( opt );
   // 8 lemma cases x 2 records, chains 5 + 5 + 2 + 3
   REQUIRE( a.size() == std::size_t( 3 * ( 8 * 2 + 15 ) ) );
   REQUIRE( a.size() == b.size() );
   for( std::size_t k = 0; k < a.size(); ++k )
   {
      CHECK( a[k].id == b[k].id );
      CHECK( a[k].lhs == b[k].lhs );
      CHECK( a[k].rhs == b[k].rhs );
      CHECK( a[k].descriptor == b[k].descriptor );
   }
   for( const auto& r : a )
   {
      INFO( r.id << " " << r.descriptor );
      if( r.id == "cor_i_1" || r.id == "cor_iii_1" )
         continue;
      CHECK( r.pass );
   }
   CHECK( a.front().beta == Catch::Approx( -0.4 ) );

   opt.seed += 1;
   CHECK( poincare_suite( opt ).front().descriptor != a.front().descriptor );
   opt.samples = 0;
   CHECK_THROWS_AS( poincare_suite( opt ), Error );
}
