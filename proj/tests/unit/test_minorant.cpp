// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#include "catch_amalgamated.hpp"

#include "exmaj/manufactured.hpp"
#include "exmaj/minorant.hpp"

#include <algorithm>
#include <cmath>

using namespace exmaj;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

TestBasis
small_basis( const Problem& p )
{
   return default_basis( p.domain, 2, 1 );
}

} // namespace

TEST_CASE( "default basis", "[minorant]" )
{
   const auto d = ExteriorDomain::make( 3, 1.0, 2.0 );
   const auto b = default_basis( d, 3, 2 );
   CHECK( b.size() == 27 );
   CHECK( b.support_radius == 4.0 );
   CHECK( default_basis( d, 1, 0, 3.0 ).support_radius == 3.0 );
   const Point inside( 0.0, 0.0, 4.0 );
   for( const auto& w : b.functions )
      CHECK( w.value( inside ) == 0.0 );
   CHECK_THROWS_AS( default_basis( d, 0, 1 ), Error );
   CHECK_THROWS_AS( default_basis( d, 2, 1, 0.5 ), Error );
}

TEST_CASE( "no lower bound for the exact solution", "[minorant]" )
{
   const auto mp = builtin( "N3_anisotropic" );
   const auto& p = mp.problem;
   const auto rep = minorant( p, mp.exact_u, small_basis( p ) );
   const double scale = energy_norm( p.A, mp.exact_u, *p.omega_i );
   CHECK( rep.value <= 1e-14 * scale * scale );
   CHECK( !rep.interior_only );
   CHECK( rep.basis_size == 8 );
   CHECK( rep.gram_min_eigenvalue > 0.0 );
   CHECK( minorant_functional( p, mp.exact_u, constant_field( 0.0 ), 4.0 ) == 0.0 );
}

TEST_CASE( "lower bound over random perturbations", "[minorant][property]" )
{
   for( const char* name : { "N3_harmonic", "N3_decay" } )
   {
      const auto mp = builtin( name );
      const auto& p = mp.problem;
      const auto basis = small_basis( p );
      for( std::uint64_t seed : { 3u, 17u } )
      {
         INFO( name << " seed " << seed );
         const auto c = perturb( mp, exact_candidate( mp ), PerturbTarget::v, 0.1, PerturbMode::interior_bump, seed );
         const double te = *c.true_error;
         const auto rep = minorant( p, c.v, basis );
         CHECK( rep.value > 0.0 );
         CHECK( rep.value <= te * te * ( 1.0 + 1e-8 ) );
         CHECK_THAT( rep.direct, WithinRel( rep.optimum, 1e-10 ) );

         const auto s = sandwich( p, c.v, c.y_i, basis, te );
         CHECK( s.lower <= te * ( 1.0 + 1e-8 ) );
         CHECK( te <= s.upper * ( 1.0 + 1e-8 ) );
      }
   }
}

TEST_CASE( "the error itself makes the bound sharp", "[minorant]" )
{
   const auto mp = builtin( "N3_harmonic" );
   const auto& p = mp.problem;
   for( std::uint64_t seed : { 4u, 12u } )
   {
      const double eps = 0.1;
      const auto c = perturb( mp, exact_candidate( mp ), PerturbTarget::v, eps, PerturbMode::interior_bump, seed );
      TestBasis basis = small_basis( p );
      basis.functions.push_back( -eps * perturbation_direction( mp, PerturbMode::interior_bump, seed ) );
      const auto rep = minorant( p, c.v, basis );
      CHECK_THAT( std::sqrt( rep.value ), WithinRel( *c.true_error, 1e-6 ) );
      CHECK_THAT( rep.coefficients.back(), WithinRel( 1.0, 1e-6 ) );
   }
}

TEST_CASE( "larger spans give larger bounds", "[minorant][property]" )
{
   const auto mp = builtin( "N3_decay" );
   const auto& p = mp.problem;
   const auto c = perturb( mp, exact_candidate( mp ), PerturbTarget::v, 0.1, PerturbMode::boundary_mode, 9 );
   const auto full = default_basis( p.domain, 2, 1 );
   double previous = 0.0;
   for( std::size_t k : { 1u, 3u, 5u, 8u } )
   {
      TestBasis sub;
      sub.support_radius = full.support_radius;
      sub.functions.assign( full.functions.begin(), full.functions.begin() + long( k ) );
      const auto rep = minorant( p, c.v, sub );
      CHECK( rep.value >= previous * ( 1.0 - 1e-12 ) );
      previous = rep.value;
   }
}

TEST_CASE( "basis order and threads", "[minorant][property]" )
{
   Discretization four;
   four.threads = 4;
   const auto m1 = builtin( "N3_harmonic" );
   const auto m4 = builtin( "N3_harmonic", four );
   const auto c1 = perturb( m1, exact_candidate( m1 ), PerturbTarget::v, 0.1, PerturbMode::interior_bump, 2 );
   const auto c4 = perturb( m4, exact_candidate( m4 ), PerturbTarget::v, 0.1, PerturbMode::interior_bump, 2 );
   const auto basis = small_basis( m1.problem );
   const auto r1 = minorant( m1.problem, c1.v, basis );
   const auto r4 = minorant( m4.problem, c4.v, basis );
   CHECK( r1.value == r4.value );
   CHECK( r1.coefficients == r4.coefficients );

   TestBasis reversed = basis;
   std::reverse( reversed.functions.begin(), reversed.functions.end() );
   const auto rr = minorant( m1.problem, c1.v, reversed );
   CHECK_THAT( rr.value, WithinRel( r1.value, 1e-12 ) );
   CHECK_THAT( rr.coefficients.front(), WithinRel( r1.coefficients.back(), 1e-8 ) );
}

TEST_CASE( "minorant input checks", "[minorant]" )
{
   const auto mp = builtin( "N3_harmonic" );
   const auto& p = mp.problem;
   CHECK_THROWS_AS( minorant( p, mp.exact_u, TestBasis{} ), Error );

   TestBasis twice = small_basis( p );
   twice.functions.push_back( twice.functions.front() );
   try
   {
      minorant( p, mp.exact_u, twice );
      FAIL( "singular Gram matrix accepted" );
   }
   catch( const Error& e )
   {
      CHECK( e.kind() == ErrorKind::numerical );
      CHECK_THAT( std::string( e.what() ), Catch::Matchers::ContainsSubstring( "singular" ) );
   }

   // nonzero on gamma
   TestBasis touching;
   touching.functions.push_back( separated_field( 3, boundary_cutoff( 1.0, 2.0 ), nullptr, 0, "cutoff" ) );
   try
   {
      minorant( p, mp.exact_u, touching );
      FAIL( "test function with a trace accepted" );
   }
   catch( const Error& e )
   {
      CHECK( e.kind() == ErrorKind::precondition );
   }
}

TEST_CASE( "boundary mismatch is flagged", "[minorant]" )
{
   const auto mp = builtin( "N3_harmonic" );
   const auto& p = mp.problem;
   const auto c = perturb( mp, exact_candidate( mp ), PerturbTarget::v, 0.1, PerturbMode::boundary_mode, 1 );
   const auto rep = minorant( p, c.v, small_basis( p ) );
   CHECK( rep.interior_only );
   CHECK( rep.boundary_mismatch > kZeroTraceTolerance );
   // still a lower bound, just not a sharp one
   CHECK( rep.value <= *c.true_error * *c.true_error );
}
