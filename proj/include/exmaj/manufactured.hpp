// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

// Manufactured exterior problems with exact solutions, and perturbation
// generators for the estimator tests.

#pragma once

#include "exmaj/majorant.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace exmaj
{

struct ManufacturedProblem
{
   std::string name;
   Problem problem;
   ScalarField exact_u;
   VectorField exact_flux; // A grad u, divergence -f
   std::string decay;
};

namespace detail
{

/// (1 + r^2)^{-1}
inline RadialProfile
inverse_rho_squared()
{
   RadialProfile p;
   p.value = []( double r ) { return 1.0 / ( 1.0 + r * r ); };
   p.d1 = []( double r ) { return -2.0 * r / std::pow( 1.0 + r * r, 2 ); };
   p.d2 = []( double r ) { return ( 6.0 * r * r - 2.0 ) / std::pow( 1.0 + r * r, 3 ); };
   p.label = "rho^-2";
   return p;
}

inline ManufacturedProblem
assemble( std::string name, const ExteriorDomain& d, const Coefficient& A, ScalarField u, std::string decay,
          const Discretization& disc )
{
   ManufacturedProblem mp;
   mp.name = std::move( name );
   mp.exact_u = u;
   mp.exact_flux = flux_of( A, u );
   ScalarField f;
   f.value = [div = mp.exact_flux.divergence]( const Point& x ) { return -div( x ); };
   f.label = "-div(A grad u)";
   const SphereTrace g = analyze( u, sphere_rule( d.dimension, d.inner_radius, disc.band_limit + 1 ), disc.band_limit );
   mp.problem = Problem::make( d, A, f, g, disc );
   mp.decay = std::move( decay );
   return mp;
}

} // namespace detail

inline std::vector<std::string>
builtin_names()
{
   return { "N3_harmonic", "N3_decay", "N3_anisotropic", "N2_log" };
}

/// Catalog problem; `interface_radius` overrides the default R.
inline ManufacturedProblem
builtin( const std::string& name, const Discretization& disc = {}, std::optional<double> interface_radius = {} )
{
   if( name == "N3_harmonic" )
   {
      const auto d = ExteriorDomain::make( 3, 1.0, interface_radius.value_or( 2.0 ) );
      return detail::assemble( name, d, Coefficient::identity( 3 ),
                               separated_field( 3, power_profile( -1.0 ), nullptr, 0, "1/r" ), "u ~ r^-1", disc );
   }
   if( name == "N3_decay" )
   {
      const auto d = ExteriorDomain::make( 3, 1.0, interface_radius.value_or( 2.0 ) );
      return detail::assemble( name, d, Coefficient::constant( 3, 2.0 * Mat::Identity(), "2I" ),
                               separated_field( 3, detail::inverse_rho_squared(), nullptr, 0, "rho^-2" ),
                               "u ~ r^-2", disc );
   }
   if( name == "N3_anisotropic" )
   {
      const auto d = ExteriorDomain::make( 3, 1.0, interface_radius.value_or( 2.0 ) );
      const auto A =
          Coefficient::constant( 3, Eigen::Vector3d( 1.0, 2.0, 4.0 ).asDiagonal().toDenseMatrix(), "diag(1,2,4)" );
      return detail::assemble( name, d, A, separated_field( 3, power_profile( -1.0 ), nullptr, 0, "1/r" ),
                               "u ~ r^-1", disc );
   }
   if( name == "N2_log" )
   {
      const auto d = ExteriorDomain::make( 2, 2.0, interface_radius.value_or( 4.0 ) );
      return detail::assemble( name, d, Coefficient::identity( 2 ),
                               separated_field( 2, power_profile( -1.0 ), nullptr, 0, "1/r" ), "u ~ r^-1", disc );
   }
   fail( ErrorKind::invalid_argument, "builtin: unknown problem '" + name + "'" );
}

/// ||A^{1/2} grad(u - v)|| over the whole domain.
inline double
true_error( const ManufacturedProblem& mp, const ScalarField& v )
{
   const Problem& p = mp.problem;
   const VectorField e = gradient_of( mp.exact_u ) - gradient_of( v );
   const double ei = energy_norm( p.A, e, EnergyMode::A, *p.omega_i, p.options() );
   const double ee = energy_norm( p.A, e, EnergyMode::A, *p.omega_e, p.options() );
   require( std::isfinite( ei ) && std::isfinite( ee ), ErrorKind::numerical, "true_error: divergent energy" );
   return std::hypot( ei, ee );
}

/// v = u, y = A grad u, true error 0.
inline Candidate
exact_candidate( const ManufacturedProblem& mp )
{
   return { mp.exact_u, mp.exact_flux, mp.exact_flux, 0.0 };
}

enum class PerturbTarget
{
   v,
   y,
   y_broken
};

enum class PerturbMode
{
   interior_bump,
   boundary_mode,
   interface_jump
};

inline std::string
to_string( PerturbTarget t )
{
   switch( t )
   {
   case PerturbTarget::v: return "v";
   case PerturbTarget::y: return "y";
   case PerturbTarget::y_broken: return "y_broken";
   }
   return "?";
}

inline std::string
to_string( PerturbMode m )
{
   switch( m )
   {
   case PerturbMode::interior_bump: return "interior_bump";
   case PerturbMode::boundary_mode: return "boundary_mode";
   case PerturbMode::interface_jump: return "interface_jump";
   }
   return "?";
}

inline PerturbTarget
perturb_target_from_string( const std::string& s )
{
   if( s == "v" )
      return PerturbTarget::v;
   if( s == "y" )
      return PerturbTarget::y;
   if( s == "y_broken" )
      return PerturbTarget::y_broken;
   fail( ErrorKind::config, "unknown perturbation target '" + s + "' (v | y | y_broken)" );
}

inline PerturbMode
perturb_mode_from_string( const std::string& s )
{
   if( s == "interior_bump" )
      return PerturbMode::interior_bump;
   if( s == "boundary_mode" )
      return PerturbMode::boundary_mode;
   if( s == "interface_jump" )
      return PerturbMode::interface_jump;
   fail( ErrorKind::config, "unknown perturbation mode '" + s + "' (interior_bump | boundary_mode | interface_jump)" );
}

/// Random field bump(lo, hi) * sum_k c_k Y_k with degree <= max_degree and
/// lo < hi inside (r0, r1), deterministic in the seed. With grid >= 3, lo and
/// hi sit on the breakpoints r0 + k (r1 - r0)/grid: a Gauss piece that ends
/// where the bump does integrates it to round-off, one cut through the flat
/// end only to about 1e-6.
inline ScalarField
random_shell_field( int dimension, double r0, double r1, std::uint64_t seed, int max_degree = 2, int grid = 0 )
{
   std::mt19937_64 gen( seed );
   std::uniform_real_distribution<double> unit( 0.0, 1.0 );
   const double w = r1 - r0;
   double lo, hi;
   if( grid >= 3 )
   {
      const int i = 1 + std::min( grid - 3, int( unit( gen ) * ( grid - 2 ) ) );
      const int j = i + 1 + std::min( grid - 2 - i, int( unit( gen ) * ( grid - 1 - i ) ) );
      lo = r0 + w * i / grid;
      hi = r0 + w * j / grid;
   }
   else
   {
      lo = r0 + ( 0.05 + 0.3 * unit( gen ) ) * w;
      hi = std::min( lo + ( 0.35 + 0.3 * unit( gen ) ) * w, r1 - 0.05 * w );
   }
   const AngularBasis basis( dimension, max_degree );
   ScalarField f = constant_field( 0.0 );
   for( std::size_t k = 0; k < basis.size(); ++k )
      f = f + separated_field( dimension, radial_bump( lo, hi, 2.0 * unit( gen ) - 1.0 ), &basis, k );
   f.label = "shell_field(seed=" + std::to_string( seed ) + ")";
   return f;
}

/// The perturbation direction used by perturb(): a scalar field for
/// interior_bump / boundary_mode, a harmonic exterior field for interface_jump.
inline ScalarField
perturbation_direction( const ManufacturedProblem& mp, PerturbMode mode, std::uint64_t seed )
{
   const Problem& p = mp.problem;
   const int N = p.domain.dimension;
   const double a = p.domain.inner_radius, R = p.domain.interface_radius;
   std::mt19937_64 gen( seed );
   std::uniform_real_distribution<double> unit( -1.0, 1.0 );
   switch( mode )
   {
   case PerturbMode::interior_bump: return random_shell_field( N, a, R, seed, 2, p.disc.shells );
   case PerturbMode::boundary_mode:
   {
      // cutoff * band-limited angular data, degree <= L/2
      const int top = p.disc.band_limit / 2;
      const AngularBasis basis( N, top );
      const double cutoff = p.extension.cutoff();
      ScalarField f = constant_field( 0.0 );
      for( std::size_t k = 0; k < basis.size(); ++k )
      {
         RadialProfile prof = boundary_cutoff( a, cutoff );
         const double c = unit( gen );
         prof.value = [v = prof.value, c]( double r ) { return c * v( r ); };
         prof.d1 = [v = prof.d1, c]( double r ) { return c * v( r ); };
         prof.d2 = [v = prof.d2, c]( double r ) { return c * v( r ); };
         f = f + separated_field( N, prof, &basis, k );
      }
      f.label = "boundary_mode(seed=" + std::to_string( seed ) + ")";
      return f;
   }
   case PerturbMode::interface_jump:
   {
      // sum of r^{-(l+N-2)} Y_l for l = 1, 2: harmonic, decaying
      const AngularBasis basis( N, 2 );
      ScalarField h = constant_field( 0.0 );
      for( std::size_t k = 0; k < basis.size(); ++k )
      {
         const int l = basis.mode( k ).degree;
         if( l == 0 )
            continue;
         h = h + unit( gen ) * separated_field( N, power_profile( -double( l + N - 2 ) ), &basis, k );
      }
      h.label = "harmonic_jump(seed=" + std::to_string( seed ) + ")";
      return h;
   }
   }
   fail( ErrorKind::invalid_argument, "perturbation_direction: unknown mode" );
}

/// Adds eps times a seeded perturbation to one part of `base`.
///   target v: v += eps p (interior_bump, boundary_mode)
///   target y: y_i, y_e += eps grad p (interior_bump, boundary_mode)
///   target y_broken: y_e += eps grad h, h harmonic (interface_jump)
/// A changed v gets its true error recomputed. eps = 0 returns base.
inline Candidate
perturb( const ManufacturedProblem& mp, const Candidate& base, PerturbTarget target, double eps, PerturbMode mode,
         std::uint64_t seed )
{
   require( eps >= 0.0 && std::isfinite( eps ), ErrorKind::invalid_argument, "perturb: eps must be >= 0" );
   const bool jump_mode = mode == PerturbMode::interface_jump;
   require( jump_mode == ( target == PerturbTarget::y_broken ), ErrorKind::invalid_argument,
            "perturb: mode '" + to_string( mode ) + "' cannot act on target '" + to_string( target ) + "'" );
   if( eps == 0.0 )
      return base;

   const ScalarField p = perturbation_direction( mp, mode, seed );
   Candidate c = base;
   switch( target )
   {
   case PerturbTarget::v:
      c.v = base.v + eps * p;
      c.true_error = true_error( mp, c.v );
      break;
   case PerturbTarget::y:
   {
      const VectorField q = eps * gradient_of( p );
      c.y_i = base.y_i + q;
      c.y_e = base.y_e + q;
      break;
   }
   case PerturbTarget::y_broken: c.y_e = base.y_e + eps * gradient_of( p ); break;
   }
   return c;
}

/// Outcome of the ManufacturedProblem invariants.
struct ManufacturedCheck
{
   double closure_residual = 0.0; // max |f + div(A grad u)| / max |f|, or absolute if f = 0
   double fd_divergence_error = 0.0;
   double trace_mismatch = 0.0;
   double weighted_u_norm = 0.0;
   bool ok = false;
};

inline ManufacturedCheck
check_manufactured( const ManufacturedProblem& mp, std::uint64_t seed = 1 )
{
   const Problem& p = mp.problem;
   const int N = p.domain.dimension;
   const double a = p.domain.inner_radius, R = p.domain.interface_radius;
   ManufacturedCheck c;
   const auto pts = sample_shell( N, a * 1.01, 3.0 * R, 100, seed );
   double worst = 0.0, fmax = 0.0;
   for( const auto& x : pts )
   {
      worst = std::max( worst, std::abs( p.f.value( x ) + mp.exact_flux.divergence( x ) ) );
      fmax = std::max( fmax, std::abs( p.f.value( x ) ) );
   }
   c.closure_residual = fmax > 0.0 ? worst / fmax : worst;
   // central differences of A grad u against the closure divergence, scaled
   // by |A grad u| / r so harmonic cases (div = 0) stay meaningful
   double fd_worst = 0.0, fd_scale = 0.0;
   for( const auto& x : pts )
   {
      const double h = 1e-5;
      double fd = 0.0;
      for( int i = 0; i < N; ++i )
      {
         Point xp = x, xm = x;
         xp[i] += h;
         xm[i] -= h;
         fd += ( mp.exact_flux.value( xp )[i] - mp.exact_flux.value( xm )[i] ) / ( 2.0 * h );
      }
      fd_worst = std::max( fd_worst, std::abs( fd - mp.exact_flux.divergence( x ) ) );
      fd_scale = std::max( fd_scale, mp.exact_flux.value( x ).norm() / x.norm() );
   }
   c.fd_divergence_error = fd_worst / fd_scale;
   const SphereTrace t = analyze( mp.exact_u, *p.gamma_rule, p.disc.band_limit );
   for( std::size_t k = 0; k < t.coefficients.size(); ++k )
      c.trace_mismatch = std::max( c.trace_mismatch, std::abs( t.coefficients[k] - p.g.coefficients[k] ) );

   // membership: ||u||_{-1} (N = 3) or ||u/(r ln r)|| (N = 2), stable under tail refinement
   auto member = [&]( const QuadratureRule& tail ) {
      if( N == 2 )
         return std::hypot( log_weighted_norm( mp.exact_u, LogWeight::over_rlnr, *p.omega_i ),
                            log_weighted_norm( mp.exact_u, LogWeight::over_rlnr, tail ) );
      return std::hypot( weighted_norm( mp.exact_u, -1.0, *p.omega_i ), weighted_norm( mp.exact_u, -1.0, tail ) );
   };
   c.weighted_u_norm = member( *p.omega_e );
   const double again = member( *p.omega_e_check );
   const bool finite = std::isfinite( c.weighted_u_norm ) &&
                       std::abs( again - c.weighted_u_norm ) <= kTailDivergenceTolerance * c.weighted_u_norm;
   c.ok = c.closure_residual <= 1e-9 && c.fd_divergence_error <= 1e-5 && c.trace_mismatch <= 1e-12 && finite;
   return c;
}

} // namespace exmaj
