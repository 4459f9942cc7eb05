// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "exmaj/fields.hpp"
#include "exmaj/radial_fem.hpp"
#include "exmaj/trace.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace exmaj
{

/// A computed constant with the data it was derived from.
struct ConstantReport
{
   std::string name;
   double value = 0.0;
   std::string method; // formula | eigensolve | mode_minimization
   std::vector<double> mode_values;
   int extremal_index = -1;
   std::map<std::string, double> discretization;
   double relative_accuracy = 0.0;
};

/// Poincare constant of ||w||_{-1} <= c_N ||grad w||: 2/(N-2) for N >= 3;
/// 2 for N = 2 (log weight) and N = 1 (half-line).
inline double
c_N( int dimension )
{
   require( dimension >= 1, ErrorKind::invalid_argument, "c_N: dimension must be >= 1" );
   if( dimension >= 3 )
      return 2.0 / ( dimension - 2 );
   return 2.0;
}

/// Residual weight from the sup of the weight over the annulus:
/// c_N (1 + R) / sqrt(c_A) for N >= 3, 2 R ln R / sqrt(c_A) for N = 2.
inline double
c_o_formula( int dimension, double interface_radius, double c_A )
{
   const double R = interface_radius;
   require( dimension >= 2, ErrorKind::invalid_argument, "c_o_formula: not defined for N = 1" );
   require( c_A > 0.0, ErrorKind::invalid_argument, "c_o_formula: need c_A > 0" );
   if( dimension == 2 )
   {
      require( R > 1.0, ErrorKind::invalid_argument, "c_o_formula: N = 2 needs R > 1" );
      return 2.0 * R * std::log( R ) / std::sqrt( c_A );
   }
   return c_N( dimension ) * ( 1.0 + R ) / std::sqrt( c_A );
}

inline double
c_o_formula( const ExteriorDomain& domain, const Coefficient& A )
{
   domain.validate();
   return c_o_formula( domain.dimension, domain.interface_radius, A.c_A );
}

namespace detail
{

inline double
relative_change( double coarse, double fine )
{
   return std::abs( coarse - fine ) / std::abs( fine );
}

inline std::size_t
argmax( const std::vector<double>& v )
{
   return std::size_t( std::max_element( v.begin(), v.end() ) - v.begin() );
}

} // namespace detail

/// Friedrichs constant of the annulus a < r < R for functions vanishing on
/// r = a, from the per-degree radial eigenproblems. The minimum eigenvalue is
/// at degree 0; the value is inflated by the observed mesh-refinement change.
inline ConstantReport
c_omega_i( const ExteriorDomain& domain, int modes = 8, int mesh = 64 )
{
   domain.validate();
   const int N = domain.dimension;
   require( N == 2 || N == 3, ErrorKind::invalid_argument, "c_omega_i: N must be 2 or 3" );
   require( modes >= 8, ErrorKind::invalid_argument, "c_omega_i: need modes >= 8" );
   require( mesh >= 64, ErrorKind::invalid_argument, "c_omega_i: need mesh >= 64" );
   const RadialFem coarse( N, domain.inner_radius, domain.interface_radius, mesh );
   const RadialFem fine( N, domain.inner_radius, domain.interface_radius, 2 * mesh );

   ConstantReport rep;
   rep.name = "c_omega_i";
   rep.method = "eigensolve";
   for( int l = 0; l <= modes; ++l )
   {
      const double lambda = fine.smallest_eigenvalue( AngularBasis::laplace_beltrami( N, l ) );
      if( !rep.mode_values.empty() )
         require( lambda > rep.mode_values.back(), ErrorKind::numerical,
                  "c_omega_i: mode eigenvalues are not increasing at degree " + std::to_string( l ) +
                      " (mesh too coarse for this many modes)" );
      rep.mode_values.push_back( lambda );
   }
   const auto lowest = std::min_element( rep.mode_values.begin(), rep.mode_values.end() );
   rep.extremal_index = int( lowest - rep.mode_values.begin() );
   require( rep.extremal_index == 0, ErrorKind::numerical, "c_omega_i: smallest eigenvalue is not at degree 0" );

   const double c_fine = 1.0 / std::sqrt( *lowest );
   const double c_coarse = 1.0 / std::sqrt( coarse.smallest_eigenvalue( 0.0 ) );
   rep.relative_accuracy = detail::relative_change( c_coarse, c_fine );
   require( rep.relative_accuracy < 1e-6, ErrorKind::numerical,
            "c_omega_i: refined mesh changes the constant by more than 1e-6" );
   rep.value = c_fine * ( 1.0 + rep.relative_accuracy );
   rep.discretization = { { "modes", modes }, { "mesh", mesh }, { "refined_mesh", 2 * mesh }, { "degree", 3 } };
   return rep;
}

/// Mode-wise extension of sphere data on |x| = a into a < |x| < cutoff:
/// coefficient c_k of degree l goes to c_k psi_l(r) Y_k(x/|x|) / a^{(N-1)/2},
/// with psi_l the discrete minimal-energy profile, psi_l(a) = 1, psi_l(cutoff) = 0.
class TraceExtension
{
 public:
   TraceExtension() = default;

   TraceExtension( int dimension, double inner_radius, double cutoff, int band_limit, int mesh )
       : dimension_( dimension ), inner_radius_( inner_radius ), cutoff_( cutoff ), band_limit_( band_limit ),
         mesh_( mesh )
   {
      require( inner_radius < cutoff, ErrorKind::invalid_argument, "TraceExtension: need a < cutoff" );
      const RadialFem fem( dimension, inner_radius, cutoff, mesh );
      for( int l = 0; l <= band_limit; ++l )
         profiles_.push_back( fem.minimal_energy_profile( AngularBasis::laplace_beltrami( dimension, l ), 1.0, 0.0 ) );
   }

   int dimension() const { return dimension_; }
   int band_limit() const { return band_limit_; }
   double inner_radius() const { return inner_radius_; }
   double cutoff() const { return cutoff_; }
   int mesh() const { return mesh_; }
   const RadialProfileFE& profile( int degree ) const { return profiles_.at( std::size_t( degree ) ); }

   /// ||grad E(phi)||^2 / ||phi||^2_{H^{1/2}} for a pure degree-l trace.
   double
   mode_ratio( int degree ) const
   {
      return profile( degree ).energy() /
             ( std::pow( inner_radius_, dimension_ - 1 ) *
               half_multiplier( dimension_, degree, inner_radius_ ) );
   }

   /// E(t) as a field with value and gradient.
   ScalarField
   field( const SphereTrace& t ) const
   {
      check( t );
      const AngularBasis basis( dimension_, t.band_limit );
      const double scale = std::pow( inner_radius_, -0.5 * ( dimension_ - 1 ) );
      const auto self = *this;
      const auto coeffs = t.coefficients;
      ScalarField f;
      f.value = [self, basis, coeffs, scale]( const Point& x ) {
         const double r = x.norm();
         double s = 0.0;
         for( std::size_t k = 0; k < basis.size(); ++k )
            if( coeffs[k] != 0.0 )
               s += coeffs[k] * self.profile( basis.mode( k ).degree ).value( r ) * basis.value( k, x );
         return scale * s;
      };
      f.gradient = [self, basis, coeffs, scale]( const Point& x ) {
         const double r = x.norm();
         const Vec u = x / r;
         Vec g = Vec::Zero();
         for( std::size_t k = 0; k < basis.size(); ++k )
         {
            if( coeffs[k] == 0.0 )
               continue;
            const auto& p = self.profile( basis.mode( k ).degree );
            const AngularJet Y = basis.jet( k, x, 1 );
            g += coeffs[k] * ( p.derivative( r ) * Y.value * u + p.value( r ) * Y.gradient );
         }
         return ( scale * g ).eval();
      };
      f.label = "extension";
      return f;
   }

   /// ||A^{1/2} grad E(t)|| by tensor quadrature aligned with the FEM
   /// elements (exact for the piecewise cubic profiles when A is constant).
   double
   energy( const Coefficient& A, const SphereTrace& t ) const
   {
      check( t );
      const int N = dimension_;
      const AngularBasis basis( N, t.band_limit );
      const auto [gx, gw] = gauss_legendre( 4 );
      const auto [dirs, dw] = unit_sphere_rule( N, t.band_limit + 2 );
      const double scale = std::pow( inner_radius_, -0.5 * ( N - 1 ) );
      const std::size_t K = basis.size();

      // angular values and unit-radius gradients per direction
      std::vector<double> Y( dirs.size() * K );
      std::vector<Vec> G( dirs.size() * K );
      for( std::size_t j = 0; j < dirs.size(); ++j )
         for( std::size_t k = 0; k < K; ++k )
         {
            const AngularJet jet = basis.jet( k, dirs[j], 1 );
            Y[j * K + k] = jet.value;
            G[j * K + k] = jet.gradient;
         }

      std::vector<double> radii, rweights;
      const double h = ( cutoff_ - inner_radius_ ) / mesh_;
      for( int e = 0; e < mesh_; ++e )
         for( std::size_t q = 0; q < gx.size(); ++q )
         {
            const double r = inner_radius_ + ( e + 0.5 * ( gx[q] + 1.0 ) ) * h;
            radii.push_back( r );
            rweights.push_back( 0.5 * h * gw[q] * std::pow( r, N - 1 ) );
         }

      // profile values and derivatives per radius and degree
      const std::size_t nl = std::size_t( t.band_limit ) + 1;
      std::vector<double> P( radii.size() * nl ), D( radii.size() * nl );
      for( std::size_t ir = 0; ir < radii.size(); ++ir )
         for( std::size_t l = 0; l < nl; ++l )
         {
            P[ir * nl + l] = profile( int( l ) ).value( radii[ir] );
            D[ir * nl + l] = profile( int( l ) ).derivative( radii[ir] );
         }

      const std::size_t nd = dirs.size();
      const double sq = reduce_terms( radii.size() * nd, [&]( std::size_t i ) {
         const std::size_t ir = i / nd, j = i % nd;
         const double r = radii[ir];
         Vec grad = Vec::Zero();
         for( std::size_t k = 0; k < K; ++k )
         {
            if( t.coefficients[k] == 0.0 )
               continue;
            const std::size_t l = std::size_t( basis.mode( k ).degree );
            grad += t.coefficients[k] *
                    ( D[ir * nl + l] * Y[j * K + k] * dirs[j] + P[ir * nl + l] / r * G[j * K + k] );
         }
         grad *= scale;
         const Mat m = A.matrix( r * dirs[j] );
         return rweights[ir] * dw[j] * grad.dot( m * grad );
      } );
      return std::sqrt( std::max( sq, 0.0 ) );
   }

 private:
   void
   check( const SphereTrace& t ) const
   {
      t.check();
      require( t.dimension == dimension_ && std::abs( t.radius - inner_radius_ ) <= 1e-14 * inner_radius_,
               ErrorKind::invalid_argument, "TraceExtension: trace does not live on the inner sphere" );
      require( t.band_limit <= band_limit_, ErrorKind::invalid_argument,
               "TraceExtension: trace band limit exceeds the extension's" );
   }

   int dimension_ = 3;
   double inner_radius_ = 1.0;
   double cutoff_ = 2.0;
   int band_limit_ = 0;
   int mesh_ = 64;
   std::vector<RadialProfileFE> profiles_;
};

/// Extension constant: ||A^{1/2} grad E phi|| <= c_gamma ||phi||_{H^{1/2}(gamma)}
/// for traces of degree <= modes, c_gamma = sqrt(c_A_plus) max_l sqrt(E_l / mu_l).
inline ConstantReport
c_gamma_extension( const ExteriorDomain& domain, const Coefficient& A, double cutoff, int modes = 8, int mesh = 64 )
{
   domain.validate();
   require( domain.inner_radius < cutoff && cutoff <= domain.interface_radius, ErrorKind::invalid_argument,
            "c_gamma_extension: cutoff must lie in (a, R]" );
   require( modes >= 0 && mesh >= 1, ErrorKind::invalid_argument, "c_gamma_extension: bad discretization" );
   const int L = domain.dimension == 1 ? 0 : modes;
   const TraceExtension coarse( domain.dimension, domain.inner_radius, cutoff, L, mesh );
   const TraceExtension fine( domain.dimension, domain.inner_radius, cutoff, L, 2 * mesh );

   ConstantReport rep;
   rep.name = "c_gamma";
   rep.method = "mode_minimization";
   double delta = 0.0;
   for( int l = 0; l <= L; ++l )
   {
      rep.mode_values.push_back( std::sqrt( fine.mode_ratio( l ) ) );
      delta = std::max( delta, detail::relative_change( std::sqrt( coarse.mode_ratio( l ) ), rep.mode_values.back() ) );
   }
   rep.extremal_index = int( detail::argmax( rep.mode_values ) );
   rep.relative_accuracy = delta;
   rep.value = std::sqrt( A.c_A_plus ) * rep.mode_values[std::size_t( rep.extremal_index )] * ( 1.0 + delta );
   rep.discretization = { { "modes", L }, { "mesh", mesh }, { "refined_mesh", 2 * mesh }, { "cutoff", cutoff },
                          { "degree", 3 } };
   return rep;
}

/// Trace constant: ||tau_Gamma w||_{H^{1/2}(Gamma)} <= c_Gamma ||A^{1/2} grad w|| for
/// w vanishing on r = a, bounded through the annulus a < r < R.
inline ConstantReport
c_Gamma_trace( const ExteriorDomain& domain, const Coefficient& A, int modes = 8, int mesh = 64 )
{
   domain.validate();
   require( modes >= 0 && mesh >= 1, ErrorKind::invalid_argument, "c_Gamma_trace: bad discretization" );
   const int N = domain.dimension;
   const double a = domain.inner_radius, R = domain.interface_radius;
   const int L = N == 1 ? 0 : modes;
   const RadialFem coarse( N, a, R, mesh );
   const RadialFem fine( N, a, R, 2 * mesh );

   ConstantReport rep;
   rep.name = "c_Gamma";
   rep.method = "mode_minimization";
   double delta = 0.0;
   const double surface = std::pow( R, N - 1 );
   for( int l = 0; l <= L; ++l )
   {
      const double k = AngularBasis::laplace_beltrami( N, l );
      const double mu = half_multiplier( N, l, R );
      const double mf = fine.minimal_energy_profile( k, 0.0, 1.0 ).energy();
      const double mc = coarse.minimal_energy_profile( k, 0.0, 1.0 ).energy();
      rep.mode_values.push_back( std::sqrt( mu * surface / mf ) );
      delta = std::max( delta, detail::relative_change( std::sqrt( mu * surface / mc ), rep.mode_values.back() ) );
   }
   rep.extremal_index = int( detail::argmax( rep.mode_values ) );
   rep.relative_accuracy = delta;
   rep.value = rep.mode_values[std::size_t( rep.extremal_index )] / std::sqrt( A.c_A ) * ( 1.0 + delta );
   rep.discretization = { { "modes", L }, { "mesh", mesh }, { "refined_mesh", 2 * mesh }, { "degree", 3 } };
   return rep;
}

} // namespace exmaj
