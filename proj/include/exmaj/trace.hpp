// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "exmaj/fields.hpp"
#include "exmaj/harmonics.hpp"

#include <cmath>
#include <vector>

namespace exmaj
{

/// Coefficients of a function on the sphere |x| = radius with respect to the
/// surface-measure orthonormal basis Y_k(x/|x|) / radius^{(N-1)/2}, with Y_k
/// from AngularBasis(N, band_limit). For N = 1 the single coefficient is the
/// point value.
struct SphereTrace
{
   double radius = 1.0;
   int dimension = 3;
   int band_limit = 0;
   std::vector<double> coefficients;

   static std::size_t
   expected_size( int dimension, int band_limit )
   {
      if( dimension == 1 )
         return 1;
      if( dimension == 2 )
         return std::size_t( 2 * band_limit + 1 );
      return std::size_t( ( band_limit + 1 ) * ( band_limit + 1 ) );
   }

   static SphereTrace
   zero( double radius, int dimension, int band_limit )
   {
      return { radius, dimension, band_limit, std::vector<double>( expected_size( dimension, band_limit ), 0.0 ) };
   }

   void
   check() const
   {
      require( coefficients.size() == expected_size( dimension, band_limit ), ErrorKind::invalid_argument,
               "SphereTrace: coefficient count does not match N and L" );
   }
};

inline void
require_compatible( const SphereTrace& a, const SphereTrace& b, const char* where )
{
   require( a.radius == b.radius && a.dimension == b.dimension && a.band_limit == b.band_limit,
            ErrorKind::invalid_argument, std::string( where ) + ": mismatched trace metadata (radius, N, L)" );
}

inline SphereTrace
operator-( const SphereTrace& a, const SphereTrace& b )
{
   require_compatible( a, b, "SphereTrace difference" );
   SphereTrace d = a;
   for( std::size_t k = 0; k < d.coefficients.size(); ++k )
      d.coefficients[k] -= b.coefficients[k];
   return d;
}

inline SphereTrace
operator*( double c, const SphereTrace& a )
{
   SphereTrace d = a;
   for( auto& v : d.coefficients )
      v *= c;
   return d;
}

namespace detail
{

/// Sphere-rule projection of point values onto the basis.
template <typename PointValue>
SphereTrace
project( PointValue&& pv, const QuadratureRule& sphere, int band_limit )
{
   const int N = sphere.dimension();
   require( sphere.sphere_radius() > 0.0, ErrorKind::invalid_argument, "trace analysis needs a sphere rule" );
   require( angular_exactness( N, sphere.angular_order() ) >= 2 * band_limit, ErrorKind::precondition,
            "trace analysis: angular rule of order " + std::to_string( sphere.angular_order() ) +
                " is not exact for degree 2L = " + std::to_string( 2 * band_limit ) );
   const double radius = sphere.sphere_radius();
   const AngularBasis basis( N, band_limit );
   const double scale = std::pow( radius, -0.5 * ( N - 1 ) );
   std::vector<double> values( sphere.size() );
   for( std::size_t i = 0; i < sphere.size(); ++i )
   {
      values[i] = pv( sphere.nodes()[i] );
      require( std::isfinite( values[i] ), ErrorKind::non_finite,
               "trace analysis: non-finite value at " + describe_point( sphere.nodes()[i] ) );
   }
   SphereTrace t = SphereTrace::zero( radius, N, band_limit );
   for( std::size_t k = 0; k < basis.size(); ++k )
   {
      CompensatedSum s;
      for( std::size_t i = 0; i < sphere.size(); ++i )
         s.add( sphere.weights()[i] * values[i] * scale * basis.value( k, sphere.nodes()[i] ) );
      t.coefficients[k] = s.value();
   }
   return t;
}

} // namespace detail

/// Trace coefficients of f on the sphere carried by `sphere` (see sphere_rule).
inline SphereTrace
analyze( const ScalarField& f, const QuadratureRule& sphere, int band_limit )
{
   return detail::project( [&]( const Point& x ) { return f.value( x ); }, sphere, band_limit );
}

/// Normal trace x/|x| . y on the sphere (normal points away from the origin).
inline SphereTrace
normal_trace( const VectorField& y, const QuadratureRule& sphere, int band_limit )
{
   return detail::project( [&]( const Point& x ) { return y.value( x ).dot( x ) / x.norm(); }, sphere,
                           band_limit );
}

/// Band-limited function represented by t, evaluated at x on (or off) the sphere.
inline double
reconstruct( const SphereTrace& t, const Point& x )
{
   t.check();
   const AngularBasis basis( t.dimension, t.band_limit );
   const double scale = std::pow( t.radius, -0.5 * ( t.dimension - 1 ) );
   CompensatedSum s;
   for( std::size_t k = 0; k < basis.size(); ++k )
      if( t.coefficients[k] != 0.0 )
         s.add( t.coefficients[k] * scale * basis.value( k, x ) );
   return s.value();
}

/// Surface L^2 norm squared via Parseval.
inline double
l2_norm( const SphereTrace& t )
{
   CompensatedSum s;
   for( double c : t.coefficients )
      s.add( c * c );
   return std::sqrt( s.value() );
}

/// (sum (1 + l(l+N-2)/radius^2)^{exponent} |c|^2)^{1/2}, exponent = +-1/2.
/// For N = 1 the multiplier is 1 and this is the absolute point value.
inline double
sobolev_norm( const SphereTrace& t, double exponent )
{
   t.check();
   const AngularBasis basis( t.dimension, t.band_limit );
   CompensatedSum s;
   for( std::size_t k = 0; k < basis.size(); ++k )
   {
      const double mult = t.dimension == 1 ? 1.0 : 1.0 + basis.eigenvalue( k ) / ( t.radius * t.radius );
      s.add( std::pow( mult, exponent ) * t.coefficients[k] * t.coefficients[k] );
   }
   return std::sqrt( s.value() );
}

/// H^{1/2} multiplier mu_l = (1 + l(l+N-2)/radius^2)^{1/2}.
inline double
half_multiplier( int dimension, int degree, double radius )
{
   if( dimension == 1 )
      return 1.0;
   return std::sqrt( 1.0 + AngularBasis::laplace_beltrami( dimension, degree ) / ( radius * radius ) );
}

/// Exterior minus interior normal trace.
inline SphereTrace
jump( const SphereTrace& t_interior, const SphereTrace& t_exterior )
{
   require_compatible( t_interior, t_exterior, "jump" );
   return t_exterior - t_interior;
}

/// Fraction of the L^2 energy carried by degrees > L/2.
inline double
tail_fraction( const SphereTrace& t )
{
   t.check();
   const AngularBasis basis( t.dimension, t.band_limit );
   double total = 0.0, tail = 0.0;
   for( std::size_t k = 0; k < basis.size(); ++k )
   {
      const double e = t.coefficients[k] * t.coefficients[k];
      total += e;
      if( 2 * basis.mode( k ).degree > t.band_limit )
         tail += e;
   }
   return total > 0.0 ? tail / total : 0.0;
}

/// Duality pairing sum c_k d_k.
inline double
pairing( const SphereTrace& a, const SphereTrace& b )
{
   require_compatible( a, b, "pairing" );
   CompensatedSum s;
   for( std::size_t k = 0; k < a.coefficients.size(); ++k )
      s.add( a.coefficients[k] * b.coefficients[k] );
   return s.value();
}

} // namespace exmaj
