// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

// Numerical checks of the weighted Hardy/Poincare inequalities on exterior
// domains, driven by compactly supported bump functions.

#pragma once

#include "exmaj/fields.hpp"
#include "exmaj/geometry.hpp"
#include "exmaj/summation.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace exmaj
{

/// Inequalities pass iff margin >= -kInequalitySlack * rhs.
inline constexpr double kInequalitySlack = 1e-10;
/// Identities pass iff |lhs - rhs| <= kIdentityTolerance * max(|lhs|, |rhs|).
inline constexpr double kIdentityTolerance = 1e-9;
/// Rayleigh ratios may exceed 1 by at most this much.
inline constexpr double kRatioSlack = 1e-10;

struct VerificationRecord
{
   std::string id;
   int N = 0;
   double beta = 0.0;
   std::string descriptor;
   double lhs = 0.0;
   double rhs = 0.0;
   double margin = 0.0; // rhs - lhs
   bool identity = false;
   bool pass = false;
};

inline VerificationRecord
inequality_record( std::string id, int N, double beta, std::string descriptor, double lhs, double rhs )
{
   VerificationRecord r{ std::move( id ), N, beta, std::move( descriptor ), lhs, rhs, rhs - lhs, false, false };
   r.pass = std::isfinite( r.margin ) && r.margin >= -kInequalitySlack * std::abs( rhs );
   return r;
}

inline VerificationRecord
identity_record( std::string id, int N, double beta, std::string descriptor, double lhs, double rhs )
{
   VerificationRecord r{ std::move( id ), N, beta, std::move( descriptor ), lhs, rhs, rhs - lhs, true, false };
   r.pass = std::isfinite( r.margin ) &&
            std::abs( r.margin ) <= kIdentityTolerance * std::max( std::abs( lhs ), std::abs( rhs ) );
   return r;
}

/// x/|x| . grad f(x).
inline ScalarField
radial_derivative( const ScalarField& f )
{
   require( f.has_gradient(), ErrorKind::precondition, "radial_derivative: field '" + f.label + "' has no gradient" );
   ScalarField d;
   d.value = [g = f.gradient]( const Point& x ) {
      const double r = x.norm();
      require( r > 0.0, ErrorKind::invalid_argument, "radial_derivative: evaluated at the origin" );
      return x.dot( g( x ) ) / r;
   };
   d.label = "d_r(" + f.label + ")";
   return d;
}

namespace detail
{

/// exp(-1/(1 - t^2)) and its t-derivative, zero for |t| >= 1.
inline std::pair<double, double>
bump_profile( double t )
{
   if( std::abs( t ) >= 1.0 )
      return { 0.0, 0.0 };
   const double q = 1.0 - t * t;
   const double e = std::exp( -1.0 / q );
   return { e, -2.0 * t / ( q * q ) * e };
}

inline std::string
fmt( double x )
{
   std::ostringstream s;
   s.precision( 6 );
   s << x;
   return s.str();
}

} // namespace detail

/// amplitude * exp(-1/(1 - t^2)), t = |x - center| / radius.
struct BumpFunction
{
   Point center = Point::Zero();
   double radius = 1.0;
   double amplitude = 1.0;

   double value( const Point& x ) const
   {
      return amplitude * detail::bump_profile( ( x - center ).norm() / radius ).first;
   }

   Vec gradient( const Point& x ) const
   {
      const Vec d = x - center;
      const double s = d.norm();
      if( s == 0.0 )
         return Vec::Zero();
      const double dt = detail::bump_profile( s / radius ).second;
      return ( amplitude * dt / ( radius * s ) ) * d;
   }
};

/// Sum of bumps with pairwise disjoint supports inside |x| > a.
struct BumpSum
{
   int dimension = 3;
   std::vector<BumpFunction> bumps;

   void validate( double a ) const
   {
      require( dimension == 2 || dimension == 3, ErrorKind::invalid_argument,
               "BumpSum: ball quadrature is built for N = 2, 3" );
      for( std::size_t i = 0; i < bumps.size(); ++i )
      {
         const auto& b = bumps[i];
         require( b.radius > 0.0 && std::isfinite( b.amplitude ), ErrorKind::invalid_argument,
                  "BumpSum: bump " + std::to_string( i ) + " has a bad radius or amplitude" );
         require( dimension == 3 || b.center[2] == 0.0, ErrorKind::invalid_argument,
                  "BumpSum: N = 2 bump " + std::to_string( i ) + " has a nonzero third coordinate" );
         require( b.center.norm() - b.radius > a, ErrorKind::precondition,
                  "BumpSum: support of bump " + std::to_string( i ) + " reaches |x| <= " + detail::fmt( a ) );
         for( std::size_t j = 0; j < i; ++j )
            require( ( b.center - bumps[j].center ).norm() >= b.radius + bumps[j].radius, ErrorKind::precondition,
                     "BumpSum: supports of bumps " + std::to_string( j ) + " and " + std::to_string( i ) +
                         " overlap" );
      }
   }

   double value( const Point& x ) const
   {
      double s = 0.0;
      for( const auto& b : bumps )
         s += b.value( x );
      return s;
   }

   Vec gradient( const Point& x ) const
   {
      Vec g = Vec::Zero();
      for( const auto& b : bumps )
         g += b.gradient( x );
      return g;
   }

   ScalarField field() const
   {
      ScalarField f;
      f.value = [s = *this]( const Point& x ) { return s.value( x ); };
      f.gradient = [s = *this]( const Point& x ) { return s.gradient( x ); };
      f.label = descriptor();
      return f;
   }

   std::string descriptor() const
   {
      std::string s = "bumps" + std::to_string( dimension ) + "d[";
      for( std::size_t i = 0; i < bumps.size(); ++i )
      {
         const auto& b = bumps[i];
         s += ( i ? ";" : "" ) + std::string( "c=(" ) + detail::fmt( b.center[0] ) + "," + detail::fmt( b.center[1] );
         if( dimension == 3 )
            s += "," + detail::fmt( b.center[2] );
         s += ") r=" + detail::fmt( b.radius ) + " A=" + detail::fmt( b.amplitude );
      }
      return s + "]";
   }
};

/// Bump on the half line t >= 0 (extended by zero to t < 0). A bump whose
/// support contains t = 0 has u(0) != 0.
struct HalfLineBump
{
   double center = 1.0;
   double radius = 0.5;
   double amplitude = 1.0;

   double value( double t ) const
   {
      return t < 0.0 ? 0.0 : amplitude * detail::bump_profile( ( t - center ) / radius ).first;
   }
   double derivative( double t ) const
   {
      return t < 0.0 ? 0.0 : amplitude * detail::bump_profile( ( t - center ) / radius ).second / radius;
   }
};

struct HalfLineFunction
{
   std::vector<HalfLineBump> bumps;

   void validate() const
   {
      for( std::size_t i = 0; i < bumps.size(); ++i )
      {
         const auto& b = bumps[i];
         require( b.radius > 0.0 && b.center + b.radius > 0.0 && std::isfinite( b.amplitude ),
                  ErrorKind::invalid_argument, "HalfLineFunction: bump " + std::to_string( i ) + " misses t > 0" );
         for( std::size_t j = 0; j < i; ++j )
            require( std::abs( b.center - bumps[j].center ) >= b.radius + bumps[j].radius, ErrorKind::precondition,
                     "HalfLineFunction: supports of bumps " + std::to_string( j ) + " and " + std::to_string( i ) +
                         " overlap" );
      }
   }

   double at_origin() const
   {
      double s = 0.0;
      for( const auto& b : bumps )
         s += b.value( 0.0 );
      return s;
   }

   std::string descriptor() const
   {
      std::string s = "halfline[";
      for( std::size_t i = 0; i < bumps.size(); ++i )
         s += ( i ? ";" : "" ) + std::string( "c=" ) + detail::fmt( bumps[i].center ) +
              " r=" + detail::fmt( bumps[i].radius ) + " A=" + detail::fmt( bumps[i].amplitude );
      return s + "]";
   }
};

/// Radially symmetric bump phi(|x|) on r0 < |x| < r1, integrated by radial
/// reduction in any dimension.
struct RadialShell
{
   double r0 = 1.5;
   double r1 = 2.5;
   double amplitude = 1.0;

   std::string descriptor() const
   {
      return "shell[" + detail::fmt( r0 ) + "," + detail::fmt( r1 ) + "] A=" + detail::fmt( amplitude );
   }
};

struct BallRuleOptions
{
   int panels = 8;         // radial Gauss pieces per ball / interval
   int order = 16;         // Gauss-Legendre order per piece
   int angular_order = 16; // unit-sphere rule order
};

namespace detail
{

/// Composite Gauss-Legendre sum of f(t) * w over (lo, hi), K quantities at once.
template <std::size_t K, class F>
std::array<double, K>
integrate_interval( double lo, double hi, const BallRuleOptions& o, F&& f )
{
   const auto [gx, gw] = gauss_legendre( o.order );
   std::array<CompensatedSum, K> acc;
   const double h = ( hi - lo ) / o.panels;
   for( int p = 0; p < o.panels; ++p )
      for( int k = 0; k < o.order; ++k )
      {
         const double t = lo + h * ( p + 0.5 * ( gx[k] + 1.0 ) );
         const auto v = f( t );
         for( std::size_t q = 0; q < K; ++q )
            acc[q].add( 0.5 * h * gw[k] * v[q] );
      }
   std::array<double, K> out;
   for( std::size_t q = 0; q < K; ++q )
      out[q] = acc[q].value();
   return out;
}

/// Sum over the (disjoint) balls of f(x, u(x), grad u(x)) in polar
/// coordinates about each center.
template <std::size_t K, class F>
std::array<double, K>
integrate_bumps( const BumpSum& u, const BallRuleOptions& o, F&& f )
{
   const int N = u.dimension;
   const auto [dirs, dw] = unit_sphere_rule( N, o.angular_order );
   std::array<CompensatedSum, K> acc;
   for( const auto& b : u.bumps )
   {
      const auto part = integrate_interval<K>( 0.0, b.radius, o, [&]( double s ) {
         std::array<CompensatedSum, K> ring;
         const double jac = std::pow( s, N - 1 );
         for( std::size_t j = 0; j < dirs.size(); ++j )
         {
            const Point x = b.center + s * dirs[j];
            const auto v = f( x, b.value( x ), b.gradient( x ) );
            for( std::size_t q = 0; q < K; ++q )
               ring[q].add( dw[j] * jac * v[q] );
         }
         std::array<double, K> out;
         for( std::size_t q = 0; q < K; ++q )
            out[q] = ring[q].value();
         return out;
      } );
      for( std::size_t q = 0; q < K; ++q )
         acc[q].add( part[q] );
   }
   std::array<double, K> out;
   for( std::size_t q = 0; q < K; ++q )
      out[q] = acc[q].value();
   for( double v : out )
      require( std::isfinite( v ), ErrorKind::non_finite, "poincare: non-finite integral over " + u.descriptor() );
   return out;
}

template <std::size_t K, class F>
std::array<double, K>
integrate_half_line( const HalfLineFunction& u, const BallRuleOptions& o, F&& f )
{
   std::array<CompensatedSum, K> acc;
   for( const auto& b : u.bumps )
   {
      const auto part = integrate_interval<K>( std::max( 0.0, b.center - b.radius ), b.center + b.radius, o,
                                               [&]( double t ) { return f( t, b.value( t ), b.derivative( t ) ); } );
      for( std::size_t q = 0; q < K; ++q )
         acc[q].add( part[q] );
   }
   std::array<double, K> out;
   for( std::size_t q = 0; q < K; ++q )
      out[q] = acc[q].value();
   return out;
}

/// |S^{N-1}| * int phi-terms r^{N-1} dr over the shell.
template <std::size_t K, class F>
std::array<double, K>
integrate_shell( int N, const RadialShell& s, const BallRuleOptions& o, F&& f )
{
   const RadialProfile phi = radial_bump( s.r0, s.r1, s.amplitude );
   const double area = unit_sphere_area( N );
   return integrate_interval<K>( s.r0, s.r1, o, [&]( double r ) {
      auto v = f( r, phi.value( r ), phi.d1( r ) );
      for( auto& x : v )
         x *= area * std::pow( r, N - 1 );
      return v;
   } );
}

inline void
require_lemma_i_beta( int N, double beta )
{
   require( beta > 1.0 - 0.5 * N, ErrorKind::precondition,
            "lemma (i): beta = " + fmt( beta ) + " must exceed 1 - N/2 = " + fmt( 1.0 - 0.5 * N ) );
}

inline void
require_lemma_ii_beta( int N, double a, double beta )
{
   require( a >= 1.0, ErrorKind::precondition, "lemma (ii): needs the unit ball outside the domain (a >= 1)" );
   require( beta >= 0.5 * ( 3 - N ) || beta <= 1.0 - 0.5 * N, ErrorKind::precondition,
            "lemma (ii): beta = " + fmt( beta ) + " lies in the excluded band (" + fmt( 1.0 - 0.5 * N ) + ", " +
                fmt( 0.5 * ( 3 - N ) ) + ")" );
}

} // namespace detail

// ---------------------------------------------------------------------------
// Lemma checks. Each returns the inequality record; the identity_* functions
// check the partial-integration identity behind it, with the proof's choice
// of the free parameter unless one is given.

/// (2 beta + N - 2) ||r^{beta-1} u|| <= 2 ||r^beta d_r u||, beta > 1 - N/2.
inline VerificationRecord
verify_lemma_i( const ExteriorDomain& d, const BumpSum& u, double beta, const BallRuleOptions& o = {} )
{
   const int N = u.dimension;
   require( N == d.dimension, ErrorKind::invalid_argument, "lemma (i): bump dimension differs from the domain" );
   detail::require_lemma_i_beta( N, beta );
   u.validate( d.inner_radius );
   const auto [A, B] = detail::integrate_bumps<2>( u, o, [&]( const Point& x, double v, const Vec& g ) {
      const double r = x.norm(), dr = x.dot( g ) / r;
      return std::array<double, 2>{ std::pow( r, 2 * beta - 2 ) * v * v, std::pow( r, 2 * beta ) * dr * dr };
   } );
   return inequality_record( "lemma_i", N, beta, u.descriptor(), ( 2 * beta + N - 2 ) * std::sqrt( A ),
                             2.0 * std::sqrt( B ) );
}

/// ||r^b d_r u + g r^{b-1} u||^2 = ||r^b d_r u||^2 + g (g - 2b - N + 2) ||r^{b-1} u||^2.
inline VerificationRecord
identity_lemma_i( const ExteriorDomain& d, const BumpSum& u, double beta, std::optional<double> gamma_hat = {},
                  const BallRuleOptions& o = {} )
{
   const int N = u.dimension;
   require( N == d.dimension, ErrorKind::invalid_argument, "identity (i): bump dimension differs from the domain" );
   detail::require_lemma_i_beta( N, beta );
   u.validate( d.inner_radius );
   const double g = gamma_hat.value_or( 2 * beta + N - 2 );
   const auto [A, B, C] = detail::integrate_bumps<3>( u, o, [&]( const Point& x, double v, const Vec& gr ) {
      const double r = x.norm(), dr = x.dot( gr ) / r;
      const double p = std::pow( r, beta ) * dr, q = std::pow( r, beta - 1 ) * v;
      return std::array<double, 3>{ q * q, p * p, ( p + g * q ) * ( p + g * q ) };
   } );
   return identity_record( "identity_i", N, beta, u.descriptor(), C, B + g * ( g - 2 * beta - N + 2 ) * A );
}

/// |2 beta + N - 3| ||r^{beta-1} u / ln r|| <= 2 ||r^beta d_r u||.
inline VerificationRecord
verify_lemma_ii( const ExteriorDomain& d, const BumpSum& u, double beta, const BallRuleOptions& o = {} )
{
   const int N = u.dimension;
   require( N == d.dimension, ErrorKind::invalid_argument, "lemma (ii): bump dimension differs from the domain" );
   detail::require_lemma_ii_beta( N, d.inner_radius, beta );
   u.validate( d.inner_radius );
   const auto [A, B] = detail::integrate_bumps<2>( u, o, [&]( const Point& x, double v, const Vec& g ) {
      const double r = x.norm(), dr = x.dot( g ) / r;
      const double q = std::pow( r, beta - 1 ) * v / std::log( r );
      return std::array<double, 2>{ q * q, std::pow( r, 2 * beta ) * dr * dr };
   } );
   return inequality_record( "lemma_ii", N, beta, u.descriptor(), std::abs( 2 * beta + N - 3 ) * std::sqrt( A ),
                             2.0 * std::sqrt( B ) );
}

/// ||r^b d_r u + g r^{b-1} u/ln r||^2 = ||r^b d_r u||^2 + g(g + 1)||r^{b-1} u/ln r||^2
///                                     - g(N + 2b - 2)||r^{b-1} u/sqrt(ln r)||^2.
inline VerificationRecord
identity_lemma_ii( const ExteriorDomain& d, const BumpSum& u, double beta, std::optional<double> gamma_hat = {},
                   const BallRuleOptions& o = {} )
{
   const int N = u.dimension;
   require( N == d.dimension, ErrorKind::invalid_argument, "identity (ii): bump dimension differs from the domain" );
   detail::require_lemma_ii_beta( N, d.inner_radius, beta );
   u.validate( d.inner_radius );
   const double g = gamma_hat.value_or( 2 * beta + N - 3 );
   const auto [A, B, C, D] = detail::integrate_bumps<4>( u, o, [&]( const Point& x, double v, const Vec& gr ) {
      const double r = x.norm(), dr = x.dot( gr ) / r, lr = std::log( r );
      const double p = std::pow( r, beta ) * dr, q = std::pow( r, beta - 1 ) * v;
      return std::array<double, 4>{ q * q / ( lr * lr ), p * p, ( p + g * q / lr ) * ( p + g * q / lr ),
                                    q * q / lr };
   } );
   return identity_record( "identity_ii", N, beta, u.descriptor(), C,
                           B + g * ( g + 1 ) * A - g * ( N + 2 * beta - 2 ) * D );
}

/// |2 beta - 1| ||(1+t)^{beta-1} u|| <= 2 ||(1+t)^beta u'|| + |2 min(0, 2 beta - 1)|^{1/2} |u(0)|.
inline VerificationRecord
verify_lemma_iii( const HalfLineFunction& u, double beta, const BallRuleOptions& o = {} )
{
   u.validate();
   const auto [A, B] = detail::integrate_half_line<2>( u, o, [&]( double t, double v, double dv ) {
      return std::array<double, 2>{ std::pow( 1 + t, 2 * beta - 2 ) * v * v, std::pow( 1 + t, 2 * beta ) * dv * dv };
   } );
   const double boundary = std::sqrt( std::abs( 2.0 * std::min( 0.0, 2 * beta - 1 ) ) ) * std::abs( u.at_origin() );
   return inequality_record( "lemma_iii", 1, beta, u.descriptor(), std::abs( 2 * beta - 1 ) * std::sqrt( A ),
                             2.0 * std::sqrt( B ) + boundary );
}

/// Half-line form: ||(1+t)^b u' + g(1+t)^{b-1} u||^2
///   = ||(1+t)^b u'||^2 + g(g - 2b + 1)||(1+t)^{b-1} u||^2 - g u(0)^2.
inline VerificationRecord
identity_lemma_iii( const HalfLineFunction& u, double beta, std::optional<double> gamma_hat = {},
                    const BallRuleOptions& o = {} )
{
   u.validate();
   const double g = gamma_hat.value_or( 2 * beta - 1 );
   const auto [A, B, C] = detail::integrate_half_line<3>( u, o, [&]( double t, double v, double dv ) {
      const double p = std::pow( 1 + t, beta ) * dv, q = std::pow( 1 + t, beta - 1 ) * v;
      return std::array<double, 3>{ q * q, p * p, ( p + g * q ) * ( p + g * q ) };
   } );
   const double u0 = u.at_origin();
   return identity_record( "identity_iii", 1, beta, u.descriptor(), C,
                           B + g * ( g - 2 * beta + 1 ) * A - g * u0 * u0 );
}

// ---------------------------------------------------------------------------
// Corollary chains (beta = 0), one record per link.

enum class ChainCase
{
   i,
   ii,
   iii
};

/// Case i (N = 3): ||u||_{-1} <= ||u/(1+r)|| <= ||u/r|| <= c ||d_r u|| <= c ||grad u||,
/// c = 2/(N-2), plus the end-to-end ||u||_{-1} <= c ||grad u|| as cor_i_total.
/// Case ii (N = 2, a >= 1): ||u/(r ln r)|| <= 2 ||d_r u|| <= 2 ||grad u||.
inline std::vector<VerificationRecord>
verify_corollary_chain( const ExteriorDomain& d, const BumpSum& u, ChainCase which, const BallRuleOptions& o = {} )
{
   const int N = u.dimension;
   require( N == d.dimension, ErrorKind::invalid_argument, "corollary: bump dimension differs from the domain" );
   u.validate( d.inner_radius );
   const std::string desc = u.descriptor();
   if( which == ChainCase::i )
   {
      require( N >= 3, ErrorKind::precondition, "corollary (i): needs N >= 3" );
      const auto [W, P, Q, S, G] = detail::integrate_bumps<5>( u, o, [&]( const Point& x, double v, const Vec& g ) {
         const double r = x.norm(), dr = x.dot( g ) / r;
         return std::array<double, 5>{ v * v / ( 1 + r * r ), v * v / ( ( 1 + r ) * ( 1 + r ) ), v * v / ( r * r ),
                                       dr * dr, g.squaredNorm() };
      } );
      const double c = 2.0 / ( N - 2 );
      return { inequality_record( "cor_i_1", N, 0.0, desc, std::sqrt( W ), std::sqrt( P ) ),
               inequality_record( "cor_i_2", N, 0.0, desc, std::sqrt( P ), std::sqrt( Q ) ),
               inequality_record( "cor_i_3", N, 0.0, desc, std::sqrt( Q ), c * std::sqrt( S ) ),
               inequality_record( "cor_i_4", N, 0.0, desc, c * std::sqrt( S ), c * std::sqrt( G ) ),
               inequality_record( "cor_i_total", N, 0.0, desc, std::sqrt( W ), c * std::sqrt( G ) ) };
   }
   require( which == ChainCase::ii, ErrorKind::invalid_argument,
            "corollary (iii) is one-dimensional: use the HalfLineFunction overload" );
   require( N == 2 && d.inner_radius >= 1.0, ErrorKind::precondition, "corollary (ii): needs N = 2 and a >= 1" );
   const auto [Q, S, G] = detail::integrate_bumps<3>( u, o, [&]( const Point& x, double v, const Vec& g ) {
      const double r = x.norm(), dr = x.dot( g ) / r, q = v / ( r * std::log( r ) );
      return std::array<double, 3>{ q * q, dr * dr, g.squaredNorm() };
   } );
   return { inequality_record( "cor_ii_1", N, 0.0, desc, std::sqrt( Q ), 2.0 * std::sqrt( S ) ),
            inequality_record( "cor_ii_2", N, 0.0, desc, 2.0 * std::sqrt( S ), 2.0 * std::sqrt( G ) ) };
}

/// Case iii (N = 1): ||u||_{-1} <= ||u/(1+r)|| <= 2 ||d_r u|| + sqrt(2)|u(0)|
/// <= 2 ||u'|| + sqrt(2)|u(0)|; u(0) = 0 when the support avoids t = 0.
inline std::vector<VerificationRecord>
verify_corollary_chain( const HalfLineFunction& u, const BallRuleOptions& o = {} )
{
   u.validate();
   const auto [W, P, S] = detail::integrate_half_line<3>( u, o, [&]( double t, double v, double dv ) {
      return std::array<double, 3>{ v * v / ( 1 + t * t ), v * v / ( ( 1 + t ) * ( 1 + t ) ), dv * dv };
   } );
   // d_r u = u' on t > 0
   const double b = std::sqrt( 2.0 ) * std::abs( u.at_origin() ), D = S;
   const std::string desc = u.descriptor();
   return { inequality_record( "cor_iii_1", 1, 0.0, desc, std::sqrt( W ), std::sqrt( P ) ),
            inequality_record( "cor_iii_2", 1, 0.0, desc, std::sqrt( P ), 2.0 * std::sqrt( S ) + b ),
            inequality_record( "cor_iii_3", 1, 0.0, desc, 2.0 * std::sqrt( S ) + b, 2.0 * std::sqrt( D ) + b ) };
}

/// Case i for a radial shell in any N >= 3 by radial reduction; the last link
/// is an equality since grad u = (d_r u) x/r.
inline std::vector<VerificationRecord>
verify_corollary_chain( int N, double a, const RadialShell& s, const BallRuleOptions& o = {} )
{
   require( N >= 3, ErrorKind::precondition, "corollary (i): needs N >= 3" );
   require( s.r0 > a && s.r1 > s.r0, ErrorKind::precondition, "corollary (i): shell must lie in r > a" );
   const auto [W, P, Q, S] = detail::integrate_shell<4>( N, s, o, []( double r, double v, double dv ) {
      return std::array<double, 4>{ v * v / ( 1 + r * r ), v * v / ( ( 1 + r ) * ( 1 + r ) ), v * v / ( r * r ),
                                    dv * dv };
   } );
   const double c = 2.0 / ( N - 2 );
   const std::string desc = s.descriptor();
   return { inequality_record( "cor_i_1", N, 0.0, desc, std::sqrt( W ), std::sqrt( P ) ),
            inequality_record( "cor_i_2", N, 0.0, desc, std::sqrt( P ), std::sqrt( Q ) ),
            inequality_record( "cor_i_3", N, 0.0, desc, std::sqrt( Q ), c * std::sqrt( S ) ),
            inequality_record( "cor_i_4", N, 0.0, desc, c * std::sqrt( S ), c * std::sqrt( S ) ),
            inequality_record( "cor_i_total", N, 0.0, desc, std::sqrt( W ), c * std::sqrt( S ) ) };
}

// ---------------------------------------------------------------------------
// Tightness probe.

struct RayleighResult
{
   double best_ratio = 0.0;
   std::size_t best_index = 0;
   std::vector<double> ratios;
};

/// lhs/rhs of lemma_i | lemma_ii | lemma_iii over a family of radial shells
/// (for lemma_iii the shell is the half-line interval [r0, r1]).
inline RayleighResult
rayleigh_scan( const ExteriorDomain& d, const std::string& id, double beta, const std::vector<RadialShell>& family,
               const BallRuleOptions& o = {} )
{
   require( !family.empty(), ErrorKind::invalid_argument, "rayleigh_scan: empty family" );
   const int N = d.dimension;
   RayleighResult res;
   for( std::size_t k = 0; k < family.size(); ++k )
   {
      const auto& s = family[k];
      require( s.r1 > s.r0, ErrorKind::invalid_argument, "rayleigh_scan: shell " + std::to_string( k ) + " is empty" );
      double lhs = 0.0, rhs = 0.0;
      if( id == "lemma_i" )
      {
         detail::require_lemma_i_beta( N, beta );
         require( s.r0 > d.inner_radius, ErrorKind::precondition, "rayleigh_scan: shell must lie in r > a" );
         const auto [A, B] = detail::integrate_shell<2>( N, s, o, [&]( double r, double v, double dv ) {
            return std::array<double, 2>{ std::pow( r, 2 * beta - 2 ) * v * v, std::pow( r, 2 * beta ) * dv * dv };
         } );
         lhs = ( 2 * beta + N - 2 ) * std::sqrt( A );
         rhs = 2.0 * std::sqrt( B );
      }
      else if( id == "lemma_ii" )
      {
         detail::require_lemma_ii_beta( N, d.inner_radius, beta );
         require( s.r0 > d.inner_radius, ErrorKind::precondition, "rayleigh_scan: shell must lie in r > a" );
         const auto [A, B] = detail::integrate_shell<2>( N, s, o, [&]( double r, double v, double dv ) {
            const double q = std::pow( r, beta - 1 ) * v / std::log( r );
            return std::array<double, 2>{ q * q, std::pow( r, 2 * beta ) * dv * dv };
         } );
         lhs = std::abs( 2 * beta + N - 3 ) * std::sqrt( A );
         rhs = 2.0 * std::sqrt( B );
      }
      else if( id == "lemma_iii" )
      {
         require( s.r0 >= 0.0, ErrorKind::precondition, "rayleigh_scan: half-line interval must lie in t >= 0" );
         const auto [A, B] = detail::integrate_shell<2>( 1, s, o, [&]( double t, double v, double dv ) {
            return std::array<double, 2>{ std::pow( 1 + t, 2 * beta - 2 ) * v * v, std::pow( 1 + t, 2 * beta ) * dv * dv };
         } );
         lhs = std::abs( 2 * beta - 1 ) * std::sqrt( A );
         rhs = 2.0 * std::sqrt( B );
      }
      else
         fail( ErrorKind::invalid_argument, "rayleigh_scan: unknown inequality '" + id +
                                                "' (lemma_i | lemma_ii | lemma_iii)" );
      const double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
      res.ratios.push_back( ratio );
      if( ratio > res.best_ratio || k == 0 )
      {
         res.best_ratio = ratio;
         res.best_index = k;
      }
   }
   return res;
}

// ---------------------------------------------------------------------------
// Random test functions and the full suite.

/// 1 to max_bumps disjoint balls in a < |x| < a + span, amplitudes in [-1, 1].
inline BumpSum
random_bump_sum( int N, double a, std::mt19937_64& gen, int max_bumps = 3, double span = 4.0 )
{
   std::uniform_real_distribution<double> unit( 0.0, 1.0 );
   std::normal_distribution<double> normal;
   BumpSum u;
   u.dimension = N;
   const int count = 1 + int( unit( gen ) * max_bumps ) % max_bumps;
   for( int tries = 0; int( u.bumps.size() ) < count && tries < 100; ++tries )
   {
      BumpFunction b;
      b.radius = 0.1 + 1.4 * unit( gen ) * unit( gen );
      const double gap = 0.01 + 0.5 * unit( gen );
      const double dist = a + b.radius + gap + std::max( 0.0, span - 2 * b.radius - gap ) * unit( gen );
      Vec dir( normal( gen ), normal( gen ), N == 3 ? normal( gen ) : 0.0 );
      dir /= dir.norm();
      b.center = dist * dir;
      b.amplitude = 2.0 * unit( gen ) - 1.0;
      bool ok = true;
      for( const auto& o : u.bumps )
         ok = ok && ( b.center - o.center ).norm() >= b.radius + o.radius;
      if( ok )
         u.bumps.push_back( b );
   }
   return u;
}

/// 1 to 2 disjoint half-line bumps; with touch_origin the first straddles t = 0.
inline HalfLineFunction
random_half_line( std::mt19937_64& gen, bool touch_origin )
{
   std::uniform_real_distribution<double> unit( 0.0, 1.0 );
   HalfLineFunction u;
   double left = 0.0;
   const int count = 1 + int( unit( gen ) * 2 ) % 2;
   for( int k = 0; k < count; ++k )
   {
      HalfLineBump b;
      b.radius = 0.1 + 2.0 * unit( gen );
      if( k == 0 && touch_origin )
         b.center = b.radius * ( 1.6 * unit( gen ) - 0.8 );
      else
         b.center = left + b.radius + 0.01 + 3.0 * unit( gen );
      b.amplitude = 2.0 * unit( gen ) - 1.0;
      left = b.center + b.radius;
      u.bumps.push_back( b );
   }
   return u;
}

inline RadialShell
random_shell( double a, std::mt19937_64& gen, double span = 6.0 )
{
   std::uniform_real_distribution<double> unit( 0.0, 1.0 );
   RadialShell s;
   s.r0 = a + 0.01 + span * unit( gen );
   s.r1 = s.r0 + 0.1 + span * unit( gen );
   s.amplitude = 2.0 * unit( gen ) - 1.0;
   return s;
}

struct PoincareSuiteOptions
{
   std::uint64_t seed = 20240601;
   int samples = 100;
   unsigned threads = 1;
   BallRuleOptions rule;
};

namespace detail
{

/// Independent stream per (case, sample): results do not depend on order.
inline std::mt19937_64
sample_stream( std::uint64_t seed, std::uint64_t case_id, std::uint64_t sample )
{
   std::seed_seq seq{ std::uint32_t( seed ), std::uint32_t( seed >> 32 ), std::uint32_t( case_id ),
                      std::uint32_t( sample ) };
   return std::mt19937_64( seq );
}

} // namespace detail

/// Lemma (i) N = 3 at beta in {1 - N/2 + 0.1, 0, 1}; lemma (ii) N = 2 at
/// {0, 1/2, 1}; lemma (iii) at {0, 1} with half the samples touching t = 0;
/// each with its identity; corollary chains i (N = 3 and N = 4 radial), ii, iii.
/// Records come out in case order, then sample order.
inline std::vector<VerificationRecord>
poincare_suite( const PoincareSuiteOptions& opt = {} )
{
   require( opt.samples >= 1, ErrorKind::config, "poincare samples must be >= 1" );
   const ExteriorDomain d3 = ExteriorDomain::make( 3, 1.0, 2.0 );
   const ExteriorDomain d2 = ExteriorDomain::make( 2, 1.0, 2.0 );
   const auto& o = opt.rule;

   using Job = std::function<std::vector<VerificationRecord>( std::mt19937_64& )>;
   std::vector<Job> cases;
   for( double beta : { 1.0 - 1.5 + 0.1, 0.0, 1.0 } )
      cases.push_back( [=, &o]( std::mt19937_64& gen ) {
         const BumpSum u = random_bump_sum( 3, d3.inner_radius, gen );
         return std::vector{ verify_lemma_i( d3, u, beta, o ), identity_lemma_i( d3, u, beta, {}, o ) };
      } );
   for( double beta : { 0.0, 0.5, 1.0 } )
      cases.push_back( [=, &o]( std::mt19937_64& gen ) {
         const BumpSum u = random_bump_sum( 2, d2.inner_radius, gen );
         return std::vector{ verify_lemma_ii( d2, u, beta, o ), identity_lemma_ii( d2, u, beta, {}, o ) };
      } );
   for( double beta : { 0.0, 1.0 } )
      cases.push_back( [=, &o]( std::mt19937_64& gen ) {
         const HalfLineFunction u = random_half_line( gen, gen() % 2 == 0 );
         return std::vector{ verify_lemma_iii( u, beta, o ), identity_lemma_iii( u, beta, {}, o ) };
      } );
   cases.push_back( [=, &o]( std::mt19937_64& gen ) {
      return verify_corollary_chain( d3, random_bump_sum( 3, d3.inner_radius, gen ), ChainCase::i, o );
   } );
   cases.push_back( [=, &o]( std::mt19937_64& gen ) {
      return verify_corollary_chain( 4, d3.inner_radius, random_shell( d3.inner_radius, gen ), o );
   } );
   cases.push_back( [=, &o]( std::mt19937_64& gen ) {
      return verify_corollary_chain( d2, random_bump_sum( 2, d2.inner_radius, gen ), ChainCase::ii, o );
   } );
   cases.push_back( [=, &o]( std::mt19937_64& gen ) {
      return verify_corollary_chain( random_half_line( gen, gen() % 2 == 0 ), o );
   } );

   const std::size_t S = std::size_t( opt.samples ), jobs = cases.size() * S;
   std::vector<std::vector<VerificationRecord>> out( jobs );
   std::vector<std::exception_ptr> errors( jobs );
   auto run = [&]( std::size_t j ) {
      try
      {
         auto gen = detail::sample_stream( opt.seed, j / S, j % S );
         out[j] = cases[j / S]( gen );
      }
      catch( ... )
      {
         errors[j] = std::current_exception();
      }
   };
   const unsigned threads = std::max( 1u, opt.threads );
   if( threads == 1 )
      for( std::size_t j = 0; j < jobs; ++j )
         run( j );
   else
   {
      std::vector<std::jthread> pool;
      for( unsigned t = 0; t < threads; ++t )
         pool.emplace_back( [&, t] {
            for( std::size_t j = t; j < jobs; j += threads )
               run( j );
         } );
   }
   for( const auto& e : errors )
      if( e )
         std::rethrow_exception( e );

   std::vector<VerificationRecord> records;
   for( auto& v : out )
      records.insert( records.end(), v.begin(), v.end() );
   return records;
}

} // namespace exmaj
