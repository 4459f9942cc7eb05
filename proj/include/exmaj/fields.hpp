// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "exmaj/geometry.hpp"
#include "exmaj/harmonics.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <utility>

namespace exmaj
{

using ScalarFn = std::function<double( const Point& )>;
using VectorFn = std::function<Vec( const Point& )>;
using MatrixFn = std::function<Mat( const Point& )>;

/// Analytic scalar field. The gradient and Hessian closures are optional;
/// operations that need them reject fields without them.
struct ScalarField
{
   ScalarFn value;
   VectorFn gradient;
   MatrixFn hessian;
   std::string label;

   bool has_gradient() const { return static_cast<bool>( gradient ); }
   bool has_hessian() const { return static_cast<bool>( hessian ); }

   double operator()( const Point& x ) const { return value( x ); }
};

/// Analytic vector field with optional divergence closure.
struct VectorField
{
   VectorFn value;
   ScalarFn divergence;
   std::string label;

   bool has_divergence() const { return static_cast<bool>( divergence ); }

   Vec operator()( const Point& x ) const { return value( x ); }
};

/// Symmetric, uniformly elliptic matrix field A with c_A |xi|^2 <= A xi.xi <= c_A_plus |xi|^2.
/// column_divergence(x)_j = sum_i d_i A_ij; absent means A is treated as
/// non-differentiable and A grad v has no divergence closure.
struct Coefficient
{
   int dimension = 3;
   MatrixFn matrix;
   VectorFn column_divergence;
   double c_A = 1.0;
   double c_A_plus = 1.0;
   std::string label;

   /// Spatially constant A; bounds are the extreme eigenvalues of the N x N block.
   static Coefficient
   constant( int dimension, const Mat& m, std::string label = "constant" )
   {
      Mat block = identity_block( 3 );
      block.topLeftCorner( dimension, dimension ) = m.topLeftCorner( dimension, dimension );
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es( Eigen::MatrixXd( m.topLeftCorner( dimension, dimension ) ) );
      require( ( m - m.transpose() ).cwiseAbs().maxCoeff() == 0.0, ErrorKind::invalid_argument,
               "Coefficient: matrix must be symmetric" );
      Coefficient A;
      A.dimension = dimension;
      A.matrix = [block]( const Point& ) { return block; };
      A.column_divergence = []( const Point& ) { return Vec::Zero().eval(); };
      A.c_A = es.eigenvalues().minCoeff();
      A.c_A_plus = es.eigenvalues().maxCoeff();
      A.label = std::move( label );
      require( A.c_A > 0.0, ErrorKind::invalid_argument, "Coefficient: matrix is not positive definite" );
      return A;
   }

   static Coefficient
   identity( int dimension )
   {
      return constant( dimension, Mat::Identity(), "identity" );
   }

   Eigen::MatrixXd
   block( const Point& x ) const
   {
      return matrix( x ).topLeftCorner( dimension, dimension );
   }
};

/// Largest violation found by validate_coefficient.
struct CoefficientCheck
{
   double max_asymmetry = 0.0;
   double min_eigenvalue = 0.0;
   double max_eigenvalue = 0.0;
   bool ok = false;
};

/// Samples A at the given points: symmetry to 1e-14 and spectrum inside
/// [c_A - 1e-12, c_A_plus + 1e-12].
inline CoefficientCheck
validate_coefficient( const Coefficient& A, const std::vector<Point>& points )
{
   CoefficientCheck c;
   c.min_eigenvalue = std::numeric_limits<double>::infinity();
   c.max_eigenvalue = -std::numeric_limits<double>::infinity();
   for( const auto& x : points )
   {
      const Eigen::MatrixXd m = A.block( x );
      c.max_asymmetry = std::max( c.max_asymmetry, ( m - m.transpose() ).cwiseAbs().maxCoeff() );
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es( m );
      c.min_eigenvalue = std::min( c.min_eigenvalue, es.eigenvalues().minCoeff() );
      c.max_eigenvalue = std::max( c.max_eigenvalue, es.eigenvalues().maxCoeff() );
   }
   c.ok = A.c_A > 0.0 && A.c_A <= A.c_A_plus && c.max_asymmetry <= 1e-14 &&
          c.min_eigenvalue >= A.c_A - 1e-12 && c.max_eigenvalue <= A.c_A_plus + 1e-12;
   return c;
}

/// Uniform random points in the shell r0 < |x| < r1 (direction uniform).
inline std::vector<Point>
sample_shell( int dimension, double r0, double r1, std::size_t count, std::uint64_t seed )
{
   std::mt19937_64 gen( seed );
   std::normal_distribution<double> g;
   std::uniform_real_distribution<double> u( r0, r1 );
   std::vector<Point> pts;
   pts.reserve( count );
   while( pts.size() < count )
   {
      Point d = Point::Zero();
      for( int i = 0; i < dimension; ++i )
         d[i] = g( gen );
      const double n = d.norm();
      if( n < 1e-12 )
         continue;
      pts.push_back( u( gen ) * d / n );
   }
   return pts;
}

/// Largest deviation of the analytic gradient from central differences,
/// relative to the largest analytic gradient over the sample.
inline double
gradient_fd_error( const ScalarField& f, int dimension, const std::vector<Point>& points, double step = 1e-5 )
{
   require( f.has_gradient(), ErrorKind::precondition, "gradient_fd_error: field '" + f.label + "' has no gradient" );
   double worst = 0.0, scale = 0.0;
   for( const auto& x : points )
   {
      const Vec g = f.gradient( x );
      Vec fd = Vec::Zero();
      for( int i = 0; i < dimension; ++i )
      {
         Point p = x, m = x;
         p[i] += step;
         m[i] -= step;
         fd[i] = ( f.value( p ) - f.value( m ) ) / ( 2.0 * step );
      }
      worst = std::max( worst, ( g - fd ).norm() );
      scale = std::max( scale, g.norm() );
   }
   return worst / std::max( scale, 1e-300 );
}

inline double
divergence_fd_error( const VectorField& y, int dimension, const std::vector<Point>& points, double step = 1e-5 )
{
   require( y.has_divergence(), ErrorKind::precondition,
            "divergence_fd_error: field '" + y.label + "' has no divergence" );
   double worst = 0.0, scale = 0.0;
   for( const auto& x : points )
   {
      double fd = 0.0;
      for( int i = 0; i < dimension; ++i )
      {
         Point p = x, m = x;
         p[i] += step;
         m[i] -= step;
         fd += ( y.value( p )[i] - y.value( m )[i] ) / ( 2.0 * step );
      }
      const double d = y.divergence( x );
      worst = std::max( worst, std::abs( d - fd ) );
      scale = std::max( scale, std::abs( d ) );
   }
   return worst / std::max( scale, 1e-300 );
}

// ---------------------------------------------------------------------------
// Pointwise composition. Results carry derivative closures whenever every
// input provides them.

inline ScalarField
constant_field( double c, std::string label = {} )
{
   ScalarField f;
   f.value = [c]( const Point& ) { return c; };
   f.gradient = []( const Point& ) { return Vec::Zero().eval(); };
   f.hessian = []( const Point& ) { return Mat::Zero().eval(); };
   f.label = label.empty() ? std::to_string( c ) : std::move( label );
   return f;
}

inline VectorField
zero_vector_field()
{
   VectorField y;
   y.value = []( const Point& ) { return Vec::Zero().eval(); };
   y.divergence = []( const Point& ) { return 0.0; };
   y.label = "0";
   return y;
}

inline ScalarField
operator+( const ScalarField& a, const ScalarField& b )
{
   ScalarField s;
   s.value = [fa = a.value, fb = b.value]( const Point& x ) { return fa( x ) + fb( x ); };
   if( a.has_gradient() && b.has_gradient() )
      s.gradient = [ga = a.gradient, gb = b.gradient]( const Point& x ) { return ( ga( x ) + gb( x ) ).eval(); };
   if( a.has_hessian() && b.has_hessian() )
      s.hessian = [ha = a.hessian, hb = b.hessian]( const Point& x ) { return ( ha( x ) + hb( x ) ).eval(); };
   s.label = "(" + a.label + " + " + b.label + ")";
   return s;
}

inline ScalarField
operator*( double c, const ScalarField& a )
{
   ScalarField s;
   s.value = [c, fa = a.value]( const Point& x ) { return c * fa( x ); };
   if( a.has_gradient() )
      s.gradient = [c, ga = a.gradient]( const Point& x ) { return ( c * ga( x ) ).eval(); };
   if( a.has_hessian() )
      s.hessian = [c, ha = a.hessian]( const Point& x ) { return ( c * ha( x ) ).eval(); };
   s.label = std::to_string( c ) + "*" + a.label;
   return s;
}

inline ScalarField
operator-( const ScalarField& a, const ScalarField& b )
{
   ScalarField s;
   s.value = [fa = a.value, fb = b.value]( const Point& x ) { return fa( x ) - fb( x ); };
   if( a.has_gradient() && b.has_gradient() )
      s.gradient = [ga = a.gradient, gb = b.gradient]( const Point& x ) { return ( ga( x ) - gb( x ) ).eval(); };
   if( a.has_hessian() && b.has_hessian() )
      s.hessian = [ha = a.hessian, hb = b.hessian]( const Point& x ) { return ( ha( x ) - hb( x ) ).eval(); };
   s.label = "(" + a.label + " - " + b.label + ")";
   return s;
}

inline VectorField
operator+( const VectorField& a, const VectorField& b )
{
   VectorField s;
   s.value = [fa = a.value, fb = b.value]( const Point& x ) { return ( fa( x ) + fb( x ) ).eval(); };
   if( a.has_divergence() && b.has_divergence() )
      s.divergence = [da = a.divergence, db = b.divergence]( const Point& x ) { return da( x ) + db( x ); };
   s.label = "(" + a.label + " + " + b.label + ")";
   return s;
}

inline VectorField
operator*( double c, const VectorField& a )
{
   VectorField s;
   s.value = [c, fa = a.value]( const Point& x ) { return ( c * fa( x ) ).eval(); };
   if( a.has_divergence() )
      s.divergence = [c, da = a.divergence]( const Point& x ) { return c * da( x ); };
   s.label = std::to_string( c ) + "*" + a.label;
   return s;
}

inline VectorField
operator-( const VectorField& a, const VectorField& b )
{
   VectorField s;
   s.value = [fa = a.value, fb = b.value]( const Point& x ) { return ( fa( x ) - fb( x ) ).eval(); };
   if( a.has_divergence() && b.has_divergence() )
      s.divergence = [da = a.divergence, db = b.divergence]( const Point& x ) { return da( x ) - db( x ); };
   s.label = "(" + a.label + " - " + b.label + ")";
   return s;
}

/// grad v; divergence (Laplacian) available when v has a Hessian.
inline VectorField
gradient_of( const ScalarField& v )
{
   require( v.has_gradient(), ErrorKind::precondition, "gradient_of: field '" + v.label + "' has no gradient closure" );
   VectorField g;
   g.value = v.gradient;
   if( v.has_hessian() )
      g.divergence = [h = v.hessian]( const Point& x ) { return h( x ).trace(); };
   g.label = "grad " + v.label;
   return g;
}

/// A grad v; div(A grad v) = A : Hess v + (div A) . grad v when both closures exist.
inline VectorField
flux_of( const Coefficient& A, const ScalarField& v )
{
   require( v.has_gradient(), ErrorKind::precondition, "flux_of: field '" + v.label + "' has no gradient closure" );
   VectorField y;
   y.value = [m = A.matrix, g = v.gradient]( const Point& x ) { return ( m( x ) * g( x ) ).eval(); };
   if( v.has_hessian() && A.column_divergence )
      y.divergence = [m = A.matrix, dA = A.column_divergence, g = v.gradient, h = v.hessian]( const Point& x ) {
         return ( m( x ).cwiseProduct( h( x ) ) ).sum() + dA( x ).dot( g( x ) );
      };
   y.label = "A grad " + v.label;
   return y;
}

/// f + div y, value only.
inline ScalarField
residual_of( const ScalarField& f, const VectorField& y )
{
   require( y.has_divergence(), ErrorKind::precondition,
            "residual_of: flux '" + y.label + "' has no divergence closure" );
   ScalarField s;
   s.value = [fv = f.value, d = y.divergence]( const Point& x ) { return fv( x ) + d( x ); };
   s.label = "(" + f.label + " + div " + y.label + ")";
   return s;
}

/// y_i on |x| < R, y_e on |x| >= R.
inline VectorField
piecewise( const VectorField& inner, const VectorField& outer, double R )
{
   VectorField y;
   y.value = [fi = inner.value, fo = outer.value, R]( const Point& x ) {
      return x.norm() < R ? fi( x ) : fo( x );
   };
   if( inner.has_divergence() && outer.has_divergence() )
      y.divergence = [di = inner.divergence, dout = outer.divergence, R]( const Point& x ) {
         return x.norm() < R ? di( x ) : dout( x );
      };
   y.label = "[" + inner.label + " | " + outer.label + "]";
   return y;
}

// ---------------------------------------------------------------------------
// Building blocks for manufactured fields.

/// Radial profile phi(r) with first and second derivative.
struct RadialProfile
{
   std::function<double( double )> value;
   std::function<double( double )> d1;
   std::function<double( double )> d2;
   std::string label;
};

/// phi(|x|) * Y(x/|x|) for an angular mode (Y = 1 if basis is null), with
/// exact gradient and Hessian.
inline ScalarField
separated_field( int dimension, const RadialProfile& phi, const AngularBasis* basis, std::size_t mode,
                 std::string label = {} )
{
   const bool radial = basis == nullptr;
   const AngularMode md = radial ? AngularMode{} : basis->mode( mode );
   const AngularBasis b = radial ? AngularBasis( dimension, 0 ) : *basis;
   const Mat IN = identity_block( dimension );
   auto angular = [=]( const Point& x, int order ) {
      if( !radial )
         return b.evaluate( md, x, order );
      AngularJet one;
      one.value = 1.0;
      return one;
   };
   ScalarField f;
   f.value = [=]( const Point& x ) {
      const double r = x.norm();
      const double p = phi.value( r );
      if( p == 0.0 )
         return 0.0;
      return p * angular( x, 0 ).value;
   };
   f.gradient = [=]( const Point& x ) -> Vec {
      const double r = x.norm();
      const double p = phi.value( r ), dp = phi.d1( r );
      if( p == 0.0 && dp == 0.0 )
         return Vec::Zero();
      const Vec u = x / r;
      const AngularJet Y = angular( x, 1 );
      return dp * Y.value * u + p * Y.gradient;
   };
   f.hessian = [=]( const Point& x ) -> Mat {
      const double r = x.norm();
      const double p = phi.value( r ), dp = phi.d1( r ), d2p = phi.d2( r );
      if( p == 0.0 && dp == 0.0 && d2p == 0.0 )
         return Mat::Zero();
      const Vec u = x / r;
      const AngularJet Y = angular( x, 2 );
      // Hess(phi(r)) = phi'' u u^T + phi'/r (I - u u^T)
      const Mat Hr = d2p * u * u.transpose() + dp / r * ( IN - u * u.transpose() );
      const Vec gr = dp * u;
      return Hr * Y.value + gr * Y.gradient.transpose() + Y.gradient * gr.transpose() + p * Y.hessian;
   };
   f.label = label.empty() ? phi.label : std::move( label );
   return f;
}

/// Compactly supported C-infinity bump exp(-1/(1 - t^2)) on (r0, r1), t the
/// affine map of r onto (-1, 1).
inline RadialProfile
radial_bump( double r0, double r1, double amplitude = 1.0 )
{
   require( r0 < r1, ErrorKind::invalid_argument, "radial_bump: need r0 < r1" );
   const double c = 0.5 * ( r0 + r1 ), h = 0.5 * ( r1 - r0 );
   RadialProfile p;
   p.value = [=]( double r ) {
      const double t = ( r - c ) / h;
      if( std::abs( t ) >= 1.0 )
         return 0.0;
      return amplitude * std::exp( -1.0 / ( 1.0 - t * t ) );
   };
   // with q = 1 - t^2: d/dt e^{-1/q} = -2t/q^2 e^{-1/q}
   p.d1 = [=]( double r ) {
      const double t = ( r - c ) / h;
      if( std::abs( t ) >= 1.0 )
         return 0.0;
      const double q = 1.0 - t * t;
      return amplitude * std::exp( -1.0 / q ) * ( -2.0 * t / ( q * q ) ) / h;
   };
   p.d2 = [=]( double r ) {
      const double t = ( r - c ) / h;
      if( std::abs( t ) >= 1.0 )
         return 0.0;
      const double q = 1.0 - t * t;
      const double g = -2.0 * t / ( q * q );
      // g' = (-2 q^2 - 2t * 2q * 2t) / q^4 = (-2q - 8t^2)/q^3
      const double dg = ( -2.0 * q - 8.0 * t * t ) / ( q * q * q );
      return amplitude * std::exp( -1.0 / q ) * ( g * g + dg ) / ( h * h );
   };
   p.label = "bump(" + std::to_string( r0 ) + "," + std::to_string( r1 ) + ")";
   return p;
}

/// Smooth cut-off equal to 1 at r = a, vanishing with all derivatives at
/// r = cutoff: exp(1 - 1/(1 - t^2)), t = (r - a)/(cutoff - a).
inline RadialProfile
boundary_cutoff( double a, double cutoff )
{
   require( a < cutoff, ErrorKind::invalid_argument, "boundary_cutoff: need a < cutoff" );
   const double h = cutoff - a;
   RadialProfile p;
   p.value = [=]( double r ) {
      const double t = ( r - a ) / h;
      if( t >= 1.0 )
         return 0.0;
      return std::exp( 1.0 - 1.0 / ( 1.0 - t * t ) );
   };
   p.d1 = [=]( double r ) {
      const double t = ( r - a ) / h;
      if( t >= 1.0 )
         return 0.0;
      const double q = 1.0 - t * t;
      return std::exp( 1.0 - 1.0 / q ) * ( -2.0 * t / ( q * q ) ) / h;
   };
   p.d2 = [=]( double r ) {
      const double t = ( r - a ) / h;
      if( t >= 1.0 )
         return 0.0;
      const double q = 1.0 - t * t;
      const double g = -2.0 * t / ( q * q );
      const double dg = ( -2.0 * q - 8.0 * t * t ) / ( q * q * q );
      return std::exp( 1.0 - 1.0 / q ) * ( g * g + dg ) / ( h * h );
   };
   p.label = "cutoff(" + std::to_string( a ) + "," + std::to_string( cutoff ) + ")";
   return p;
}

/// r^p (p real).
inline RadialProfile
power_profile( double p )
{
   RadialProfile q;
   q.value = [p]( double r ) { return std::pow( r, p ); };
   q.d1 = [p]( double r ) { return p * std::pow( r, p - 1.0 ); };
   q.d2 = [p]( double r ) { return p * ( p - 1.0 ) * std::pow( r, p - 2.0 ); };
   q.label = "r^" + std::to_string( p );
   return q;
}

} // namespace exmaj
