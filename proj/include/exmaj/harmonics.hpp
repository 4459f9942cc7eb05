// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "exmaj/geometry.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace exmaj
{

/// One real angular basis function: degree l, order m, cosine or sine branch.
struct AngularMode
{
   int degree = 0;
   int order = 0;
   bool sine = false;
};

/// Value, gradient and Hessian of x -> F(x/|x|) in Cartesian coordinates.
struct AngularJet
{
   double value = 0.0;
   Vec gradient = Vec::Zero();
   Mat hessian = Mat::Zero();
};

/// Identity on the first N coordinates.
inline Mat
identity_block( int dimension )
{
   Mat I = Mat::Zero();
   for( int i = 0; i < dimension; ++i )
      I( i, i ) = 1.0;
   return I;
}

/// Real orthonormal basis of L^2(S^{N-1}) up to degree L.
///
/// N = 3: real spherical harmonics, ordered l = 0..L, then m = 0 (cos),
/// m = 1..l (cos, sin). N = 2: 1, cos k phi, sin k phi for k = 1..L.
/// N = 1: the single constant mode.
///
/// Each function is written as Nlm * B_lm(u_z) * Re/Im (u_x + i u_y)^m with
/// u = x/|x| and B_lm a polynomial, so derivatives are smooth at the poles.
class AngularBasis
{
 public:
   AngularBasis( int dimension, int band_limit ) : dimension_( dimension ), band_limit_( band_limit )
   {
      require( dimension >= 1 && dimension <= 3, ErrorKind::invalid_argument, "AngularBasis: bad dimension" );
      require( band_limit >= 0, ErrorKind::invalid_argument, "AngularBasis: band limit must be >= 0" );
      if( dimension == 1 )
      {
         modes_.push_back( { 0, 0, false } );
         return;
      }
      if( dimension == 2 )
      {
         modes_.push_back( { 0, 0, false } );
         for( int k = 1; k <= band_limit; ++k )
         {
            modes_.push_back( { k, k, false } );
            modes_.push_back( { k, k, true } );
         }
         return;
      }
      norms_.assign( std::size_t( ( band_limit + 1 ) * ( band_limit + 1 ) ), 0.0 );
      for( int l = 0; l <= band_limit; ++l )
         for( int m = 0; m <= l; ++m )
            norms_[std::size_t( l * ( l + 1 ) + m )] = legendre_normalization( l, m );
      for( int l = 0; l <= band_limit; ++l )
      {
         modes_.push_back( { l, 0, false } );
         for( int m = 1; m <= l; ++m )
         {
            modes_.push_back( { l, m, false } );
            modes_.push_back( { l, m, true } );
         }
      }
   }

   int dimension() const { return dimension_; }
   int band_limit() const { return band_limit_; }
   std::size_t size() const { return modes_.size(); }
   const AngularMode& mode( std::size_t k ) const { return modes_[k]; }
   const std::vector<AngularMode>& modes() const { return modes_; }

   /// Laplace-Beltrami eigenvalue l(l + N - 2).
   double
   eigenvalue( std::size_t k ) const
   {
      return laplace_beltrami( dimension_, modes_[k].degree );
   }

   static double
   laplace_beltrami( int dimension, int degree )
   {
      return double( degree ) * double( degree + dimension - 2 );
   }

   /// F(x/|x|) only.
   double
   value( std::size_t k, const Point& x ) const
   {
      return evaluate( modes_[k], x, 0 ).value;
   }

   /// order 0: value; 1: + gradient; 2: + Hessian.
   AngularJet
   jet( std::size_t k, const Point& x, int order = 2 ) const
   {
      return evaluate( modes_[k], x, order );
   }

   AngularJet
   evaluate( const AngularMode& md, const Point& x, int order ) const
   {
      AngularJet out;
      if( dimension_ == 1 )
      {
         out.value = 1.0;
         return out;
      }
      const double r = x.norm();
      require( r > 0.0, ErrorKind::invalid_argument, "AngularBasis: evaluation at the origin" );
      const Point u = x / r;

      const int m = md.order;
      const double norm = normalization( md );
      double b = 1.0, db = 0.0, d2b = 0.0;
      if( dimension_ == 3 )
         legendre_factor( md.degree, m, u[2], b, db, d2b );

      // C = Re/Im w^m, w = u_x + i u_y, with its u_x/u_y derivatives
      const std::complex<double> w( u[0], u[1] );
      const std::complex<double> I( 0.0, 1.0 );
      auto part = [&]( std::complex<double> z ) { return md.sine ? z.imag() : z.real(); };
      const std::complex<double> wm = ipow( w, m );
      const double c = part( wm );
      out.value = norm * b * c;
      if( order < 1 )
         return out;

      const std::complex<double> wm1 = m >= 1 ? double( m ) * ipow( w, m - 1 ) : 0.0;
      const double cx = part( wm1 ), cy = part( I * wm1 );
      Vec gF = Vec::Zero();
      gF[0] = norm * b * cx;
      gF[1] = norm * b * cy;
      if( dimension_ == 3 )
         gF[2] = norm * db * c;

      // Jacobian of x -> x/|x| restricted to the first N coordinates
      const Mat IN = identity_block( dimension_ );
      const Mat P = ( IN - u * u.transpose() ) / r;
      out.gradient = P * gF;
      if( order < 2 )
         return out;

      const std::complex<double> wm2 = m >= 2 ? double( m ) * double( m - 1 ) * ipow( w, m - 2 ) : 0.0;
      Mat HF = Mat::Zero();
      HF( 0, 0 ) = norm * b * part( wm2 );
      HF( 0, 1 ) = HF( 1, 0 ) = norm * b * part( I * wm2 );
      HF( 1, 1 ) = -norm * b * part( wm2 );
      if( dimension_ == 3 )
      {
         HF( 0, 2 ) = HF( 2, 0 ) = norm * db * cx;
         HF( 1, 2 ) = HF( 2, 1 ) = norm * db * cy;
         HF( 2, 2 ) = norm * d2b * c;
      }
      // d^2 (x_k / r) / dx_i dx_j = -(d_ik x_j + d_jk x_i + d_ij x_k)/r^3 + 3 x_i x_j x_k / r^5
      Mat H = P * HF * P;
      const double r3 = r * r * r;
      for( int k = 0; k < dimension_; ++k )
      {
         if( gF[k] == 0.0 )
            continue;
         Mat Dk = 3.0 * x[k] * ( x * x.transpose() ) / ( r3 * r * r );
         for( int i = 0; i < dimension_; ++i )
         {
            Dk( i, k ) -= x[i] / r3;
            Dk( k, i ) -= x[i] / r3;
            Dk( i, i ) -= x[k] / r3;
         }
         H += gF[k] * Dk;
      }
      out.hessian = H;
      return out;
   }

 private:
   double
   normalization( const AngularMode& md ) const
   {
      const int m = md.order;
      if( dimension_ == 2 )
         return m == 0 ? 1.0 / std::sqrt( 2.0 * pi ) : 1.0 / std::sqrt( pi );
      const std::size_t key = std::size_t( md.degree ) * std::size_t( md.degree + 1 ) + std::size_t( m );
      if( key < norms_.size() )
         return norms_[key];
      return legendre_normalization( md.degree, m );
   }

   static double
   legendre_normalization( int l, int m )
   {
      double n = std::sqrt( ( 2.0 * l + 1.0 ) / ( 4.0 * pi ) * std::exp( std::lgamma( l - m + 1.0 ) - std::lgamma( l + m + 1.0 ) ) );
      return m > 0 ? n * std::sqrt( 2.0 ) : n;
   }

   static std::complex<double>
   ipow( std::complex<double> z, int n )
   {
      std::complex<double> p( 1.0, 0.0 );
      for( int i = 0; i < n; ++i )
         p *= z;
      return p;
   }

   /// B = d^m P_l / dx^m at x, with first and second derivatives.
   static void
   legendre_factor( int l, int m, double x, double& b, double& db, double& d2b )
   {
      double df = 1.0;
      for( int k = 1; k <= 2 * m - 1; k += 2 )
         df *= k;
      // B_m^m = (2m-1)!!, B_{m+1}^m = (2m+1) x B_m^m, then the three-term recurrence
      double b0 = df, d0 = 0.0, s0 = 0.0;
      if( l == m )
      {
         b = b0, db = d0, d2b = s0;
         return;
      }
      double b1 = ( 2.0 * m + 1.0 ) * x * df, d1 = ( 2.0 * m + 1.0 ) * df, s1 = 0.0;
      for( int n = m + 2; n <= l; ++n )
      {
         const double a = 2.0 * n - 1.0, c = n + m - 1.0, q = n - m;
         const double b2 = ( a * x * b1 - c * b0 ) / q;
         const double d2 = ( a * ( b1 + x * d1 ) - c * d0 ) / q;
         const double s2 = ( a * ( 2.0 * d1 + x * s1 ) - c * s0 ) / q;
         b0 = b1, d0 = d1, s0 = s1;
         b1 = b2, d1 = d2, s1 = s2;
      }
      b = b1, db = d1, d2b = s1;
   }

   int dimension_;
   int band_limit_;
   std::vector<AngularMode> modes_;
   std::vector<double> norms_; // N = 3, indexed l(l+1) + m
};

} // namespace exmaj
