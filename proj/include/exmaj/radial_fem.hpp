// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "exmaj/error.hpp"
#include "exmaj/geometry.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <vector>

namespace exmaj
{

/// Piecewise polynomial on a radial FEM mesh. Evaluates to 0 outside [r0, r1].
class RadialProfileFE
{
 public:
   RadialProfileFE() = default;
   RadialProfileFE( double r0, double r1, int elements, int degree, Eigen::VectorXd dofs, double energy )
       : r0_( r0 ), r1_( r1 ), elements_( elements ), degree_( degree ), dofs_( std::move( dofs ) ),
         energy_( energy )
   {
   }

   double value( double r ) const { return eval( r, false ); }
   double derivative( double r ) const { return eval( r, true ); }
   /// Value of the minimized quadratic form at this profile.
   double energy() const { return energy_; }
   double left() const { return r0_; }
   double right() const { return r1_; }
   int elements() const { return elements_; }
   const Eigen::VectorXd& dofs() const { return dofs_; }

 private:
   double
   eval( double r, bool derivative ) const
   {
      if( elements_ == 0 || r < r0_ || r > r1_ )
         return 0.0;
      const double h = ( r1_ - r0_ ) / elements_;
      int e = std::min( elements_ - 1, static_cast<int>( ( r - r0_ ) / h ) );
      const double lo = r0_ + e * h;
      const double s = ( r - lo ) / h;
      double out = 0.0;
      for( int i = 0; i <= degree_; ++i )
         out += dofs_[e * degree_ + i] * ( derivative ? lagrange_d( degree_, i, s ) / h : lagrange( degree_, i, s ) );
      return out;
   }

 public:
   /// Lagrange basis on equispaced nodes of [0, 1].
   static double
   lagrange( int p, int i, double s )
   {
      double v = 1.0;
      for( int j = 0; j <= p; ++j )
         if( j != i )
            v *= ( s - double( j ) / p ) / ( double( i - j ) / p );
      return v;
   }

   static double
   lagrange_d( int p, int i, double s )
   {
      double total = 0.0;
      for( int k = 0; k <= p; ++k )
      {
         if( k == i )
            continue;
         double v = 1.0 / ( double( i - k ) / p );
         for( int j = 0; j <= p; ++j )
            if( j != i && j != k )
               v *= ( s - double( j ) / p ) / ( double( i - j ) / p );
         total += v;
      }
      return total;
   }

 private:
   double r0_ = 0.0, r1_ = 0.0;
   int elements_ = 0;
   int degree_ = 3;
   Eigen::VectorXd dofs_;
   double energy_ = 0.0;
};

/// Continuous Lagrange FEM for the radial forms
///   a_k(phi, psi) = int (phi' psi' + k phi psi / r^2) r^{N-1} dr,
///   m(phi, psi)   = int phi psi r^{N-1} dr
/// on [r0, r1] with equal elements. k is the Laplace-Beltrami eigenvalue l(l+N-2).
class RadialFem
{
 public:
   RadialFem( int dimension, double r0, double r1, int elements, int degree = 3 )
       : dimension_( dimension ), r0_( r0 ), r1_( r1 ), elements_( elements ), degree_( degree )
   {
      require( elements >= 1 && degree >= 1, ErrorKind::invalid_argument, "RadialFem: bad mesh" );
      require( 0.0 < r0 && r0 < r1, ErrorKind::invalid_argument, "RadialFem: need 0 < r0 < r1" );
      const int n = size();
      std::vector<Eigen::Triplet<double>> tg, ta, tm;
      const auto [gx, gw] = gauss_legendre( degree + 4 );
      const double h = ( r1 - r0 ) / elements;
      for( int e = 0; e < elements; ++e )
      {
         const double lo = r0 + e * h;
         for( std::size_t q = 0; q < gx.size(); ++q )
         {
            const double s = 0.5 * ( gx[q] + 1.0 );
            const double r = lo + s * h;
            const double w = 0.5 * gw[q] * h;
            const double wN = w * std::pow( r, dimension - 1 );
            for( int i = 0; i <= degree; ++i )
            {
               const double pi_ = RadialProfileFE::lagrange( degree, i, s );
               const double di = RadialProfileFE::lagrange_d( degree, i, s ) / h;
               for( int j = 0; j <= degree; ++j )
               {
                  const double pj = RadialProfileFE::lagrange( degree, j, s );
                  const double dj = RadialProfileFE::lagrange_d( degree, j, s ) / h;
                  const int I = e * degree + i, J = e * degree + j;
                  tg.emplace_back( I, J, wN * di * dj );
                  ta.emplace_back( I, J, wN * pi_ * pj / ( r * r ) );
                  tm.emplace_back( I, J, wN * pi_ * pj );
               }
            }
         }
      }
      grad_.resize( n, n );
      ang_.resize( n, n );
      mass_.resize( n, n );
      grad_.setFromTriplets( tg.begin(), tg.end() );
      ang_.setFromTriplets( ta.begin(), ta.end() );
      mass_.setFromTriplets( tm.begin(), tm.end() );
   }

   int size() const { return elements_ * degree_ + 1; }
   int elements() const { return elements_; }

   Eigen::SparseMatrix<double>
   stiffness( double k ) const
   {
      return grad_ + k * ang_;
   }

   /// Smallest eigenvalue of a_k(phi, phi) / m(phi, phi) with phi(r0) = 0 and
   /// phi free at r1 (inverse iteration on the free block).
   double
   smallest_eigenvalue( double k ) const
   {
      const int n = size();
      const Eigen::SparseMatrix<double> K = stiffness( k ).bottomRightCorner( n - 1, n - 1 );
      const Eigen::SparseMatrix<double> M = mass_.bottomRightCorner( n - 1, n - 1 );
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver( K );
      require( solver.info() == Eigen::Success, ErrorKind::numerical, "RadialFem: factorization failed" );
      Eigen::VectorXd x = Eigen::VectorXd::Ones( n - 1 );
      double lambda = 0.0;
      for( int it = 0; it < 5000; ++it )
      {
         Eigen::VectorXd y = solver.solve( M * x );
         require( solver.info() == Eigen::Success, ErrorKind::numerical, "RadialFem: solve failed" );
         y /= std::sqrt( y.dot( M * y ) );
         const double next = y.dot( K * y );
         x = y;
         if( it > 0 && std::abs( next - lambda ) <= 1e-13 * std::abs( next ) )
            return next;
         lambda = next;
      }
      fail( ErrorKind::numerical, "RadialFem: inverse iteration did not converge" );
   }

   /// Minimizer of a_k(phi, phi) subject to phi(r0) = left, phi(r1) = right.
   RadialProfileFE
   minimal_energy_profile( double k, double left, double right ) const
   {
      const int n = size();
      const Eigen::SparseMatrix<double> K = stiffness( k );
      Eigen::VectorXd u = Eigen::VectorXd::Zero( n );
      u[0] = left;
      u[n - 1] = right;
      if( n > 2 )
      {
         const Eigen::SparseMatrix<double> Kii = K.block( 1, 1, n - 2, n - 2 );
         const Eigen::VectorXd rhs = -( K.block( 1, 0, n - 2, n ) * u );
         Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver( Kii );
         require( solver.info() == Eigen::Success, ErrorKind::numerical, "RadialFem: factorization failed" );
         u.segment( 1, n - 2 ) = solver.solve( rhs );
      }
      const double energy = u.dot( K * u );
      return RadialProfileFE( r0_, r1_, elements_, degree_, u, energy );
   }

 private:
   int dimension_;
   double r0_, r1_;
   int elements_;
   int degree_;
   Eigen::SparseMatrix<double> grad_, ang_, mass_;
};

} // namespace exmaj
