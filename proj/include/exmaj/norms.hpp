// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "exmaj/fields.hpp"

#include <cmath>
#include <string>

namespace exmaj
{

/// (int rho^{2s} |f|^2)^{1/2} over the rule's region, rho = (1 + r^2)^{1/2}.
inline double
weighted_norm( const ScalarField& f, double s, const QuadratureRule& rule, IntegrationOptions opts = {} )
{
   const double sq = integrate(
       rule,
       [&]( const Point& x ) {
          const double v = f.value( x );
          return s == 0.0 ? v * v : std::pow( 1.0 + x.squaredNorm(), s ) * v * v;
       },
       opts );
   return std::sqrt( std::max( sq, 0.0 ) );
}

inline double
weighted_norm( const VectorField& f, double s, const QuadratureRule& rule, IntegrationOptions opts = {} )
{
   const double sq = integrate(
       rule,
       [&]( const Point& x ) {
          const double v = f.value( x ).squaredNorm();
          return s == 0.0 ? v : std::pow( 1.0 + x.squaredNorm(), s ) * v;
       },
       opts );
   return std::sqrt( std::max( sq, 0.0 ) );
}

enum class LogWeight
{
   times_rlnr,
   over_rlnr
};

inline double
log_weight( LogWeight mode, const Point& x )
{
   const double r = x.norm();
   const double w = r * std::log( r );
   return mode == LogWeight::times_rlnr ? w : 1.0 / w;
}

/// ||r ln r f|| or ||f / (r ln r)||, N = 2 only, region must lie in r > 1.
inline double
log_weighted_norm( const ScalarField& f, LogWeight mode, const QuadratureRule& rule, IntegrationOptions opts = {} )
{
   require( rule.dimension() == 2, ErrorKind::invalid_argument, "log_weighted_norm: only defined for N = 2" );
   for( const auto& x : rule.nodes() )
      require( x.norm() > 1.0, ErrorKind::invalid_argument,
               "log_weighted_norm: region touches r <= 1 at " + describe_point( x ) );
   const double sq = integrate(
       rule,
       [&]( const Point& x ) {
          const double v = log_weight( mode, x ) * f.value( x );
          return v * v;
       },
       opts );
   return std::sqrt( std::max( sq, 0.0 ) );
}

enum class EnergyMode
{
   A,
   A_inverse
};

/// (int A q.q)^{1/2} or (int A^{-1} q.q)^{1/2}; A^{-1} q by a per-node Cholesky solve.
inline double
energy_norm( const Coefficient& A, const VectorField& q, EnergyMode mode, const QuadratureRule& rule,
             IntegrationOptions opts = {} )
{
   const int N = A.dimension;
   const double sq = integrate(
       rule,
       [&]( const Point& x ) {
          Vec qv = q.value( x );
          Mat m = A.matrix( x );
          // pad to a 3x3 SPD system; padded components of q are zero
          for( int i = N; i < 3; ++i )
          {
             qv[i] = 0.0;
             m.row( i ).setZero();
             m.col( i ).setZero();
             m( i, i ) = 1.0;
          }
          if( mode == EnergyMode::A )
             return qv.dot( m * qv );
          Eigen::LLT<Mat> llt( m );
          if( llt.info() != Eigen::Success )
             fail( ErrorKind::numerical, "energy_norm: coefficient is not positive definite at " + describe_point( x ) );
          return qv.dot( llt.solve( qv ) );
       },
       opts );
   return std::sqrt( std::max( sq, 0.0 ) );
}

/// Energy norm of a gradient: ||A^{1/2} grad v||.
inline double
energy_norm( const Coefficient& A, const ScalarField& v, const QuadratureRule& rule, IntegrationOptions opts = {} )
{
   return energy_norm( A, gradient_of( v ), EnergyMode::A, rule, opts );
}

} // namespace exmaj
