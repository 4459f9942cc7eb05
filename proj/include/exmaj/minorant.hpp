// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

// Lower bound for ||A^{1/2} grad(u - v)||^2 by maximizing
// M(w) = 2(f, w) - (A grad(2v + w), grad w) over a finite zero-trace space.

#pragma once

#include "exmaj/majorant.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace exmaj
{

/// Test functions with zero trace on gamma. support_radius > 0 promises that
/// every w_k vanishes for |x| >= support_radius; the integrals are then taken
/// over a < |x| < support_radius only. 0 means unknown (whole exterior).
struct TestBasis
{
   std::vector<ScalarField> functions;
   double support_radius = 0.0;

   std::size_t size() const { return functions.size(); }
};

/// Bumps on overlapping sub-shells of (a, outer) times harmonics of degree
/// <= max_degree. outer = 0 means 2R.
inline TestBasis
default_basis( const ExteriorDomain& domain, int radial_count = 4, int max_degree = 2, double outer = 0.0 )
{
   domain.validate();
   require( radial_count >= 1 && max_degree >= 0, ErrorKind::invalid_argument, "default_basis: bad sizes" );
   const double a = domain.inner_radius;
   const double top = outer > 0.0 ? outer : 2.0 * domain.interface_radius;
   require( top > a, ErrorKind::invalid_argument, "default_basis: outer radius must exceed a" );
   const double h = ( top - a ) / radial_count;
   const AngularBasis basis( domain.dimension, max_degree );
   TestBasis b;
   b.support_radius = top;
   for( int i = 0; i < radial_count; ++i )
   {
      // each bump spans two pieces so neighbours overlap
      const double lo = std::max( a, a + ( i - 0.5 ) * h ), hi = std::min( top, a + ( i + 1.5 ) * h );
      for( std::size_t k = 0; k < basis.size(); ++k )
         b.functions.push_back( separated_field( domain.dimension, radial_bump( lo, hi ), &basis, k ) );
   }
   return b;
}

struct MinorantReport
{
   double value = 0.0;           // max(M(w*), 0)
   double optimum = 0.0;         // b . c before clamping
   double direct = 0.0;          // M(w*) evaluated by quadrature
   std::vector<double> coefficients;
   double gram_min_eigenvalue = 0.0;
   double gram_max_eigenvalue = 0.0;
   double boundary_mismatch = 0.0; // ||g - tau_gamma v||_{H^{1/2}}
   bool interior_only = false;   // v misses the boundary data: not sharp
   std::size_t basis_size = 0;
};

namespace detail
{

/// b_k = (f, w_k) - (A grad v, grad w_k) and G_jk = (A grad w_j, grad w_k),
/// one pass over the rule with per-block compensated sums merged in block order.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd>
assemble_minorant( const Problem& p, const ScalarField& v, const TestBasis& basis, const QuadratureRule& rule )
{
   const std::size_t K = basis.size(), n = rule.size();
   const std::size_t nblocks = ( n + kReductionBlock - 1 ) / kReductionBlock;
   const std::size_t entries = K + K * ( K + 1 ) / 2;
   std::vector<std::vector<CompensatedSum>> partial( nblocks, std::vector<CompensatedSum>( entries ) );
   std::vector<std::exception_ptr> errors( nblocks );

   auto run_block = [&]( std::size_t blk ) {
      std::vector<double> wv( K );
      std::vector<Vec> wg( K ), Awg( K );
      auto& acc = partial[blk];
      try
      {
         for( std::size_t i = blk * kReductionBlock; i < std::min( n, ( blk + 1 ) * kReductionBlock ); ++i )
         {
            const Point& x = rule.nodes()[i];
            const double wt = rule.weights()[i];
            const Mat m = p.A.matrix( x );
            const double fx = p.f.value( x );
            const Vec Av = m * v.gradient( x );
            for( std::size_t k = 0; k < K; ++k )
            {
               wv[k] = basis.functions[k].value( x );
               wg[k] = basis.functions[k].gradient( x );
               Awg[k] = m * wg[k];
            }
            for( std::size_t k = 0; k < K; ++k )
            {
               const double term = wt * ( fx * wv[k] - Av.dot( wg[k] ) );
               require( std::isfinite( term ), ErrorKind::non_finite,
                        "minorant: non-finite integrand at " + describe_point( x ) );
               acc[k].add( term );
            }
            std::size_t e = K;
            for( std::size_t j = 0; j < K; ++j )
               for( std::size_t k = j; k < K; ++k )
                  acc[e++].add( wt * Awg[j].dot( wg[k] ) );
         }
      }
      catch( ... )
      {
         errors[blk] = std::current_exception();
      }
   };

   const unsigned threads = std::max( 1u, std::min<unsigned>( p.disc.threads, unsigned( nblocks ) ) );
   if( threads <= 1 )
   {
      for( std::size_t blk = 0; blk < nblocks; ++blk )
         run_block( blk );
   }
   else
   {
      std::vector<std::jthread> pool;
      for( unsigned t = 0; t < threads; ++t )
         pool.emplace_back( [&, t] {
            for( std::size_t blk = t; blk < nblocks; blk += threads )
               run_block( blk );
         } );
   }
   for( const auto& e : errors )
      if( e )
         std::rethrow_exception( e );

   std::vector<CompensatedSum> total( entries );
   for( const auto& blk : partial )
      for( std::size_t e = 0; e < entries; ++e )
         total[e].merge( blk[e] );

   Eigen::VectorXd b( K );
   Eigen::MatrixXd G( K, K );
   for( std::size_t k = 0; k < K; ++k )
      b[Eigen::Index( k )] = total[k].value();
   std::size_t e = K;
   for( std::size_t j = 0; j < K; ++j )
      for( std::size_t k = j; k < K; ++k )
         G( Eigen::Index( j ), Eigen::Index( k ) ) = G( Eigen::Index( k ), Eigen::Index( j ) ) = total[e++].value();
   return { b, G };
}

/// Annulus pieces of the interior density out to the basis support, or the
/// whole exterior when the support is unknown.
inline QuadratureRule
minorant_rule( const Problem& p, double support_radius )
{
   if( support_radius <= 0.0 )
      return concatenate( *p.omega_i, *p.omega_e, Region::whole );
   const int N = p.domain.dimension, ro = p.disc.radial_order, ao = p.disc.angular_order, s = p.disc.shells;
   const double a = p.domain.inner_radius, R = p.domain.interface_radius;
   require( support_radius > a, ErrorKind::invalid_argument, "minorant: basis support radius must exceed a" );
   if( support_radius <= R )
   {
      const int n = std::max( 1, int( std::ceil( s * ( support_radius - a ) / ( R - a ) ) ) );
      return annulus_rule( N, a, support_radius, ro, ao, n, Region::custom );
   }
   const int n = std::max( 1, int( std::ceil( s * ( support_radius - R ) / ( R - a ) ) ) );
   return concatenate( *p.omega_i, annulus_rule( N, R, support_radius, ro, ao, n, Region::custom ), Region::custom );
}

} // namespace detail

/// M(w) = 2(f, w) - (A grad(2v + w), grad w) by direct quadrature; see
/// TestBasis for support_radius.
inline double
minorant_functional( const Problem& p, const ScalarField& v, const ScalarField& w, double support_radius = 0.0 )
{
   const QuadratureRule rule = detail::minorant_rule( p, support_radius );
   return integrate(
       rule,
       [&]( const Point& x ) {
          const Vec gw = w.gradient( x );
          const Vec q = 2.0 * v.gradient( x ) + gw;
          return 2.0 * p.f.value( x ) * w.value( x ) - ( p.A.matrix( x ) * q ).dot( gw );
       },
       p.options() );
}

inline MinorantReport
minorant( const Problem& p, const ScalarField& v, const TestBasis& basis )
{
   require( basis.size() > 0, ErrorKind::invalid_argument, "minorant: empty test basis" );
   require( v.has_gradient(), ErrorKind::precondition, "minorant: v needs a gradient closure" );
   const int L = p.disc.band_limit;
   for( std::size_t k = 0; k < basis.size(); ++k )
   {
      const auto& w = basis.functions[k];
      require( w.has_gradient(), ErrorKind::precondition, "minorant: test function " + std::to_string( k ) +
                                                              " ('" + w.label + "') has no gradient" );
      const double tr = sobolev_norm( analyze( w, *p.gamma_rule, L ), 0.5 );
      require( tr < kZeroTraceTolerance, ErrorKind::precondition,
               "minorant: test function " + std::to_string( k ) + " ('" + w.label + "') has trace norm " +
                   std::to_string( tr ) + " on gamma" );
   }

   const QuadratureRule rule = detail::minorant_rule( p, basis.support_radius );
   const auto [b, G] = detail::assemble_minorant( p, v, basis, rule );

   MinorantReport rep;
   rep.basis_size = basis.size();
   Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es( G, Eigen::EigenvaluesOnly );
   rep.gram_min_eigenvalue = es.eigenvalues().minCoeff();
   rep.gram_max_eigenvalue = es.eigenvalues().maxCoeff();
   require( rep.gram_max_eigenvalue > 0.0 && rep.gram_min_eigenvalue > 1e-12 * rep.gram_max_eigenvalue,
            ErrorKind::numerical,
            "minorant: Gram matrix is singular (smallest eigenvalue " + std::to_string( rep.gram_min_eigenvalue ) +
                ", largest " + std::to_string( rep.gram_max_eigenvalue ) + ")" );

   const Eigen::VectorXd c = G.ldlt().solve( b );
   rep.coefficients.assign( c.data(), c.data() + c.size() );
   rep.optimum = b.dot( c );
   rep.value = std::max( rep.optimum, 0.0 );

   ScalarField w = constant_field( 0.0 );
   for( std::size_t k = 0; k < basis.size(); ++k )
      w = w + c[Eigen::Index( k )] * basis.functions[k];
   rep.direct = minorant_functional( p, v, w, basis.support_radius );

   rep.boundary_mismatch = sobolev_norm( boundary_mismatch( p, v ), 0.5 );
   rep.interior_only = rep.boundary_mismatch >= kZeroTraceTolerance;
   return rep;
}

struct Sandwich
{
   double lower = 0.0;
   double upper = 0.0;
   MinorantReport minorant;
   MajorantReport majorant;
};

/// (sqrt(minorant), estimate_I total).
inline Sandwich
sandwich( const Problem& p, const ScalarField& v, const VectorField& y, const TestBasis& basis,
          std::optional<double> true_error = {} )
{
   Sandwich s;
   s.minorant = minorant( p, v, basis );
   s.majorant = estimate_I( p, v, y, true_error );
   s.lower = std::sqrt( s.minorant.value );
   s.upper = s.majorant.total;
   return s;
}

} // namespace exmaj
