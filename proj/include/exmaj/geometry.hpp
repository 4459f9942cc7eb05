// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "exmaj/error.hpp"
#include "exmaj/summation.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace exmaj
{

/// Points and vectors live in R^3; for N < 3 the trailing components are 0.
using Point = Eigen::Vector3d;
using Vec = Eigen::Vector3d;
using Mat = Eigen::Matrix3d;

inline constexpr double pi = std::numbers::pi;

/// Exterior of the ball of radius a, split by the sphere of radius R into the
/// annulus Omega_i = {a < |x| < R} and the tail Omega_e = {|x| > R}.
/// For N = 1 this is the half-line (a, inf).
struct ExteriorDomain
{
   int dimension = 3;
   double inner_radius = 1.0;
   double interface_radius = 2.0;

   static ExteriorDomain
   make( int dimension, double inner_radius, double interface_radius )
   {
      ExteriorDomain d{ dimension, inner_radius, interface_radius };
      d.validate();
      return d;
   }

   void
   validate() const
   {
      require( dimension >= 1 && dimension <= 3, ErrorKind::invalid_argument,
               "ExteriorDomain: dimension must be 1, 2 or 3" );
      require( inner_radius > 0.0 && inner_radius < interface_radius, ErrorKind::invalid_argument,
               "ExteriorDomain: need 0 < inner_radius < interface_radius" );
      require( dimension != 2 || inner_radius >= 1.0, ErrorKind::invalid_argument,
               "ExteriorDomain: for N = 2 the excluded ball must contain the unit ball (a >= 1)" );
   }
};

/// Surface measure of the unit sphere S^{N-1} in R^N.
inline double
unit_sphere_area( int dimension )
{
   return 2.0 * std::pow( pi, 0.5 * dimension ) / std::tgamma( 0.5 * dimension );
}

/// rho = (1 + r^2)^{1/2}
inline double
rho( const Point& x )
{
   return std::sqrt( 1.0 + x.squaredNorm() );
}

/// Gauss-Legendre nodes/weights on [-1, 1] (Newton iteration on P_n).
inline std::pair<std::vector<double>, std::vector<double>>
gauss_legendre( int n )
{
   require( n >= 1, ErrorKind::invalid_argument, "gauss_legendre: order must be >= 1" );
   std::vector<double> x( n ), w( n );
   for( int i = 0; i < ( n + 1 ) / 2; ++i )
   {
      double z = std::cos( pi * ( i + 0.75 ) / ( n + 0.5 ) );
      double dp = 0.0;
      for( int it = 0; it < 100; ++it )
      {
         double p0 = 1.0, p1 = 0.0;
         for( int k = 1; k <= n; ++k )
         {
            const double p2 = p1;
            p1 = p0;
            p0 = ( ( 2.0 * k - 1.0 ) * z * p1 - ( k - 1.0 ) * p2 ) / k;
         }
         dp = n * ( z * p0 - p1 ) / ( z * z - 1.0 );
         const double dz = p0 / dp;
         z -= dz;
         if( std::abs( dz ) < 1e-16 )
            break;
      }
      {
         // weight from the converged node
         double p0 = 1.0, p1 = 0.0;
         for( int k = 1; k <= n; ++k )
         {
            const double p2 = p1;
            p1 = p0;
            p0 = ( ( 2.0 * k - 1.0 ) * z * p1 - ( k - 1.0 ) * p2 ) / k;
         }
         dp = n * ( z * p0 - p1 ) / ( z * z - 1.0 );
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = w[n - 1 - i] = 2.0 / ( ( 1.0 - z * z ) * dp * dp );
   }
   if( n % 2 == 1 )
      x[n / 2] = 0.0;
   return { x, w };
}

enum class Region
{
   omega_i,
   omega_e,
   sphere_gamma,
   sphere_Gamma,
   whole,
   custom
};

inline std::string
to_string( Region r )
{
   switch( r )
   {
   case Region::omega_i: return "omega_i";
   case Region::omega_e: return "omega_e";
   case Region::sphere_gamma: return "sphere_gamma";
   case Region::sphere_Gamma: return "sphere_Gamma";
   case Region::whole: return "whole";
   case Region::custom: return "custom";
   }
   return "?";
}

inline Region
region_from_string( const std::string& s )
{
   for( Region r : { Region::omega_i, Region::omega_e, Region::sphere_gamma, Region::sphere_Gamma,
                     Region::whole, Region::custom } )
      if( to_string( r ) == s )
         return r;
   fail( ErrorKind::invalid_argument, "unknown region tag '" + s + "'" );
}

/// Immutable node/weight list. Consumers treat it as opaque, so a
/// user-supplied rule (Region::custom) can describe other geometries.
class QuadratureRule
{
 public:
   QuadratureRule( Region region, int dimension, std::vector<Point> nodes, std::vector<double> weights,
                   int radial_order, int angular_order, int shells, std::string tail_map = {},
                   double sphere_radius = 0.0 )
       : region_( region ), dimension_( dimension ), nodes_( std::move( nodes ) ),
         weights_( std::move( weights ) ), radial_order_( radial_order ), angular_order_( angular_order ),
         shells_( shells ), tail_map_( std::move( tail_map ) ), sphere_radius_( sphere_radius )
   {
      require( nodes_.size() == weights_.size(), ErrorKind::invalid_argument,
               "QuadratureRule: node/weight count mismatch" );
      for( double w : weights_ )
         require( w > 0.0 && std::isfinite( w ), ErrorKind::invalid_argument,
                  "QuadratureRule: weights must be positive" );
   }

   Region region() const { return region_; }
   int dimension() const { return dimension_; }
   const std::vector<Point>& nodes() const { return nodes_; }
   const std::vector<double>& weights() const { return weights_; }
   std::size_t size() const { return nodes_.size(); }
   int radial_order() const { return radial_order_; }
   int angular_order() const { return angular_order_; }
   int shell_count() const { return shells_; }
   const std::string& tail_map() const { return tail_map_; }
   /// Radius for sphere rules, 0 otherwise.
   double sphere_radius() const { return sphere_radius_; }

 private:
   Region region_;
   int dimension_;
   std::vector<Point> nodes_;
   std::vector<double> weights_;
   int radial_order_;
   int angular_order_;
   int shells_;
   std::string tail_map_;
   double sphere_radius_;
};

/// Directions and weights of the unit-sphere rule. For N = 3: Gauss-Legendre
/// in cos(theta) times a 2n-point trapezoid in azimuth, exact for spherical
/// polynomials of degree <= 2n - 1. For N = 2: 2n-point trapezoid. N = 1: {+1}.
inline std::pair<std::vector<Point>, std::vector<double>>
unit_sphere_rule( int dimension, int angular_order )
{
   require( angular_order >= 1, ErrorKind::invalid_argument, "angular order must be >= 1" );
   std::vector<Point> dirs;
   std::vector<double> w;
   if( dimension == 1 )
   {
      dirs.emplace_back( 1.0, 0.0, 0.0 );
      w.push_back( 1.0 );
      return { dirs, w };
   }
   const int nphi = 2 * angular_order;
   const double dphi = 2.0 * pi / nphi;
   if( dimension == 2 )
   {
      for( int j = 0; j < nphi; ++j )
      {
         const double phi = j * dphi;
         dirs.emplace_back( std::cos( phi ), std::sin( phi ), 0.0 );
         w.push_back( dphi );
      }
      return { dirs, w };
   }
   const auto [ct, wt] = gauss_legendre( angular_order );
   for( int i = 0; i < angular_order; ++i )
   {
      const double st = std::sqrt( 1.0 - ct[i] * ct[i] );
      for( int j = 0; j < nphi; ++j )
      {
         const double phi = ( j + 0.5 ) * dphi;
         dirs.emplace_back( st * std::cos( phi ), st * std::sin( phi ), ct[i] );
         w.push_back( wt[i] * dphi );
      }
   }
   return { dirs, w };
}

/// Highest total degree integrated exactly by unit_sphere_rule.
inline int
angular_exactness( int dimension, int angular_order )
{
   return dimension == 1 ? 1 << 20 : 2 * angular_order - 1;
}

inline QuadratureRule
sphere_rule( int dimension, double radius, int angular_order, Region tag = Region::custom )
{
   auto [dirs, w] = unit_sphere_rule( dimension, angular_order );
   const double scale = std::pow( radius, dimension - 1 );
   for( auto& d : dirs )
      d *= radius;
   for( auto& wi : w )
      wi *= scale;
   return QuadratureRule( tag, dimension, std::move( dirs ), std::move( w ), 0, angular_order, 0, {}, radius );
}

/// Tensor rule on the shell r0 < |x| < r1: `shells` equal radial pieces with a
/// Gauss-Legendre rule each, times the unit-sphere rule.
inline QuadratureRule
annulus_rule( int dimension, double r0, double r1, int radial_order, int angular_order, int shells,
              Region tag = Region::custom )
{
   require( radial_order >= 1 && shells >= 1, ErrorKind::invalid_argument,
            "annulus_rule: orders and shell count must be >= 1" );
   require( 0.0 <= r0 && r0 < r1, ErrorKind::invalid_argument, "annulus_rule: need 0 <= r0 < r1" );
   const auto [gx, gw] = gauss_legendre( radial_order );
   const auto [dirs, dw] = unit_sphere_rule( dimension, angular_order );
   std::vector<Point> nodes;
   std::vector<double> weights;
   nodes.reserve( std::size_t( shells ) * radial_order * dirs.size() );
   weights.reserve( nodes.capacity() );
   const double h = ( r1 - r0 ) / shells;
   for( int s = 0; s < shells; ++s )
   {
      const double lo = r0 + s * h;
      for( int k = 0; k < radial_order; ++k )
      {
         const double r = lo + 0.5 * h * ( gx[k] + 1.0 );
         const double wr = 0.5 * h * gw[k] * std::pow( r, dimension - 1 );
         for( std::size_t j = 0; j < dirs.size(); ++j )
         {
            nodes.push_back( r * dirs[j] );
            weights.push_back( wr * dw[j] );
         }
      }
   }
   return QuadratureRule( tag, dimension, std::move( nodes ), std::move( weights ), radial_order, angular_order,
                          shells );
}

/// Ratio of consecutive shell widths in the tail rule.
inline constexpr double kTailGrading = 0.15;

/// Rule on |x| > R via r = R/t, t in (0, 1], Jacobian R/t^2 folded into the
/// weights. The t-interval is split geometrically, [0, q^{s-1}], ..., [q^2, q]
/// with q = kTailGrading, and [q, 1] into s equal pieces so that features
/// just outside R see the same resolution as the annulus. Gauss-Legendre on
/// each piece: exact for finite Laurent series in 1/r, and robust for
/// logarithmic factors at t = 0.
inline QuadratureRule
tail_rule( int dimension, double R, int radial_order, int angular_order, int shells, Region tag = Region::custom )
{
   require( radial_order >= 1 && shells >= 1, ErrorKind::invalid_argument,
            "tail_rule: orders and shell count must be >= 1" );
   const auto [gx, gw] = gauss_legendre( radial_order );
   const auto [dirs, dw] = unit_sphere_rule( dimension, angular_order );
   std::vector<double> breaks{ 0.0 };
   for( int s = shells - 1; s >= 2; --s )
      breaks.push_back( std::pow( kTailGrading, s ) );
   for( int s = 0; s <= shells; ++s )
      breaks.push_back( kTailGrading + ( 1.0 - kTailGrading ) * s / shells );
   std::vector<Point> nodes;
   std::vector<double> weights;
   for( std::size_t s = 0; s + 1 < breaks.size(); ++s )
   {
      const double lo = breaks[s], h = breaks[s + 1] - breaks[s];
      for( int k = 0; k < radial_order; ++k )
      {
         const double t = lo + 0.5 * h * ( gx[k] + 1.0 );
         const double r = R / t;
         const double wr = 0.5 * h * gw[k] * ( R / ( t * t ) ) * std::pow( r, dimension - 1 );
         for( std::size_t j = 0; j < dirs.size(); ++j )
         {
            nodes.push_back( r * dirs[j] );
            weights.push_back( wr * dw[j] );
         }
      }
   }
   return QuadratureRule( tag, dimension, std::move( nodes ), std::move( weights ), radial_order, angular_order,
                          shells, "r = R/t, t in (0,1] split geometrically (ratio 0.15) below 0.15 and uniformly above, Gauss-Legendre in t" );
}

/// Concatenation of two rules of equal dimension (node order: first, then second).
inline QuadratureRule
concatenate( const QuadratureRule& a, const QuadratureRule& b, Region tag )
{
   require( a.dimension() == b.dimension(), ErrorKind::invalid_argument, "concatenate: dimension mismatch" );
   std::vector<Point> nodes = a.nodes();
   std::vector<double> weights = a.weights();
   nodes.insert( nodes.end(), b.nodes().begin(), b.nodes().end() );
   weights.insert( weights.end(), b.weights().begin(), b.weights().end() );
   return QuadratureRule( tag, a.dimension(), std::move( nodes ), std::move( weights ), a.radial_order(),
                          a.angular_order(), a.shell_count(), b.tail_map() );
}

inline QuadratureRule
build_quadrature( const ExteriorDomain& domain, int radial_order, int angular_order, int shells, Region region )
{
   domain.validate();
   require( radial_order >= 1 && angular_order >= 1 && shells >= 1, ErrorKind::invalid_argument,
            "build_quadrature: orders and shell count must be >= 1" );
   const int N = domain.dimension;
   const double a = domain.inner_radius, R = domain.interface_radius;
   switch( region )
   {
   case Region::omega_i: return annulus_rule( N, a, R, radial_order, angular_order, shells, region );
   case Region::omega_e: return tail_rule( N, R, radial_order, angular_order, shells, region );
   case Region::sphere_gamma: return sphere_rule( N, a, angular_order, region );
   case Region::sphere_Gamma: return sphere_rule( N, R, angular_order, region );
   case Region::whole:
      return concatenate( annulus_rule( N, a, R, radial_order, angular_order, shells, region ),
                          tail_rule( N, R, radial_order, angular_order, shells, region ), region );
   case Region::custom: break;
   }
   fail( ErrorKind::invalid_argument, "build_quadrature: region tag '" + to_string( region ) + "' is not buildable" );
}

struct IntegrationOptions
{
   unsigned threads = 1;
};

inline std::string
describe_point( const Point& x )
{
   std::ostringstream os;
   os.precision( 17 );
   os << "(" << x[0] << ", " << x[1] << ", " << x[2] << ")";
   return os.str();
}

/// Weighted node sum with compensated, fixed-order accumulation.
template <typename Integrand>
double
integrate( const QuadratureRule& rule, Integrand&& integrand, IntegrationOptions opts = {} )
{
   const auto& x = rule.nodes();
   const auto& w = rule.weights();
   return reduce_terms(
       rule.size(),
       [&]( std::size_t i ) {
          const double v = integrand( x[i] );
          if( !std::isfinite( v ) )
             fail( ErrorKind::non_finite, "integrate: non-finite integrand at node " + std::to_string( i ) + " " +
                                              describe_point( x[i] ) );
          return w[i] * v;
       },
       opts.threads );
}

} // namespace exmaj
