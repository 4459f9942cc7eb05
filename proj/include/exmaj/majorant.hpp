// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

// Guaranteed upper bounds for ||A^{1/2} grad(u - v)|| on the exterior domain.

#pragma once

#include "exmaj/constants.hpp"
#include "exmaj/norms.hpp"
#include "exmaj/trace.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace exmaj
{

enum class BoundaryMode
{
   constant_based,
   extension_based
};

enum class CoVariant
{
   formula,
   eigen
};

enum class EstimateKind
{
   I,
   II,
   III
};

inline std::string
to_string( BoundaryMode m )
{
   return m == BoundaryMode::constant_based ? "constant_based" : "extension_based";
}

inline std::string
to_string( CoVariant v )
{
   return v == CoVariant::formula ? "formula" : "eigen";
}

inline BoundaryMode
boundary_mode_from_string( const std::string& s )
{
   if( s == "constant_based" )
      return BoundaryMode::constant_based;
   if( s == "extension_based" )
      return BoundaryMode::extension_based;
   fail( ErrorKind::config, "unknown boundary mode '" + s + "' (constant_based | extension_based)" );
}

inline CoVariant
co_variant_from_string( const std::string& s )
{
   if( s == "formula" )
      return CoVariant::formula;
   if( s == "eigen" )
      return CoVariant::eigen;
   fail( ErrorKind::config, "unknown c_o variant '" + s + "' (formula | eigen)" );
}

inline EstimateKind
estimate_from_string( const std::string& s )
{
   if( s == "I" )
      return EstimateKind::I;
   if( s == "II" )
      return EstimateKind::II;
   if( s == "III" )
      return EstimateKind::III;
   fail( ErrorKind::config, "unknown estimate '" + s + "' (I | II | III)" );
}

/// Quadrature, trace and constant settings shared by every estimate.
struct Discretization
{
   int radial_order = 20;
   int angular_order = 8;
   int shells = 8;
   int band_limit = 6;
   int constant_modes = 8;
   int constant_mesh = 64;
   double cutoff = 0.0; // extension cut-off radius; 0 means R
   unsigned threads = 1;
   bool strict = false;
   BoundaryMode boundary = BoundaryMode::extension_based;

   void
   validate() const
   {
      require( radial_order >= 1 && radial_order <= 128, ErrorKind::config, "radial_order must be in [1, 128]" );
      require( angular_order >= 1 && angular_order <= 64, ErrorKind::config, "angular_order must be in [1, 64]" );
      require( shells >= 1 && shells <= 64, ErrorKind::config, "shells must be in [1, 64]" );
      require( band_limit >= 0 && band_limit <= 32, ErrorKind::config, "band_limit must be in [0, 32]" );
      require( constant_modes >= band_limit, ErrorKind::config, "constant_modes must be >= band_limit" );
      require( constant_mesh >= 4 && constant_mesh <= 1024, ErrorKind::config, "constant_mesh must be in [4, 1024]" );
      require( threads >= 1, ErrorKind::config, "threads must be >= 1" );
   }
};

/// Problem data with quadrature rules and constants derived eagerly.
struct Problem
{
   ExteriorDomain domain;
   Coefficient A;
   ScalarField f;
   SphereTrace g;
   Discretization disc;

   std::optional<QuadratureRule> omega_i, omega_e, omega_e_check, gamma_rule, Gamma_rule;
   ConstantReport c_omega_i_report, c_gamma_report, c_Gamma_report;
   TraceExtension extension;

   static Problem
   make( const ExteriorDomain& domain, const Coefficient& A, ScalarField f, SphereTrace g, Discretization disc = {} )
   {
      domain.validate();
      disc.validate();
      const int N = domain.dimension;
      require( N == 2 || N == 3, ErrorKind::invalid_argument, "Problem: the estimates are implemented for N = 2, 3" );
      require( A.dimension == N, ErrorKind::invalid_argument, "Problem: coefficient dimension differs from N" );
      g.check();
      require( g.dimension == N && g.band_limit == disc.band_limit &&
                   std::abs( g.radius - domain.inner_radius ) <= 1e-14 * domain.inner_radius,
               ErrorKind::invalid_argument, "Problem: Dirichlet data must be a trace on gamma with band limit L" );

      Problem p;
      p.domain = domain;
      p.A = A;
      p.f = std::move( f );
      p.g = std::move( g );
      p.disc = disc;
      const int ro = disc.radial_order, ao = disc.angular_order, s = disc.shells;
      p.omega_i = build_quadrature( domain, ro, ao, s, Region::omega_i );
      p.omega_e = build_quadrature( domain, ro, ao, s, Region::omega_e );
      p.omega_e_check = tail_rule( N, domain.interface_radius, ro, ao, s + 2, Region::omega_e );
      p.gamma_rule = sphere_rule( N, domain.inner_radius, disc.band_limit + 1, Region::sphere_gamma );
      p.Gamma_rule = sphere_rule( N, domain.interface_radius, disc.band_limit + 1, Region::sphere_Gamma );

      const double cutoff = disc.cutoff > 0.0 ? disc.cutoff : domain.interface_radius;
      p.c_omega_i_report = c_omega_i( domain, disc.constant_modes, disc.constant_mesh );
      p.c_gamma_report = c_gamma_extension( domain, A, cutoff, disc.constant_modes, disc.constant_mesh );
      p.c_Gamma_report = c_Gamma_trace( domain, A, disc.constant_modes, disc.constant_mesh );
      p.extension = TraceExtension( N, domain.inner_radius, cutoff, disc.band_limit, 2 * disc.constant_mesh );
      return p;
   }

   IntegrationOptions options() const { return { disc.threads }; }

   /// c_N / sqrt(c_A), or 2 / sqrt(c_A) with the r ln r weight for N = 2.
   double
   residual_weight() const
   {
      return c_N( domain.dimension ) / std::sqrt( A.c_A );
   }

   double
   c_o( CoVariant variant ) const
   {
      const double formula = c_o_formula( domain, A );
      const double eigen = c_omega_i_report.value / std::sqrt( A.c_A );
      if( variant == CoVariant::formula )
         return formula;
      return domain.dimension == 2 ? std::min( formula, eigen ) : eigen;
   }
};

/// Per-term breakdown of one estimate.
struct MajorantReport
{
   std::string estimate;
   double residual = 0.0;
   double flux = 0.0;
   double interface = 0.0;
   double boundary = 0.0;
   double total = 0.0;

   /// Raw norms before multiplication by constants.
   std::map<std::string, double> norms;
   std::map<std::string, double> constants;
   std::map<std::string, double> tolerances;
   std::map<std::string, std::string> options;
   std::vector<std::string> notes;

   double scale = 0.0;
   std::optional<double> true_error;

   /// Fixed summation order, so the identity holds for the printed values.
   void
   finalize()
   {
      total = ( ( residual + flux ) + interface ) + boundary;
   }

   std::optional<double>
   efficiency_index() const
   {
      if( !true_error || *true_error <= 0.0 )
         return std::nullopt;
      return total / *true_error;
   }
};

inline constexpr double kZeroTraceTolerance = 1e-13;
inline constexpr double kEquilibrationTolerance = 1e-10;
inline constexpr double kTailDivergenceTolerance = 1e-6;
inline constexpr double kBandLimitTolerance = 1e-12;

namespace detail
{

inline std::string
estimate_name( EstimateKind k, int dimension )
{
   const std::string base = k == EstimateKind::I ? "I" : k == EstimateKind::II ? "II" : "III";
   return dimension == 2 ? base + "-2D" : base;
}

/// ||.||_{1} (N = 3) or ||r ln r .|| (N = 2) of a residual over the tail,
/// cross-checked against a rule reaching further out.
inline double
exterior_residual_norm( const Problem& p, const ScalarField& res )
{
   const bool log = p.domain.dimension == 2;
   auto eval = [&]( const QuadratureRule& rule ) {
      return log ? log_weighted_norm( res, LogWeight::times_rlnr, rule, p.options() )
                 : weighted_norm( res, 1.0, rule, p.options() );
   };
   const double a = eval( *p.omega_e ), b = eval( *p.omega_e_check );
   require( std::abs( a - b ) <= kTailDivergenceTolerance * std::max( a, b ) + 1e-14, ErrorKind::numerical,
            std::string( "residual norm with weight " ) + ( log ? "r ln r" : "rho^{+1}" ) +
                " diverges over Omega_e (tail values " + std::to_string( a ) + " vs " + std::to_string( b ) + ")" );
   return a;
}

inline double
interior_weighted_norm( const Problem& p, const ScalarField& res )
{
   if( p.domain.dimension == 2 )
      return log_weighted_norm( res, LogWeight::times_rlnr, *p.omega_i, p.options() );
   return weighted_norm( res, 1.0, *p.omega_i, p.options() );
}

/// ||y_i - A grad v||_{A^{-1}} over Omega_i and ||y_e - A grad v||_{A^{-1}} over Omega_e.
inline std::pair<double, double>
flux_parts( const Problem& p, const ScalarField& v, const VectorField& y_i, const VectorField& y_e )
{
   const VectorField Av = flux_of( p.A, v );
   const double fi = energy_norm( p.A, y_i - Av, EnergyMode::A_inverse, *p.omega_i, p.options() );
   const double fe = energy_norm( p.A, y_e - Av, EnergyMode::A_inverse, *p.omega_e, p.options() );
   return { fi, fe };
}

inline double
energy_scale( const Problem& p, const ScalarField& v, std::optional<double> true_error )
{
   const double ev = std::hypot( energy_norm( p.A, v, *p.omega_i, p.options() ),
                                 energy_norm( p.A, v, *p.omega_e, p.options() ) );
   return std::max( true_error.value_or( 0.0 ), ev );
}

inline void
check_band_limit( const Problem& p, const SphereTrace& t, const char* what, MajorantReport& rep )
{
   const double tail = tail_fraction( t );
   rep.norms[std::string( what ) + "_tail_fraction"] = tail;
   if( tail > kBandLimitTolerance )
   {
      require( !p.disc.strict, ErrorKind::precondition,
               std::string( what ) + ": trace carries energy above degree L/2 (fraction " + std::to_string( tail ) +
                   "); raise band_limit" );
      rep.notes.push_back( std::string( what ) + " trace is not resolved below degree L/2" );
   }
}

inline void
fill_common( const Problem& p, MajorantReport& rep, std::optional<double> true_error, const ScalarField& v )
{
   rep.true_error = true_error;
   rep.scale = energy_scale( p, v, true_error );
   rep.constants["c_N"] = c_N( p.domain.dimension );
   rep.constants["c_A"] = p.A.c_A;
   rep.constants["c_A_plus"] = p.A.c_A_plus;
   rep.tolerances["zero_trace"] = kZeroTraceTolerance;
   rep.tolerances["equilibration"] = kEquilibrationTolerance;
   rep.tolerances["tail_divergence"] = kTailDivergenceTolerance;
   rep.tolerances["band_limit"] = kBandLimitTolerance;
   rep.options["boundary_mode"] = to_string( p.disc.boundary );
}

} // namespace detail

/// g - tau_gamma v as trace coefficients on gamma.
inline SphereTrace
boundary_mismatch( const Problem& p, const ScalarField& v )
{
   return p.g - analyze( v, *p.gamma_rule, p.disc.band_limit );
}

/// 2 c_gamma ||g - tau v||_{H^{1/2}} or 2 ||A^{1/2} grad E(g - tau v)||;
/// exactly 0 when the mismatch is below kZeroTraceTolerance.
inline double
boundary_term( const Problem& p, const ScalarField& v, BoundaryMode mode )
{
   const SphereTrace d = boundary_mismatch( p, v );
   if( p.disc.strict )
      require( tail_fraction( d ) <= kBandLimitTolerance, ErrorKind::precondition,
               "boundary_term: g - tau_gamma v is not band-limited to degree L/2; raise band_limit" );
   const double h = sobolev_norm( d, 0.5 );
   if( h < kZeroTraceTolerance )
      return 0.0;
   if( mode == BoundaryMode::constant_based )
      return 2.0 * p.c_gamma_report.value * h;
   return 2.0 * p.extension.energy( p.A, d );
}

/// Residual over the whole domain with the rho^{+1} (N = 3) or r ln r (N = 2) weight.
inline MajorantReport
estimate_I( const Problem& p, const ScalarField& v, const VectorField& y, std::optional<double> true_error = {} )
{
   MajorantReport rep;
   rep.estimate = detail::estimate_name( EstimateKind::I, p.domain.dimension );
   detail::fill_common( p, rep, true_error, v );
   const ScalarField res = residual_of( p.f, y );

   const double wi = detail::interior_weighted_norm( p, res );
   const double we = detail::exterior_residual_norm( p, res );
   rep.norms["residual_weighted_interior"] = wi;
   rep.norms["residual_weighted_exterior"] = we;
   rep.norms["residual_l2_interior"] = weighted_norm( res, 0.0, *p.omega_i, p.options() );
   rep.constants["residual_weight"] = p.residual_weight();
   rep.residual = p.residual_weight() * std::hypot( wi, we );

   const auto [fi, fe] = detail::flux_parts( p, v, y, y );
   rep.norms["flux_interior"] = fi;
   rep.norms["flux_exterior"] = fe;
   rep.flux = std::hypot( fi, fe );

   const SphereTrace d = boundary_mismatch( p, v );
   detail::check_band_limit( p, d, "boundary", rep );
   rep.norms["boundary_mismatch_h12"] = sobolev_norm( d, 0.5 );
   rep.constants["c_gamma"] = p.c_gamma_report.value;
   rep.boundary = boundary_term( p, v, p.disc.boundary );
   rep.finalize();
   return rep;
}

/// Residual over Omega_i only; the flux must be equilibrated in Omega_e.
inline MajorantReport
estimate_II( const Problem& p, const ScalarField& v, const VectorField& y, CoVariant variant = CoVariant::eigen,
             std::optional<double> true_error = {} )
{
   MajorantReport rep;
   rep.estimate = detail::estimate_name( EstimateKind::II, p.domain.dimension );
   detail::fill_common( p, rep, true_error, v );
   rep.options["c_o_variant"] = to_string( variant );
   const ScalarField res = residual_of( p.f, y );

   const double we = detail::exterior_residual_norm( p, res );
   rep.norms["residual_weighted_exterior"] = we;
   require( we < kEquilibrationTolerance * rep.scale || we == 0.0, ErrorKind::precondition,
            "estimate_II: flux is not equilibrated in Omega_e (div y + f = 0 required there); weighted residual " +
                std::to_string( we ) + " exceeds tolerance " + std::to_string( kEquilibrationTolerance * rep.scale ) );

   const double li = weighted_norm( res, 0.0, *p.omega_i, p.options() );
   rep.norms["residual_l2_interior"] = li;
   rep.constants["c_o"] = p.c_o( variant );
   rep.constants["c_o_formula"] = p.c_o( CoVariant::formula );
   rep.constants["c_omega_i"] = p.c_omega_i_report.value;
   rep.constants["residual_weight"] = p.residual_weight();
   // the sub-tolerance exterior remainder is kept so the bound stays valid
   rep.residual = p.c_o( variant ) * li + p.residual_weight() * we;

   const auto [fi, fe] = detail::flux_parts( p, v, y, y );
   rep.norms["flux_interior"] = fi;
   rep.norms["flux_exterior"] = fe;
   rep.flux = std::hypot( fi, fe );

   const SphereTrace d = boundary_mismatch( p, v );
   detail::check_band_limit( p, d, "boundary", rep );
   rep.norms["boundary_mismatch_h12"] = sobolev_norm( d, 0.5 );
   rep.constants["c_gamma"] = p.c_gamma_report.value;
   rep.boundary = boundary_term( p, v, p.disc.boundary );
   rep.finalize();
   return rep;
}

/// Broken flux (y_i on Omega_i, y_e on Omega_e) with the interface penalty.
inline MajorantReport
estimate_III( const Problem& p, const ScalarField& v, const VectorField& y_i, const VectorField& y_e,
              CoVariant variant = CoVariant::eigen, std::optional<double> true_error = {} )
{
   MajorantReport rep;
   rep.estimate = detail::estimate_name( EstimateKind::III, p.domain.dimension );
   detail::fill_common( p, rep, true_error, v );
   rep.options["c_o_variant"] = to_string( variant );

   const double li = weighted_norm( residual_of( p.f, y_i ), 0.0, *p.omega_i, p.options() );
   const double we = detail::exterior_residual_norm( p, residual_of( p.f, y_e ) );
   rep.norms["residual_l2_interior"] = li;
   rep.norms["residual_weighted_exterior"] = we;
   rep.constants["c_o"] = p.c_o( variant );
   rep.constants["c_omega_i"] = p.c_omega_i_report.value;
   rep.constants["residual_weight"] = p.residual_weight();
   rep.residual = p.c_o( variant ) * li + p.residual_weight() * we;

   const auto [fi, fe] = detail::flux_parts( p, v, y_i, y_e );
   rep.norms["flux_interior"] = fi;
   rep.norms["flux_exterior"] = fe;
   rep.flux = std::hypot( fi, fe );

   const int L = p.disc.band_limit;
   const SphereTrace j = jump( normal_trace( y_i, *p.Gamma_rule, L ), normal_trace( y_e, *p.Gamma_rule, L ) );
   detail::check_band_limit( p, j, "interface", rep );
   rep.norms["interface_jump_hm12"] = sobolev_norm( j, -0.5 );
   rep.constants["c_Gamma"] = p.c_Gamma_report.value;
   rep.interface = p.c_Gamma_report.value * rep.norms["interface_jump_hm12"];

   const SphereTrace d = boundary_mismatch( p, v );
   detail::check_band_limit( p, d, "boundary", rep );
   rep.norms["boundary_mismatch_h12"] = sobolev_norm( d, 0.5 );
   rep.constants["c_gamma"] = p.c_gamma_report.value;
   rep.boundary = boundary_term( p, v, p.disc.boundary );
   rep.finalize();
   return rep;
}

// ---------------------------------------------------------------------------
// Sweeps

/// An approximation v with a (possibly broken) flux and, when an oracle is
/// available, the true error.
struct Candidate
{
   ScalarField v;
   VectorField y_i;
   VectorField y_e;
   std::optional<double> true_error;
};

struct EstimateRequest
{
   EstimateKind kind = EstimateKind::I;
   CoVariant variant = CoVariant::eigen;
};

inline MajorantReport
evaluate( const Problem& p, const Candidate& c, EstimateRequest req )
{
   switch( req.kind )
   {
   case EstimateKind::I: return estimate_I( p, c.v, c.y_i, c.true_error );
   case EstimateKind::II: return estimate_II( p, c.v, c.y_i, req.variant, c.true_error );
   case EstimateKind::III: return estimate_III( p, c.v, c.y_i, c.y_e, req.variant, c.true_error );
   }
   fail( ErrorKind::invalid_argument, "evaluate: unknown estimate" );
}

struct SweepRow
{
   double parameter = 0.0;
   MajorantReport report;
};

/// One report per epsilon, in input order.
inline std::vector<SweepRow>
sweep( const Problem& p, const std::vector<double>& epsilons, const std::function<Candidate( double )>& family,
       EstimateRequest req )
{
   std::vector<SweepRow> rows;
   for( double eps : epsilons )
      rows.push_back( { eps, evaluate( p, family( eps ), req ) } );
   return rows;
}

/// One report per interface radius; the problem (and with it c_omega_i,
/// c_Gamma) is rebuilt for every R.
inline std::vector<SweepRow>
sweep_interface( const std::vector<double>& radii, const std::function<Problem( double )>& make_problem,
                 const std::function<Candidate( const Problem& )>& candidate, EstimateRequest req )
{
   std::vector<SweepRow> rows;
   for( double R : radii )
   {
      const Problem p = make_problem( R );
      rows.push_back( { R, evaluate( p, candidate( p ), req ) } );
   }
   return rows;
}

} // namespace exmaj
