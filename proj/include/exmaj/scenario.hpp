// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

// Scenario configuration (JSON) and the command runners behind the CLI.
// Every runner returns its artifacts as strings plus the guarantee verdict,
// so the driver only writes files and sets the exit code.

#pragma once

#include "exmaj/manufactured.hpp"
#include "exmaj/minorant.hpp"
#include "exmaj/poincare.hpp"
#include "exmaj/report.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace exmaj
{

/// Slack of every guarantee check, relative to the report scale.
inline constexpr double kGuaranteeSlack = 1e-8;

struct ScenarioConfig
{
   std::string problem = "N3_harmonic";
   std::optional<double> interface_radius;
   Discretization disc;
   EstimateKind estimate = EstimateKind::I;
   CoVariant variant = CoVariant::eigen;

   struct Perturbation
   {
      PerturbTarget target = PerturbTarget::v;
      PerturbMode mode = PerturbMode::interior_bump;
      std::vector<double> epsilons; // empty: exact data
      std::uint64_t seed = 1;
   } perturbation;

   struct Minorant
   {
      int radial_count = 4;
      int max_degree = 2;
      double outer = 0.0;
      bool include_error = false; // add u - v to the basis (interior bump perturbations only)
   } minorant;

   struct Sweep
   {
      std::string parameter = "epsilon"; // epsilon | R
      std::vector<double> values;
   } sweep;

   struct Poincare
   {
      int samples = 100;
      BallRuleOptions rule;
   } poincare;

   double first_epsilon() const { return perturbation.epsilons.empty() ? 0.0 : perturbation.epsilons.front(); }
};

namespace detail
{

class ConfigReader
{
 public:
   ConfigReader( const Json& j, std::string path ) : j_( j ), path_( std::move( path ) )
   {
      require( j_.is_object(), ErrorKind::config, where() + ": expected an object" );
   }

   /// Rejects keys that no get() asked for.
   void finish() const
   {
      for( const auto& [k, v] : j_.items() )
         require( seen_.count( k ) > 0, ErrorKind::config, "config: unknown field '" + field( k ) + "'" );
   }

   bool has( const std::string& k ) const { return j_.contains( k ) && !j_.at( k ).is_null(); }

   template <class T>
   void get( const std::string& k, T& out )
   {
      seen_.insert( k );
      if( !has( k ) )
         return;
      const Json& v = j_.at( k );
      if constexpr( std::is_same_v<T, bool> )
      {
         require( v.is_boolean(), ErrorKind::config, "config: field '" + field( k ) + "' must be a boolean" );
         out = v.get<bool>();
      }
      else if constexpr( std::is_integral_v<T> )
      {
         require( v.is_number_integer(), ErrorKind::config, "config: field '" + field( k ) + "' must be an integer" );
         if constexpr( std::is_unsigned_v<T> )
            require( v.is_number_unsigned(), ErrorKind::config,
                     "config: field '" + field( k ) + "' must be non-negative" );
         out = v.get<T>();
      }
      else if constexpr( std::is_floating_point_v<T> )
      {
         require( v.is_number(), ErrorKind::config, "config: field '" + field( k ) + "' must be a number" );
         out = v.get<T>();
      }
      else if constexpr( std::is_same_v<T, std::string> )
      {
         require( v.is_string(), ErrorKind::config, "config: field '" + field( k ) + "' must be a string" );
         out = v.get<std::string>();
      }
      else
         static_assert( sizeof( T ) == 0, "unsupported config type" );
   }

   void get( const std::string& k, std::optional<double>& out )
   {
      double v = 0.0;
      get( k, v );
      if( has( k ) )
         out = v;
   }

   void get( const std::string& k, std::vector<double>& out )
   {
      seen_.insert( k );
      if( !has( k ) )
         return;
      const Json& v = j_.at( k );
      require( v.is_array(), ErrorKind::config, "config: field '" + field( k ) + "' must be an array of numbers" );
      out.clear();
      for( std::size_t i = 0; i < v.size(); ++i )
      {
         require( v[i].is_number(), ErrorKind::config,
                  "config: field '" + field( k ) + "[" + std::to_string( i ) + "]' must be a number" );
         out.push_back( v[i].get<double>() );
      }
   }

   /// Enum through its from_string; the message names the field.
   template <class E, class Parse>
   void get_enum( const std::string& k, E& out, Parse parse )
   {
      std::string s;
      get( k, s );
      if( !has( k ) )
         return;
      try
      {
         out = parse( s );
      }
      catch( const Error& e )
      {
         fail( ErrorKind::config, "config: field '" + field( k ) + "': " + e.what() );
      }
   }

   std::optional<ConfigReader> section( const std::string& k )
   {
      seen_.insert( k );
      if( !has( k ) )
         return std::nullopt;
      std::optional<ConfigReader> r;
      r.emplace( j_.at( k ), field( k ) );
      return r;
   }

   std::string field( const std::string& k ) const { return path_.empty() ? k : path_ + "." + k; }

 private:
   std::string where() const { return path_.empty() ? "config" : "config: field '" + path_ + "'"; }

   const Json& j_;
   std::string path_;
   std::set<std::string> seen_;
};

} // namespace detail

/// Parses and validates; every error names the offending field.
inline ScenarioConfig
parse_config( const Json& j )
{
   ScenarioConfig c;
   {
      detail::ConfigReader root( j, "" );
      if( auto s = root.section( "problem" ) )
      {
         s->get( "name", c.problem );
         s->get( "interface_radius", c.interface_radius );
         s->finish();
      }
      if( auto s = root.section( "discretization" ) )
      {
         s->get( "radial_order", c.disc.radial_order );
         s->get( "angular_order", c.disc.angular_order );
         s->get( "shells", c.disc.shells );
         s->get( "band_limit", c.disc.band_limit );
         s->get( "threads", c.disc.threads );
         s->get( "strict", c.disc.strict );
         s->finish();
      }
      if( auto s = root.section( "constants" ) )
      {
         s->get( "modes", c.disc.constant_modes );
         s->get( "mesh", c.disc.constant_mesh );
         s->get( "cutoff", c.disc.cutoff );
         s->get_enum( "boundary", c.disc.boundary, boundary_mode_from_string );
         s->get_enum( "variant", c.variant, co_variant_from_string );
         s->finish();
      }
      if( auto s = root.section( "estimate" ) )
      {
         s->get_enum( "kind", c.estimate, estimate_from_string );
         s->finish();
      }
      if( auto s = root.section( "perturbation" ) )
      {
         s->get_enum( "target", c.perturbation.target, perturb_target_from_string );
         s->get_enum( "mode", c.perturbation.mode, perturb_mode_from_string );
         s->get( "epsilons", c.perturbation.epsilons );
         s->get( "seed", c.perturbation.seed );
         s->finish();
      }
      if( auto s = root.section( "minorant" ) )
      {
         s->get( "radial_count", c.minorant.radial_count );
         s->get( "max_degree", c.minorant.max_degree );
         s->get( "outer", c.minorant.outer );
         s->get( "include_error", c.minorant.include_error );
         s->finish();
      }
      if( auto s = root.section( "sweep" ) )
      {
         s->get( "parameter", c.sweep.parameter );
         s->get( "values", c.sweep.values );
         s->finish();
      }
      if( auto s = root.section( "poincare" ) )
      {
         s->get( "samples", c.poincare.samples );
         s->get( "panels", c.poincare.rule.panels );
         s->get( "order", c.poincare.rule.order );
         s->get( "angular_order", c.poincare.rule.angular_order );
         s->finish();
      }
      root.finish();
   }

   const auto names = builtin_names();
   require( std::find( names.begin(), names.end(), c.problem ) != names.end(), ErrorKind::config,
            "config: field 'problem.name': unknown problem '" + c.problem + "'" );
   require( !c.interface_radius || std::isfinite( *c.interface_radius ), ErrorKind::config,
            "config: field 'problem.interface_radius' must be finite" );
   try
   {
      c.disc.validate();
   }
   catch( const Error& e )
   {
      fail( ErrorKind::config, std::string( "config: discretization/constants: " ) + e.what() );
   }
   for( double e : c.perturbation.epsilons )
      require( std::isfinite( e ) && e >= 0.0, ErrorKind::config,
               "config: field 'perturbation.epsilons' must hold non-negative numbers" );
   require( c.sweep.parameter == "epsilon" || c.sweep.parameter == "R", ErrorKind::config,
            "config: field 'sweep.parameter' must be 'epsilon' or 'R'" );
   for( double v : c.sweep.values )
      require( std::isfinite( v ) && v >= 0.0, ErrorKind::config,
               "config: field 'sweep.values' must hold non-negative numbers" );
   require( c.minorant.radial_count >= 1 && c.minorant.radial_count <= 32, ErrorKind::config,
            "config: field 'minorant.radial_count' must be in [1, 32]" );
   require( c.minorant.max_degree >= 0 && c.minorant.max_degree <= 8, ErrorKind::config,
            "config: field 'minorant.max_degree' must be in [0, 8]" );
   require( c.poincare.samples >= 1 && c.poincare.samples <= 100000, ErrorKind::config,
            "config: field 'poincare.samples' must be in [1, 100000]" );
   require( c.poincare.rule.panels >= 1 && c.poincare.rule.order >= 2 && c.poincare.rule.angular_order >= 2,
            ErrorKind::config, "config: poincare.panels >= 1, poincare.order >= 2, poincare.angular_order >= 2" );
   return c;
}

/// Reads a JSON file; parse errors keep nlohmann's line/column diagnostics.
inline ScenarioConfig
load_config( const std::string& path )
{
   std::ifstream f( path, std::ios::binary );
   require( static_cast<bool>( f ), ErrorKind::config, "config: cannot open '" + path + "'" );
   Json j;
   try
   {
      j = Json::parse( f );
   }
   catch( const nlohmann::json::parse_error& e )
   {
      fail( ErrorKind::config, "config: " + path + ": " + e.what() );
   }
   return parse_config( j );
}

/// The resolved configuration, echoed into reports.
inline Json
to_json( const ScenarioConfig& c )
{
   Json j;
   j["problem"] = { { "name", c.problem }, { "interface_radius", detail::number( c.interface_radius ) } };
   j["discretization"] = { { "radial_order", c.disc.radial_order }, { "angular_order", c.disc.angular_order },
                           { "shells", c.disc.shells },             { "band_limit", c.disc.band_limit },
                           { "threads", c.disc.threads },           { "strict", c.disc.strict } };
   j["constants"] = { { "modes", c.disc.constant_modes },
                      { "mesh", c.disc.constant_mesh },
                      { "cutoff", c.disc.cutoff },
                      { "boundary", to_string( c.disc.boundary ) },
                      { "variant", to_string( c.variant ) } };
   j["estimate"] = { { "kind", c.estimate == EstimateKind::I ? "I" : c.estimate == EstimateKind::II ? "II" : "III" } };
   Json eps = Json::array();
   for( double e : c.perturbation.epsilons )
      eps.push_back( e );
   j["perturbation"] = { { "target", to_string( c.perturbation.target ) },
                         { "mode", to_string( c.perturbation.mode ) },
                         { "epsilons", eps },
                         { "seed", c.perturbation.seed } };
   j["minorant"] = { { "radial_count", c.minorant.radial_count },
                     { "max_degree", c.minorant.max_degree },
                     { "outer", c.minorant.outer },
                     { "include_error", c.minorant.include_error } };
   Json values = Json::array();
   for( double v : c.sweep.values )
      values.push_back( v );
   j["sweep"] = { { "parameter", c.sweep.parameter }, { "values", values } };
   j["poincare"] = { { "samples", c.poincare.samples },
                     { "panels", c.poincare.rule.panels },
                     { "order", c.poincare.rule.order },
                     { "angular_order", c.poincare.rule.angular_order } };
   return j;
}

// ---------------------------------------------------------------------------
// Runners

struct GuaranteeCheck
{
   bool checked = false;
   bool pass = true;
   std::vector<std::string> violations;

   void expect( bool ok, const std::string& what )
   {
      checked = true;
      if( !ok )
      {
         pass = false;
         violations.push_back( what );
      }
   }

   Json json() const { return { { "checked", checked }, { "pass", pass }, { "violations", violations } }; }
};

struct CommandResult
{
   std::string file; // artifact name inside the output directory
   std::string content;
   GuaranteeCheck guarantee;
};

namespace detail
{

inline ManufacturedProblem
scenario_problem( const ScenarioConfig& c, std::optional<double> R = {} )
{
   return builtin( c.problem, c.disc, R ? R : c.interface_radius );
}

inline Candidate
scenario_candidate( const ScenarioConfig& c, const ManufacturedProblem& mp, double eps )
{
   return perturb( mp, exact_candidate( mp ), c.perturbation.target, eps, c.perturbation.mode, c.perturbation.seed );
}

inline void
check_majorant( GuaranteeCheck& g, const MajorantReport& r, const std::string& tag )
{
   if( !r.true_error )
      return;
   const double slack = kGuaranteeSlack * r.scale;
   g.expect( r.total + slack >= *r.true_error, tag + ": majorant " + format_number( r.total ) + " < true error " +
                                                   format_number( *r.true_error ) );
   if( const auto eff = r.efficiency_index() )
      g.expect( std::isfinite( *eff ) && *eff >= 1.0 - kGuaranteeSlack,
                tag + ": efficiency index " + format_number( *eff ) + " < 1" );
}

inline Json
header( const std::string& command, const ScenarioConfig& c )
{
   Json j;
   j["command"] = command;
   j["config"] = to_json( c );
   return j;
}

inline TestBasis
scenario_basis( const ScenarioConfig& c, const ManufacturedProblem& mp )
{
   TestBasis b = default_basis( mp.problem.domain, c.minorant.radial_count, c.minorant.max_degree, c.minorant.outer );
   if( !c.minorant.include_error )
      return b;
   const double eps = c.first_epsilon();
   require( c.perturbation.target == PerturbTarget::v && c.perturbation.mode == PerturbMode::interior_bump && eps > 0.0,
            ErrorKind::config,
            "config: field 'minorant.include_error' needs perturbation.target = v, mode = interior_bump and a "
            "positive epsilon" );
   // u - v = -eps * direction, supported in the annulus
   ScalarField e = -eps * perturbation_direction( mp, PerturbMode::interior_bump, c.perturbation.seed );
   e.label = "u - v";
   b.functions.push_back( e );
   b.support_radius = std::max( b.support_radius, mp.problem.domain.interface_radius );
   return b;
}

} // namespace detail

inline CommandResult
run_majorant( const ScenarioConfig& c )
{
   const auto mp = detail::scenario_problem( c );
   const auto cand = detail::scenario_candidate( c, mp, c.first_epsilon() );
   const auto rep = evaluate( mp.problem, cand, { c.estimate, c.variant } );
   CommandResult out{ "report.json", {}, {} };
   detail::check_majorant( out.guarantee, rep, "majorant" );
   Json j = detail::header( "majorant", c );
   j["epsilon"] = c.first_epsilon();
   j["report"] = to_json( rep );
   j["guarantee"] = out.guarantee.json();
   out.content = dump( j );
   return out;
}

inline CommandResult
run_minorant( const ScenarioConfig& c )
{
   const auto mp = detail::scenario_problem( c );
   const auto cand = detail::scenario_candidate( c, mp, c.first_epsilon() );
   const auto basis = detail::scenario_basis( c, mp );
   const auto rep = minorant( mp.problem, cand.v, basis );
   CommandResult out{ "report.json", {}, {} };
   const double scale = detail::energy_scale( mp.problem, cand.v, cand.true_error );
   if( cand.true_error )
   {
      const double te = *cand.true_error;
      out.guarantee.expect( rep.value <= te * te + kGuaranteeSlack * scale,
                            "minorant: " + format_number( rep.value ) + " exceeds squared true error " +
                                format_number( te * te ) );
   }
   Json j = detail::header( "minorant", c );
   j["epsilon"] = c.first_epsilon();
   j["true_error"] = detail::number( cand.true_error );
   j["report"] = to_json( rep );
   j["guarantee"] = out.guarantee.json();
   out.content = dump( j );
   return out;
}

inline CommandResult
run_sandwich( const ScenarioConfig& c )
{
   const auto mp = detail::scenario_problem( c );
   const auto cand = detail::scenario_candidate( c, mp, c.first_epsilon() );
   const auto basis = detail::scenario_basis( c, mp );
   const auto s = sandwich( mp.problem, cand.v, cand.y_i, basis, cand.true_error );
   CommandResult out{ "report.json", {}, {} };
   if( cand.true_error )
   {
      const double te = *cand.true_error, slack = kGuaranteeSlack * s.majorant.scale;
      out.guarantee.expect( s.lower <= te + slack, "sandwich: lower bound " + format_number( s.lower ) +
                                                       " exceeds true error " + format_number( te ) );
      out.guarantee.expect( te <= s.upper + slack, "sandwich: true error " + format_number( te ) +
                                                       " exceeds upper bound " + format_number( s.upper ) );
   }
   Json j = detail::header( "sandwich", c );
   j["epsilon"] = c.first_epsilon();
   j["report"] = to_json( s );
   j["guarantee"] = out.guarantee.json();
   out.content = dump( j );
   return out;
}

/// epsilon sweep over sweep.values (falling back to perturbation.epsilons),
/// or interface-radius sweep at the first perturbation epsilon.
inline CommandResult
run_sweep( const ScenarioConfig& c )
{
   CommandResult out{ "sweep.csv", {}, {} };
   std::vector<double> values = c.sweep.values;
   if( values.empty() && c.sweep.parameter == "epsilon" )
      values = c.perturbation.epsilons;
   require( !values.empty(), ErrorKind::config, "config: field 'sweep.values' is empty" );
   std::vector<SweepRow> rows;
   const EstimateRequest req{ c.estimate, c.variant };
   if( c.sweep.parameter == "epsilon" )
   {
      const auto mp = detail::scenario_problem( c );
      rows = sweep( mp.problem, values, [&]( double eps ) { return detail::scenario_candidate( c, mp, eps ); }, req );
   }
   else
   {
      for( double R : values )
      {
         const auto mp = detail::scenario_problem( c, R );
         rows.push_back( { R, evaluate( mp.problem, detail::scenario_candidate( c, mp, c.first_epsilon() ), req ) } );
      }
   }
   for( const auto& row : rows )
      detail::check_majorant( out.guarantee, row.report, "sweep " + c.sweep.parameter + "=" + format_number( row.parameter ) );
   std::ostringstream os;
   write_sweep_csv( os, rows );
   out.content = os.str();
   return out;
}

inline CommandResult
run_constants( const ScenarioConfig& c )
{
   const auto mp = detail::scenario_problem( c );
   const Problem& p = mp.problem;
   CommandResult out{ "constants.json", {}, {} };
   const int N = p.domain.dimension;
   const double formula = p.c_o( CoVariant::formula ), eigen = p.c_o( CoVariant::eigen );
   for( const ConstantReport* r : { &p.c_omega_i_report, &p.c_gamma_report, &p.c_Gamma_report } )
   {
      out.guarantee.expect( std::isfinite( r->value ) && r->value > 0.0, r->name + " is not positive" );
      out.guarantee.expect( r->relative_accuracy <= 1e-6,
                            r->name + " refinement delta " + format_number( r->relative_accuracy ) + " > 1e-6" );
      if( !r->mode_values.empty() )
      {
         const auto [lo, hi] = std::minmax_element( r->mode_values.begin(), r->mode_values.end() );
         const bool in_range = r->extremal_index >= 0 && std::size_t( r->extremal_index ) < r->mode_values.size();
         const double at = in_range ? r->mode_values[std::size_t( r->extremal_index )] : 0.0;
         out.guarantee.expect( in_range && ( at == *lo || at == *hi ),
                               r->name + " extremal index does not attain the extremum" );
      }
   }
   out.guarantee.expect( formula >= p.c_omega_i_report.value / std::sqrt( p.A.c_A ),
                         "c_o formula " + format_number( formula ) + " is below c_Omega_i/sqrt(c_A)" );
   Json j = detail::header( "constants", c );
   j["c_N"] = c_N( N );
   j["c_A"] = p.A.c_A;
   j["c_A_plus"] = p.A.c_A_plus;
   j["c_o_formula"] = formula;
   j["c_o_eigen"] = eigen;
   j["residual_weight"] = p.residual_weight();
   j["reports"] = Json::array( { to_json( p.c_omega_i_report ), to_json( p.c_gamma_report ),
                                 to_json( p.c_Gamma_report ) } );
   j["guarantee"] = out.guarantee.json();
   out.content = dump( j );
   return out;
}

inline CommandResult
run_verify_poincare( const ScenarioConfig& c )
{
   PoincareSuiteOptions opt;
   opt.seed = c.perturbation.seed;
   opt.samples = c.poincare.samples;
   opt.threads = c.disc.threads;
   opt.rule = c.poincare.rule;
   const auto records = poincare_suite( opt );
   CommandResult out{ "poincare.csv", {}, {} };
   for( const auto& r : records )
      out.guarantee.expect( r.pass, r.id + " (N=" + std::to_string( r.N ) + ", beta=" + format_number( r.beta ) +
                                        ") on " + r.descriptor + ": lhs " + format_number( r.lhs ) + " rhs " +
                                        format_number( r.rhs ) );
   std::ostringstream os;
   write_poincare_csv( os, records );
   out.content = os.str();
   return out;
}

inline const std::vector<std::string>&
command_names()
{
   static const std::vector<std::string> names{ "verify-poincare", "constants", "majorant",
                                                "minorant",        "sandwich",  "sweep" };
   return names;
}

inline CommandResult
run_command( const std::string& command, const ScenarioConfig& c )
{
   if( command == "verify-poincare" )
      return run_verify_poincare( c );
   if( command == "constants" )
      return run_constants( c );
   if( command == "majorant" )
      return run_majorant( c );
   if( command == "minorant" )
      return run_minorant( c );
   if( command == "sandwich" )
      return run_sandwich( c );
   if( command == "sweep" )
      return run_sweep( c );
   fail( ErrorKind::config, "unknown command '" + command + "'" );
}

} // namespace exmaj
