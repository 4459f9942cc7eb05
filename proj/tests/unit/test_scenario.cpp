// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#include "catch_amalgamated.hpp"

#include "exmaj/scenario.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace exmaj;
using Catch::Matchers::ContainsSubstring;

namespace
{

/// Message of the config error raised by parse_config(j).
std::string
config_error( const Json& j )
{
   try
   {
      parse_config( j );
   }
   catch( const Error& e )
   {
      CHECK( e.kind() == ErrorKind::config );
      return e.what();
   }
   FAIL( "config accepted: " << j.dump() );
   return {};
}

std::vector<std::string>
lines( const std::string& s )
{
   std::vector<std::string> out;
   std::istringstream in( s );
   for( std::string l; std::getline( in, l ); )
      out.push_back( l );
   return out;
}

} // namespace

TEST_CASE( "config round trip", "[scenario]" )
{
   const Json j = Json::parse( R"({
      "problem": { "name": "N3_decay", "interface_radius": 2.5 },
      "discretization": { "radial_order": 12, "angular_order": 6, "shells": 4, "band_limit": 4, "threads": 2 },
      "constants": { "modes": 6, "mesh": 32, "cutoff": 2.0, "boundary": "constant_based", "variant": "formula" },
      "estimate": { "kind": "III" },
      "perturbation": { "target": "y_broken", "mode": "interface_jump", "epsilons": [0.1, 0.01], "seed": 9 },
      "minorant": { "radial_count": 3, "max_degree": 1, "outer": 3.0, "include_error": false },
      "sweep": { "parameter": "R", "values": [1.5, 2.0] },
      "poincare": { "samples": 7, "panels": 4, "order": 8, "angular_order": 8 }
   })" );
   const auto c = parse_config( j );
   CHECK( c.problem == "N3_decay" );
   CHECK( *c.interface_radius == 2.5 );
   CHECK( c.disc.threads == 2u );
   CHECK( c.disc.boundary == BoundaryMode::constant_based );
   CHECK( c.variant == CoVariant::formula );
   CHECK( c.estimate == EstimateKind::III );
   CHECK( c.perturbation.epsilons == std::vector<double>{ 0.1, 0.01 } );
   CHECK( c.poincare.rule.order == 8 );
   // the echoed config parses back to itself
   CHECK( to_json( parse_config( to_json( c ) ) ) == to_json( c ) );
   CHECK( to_json( parse_config( Json::object() ) ) == to_json( ScenarioConfig{} ) );
}

TEST_CASE( "config diagnostics name the field", "[scenario]" )
{
   CHECK_THAT( config_error( Json::parse( R"({"problem": {"name": "N5"}})" ) ),
               ContainsSubstring( "problem.name" ) );
   CHECK_THAT( config_error( Json::parse( R"({"problem": {"nmae": "N3_decay"}})" ) ),
               ContainsSubstring( "problem.nmae" ) );
   CHECK_THAT( config_error( Json::parse( R"({"discretisation": {}})" ) ), ContainsSubstring( "discretisation" ) );
   CHECK_THAT( config_error( Json::parse( R"({"discretization": {"shells": "eight"}})" ) ),
               ContainsSubstring( "discretization.shells" ) );
   CHECK_THAT( config_error( Json::parse( R"({"discretization": {"radial_order": 0}})" ) ),
               ContainsSubstring( "radial_order" ) );
   CHECK_THAT( config_error( Json::parse( R"({"discretization": {"threads": -1}})" ) ),
               ContainsSubstring( "discretization.threads" ) );
   CHECK_THAT( config_error( Json::parse( R"({"estimate": {"kind": "IV"}})" ) ),
               ContainsSubstring( "estimate.kind" ) );
   CHECK_THAT( config_error( Json::parse( R"({"perturbation": {"epsilons": [0.1, "x"]}})" ) ),
               ContainsSubstring( "perturbation.epsilons[1]" ) );
   CHECK_THAT( config_error( Json::parse( R"({"perturbation": {"epsilons": [-0.1]}})" ) ),
               ContainsSubstring( "perturbation.epsilons" ) );
   CHECK_THAT( config_error( Json::parse( R"({"sweep": {"parameter": "a"}})" ) ),
               ContainsSubstring( "sweep.parameter" ) );
   CHECK_THAT( config_error( Json::parse( R"({"minorant": {"include_error": 1}})" ) ),
               ContainsSubstring( "minorant.include_error" ) );
   CHECK_THAT( config_error( Json::parse( R"({"poincare": {"samples": 0}})" ) ),
               ContainsSubstring( "poincare.samples" ) );
   CHECK_THAT( config_error( Json::parse( R"([1, 2])" ) ), ContainsSubstring( "expected an object" ) );
}

TEST_CASE( "config files", "[scenario]" )
{
   const auto dir = std::filesystem::temp_directory_path() / "exmaj_test_scenario";
   std::filesystem::create_directories( dir );
   const auto bad = ( dir / "bad.json" ).string();
   {
      std::ofstream f( bad );
      f << "{\n  \"problem\": { \"name\": \"N3_decay\" \n}\n";
   }
   try
   {
      load_config( bad );
      FAIL( "broken JSON accepted" );
   }
   catch( const Error& e )
   {
      CHECK( e.kind() == ErrorKind::config );
      CHECK_THAT( std::string( e.what() ), ContainsSubstring( "line" ) );
   }
   CHECK_THROWS_AS( load_config( ( dir / "missing.json" ).string() ), Error );
   std::filesystem::remove_all( dir );
}

TEST_CASE( "number and CSV formatting", "[scenario]" )
{
   CHECK( format_number( 0.1 ) == "0.10000000000000001" );
   CHECK( format_number( 1.0 ) == "1" );
   CHECK( format_number( 1.0 / 3.0 ) == "0.33333333333333331" );
   // 17 significant digits round-trip every double
   std::mt19937_64 gen( 5 );
   std::uniform_real_distribution<double> mant( -1.0, 1.0 );
   std::uniform_int_distribution<int> ex( -300, 300 );
   for( int k = 0; k < 1000; ++k )
   {
      const double x = std::ldexp( mant( gen ), ex( gen ) );
      CHECK( std::stod( format_number( x ) ) == x );
   }
   CHECK( format_number( std::nan( "" ) ) == "nan" );
   CHECK( format_number( -INFINITY ) == "-inf" );
   CHECK( dump( Json{ { "x", detail::number( INFINITY ) } } ) == "{\n  \"x\": null\n}\n" );

   std::ostringstream pc;
   write_poincare_csv( pc, { inequality_record( "lemma_i", 3, 0.5, "d", 1.0, 2.0 ) } );
   CHECK( pc.str() == "id,N,beta,lhs,rhs,margin,pass\nlemma_i,3,0.5,1,2,1,true\n" );

   MajorantReport r;
   r.residual = 1.0;
   r.flux = 0.5;
   r.finalize();
   std::ostringstream sw;
   write_sweep_csv( sw, { { 0.1, r } } );
   CHECK( sw.str() ==
          "epsilon_or_R,residual,flux,interface,boundary,total,true_error,efficiency_index\n"
          "0.10000000000000001,1,0.5,0,0,1.5,,\n" );
}

TEST_CASE( "commands", "[scenario]" )
{
   const auto& names = command_names();
   CHECK( names.size() == 6 );
   CHECK_THROWS_AS( run_command( "plot", parse_config( Json::object() ) ), Error );

   // exact data on the harmonic problem: zero report, guarantee holds
   const auto res = run_command( "majorant", parse_config( Json::object() ) );
   CHECK( res.file == "report.json" );
   CHECK( res.guarantee.pass );
   const auto j = Json::parse( res.content );
   CHECK( j["report"]["total"] == 0.0 );
   CHECK( j["report"]["estimate"] == "I" );
   CHECK( res.content.back() == '\n' );
   CHECK( res.content.find( '\r' ) == std::string::npos );

   // eps sweep: efficiency index >= 1 in every row
   const auto sw = run_command( "sweep", parse_config( Json::parse( R"({
      "perturbation": { "target": "v", "mode": "boundary_mode", "seed": 11 },
      "sweep": { "parameter": "epsilon", "values": [0.1, 0.05, 0.025] } })" ) ) );
   CHECK( sw.file == "sweep.csv" );
   CHECK( sw.guarantee.pass );
   const auto rows = lines( sw.content );
   REQUIRE( rows.size() == 4 );
   for( std::size_t k = 1; k < rows.size(); ++k )
   {
      const double eff = std::stod( rows[k].substr( rows[k].rfind( ',' ) + 1 ) );
      CHECK( eff >= 1.0 );
   }
}

TEST_CASE( "guarantee bookkeeping", "[scenario]" )
{
   GuaranteeCheck g;
   CHECK( !g.checked );
   g.expect( true, "fine" );
   CHECK( g.pass );
   g.expect( false, "broken" );
   CHECK( !g.pass );
   CHECK( g.violations == std::vector<std::string>{ "broken" } );
   CHECK( g.json()["pass"] == false );
}
