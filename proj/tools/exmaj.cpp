// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

// exmaj <command> [--config FILE] [--seed N] [--strict] [--out DIR]
//
// Exit status: 0 all guarantee checks passed, 1 a guarantee was violated,
// 2 configuration or usage error, 3 any other failure.

#include "exmaj/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>

namespace
{

struct Flags
{
   std::string config;
   std::optional<std::uint64_t> seed;
   bool strict = false;
   std::string out = ".";
};

int
run( const std::string& command, const Flags& flags )
{
   using namespace exmaj;
   try
   {
      ScenarioConfig cfg = flags.config.empty() ? parse_config( Json::object() ) : load_config( flags.config );
      if( flags.seed )
         cfg.perturbation.seed = *flags.seed;
      if( flags.strict )
         cfg.disc.strict = true;

      const CommandResult res = run_command( command, cfg );
      std::error_code ec;
      std::filesystem::create_directories( flags.out, ec );
      require( !ec, ErrorKind::io, "cannot create output directory '" + flags.out + "': " + ec.message() );
      const std::string path = ( std::filesystem::path( flags.out ) / res.file ).string();
      write_file( path, res.content );

      for( const auto& v : res.guarantee.violations )
         std::cerr << "violation: " << v << "\n";
      std::cout << command << ": wrote " << path << "; guarantees "
                << ( !res.guarantee.checked ? "not applicable" : res.guarantee.pass ? "pass" : "FAIL" ) << "\n";
      return res.guarantee.pass ? 0 : 1;
   }
   catch( const Error& e )
   {
      std::cerr << "error: " << e.what() << "\n";
      return e.kind() == ErrorKind::config ? 2 : 3;
   }
   catch( const std::exception& e )
   {
      std::cerr << "error: " << e.what() << "\n";
      return 3;
   }
}

} // namespace

int
main( int argc, char** argv )
{
   CLI::App app{ "Functional error majorants for exterior elliptic problems" };
   app.require_subcommand( 1 );
   Flags flags;
   std::string chosen;
   const std::map<std::string, std::string> about{
      { "verify-poincare", "run the Poincare-type inequality suite, write poincare.csv" },
      { "constants", "compute the estimate constants, write constants.json" },
      { "majorant", "upper bound for one perturbed candidate, write report.json" },
      { "minorant", "lower bound for one perturbed candidate, write report.json" },
      { "sandwich", "lower bound, true error and upper bound, write report.json" },
      { "sweep", "majorant over epsilon or interface radius values, write sweep.csv" },
   };
   for( const auto& name : exmaj::command_names() )
   {
      auto* sub = app.add_subcommand( name, about.at( name ) );
      sub->add_option( "--config", flags.config, "JSON scenario file" )->check( CLI::ExistingFile );
      sub->add_option( "--seed", flags.seed, "perturbation / sampling seed" );
      sub->add_flag( "--strict", flags.strict, "fail when boundary data exceed the band limit" );
      sub->add_option( "--out", flags.out, "output directory" );
      sub->callback( [&chosen, name] { chosen = name; } );
   }
   try
   {
      app.parse( argc, argv );
   }
   catch( const CLI::ParseError& e )
   {
      const int code = app.exit( e );
      return code == 0 ? 0 : 2;
   }
   return run( chosen, flags );
}
