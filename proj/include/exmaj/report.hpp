// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

// JSON and CSV serialization. Numbers are written with 17 significant digits
// and '.' as decimal separator, lines end in LF, maps in key order, so equal
// inputs give byte-identical files.

#pragma once

#include "exmaj/majorant.hpp"
#include "exmaj/minorant.hpp"
#include "exmaj/poincare.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace exmaj
{

using Json = nlohmann::ordered_json;

/// %.17g; nan and inf spelled out.
inline std::string
format_number( double x )
{
   if( std::isnan( x ) )
      return "nan";
   if( std::isinf( x ) )
      return x > 0 ? "inf" : "-inf";
   char buf[32];
   std::snprintf( buf, sizeof buf, "%.17g", x );
   return buf;
}

namespace detail
{

/// JSON has no nan/inf; those become null.
inline Json
number( double x )
{
   return std::isfinite( x ) ? Json( x ) : Json( nullptr );
}

inline Json
number( const std::optional<double>& x )
{
   return x ? number( *x ) : Json( nullptr );
}

template <class T>
Json
object( const std::map<std::string, T>& m )
{
   Json j = Json::object();
   for( const auto& [k, v] : m )
   {
      if constexpr( std::is_same_v<T, double> )
         j[k] = number( v );
      else
         j[k] = v;
   }
   return j;
}

} // namespace detail

inline Json
to_json( const ConstantReport& c )
{
   Json j;
   j["name"] = c.name;
   j["value"] = detail::number( c.value );
   j["method"] = c.method;
   Json modes = Json::array();
   for( double v : c.mode_values )
      modes.push_back( detail::number( v ) );
   j["mode_values"] = modes;
   j["extremal_index"] = c.extremal_index;
   j["discretization"] = detail::object( c.discretization );
   j["relative_accuracy"] = detail::number( c.relative_accuracy );
   return j;
}

inline Json
to_json( const MajorantReport& r )
{
   Json j;
   j["estimate"] = r.estimate;
   j["terms"] = { { "residual", detail::number( r.residual ) },
                  { "flux", detail::number( r.flux ) },
                  { "interface", detail::number( r.interface ) },
                  { "boundary", detail::number( r.boundary ) } };
   j["total"] = detail::number( r.total );
   j["true_error"] = detail::number( r.true_error );
   j["efficiency_index"] = detail::number( r.efficiency_index() );
   j["scale"] = detail::number( r.scale );
   j["norms"] = detail::object( r.norms );
   j["constants"] = detail::object( r.constants );
   j["tolerances"] = detail::object( r.tolerances );
   j["options"] = detail::object( r.options );
   j["notes"] = r.notes;
   return j;
}

inline Json
to_json( const MinorantReport& m )
{
   Json j;
   j["value"] = detail::number( m.value );
   j["sqrt_value"] = detail::number( std::sqrt( m.value ) );
   j["optimum"] = detail::number( m.optimum );
   j["direct"] = detail::number( m.direct );
   Json c = Json::array();
   for( double v : m.coefficients )
      c.push_back( detail::number( v ) );
   j["coefficients"] = c;
   j["basis_size"] = m.basis_size;
   j["gram_min_eigenvalue"] = detail::number( m.gram_min_eigenvalue );
   j["gram_max_eigenvalue"] = detail::number( m.gram_max_eigenvalue );
   j["boundary_mismatch_h12"] = detail::number( m.boundary_mismatch );
   j["interior_only"] = m.interior_only;
   return j;
}

inline Json
to_json( const Sandwich& s )
{
   Json j;
   j["lower"] = detail::number( s.lower );
   j["true_error"] = detail::number( s.majorant.true_error );
   j["upper"] = detail::number( s.upper );
   j["minorant"] = to_json( s.minorant );
   j["majorant"] = to_json( s.majorant );
   return j;
}

inline Json
to_json( const VerificationRecord& r )
{
   return { { "id", r.id },           { "N", r.N },         { "beta", detail::number( r.beta ) },
            { "descriptor", r.descriptor }, { "lhs", detail::number( r.lhs ) }, { "rhs", detail::number( r.rhs ) },
            { "margin", detail::number( r.margin ) }, { "identity", r.identity }, { "pass", r.pass } };
}

/// Two-space indented JSON with a trailing LF.
inline std::string
dump( const Json& j )
{
   return j.dump( 2 ) + "\n";
}

/// id,N,beta,lhs,rhs,margin,pass
inline void
write_poincare_csv( std::ostream& os, const std::vector<VerificationRecord>& records )
{
   os << "id,N,beta,lhs,rhs,margin,pass\n";
   for( const auto& r : records )
      os << r.id << ',' << r.N << ',' << format_number( r.beta ) << ',' << format_number( r.lhs ) << ','
         << format_number( r.rhs ) << ',' << format_number( r.margin ) << ',' << ( r.pass ? "true" : "false" ) << '\n';
}

/// epsilon_or_R,residual,flux,interface,boundary,total,true_error,efficiency_index;
/// a missing true error leaves the last two cells empty.
inline void
write_sweep_csv( std::ostream& os, const std::vector<SweepRow>& rows )
{
   os << "epsilon_or_R,residual,flux,interface,boundary,total,true_error,efficiency_index\n";
   for( const auto& row : rows )
   {
      const auto& r = row.report;
      const auto eff = r.efficiency_index();
      os << format_number( row.parameter ) << ',' << format_number( r.residual ) << ',' << format_number( r.flux )
         << ',' << format_number( r.interface ) << ',' << format_number( r.boundary ) << ','
         << format_number( r.total ) << ',' << ( r.true_error ? format_number( *r.true_error ) : "" ) << ','
         << ( eff ? format_number( *eff ) : "" ) << '\n';
   }
}

/// Binary mode, so no newline translation.
inline void
write_file( const std::string& path, const std::string& content )
{
   std::ofstream f( path, std::ios::binary | std::ios::trunc );
   require( static_cast<bool>( f ), ErrorKind::io, "cannot open '" + path + "' for writing" );
   f << content;
   require( static_cast<bool>( f ), ErrorKind::io, "failed writing '" + path + "'" );
}

} // namespace exmaj
