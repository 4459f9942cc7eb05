// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace exmaj
{

enum class ErrorKind
{
   invalid_argument,
   non_finite,
   precondition,
   numerical,
   config,
   io
};

class Error : public std::runtime_error
{
 public:
   Error( ErrorKind kind, const std::string& what )
       : std::runtime_error( what ), kind_( kind )
   {
   }

   ErrorKind
   kind() const noexcept
   {
      return kind_;
   }

 private:
   ErrorKind kind_;
};

[[noreturn]] inline void
fail( ErrorKind kind, const std::string& what )
{
   throw Error( kind, what );
}

inline void
require( bool condition, ErrorKind kind, const std::string& what )
{
   if( !condition )
      fail( kind, what );
}

} // namespace exmaj
