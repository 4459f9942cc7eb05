// Copyright The exmaj Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace exmaj
{

/// Neumaier-compensated accumulator. The running error term is kept
/// separately and folded in only on read.
class CompensatedSum
{
 public:
   CompensatedSum() = default;

   void
   add( double x )
   {
      const double t = sum_ + x;
      if( std::abs( sum_ ) >= std::abs( x ) )
         comp_ += ( sum_ - t ) + x;
      else
         comp_ += ( x - t ) + sum_;
      sum_ = t;
   }

   void
   merge( const CompensatedSum& other )
   {
      add( other.sum_ );
      add( other.comp_ );
   }

   double
   value() const
   {
      return sum_ + comp_;
   }

 private:
   double sum_ = 0.0;
   double comp_ = 0.0;
};

inline constexpr std::size_t kReductionBlock = 2048;

/// Deterministic reduction of term(0) + ... + term(n-1).
///
/// Terms are grouped into fixed blocks of kReductionBlock indices, each block
/// is summed with a CompensatedSum in index order, and the block partials are
/// merged in block order. Worker threads only change who evaluates a block, so
/// the result is bit-identical for every thread count.
template <typename Term>
double
reduce_terms( std::size_t n, Term&& term, unsigned threads = 1 )
{
   const std::size_t nblocks = ( n + kReductionBlock - 1 ) / kReductionBlock;
   std::vector<CompensatedSum> partial( nblocks );
   std::vector<std::exception_ptr> errors( nblocks );

   auto run_block = [&]( std::size_t b ) {
      const std::size_t lo = b * kReductionBlock;
      const std::size_t hi = std::min( n, lo + kReductionBlock );
      CompensatedSum s;
      try
      {
         for( std::size_t i = lo; i < hi; ++i )
            s.add( term( i ) );
      }
      catch( ... )
      {
         errors[b] = std::current_exception();
      }
      partial[b] = s;
   };

   threads = std::max( 1u, std::min<unsigned>( threads, static_cast<unsigned>( nblocks ) ) );
   if( threads <= 1 )
   {
      for( std::size_t b = 0; b < nblocks; ++b )
         run_block( b );
   }
   else
   {
      std::vector<std::jthread> pool;
      pool.reserve( threads );
      for( unsigned t = 0; t < threads; ++t )
         pool.emplace_back( [&, t] {
            for( std::size_t b = t; b < nblocks; b += threads )
               run_block( b );
         } );
   }

   // lowest failing block wins, independent of scheduling
   for( const auto& e : errors )
      if( e )
         std::rethrow_exception( e );

   CompensatedSum total;
   for( const auto& p : partial )
      total.merge( p );
   return total.value();
}

} // namespace exmaj
