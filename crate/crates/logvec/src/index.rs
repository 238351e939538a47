//! Index arithmetic mapping a global element index onto the chunked layout.
//!
//! Chunk `c` holds exactly `2^c` cells, so the cells preceding chunk `c`
//! number `2^c - 1`. Adding one to a global index therefore yields a value
//! whose highest set bit names the chunk and whose remaining low bits name
//! the offset inside it.

/// Position of an element inside the chunk directory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    /// Index of the chunk; the chunk holds `2^chunk` cells.
    pub chunk: usize,
    /// Cell index inside the chunk, `0 <= offset < 2^chunk`.
    pub offset: usize,
}

impl Location {
    /// The global index this location corresponds to.
    #[inline]
    pub fn global_index(self) -> usize {
        (1 << self.chunk) - 1 + self.offset
    }
}

/// Position of the most significant set bit of `x`.
///
/// `x` must be non-zero; the result satisfies `2^msb(x) <= x < 2^(msb(x)+1)`.
/// Zero is a contract violation and is only rejected in debug builds to keep
/// the lookup path branch-free.
#[inline]
pub fn msb(x: usize) -> usize {
    debug_assert!(x > 0, "msb of zero is undefined");
    (usize::BITS - 1 - x.leading_zeros()) as usize
}

/// Maps global index `i` to its (chunk, offset) location.
///
/// Pure arithmetic over the index word; bounds against the live element
/// count are the caller's responsibility.
#[inline]
pub fn locate(i: usize) -> Location {
    debug_assert!(i < usize::MAX, "index word overflow");
    let shifted = i + 1;
    let chunk = msb(shifted);
    Location {
        chunk,
        offset: shifted ^ (1 << chunk),
    }
}
