//! The log-chunked resizable array.

use std::fmt;
use std::mem::MaybeUninit;
use std::ptr;

use crate::index::{locate, Location};
use crate::iter::{Cursor, CursorMut, Iter};
use crate::stats::{AllocObserver, NoopObserver};

/// Default directory size: one slot per chunk, enough to exhaust the index
/// word. Capacity is `2^MAX_CHUNKS - 1` elements.
pub const DEFAULT_MAX_CHUNKS: usize = (usize::BITS - 1) as usize;

/// Fixed-length table of chunk handles. Slot `c`, when allocated, owns a
/// block of exactly `2^c` cells.
struct ChunkDirectory<T, const MAX_CHUNKS: usize> {
    slots: [Option<Box<[MaybeUninit<T>]>>; MAX_CHUNKS],
}

impl<T, const MAX_CHUNKS: usize> ChunkDirectory<T, MAX_CHUNKS> {
    fn empty() -> Self {
        Self {
            slots: [const { None }; MAX_CHUNKS],
        }
    }

    fn allocate(&mut self, chunk: usize) {
        debug_assert!(self.slots[chunk].is_none());
        self.slots[chunk] = Some(Box::new_uninit_slice(1 << chunk));
    }

    /// Frees the block without dropping cell contents; the caller must have
    /// taken or dropped every initialized element first.
    fn release(&mut self, chunk: usize) {
        debug_assert!(self.slots[chunk].is_some());
        self.slots[chunk] = None;
    }

    #[inline]
    fn chunk(&self, chunk: usize) -> &[MaybeUninit<T>] {
        self.slots[chunk].as_deref().expect("chunk not allocated")
    }

    #[inline]
    fn chunk_mut(&mut self, chunk: usize) -> &mut [MaybeUninit<T>] {
        self.slots[chunk]
            .as_deref_mut()
            .expect("chunk not allocated")
    }
}

/// A resizable array that stores elements in chunks of doubling size
/// (1, 2, 4, 8, ... cells) reached through a fixed directory.
///
/// Growing never moves an element: a full container allocates the next
/// power-of-two chunk and keeps writing. Element lookup is constant time,
/// one most-significant-bit step plus an xor. Popping below a chunk
/// boundary keeps one spare chunk around so that alternating push/pop at
/// the boundary does not thrash the allocator; at most `4n - 1` cells are
/// allocated while `n` elements are live.
///
/// The observer parameter `O` receives chunk allocation and release events;
/// the default [`NoopObserver`] costs nothing. `MAX_CHUNKS` bounds the
/// directory, giving a capacity of `2^MAX_CHUNKS - 1` elements.
pub struct LogVector<T, O: AllocObserver = NoopObserver, const MAX_CHUNKS: usize = DEFAULT_MAX_CHUNKS>
{
    len: usize,
    chunks: usize,
    active_chunks: usize,
    directory: ChunkDirectory<T, MAX_CHUNKS>,
    observer: O,
}

// Invariants, maintained by every operation:
// - chunks == active_chunks || chunks == active_chunks + 1
// - chunks >= 1; chunk 0 is never released while the container lives
// - len == 0 <=> active_chunks == 0
// - chunks [0, active_chunks - 1) are fully filled; chunk (active_chunks - 1)
//   holds the tail
// - cells at global index < len are initialized, all other cells are not

impl<T, const MAX_CHUNKS: usize> LogVector<T, NoopObserver, MAX_CHUNKS> {
    /// Creates an empty container. Chunk 0 is allocated up front, so an
    /// empty container owns exactly one cell.
    pub fn new() -> Self {
        Self::new_with_observer(NoopObserver)
    }

    /// Creates a container of `n` copies of `value`, filling chunk by chunk.
    pub fn with_size(n: usize, value: T) -> Self
    where
        T: Clone,
    {
        Self::with_size_and_observer(n, value, NoopObserver)
    }
}

impl<T, O: AllocObserver, const MAX_CHUNKS: usize> LogVector<T, O, MAX_CHUNKS> {
    const VALID: () = assert!(
        MAX_CHUNKS >= 1 && MAX_CHUNKS < usize::BITS as usize,
        "MAX_CHUNKS must be in 1..usize::BITS"
    );

    /// Largest representable element count, `2^MAX_CHUNKS - 1`.
    pub const MAX_LEN: usize = (1 << MAX_CHUNKS) - 1;

    /// Creates an empty container reporting chunk traffic to `observer`.
    pub fn new_with_observer(observer: O) -> Self {
        let () = Self::VALID;
        let mut directory = ChunkDirectory::empty();
        directory.allocate(0);
        observer.on_alloc(0);
        Self {
            len: 0,
            chunks: 1,
            active_chunks: 0,
            directory,
            observer,
        }
    }

    /// Creates a filled, instrumented container; see [`LogVector::with_size`].
    pub fn with_size_and_observer(n: usize, value: T, observer: O) -> Self
    where
        T: Clone,
    {
        assert!(n <= Self::MAX_LEN, "capacity overflow: {n} elements");
        let mut v = Self::new_with_observer(observer);
        if n == 0 {
            return v;
        }
        let want = ceil_log2(n + 1);
        for c in 1..want {
            v.directory.allocate(c);
            v.observer.on_alloc(c);
        }
        v.chunks = want;
        v.active_chunks = want;
        let mut remaining = n;
        for c in 0..want {
            let take = remaining.min(1 << c);
            for cell in &mut v.directory.chunk_mut(c)[..take] {
                cell.write(value.clone());
            }
            remaining -= take;
        }
        v.len = n;
        v
    }

    /// Number of live elements.
    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Cells currently allocated across all chunks: `2^chunks - 1`.
    pub fn allocated_cells(&self) -> usize {
        (1 << self.chunks) - 1
    }

    /// Number of allocated chunks (including a deactivated spare, if any).
    pub fn chunk_count(&self) -> usize {
        self.chunks
    }

    /// Number of chunks holding at least one live element.
    pub fn active_chunk_count(&self) -> usize {
        self.active_chunks
    }

    #[inline]
    fn cell(&self, loc: Location) -> &MaybeUninit<T> {
        &self.directory.chunk(loc.chunk)[loc.offset]
    }

    /// Shared access to the element at global index `i`, if in bounds.
    #[inline]
    pub fn get(&self, i: usize) -> Option<&T> {
        if i < self.len {
            // Cells below len are initialized.
            Some(unsafe { self.cell(locate(i)).assume_init_ref() })
        } else {
            None
        }
    }

    /// Mutable access to the element at global index `i`, if in bounds.
    #[inline]
    pub fn get_mut(&mut self, i: usize) -> Option<&mut T> {
        if i < self.len {
            let loc = locate(i);
            Some(unsafe { self.directory.chunk_mut(loc.chunk)[loc.offset].assume_init_mut() })
        } else {
            None
        }
    }

    pub fn front(&self) -> Option<&T> {
        self.get(0)
    }

    pub fn back(&self) -> Option<&T> {
        self.get(self.len.checked_sub(1)?)
    }

    /// Appends an element. Never moves existing elements; at most one chunk
    /// is allocated, and only when no deactivated spare is available.
    pub fn push_back(&mut self, value: T) {
        assert!(self.len < Self::MAX_LEN, "capacity overflow");
        if self.len == (1 << self.active_chunks) - 1 {
            // Active chunks are exactly full: bring in the spare chunk, or
            // allocate the next one if there is no spare.
            if self.chunks == self.active_chunks {
                self.directory.allocate(self.chunks);
                self.observer.on_alloc(self.chunks);
                self.chunks += 1;
            }
            self.active_chunks += 1;
            self.directory.chunk_mut(self.active_chunks - 1)[0].write(value);
        } else {
            let offset = self.len - ((1 << (self.active_chunks - 1)) - 1);
            self.directory.chunk_mut(self.active_chunks - 1)[offset].write(value);
        }
        self.len += 1;
    }

    /// Removes and returns the last element, or `None` when empty.
    ///
    /// When the pop empties the top active chunk, that chunk is kept as the
    /// deactivated spare and the previous spare, if any, is released. Chunk 0
    /// is never released.
    pub fn pop_back(&mut self) -> Option<T> {
        if self.len == 0 {
            return None;
        }
        let loc = locate(self.len - 1);
        // The last cell is initialized; reading it out leaves it vacant.
        let value = unsafe { self.cell(loc).assume_init_read() };
        if self.len == 1 << (self.active_chunks - 1) {
            // The top active chunk just emptied. Release the old spare
            // before deactivating, keeping at most one spare around.
            if self.chunks == self.active_chunks + 1 {
                self.directory.release(self.chunks - 1);
                self.observer.on_free(self.chunks - 1);
                self.chunks -= 1;
            }
            self.active_chunks -= 1;
        }
        self.len -= 1;
        Some(value)
    }

    /// Drops all elements and releases every chunk except chunk 0.
    pub fn clear(&mut self) {
        self.drop_initialized();
        self.active_chunks = 0;
        while self.chunks > 1 {
            self.directory.release(self.chunks - 1);
            self.observer.on_free(self.chunks - 1);
            self.chunks -= 1;
        }
    }

    /// Iterator over the elements in index order.
    pub fn iter(&self) -> Iter<'_, T, O, MAX_CHUNKS> {
        Iter::new(self)
    }

    /// Cursor positioned at global index `g`; `g == len()` is the
    /// past-the-end position.
    pub fn cursor_at(&self, g: usize) -> Cursor<'_, T, O, MAX_CHUNKS> {
        assert!(g <= self.len, "cursor index {g} out of range");
        Cursor::new(self, locate(g))
    }

    /// Mutable cursor positioned at global index `g`.
    pub fn cursor_mut_at(&mut self, g: usize) -> CursorMut<'_, T, O, MAX_CHUNKS> {
        assert!(g <= self.len, "cursor index {g} out of range");
        let loc = locate(g);
        CursorMut::new(self, loc)
    }

    pub(crate) fn cell_ref(&self, loc: Location) -> &MaybeUninit<T> {
        self.cell(loc)
    }

    pub(crate) fn cell_mut(&mut self, loc: Location) -> &mut MaybeUninit<T> {
        &mut self.directory.chunk_mut(loc.chunk)[loc.offset]
    }

    /// Drops cells `[0, len)` chunk by chunk. Resets `len` first so that a
    /// panicking destructor leaks instead of double-dropping.
    fn drop_initialized(&mut self) {
        let mut remaining = std::mem::take(&mut self.len);
        let mut c = 0;
        while remaining > 0 {
            let take = remaining.min(1 << c);
            let cells = &mut self.directory.chunk_mut(c)[..take];
            // Initialized prefix of the chunk.
            unsafe { ptr::drop_in_place(cells as *mut [MaybeUninit<T>] as *mut [T]) };
            remaining -= take;
            c += 1;
        }
    }
}

impl<T, O: AllocObserver, const MAX_CHUNKS: usize> Drop for LogVector<T, O, MAX_CHUNKS> {
    fn drop(&mut self) {
        self.clear();
        self.directory.release(0);
        self.observer.on_free(0);
    }
}

impl<T, const MAX_CHUNKS: usize> Default for LogVector<T, NoopObserver, MAX_CHUNKS> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T, O: AllocObserver, const MAX_CHUNKS: usize> std::ops::Index<usize>
    for LogVector<T, O, MAX_CHUNKS>
{
    type Output = T;

    fn index(&self, i: usize) -> &T {
        match self.get(i) {
            Some(v) => v,
            None => panic!("index out of bounds: {i} (len {})", self.len),
        }
    }
}

impl<T, O: AllocObserver, const MAX_CHUNKS: usize> std::ops::IndexMut<usize>
    for LogVector<T, O, MAX_CHUNKS>
{
    fn index_mut(&mut self, i: usize) -> &mut T {
        let len = self.len;
        match self.get_mut(i) {
            Some(v) => v,
            None => panic!("index out of bounds: {i} (len {len})"),
        }
    }
}

impl<T: fmt::Debug, O: AllocObserver, const MAX_CHUNKS: usize> fmt::Debug
    for LogVector<T, O, MAX_CHUNKS>
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

impl<T> FromIterator<T> for LogVector<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut v = LogVector::new();
        for item in iter {
            v.push_back(item);
        }
        v
    }
}

impl<'a, T, O: AllocObserver, const MAX_CHUNKS: usize> IntoIterator
    for &'a LogVector<T, O, MAX_CHUNKS>
{
    type Item = &'a T;
    type IntoIter = Iter<'a, T, O, MAX_CHUNKS>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// `ceil(log2(x))` for `x >= 1`.
#[inline]
fn ceil_log2(x: usize) -> usize {
    x.next_power_of_two().ilog2() as usize
}
