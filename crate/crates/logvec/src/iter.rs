//! Cursors and iterators over the chunked layout.
//!
//! A position is a (chunk, offset) pair. Stepping forward increments the
//! offset and rolls into the next chunk when the offset reaches the chunk
//! capacity; stepping backward mirrors that. The past-the-end position for
//! a container of `n` elements is `locate(n)`, which may name a chunk that
//! holds no element (or is not even allocated) — it is compared against,
//! never dereferenced.
//!
//! Any structural mutation of the container (push, pop, clear) invalidates
//! outstanding positions; the borrow checker enforces this.

use std::ptr;

use crate::index::{locate, Location};
use crate::stats::AllocObserver;
use crate::vector::LogVector;

#[inline]
fn step_forward(loc: &mut Location) {
    loc.offset += 1;
    if loc.offset == 1 << loc.chunk {
        loc.chunk += 1;
        loc.offset = 0;
    }
}

#[inline]
fn step_backward(loc: &mut Location) {
    if loc.offset == 0 {
        loc.chunk -= 1;
        loc.offset = 1 << loc.chunk;
    }
    loc.offset -= 1;
}

/// Read-only cursor bound to one container.
pub struct Cursor<'a, T, O: AllocObserver, const MAX_CHUNKS: usize> {
    vec: &'a LogVector<T, O, MAX_CHUNKS>,
    pos: Location,
}

impl<'a, T, O: AllocObserver, const MAX_CHUNKS: usize> Cursor<'a, T, O, MAX_CHUNKS> {
    pub(crate) fn new(vec: &'a LogVector<T, O, MAX_CHUNKS>, pos: Location) -> Self {
        Self { vec, pos }
    }

    /// The (chunk, offset) pair of the current position.
    pub fn location(&self) -> Location {
        self.pos
    }

    /// Global index of the current position; equals `len()` at the end.
    pub fn index(&self) -> usize {
        self.pos.global_index()
    }

    pub fn is_end(&self) -> bool {
        self.index() == self.vec.len()
    }

    /// The element under the cursor, or `None` at the past-the-end position.
    pub fn read(&self) -> Option<&'a T> {
        if self.index() < self.vec.len() {
            // In-bounds positions address initialized cells.
            Some(unsafe { self.vec.cell_ref(self.pos).assume_init_ref() })
        } else {
            None
        }
    }

    /// Steps to the next position. Must not be at the end.
    pub fn advance(&mut self) {
        debug_assert!(!self.is_end(), "advance past the end");
        step_forward(&mut self.pos);
    }

    /// Steps to the previous position. Must not be at the start.
    pub fn retreat(&mut self) {
        debug_assert!(self.index() > 0, "retreat before the start");
        step_backward(&mut self.pos);
    }

    /// Moves by `shift` positions in one step; the target must stay within
    /// `[0, len]`.
    pub fn seek(&mut self, shift: isize) {
        let target = self.index() as isize + shift;
        debug_assert!(
            target >= 0 && target as usize <= self.vec.len(),
            "seek target {target} out of range"
        );
        self.pos = locate(target as usize);
    }
}

impl<T, O: AllocObserver, const MAX_CHUNKS: usize> Clone for Cursor<'_, T, O, MAX_CHUNKS> {
    fn clone(&self) -> Self {
        Self {
            vec: self.vec,
            pos: self.pos,
        }
    }
}

impl<T, O: AllocObserver, const MAX_CHUNKS: usize> PartialEq for Cursor<'_, T, O, MAX_CHUNKS> {
    fn eq(&self, other: &Self) -> bool {
        ptr::eq(self.vec, other.vec) && self.pos == other.pos
    }
}

impl<T, O: AllocObserver, const MAX_CHUNKS: usize> Eq for Cursor<'_, T, O, MAX_CHUNKS> {}

/// Cursor with write access to the element under it.
pub struct CursorMut<'a, T, O: AllocObserver, const MAX_CHUNKS: usize> {
    vec: &'a mut LogVector<T, O, MAX_CHUNKS>,
    pos: Location,
}

impl<'a, T, O: AllocObserver, const MAX_CHUNKS: usize> CursorMut<'a, T, O, MAX_CHUNKS> {
    pub(crate) fn new(vec: &'a mut LogVector<T, O, MAX_CHUNKS>, pos: Location) -> Self {
        Self { vec, pos }
    }

    pub fn location(&self) -> Location {
        self.pos
    }

    pub fn index(&self) -> usize {
        self.pos.global_index()
    }

    pub fn is_end(&self) -> bool {
        self.index() == self.vec.len()
    }

    pub fn read(&self) -> Option<&T> {
        if self.index() < self.vec.len() {
            Some(unsafe { self.vec.cell_ref(self.pos).assume_init_ref() })
        } else {
            None
        }
    }

    pub fn get_mut(&mut self) -> Option<&mut T> {
        if self.index() < self.vec.len() {
            Some(unsafe { self.vec.cell_mut(self.pos).assume_init_mut() })
        } else {
            None
        }
    }

    /// Overwrites the element under the cursor. Panics at the end position.
    pub fn write(&mut self, value: T) {
        *self.get_mut().expect("write past the end") = value;
    }

    pub fn advance(&mut self) {
        debug_assert!(!self.is_end(), "advance past the end");
        step_forward(&mut self.pos);
    }

    pub fn retreat(&mut self) {
        debug_assert!(self.index() > 0, "retreat before the start");
        step_backward(&mut self.pos);
    }

    pub fn seek(&mut self, shift: isize) {
        let target = self.index() as isize + shift;
        debug_assert!(
            target >= 0 && target as usize <= self.vec.len(),
            "seek target {target} out of range"
        );
        self.pos = locate(target as usize);
    }
}

/// Double-ended iterator yielding `&T` in index order.
pub struct Iter<'a, T, O: AllocObserver, const MAX_CHUNKS: usize> {
    vec: &'a LogVector<T, O, MAX_CHUNKS>,
    front: Location,
    back: Location,
}

impl<'a, T, O: AllocObserver, const MAX_CHUNKS: usize> Iter<'a, T, O, MAX_CHUNKS> {
    pub(crate) fn new(vec: &'a LogVector<T, O, MAX_CHUNKS>) -> Self {
        Self {
            vec,
            front: locate(0),
            back: locate(vec.len()),
        }
    }
}

impl<'a, T, O: AllocObserver, const MAX_CHUNKS: usize> Iterator for Iter<'a, T, O, MAX_CHUNKS> {
    type Item = &'a T;

    fn next(&mut self) -> Option<&'a T> {
        if self.front == self.back {
            return None;
        }
        let item = unsafe { self.vec.cell_ref(self.front).assume_init_ref() };
        step_forward(&mut self.front);
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.back.global_index() - self.front.global_index();
        (n, Some(n))
    }
}

impl<T, O: AllocObserver, const MAX_CHUNKS: usize> DoubleEndedIterator
    for Iter<'_, T, O, MAX_CHUNKS>
{
    fn next_back(&mut self) -> Option<&T> {
        if self.front == self.back {
            return None;
        }
        step_backward(&mut self.back);
        Some(unsafe { self.vec.cell_ref(self.back).assume_init_ref() })
    }
}

impl<T, O: AllocObserver, const MAX_CHUNKS: usize> ExactSizeIterator
    for Iter<'_, T, O, MAX_CHUNKS>
{
}

impl<T, O: AllocObserver, const MAX_CHUNKS: usize> std::iter::FusedIterator
    for Iter<'_, T, O, MAX_CHUNKS>
{
}

impl<T, O: AllocObserver, const MAX_CHUNKS: usize> Clone for Iter<'_, T, O, MAX_CHUNKS> {
    fn clone(&self) -> Self {
        Self {
            vec: self.vec,
            front: self.front,
            back: self.back,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_container_begin_equals_end() {
        let v: LogVector<u32> = LogVector::new();
        assert_eq!(v.cursor_at(0), v.cursor_at(v.len()));
        assert_eq!(v.iter().next(), None);
    }

    #[test]
    fn end_position_of_seven() {
        let v: LogVector<u32> = (0..7).collect();
        let end = v.cursor_at(v.len());
        assert_eq!(end.location(), Location { chunk: 3, offset: 0 });
        assert!(end.is_end());
    }

    #[test]
    fn end_position_of_five() {
        let v: LogVector<u32> = (0..5).collect();
        let end = v.cursor_at(v.len());
        assert_eq!(end.location(), Location { chunk: 2, offset: 2 });
    }

    #[test]
    fn advance_rolls_into_next_chunk() {
        let v: LogVector<u32> = (0..8).collect();
        let mut c = v.cursor_at(2);
        assert_eq!(c.location(), Location { chunk: 1, offset: 1 });
        c.advance();
        assert_eq!(c.location(), Location { chunk: 2, offset: 0 });
    }

    #[test]
    fn retreat_rolls_into_previous_chunk() {
        let v: LogVector<u32> = (0..8).collect();
        let mut c = v.cursor_at(3);
        assert_eq!(c.location(), Location { chunk: 2, offset: 0 });
        c.retreat();
        assert_eq!(c.location(), Location { chunk: 1, offset: 1 });
    }

    #[test]
    fn advance_then_retreat_is_identity() {
        let v: LogVector<u32> = (0..20).collect();
        for g in 0..v.len() {
            let mut c = v.cursor_at(g);
            c.advance();
            c.retreat();
            assert_eq!(c, v.cursor_at(g));
        }
    }

    #[test]
    fn seek_zero_is_identity() {
        let v: LogVector<u32> = (0..9).collect();
        let mut c = v.cursor_at(4);
        c.seek(0);
        assert_eq!(c.index(), 4);
    }

    #[test]
    fn seek_matches_locate() {
        let v: LogVector<u32> = (0..9).collect();
        let mut c = v.cursor_at(0);
        c.seek(6);
        assert_eq!(c.location(), Location { chunk: 2, offset: 3 });
        assert_eq!(c.read(), Some(&6));
    }

    #[test]
    fn seek_forward_then_back_is_identity() {
        let v: LogVector<u32> = (0..50).collect();
        for k in 0..50 {
            let mut c = v.cursor_at(0);
            c.seek(k);
            c.seek(-k);
            assert_eq!(c.index(), 0);
        }
    }

    #[test]
    fn seek_equals_repeated_advance() {
        let v: LogVector<u32> = (0..33).collect();
        for g in 0..=v.len() {
            let mut by_seek = v.cursor_at(0);
            by_seek.seek(g as isize);
            let mut by_steps = v.cursor_at(0);
            for _ in 0..g {
                by_steps.advance();
            }
            assert_eq!(by_seek, by_steps);
            assert_eq!(by_seek.location(), locate(g));
        }
    }

    #[test]
    fn forward_walk_collects_push_order() {
        let v: LogVector<u32> = (0..13).collect();
        let walked: Vec<u32> = v.iter().copied().collect();
        assert_eq!(walked, (0..13).collect::<Vec<_>>());
    }

    #[test]
    fn reverse_walk_is_reversed_order() {
        let v: LogVector<u32> = (0..13).collect();
        let walked: Vec<u32> = v.iter().rev().copied().collect();
        let mut expected: Vec<u32> = (0..13).collect();
        expected.reverse();
        assert_eq!(walked, expected);
    }

    #[test]
    fn iterator_len_is_exact() {
        let v: LogVector<u32> = (0..10).collect();
        let mut it = v.iter();
        assert_eq!(it.len(), 10);
        it.next();
        it.next_back();
        assert_eq!(it.len(), 8);
    }

    #[test]
    fn cursor_read_at_end_is_none() {
        let v: LogVector<u32> = (0..3).collect();
        let c = v.cursor_at(3);
        assert_eq!(c.read(), None);
    }

    #[test]
    fn cursor_write_then_get() {
        let mut v: LogVector<u32> = (0..10).collect();
        let mut c = v.cursor_mut_at(6);
        c.write(777);
        assert_eq!(v.get(6), Some(&777));
    }

    #[test]
    #[should_panic(expected = "write past the end")]
    fn cursor_write_at_end_panics() {
        let mut v: LogVector<u32> = (0..3).collect();
        let mut c = v.cursor_mut_at(3);
        c.write(1);
    }

    #[test]
    fn cursors_on_different_containers_are_unequal() {
        let a: LogVector<u32> = (0..3).collect();
        let b: LogVector<u32> = (0..3).collect();
        assert_ne!(a.cursor_at(1), b.cursor_at(1));
        assert_eq!(a.cursor_at(1), a.cursor_at(1));
    }

    #[test]
    fn mutable_cursor_walk_rewrites_everything() {
        let mut v: LogVector<u32> = (0..9).collect();
        let mut c = v.cursor_mut_at(0);
        while !c.is_end() {
            let cur = *c.read().unwrap();
            c.write(cur * 2);
            c.advance();
        }
        let doubled: Vec<u32> = v.iter().copied().collect();
        assert_eq!(doubled, (0..9).map(|x| x * 2).collect::<Vec<_>>());
    }
}
