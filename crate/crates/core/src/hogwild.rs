//! Lock-free shared parameter buffers for multi-threaded SGD.
//!
//! Workers read and write rows without synchronisation. Concurrent updates to
//! the same row may interleave; this is the usual asynchronous-SGD contract of
//! reference word2vec/GloVe trainers. With a single worker every access is
//! sequential and results are bit-reproducible.

use std::marker::PhantomData;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy)]
pub(crate) struct SharedRows<'a, T> {
    ptr: *mut T,
    len: usize,
    dim: usize,
    _marker: PhantomData<&'a mut [T]>,
}

unsafe impl<T: Send> Send for SharedRows<'_, T> {}
unsafe impl<T: Send> Sync for SharedRows<'_, T> {}

impl<'a, T> SharedRows<'a, T> {
    pub(crate) fn new(buf: &'a mut [T], dim: usize) -> Self {
        assert!(dim > 0 && buf.len().is_multiple_of(dim));
        SharedRows { ptr: buf.as_mut_ptr(), len: buf.len(), dim, _marker: PhantomData }
    }

    /// # Safety
    /// No other live reference to row `i` may exist on this thread; other
    /// threads may race on it (asynchronous SGD).
    #[inline]
    #[allow(clippy::mut_from_ref)]
    pub(crate) unsafe fn row_mut(&self, i: usize) -> &mut [T] {
        let start = i * self.dim;
        assert!(start + self.dim <= self.len);
        std::slice::from_raw_parts_mut(self.ptr.add(start), self.dim)
    }
}

/// Independent generator for `(seed, stream)`.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
