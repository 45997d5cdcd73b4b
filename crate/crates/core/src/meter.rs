//! Auxiliary-space accounting for the exploration subroutines.
//!
//! Each subroutine charges a fixed number of bits derived from the machine's
//! serialization widths and the step cap (counters, one tour position, one
//! edge index) before it runs and releases them when it returns. Charges are
//! functions of (W, log d_M, log S) only, never of component size; the tape
//! payload a walk carries is tape-resident and not charged here.

use std::cell::RefCell;
use std::collections::HashMap;

#[derive(Debug, Default)]
pub struct SpaceMeter {
    inner: RefCell<MeterState>,
}

#[derive(Debug, Default)]
struct MeterState {
    current_bits: usize,
    peak_bits: usize,
    per_subroutine_peak: HashMap<&'static str, usize>,
}

pub struct MeterGuard<'a> {
    meter: &'a SpaceMeter,
    bits: usize,
}

impl SpaceMeter {
    pub fn new() -> Self {
        SpaceMeter::default()
    }

    /// Charge `bits` of auxiliary space until the guard is dropped.
    pub fn enter(&self, subroutine: &'static str, bits: usize) -> MeterGuard<'_> {
        let mut st = self.inner.borrow_mut();
        st.current_bits += bits;
        if st.current_bits > st.peak_bits {
            st.peak_bits = st.current_bits;
        }
        let current = st.current_bits;
        let entry = st.per_subroutine_peak.entry(subroutine).or_insert(0);
        if current > *entry {
            *entry = current;
        }
        MeterGuard { meter: self, bits }
    }

    pub fn peak_bits(&self) -> usize {
        self.inner.borrow().peak_bits
    }

    pub fn breakdown(&self) -> Vec<(&'static str, usize)> {
        let st = self.inner.borrow();
        let mut v: Vec<_> = st.per_subroutine_peak.iter().map(|(k, v)| (*k, *v)).collect();
        v.sort();
        v
    }

    pub fn reset(&self) {
        *self.inner.borrow_mut() = MeterState::default();
    }
}

impl Drop for MeterGuard<'_> {
    fn drop(&mut self) {
        self.meter.inner.borrow_mut().current_bits -= self.bits;
    }
}
