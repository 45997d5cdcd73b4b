//! Bit-exact configuration serialization and Euler-tour exploration of
//! 0-graphs: the rotation map and the walk subroutines built on it.
//!
//! The 0-graph keeps only 0-labeled edges of the configuration graph and
//! forgets directions. Every vertex has at most one forward edge, so each
//! component containing a halting configuration is a tree rooted at it; an
//! Euler tour of that tree can be walked with constant-size local state.

use thiserror::Error;

use crate::bits::{bit_width, Bits};
use crate::machine::{Configuration, MachineSpec, StateId};
use crate::meter::SpaceMeter;

/// Serialization widths for one (machine, input-length) pair. Field order is
/// fixed: state, input head, work head, cat head, work bits, cat bits; each
/// field big-endian. W is the extended work width, L = W + c the total.
#[derive(Clone, Copy, Debug)]
pub struct Layout {
    pub state_bits: usize,
    pub ihead_bits: usize,
    pub whead_bits: usize,
    pub chead_bits: usize,
    pub s: usize,
    pub c: usize,
}

impl Layout {
    pub fn for_machine(spec: &MachineSpec) -> Layout {
        Layout {
            state_bits: bit_width(spec.state_count() as u128),
            ihead_bits: bit_width(spec.n as u128),
            whead_bits: bit_width(spec.s as u128),
            chead_bits: bit_width(spec.c as u128),
            s: spec.s,
            c: spec.c,
        }
    }

    /// Extended work width: everything except the catalytic tape.
    pub fn w(&self) -> usize {
        self.state_bits + self.ihead_bits + self.whead_bits + self.chead_bits + self.s
    }

    pub fn l(&self) -> usize {
        self.w() + self.c
    }

    pub fn serialize(&self, conf: &Configuration) -> Bits {
        let mut out = Bits::zeros(0);
        out.push_uint(conf.state.0 as u128, self.state_bits);
        out.push_uint(conf.input_head as u128, self.ihead_bits);
        out.push_uint(conf.work_head as u128, self.whead_bits);
        out.push_uint(conf.cat_head as u128, self.chead_bits);
        for b in conf.work.iter() {
            out.push_uint(b as u128, 1);
        }
        for b in conf.cat.iter() {
            out.push_uint(b as u128, 1);
        }
        out
    }

    pub fn deserialize(&self, bits: &Bits) -> Configuration {
        assert_eq!(bits.len(), self.l());
        let mut off = 0;
        let mut take = |w: usize| {
            let v = bits.uint_at(off, w);
            off += w;
            v
        };
        let state = StateId(take(self.state_bits) as u16);
        let input_head = take(self.ihead_bits) as usize;
        let work_head = take(self.whead_bits) as usize;
        let cat_head = take(self.chead_bits) as usize;
        let work = bits.slice(off, off + self.s);
        let cat = bits.slice(off + self.s, off + self.s + self.c);
        Configuration {
            state,
            input_head,
            work_head,
            cat_head,
            work,
            cat,
        }
    }

    /// The b-th bit of the serialized configuration.
    pub fn bit(&self, conf: &Configuration, b: usize) -> Result<bool, WalkError> {
        if b >= self.l() {
            return Err(WalkError::BitOutOfRange { b, l: self.l() });
        }
        Ok(self.serialize(conf).get(b))
    }

    /// Serialize only the extended-work part (the W-bit prefix).
    pub fn serialize_extended(&self, conf: &Configuration) -> Bits {
        self.serialize(conf).slice(0, self.w())
    }

    /// Rebuild a configuration from a W-bit extended-work part and catalytic
    /// tape contents.
    pub fn deserialize_extended(&self, ext: &Bits, cat: &Bits) -> Configuration {
        assert_eq!(ext.len(), self.w());
        self.deserialize(&ext.concat(cat))
    }
}

/// Exploration parameters: the counter block width B and the step cap S.
#[derive(Clone, Copy, Debug)]
pub struct ExploreParams {
    pub b_bits: usize,
    pub cap: u128,
}

#[derive(Error, Debug)]
pub enum ParamError {
    #[error("default parameters overflow: B = 2W = {0} must be below 128")]
    TooWide(usize),
    #[error("counter width B = {b} cannot hold a compression record (need W + ceil(log d_M) + 1 = {need})")]
    CounterTooNarrow { b: usize, need: usize },
}

impl ExploreParams {
    /// The defaults B = 2W, S = 2^B.
    pub fn defaults(layout: &Layout) -> Result<ExploreParams, ParamError> {
        let b = 2 * layout.w();
        if b >= 128 {
            return Err(ParamError::TooWide(b));
        }
        Ok(ExploreParams { b_bits: b, cap: 1u128 << b })
    }
}

#[derive(Error, Debug)]
pub enum WalkError {
    #[error("walk length {t} exceeds the step cap S = {cap}")]
    StepCapExceeded { t: u128, cap: u128 },
    #[error("bit index {b} out of range for L = {l}")]
    BitOutOfRange { b: usize, l: usize },
}

/// A directed edge slot (configuration, local edge index) in the 0-graph.
/// Index 0 is the forward 0-edge when one exists; backward edges follow in
/// the canonical inverse-edge order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EdgeRef {
    pub conf: Configuration,
    pub index: usize,
}

/// An implicit view of the 0-graph of (spec, x): all structure is computed
/// locally from forward and inverse edges, never materialized.
///
/// Local edges of visited configurations are memoized; that trades time for
/// heap space without changing any answer, so the declared meter charges
/// still describe the abstract walk state.
pub struct ZeroGraphView<'a> {
    pub spec: &'a MachineSpec,
    pub x: &'a Bits,
    pub layout: Layout,
    pub params: ExploreParams,
    pub meter: &'a SpaceMeter,
    /// Meter charge for one held edge slot, fixed at construction.
    edge_bits: usize,
    /// Meter charge for one step counter, fixed at construction.
    count_bits: usize,
    adjacency: std::cell::RefCell<std::collections::HashMap<Configuration, std::rc::Rc<LocalEdges>>>,
}

/// Memoized local 0-edges of one configuration.
struct LocalEdges {
    forward: Option<Configuration>,
    predecessors: Vec<Configuration>,
}

impl<'a> ZeroGraphView<'a> {
    pub fn new(
        spec: &'a MachineSpec,
        x: &'a Bits,
        params: ExploreParams,
        meter: &'a SpaceMeter,
    ) -> Self {
        assert_eq!(x.len(), spec.n);
        let layout = Layout::for_machine(spec);
        ZeroGraphView {
            spec,
            x,
            layout,
            params,
            meter,
            edge_bits: layout.w() + bit_width(spec.degree_bound() as u128),
            count_bits: bit_width(params.cap) + 1,
            adjacency: Default::default(),
        }
    }

    fn local_edges(&self, conf: &Configuration) -> std::rc::Rc<LocalEdges> {
        if let Some(hit) = self.adjacency.borrow().get(conf) {
            return hit.clone();
        }
        let forward = if self.spec.is_halting(conf) {
            None
        } else {
            Some(self.spec.step(self.x, conf, false))
        };
        let predecessors = self
            .spec
            .inverse_edges(self.x, conf)
            .into_iter()
            .filter(|(labels, _)| labels.zero)
            .map(|(_, pred)| pred)
            .collect();
        let entry = std::rc::Rc::new(LocalEdges { forward, predecessors });
        self.adjacency
            .borrow_mut()
            .insert(conf.clone(), entry.clone());
        entry
    }

    fn count_bits(&self) -> usize {
        self.count_bits
    }

    fn edge_bits(&self) -> usize {
        self.edge_bits
    }

    /// The unique 0-labeled successor; None for halting configurations.
    pub fn zero_forward(&self, conf: &Configuration) -> Option<Configuration> {
        self.local_edges(conf).forward.clone()
    }

    /// 0-labeled predecessors in the canonical descriptor order.
    pub fn zero_predecessors(&self, conf: &Configuration) -> Vec<Configuration> {
        self.local_edges(conf).predecessors.clone()
    }

    /// Degree of `conf` in the 0-graph.
    pub fn degree(&self, conf: &Configuration) -> usize {
        let local = self.local_edges(conf);
        local.forward.is_some() as usize + local.predecessors.len()
    }

    /// The i-th undirected edge at `conf` as (other endpoint, direction):
    /// index 0 is the forward edge when present.
    fn edge_endpoint(&self, conf: &Configuration, index: usize) -> Option<Configuration> {
        let local = self.local_edges(conf);
        let base = match &local.forward {
            Some(succ) => {
                if index == 0 {
                    return Some(succ.clone());
                }
                1
            }
            None => 0,
        };
        local.predecessors.get(index - base).cloned()
    }

    /// Rotation map: if edge slot (v, i) is the j-th edge of its other
    /// endpoint u, returns (u, j); identity for i >= deg(v).
    pub fn rot(&self, e: &EdgeRef) -> EdgeRef {
        let _g = self.meter.enter("rot", self.edge_bits());
        let Some(other) = self.edge_endpoint(&e.conf, e.index) else {
            return e.clone();
        };
        let has_forward = self.local_edges(&e.conf).forward.is_some();
        if has_forward && e.index == 0 {
            // Forward edge of v: at u it is the backward edge slot for v.
            let local = self.local_edges(&other);
            let base = local.forward.is_some() as usize;
            let pos = local
                .predecessors
                .iter()
                .position(|p| *p == e.conf)
                .expect("forward/inverse edge duality violated");
            EdgeRef { conf: other, index: base + pos }
        } else {
            // Backward edge of v: at u (= the predecessor) it is the forward
            // edge, index 0.
            debug_assert_eq!(self.zero_forward(&other), Some(e.conf.clone()));
            EdgeRef { conf: other, index: 0 }
        }
    }

    /// The next edge of the Euler tour: (u, j+1 mod deg(u)) where
    /// rot(e) = (u, j). Identity on slots past the degree (isolated vertices
    /// in particular).
    pub fn next_edge(&self, e: &EdgeRef) -> EdgeRef {
        let _g = self.meter.enter("next", self.edge_bits());
        let deg_v = self.degree(&e.conf);
        if e.index >= deg_v {
            return e.clone();
        }
        let flipped = self.rot(e);
        let deg_u = self.degree(&flipped.conf);
        EdgeRef {
            index: (flipped.index + 1) % deg_u,
            conf: flipped.conf,
        }
    }

    /// Exact inverse of `next_edge`.
    pub fn step_back(&self, e: &EdgeRef) -> EdgeRef {
        let _g = self.meter.enter("step_back", self.edge_bits());
        let deg_u = self.degree(&e.conf);
        if e.index >= deg_u {
            return e.clone();
        }
        self.rot(&EdgeRef {
            conf: e.conf.clone(),
            index: (e.index + deg_u - 1) % deg_u,
        })
    }

    /// Apply `next_edge` t times; t must not exceed the cap S.
    pub fn walk(&self, e: &EdgeRef, t: u128) -> Result<EdgeRef, WalkError> {
        if t > self.params.cap {
            return Err(WalkError::StepCapExceeded { t, cap: self.params.cap });
        }
        let _g = self
            .meter
            .enter("walk", self.edge_bits() + self.count_bits());
        let mut cur = e.clone();
        for _ in 0..t {
            cur = self.next_edge(&cur);
        }
        Ok(cur)
    }

    /// Step back until the current slot is (h, 0) for a halting
    /// configuration h; returns the step count and the final slot, or None
    /// if the count would exceed S (including when no halting root exists).
    pub fn count_steps_back(&self, e: &EdgeRef) -> (Option<u128>, EdgeRef) {
        let _g = self
            .meter
            .enter("count_steps_back", self.edge_bits() + self.count_bits());
        let at_root = |e: &EdgeRef| e.index == 0 && self.spec.is_halting(&e.conf);
        let mut cur = e.clone();
        // Tortoise for cycle detection: rootless components cycle under
        // step_back and would otherwise burn the full cap.
        let mut slow = e.clone();
        let mut count: u128 = 0;
        loop {
            if at_root(&cur) {
                return (Some(count), cur);
            }
            if count >= self.params.cap {
                return (None, cur);
            }
            cur = self.step_back(&cur);
            count += 1;
            if count.is_multiple_of(2) {
                slow = self.step_back(&slow);
                if slow == cur {
                    return (None, cur);
                }
            }
        }
    }

    /// Tour length from a halting configuration: the minimum t >= 1 with
    /// walk((h,0), t) = (h,0). Equals twice the component's edge count when
    /// 2 <= |V| <= S/2 + 1; returns 1 for an isolated root and None (the
    /// infinite answer) when the tour exceeds S.
    pub fn size(&self, h: &Configuration) -> Option<u128> {
        assert!(self.spec.is_halting(h), "size requires a halting configuration");
        let _g = self
            .meter
            .enter("size", self.edge_bits() + self.count_bits());
        if self.degree(h) == 0 {
            return Some(1);
        }
        let home = EdgeRef { conf: h.clone(), index: 0 };
        let mut cur = home.clone();
        for t in 1..=self.params.cap {
            cur = self.next_edge(&cur);
            if cur == home {
                return Some(t);
            }
        }
        None
    }

    /// Bit b of the configuration reached by walk((h, 0), t).
    pub fn conf_bit_at(&self, h: &Configuration, b: usize, t: u128) -> Result<bool, WalkError> {
        assert!(self.spec.is_halting(h));
        let _g = self
            .meter
            .enter("conf_bit_at", self.edge_bits() + self.count_bits());
        let reached = self.walk(&EdgeRef { conf: h.clone(), index: 0 }, t)?;
        self.layout.bit(&reached.conf, b)
    }

    /// 1 iff the slot reached by walk((h, i), t) has edge index 0, marking t
    /// as the canonical index of the reached configuration.
    pub fn canon(&self, h: &Configuration, i: usize, t: u128) -> Result<bool, WalkError> {
        assert!(self.spec.is_halting(h));
        let _g = self
            .meter
            .enter("canon", self.edge_bits() + self.count_bits());
        let reached = self.walk(&EdgeRef { conf: h.clone(), index: i }, t)?;
        Ok(reached.index == 0)
    }
}

#[cfg(test)]
mod tests;
