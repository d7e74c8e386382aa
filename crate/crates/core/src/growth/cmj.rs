use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::Exp1;

use super::RateCache;
use crate::attraction::AttractionSpec;
use crate::error::{invalid, Error, Result};
use crate::tree::GrowingTree;

pub const DEFAULT_POPULATION_CAP: usize = 10_000_000;

/// When a continuous-time run ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// Stop at the birth that brings the population to this many vertices.
    Vertices(usize),
    /// Stop at this time, counting births at or before it.
    Time(f64),
}

impl Stop {
    fn check(self) -> Result<()> {
        match self {
            Stop::Vertices(0) => invalid("n_max must be at least 1"),
            Stop::Time(t) if !(t.is_finite() && t >= 0.0) => invalid(format!("t_end = {t} must be finite and >= 0")),
            _ => Ok(()),
        }
    }
}

/// A pending birth of `vertex`, valid while `generation` matches the
/// vertex's current generation.
#[derive(Debug, Clone, Copy)]
struct Clock {
    time: f64,
    vertex: usize,
    generation: u32,
}

impl PartialEq for Clock {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Clock {}
impl PartialOrd for Clock {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Clock {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.vertex.cmp(&other.vertex))
            .then(self.generation.cmp(&other.generation))
    }
}

/// Event-driven CMJ process without deaths.
///
/// Each individual with `k` children gives birth after an exponential delay
/// of rate `f(k)`; only the next birth time of each individual is stored.
/// The root may run on the shifted rate `f(k + d)`.
#[derive(Debug, Clone)]
pub struct CmjProcess {
    rates: RateCache,
    tree: GrowingTree,
    queue: BinaryHeap<Reverse<Clock>>,
    generation: Vec<u32>,
    now: f64,
    root_shift: usize,
    cap: usize,
}

impl CmjProcess {
    /// A process started from a single individual at time 0.
    pub fn new<R: Rng + ?Sized>(spec: &AttractionSpec, rng: &mut R) -> Result<Self> {
        Self::from_tree(spec, GrowingTree::new(), rng)
    }

    /// Continues from an existing tree; every vertex's clock starts at rate
    /// `f(current out-degree)`. Time restarts at the latest recorded birth, or
    /// at 0 for untimed trees (whose vertices are then all stamped 0).
    pub fn from_tree<R: Rng + ?Sized>(spec: &AttractionSpec, initial: GrowingTree, rng: &mut R) -> Result<Self> {
        Self::build(spec, initial, 0, rng)
    }

    /// A single root whose `i`-th birth happens at rate `f(i + shift)`;
    /// all descendants use `f`.
    pub fn with_root_shift<R: Rng + ?Sized>(spec: &AttractionSpec, shift: usize, rng: &mut R) -> Result<Self> {
        Self::build(spec, GrowingTree::new(), shift, rng)
    }

    fn build<R: Rng + ?Sized>(spec: &AttractionSpec, mut initial: GrowingTree, root_shift: usize, rng: &mut R) -> Result<Self> {
        let n = initial.len();
        if initial.birth_times().is_none() {
            initial.set_birth_times(vec![0.0; n]);
        }
        let now = initial.birth_times().unwrap_or_default().iter().copied().fold(0.0, f64::max);
        let mut p = Self {
            rates: RateCache::new(spec)?,
            tree: initial,
            queue: BinaryHeap::with_capacity(n),
            generation: vec![0; n],
            now,
            root_shift,
            cap: DEFAULT_POPULATION_CAP,
        };
        for v in 0..n {
            p.schedule(v, rng)?;
        }
        Ok(p)
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    fn schedule<R: Rng + ?Sized>(&mut self, v: usize, rng: &mut R) -> Result<()> {
        let shift = if v == 0 { self.root_shift } else { 0 };
        let rate = self.rates.rate(self.tree.out_degree(v) + shift)?;
        let delay: f64 = rng.sample::<f64, _>(Exp1) / rate;
        self.generation[v] = self.generation[v].wrapping_add(1);
        self.queue.push(Reverse(Clock { time: self.now + delay, vertex: v, generation: self.generation[v] }));
        Ok(())
    }

    fn peek(&mut self) -> Clock {
        loop {
            let Reverse(c) = *self.queue.peek().expect("every individual has a pending clock");
            if c.generation == self.generation[c.vertex] {
                return c;
            }
            self.queue.pop();
        }
    }

    /// Time of the next birth.
    pub fn next_birth_time(&mut self) -> f64 {
        self.peek().time
    }

    /// Fires the next birth; returns `(parent, child)`.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(usize, usize)> {
        if self.tree.len() >= self.cap {
            return Err(Error::PopulationCapExceeded { cap: self.cap });
        }
        let c = self.peek();
        self.queue.pop();
        self.now = c.time;
        let child = self.tree.attach_at(c.vertex, c.time);
        self.generation.push(0);
        // Memorylessness: the parent's clock restarts at its new rate.
        self.schedule(c.vertex, rng)?;
        self.schedule(child, rng)?;
        Ok((c.vertex, child))
    }

    /// Advances to `t`, firing every birth at or before it.
    pub fn advance_to<R: Rng + ?Sized>(&mut self, t: f64, rng: &mut R) -> Result<()> {
        while self.next_birth_time() <= t {
            self.step(rng)?;
        }
        self.now = self.now.max(t);
        Ok(())
    }

    pub fn run<R: Rng + ?Sized>(&mut self, stop: Stop, rng: &mut R) -> Result<()> {
        stop.check()?;
        match stop {
            Stop::Vertices(n) => {
                if n > self.cap {
                    return Err(Error::PopulationCapExceeded { cap: self.cap });
                }
                while self.tree.len() < n {
                    self.step(rng)?;
                }
                Ok(())
            }
            Stop::Time(t) => self.advance_to(t, rng),
        }
    }

    pub fn population(&self) -> usize {
        self.tree.len()
    }

    pub fn time(&self) -> f64 {
        self.now
    }

    pub fn tree(&self) -> &GrowingTree {
        &self.tree
    }

    /// The grown tree, with birth times.
    pub fn into_tree(self) -> GrowingTree {
        self.tree
    }
}

/// Runs the CMJ process from one individual; returns the tree with birth
/// times and the final time (the last birth for [`Stop::Vertices`], the
/// horizon for [`Stop::Time`]).
pub fn grow_cmj<R: Rng + ?Sized>(spec: &AttractionSpec, stop: Stop, rng: &mut R) -> Result<(GrowingTree, f64)> {
    grow_from_seed_tree(GrowingTree::new(), spec, stop, rng)
}

/// Continues CMJ growth from `initial`. [`Stop::Vertices`] counts the
/// initial vertices.
pub fn grow_from_seed_tree<R: Rng + ?Sized>(
    initial: GrowingTree,
    spec: &AttractionSpec,
    stop: Stop,
    rng: &mut R,
) -> Result<(GrowingTree, f64)> {
    let mut p = CmjProcess::from_tree(spec, initial, rng)?;
    p.run(stop, rng)?;
    let t = p.time();
    Ok((p.into_tree(), t))
}
