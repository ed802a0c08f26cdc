use std::collections::HashMap;
use std::hash::Hash;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;
use crate::group::{quantize_h_n, DlogEvaluator, HEvaluator, ShiftedGrid};
use crate::infra::Infrastructure;

/// Partition of a finite domain `[0, size)` by function value.
#[derive(Clone, Debug)]
pub struct FiberTable<K> {
    keys: Vec<K>,
    members: Vec<Vec<u64>>,
    owner: Vec<u32>,
    /// Row width for two-dimensional domains; index `i` is `(i / w, i % w)`.
    width: u64,
}

impl<K: Clone + Eq + Hash> FiberTable<K> {
    /// Builds the table from the value at each index, in index order.
    pub fn from_values(values: Vec<K>, width: u64) -> Self {
        let mut index: HashMap<K, u32> = HashMap::new();
        let mut keys = Vec::new();
        let mut members: Vec<Vec<u64>> = Vec::new();
        let mut owner = Vec::with_capacity(values.len());
        for (i, v) in values.into_iter().enumerate() {
            let id = *index.entry(v.clone()).or_insert_with(|| {
                keys.push(v);
                members.push(Vec::new());
                (keys.len() - 1) as u32
            });
            members[id as usize].push(i as u64);
            owner.push(id);
        }
        Self { keys, members, owner, width: width.max(1) }
    }

    pub fn domain_size(&self) -> u64 {
        self.owner.len() as u64
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, fiber: usize) -> &K {
        &self.keys[fiber]
    }

    /// Sorted domain indices of a fiber.
    pub fn fiber(&self, fiber: usize) -> &[u64] {
        &self.members[fiber]
    }

    pub fn owner_of(&self, index: u64) -> usize {
        self.owner[index as usize] as usize
    }

    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(Vec::len)
    }

    pub fn width(&self) -> u64 {
        self.width
    }

    /// A fiber of a two-dimensional table as `(a, b)` pairs.
    pub fn fiber_pairs(&self, fiber: usize) -> Vec<(u64, u64)> {
        self.members[fiber].iter().map(|&i| (i / self.width, i % self.width)).collect()
    }

    /// Picks a fiber with probability `|fiber| / size`.
    pub fn sample_fiber<R: Rng>(&self, rng: &mut R) -> usize {
        self.owner_of(rng.random_range(0..self.domain_size()))
    }
}

/// Uniform superposition over a sorted support in `[0, q)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PseudoPeriodicState {
    pub support: Vec<u64>,
    pub q: u64,
    /// Period of the state when known to the caller.
    pub nominal_period: Option<ScaledReal>,
}

impl PseudoPeriodicState {
    pub fn new(support: Vec<u64>, q: u64) -> Result<Self> {
        if support.is_empty() || support.windows(2).any(|w| w[0] >= w[1]) || *support.last().unwrap() >= q {
            return Err(Error::Precondition("support must be sorted, nonempty and inside [0, q)".into()));
        }
        Ok(Self { support, q, nominal_period: None })
    }

    /// Exact pseudo-periodic state `{⌊k + jS⌉}` for rational `S`.
    pub fn ideal(offset: &ScaledReal, period: &ScaledReal, q: u64) -> Result<Self> {
        let mut support = Vec::new();
        let mut t = offset.clone();
        loop {
            let i = t.round_nearest();
            if i >= num_bigint::BigInt::from(q) {
                break;
            }
            support.push(u64::try_from(i).map_err(|_| Error::Precondition("negative offset".into()))?);
            t += period;
        }
        let mut s = Self::new(support, q)?;
        s.nominal_period = Some(period.clone());
        Ok(s)
    }

    pub fn offset(&self) -> u64 {
        self.support[0]
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// Fibers of `h_N` over `[0, q)`.
pub fn build_fibers_1d<I: Infrastructure>(
    ev: &HEvaluator<'_, I>,
    grid: &ShiftedGrid,
    q: u64,
) -> Result<FiberTable<(I::Element, i64)>> {
    let values = (0..q).into_par_iter().map(|i| quantize_h_n(ev, grid, i)).collect::<Result<Vec<_>>>()?;
    Ok(FiberTable::from_values(values, q))
}

/// Fibers of `g_N` over `[0, a_count) × [0, b_count)`, row-major in `a`.
pub fn build_fibers_2d<I: Infrastructure>(
    ev: &DlogEvaluator<'_, I>,
    grid: &ShiftedGrid,
    a_count: u64,
    b_count: u64,
) -> Result<FiberTable<(I::Element, i64)>> {
    let hs = (0..b_count).into_par_iter().map(|b| ev.h().eval(&grid.point(b))).collect::<Result<Vec<_>>>()?;
    let n = grid.n;
    let rows = (0..a_count)
        .into_par_iter()
        .map(|a| {
            let ax = ev.multiple(a)?;
            hs.iter()
                .map(|h| {
                    let rep = ev.combine(a, &ax, h.clone())?.rep;
                    let l = rep.f.floor_scaled(n);
                    Ok((rep.x, i64::try_from(l).expect("quantized offset fits i64")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FiberTable::from_values(rows.into_iter().flatten().collect(), b_count))
}

/// Simulates measuring the function register: returns the support of the
/// collapsed first register.
pub fn measure_second_register<K: Clone + Eq + Hash, R: Rng>(fibers: &FiberTable<K>, rng: &mut R) -> PseudoPeriodicState {
    let f = fibers.sample_fiber(rng);
    PseudoPeriodicState { support: fibers.fiber(f).to_vec(), q: fibers.domain_size(), nominal_period: None }
}
