//! Dense indexing of monomials of total degree at most `M` in `d` variables.
//!
//! Monomials are ordered by total degree, then lexicographically descending
//! within a degree (`X^2, XY, Y^2`). Exponent vectors are encoded in base
//! `M + 1`, so the code of a product is the sum of the codes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

const DENSE_LOOKUP_LIMIT: u64 = 1 << 22;

#[derive(Debug)]
pub struct MonomialTable {
    nvars: usize,
    deg_cap: u32,
    exps: Vec<u32>,
    degrees: Vec<u32>,
    codes: Vec<u64>,
    /// `deg_start[k]` is the index of the first monomial of degree `k`;
    /// `deg_start[M+1]` is the table length.
    deg_start: Vec<usize>,
    lookup: Lookup,
}

#[derive(Debug)]
enum Lookup {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

impl MonomialTable {
    fn build(nvars: usize, deg_cap: u32) -> Self {
        let mut exps = Vec::new();
        let mut degrees = Vec::new();
        let mut deg_start = Vec::with_capacity(deg_cap as usize + 2);
        let mut current = vec![0u32; nvars];
        for deg in 0..=deg_cap {
            deg_start.push(degrees.len());
            push_degree(nvars, deg, 0, &mut current, &mut exps, &mut degrees);
        }
        deg_start.push(degrees.len());
        let base = deg_cap as u64 + 1;
        let codes: Vec<u64> = exps
            .chunks(nvars)
            .map(|e| e.iter().rev().fold(0u64, |acc, &x| acc * base + x as u64))
            .collect();
        let span = base.checked_pow(nvars as u32);
        let lookup = match span {
            Some(span) if span <= DENSE_LOOKUP_LIMIT => {
                let mut dense = vec![u32::MAX; span as usize];
                for (i, &c) in codes.iter().enumerate() {
                    dense[c as usize] = i as u32;
                }
                Lookup::Dense(dense)
            }
            _ => Lookup::Sparse(
                codes
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| (c, i as u32))
                    .collect(),
            ),
        };
        MonomialTable {
            nvars,
            deg_cap,
            exps,
            degrees,
            codes,
            deg_start,
            lookup,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn deg_cap(&self) -> u32 {
        self.deg_cap
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn exps(&self, idx: usize) -> &[u32] {
        &self.exps[idx * self.nvars..(idx + 1) * self.nvars]
    }

    pub fn degree(&self, idx: usize) -> u32 {
        self.degrees[idx]
    }

    pub fn code(&self, idx: usize) -> u64 {
        self.codes[idx]
    }

    /// Number of monomials of degree at most `deg`.
    pub fn count_upto(&self, deg: u32) -> usize {
        self.deg_start[(deg.min(self.deg_cap) + 1) as usize]
    }

    /// Index range of the monomials of exactly degree `deg`.
    pub fn degree_range(&self, deg: u32) -> std::ops::Range<usize> {
        if deg > self.deg_cap {
            return self.len()..self.len();
        }
        self.deg_start[deg as usize]..self.deg_start[deg as usize + 1]
    }

    #[inline]
    pub fn index_of_code(&self, code: u64) -> Option<usize> {
        match &self.lookup {
            Lookup::Dense(d) => match d.get(code as usize) {
                Some(&i) if i != u32::MAX => Some(i as usize),
                _ => None,
            },
            Lookup::Sparse(m) => m.get(&code).map(|&i| i as usize),
        }
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        if exps.len() != self.nvars || exps.iter().sum::<u32>() > self.deg_cap {
            return None;
        }
        let base = self.deg_cap as u64 + 1;
        let code = exps.iter().rev().fold(0u64, |acc, &x| acc * base + x as u64);
        self.index_of_code(code)
    }
}

fn push_degree(
    nvars: usize,
    remaining: u32,
    pos: usize,
    current: &mut Vec<u32>,
    exps: &mut Vec<u32>,
    degrees: &mut Vec<u32>,
) {
    if pos + 1 == nvars {
        current[pos] = remaining;
        exps.extend_from_slice(current);
        degrees.push(current.iter().sum());
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        push_degree(nvars, remaining - e, pos + 1, current, exps, degrees);
    }
}

type TableCache = Mutex<HashMap<(usize, u32), Arc<MonomialTable>>>;

/// Shared table for `(nvars, deg_cap)`.
pub fn table(nvars: usize, deg_cap: u32) -> Arc<MonomialTable> {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("monomial cache poisoned");
    Arc::clone(
        guard
            .entry((nvars, deg_cap))
            .or_insert_with(|| Arc::new(MonomialTable::build(nvars, deg_cap))),
    )
}
