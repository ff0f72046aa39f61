//! Exact combinatorial dimensions for binary classes: eluder dimension,
//! star number, threshold dimension, VC dimension and Littlestone dimension,
//! with witness extraction.
//!
//! All searches are exhaustive at desk scale. Eluder uses a DP over point
//! subsets (the feasible continuation depends only on the set of points
//! constrained to agree, not their order), star and threshold use branch and
//! bound with per-position candidate-function sets. Tie-breaking is fixed to
//! the lexicographically smallest maximum-length witness so outputs are
//! reproducible.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::table::{FunctionClassTable, Kind};
use crate::witness::{
    verify_witness, DimensionReport, ReferenceFunction, WitnessKind, WitnessSequence,
};

pub const MAX_POINTS: usize = 64;

/// Precomputed disagreement masks: bit `i` of `diffs[f]` is set iff function
/// `f` disagrees with the reference at point `i`.
pub(crate) struct SignView {
    pub n_points: usize,
    pub n_funcs: usize,
    pub diffs: Vec<u64>,
}

impl SignView {
    pub fn build(table: &FunctionClassTable, reference: &ReferenceFunction) -> Result<Self> {
        if table.kind() != Kind::Binary {
            return Err(Error::WrongKind(
                "combinatorial dimensions require a binary table (use the scale-sensitive ops)".into(),
            ));
        }
        if table.n_points() > MAX_POINTS {
            return Err(Error::ResourceLimit(format!(
                "combinatorial search supports at most {MAX_POINTS} points, table has {}",
                table.n_points()
            )));
        }
        let ref_vals = reference.resolve(table)?;
        let ref_signs: Vec<i8> = ref_vals.iter().map(|v| if v.is_positive() { 1 } else { -1 }).collect();
        let diffs = (0..table.n_funcs())
            .map(|f| {
                let mut m = 0u64;
                for i in 0..table.n_points() {
                    if table.sign_entry(i, f) != ref_signs[i] {
                        m |= 1 << i;
                    }
                }
                m
            })
            .collect();
        Ok(Self { n_points: table.n_points(), n_funcs: table.n_funcs(), diffs })
    }
}

fn iter_bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

// ---------------------------------------------------------------------------
// eluder

struct EluderSearch<'a> {
    view: &'a SignView,
    memo: HashMap<u64, u32>,
    nodes: u64,
}

impl<'a> EluderSearch<'a> {
    /// Longest eluder continuation when the points in `agree` are already
    /// constrained to agree with the reference.
    fn longest(&mut self, agree: u64) -> u32 {
        if let Some(&v) = self.memo.get(&agree) {
            return v;
        }
        self.nodes += 1;
        let cap = (self.view.n_points - agree.count_ones() as usize) as u32;
        let mut best = 0u32;
        for f in 0..self.view.n_funcs {
            let d = self.view.diffs[f];
            if d & agree != 0 {
                continue;
            }
            for x in iter_bits(d & !agree) {
                let v = 1 + self.longest(agree | (1 << x));
                if v > best {
                    best = v;
                    if best == cap {
                        // no continuation can beat one point per remaining slot
                        self.memo.insert(agree, best);
                        return best;
                    }
                }
            }
        }
        self.memo.insert(agree, best);
        best
    }

    /// Greedy reconstruction of the lexicographically smallest maximum-length
    /// witness using the memoized lengths.
    fn reconstruct(&mut self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut agree = 0u64;
        let mut remaining = self.longest(0);
        while remaining > 0 {
            let mut chosen: Option<(usize, usize)> = None;
            for x in 0..self.view.n_points {
                if agree & (1 << x) != 0 {
                    continue;
                }
                if self.longest(agree | (1 << x)) + 1 != remaining {
                    continue;
                }
                if let Some(f) = (0..self.view.n_funcs)
                    .find(|&f| self.view.diffs[f] & agree == 0 && self.view.diffs[f] & (1 << x) != 0)
                {
                    chosen = Some((x, f));
                    break;
                }
            }
            let (x, f) = chosen.expect("memoized length admits a next entry");
            out.push((x, f));
            agree |= 1 << x;
            remaining -= 1;
        }
        out
    }
}

/// Exact combinatorial eluder dimension w.r.t. a reference function.
pub fn edim_comb(table: &FunctionClassTable, reference: &ReferenceFunction) -> Result<DimensionReport> {
    let view = SignView::build(table, reference)?;
    let mut search = EluderSearch { view: &view, memo: HashMap::new(), nodes: 0 };
    let entries = search.reconstruct();
    finish_report("edim", WitnessKind::Eluder, table, reference, entries, search.nodes)
}

/// Lexicographically first eluder witness of exactly `len` entries, if one
/// exists. Used by the randomized-construction repair loop where only the
/// question "is the value >= len" matters.
pub(crate) fn find_eluder_of_length(view: &SignView, len: usize) -> Option<Vec<(usize, usize)>> {
    fn dfs(view: &SignView, agree: u64, depth: usize, out: &mut Vec<(usize, usize)>) -> bool {
        if depth == 0 {
            return true;
        }
        for x in 0..view.n_points {
            if agree & (1 << x) != 0 {
                continue;
            }
            for f in 0..view.n_funcs {
                let d = view.diffs[f];
                if d & agree == 0 && d & (1 << x) != 0 {
                    out.push((x, f));
                    if dfs(view, agree | (1 << x), depth - 1, out) {
                        return true;
                    }
                    out.pop();
                    break; // any later f with the same pattern cannot change feasibility
                }
            }
        }
        false
    }
    let mut out = Vec::new();
    dfs(view, 0, len, &mut out).then_some(out)
}

// ---------------------------------------------------------------------------
// star

struct StarSearch<'a> {
    view: &'a SignView,
    nodes: u64,
}

impl<'a> StarSearch<'a> {
    /// candidate functions for point `x` given the full chosen set `set`:
    /// disagree exactly at `x` within `set`.
    fn feasible(&mut self, set: u64) -> bool {
        self.nodes += 1;
        iter_bits(set).all(|x| {
            self.view.diffs.iter().any(|&d| d & set == 1 << x)
        })
    }

    fn max_size(&mut self, next: usize, set: u64, best: &mut u32) {
        let size = set.count_ones();
        if size > *best {
            *best = size;
        }
        if next >= self.view.n_points {
            return;
        }
        let remaining = (self.view.n_points - next) as u32;
        if size + remaining <= *best {
            return;
        }
        let grown = set | (1 << next);
        if self.feasible(grown) {
            self.max_size(next + 1, grown, best);
        }
        self.max_size(next + 1, set, best);
    }

    /// lexicographically first feasible set of exactly `target` points
    fn first_of_size(&mut self, next: usize, set: u64, target: u32) -> Option<u64> {
        let size = set.count_ones();
        if size == target {
            return Some(set);
        }
        if next >= self.view.n_points || size + ((self.view.n_points - next) as u32) < target {
            return None;
        }
        let grown = set | (1 << next);
        if self.feasible(grown) {
            if let Some(s) = self.first_of_size(next + 1, grown, target) {
                return Some(s);
            }
        }
        self.first_of_size(next + 1, set, target)
    }
}

/// Exact combinatorial star number w.r.t. a reference function.
pub fn sdim_comb(table: &FunctionClassTable, reference: &ReferenceFunction) -> Result<DimensionReport> {
    let view = SignView::build(table, reference)?;
    let mut search = StarSearch { view: &view, nodes: 0 };
    let mut best = 0u32;
    search.max_size(0, 0, &mut best);
    let entries = if best == 0 {
        vec![]
    } else {
        let set = search.first_of_size(0, 0, best).expect("max size is attained");
        iter_bits(set)
            .map(|x| {
                let f = (0..view.n_funcs)
                    .find(|&f| view.diffs[f] & set == 1 << x)
                    .expect("feasible set has a function per point");
                (x, f)
            })
            .collect()
    };
    finish_report("sdim", WitnessKind::Star, table, reference, entries, search.nodes)
}

// ---------------------------------------------------------------------------
// threshold

struct ThresholdSearch<'a> {
    view: &'a SignView,
    nodes: u64,
}

impl<'a> ThresholdSearch<'a> {
    /// Extend a partial sequence. `cands[i]` holds the functions viable for
    /// position `i`: they agree on the points before `i` and disagree on the
    /// points from `i` onward (so far).
    fn extend(&mut self, points: &mut Vec<usize>, cands: &mut Vec<Vec<usize>>, best: &mut u32) {
        self.nodes += 1;
        let len = points.len() as u32;
        if len > *best {
            *best = len;
        }
        let used: u64 = points.iter().map(|&p| 1u64 << p).sum();
        let free = self.view.n_points as u32 - len;
        if len + free <= *best {
            return;
        }
        for y in 0..self.view.n_points {
            if used & (1 << y) != 0 {
                continue;
            }
            let ybit = 1u64 << y;
            // all existing positions must disagree at y
            let filtered: Option<Vec<Vec<usize>>> = cands
                .iter()
                .map(|c| {
                    let kept: Vec<usize> =
                        c.iter().copied().filter(|&f| self.view.diffs[f] & ybit != 0).collect();
                    (!kept.is_empty()).then_some(kept)
                })
                .collect();
            let Some(mut filtered) = filtered else { continue };
            let fresh: Vec<usize> = (0..self.view.n_funcs)
                .filter(|&f| self.view.diffs[f] & used == 0 && self.view.diffs[f] & ybit != 0)
                .collect();
            if fresh.is_empty() {
                continue;
            }
            filtered.push(fresh);
            points.push(y);
            self.extend(points, &mut filtered, best);
            points.pop();
        }
    }

    /// lexicographically first point sequence of exactly `target` length
    fn first_sequence(
        &mut self,
        points: &mut Vec<usize>,
        cands: &mut Vec<Vec<usize>>,
        target: u32,
    ) -> Option<(Vec<usize>, Vec<Vec<usize>>)> {
        if points.len() as u32 == target {
            return Some((points.clone(), cands.clone()));
        }
        let used: u64 = points.iter().map(|&p| 1u64 << p).sum();
        if points.len() as u32 + (self.view.n_points as u32 - points.len() as u32) < target {
            return None;
        }
        for y in 0..self.view.n_points {
            if used & (1 << y) != 0 {
                continue;
            }
            let ybit = 1u64 << y;
            let filtered: Option<Vec<Vec<usize>>> = cands
                .iter()
                .map(|c| {
                    let kept: Vec<usize> =
                        c.iter().copied().filter(|&f| self.view.diffs[f] & ybit != 0).collect();
                    (!kept.is_empty()).then_some(kept)
                })
                .collect();
            let Some(mut filtered) = filtered else { continue };
            let fresh: Vec<usize> = (0..self.view.n_funcs)
                .filter(|&f| self.view.diffs[f] & used == 0 && self.view.diffs[f] & ybit != 0)
                .collect();
            if fresh.is_empty() {
                continue;
            }
            filtered.push(fresh);
            points.push(y);
            if let Some(found) = self.first_sequence(points, &mut filtered, target) {
                points.pop();
                return Some(found);
            }
            points.pop();
        }
        None
    }
}

/// Exact combinatorial threshold dimension w.r.t. a reference function.
pub fn tdim_comb(table: &FunctionClassTable, reference: &ReferenceFunction) -> Result<DimensionReport> {
    let view = SignView::build(table, reference)?;
    let mut search = ThresholdSearch { view: &view, nodes: 0 };
    let mut best = 0u32;
    search.extend(&mut Vec::new(), &mut Vec::new(), &mut best);
    let entries = if best == 0 {
        vec![]
    } else {
        let (points, cands) = search
            .first_sequence(&mut Vec::new(), &mut Vec::new(), best)
            .expect("max length is attained");
        points
            .iter()
            .zip(cands.iter())
            .map(|(&p, c)| (p, *c.iter().min().expect("nonempty candidate set")))
            .collect()
    };
    finish_report("tdim", WitnessKind::Threshold, table, reference, entries, search.nodes)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Eluder,
    Star,
    Threshold,
}

impl Measure {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::Eluder => "edim",
            Measure::Star => "sdim",
            Measure::Threshold => "tdim",
        }
    }
}

pub fn dim_comb(
    table: &FunctionClassTable,
    reference: &ReferenceFunction,
    measure: Measure,
) -> Result<DimensionReport> {
    match measure {
        Measure::Eluder => edim_comb(table, reference),
        Measure::Star => sdim_comb(table, reference),
        Measure::Threshold => tdim_comb(table, reference),
    }
}

/// Maximum of a measure over all member columns as reference; ties broken by
/// the smallest column index.
pub fn dim_sup_over_refs(table: &FunctionClassTable, measure: Measure) -> Result<DimensionReport> {
    let mut best: Option<DimensionReport> = None;
    for j in 0..table.n_funcs() {
        let r = dim_comb(table, &ReferenceFunction::Column(j), measure)?;
        if best.as_ref().map_or(true, |b| r.value > b.value) {
            best = Some(r);
        }
    }
    Ok(best.expect("table has at least one function"))
}

fn finish_report(
    measure: &str,
    kind: WitnessKind,
    table: &FunctionClassTable,
    reference: &ReferenceFunction,
    entries: Vec<(usize, usize)>,
    nodes: u64,
) -> Result<DimensionReport> {
    let witness = WitnessSequence {
        kind,
        reference: reference.clone(),
        scale: num_rational::BigRational::zero(),
        entries,
    };
    debug_assert!(verify_witness(table, &witness)?.is_valid());
    Ok(DimensionReport {
        measure: measure.to_string(),
        reference: reference.clone(),
        scale: num_rational::BigRational::zero(),
        value: witness.entries.len(),
        witness,
        nodes_explored: nodes,
        exact: true,
    })
}

// ---------------------------------------------------------------------------
// VC dimension

const VC_MAX_POINTS: usize = 24;

/// Size of the largest shattered point subset.
pub fn vcdim(table: &FunctionClassTable) -> Result<usize> {
    if table.kind() != Kind::Binary {
        return Err(Error::WrongKind("VC dimension requires a binary table".into()));
    }
    if table.n_points() > VC_MAX_POINTS {
        return Err(Error::ResourceLimit(format!(
            "VC search supports at most {VC_MAX_POINTS} points, table has {}",
            table.n_points()
        )));
    }
    let n = table.n_points();
    let rows: Vec<u64> = (0..table.n_funcs())
        .map(|f| {
            let mut m = 0u64;
            for i in 0..n {
                if table.sign_entry(i, f) == 1 {
                    m |= 1 << i;
                }
            }
            m
        })
        .collect();
    // VC dim cannot exceed log2 |F|
    let cap = (usize::BITS - table.n_funcs().leading_zeros()) as usize;
    let mut best = 0usize;
    let mut subset = vec![0usize; cap.min(n)];
    fn shattered(points: &[usize], rows: &[u64]) -> bool {
        let k = points.len();
        let mut seen = vec![false; 1 << k];
        let mut count = 0usize;
        for &r in rows {
            let mut pat = 0usize;
            for (t, &p) in points.iter().enumerate() {
                if r & (1 << p) != 0 {
                    pat |= 1 << t;
                }
            }
            if !seen[pat] {
                seen[pat] = true;
                count += 1;
                if count == 1 << k {
                    return true;
                }
            }
        }
        false
    }
    fn search(
        start: usize,
        depth: usize,
        target: usize,
        n: usize,
        subset: &mut [usize],
        rows: &[u64],
    ) -> bool {
        if depth == target {
            return shattered(&subset[..target], rows);
        }
        for p in start..n {
            subset[depth] = p;
            if search(p + 1, depth + 1, target, n, subset, rows) {
                return true;
            }
        }
        false
    }
    for target in 1..=cap.min(n) {
        if search(0, 0, target, n, &mut subset, &rows) {
            best = target;
        } else {
            break;
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Littlestone dimension

const LDIM_BUDGET: u64 = 1 << 20;

/// Depth of the deepest complete mistake tree, by recursion over the version
/// space with memoization on its bitset.
pub fn ldim(table: &FunctionClassTable) -> Result<usize> {
    if table.kind() != Kind::Binary {
        return Err(Error::WrongKind("Littlestone dimension requires a binary table".into()));
    }
    if (table.n_points() as u64) * (table.n_funcs() as u64) > LDIM_BUDGET {
        return Err(Error::ResourceLimit(format!(
            "Littlestone search budget is |X|*|F| <= 2^20, table has {}x{}",
            table.n_points(),
            table.n_funcs()
        )));
    }
    let n = table.n_points();
    let nf = table.n_funcs();
    let blocks = nf.div_ceil(64);
    // plus[x] = version-space bitset of functions with f(x) = +1
    let mut plus = vec![vec![0u64; blocks]; n];
    for x in 0..n {
        for f in 0..nf {
            if table.sign_entry(x, f) == 1 {
                plus[x][f / 64] |= 1 << (f % 64);
            }
        }
    }
    let full: Vec<u64> = (0..blocks)
        .map(|b| {
            let hi = ((b + 1) * 64).min(nf);
            let lo = b * 64;
            if hi - lo == 64 {
                u64::MAX
            } else {
                (1u64 << (hi - lo)) - 1
            }
        })
        .collect();

    struct Ctx<'a> {
        plus: &'a [Vec<u64>],
        memo: HashMap<Vec<u64>, usize>,
        nodes: u64,
    }
    fn count(v: &[u64]) -> u32 {
        v.iter().map(|b| b.count_ones()).sum()
    }
    fn rec(ctx: &mut Ctx, version: &[u64]) -> Result<usize> {
        if count(version) <= 1 {
            return Ok(0);
        }
        if let Some(&v) = ctx.memo.get(version) {
            return Ok(v);
        }
        ctx.nodes += 1;
        if ctx.nodes > LDIM_BUDGET {
            return Err(Error::ResourceLimit("Littlestone recursion budget exceeded".into()));
        }
        let n = ctx.plus.len();
        let mut best = 0usize;
        for x in 0..n {
            let vplus: Vec<u64> = version.iter().zip(&ctx.plus[x]).map(|(a, b)| a & b).collect();
            let vminus: Vec<u64> = version.iter().zip(&ctx.plus[x]).map(|(a, b)| a & !b).collect();
            if count(&vplus) == 0 || count(&vminus) == 0 {
                continue;
            }
            let d = 1 + rec(ctx, &vplus)?.min(rec(ctx, &vminus)?);
            best = best.max(d);
        }
        ctx.memo.insert(version.to_vec(), best);
        Ok(best)
    }
    let mut ctx = Ctx { plus: &plus, memo: HashMap::new(), nodes: 0 };
    rec(&mut ctx, &full)
}
