//! Scale-sensitive eluder dimension, star number and threshold dimension for
//! real-valued classes, plus the two explicit lower-bound constructions
//! (a linear class whose eluder dimension grows like d·log(1/ε), and a ReLU
//! class with a large star witness from a sphere packing).
//!
//! All comparisons (`|deviation| > ε`, squared sums ≤ ε²) are exact rational
//! arithmetic. Sequences may repeat points; only the eluder measure can
//! actually use repeats (for star and threshold a repeated point forces a
//! squared deviation above ε² at some position), and because repeats can make
//! eluder sequences unbounded, every search runs under a length cap.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combodim::Measure;
use crate::error::{Error, Result};
use crate::ratio::{decimal12, format_rational, rat_frac, rat_i64, to_f64};
use crate::table::{FunctionClassTable, Kind};
use crate::witness::{
    verify_witness, DimensionReport, ReferenceFunction, WitnessKind, WitnessSequence,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupMode {
    ExactAtEps,
    SupOverCandidates,
}

#[derive(Debug, Clone)]
pub struct ScaleSearchConfig {
    pub eps: BigRational,
    /// Maximum sequence length explored; `None` means 4·|X| at call time.
    pub length_cap: Option<usize>,
    pub allow_repeats: bool,
    pub sup_mode: SupMode,
}

impl ScaleSearchConfig {
    pub fn new(eps: BigRational) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive, got {}",
                format_rational(&eps)
            )));
        }
        Ok(Self { eps, length_cap: None, allow_repeats: true, sup_mode: SupMode::ExactAtEps })
    }

    pub fn with_cap(mut self, cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(Error::InvalidParameter("length cap must be at least 1".into()));
        }
        self.length_cap = Some(cap);
        Ok(self)
    }

    fn cap_for(&self, table: &FunctionClassTable) -> usize {
        self.length_cap.unwrap_or(4 * table.n_points())
    }
}

/// Precomputed deviations from the reference: squared deviation per
/// (point, function) and whether the absolute deviation exceeds ε.
struct ScaleView {
    n_points: usize,
    n_funcs: usize,
    dev2: Vec<Vec<BigRational>>,
    big: Vec<Vec<bool>>,
}

impl ScaleView {
    fn build(
        table: &FunctionClassTable,
        reference: &ReferenceFunction,
        eps: &BigRational,
    ) -> Result<Self> {
        let refv = reference.resolve(table)?;
        let n = table.n_points();
        let nf = table.n_funcs();
        let mut dev2 = vec![Vec::with_capacity(nf); n];
        let mut big = vec![Vec::with_capacity(nf); n];
        for x in 0..n {
            for f in 0..nf {
                let d = table.entry(x, f) - &refv[x];
                big[x].push(d.abs() > *eps);
                dev2[x].push(&d * &d);
            }
        }
        Ok(Self { n_points: n, n_funcs: nf, dev2, big })
    }
}

// ---------------------------------------------------------------------------
// eluder: DP over the multiset of already-played points

struct ScaleEluder<'a> {
    view: &'a ScaleView,
    eps2: BigRational,
    cap: usize,
    allow_repeats: bool,
    /// longest continuation (capped) keyed by the sorted point multiset
    memo: HashMap<Vec<u16>, usize>,
    nodes: u64,
}

impl<'a> ScaleEluder<'a> {
    /// `sums[f]` = Σ over the chosen multiset of squared deviations of `f`.
    fn longest(&mut self, chosen: &Vec<u16>, sums: &[BigRational]) -> usize {
        if let Some(&v) = self.memo.get(chosen) {
            return v;
        }
        self.nodes += 1;
        let rem = self.cap - chosen.len();
        let mut best = 0usize;
        if rem > 0 {
            for x in 0..self.view.n_points {
                if !self.allow_repeats && chosen.binary_search(&(x as u16)).is_ok() {
                    continue;
                }
                let usable = (0..self.view.n_funcs)
                    .any(|f| self.view.big[x][f] && sums[f] <= self.eps2);
                if !usable {
                    continue;
                }
                let mut next = chosen.clone();
                let pos = next.partition_point(|&p| p < x as u16);
                next.insert(pos, x as u16);
                let next_sums: Vec<BigRational> =
                    sums.iter().enumerate().map(|(g, s)| s + &self.view.dev2[x][g]).collect();
                let v = 1 + self.longest(&next, &next_sums);
                if v > best {
                    best = v;
                    if best == rem {
                        break;
                    }
                }
            }
        }
        self.memo.insert(chosen.clone(), best);
        best
    }

    fn reconstruct(&mut self) -> Vec<(usize, usize)> {
        let zero_sums = vec![BigRational::zero(); self.view.n_funcs];
        let mut chosen: Vec<u16> = Vec::new();
        let mut sums = zero_sums;
        let mut remaining = self.longest(&chosen, &sums);
        let mut out = Vec::new();
        while remaining > 0 {
            let mut picked: Option<(usize, usize)> = None;
            for x in 0..self.view.n_points {
                if !self.allow_repeats && chosen.binary_search(&(x as u16)).is_ok() {
                    continue;
                }
                let Some(f) = (0..self.view.n_funcs)
                    .find(|&f| self.view.big[x][f] && sums[f] <= self.eps2)
                else {
                    continue;
                };
                let mut next = chosen.clone();
                let pos = next.partition_point(|&p| p < x as u16);
                next.insert(pos, x as u16);
                let next_sums: Vec<BigRational> =
                    sums.iter().enumerate().map(|(g, s)| s + &self.view.dev2[x][g]).collect();
                if 1 + self.longest(&next, &next_sums) == remaining {
                    picked = Some((x, f));
                    chosen = next;
                    sums = next_sums;
                    break;
                }
            }
            let (x, f) = picked.expect("memoized length admits a next entry");
            out.push((x, f));
            remaining -= 1;
        }
        out
    }
}

/// Exact scale-sensitive eluder dimension, capped at `cfg.length_cap`.
pub fn edim_scale(
    table: &FunctionClassTable,
    reference: &ReferenceFunction,
    cfg: &ScaleSearchConfig,
) -> Result<DimensionReport> {
    let view = ScaleView::build(table, reference, &cfg.eps)?;
    let cap = cfg.cap_for(table);
    let mut search = ScaleEluder {
        view: &view,
        eps2: &cfg.eps * &cfg.eps,
        cap,
        allow_repeats: cfg.allow_repeats,
        memo: HashMap::new(),
        nodes: 0,
    };
    let entries = search.reconstruct();
    finish_scale_report("edim", WitnessKind::Eluder, table, reference, &cfg.eps, entries, search.nodes, cap)
}

// ---------------------------------------------------------------------------
// star: subsets of distinct points with per-position candidate functions

/// Candidates for one chosen position: (function, Σ dev² over the *other*
/// chosen points). A function stays viable while that sum is ≤ ε².
type StarCands = Vec<Vec<(usize, BigRational)>>;

struct ScaleStar<'a> {
    view: &'a ScaleView,
    eps2: BigRational,
    cap: usize,
    nodes: u64,
}

impl<'a> ScaleStar<'a> {
    /// Try to add point `y`; `tot[f]` = Σ dev² of `f` over the chosen set.
    fn grow(
        &self,
        y: usize,
        cands: &StarCands,
        tot: &[BigRational],
    ) -> Option<(StarCands, Vec<BigRational>)> {
        let mut next: StarCands = Vec::with_capacity(cands.len() + 1);
        for c in cands {
            let kept: Vec<(usize, BigRational)> = c
                .iter()
                .filter_map(|(f, s)| {
                    let s2 = s + &self.view.dev2[y][*f];
                    (s2 <= self.eps2).then_some((*f, s2))
                })
                .collect();
            if kept.is_empty() {
                return None;
            }
            next.push(kept);
        }
        let fresh: Vec<(usize, BigRational)> = (0..self.view.n_funcs)
            .filter(|&f| self.view.big[y][f] && tot[f] <= self.eps2)
            .map(|f| (f, tot[f].clone()))
            .collect();
        if fresh.is_empty() {
            return None;
        }
        next.push(fresh);
        let next_tot: Vec<BigRational> =
            tot.iter().enumerate().map(|(g, s)| s + &self.view.dev2[y][g]).collect();
        Some((next, next_tot))
    }

    fn max_size(
        &mut self,
        next: usize,
        size: usize,
        cands: &StarCands,
        tot: &[BigRational],
        best: &mut usize,
    ) {
        self.nodes += 1;
        *best = (*best).max(size);
        if next >= self.view.n_points
            || size >= self.cap
            || size + (self.view.n_points - next) <= *best
        {
            return;
        }
        if let Some((grown, gtot)) = self.grow(next, cands, tot) {
            self.max_size(next + 1, size + 1, &grown, &gtot, best);
        }
        self.max_size(next + 1, size, cands, tot, best);
    }

    fn first_of_size(
        &mut self,
        next: usize,
        points: &mut Vec<usize>,
        cands: &StarCands,
        tot: &[BigRational],
        target: usize,
    ) -> Option<(Vec<usize>, StarCands)> {
        if points.len() == target {
            return Some((points.clone(), cands.clone()));
        }
        if next >= self.view.n_points || points.len() + (self.view.n_points - next) < target {
            return None;
        }
        if let Some((grown, gtot)) = self.grow(next, cands, tot) {
            points.push(next);
            if let Some(found) = self.first_of_size(next + 1, points, &grown, &gtot, target) {
                points.pop();
                return Some(found);
            }
            points.pop();
        }
        self.first_of_size(next + 1, points, cands, tot, target)
    }
}

/// Exact scale-sensitive star number.
pub fn sdim_scale(
    table: &FunctionClassTable,
    reference: &ReferenceFunction,
    cfg: &ScaleSearchConfig,
) -> Result<DimensionReport> {
    let view = ScaleView::build(table, reference, &cfg.eps)?;
    let cap = cfg.cap_for(table);
    let mut search =
        ScaleStar { view: &view, eps2: &cfg.eps * &cfg.eps, cap, nodes: 0 };
    let zero_tot = vec![BigRational::zero(); view.n_funcs];
    let mut best = 0usize;
    search.max_size(0, 0, &Vec::new(), &zero_tot, &mut best);
    let entries = if best == 0 {
        vec![]
    } else {
        let (points, cands) = search
            .first_of_size(0, &mut Vec::new(), &Vec::new(), &zero_tot, best)
            .expect("max size is attained");
        points
            .iter()
            .zip(cands.iter())
            .map(|(&p, c)| (p, c.iter().map(|&(f, _)| f).min().expect("nonempty")))
            .collect()
    };
    finish_scale_report("sdim", WitnessKind::Star, table, reference, &cfg.eps, entries, search.nodes, cap)
}

// ---------------------------------------------------------------------------
// threshold: ordered distinct points; position i's candidates carry the
// squared-deviation sum over the points before i (fixed once placed) and are
// filtered by each later point (suffix disagreement)

type ThrCands = Vec<Vec<(usize, BigRational)>>;

struct ScaleThreshold<'a> {
    view: &'a ScaleView,
    eps2: BigRational,
    cap: usize,
    nodes: u64,
}

impl<'a> ScaleThreshold<'a> {
    fn append(
        &self,
        y: usize,
        used: &[usize],
        cands: &ThrCands,
        tot: &[BigRational],
    ) -> Option<(ThrCands, Vec<BigRational>)> {
        if used.contains(&y) {
            return None;
        }
        let mut next: ThrCands = Vec::with_capacity(cands.len() + 1);
        for c in cands {
            let kept: Vec<(usize, BigRational)> =
                c.iter().filter(|&&(f, _)| self.view.big[y][f]).cloned().collect();
            if kept.is_empty() {
                return None;
            }
            next.push(kept);
        }
        let fresh: Vec<(usize, BigRational)> = (0..self.view.n_funcs)
            .filter(|&f| self.view.big[y][f] && tot[f] <= self.eps2)
            .map(|f| (f, tot[f].clone()))
            .collect();
        if fresh.is_empty() {
            return None;
        }
        next.push(fresh);
        let next_tot: Vec<BigRational> =
            tot.iter().enumerate().map(|(g, s)| s + &self.view.dev2[y][g]).collect();
        Some((next, next_tot))
    }

    fn longest(
        &mut self,
        points: &mut Vec<usize>,
        cands: &ThrCands,
        tot: &[BigRational],
        best: &mut usize,
    ) {
        self.nodes += 1;
        *best = (*best).max(points.len());
        if points.len() >= self.cap
            || points.len() + (self.view.n_points - points.len()) <= *best
        {
            return;
        }
        for y in 0..self.view.n_points {
            if let Some((grown, gtot)) = self.append(y, points, cands, tot) {
                points.push(y);
                self.longest(points, &grown, &gtot, best);
                points.pop();
            }
        }
    }

    fn first_sequence(
        &mut self,
        points: &mut Vec<usize>,
        cands: &ThrCands,
        tot: &[BigRational],
        target: usize,
    ) -> Option<(Vec<usize>, ThrCands)> {
        if points.len() == target {
            return Some((points.clone(), cands.clone()));
        }
        for y in 0..self.view.n_points {
            if let Some((grown, gtot)) = self.append(y, points, cands, tot) {
                points.push(y);
                if let Some(found) = self.first_sequence(points, &grown, &gtot, target) {
                    points.pop();
                    return Some(found);
                }
                points.pop();
            }
        }
        None
    }
}

/// Exact scale-sensitive threshold dimension.
pub fn tdim_scale(
    table: &FunctionClassTable,
    reference: &ReferenceFunction,
    cfg: &ScaleSearchConfig,
) -> Result<DimensionReport> {
    let view = ScaleView::build(table, reference, &cfg.eps)?;
    let cap = cfg.cap_for(table);
    let mut search =
        ScaleThreshold { view: &view, eps2: &cfg.eps * &cfg.eps, cap, nodes: 0 };
    let zero_tot = vec![BigRational::zero(); view.n_funcs];
    let mut best = 0usize;
    search.longest(&mut Vec::new(), &Vec::new(), &zero_tot, &mut best);
    let entries = if best == 0 {
        vec![]
    } else {
        let (points, cands) = search
            .first_sequence(&mut Vec::new(), &Vec::new(), &zero_tot, best)
            .expect("max length is attained");
        points
            .iter()
            .zip(cands.iter())
            .map(|(&p, c)| (p, c.iter().map(|&(f, _)| f).min().expect("nonempty")))
            .collect()
    };
    finish_scale_report("tdim", WitnessKind::Threshold, table, reference, &cfg.eps, entries, search.nodes, cap)
}

// ---------------------------------------------------------------------------

pub fn dim_scale(
    table: &FunctionClassTable,
    reference: &ReferenceFunction,
    measure: Measure,
    cfg: &ScaleSearchConfig,
) -> Result<DimensionReport> {
    if cfg.sup_mode == SupMode::SupOverCandidates {
        return dim_sup_over_scales(table, reference, measure, &cfg.eps);
    }
    match measure {
        Measure::Eluder => edim_scale(table, reference, cfg),
        Measure::Star => sdim_scale(table, reference, cfg),
        Measure::Threshold => tdim_scale(table, reference, cfg),
    }
}

/// sup over ε′ ≥ eps_min of the exact measure. The value as a function of ε′
/// is piecewise constant and can only change where ε′ crosses an absolute
/// deviation, so it suffices to evaluate just below each deviation (factor
/// 1 − 2⁻²⁰) and at eps_min itself. The achieving candidate is recorded as
/// the report's scale.
pub fn dim_sup_over_scales(
    table: &FunctionClassTable,
    reference: &ReferenceFunction,
    measure: Measure,
    eps_min: &BigRational,
) -> Result<DimensionReport> {
    if !eps_min.is_positive() {
        return Err(Error::InvalidParameter("eps_min must be positive".into()));
    }
    let refv = reference.resolve(table)?;
    let shrink = rat_frac((1 << 20) - 1, 1 << 20);
    let mut candidates: Vec<BigRational> = Vec::new();
    for x in 0..table.n_points() {
        for f in 0..table.n_funcs() {
            let d = (table.entry(x, f) - &refv[x]).abs();
            if d.is_zero() {
                continue;
            }
            let c = &d * &shrink;
            if c >= *eps_min {
                candidates.push(c);
            }
        }
    }
    candidates.push(eps_min.clone());
    candidates.sort();
    candidates.dedup();
    candidates.reverse(); // largest first, so ties resolve to the largest scale
    let mut best: Option<DimensionReport> = None;
    for eps in candidates {
        let cfg = ScaleSearchConfig::new(eps)?;
        let r = dim_scale(table, reference, measure, &cfg)?;
        if best.as_ref().map_or(true, |b| r.value > b.value) {
            best = Some(r);
        }
    }
    Ok(best.expect("candidate set contains eps_min"))
}

fn finish_scale_report(
    measure: &str,
    kind: WitnessKind,
    table: &FunctionClassTable,
    reference: &ReferenceFunction,
    eps: &BigRational,
    entries: Vec<(usize, usize)>,
    nodes: u64,
    cap: usize,
) -> Result<DimensionReport> {
    let witness = WitnessSequence {
        kind,
        reference: reference.clone(),
        scale: eps.clone(),
        entries,
    };
    debug_assert!(verify_witness(table, &witness)?.is_valid());
    let value = witness.entries.len();
    Ok(DimensionReport {
        measure: measure.to_string(),
        reference: reference.clone(),
        scale: eps.clone(),
        value,
        witness,
        nodes_explored: nodes,
        exact: value < cap,
    })
}

// ---------------------------------------------------------------------------
// explicit lower-bound constructions

/// Linear class on scaled basis points whose eluder dimension at scale `eps`
/// is at least d·(k+1), k = ⌊log2(1/(1.2·eps))⌋. Per dimension i the points
/// are e_i/2^(k−j) and the functions are θ = α·2^(k−j)·e_i with α = 1.2·eps:
/// each function deviates by exactly α > ε at its own point while its
/// squared deviations on the earlier points sum to at most α²/3 < ε².
pub fn gen_linear_eluder_witness(
    d: usize,
    eps: &BigRational,
) -> Result<(FunctionClassTable, WitnessSequence)> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let two = rat_i64(2);
    if !eps.is_positive() || eps * eps * &two >= rat_i64(1) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1/sqrt(2)), got {}",
            format_rational(eps)
        )));
    }
    let alpha = eps * rat_frac(6, 5);
    // k = floor(log2(1/alpha)); alpha < 2^(1/2)·eps < 1 so k >= 0
    let mut k = 0usize;
    let mut pow = &alpha * &two; // alpha·2^(k+1)
    while pow <= rat_i64(1) {
        k += 1;
        pow = &pow * &two;
    }
    let levels = k + 1;
    let mut points = Vec::with_capacity(d * levels);
    let mut functions = Vec::with_capacity(d * levels);
    for i in 1..=d {
        for j in 0..levels {
            let den = 1u64 << (k - j);
            points.push(format!("e{i}/{den}"));
            functions.push(format!("theta{i}x{den}"));
        }
    }
    // function (i', j') evaluated at point (i, j): 0 off-dimension, else
    // alpha·2^(j−j')
    let mut values = Vec::with_capacity(d * levels);
    for i in 0..d {
        for j in 0..levels {
            let mut row = Vec::with_capacity(d * levels);
            for i2 in 0..d {
                for j2 in 0..levels {
                    if i != i2 {
                        row.push(BigRational::zero());
                    } else if j >= j2 {
                        row.push(&alpha * rat_i64(1 << (j - j2)));
                    } else {
                        row.push(&alpha / rat_i64(1 << (j2 - j)));
                    }
                }
            }
            values.push(row);
        }
    }
    let table = FunctionClassTable::new(points, functions, values, Kind::Real)?;
    let witness = WitnessSequence {
        kind: WitnessKind::Eluder,
        reference: ReferenceFunction::zeros(d * levels),
        scale: eps.clone(),
        entries: (0..d * levels).map(|t| (t, t)).collect(),
    };
    match verify_witness(&table, &witness)? {
        crate::witness::Verification::Valid => Ok((table, witness)),
        crate::witness::Verification::Violation { position, msg } => Err(Error::ConstructionFailure(
            format!("linear eluder witness failed self-check at position {position}: {msg}"),
        )),
    }
}

/// Greedy maximal packing of unit vectors in R^d with pairwise inner product
/// at most `max_dot`, fed by a fixed-seed uniform candidate stream. In one
/// dimension the only unit vectors are ±1.
pub fn pack_unit_vectors(d: usize, max_dot: f64, budget: usize) -> Vec<Vec<f64>> {
    if d == 1 {
        let mut out = vec![vec![1.0]];
        if -1.0 <= max_dot {
            out.push(vec![-1.0]);
        }
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a7c_2e01);
    let mut packed: Vec<Vec<f64>> = Vec::new();
    let mut tried = 0usize;
    while tried < budget {
        let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm2: f64 = v.iter().map(|a| a * a).sum();
        if norm2 <= 1e-6 || norm2 > 1.0 {
            continue; // rejection sampling keeps the direction uniform
        }
        tried += 1;
        let norm = norm2.sqrt();
        for a in &mut v {
            *a /= norm;
        }
        let ok = packed
            .iter()
            .all(|u| u.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() <= max_dot);
        if ok {
            packed.push(v);
        }
    }
    packed
}

pub const PACKING_BUDGET: usize = 50_000;

/// The packed vector set behind `gen_relu_star_witness` for the same
/// parameters (deterministic, so callers can reconstruct the geometry).
pub fn relu_class_vectors(d: usize, eps: &BigRational, r: &BigRational) -> Result<Vec<Vec<f64>>> {
    if d == 0 || d > 6 {
        return Err(Error::InvalidParameter(format!("dimension must be in 1..=6, got {d}")));
    }
    if !r.is_positive() || !eps.is_positive() || eps * rat_i64(4) >= *r {
        return Err(Error::InvalidParameter("need 0 < eps < R/4".into()));
    }
    let threshold = rat_i64(1) - eps * rat_i64(2) / r;
    Ok(pack_unit_vectors(d, to_f64(&threshold), PACKING_BUDGET))
}

/// ReLU class f_u(x) = relu(⟨u,x⟩ − (1 − 2ε/R))·R/2 evaluated on a packed
/// set U of unit vectors. Off-diagonal entries vanish by the packing
/// constraint, diagonal entries are ≈ ε, so U itself is a star witness w.r.t.
/// the zero function at any scale below the smallest diagonal value.
pub fn gen_relu_star_witness(
    d: usize,
    eps: &BigRational,
    r: &BigRational,
) -> Result<(FunctionClassTable, WitnessSequence)> {
    if d == 0 || d > 6 {
        return Err(Error::InvalidParameter(format!("dimension must be in 1..=6, got {d}")));
    }
    if !r.is_positive() {
        return Err(Error::InvalidParameter("range R must be positive".into()));
    }
    if !eps.is_positive() || eps * rat_i64(4) >= *r {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, R/4), got {} with R = {}",
            format_rational(eps),
            format_rational(r)
        )));
    }
    let threshold = rat_i64(1) - eps * rat_i64(2) / r;
    let thr_f = to_f64(&threshold);
    let r_f = to_f64(r);
    let vectors = relu_class_vectors(d, eps, r)?;
    let target = if d == 1 {
        2
    } else {
        (r_f / (4.0 * to_f64(eps))).powf(d as f64 / 2.0).ceil() as usize
    };
    if vectors.len() < target {
        return Err(Error::ConstructionFailure(format!(
            "packing produced {} unit vectors, below the guarantee {target}",
            vectors.len()
        )));
    }
    let m = vectors.len();
    let points: Vec<String> = (0..m).map(|t| format!("u{t}")).collect();
    let functions: Vec<String> = (0..m).map(|t| format!("relu_u{t}")).collect();
    let mut values = vec![vec![BigRational::zero(); m]; m];
    let mut min_diag: Option<BigRational> = None;
    for i in 0..m {
        for j in 0..m {
            let dot: f64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
            let z = dot - thr_f;
            if z > 0.0 {
                let v = decimal12(z * r_f / 2.0);
                if i == j {
                    min_diag = Some(match min_diag {
                        Some(cur) if cur <= v => cur,
                        _ => v.clone(),
                    });
                }
                values[i][j] = v;
            }
        }
    }
    let min_diag = min_diag.ok_or_else(|| {
        Error::ConstructionFailure("packing produced no positive diagonal entry".into())
    })?;
    let scale = &min_diag * rat_frac((1 << 20) - 1, 1 << 20);
    let table = FunctionClassTable::new(points, functions, values, Kind::Real)?;
    let witness = WitnessSequence {
        kind: WitnessKind::Star,
        reference: ReferenceFunction::zeros(m),
        scale,
        entries: (0..m).map(|t| (t, t)).collect(),
    };
    match verify_witness(&table, &witness)? {
        crate::witness::Verification::Valid => Ok((table, witness)),
        crate::witness::Verification::Violation { position, msg } => Err(Error::ConstructionFailure(
            format!("relu star witness failed self-check at position {position}: {msg}"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combodim::dim_comb;
    use crate::ratio::parse_rational;
    use crate::table::{gen_scale_counterexample, gen_thresholds};
    use crate::testutil::{naive_scale_dim, random_rational_table};

    fn cfg(eps: &str) -> ScaleSearchConfig {
        ScaleSearchConfig::new(parse_rational(eps).unwrap()).unwrap()
    }

    #[test]
    fn counterexample_splits_the_three_measures() {
        for n in [3usize, 8] {
            let t = gen_scale_counterexample(n, &parse_rational("0.5").unwrap(), &parse_rational("1.01").unwrap())
                .unwrap();
            let zero = ReferenceFunction::zeros(n);
            let c = cfg("0.5");
            assert_eq!(edim_scale(&t, &zero, &c).unwrap().value, n);
            assert_eq!(sdim_scale(&t, &zero, &c).unwrap().value, 2.min(n));
            assert_eq!(tdim_scale(&t, &zero, &c).unwrap().value, 1);
        }
    }

    #[test]
    fn binary_tables_match_combinatorial_below_two() {
        use crate::combodim::Measure;
        let t = gen_thresholds(10).unwrap();
        let fr = ReferenceFunction::Column(10);
        let c = cfg("0.5");
        assert_eq!(edim_scale(&t, &fr, &c).unwrap().value, 10);
        let t6 = gen_thresholds(6).unwrap();
        let fr6 = ReferenceFunction::Column(6);
        assert_eq!(tdim_scale(&t6, &fr6, &cfg("1")).unwrap().value, 6);
        for seed in 0..12u64 {
            let rt = crate::testutil::random_binary_table(5, 5, seed);
            let fr = ReferenceFunction::Column(0);
            for m in [Measure::Eluder, Measure::Star, Measure::Threshold] {
                let comb = dim_comb(&rt, &fr, m).unwrap().value;
                let scl = dim_scale(&rt, &fr, m, &cfg("1.5")).unwrap().value;
                assert_eq!(comb, scl, "seed {seed} measure {m:?}");
            }
        }
    }

    #[test]
    fn huge_scale_gives_zero() {
        let t = gen_thresholds(4).unwrap();
        let fr = ReferenceFunction::Column(4);
        let c = cfg("5");
        assert_eq!(edim_scale(&t, &fr, &c).unwrap().value, 0);
        assert_eq!(tdim_scale(&t, &fr, &c).unwrap().value, 0);
    }

    #[test]
    fn star_at_most_eluder() {
        for seed in 0..10u64 {
            let t = random_rational_table(4, 4, seed);
            let zero = ReferenceFunction::zeros(4);
            let c = cfg("0.75");
            let e = edim_scale(&t, &zero, &c).unwrap().value;
            let s = sdim_scale(&t, &zero, &c).unwrap().value;
            assert!(s <= e, "seed {seed}: star {s} > eluder {e}");
        }
    }

    #[test]
    fn searches_match_naive_enumeration() {
        use crate::combodim::Measure;
        for seed in 0..8u64 {
            let t = random_rational_table(4, 4, seed);
            let zero = ReferenceFunction::zeros(4);
            for eps in ["0.5", "1.25"] {
                let c = cfg(eps).with_cap(6).unwrap();
                for m in [Measure::Eluder, Measure::Star, Measure::Threshold] {
                    let fast = dim_scale(&t, &zero, m, &c).unwrap().value;
                    let naive =
                        naive_scale_dim(&t, &zero, m, &parse_rational(eps).unwrap(), 6);
                    assert_eq!(fast, naive, "seed {seed} eps {eps} measure {m:?}");
                }
            }
        }
    }

    #[test]
    fn cap_truncation_is_flagged() {
        // repeating a point is self-defeating (its own deviation lands in the
        // later prefix sum), so the default cap of 4·|X| never binds and the
        // value here is exactly 2; an explicit smaller cap truncates and is
        // reported as inexact
        let t = FunctionClassTable::new(
            vec!["a".into(), "b".into()],
            vec!["f".into(), "g".into()],
            vec![
                vec![rat_i64(1), BigRational::zero()],
                vec![BigRational::zero(), rat_i64(1)],
            ],
            Kind::Real,
        )
        .unwrap();
        let zero = ReferenceFunction::zeros(2);
        let r = edim_scale(&t, &zero, &cfg("0.5")).unwrap();
        assert_eq!(r.value, 2);
        assert!(r.exact);
        let capped = edim_scale(&t, &zero, &cfg("0.5").with_cap(1).unwrap()).unwrap();
        assert_eq!(capped.value, 1);
        assert!(!capped.exact);
        let no_repeats = ScaleSearchConfig { allow_repeats: false, ..cfg("0.5") };
        let r2 = edim_scale(&t, &zero, &no_repeats).unwrap();
        assert_eq!(r2.value, 2);
        assert!(r2.exact);
    }

    #[test]
    fn sup_over_scales_sweeps_candidates() {
        let t = gen_scale_counterexample(4, &rat_i64(1), &parse_rational("1.01").unwrap()).unwrap();
        let zero = ReferenceFunction::zeros(4);
        let r = dim_sup_over_scales(&t, &zero, crate::combodim::Measure::Eluder, &parse_rational("0.9").unwrap())
            .unwrap();
        assert_eq!(r.value, 4);
        // above all deviations: nothing to disagree on
        let hi = dim_sup_over_scales(&t, &zero, crate::combodim::Measure::Eluder, &rat_i64(7)).unwrap();
        assert_eq!(hi.value, 0);
    }

    #[test]
    fn sup_is_monotone_in_eps_min() {
        for seed in 0..6u64 {
            let t = random_rational_table(3, 4, seed);
            let zero = ReferenceFunction::zeros(3);
            let mut prev = usize::MAX;
            for eps in ["0.25", "0.5", "1", "2"] {
                let v = dim_sup_over_scales(
                    &t,
                    &zero,
                    crate::combodim::Measure::Eluder,
                    &parse_rational(eps).unwrap(),
                )
                .unwrap()
                .value;
                assert!(v <= prev, "seed {seed}: sup not monotone at eps_min {eps}");
                prev = v;
            }
        }
    }

    #[test]
    fn linear_eluder_witness_lengths() {
        let (t1, w1) = gen_linear_eluder_witness(1, &parse_rational("0.1").unwrap()).unwrap();
        assert_eq!(w1.entries.len(), 4); // alpha = 0.12, k = 3
        assert!(verify_witness(&t1, &w1).unwrap().is_valid());
        let (_, w2) = gen_linear_eluder_witness(2, &parse_rational("0.1").unwrap()).unwrap();
        assert_eq!(w2.entries.len(), 8);
        assert!(gen_linear_eluder_witness(1, &parse_rational("0.9").unwrap()).is_err());
    }

    #[test]
    fn relu_star_witness_d2() {
        let (t, w) = gen_relu_star_witness(2, &parse_rational("0.05").unwrap(), &rat_i64(2)).unwrap();
        assert!(w.entries.len() >= 10, "packed only {}", w.entries.len());
        assert!(verify_witness(&t, &w).unwrap().is_valid());
        // the search itself finds a star set at least as large
        let c = ScaleSearchConfig::new(w.scale.clone()).unwrap();
        let s = sdim_scale(&t, &ReferenceFunction::zeros(t.n_points()), &c).unwrap();
        assert!(s.value >= w.entries.len());
    }

    #[test]
    fn relu_star_witness_d1() {
        let (t, w) = gen_relu_star_witness(1, &parse_rational("0.1").unwrap(), &rat_i64(2)).unwrap();
        assert!(w.entries.len() >= 2);
        assert!(verify_witness(&t, &w).unwrap().is_valid());
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(ScaleSearchConfig::new(BigRational::zero()).is_err());
        assert!(cfg("0.5").with_cap(0).is_err());
        assert!(gen_relu_star_witness(2, &rat_i64(1), &rat_i64(2)).is_err()); // eps >= R/4
        assert!(gen_relu_star_witness(7, &parse_rational("0.05").unwrap(), &rat_i64(2)).is_err());
    }
}
