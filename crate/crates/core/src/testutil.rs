//! Independent brute-force oracles and fixture generators used by the test
//! suites. Everything here enumerates straight from the definitions and
//! shares no search code with the production paths.
#![doc(hidden)]

use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combodim::Measure;
use crate::ratio::rat_i64;
use crate::table::{FunctionClassTable, Kind};
use crate::witness::ReferenceFunction;

pub fn random_binary_table(n_points: usize, n_funcs: usize, seed: u64) -> FunctionClassTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n_points).map(|i| format!("x{i}")).collect();
    let functions = (0..n_funcs).map(|j| format!("f{j}")).collect();
    let values = (0..n_points)
        .map(|_| (0..n_funcs).map(|_| rat_i64(if rng.gen_bool(0.5) { 1 } else { -1 })).collect())
        .collect();
    FunctionClassTable::new(points, functions, values, Kind::Binary).unwrap()
}

fn signs(table: &FunctionClassTable, reference: &ReferenceFunction) -> Vec<i8> {
    reference
        .resolve(table)
        .unwrap()
        .iter()
        .map(|v| if v.is_positive() { 1 } else { -1 })
        .collect()
}

/// Valid prefix check straight from the combinatorial definitions.
fn prefix_valid(
    table: &FunctionClassTable,
    refs: &[i8],
    measure: Measure,
    seq: &[(usize, usize)],
) -> bool {
    for (i, &(xi, fi)) in seq.iter().enumerate() {
        if table.sign_entry(xi, fi) == refs[xi] {
            return false;
        }
        match measure {
            Measure::Eluder => {
                for &(xj, _) in &seq[..i] {
                    if table.sign_entry(xj, fi) != refs[xj] {
                        return false;
                    }
                }
            }
            Measure::Star => {
                for (j, &(xj, _)) in seq.iter().enumerate() {
                    if j != i && table.sign_entry(xj, fi) != refs[xj] {
                        return false;
                    }
                }
            }
            Measure::Threshold => {
                for (k, &(xk, _)) in seq.iter().enumerate() {
                    let agree = table.sign_entry(xk, fi) == refs[xk];
                    if k < i && !agree {
                        return false;
                    }
                    if k >= i && agree {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Naive combinatorial dimension by depth-first enumeration of all valid
/// sequences (each measure's validity is closed under prefixes, so invalid
/// prefixes can be dropped without losing any sequence).
pub fn naive_dim(
    table: &FunctionClassTable,
    reference: &ReferenceFunction,
    measure: Measure,
) -> usize {
    let refs = signs(table, reference);
    fn rec(
        table: &FunctionClassTable,
        refs: &[i8],
        measure: Measure,
        seq: &mut Vec<(usize, usize)>,
        best: &mut usize,
    ) {
        *best = (*best).max(seq.len());
        for x in 0..table.n_points() {
            if seq.iter().any(|&(p, _)| p == x) {
                continue;
            }
            for f in 0..table.n_funcs() {
                seq.push((x, f));
                if prefix_valid(table, refs, measure, seq) {
                    rec(table, refs, measure, seq, best);
                }
                seq.pop();
            }
        }
    }
    let mut best = 0;
    rec(table, &refs, measure, &mut Vec::new(), &mut best);
    best
}

/// Naive scale-sensitive dimension by enumeration of all sequences up to a
/// length cap, allowing point repeats for the eluder measure.
pub fn naive_scale_dim(
    table: &FunctionClassTable,
    reference: &ReferenceFunction,
    measure: Measure,
    eps: &BigRational,
    cap: usize,
) -> usize {
    let refv = reference.resolve(table).unwrap();
    let dev = |x: usize, f: usize| table.entry(x, f) - &refv[x];
    let eps2 = eps * eps;
    let valid = |seq: &[(usize, usize)]| -> bool {
        for (i, &(xi, fi)) in seq.iter().enumerate() {
            match measure {
                Measure::Eluder => {
                    if dev(xi, fi).abs() <= *eps {
                        return false;
                    }
                    let s: BigRational =
                        seq[..i].iter().map(|&(xj, _)| { let d = dev(xj, fi); &d * &d }).sum();
                    if s > eps2 {
                        return false;
                    }
                }
                Measure::Star => {
                    if dev(xi, fi).abs() <= *eps {
                        return false;
                    }
                    let s: BigRational = seq
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &(xj, _))| { let d = dev(xj, fi); &d * &d })
                        .sum();
                    if s > eps2 {
                        return false;
                    }
                }
                Measure::Threshold => {
                    for &(xk, _) in &seq[i..] {
                        if dev(xk, fi).abs() <= *eps {
                            return false;
                        }
                    }
                    let s: BigRational =
                        seq[..i].iter().map(|&(xj, _)| { let d = dev(xj, fi); &d * &d }).sum();
                    if s > eps2 {
                        return false;
                    }
                }
            }
        }
        true
    };
    fn rec(
        table: &FunctionClassTable,
        valid: &dyn Fn(&[(usize, usize)]) -> bool,
        cap: usize,
        seq: &mut Vec<(usize, usize)>,
        best: &mut usize,
    ) {
        *best = (*best).max(seq.len());
        if seq.len() == cap {
            return;
        }
        for x in 0..table.n_points() {
            for f in 0..table.n_funcs() {
                seq.push((x, f));
                if valid(seq) {
                    rec(table, valid, cap, seq, best);
                }
                seq.pop();
            }
        }
    }
    let mut best = 0;
    rec(table, &valid, cap, &mut Vec::new(), &mut best);
    best
}

/// Random real-valued table with entries drawn from a small rational grid.
pub fn random_rational_table(n_points: usize, n_funcs: usize, seed: u64) -> FunctionClassTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let points = (0..n_points).map(|i| format!("x{i}")).collect();
    let functions = (0..n_funcs).map(|j| format!("f{j}")).collect();
    let values = (0..n_points)
        .map(|_| {
            (0..n_funcs)
                .map(|_| crate::ratio::rat_frac(rng.gen_range(-8i64..=8), 4))
                .collect()
        })
        .collect();
    FunctionClassTable::new(points, functions, values, Kind::Real).unwrap()
}

/// Exhaustive monochromatic-clique search over all vertex subsets.
#[allow(dead_code)]
pub fn naive_mono_clique(
    coloring: &crate::ramsey::EdgeColoring,
    k: usize,
) -> Option<(Vec<usize>, crate::ramsey::Color)> {
    use crate::ramsey::Color;
    let m = coloring.m();
    if k == 0 || k > m {
        return k.eq(&1).then(|| (vec![0], Color::Red)).filter(|_| m >= 1);
    }
    let mut best: Option<(Vec<usize>, Color)> = None;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        for color in [Color::Red, Color::Blue] {
            let mono = idx
                .iter()
                .enumerate()
                .all(|(a, &i)| idx[a + 1..].iter().all(|&j| coloring.color(i, j) == Some(color)));
            if mono {
                let better = match &best {
                    None => true,
                    Some((v, c)) => idx < *v || (idx == *v && color == Color::Red && *c == Color::Blue),
                };
                if better {
                    best = Some((idx.clone(), color));
                }
            }
        }
        // next k-combination
        let mut i = k;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] != i + m - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}
