//! From an eluder witness to a star or threshold witness via Ramsey's
//! theorem: color the complete graph on the witness positions (edge {i,j},
//! i > j, red when f_j agrees with the reference at x_i, blue otherwise);
//! a red clique induces a star subsequence, a blue clique a threshold
//! subsequence, and a monochromatic clique of size ⌈log₄ m⌉ always exists.

use num_traits::Zero;

use crate::combodim::{edim_comb, sdim_comb, tdim_comb};
use crate::error::{Error, Result};
use crate::table::FunctionClassTable;
use crate::witness::{
    verify_witness, ReferenceFunction, WitnessKind, WitnessSequence,
};

pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn name(&self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Blue => "blue",
        }
    }
}

/// A red/blue edge coloring of the complete graph K_m, stored as the
/// upper-triangular edge list in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    m: usize,
    edges: Vec<Color>,
}

impl EdgeColoring {
    pub fn new(m: usize, edges: Vec<Color>) -> Result<Self> {
        if edges.len() != m * m.saturating_sub(1) / 2 {
            return Err(Error::Malformed(format!(
                "K_{m} needs {} edges, got {}",
                m * m.saturating_sub(1) / 2,
                edges.len()
            )));
        }
        Ok(Self { m, edges })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.m);
        i * (2 * self.m - i - 1) / 2 + (j - i - 1)
    }

    /// Color of edge {i, j}; `None` when i == j.
    pub fn color(&self, i: usize, j: usize) -> Option<Color> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        (a != b).then(|| self.edges[self.idx(a, b)])
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "m": self.m,
            "edges": self
                .edges
                .iter()
                .map(|c| if *c == Color::Red { 1u8 } else { 0 })
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let m = v
            .get("m")
            .and_then(|m| m.as_u64())
            .ok_or_else(|| Error::Malformed("coloring needs an \"m\" field".into()))? as usize;
        let edges = v
            .get("edges")
            .and_then(|e| e.as_array())
            .ok_or_else(|| Error::Malformed("coloring needs an \"edges\" bit list".into()))?
            .iter()
            .map(|b| match b.as_u64() {
                Some(1) => Ok(Color::Red),
                Some(0) => Ok(Color::Blue),
                _ => Err(Error::Malformed("edge bits must be 0 or 1".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, edges)
    }
}

/// The 0/1 ↔ ±1 convention used everywhere a bit matrix meets a sign table:
/// 0 ↦ +1, 1 ↦ −1.
pub fn bit_to_sign(b: u8) -> i8 {
    if b == 0 {
        1
    } else {
        -1
    }
}

pub fn sign_to_bit(s: i8) -> u8 {
    if s == 1 {
        0
    } else {
        1
    }
}

/// Build the edge coloring induced by a combinatorial eluder witness:
/// for i > j, edge {i, j} is red iff f_j(x_i) = f⋆(x_i).
pub fn color_from_witness(
    table: &FunctionClassTable,
    witness: &WitnessSequence,
) -> Result<EdgeColoring> {
    if witness.kind != WitnessKind::Eluder || !witness.scale.is_zero() {
        return Err(Error::InvalidWitness(
            "coloring is defined for combinatorial eluder witnesses".into(),
        ));
    }
    match verify_witness(table, witness)? {
        crate::witness::Verification::Valid => {}
        crate::witness::Verification::Violation { position, msg } => {
            return Err(Error::InvalidWitness(format!(
                "witness does not verify (position {position}: {msg})"
            )));
        }
    }
    let m = witness.entries.len();
    if m > MAX_VERTICES {
        return Err(Error::ResourceLimit(format!(
            "coloring supports at most {MAX_VERTICES} vertices, witness has {m}"
        )));
    }
    let refv = witness.reference.resolve(table)?;
    let mut edges = Vec::with_capacity(m * m.saturating_sub(1) / 2);
    for a in 0..m {
        for b in a + 1..m {
            // edge {a, b} with b > a: red iff the earlier function agrees
            // with the reference at the later point
            let (xb, _) = witness.entries[b];
            let (_, fa) = witness.entries[a];
            let agree = *table.entry(xb, fa) == refv[xb];
            edges.push(if agree { Color::Red } else { Color::Blue });
        }
    }
    EdgeColoring::new(m, edges)
}

/// Lexicographically smallest monochromatic k-clique, red preferred when the
/// same vertex set is monochromatic in both colors (only possible at k = 1).
pub fn find_mono_clique(coloring: &EdgeColoring, k: usize) -> Result<Option<(Vec<usize>, Color)>> {
    if k == 0 {
        return Err(Error::InvalidParameter("clique size must be at least 1".into()));
    }
    if coloring.m > MAX_VERTICES {
        return Err(Error::ResourceLimit(format!(
            "clique search supports at most {MAX_VERTICES} vertices"
        )));
    }
    if k > coloring.m {
        return Ok(None);
    }
    if k == 1 {
        return Ok(Some((vec![0], Color::Red)));
    }
    let red = first_clique(coloring, k, Color::Red);
    let blue = first_clique(coloring, k, Color::Blue);
    Ok(match (red, blue) {
        (Some(r), Some(b)) => {
            if b < r {
                Some((b, Color::Blue))
            } else {
                Some((r, Color::Red))
            }
        }
        (Some(r), None) => Some((r, Color::Red)),
        (None, Some(b)) => Some((b, Color::Blue)),
        (None, None) => None,
    })
}

/// First k-clique of one color in lexicographic DFS order (which is the
/// lexicographically smallest one, since smaller prefixes are explored
/// first).
fn first_clique(coloring: &EdgeColoring, k: usize, color: Color) -> Option<Vec<usize>> {
    fn dfs(
        coloring: &EdgeColoring,
        color: Color,
        chosen: &mut Vec<usize>,
        from: usize,
        k: usize,
    ) -> bool {
        if chosen.len() == k {
            return true;
        }
        for v in from..coloring.m() {
            if coloring.m() - v < k - chosen.len() {
                return false;
            }
            if chosen.iter().all(|&u| coloring.color(u, v) == Some(color)) {
                chosen.push(v);
                if dfs(coloring, color, chosen, v + 1, k) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::with_capacity(k);
    dfs(coloring, color, &mut chosen, 0, k).then_some(chosen)
}

/// Largest k for which a monochromatic k-clique exists (monochromatic cliques
/// are closed under taking subsets, so the feasible k form a prefix).
pub fn largest_mono_clique(coloring: &EdgeColoring) -> Result<Option<(Vec<usize>, Color)>> {
    let mut best = None;
    for k in 1..=coloring.m() {
        match find_mono_clique(coloring, k)? {
            Some(found) => best = Some(found),
            None => break,
        }
    }
    Ok(best)
}

/// Restrict an eluder witness to clique positions: red cliques yield star
/// witnesses, blue cliques yield threshold witnesses.
pub fn extract_subsequence(
    table: &FunctionClassTable,
    witness: &WitnessSequence,
    vertices: &[usize],
    color: Color,
) -> Result<WitnessSequence> {
    let coloring = color_from_witness(table, witness)?;
    let mut verts = vertices.to_vec();
    verts.sort_unstable();
    verts.dedup();
    if verts.len() != vertices.len() {
        return Err(Error::InvalidClique("clique vertices must be distinct".into()));
    }
    for &v in &verts {
        if v >= coloring.m() {
            return Err(Error::InvalidClique(format!(
                "vertex {v} out of range for a witness of length {}",
                coloring.m()
            )));
        }
    }
    for (a, &i) in verts.iter().enumerate() {
        for &j in &verts[a + 1..] {
            if coloring.color(i, j) != Some(color) {
                return Err(Error::InvalidClique(format!(
                    "edge {{{i}, {j}}} is not {}",
                    color.name()
                )));
            }
        }
    }
    let kind = match color {
        Color::Red => WitnessKind::Star,
        Color::Blue => WitnessKind::Threshold,
    };
    let extracted = WitnessSequence {
        kind,
        reference: witness.reference.clone(),
        scale: witness.scale.clone(),
        entries: verts.iter().map(|&v| witness.entries[v]).collect(),
    };
    match verify_witness(table, &extracted)? {
        crate::witness::Verification::Valid => Ok(extracted),
        crate::witness::Verification::Violation { position, msg } => Err(Error::InvalidClique(
            format!("extracted subsequence fails at position {position}: {msg}"),
        )),
    }
}

/// One full round trip of the sandwich argument on a binary table.
#[derive(Debug, Clone)]
pub struct EquivalenceAudit {
    pub edim: usize,
    pub sdim: usize,
    pub tdim: usize,
    /// ⌈log₄ edim⌉, the clique size the Ramsey bound guarantees
    pub guaranteed: usize,
    pub clique: Vec<usize>,
    pub color: Color,
    pub extracted: WitnessSequence,
    pub sandwich_holds: bool,
    pub extraction_holds: bool,
}

pub fn equivalence_audit(
    table: &FunctionClassTable,
    reference: &ReferenceFunction,
) -> Result<EquivalenceAudit> {
    let e = edim_comb(table, reference)?;
    let s = sdim_comb(table, reference)?;
    let t = tdim_comb(table, reference)?;
    let lower = s.value.max(t.value);
    let sandwich_holds = lower <= e.value && e.value as u128 <= 4u128.saturating_pow(lower as u32);
    let guaranteed = ceil_log4(e.value);
    let coloring = color_from_witness(table, &e.witness)?;
    let (clique, color, extracted) = match largest_mono_clique(&coloring)? {
        Some((clique, color)) => {
            let extracted = extract_subsequence(table, &e.witness, &clique, color)?;
            (clique, color, extracted)
        }
        None => (
            Vec::new(),
            Color::Red,
            WitnessSequence {
                kind: WitnessKind::Star,
                reference: reference.clone(),
                scale: e.witness.scale.clone(),
                entries: vec![],
            },
        ),
    };
    let extraction_holds = extracted.entries.len() >= guaranteed
        && verify_witness(table, &extracted)?.is_valid();
    Ok(EquivalenceAudit {
        edim: e.value,
        sdim: s.value,
        tdim: t.value,
        guaranteed,
        clique,
        color,
        extracted,
        sandwich_holds,
        extraction_holds,
    })
}

/// Smallest k with 4^k ≥ m (0 for m ≤ 1).
pub fn ceil_log4(m: usize) -> usize {
    let mut k = 0usize;
    let mut pow = 1usize;
    while pow < m {
        pow = pow.saturating_mul(4);
        k += 1;
    }
    k
}

/// A 6-step combinatorial eluder sequence (as a binary table plus witness,
/// reference all-+1) whose induced coloring has {0, 4, 5} as its first
/// monochromatic triangle — red, extracting to a star witness of length 3.
pub fn example_sequence() -> (FunctionClassTable, WitnessSequence) {
    // bit matrix rows = points, columns = functions; 0 ↦ +1, 1 ↦ −1
    let bits: [[u8; 6]; 6] = [
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [1, 1, 1, 0, 0, 0],
        [1, 0, 0, 1, 0, 0],
        [0, 1, 1, 0, 1, 0],
        [0, 1, 0, 1, 0, 1],
    ];
    let points = (1..=6).map(|i| format!("x{i}")).collect();
    let functions = (1..=6).map(|j| format!("f{j}")).collect();
    let values = bits
        .iter()
        .map(|row| row.iter().map(|&b| crate::ratio::rat_i64(bit_to_sign(b) as i64)).collect())
        .collect();
    let table =
        FunctionClassTable::new(points, functions, values, crate::table::Kind::Binary)
            .expect("fixture table is well-formed");
    let witness = WitnessSequence {
        kind: WitnessKind::Eluder,
        reference: ReferenceFunction::ones(6),
        scale: num_rational::BigRational::from_integer(0.into()),
        entries: (0..6).map(|t| (t, t)).collect(),
    };
    debug_assert!(verify_witness(&table, &witness).unwrap().is_valid());
    (table, witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combodim::Measure;
    use crate::table::{gen_singletons, gen_thresholds};
    use crate::testutil::{naive_mono_clique, random_binary_table};

    #[test]
    fn example_sequence_colors_and_extracts() {
        let (table, witness) = example_sequence();
        let coloring = color_from_witness(&table, &witness).unwrap();
        let (clique, color) = find_mono_clique(&coloring, 3).unwrap().unwrap();
        assert_eq!(clique, vec![0, 4, 5]);
        assert_eq!(color, Color::Red);
        let star = extract_subsequence(&table, &witness, &clique, color).unwrap();
        assert_eq!(star.kind, WitnessKind::Star);
        assert_eq!(star.entries.len(), 3);
        assert!(verify_witness(&table, &star).unwrap().is_valid());
    }

    #[test]
    fn coloring_encodes_all_off_diagonal_values() {
        // bijection: the coloring plus the eluder conditions pin down every
        // f_j(x_i) on witness positions
        let (table, witness) = example_sequence();
        let coloring = color_from_witness(&table, &witness).unwrap();
        let refv = witness.reference.resolve(&table).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let (xi, _) = witness.entries[i];
                let (_, fj) = witness.entries[j];
                let agree = *table.entry(xi, fj) == refv[xi];
                let expect = if i == j {
                    false // diagonal disagreement
                } else if i < j {
                    true // eluder prefix agreement
                } else {
                    coloring.color(i, j) == Some(Color::Red)
                };
                assert_eq!(agree, expect, "entry ({i}, {j})");
            }
        }
    }

    #[test]
    fn threshold_class_gives_all_blue() {
        let t = gen_thresholds(4).unwrap();
        let fr = ReferenceFunction::Column(4);
        let e = edim_comb(&t, &fr).unwrap();
        let coloring = color_from_witness(&t, &e.witness).unwrap();
        for i in 0..coloring.m() {
            for j in i + 1..coloring.m() {
                assert_eq!(coloring.color(i, j), Some(Color::Blue));
            }
        }
        let (clique, color) = find_mono_clique(&coloring, coloring.m()).unwrap().unwrap();
        assert_eq!(color, Color::Blue);
        let thr = extract_subsequence(&t, &e.witness, &clique, color).unwrap();
        assert_eq!(thr.kind, WitnessKind::Threshold);
        assert_eq!(thr.entries.len(), 4);
    }

    #[test]
    fn short_witnesses_give_tiny_colorings() {
        let (table, witness) = example_sequence();
        let one = WitnessSequence { entries: vec![witness.entries[0]], ..witness.clone() };
        let c = color_from_witness(&table, &one).unwrap();
        assert_eq!(c.m(), 1);
        assert_eq!(find_mono_clique(&c, 1).unwrap(), Some((vec![0], Color::Red)));
        assert_eq!(find_mono_clique(&c, 2).unwrap(), None);
        let single = extract_subsequence(&table, &one, &[0], Color::Blue).unwrap();
        assert_eq!(single.kind, WitnessKind::Threshold);
        assert_eq!(single.entries.len(), 1);
    }

    #[test]
    fn five_cycle_has_no_mono_triangle() {
        // red = pentagon edges, blue = pentagram diagonals: the classical
        // witness that R(3,3) > 5
        let mut edges = Vec::new();
        for i in 0..5usize {
            for j in i + 1..5 {
                let cyc = j - i == 1 || j - i == 4;
                edges.push(if cyc { Color::Red } else { Color::Blue });
            }
        }
        let c = EdgeColoring::new(5, edges).unwrap();
        assert_eq!(find_mono_clique(&c, 3).unwrap(), None);
        assert!(find_mono_clique(&c, 2).unwrap().is_some());
    }

    #[test]
    fn clique_search_matches_naive_enumeration() {
        for seed in 0..30u64 {
            let m = 4 + (seed as usize % 5);
            let mut edges = Vec::new();
            let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1);
            for _ in 0..m * (m - 1) / 2 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                edges.push(if state >> 63 == 0 { Color::Red } else { Color::Blue });
            }
            let c = EdgeColoring::new(m, edges).unwrap();
            for k in 1..=m {
                let fast = find_mono_clique(&c, k).unwrap();
                let naive = naive_mono_clique(&c, k);
                assert_eq!(fast, naive, "seed {seed} m {m} k {k}");
            }
        }
    }

    #[test]
    fn star_and_threshold_witnesses_are_eluder_witnesses() {
        for seed in 0..25u64 {
            let t = random_binary_table(6, 6, seed);
            let fr = ReferenceFunction::Column(0);
            for m in [Measure::Star, Measure::Threshold] {
                let r = crate::combodim::dim_comb(&t, &fr, m).unwrap();
                let as_eluder =
                    WitnessSequence { kind: WitnessKind::Eluder, ..r.witness.clone() };
                assert!(
                    verify_witness(&t, &as_eluder).unwrap().is_valid(),
                    "seed {seed} measure {m:?}"
                );
            }
        }
    }

    #[test]
    fn audits_pass_on_named_and_random_classes() {
        let t = gen_thresholds(10).unwrap();
        let a = equivalence_audit(&t, &ReferenceFunction::Column(10)).unwrap();
        assert_eq!((a.edim, a.sdim, a.tdim), (10, 1, 10));
        assert!(a.sandwich_holds && a.extraction_holds);

        let s = gen_singletons(8).unwrap();
        let a = equivalence_audit(&s, &ReferenceFunction::Column(8)).unwrap();
        assert_eq!((a.edim, a.sdim, a.tdim), (8, 8, 1));
        assert!(a.sandwich_holds && a.extraction_holds);

        for seed in 0..80u64 {
            let t = random_binary_table(6, 6, seed);
            for j in 0..t.n_funcs() {
                let a = equivalence_audit(&t, &ReferenceFunction::Column(j)).unwrap();
                assert!(a.sandwich_holds, "seed {seed} ref {j}");
                assert!(a.extraction_holds, "seed {seed} ref {j}");
            }
        }
    }

    #[test]
    fn ceil_log4_values() {
        assert_eq!(ceil_log4(0), 0);
        assert_eq!(ceil_log4(1), 0);
        assert_eq!(ceil_log4(2), 1);
        assert_eq!(ceil_log4(4), 1);
        assert_eq!(ceil_log4(5), 2);
        assert_eq!(ceil_log4(16), 2);
        assert_eq!(ceil_log4(17), 3);
        assert_eq!(ceil_log4(64), 3);
    }

    #[test]
    fn coloring_json_round_trip() {
        let (table, witness) = example_sequence();
        let c = color_from_witness(&table, &witness).unwrap();
        let j = c.to_json();
        assert_eq!(EdgeColoring::from_json(&j).unwrap(), c);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let (table, witness) = example_sequence();
        let bad = WitnessSequence { kind: WitnessKind::Star, ..witness.clone() };
        assert!(matches!(color_from_witness(&table, &bad), Err(Error::InvalidWitness(_))));
        // {0, 1, 2} is not monochromatic in the fixture
        assert!(matches!(
            extract_subsequence(&table, &witness, &[0, 1, 2], Color::Red),
            Err(Error::InvalidClique(_))
        ));
        assert!(matches!(
            extract_subsequence(&table, &witness, &[0, 0], Color::Red),
            Err(Error::InvalidClique(_))
        ));
    }
}
