//! Atom-permutation groups S_N, D_N and C_s, their character tables, the
//! decomposition of every spin-j multiplicity space into irreps, and the
//! counts of stationary and oscillating long-lived correlations.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::operators::{self, allowed_j, degeneracy_dj, permutation_operator, Axis, DickeBasis, HalfInt, Operator};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupKind {
    S,
    D,
    Cs,
}

impl GroupKind {
    pub fn label(self, n: usize) -> String {
        match self {
            GroupKind::S => format!("S_{n}"),
            GroupKind::D => format!("D_{n}"),
            GroupKind::Cs => "C_s".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Elem {
    Perm(Vec<usize>),
    /// `r^k s^f` in the dihedral group of order `2 * order`
    Dihedral { k: usize, f: bool, order: usize },
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a b)(x) = a(b(x))
    b.iter().map(|&x| a[x]).collect()
}

impl Elem {
    fn mul(&self, other: &Elem) -> Elem {
        match (self, other) {
            (Elem::Perm(a), Elem::Perm(b)) => Elem::Perm(compose(a, b)),
            (Elem::Dihedral { k: k1, f: f1, order }, Elem::Dihedral { k: k2, f: f2, .. }) => {
                // r^k1 s^f1 r^k2 s^f2 = r^(k1 +- k2) s^(f1 xor f2)
                let k = if *f1 { (k1 + order - k2 % order) % order } else { (k1 + k2) % order };
                Elem::Dihedral { k, f: f1 ^ f2, order: *order }
            }
            _ => unreachable!("mixed element kinds"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjClass {
    pub name: String,
    pub size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Irrep {
    pub name: String,
    pub dim: usize,
    /// Character on each conjugacy class, in `PermGroup::classes` order.
    pub characters: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct PermGroup {
    pub kind: GroupKind,
    pub n: usize,
    /// `elements[g][k]` is the 0-based image of atom `k`.
    pub elements: Vec<Vec<usize>>,
    /// `table[a][b]` is the index of `a * b`.
    pub table: Vec<Vec<usize>>,
    pub element_class: Vec<usize>,
    pub classes: Vec<ConjClass>,
    pub irreps: Vec<Irrep>,
}

fn cycle_type(p: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        out.push(len);
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn reflection(n: usize) -> Vec<usize> {
    (0..n).map(|k| n - 1 - k).collect()
}

fn rotation(n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|x| (x + k) % n).collect()
}

/// Hard-coded table: class signatures with display names, then irreps.
struct Table {
    classes: Vec<(String, &'static str)>,
    irreps: Vec<(&'static str, Vec<f64>)>,
}

fn cyc(parts: &[usize]) -> String {
    parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

fn table_for(kind: GroupKind, n: usize) -> Result<Table> {
    let c72 = 2.0 * (2.0 * std::f64::consts::PI / 5.0).cos();
    let c144 = 2.0 * (4.0 * std::f64::consts::PI / 5.0).cos();
    let t = match (kind, n) {
        (GroupKind::Cs, _) => Table {
            classes: vec![("e".into(), "E"), ("s".into(), "sigma_h")],
            irreps: vec![("A'", vec![1.0, 1.0]), ("A''", vec![1.0, -1.0])],
        },
        (GroupKind::S, 2) => Table {
            classes: vec![(cyc(&[1, 1]), "E"), (cyc(&[2]), "(12)")],
            irreps: vec![("A", vec![1.0, 1.0]), ("B_1", vec![1.0, -1.0])],
        },
        (GroupKind::S, 3) => Table {
            classes: vec![(cyc(&[1, 1, 1]), "E"), (cyc(&[2, 1]), "(12)"), (cyc(&[3]), "(123)")],
            irreps: vec![
                ("A_1", vec![1.0, 1.0, 1.0]),
                ("A_2", vec![1.0, -1.0, 1.0]),
                ("E", vec![2.0, 0.0, -1.0]),
            ],
        },
        (GroupKind::S, 4) => Table {
            classes: vec![
                (cyc(&[1, 1, 1, 1]), "E"),
                (cyc(&[2, 1, 1]), "(12)"),
                (cyc(&[2, 2]), "(12)(34)"),
                (cyc(&[3, 1]), "(123)"),
                (cyc(&[4]), "(1234)"),
            ],
            // T_1 is the standard [3,1] representation
            irreps: vec![
                ("A_1", vec![1.0, 1.0, 1.0, 1.0, 1.0]),
                ("A_2", vec![1.0, -1.0, 1.0, 1.0, -1.0]),
                ("E", vec![2.0, 0.0, 2.0, -1.0, 0.0]),
                ("T_1", vec![3.0, 1.0, -1.0, 0.0, -1.0]),
                ("T_2", vec![3.0, -1.0, -1.0, 0.0, 1.0]),
            ],
        },
        (GroupKind::S, 5) => Table {
            classes: vec![
                (cyc(&[1, 1, 1, 1, 1]), "E"),
                (cyc(&[2, 1, 1, 1]), "(12)"),
                (cyc(&[2, 2, 1]), "(12)(34)"),
                (cyc(&[3, 1, 1]), "(123)"),
                (cyc(&[3, 2]), "(123)(45)"),
                (cyc(&[4, 1]), "(1234)"),
                (cyc(&[5]), "(12345)"),
            ],
            // A = [5], T = [4,1], H = [3,2]; primes are the sign-twisted partners
            irreps: vec![
                ("A", vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]),
                ("A'", vec![1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0]),
                ("T", vec![4.0, 2.0, 0.0, 1.0, -1.0, 0.0, -1.0]),
                ("T'", vec![4.0, -2.0, 0.0, 1.0, 1.0, 0.0, -1.0]),
                ("H", vec![5.0, 1.0, 1.0, -1.0, 1.0, -1.0, 0.0]),
                ("H'", vec![5.0, -1.0, 1.0, -1.0, -1.0, 1.0, 0.0]),
                ("G", vec![6.0, 0.0, -2.0, 0.0, 0.0, 0.0, 1.0]),
            ],
        },
        (GroupKind::D, 2) => Table {
            classes: vec![("e".into(), "E"), ("rs".into(), "C_2(z)"), ("r".into(), "C_2(y)"), ("s".into(), "C_2(x)")],
            irreps: vec![
                ("A", vec![1.0, 1.0, 1.0, 1.0]),
                ("B_1", vec![1.0, 1.0, -1.0, -1.0]),
                ("B_2", vec![1.0, -1.0, 1.0, -1.0]),
                ("B_3", vec![1.0, -1.0, -1.0, 1.0]),
            ],
        },
        (GroupKind::D, 3) => Table {
            classes: vec![("e".into(), "E"), ("r1".into(), "C_3"), ("s".into(), "C_2'")],
            irreps: vec![
                ("A_1", vec![1.0, 1.0, 1.0]),
                ("A_2", vec![1.0, 1.0, -1.0]),
                ("E", vec![2.0, -1.0, 0.0]),
            ],
        },
        (GroupKind::D, 4) => Table {
            // C_2' contains the chain mirror n -> N+1-n
            classes: vec![
                ("e".into(), "E"),
                ("r1".into(), "C_4"),
                ("r2".into(), "C_2"),
                ("s".into(), "C_2'"),
                ("sr".into(), "C_2''"),
            ],
            irreps: vec![
                ("A_1", vec![1.0, 1.0, 1.0, 1.0, 1.0]),
                ("A_2", vec![1.0, 1.0, 1.0, -1.0, -1.0]),
                ("B_1", vec![1.0, -1.0, 1.0, 1.0, -1.0]),
                ("B_2", vec![1.0, -1.0, 1.0, -1.0, 1.0]),
                ("E", vec![2.0, 0.0, -2.0, 0.0, 0.0]),
            ],
        },
        (GroupKind::D, 5) => Table {
            classes: vec![("e".into(), "E"), ("r1".into(), "C_5"), ("r2".into(), "C_5^2"), ("s".into(), "C_2'")],
            irreps: vec![
                ("A_1", vec![1.0, 1.0, 1.0, 1.0]),
                ("A_2", vec![1.0, 1.0, 1.0, -1.0]),
                ("E_1", vec![2.0, c72, c144, 0.0]),
                ("E_2", vec![2.0, c144, c72, 0.0]),
            ],
        },
        _ => return Err(Error::UnsupportedGroup(format!("{} (tabulated for N = 2..5)", kind.label(n)))),
    };
    Ok(t)
}

fn signature(kind: GroupKind, n: usize, e: &Elem) -> String {
    match (kind, e) {
        (GroupKind::S, Elem::Perm(p)) => cyc(&cycle_type(p)),
        (GroupKind::Cs, Elem::Perm(p)) => if p.iter().enumerate().all(|(i, &x)| i == x) { "e" } else { "s" }.into(),
        (GroupKind::D, Elem::Dihedral { k, f, order }) if n == 2 => match (k % order, f) {
            (0, false) => "e",
            (1, false) => "r",
            (0, true) => "s",
            _ => "rs",
        }
        .into(),
        (GroupKind::D, Elem::Dihedral { k, f, order }) => {
            if *f {
                if order % 2 == 1 || k % 2 == 0 { "s".into() } else { "sr".into() }
            } else if *k == 0 {
                "e".into()
            } else {
                format!("r{}", (*k).min(order - k))
            }
        }
        _ => unreachable!(),
    }
}

pub fn build_group(kind: GroupKind, n: usize) -> Result<PermGroup> {
    if !(2..=5).contains(&n) {
        return Err(Error::UnsupportedGroup(format!("{} (tabulated for N = 2..5)", kind.label(n))));
    }
    let tab = table_for(kind, n)?;
    let elems: Vec<Elem> = match kind {
        GroupKind::S => all_perms(n).into_iter().map(Elem::Perm).collect(),
        GroupKind::Cs => vec![Elem::Perm((0..n).collect()), Elem::Perm(reflection(n))],
        GroupKind::D => {
            let order = n;
            (0..2).flat_map(|f| (0..order).map(move |k| Elem::Dihedral { k, f: f == 1, order })).collect()
        }
    };
    let perms: Vec<Vec<usize>> = elems
        .iter()
        .map(|e| match e {
            Elem::Perm(p) => p.clone(),
            // r^k s^f acts as rotation after the optional mirror
            Elem::Dihedral { k, f, .. } => {
                let r = rotation(n, *k);
                if *f { compose(&r, &reflection(n)) } else { r }
            }
        })
        .collect();
    let index: HashMap<Elem, usize> = elems.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let table: Vec<Vec<usize>> = elems
        .iter()
        .map(|a| elems.iter().map(|b| index[&a.mul(b)]).collect())
        .collect();
    let identity = (0..elems.len())
        .find(|&i| (0..elems.len()).all(|j| table[i][j] == j))
        .ok_or_else(|| Error::UnsupportedGroup("no identity".into()))?;
    let inverse: Vec<usize> = (0..elems.len())
        .map(|a| (0..elems.len()).find(|&b| table[a][b] == identity).expect("group closed"))
        .collect();

    let sig_index: HashMap<String, usize> =
        tab.classes.iter().enumerate().map(|(i, (s, _))| (s.clone(), i)).collect();
    let mut element_class = vec![usize::MAX; elems.len()];
    for (g, e) in elems.iter().enumerate() {
        let sig = signature(kind, n, e);
        element_class[g] = *sig_index
            .get(&sig)
            .ok_or_else(|| Error::UnsupportedGroup(format!("unknown class signature {sig}")))?;
    }
    // the signatures must agree with the true conjugacy classes
    for g in 0..elems.len() {
        for h in 0..elems.len() {
            let conj = table[table[h][g]][inverse[h]];
            if element_class[conj] != element_class[g] {
                return Err(Error::UnsupportedGroup(format!("class table inconsistent for {}", kind.label(n))));
            }
        }
    }
    let classes = tab
        .classes
        .iter()
        .enumerate()
        .map(|(c, (_, name))| ConjClass { name: name.to_string(), size: element_class.iter().filter(|&&x| x == c).count() })
        .collect();
    let irreps = tab
        .irreps
        .into_iter()
        .map(|(name, chars)| Irrep { name: name.to_string(), dim: chars[0].round() as usize, characters: chars })
        .collect();
    Ok(PermGroup { kind, n, elements: perms, table, element_class, classes, irreps })
}

impl PermGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn name(&self) -> String {
        self.kind.label(self.n)
    }

    pub fn character(&self, irrep: usize, element: usize) -> f64 {
        self.irreps[irrep].characters[self.element_class[element]]
    }

    pub fn irrep_index(&self, name: &str) -> Option<usize> {
        self.irreps.iter().position(|r| r.name == name)
    }

    pub fn operator(&self, element: usize) -> Operator {
        permutation_operator(&self.elements[element])
    }

    /// `(dim/|G|) sum_g chi(g) P_g`, the projector onto the isotypic component.
    pub fn isotypic_projector(&self, irrep: usize) -> Operator {
        let d = 1usize << self.n;
        let mut out = Operator::zeros(d, d);
        let w = self.irreps[irrep].dim as f64 / self.order() as f64;
        for g in 0..self.order() {
            let chi = self.character(irrep, g);
            if chi != 0.0 {
                out += linalg::scale(self.operator(g).as_ref(), c64::new(w * chi, 0.0));
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IrrepComponent {
    pub name: String,
    pub dim: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionRow {
    pub j: HalfInt,
    pub d_j: u64,
    pub components: Vec<IrrepComponent>,
}

impl DecompositionRow {
    /// Total number of irrep blocks, counted with multiplicity.
    pub fn blocks(&self) -> usize {
        self.components.iter().map(|c| c.multiplicity).sum()
    }

    /// Direct-sum notation, e.g. `A'⊕2A''`.
    pub fn notation(&self) -> String {
        self.components
            .iter()
            .map(|c| if c.multiplicity == 1 { c.name.clone() } else { format!("{}{}", c.multiplicity, c.name) })
            .collect::<Vec<_>>()
            .join("⊕")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IrrepDecomposition {
    pub group: String,
    pub n: usize,
    pub rows: Vec<DecompositionRow>,
}

/// Character of `P_g` on the multiplicity space of spin `j`, taken on the
/// highest-weight (m = j) states of a z-quantized basis.
fn multiplicity_characters(group: &PermGroup, basis: &DickeBasis, j: HalfInt) -> Vec<f64> {
    let cols: Vec<usize> = (0..basis.len()).filter(|&k| basis.labels[k].j == j && basis.labels[k].m == j).collect();
    (0..group.order())
        .map(|g| {
            let p = group.operator(g);
            cols.iter()
                .map(|&k| {
                    let v = basis.vector(k);
                    let pv = &p * v;
                    (v.adjoint() * &pv).re
                })
                .sum()
        })
        .collect()
}

pub fn irrep_multiplicities(n: usize, j: HalfInt, group: &PermGroup) -> Result<DecompositionRow> {
    let basis = operators::dicke_basis(n, Axis::Z)?;
    irrep_multiplicities_in(&basis, j, group)
}

fn irrep_multiplicities_in(basis: &DickeBasis, j: HalfInt, group: &PermGroup) -> Result<DecompositionRow> {
    let n = basis.atoms;
    let d_j = degeneracy_dj(n, j)?;
    let chi = multiplicity_characters(group, basis, j);
    let mut components = Vec::new();
    for (r, irrep) in group.irreps.iter().enumerate() {
        let m: f64 = (0..group.order()).map(|g| group.character(r, g) * chi[g]).sum::<f64>() / group.order() as f64;
        let rounded = m.round();
        if (m - rounded).abs() > 1e-6 || rounded < 0.0 {
            return Err(Error::NonIntegerMultiplicity { value: m, irrep: irrep.name.clone(), n, two_j: j.twice() });
        }
        if rounded > 0.0 {
            components.push(IrrepComponent { name: irrep.name.clone(), dim: irrep.dim, multiplicity: rounded as usize });
        }
    }
    Ok(DecompositionRow { j, d_j, components })
}

pub fn decompose_all(group: &PermGroup) -> Result<IrrepDecomposition> {
    let basis = operators::dicke_basis(group.n, Axis::Z)?;
    let rows = allowed_j(group.n)
        .into_iter()
        .map(|j| irrep_multiplicities_in(&basis, j, group))
        .collect::<Result<Vec<_>>>()?;
    Ok(IrrepDecomposition { group: group.name(), n: group.n, rows })
}

fn binom(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// `4^N Gamma(N+1/2) / (sqrt(pi) Gamma(N+2))`, which is the Catalan number `C(2N, N)/(N+1)`.
pub fn count_strong_drive(n: usize) -> u128 {
    binom(2 * n as u128, n as u128) / (n as u128 + 1)
}

/// Sum of `dim^2` over the distinct irreps appearing anywhere in the ladder.
pub fn count_stationary(decomp: &IrrepDecomposition) -> usize {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for row in &decomp.rows {
        for c in &row.components {
            seen.insert(&c.name, c.dim);
        }
    }
    seen.values().map(|d| d * d).sum()
}

/// `sum_j n_j (n_j - 1) / 2` with `n_j` the number of irrep blocks at spin `j`.
pub fn count_oscillation_frequencies(decomp: &IrrepDecomposition) -> usize {
    decomp.rows.iter().map(|r| r.blocks() * r.blocks().saturating_sub(1) / 2).sum()
}

/// Published decompositions of the fixed-m subspace, one row per (N, 2j):
/// (N, 2j, d_j, S_N, D_N, C_s).
pub const REFERENCE_DECOMPOSITIONS: &[(usize, i64, u64, &str, &str, &str)] = &[
    (2, 2, 1, "A", "A", "A'"),
    (2, 0, 1, "B_1", "B_1", "A''"),
    (3, 3, 1, "A_1", "A_1", "A'"),
    (3, 1, 2, "E", "E", "A'⊕A''"),
    (4, 4, 1, "A_1", "A_1", "A'"),
    (4, 2, 3, "T_1", "B_2⊕E", "A'⊕2A''"),
    (4, 0, 2, "E", "A_1⊕B_1", "A'⊕A''"),
    (5, 5, 1, "A", "A_1", "A'"),
    (5, 3, 4, "T", "2E", "2A'⊕2A''"),
    (5, 1, 5, "H", "A_1⊕2E", "3A'⊕2A''"),
];

/// Published oscillation-frequency counts (N, D_N, C_s).
pub const REFERENCE_FREQUENCY_COUNTS: &[(usize, usize, usize)] = &[(2, 0, 0), (3, 0, 1), (4, 2, 4), (5, 4, 16)];

/// Parse `2A'⊕A''` style notation into (name, multiplicity).
pub fn parse_notation(s: &str) -> Vec<(String, usize)> {
    s.split('⊕')
        .map(|t| {
            let t = t.trim();
            let digits: String = t.chars().take_while(|c| c.is_ascii_digit()).collect();
            let mult = if digits.is_empty() { 1 } else { digits.parse().unwrap_or(1) };
            (t[digits.len()..].trim().to_string(), mult)
        })
        .collect()
}

/// Compare a computed row with reference notation. A bare `E` in the reference
/// also matches the sum over `E_1`, `E_2` when the group has no plain `E`.
pub fn matches_reference(row: &DecompositionRow, reference: &str, group: &PermGroup) -> bool {
    let mut want: BTreeMap<String, usize> = BTreeMap::new();
    for (name, m) in parse_notation(reference) {
        *want.entry(name).or_default() += m;
    }
    let mut got: BTreeMap<String, usize> = BTreeMap::new();
    for c in &row.components {
        let name = if group.irrep_index("E").is_none() && c.name.starts_with("E_") { "E".to_string() } else { c.name.clone() };
        *got.entry(name).or_default() += c.multiplicity;
    }
    want == got
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupSummary {
    pub group: String,
    pub order: usize,
    pub classes: Vec<ConjClass>,
    pub irreps: Vec<Irrep>,
    pub decomposition: Vec<DecompositionRow>,
    pub count_stationary: usize,
    pub count_oscillation_frequencies: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReferenceCheck {
    pub n: usize,
    pub j: HalfInt,
    pub group: String,
    pub computed: String,
    pub reference: String,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub n: usize,
    pub count_strong_drive: u128,
    pub sum_dj_squared: u64,
    pub groups: Vec<GroupSummary>,
    pub reference_checks: Vec<ReferenceCheck>,
    /// How the D_5 `2E` entries resolve: which of E_1/E_2 occur at each j.
    pub notes: Vec<String>,
}

pub fn symmetry_report(n: usize) -> Result<SymmetryReport> {
    let mut groups = Vec::new();
    let mut reference_checks = Vec::new();
    let mut notes = Vec::new();
    for kind in [GroupKind::S, GroupKind::D, GroupKind::Cs] {
        let g = build_group(kind, n)?;
        let dec = decompose_all(&g)?;
        for row in &dec.rows {
            if let Some(r) = REFERENCE_DECOMPOSITIONS.iter().find(|r| r.0 == n && r.1 == row.j.twice()) {
                let reference = match kind {
                    GroupKind::S => r.3,
                    GroupKind::D => r.4,
                    GroupKind::Cs => r.5,
                };
                reference_checks.push(ReferenceCheck {
                    n,
                    j: row.j,
                    group: g.name(),
                    computed: row.notation(),
                    reference: reference.to_string(),
                    matches: matches_reference(row, reference, &g),
                });
                if reference.contains("2E") && g.irrep_index("E").is_none() {
                    notes.push(format!("{} j={}: published 2E resolves to {}", g.name(), row.j, row.notation()));
                }
            }
        }
        groups.push(GroupSummary {
            group: g.name(),
            order: g.order(),
            classes: g.classes.clone(),
            irreps: g.irreps.clone(),
            count_stationary: count_stationary(&dec),
            count_oscillation_frequencies: count_oscillation_frequencies(&dec),
            decomposition: dec.rows,
        });
    }
    let sum_dj_squared = allowed_j(n).into_iter().map(|j| degeneracy_dj(n, j).map(|d| d * d)).sum::<Result<u64>>()?;
    Ok(SymmetryReport { n, count_strong_drive: count_strong_drive(n), sum_dj_squared, groups, reference_checks, notes })
}

impl SymmetryReport {
    /// Plain-text table: one line per j with the decomposition for every group, then the counts.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let names: Vec<&str> = self.groups.iter().map(|g| g.group.as_str()).collect();
        let _ = writeln!(s, "N={}  count_strong_drive={}  sum_j d_j^2={}", self.n, self.count_strong_drive, self.sum_dj_squared);
        let _ = writeln!(s, "{:<6}{:<6}{}", "j", "d_j", names.iter().map(|n| format!("{n:<22}")).collect::<String>());
        let rows = self.groups.first().map(|g| g.decomposition.len()).unwrap_or(0);
        for k in 0..rows {
            let row = &self.groups[0].decomposition[k];
            let _ = write!(s, "{:<6}{:<6}", row.j.to_string(), row.d_j);
            for g in &self.groups {
                let _ = write!(s, "{:<22}", g.decomposition[k].notation());
            }
            s.push('\n');
        }
        for g in &self.groups {
            let _ = writeln!(
                s,
                "{}: stationary={} oscillation_frequencies={}",
                g.group, g.count_stationary, g.count_oscillation_frequencies
            );
        }
        for c in self.reference_checks.iter().filter(|c| !c.matches) {
            let _ = writeln!(s, "differs from reference: {} j={} computed {} vs {}", c.group, c.j, c.computed, c.reference);
        }
        for note in &self.notes {
            let _ = writeln!(s, "{note}");
        }
        s
    }
}

/// Jucys-Murphy element `X_k = sum_{i<k} (i k)` acting on the register (k is 1-based).
pub fn jucys_murphy(n: usize, k: usize) -> Operator {
    let d = 1usize << n;
    let mut out = Operator::zeros(d, d);
    for i in 0..k.saturating_sub(1) {
        let mut t: Vec<usize> = (0..n).collect();
        t.swap(i, k - 1);
        out += permutation_operator(&t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_orders_and_closure() {
        for n in 2..=5usize {
            let s = build_group(GroupKind::S, n).unwrap();
            assert_eq!(s.order(), (1..=n).product::<usize>());
            let d = build_group(GroupKind::D, n).unwrap();
            assert_eq!(d.order(), 2 * n);
            let c = build_group(GroupKind::Cs, n).unwrap();
            assert_eq!(c.order(), 2);
        }
        assert!(build_group(GroupKind::S, 6).is_err());
        assert!(build_group(GroupKind::D, 1).is_err());
    }

    #[test]
    fn action_is_a_homomorphism() {
        for kind in [GroupKind::S, GroupKind::D, GroupKind::Cs] {
            for n in 2..=4 {
                let g = build_group(kind, n).unwrap();
                for a in 0..g.order() {
                    for b in 0..g.order() {
                        let lhs = g.operator(a) * g.operator(b);
                        let rhs = g.operator(g.table[a][b]);
                        assert!((lhs - rhs).norm_l2() < 1e-14, "{:?} N={n}", kind);
                    }
                }
            }
        }
    }

    #[test]
    fn character_orthogonality() {
        for kind in [GroupKind::S, GroupKind::D, GroupKind::Cs] {
            for n in 2..=5 {
                let g = build_group(kind, n).unwrap();
                let k = g.irreps.len();
                assert_eq!(k, g.classes.len(), "square table for {}", g.name());
                for a in 0..k {
                    for b in 0..k {
                        let s: f64 = (0..g.order()).map(|e| g.character(a, e) * g.character(b, e)).sum();
                        let want = if a == b { g.order() as f64 } else { 0.0 };
                        assert!((s - want).abs() < 1e-10, "{} {a} {b}", g.name());
                    }
                }
                // column orthogonality
                for c1 in 0..k {
                    for c2 in 0..k {
                        let s: f64 = g.irreps.iter().map(|r| r.characters[c1] * r.characters[c2]).sum();
                        let want = if c1 == c2 { g.order() as f64 / g.classes[c1].size as f64 } else { 0.0 };
                        assert!((s - want).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn small_group_shapes() {
        let s3 = build_group(GroupKind::S, 3).unwrap();
        assert_eq!(s3.classes.len(), 3);
        let mut dims: Vec<usize> = s3.irreps.iter().map(|r| r.dim).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 2]);
        let d4 = build_group(GroupKind::D, 4).unwrap();
        let names: Vec<&str> = d4.irreps.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, vec!["A_1", "A_2", "B_1", "B_2", "E"]);
        let cs = build_group(GroupKind::Cs, 4).unwrap();
        assert!(cs.irreps.iter().all(|r| r.dim == 1));
    }

    #[test]
    fn known_rows() {
        let d4 = build_group(GroupKind::D, 4).unwrap();
        assert_eq!(irrep_multiplicities(4, HalfInt::int(1), &d4).unwrap().notation(), "B_2⊕E");
        let cs = build_group(GroupKind::Cs, 4).unwrap();
        assert_eq!(irrep_multiplicities(4, HalfInt::int(1), &cs).unwrap().notation(), "A'⊕2A''");
        let s5 = build_group(GroupKind::S, 5).unwrap();
        assert_eq!(irrep_multiplicities(5, HalfInt::from_twice(1), &s5).unwrap().notation(), "H");
    }

    #[test]
    fn completeness_through_decomposition() {
        for n in 2..=5 {
            for kind in [GroupKind::S, GroupKind::D, GroupKind::Cs] {
                let dec = decompose_all(&build_group(kind, n).unwrap()).unwrap();
                let mut total = 0u64;
                for row in &dec.rows {
                    let dsum: usize = row.components.iter().map(|c| c.dim * c.multiplicity).sum();
                    assert_eq!(dsum as u64, row.d_j);
                    total += dsum as u64 * (row.j.twice() as u64 + 1);
                }
                assert_eq!(total, 1 << n);
            }
        }
    }

    #[test]
    fn counts() {
        assert_eq!(count_strong_drive(2), 2);
        assert_eq!(count_strong_drive(4), 14);
        assert_eq!(count_strong_drive(5), 42);
        let dec = |k, n| decompose_all(&build_group(k, n).unwrap()).unwrap();
        assert_eq!(count_stationary(&dec(GroupKind::S, 4)), 14);
        assert_eq!(count_stationary(&dec(GroupKind::D, 4)), 7);
        assert_eq!(count_stationary(&dec(GroupKind::Cs, 4)), 2);
        for &(n, d, c) in REFERENCE_FREQUENCY_COUNTS {
            assert_eq!(count_oscillation_frequencies(&dec(GroupKind::D, n)), d);
            assert_eq!(count_oscillation_frequencies(&dec(GroupKind::Cs, n)), c);
        }
        for n in 2..=5 {
            assert_eq!(count_stationary(&dec(GroupKind::S, n)) as u128, count_strong_drive(n));
        }
    }

    #[test]
    fn notation_parsing() {
        assert_eq!(parse_notation("3A'⊕2A''"), vec![("A'".to_string(), 3), ("A''".to_string(), 2)]);
        assert_eq!(parse_notation("2E"), vec![("E".to_string(), 2)]);
    }

    #[test]
    fn jucys_murphy_commutes_with_collective_spin() {
        let o = operators::collective_ops(4);
        for k in 2..=4 {
            let x = jucys_murphy(4, k);
            for j in [&o.jx, &o.jy, &o.jz] {
                assert!(linalg::commutator(x.as_ref(), j.as_ref()).norm_l2() < 1e-13);
            }
        }
    }
}
