//! Spin operators on the full 2^N space, the model Hamiltonian, Dicke ladders
//! and strong-drive dark mixtures.
//!
//! Basis ordering: atom 1 is the most significant tensor factor and each atom
//! lists |e> before |g>, so bit `N - n` of a basis index is 1 when atom `n` is
//! in the ground state.

use std::fmt;

use faer::{c64, Col, ColRef, Mat};
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::{Error, Result};

pub type Operator = Mat<c64>;

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
const ONE: c64 = c64 { re: 1.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    None,
    Periodic,
    Open,
}

/// Nearest-neighbour bonds (1-based) of the chain.
pub fn dipole_bonds(n: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut bonds: Vec<(usize, usize)> = match boundary {
        Boundary::None => return Vec::new(),
        _ => (1..n).map(|a| (a, a + 1)).collect(),
    };
    // for N = 2 the closing bond would duplicate (1, 2)
    if boundary == Boundary::Periodic && n > 2 {
        bonds.push((n, 1));
    }
    bonds
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub gamma: f64,
    pub omega: f64,
    pub detunings: Vec<f64>,
    pub delta: f64,
    pub boundary: Boundary,
}

impl ModelParams {
    /// Unit decay rate, no dipole-dipole coupling.
    pub fn new(n: usize, omega: f64, detunings: Vec<f64>) -> Result<Self> {
        let p = ModelParams { n, gamma: 1.0, omega, detunings, delta: 0.0, boundary: Boundary::None };
        p.validate()?;
        Ok(p)
    }

    pub fn with_dipole(mut self, delta: f64, boundary: Boundary) -> Result<Self> {
        self.delta = delta;
        self.boundary = boundary;
        self.validate()?;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        self.gamma = gamma;
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.n == 0 {
            return bad("atom count must be at least 1".into());
        }
        if self.n > 16 {
            return bad(format!("atom count {} too large", self.n));
        }
        if self.detunings.len() != self.n {
            return bad(format!("{} detunings given for {} atoms", self.detunings.len(), self.n));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("decay rate must be positive, got {}", self.gamma));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return bad(format!("drive must be non-negative, got {}", self.omega));
        }
        if self.detunings.iter().any(|w| !w.is_finite()) || !self.delta.is_finite() {
            return bad("non-finite detuning or coupling".into());
        }
        match (self.boundary, self.delta == 0.0) {
            (Boundary::None, false) => bad("dipole coupling needs a boundary (periodic or open)".into()),
            (Boundary::Periodic | Boundary::Open, true) => {
                bad("a boundary was given but the dipole coupling is zero".into())
            }
            _ => Ok(()),
        }
    }
}

/// `omega_n = -dw + 2 dw (n-1)/(N-1)`; a single atom sits at zero.
pub fn equidistant_detunings(n: usize, delta_omega: f64) -> Vec<f64> {
    if n <= 1 {
        return vec![0.0; n];
    }
    (0..n).map(|k| -delta_omega + 2.0 * delta_omega * k as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinOpKind {
    X,
    Y,
    Z,
    Lower,
    Raise,
}

fn local_matrix(kind: SpinOpKind) -> [[c64; 2]; 2] {
    let i = c64::new(0.0, 1.0);
    match kind {
        SpinOpKind::X => [[ZERO, ONE], [ONE, ZERO]],
        SpinOpKind::Y => [[ZERO, -i], [i, ZERO]],
        SpinOpKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        // |g><e|: row g (1), column e (0)
        SpinOpKind::Lower => [[ZERO, ZERO], [ONE, ZERO]],
        SpinOpKind::Raise => [[ZERO, ONE], [ZERO, ZERO]],
    }
}

/// `sigma^kind` acting on atom `n` (1-based) of an `N`-atom register.
pub fn single_atom_op(n: usize, kind: SpinOpKind, atoms: usize) -> Result<Operator> {
    if n == 0 || n > atoms {
        return Err(Error::IndexOutOfRange { index: n, n: atoms });
    }
    let dim = 1usize << atoms;
    let shift = atoms - n;
    let loc = local_matrix(kind);
    let mut out = Mat::<c64>::zeros(dim, dim);
    for col in 0..dim {
        let b = (col >> shift) & 1;
        for a in 0..2 {
            let v = loc[a][b];
            if v != ZERO {
                let row = (col & !(1 << shift)) | (a << shift);
                out[(row, col)] = v;
            }
        }
    }
    Ok(out)
}

fn atom_op(n: usize, kind: SpinOpKind, atoms: usize) -> Operator {
    single_atom_op(n, kind, atoms).expect("index checked by caller")
}

#[derive(Clone, Debug)]
pub struct CollectiveOps {
    pub jx: Operator,
    pub jy: Operator,
    pub jz: Operator,
    pub jminus: Operator,
}

impl CollectiveOps {
    pub fn jplus(&self) -> Operator {
        linalg::dagger(self.jminus.as_ref())
    }

    pub fn j2(&self) -> Operator {
        &self.jx * &self.jx + &self.jy * &self.jy + &self.jz * &self.jz
    }
}

pub fn collective_ops(atoms: usize) -> CollectiveOps {
    let dim = 1usize << atoms;
    let mut ops = CollectiveOps {
        jx: Mat::zeros(dim, dim),
        jy: Mat::zeros(dim, dim),
        jz: Mat::zeros(dim, dim),
        jminus: Mat::zeros(dim, dim),
    };
    let half = c64::new(0.5, 0.0);
    for n in 1..=atoms {
        ops.jx += linalg::scale(atom_op(n, SpinOpKind::X, atoms).as_ref(), half);
        ops.jy += linalg::scale(atom_op(n, SpinOpKind::Y, atoms).as_ref(), half);
        ops.jz += linalg::scale(atom_op(n, SpinOpKind::Z, atoms).as_ref(), half);
        ops.jminus += atom_op(n, SpinOpKind::Lower, atoms);
    }
    ops
}

/// `H = 2 Omega J_x + sum_n omega_n sigma^z_n + Delta sum_bonds (sigma_a^+ sigma_b^- + h.c.)`.
pub fn hamiltonian(p: &ModelParams) -> Operator {
    let atoms = p.n;
    let dim = p.dim();
    let ops = collective_ops(atoms);
    let mut h = linalg::scale(ops.jx.as_ref(), c64::new(2.0 * p.omega, 0.0));
    // sigma^z_n is diagonal: add it in place
    for s in 0..dim {
        let mut e = 0.0;
        for (k, w) in p.detunings.iter().enumerate() {
            let ground = (s >> (atoms - 1 - k)) & 1 == 1;
            e += if ground { -w } else { *w };
        }
        h[(s, s)] += c64::new(e, 0.0);
    }
    for (a, b) in dipole_bonds(atoms, p.boundary) {
        let hop = atom_op(a, SpinOpKind::Raise, atoms) * atom_op(b, SpinOpKind::Lower, atoms);
        let herm = &hop + hop.adjoint();
        h += linalg::scale(herm.as_ref(), c64::new(p.delta, 0.0));
    }
    h
}

/// Operator permuting atoms: `P_g |s_1..s_N> = |s_{g^-1(1)}..s_{g^-1(N)}>`.
/// `images[k]` is the 0-based image of atom `k`.
pub fn permutation_operator(images: &[usize]) -> Operator {
    let atoms = images.len();
    let dim = 1usize << atoms;
    let mut out = Mat::<c64>::zeros(dim, dim);
    for s in 0..dim {
        let mut t = 0usize;
        for (k, &gk) in images.iter().enumerate() {
            let bit = (s >> (atoms - 1 - k)) & 1;
            t |= bit << (atoms - 1 - gk);
        }
        out[(t, s)] = ONE;
    }
    out
}

/// Half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub const fn int(v: i64) -> Self {
        HalfInt(2 * v)
    }

    /// Nearest half-integer to `v`.
    pub fn round(v: f64) -> Self {
        HalfInt((2.0 * v).round() as i64)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

/// Allowed total spins for `N` atoms, largest first.
pub fn allowed_j(atoms: usize) -> Vec<HalfInt> {
    let n = atoms as i64;
    (0..=n / 2).map(|k| HalfInt(n - 2 * k)).collect()
}

fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Multiplicity `d_j = N!(2j+1)/((N/2+j+1)!(N/2-j)!)` of spin `j` among `N` spin-1/2s.
pub fn degeneracy_dj(atoms: usize, j: HalfInt) -> Result<u64> {
    let n = atoms as i64;
    let tj = j.twice();
    if tj < 0 || tj > n || (n - tj) % 2 != 0 {
        return Err(Error::InvalidLabel(format!("j={j} is not allowed for N={atoms}")));
    }
    let k = ((n - tj) / 2) as u64;
    // equals C(N, N/2-j) - C(N, N/2-j-1)
    let d = binom(atoms as u64, k) - if k == 0 { 0 } else { binom(atoms as u64, k - 1) };
    Ok(d as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Z,
    X,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DickeLabel {
    pub j: HalfInt,
    pub m: HalfInt,
    /// 1-based multiplicity index.
    pub nu: usize,
}

/// Orthonormal states `|j, m, nu>` quantized along `axis`. Column `k` of
/// `vectors` carries `labels[k]`; order is j descending, then nu, then m descending.
#[derive(Clone, Debug)]
pub struct DickeBasis {
    pub atoms: usize,
    pub axis: Axis,
    pub labels: Vec<DickeLabel>,
    pub vectors: Mat<c64>,
}

impl DickeBasis {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn vector(&self, k: usize) -> ColRef<'_, c64> {
        self.vectors.col(k)
    }

    pub fn find(&self, j: HalfInt, m: HalfInt, nu: usize) -> Option<usize> {
        self.labels.iter().position(|l| l.j == j && l.m == m && l.nu == nu)
    }
}

fn seed_vector(atoms: usize, axis: Axis, k: usize) -> Col<c64> {
    let dim = 1usize << atoms;
    match axis {
        Axis::Z => Col::from_fn(dim, |i| if i == k { ONE } else { ZERO }),
        Axis::X => {
            // product of sigma^x eigenstates: (|e> + (-1)^b |g>)/sqrt 2 per atom
            let norm = (dim as f64).sqrt().recip();
            Col::from_fn(dim, |i| {
                let sign = (i & k).count_ones() % 2;
                c64::new(if sign == 0 { norm } else { -norm }, 0.0)
            })
        }
    }
}

fn orthogonalize(v: &mut Col<c64>, against: &[Col<c64>]) {
    // two passes keep the result orthogonal to machine precision
    for _ in 0..2 {
        for u in against {
            let ov: c64 = u.adjoint() * &*v;
            *v -= u * faer::Scale(ov);
        }
    }
}

/// Dicke ladder built by Gram-Schmidt on product-state seeds (in index
/// order) for each highest weight, followed by repeated lowering.
pub fn dicke_basis(atoms: usize, axis: Axis) -> Result<DickeBasis> {
    if atoms == 0 || atoms > 10 {
        return Err(Error::InvalidParams(format!("dicke_basis supports 1..=10 atoms, got {atoms}")));
    }
    let dim = 1usize << atoms;
    let ops = collective_ops(atoms);
    // lowering operator along the quantization axis
    let lower = match axis {
        Axis::Z => ops.jminus.clone(),
        Axis::X => &ops.jy - linalg::scale(ops.jz.as_ref(), c64::new(0.0, 1.0)),
    };
    let seed_m = |k: usize| HalfInt(atoms as i64 - 2 * k.count_ones() as i64);

    let mut by_m: std::collections::BTreeMap<HalfInt, Vec<Col<c64>>> = Default::default();
    let mut labels = Vec::with_capacity(dim);
    let mut cols: Vec<Col<c64>> = Vec::with_capacity(dim);
    for j in allowed_j(atoms) {
        let dj = degeneracy_dj(atoms, j)? as usize;
        let mut tops = Vec::with_capacity(dj);
        for k in (0..dim).filter(|&k| seed_m(k) == j) {
            if tops.len() == dj {
                break;
            }
            let mut v = seed_vector(atoms, axis, k);
            let existing = by_m.entry(j).or_default();
            orthogonalize(&mut v, existing);
            orthogonalize(&mut v, &tops);
            let nrm = v.norm_l2();
            if nrm > 1e-6 {
                v *= faer::Scale(c64::new(1.0 / nrm, 0.0));
                tops.push(v);
            }
        }
        if tops.len() != dj {
            return Err(Error::Eigensolver(format!(
                "found {} highest-weight states for j={j}, expected {dj}",
                tops.len()
            )));
        }
        for (nu0, top) in tops.iter().enumerate() {
            let mut v = top.clone();
            let mut m = j;
            loop {
                by_m.entry(m).or_default().push(v.clone());
                labels.push(DickeLabel { j, m, nu: nu0 + 1 });
                cols.push(v.clone());
                if m.twice() == -j.twice() {
                    break;
                }
                let (jf, mf) = (j.value(), m.value());
                let c = (jf * (jf + 1.0) - mf * (mf - 1.0)).sqrt();
                v = &lower * &v;
                v *= faer::Scale(c64::new(1.0 / c, 0.0));
                m = HalfInt(m.twice() - 2);
            }
        }
    }
    let vectors = Mat::from_fn(dim, dim, |i, k| cols[k][i]);
    Ok(DickeBasis { atoms, axis, labels, vectors })
}

/// `(1/(2j+1)) sum_m |j,m,nu><j,m,nu'|` in an x-quantized basis.
pub fn dark_mixture(basis: &DickeBasis, j: HalfInt, nu: usize, nu_p: usize) -> Result<Operator> {
    if basis.axis != Axis::X {
        return Err(Error::InvalidLabel("dark mixtures need an x-quantized basis".into()));
    }
    let dj = degeneracy_dj(basis.atoms, j)? as usize;
    if nu == 0 || nu_p == 0 || nu > dj || nu_p > dj {
        return Err(Error::InvalidLabel(format!("nu={nu}, nu'={nu_p} outside 1..={dj} for j={j}")));
    }
    let dim = basis.vectors.nrows();
    let mut rho = Mat::<c64>::zeros(dim, dim);
    let w = 1.0 / (j.twice() + 1) as f64;
    let mut m = j;
    while m.twice() >= -j.twice() {
        let a = basis.find(j, m, nu).expect("complete basis");
        let b = basis.find(j, m, nu_p).expect("complete basis");
        rho += basis.vector(a) * basis.vector(b).adjoint() * faer::Scale(c64::new(w, 0.0));
        m = HalfInt(m.twice() - 2);
    }
    Ok(rho)
}

/// Dense operator as rows of `[re, im]` pairs, row-major.
pub fn operator_rows(op: &Operator) -> Vec<Vec<[f64; 2]>> {
    (0..op.nrows())
        .map(|i| (0..op.ncols()).map(|j| [op[(i, j)].re, op[(i, j)].im]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Operator, b: &Operator, tol: f64) -> bool {
        (a - b).norm_l2() < tol
    }

    #[test]
    fn single_atom_conventions() {
        let z = single_atom_op(1, SpinOpKind::Z, 1).unwrap();
        assert_eq!(z[(0, 0)], ONE);
        assert_eq!(z[(1, 1)], -ONE);
        let l = single_atom_op(1, SpinOpKind::Lower, 1).unwrap();
        assert_eq!(l[(1, 0)], ONE);
        assert_eq!(l.norm_l2(), 1.0);
        assert!(single_atom_op(0, SpinOpKind::X, 3).is_err());
        assert!(single_atom_op(4, SpinOpKind::X, 3).is_err());
    }

    #[test]
    fn pauli_anticommutation() {
        for atoms in 1..=3 {
            for n in 1..=atoms {
                let x = single_atom_op(n, SpinOpKind::X, atoms).unwrap();
                let z = single_atom_op(n, SpinOpKind::Z, atoms).unwrap();
                assert_eq!((&x * &z + &z * &x).norm_l2(), 0.0);
            }
        }
    }

    #[test]
    fn atom_one_is_most_significant() {
        // sigma^-_1 on |e e> gives |g e>, index 2
        let l = single_atom_op(1, SpinOpKind::Lower, 2).unwrap();
        assert_eq!(l[(2, 0)], ONE);
    }

    #[test]
    fn angular_momentum_algebra() {
        for atoms in 1..=5 {
            let o = collective_ops(atoms);
            let c = linalg::commutator(o.jx.as_ref(), o.jy.as_ref());
            let ijz = linalg::scale(o.jz.as_ref(), c64::new(0.0, 1.0));
            assert!(close(&c, &ijz, 1e-12));
            let jx2 = linalg::scale((o.jminus.clone() + o.jplus()).as_ref(), c64::new(0.5, 0.0));
            assert!(close(&jx2, &o.jx, 1e-12));
        }
    }

    #[test]
    fn kernel_of_lowering() {
        for (atoms, want) in [(1, 1), (2, 2), (3, 3), (4, 6), (5, 10), (6, 20)] {
            let o = collective_ops(atoms);
            let ns = linalg::null_space(o.jminus.as_ref(), 1e-8).unwrap();
            assert_eq!(ns.ncols(), want, "N={atoms}");
        }
    }

    #[test]
    fn hamiltonian_diagonal_without_drive() {
        let p = ModelParams::new(3, 0.0, vec![0.3, -1.1, 2.0]).unwrap();
        let h = hamiltonian(&p);
        for s in 0..8 {
            let mut e = 0.0;
            for k in 0..3 {
                e += if (s >> (2 - k)) & 1 == 0 { p.detunings[k] } else { -p.detunings[k] };
            }
            for t in 0..8 {
                let want = if s == t { e } else { 0.0 };
                assert!((h[(s, t)].re - want).abs() < 1e-14 && h[(s, t)].im == 0.0);
            }
        }
    }

    #[test]
    fn equidistant_rule() {
        let w = equidistant_detunings(4, 2.0);
        let want = [-2.0, -2.0 / 3.0, 2.0 / 3.0, 2.0];
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(equidistant_detunings(1, 3.0), vec![0.0]);
    }

    #[test]
    fn hamiltonian_hermitian_with_dipoles() {
        let p = ModelParams::new(4, 1.3, vec![0.2, -0.7, 1.1, 0.4])
            .unwrap()
            .with_dipole(0.9, Boundary::Periodic)
            .unwrap();
        let h = hamiltonian(&p);
        assert!(linalg::hermiticity_defect(h.as_ref()) < 1e-12);
    }

    #[test]
    fn bonds() {
        assert_eq!(dipole_bonds(4, Boundary::Open), vec![(1, 2), (2, 3), (3, 4)]);
        assert_eq!(dipole_bonds(4, Boundary::Periodic).len(), 4);
        assert_eq!(dipole_bonds(2, Boundary::Periodic), vec![(1, 2)]);
        assert!(dipole_bonds(1, Boundary::Periodic).is_empty());
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0, 1.0, vec![]).is_err());
        assert!(ModelParams::new(2, 1.0, vec![0.0]).is_err());
        assert!(ModelParams::new(2, -1.0, vec![0.0, 0.0]).is_err());
        let p = ModelParams::new(2, 1.0, vec![0.0, 0.0]).unwrap();
        assert!(p.clone().with_dipole(1.0, Boundary::None).is_err());
        assert!(p.clone().with_dipole(0.0, Boundary::Open).is_err());
        assert!(p.with_gamma(0.0).is_err());
    }

    #[test]
    fn degeneracies() {
        assert_eq!(degeneracy_dj(4, HalfInt::int(1)).unwrap(), 3);
        assert_eq!(degeneracy_dj(5, HalfInt::from_twice(1)).unwrap(), 5);
        assert!(degeneracy_dj(4, HalfInt::from_twice(1)).is_err());
        assert!(degeneracy_dj(4, HalfInt::int(3)).is_err());
        for atoms in 1..=8usize {
            let total: u64 = allowed_j(atoms)
                .into_iter()
                .map(|j| degeneracy_dj(atoms, j).unwrap() * (j.twice() as u64 + 1))
                .sum();
            assert_eq!(total, 1 << atoms);
        }
    }

    #[test]
    fn halfint_display() {
        assert_eq!(HalfInt::from_twice(3).to_string(), "3/2");
        assert_eq!(HalfInt::int(-1).to_string(), "-1");
        assert_eq!(HalfInt::round(0.49), HalfInt::from_twice(1));
    }

    fn check_basis(atoms: usize, axis: Axis) {
        let b = dicke_basis(atoms, axis).unwrap();
        let dim = 1 << atoms;
        assert_eq!(b.len(), dim);
        let gram = b.vectors.adjoint() * &b.vectors;
        assert!(close(&gram, &linalg::identity(dim), 1e-10));
        let o = collective_ops(atoms);
        let j2 = o.j2();
        let ja = match axis {
            Axis::Z => &o.jz,
            Axis::X => &o.jx,
        };
        for (k, l) in b.labels.iter().enumerate() {
            let v = b.vector(k);
            let jj = l.j.value() * (l.j.value() + 1.0);
            assert!((&j2 * v - v * faer::Scale(c64::new(jj, 0.0))).norm_l2() < 1e-9);
            assert!((ja * v - v * faer::Scale(c64::new(l.m.value(), 0.0))).norm_l2() < 1e-9);
        }
        for j in allowed_j(atoms) {
            let count = b.labels.iter().filter(|l| l.j == j && l.m == j).count();
            assert_eq!(count as u64, degeneracy_dj(atoms, j).unwrap());
        }
    }

    #[test]
    fn dicke_bases_are_complete_and_labelled() {
        for atoms in 1..=5 {
            check_basis(atoms, Axis::Z);
            check_basis(atoms, Axis::X);
        }
    }

    #[test]
    fn dicke_multiplicities() {
        let b = dicke_basis(2, Axis::Z).unwrap();
        assert_eq!(b.labels.iter().filter(|l| l.j == HalfInt::int(1)).count(), 3);
        assert_eq!(b.labels.iter().filter(|l| l.j == HalfInt::int(0)).count(), 1);
        let b = dicke_basis(3, Axis::Z).unwrap();
        assert_eq!(b.labels.iter().filter(|l| l.j == HalfInt::from_twice(1) && l.m == l.j).count(), 2);
    }

    #[test]
    fn dark_mixtures_commute_with_jx() {
        for atoms in 1..=5 {
            let b = dicke_basis(atoms, Axis::X).unwrap();
            let jx = collective_ops(atoms).jx;
            for j in allowed_j(atoms) {
                let dj = degeneracy_dj(atoms, j).unwrap() as usize;
                for nu in 1..=dj {
                    for nup in 1..=dj {
                        let rho = dark_mixture(&b, j, nu, nup).unwrap();
                        assert!(linalg::commutator(jx.as_ref(), rho.as_ref()).norm_l2() < 1e-12);
                        let tr = linalg::trace(rho.as_ref());
                        let want = if nu == nup { 1.0 } else { 0.0 };
                        assert!((tr - c64::new(want, 0.0)).norm() < 1e-12);
                    }
                }
            }
        }
        let b = dicke_basis(1, Axis::X).unwrap();
        let rho = dark_mixture(&b, HalfInt::from_twice(1), 1, 1).unwrap();
        assert!(close(&rho, &linalg::scale(linalg::identity(2).as_ref(), c64::new(0.5, 0.0)), 1e-14));
        assert!(dark_mixture(&b, HalfInt::from_twice(1), 2, 1).is_err());
        let bz = dicke_basis(1, Axis::Z).unwrap();
        assert!(dark_mixture(&bz, HalfInt::from_twice(1), 1, 1).is_err());
    }

    #[test]
    fn permutation_operator_is_homomorphism() {
        let g = [1usize, 2, 0, 3];
        let h = [3usize, 0, 1, 2];
        let gh: Vec<usize> = (0..4).map(|k| g[h[k]]).collect();
        let lhs = permutation_operator(&g) * permutation_operator(&h);
        assert!(close(&lhs, &permutation_operator(&gh), 0.0 + 1e-15));
        // moves atom 1's excitation to atom g(1)
        let e1 = single_atom_op(1, SpinOpKind::Z, 4).unwrap();
        let p = permutation_operator(&g);
        let moved = &p * &e1 * p.adjoint();
        assert!(close(&moved, &single_atom_op(2, SpinOpKind::Z, 4).unwrap(), 1e-15));
    }
}
