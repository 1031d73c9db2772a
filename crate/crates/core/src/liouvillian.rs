//! Lindblad generator with a single collective jump operator, its dense
//! eigendecomposition and the classification of long-lived modes.
//!
//! Vectorization stacks columns: `vec(A rho B) = (B^T kron A) vec(rho)`.

use std::cmp::Ordering;

use faer::{c64, Col, ColRef, Mat};
use serde::Serialize;

use crate::linalg;
use crate::operators::{self, ModelParams, Operator};
use crate::{Error, Result};

/// Largest atom count for which the dense 4^N superoperator is assembled.
pub const MAX_DENSE_ATOMS: usize = 6;

pub const VECTORIZATION: &str = "column-stacking";
pub const SORT_ORDER: &str = "steady-state first, then -Re ascending, |Im| ascending, Im sign ascending";

/// Eigenvalues closer to zero than this (times gamma) count as stationary.
pub const ZERO_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Superoperator {
    pub atoms: usize,
    pub gamma: f64,
    pub matrix: Mat<c64>,
    hamiltonian: Operator,
    jminus: Operator,
}

pub fn vectorize(rho: &Operator) -> Col<c64> {
    let d = rho.nrows();
    Col::from_fn(d * d, |k| rho[(k % d, k / d)])
}

pub fn unvectorize(v: ColRef<'_, c64>) -> Operator {
    let d = (v.nrows() as f64).sqrt().round() as usize;
    assert_eq!(d * d, v.nrows(), "vector length is not a square");
    Mat::from_fn(d, d, |i, j| v[i + j * d])
}

pub fn build_liouvillian(p: &ModelParams) -> Result<Superoperator> {
    p.validate()?;
    if p.n > MAX_DENSE_ATOMS {
        return Err(Error::DimensionOverflow { n: p.n, max: MAX_DENSE_ATOMS });
    }
    let h = operators::hamiltonian(p);
    let jm = operators::collective_ops(p.n).jminus;
    Ok(from_parts(h, jm, p.gamma))
}

/// Superoperator for an arbitrary Hamiltonian and jump operator `J`:
/// `L rho = -i[H, rho] + (gamma/2)(2 J rho J^+ - rho J^+ J - J^+ J rho)`.
pub fn from_parts(h: Operator, jminus: Operator, gamma: f64) -> Superoperator {
    let d = h.nrows();
    let atoms = d.trailing_zeros() as usize;
    let id = linalg::identity(d);
    let jp = linalg::dagger(jminus.as_ref());
    let k = &jp * &jminus;
    let mi = c64::new(0.0, -1.0);
    let g2 = c64::new(gamma / 2.0, 0.0);
    let ht = h.transpose().to_owned();
    let kt = k.transpose().to_owned();
    let jm_conj = jminus.conjugate().to_owned();
    let mut m = linalg::scale(
        (linalg::kron(id.as_ref(), h.as_ref()) - linalg::kron(ht.as_ref(), id.as_ref())).as_ref(),
        mi,
    );
    let diss = linalg::scale(linalg::kron(jm_conj.as_ref(), jminus.as_ref()).as_ref(), c64::new(2.0, 0.0))
        - linalg::kron(kt.as_ref(), id.as_ref())
        - linalg::kron(id.as_ref(), k.as_ref());
    m += linalg::scale(diss.as_ref(), g2);
    Superoperator { atoms, gamma, matrix: m, hamiltonian: h, jminus }
}

impl Superoperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn jump(&self) -> &Operator {
        &self.jminus
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm_l2()
    }

    /// Matrix-free action on an operator.
    pub fn apply(&self, rho: &Operator) -> Operator {
        let h = &self.hamiltonian;
        let jm = &self.jminus;
        let jp = jm.adjoint();
        let k = jp * jm;
        let comm = h * rho - rho * h;
        let diss = (jm * rho * jp) * faer::Scale(c64::new(2.0, 0.0)) - rho * &k - &k * rho;
        comm * faer::Scale(c64::new(0.0, -1.0)) + diss * faer::Scale(c64::new(self.gamma / 2.0, 0.0))
    }

    pub fn apply_vec(&self, v: ColRef<'_, c64>) -> Col<c64> {
        &self.matrix * v
    }

    /// Trace of the superoperator matrix.
    pub fn trace(&self) -> c64 {
        linalg::trace(self.matrix.as_ref())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumDiagnostics {
    /// max_i ||L r_i - lambda_i r_i|| / ||L||
    pub max_relative_residual: f64,
    /// ||W V - I||_max for the left (W) and right (V) eigenvector matrices
    pub biorthogonality_defect: f64,
    /// ||V||_F ||W||_F, large near a Jordan block
    pub condition_estimate: f64,
    /// Eigenvector matrix too ill-conditioned for coefficient extraction.
    pub defective: bool,
}

#[derive(Clone, Debug)]
pub struct LiouvillianSpectrum {
    pub atoms: usize,
    pub gamma: f64,
    pub eigenvalues: Vec<c64>,
    /// Right eigenvectors as columns: unit trace for the stationary column,
    /// unit Frobenius norm for the others.
    pub right: Mat<c64>,
    /// Left eigenvectors as rows: `left.row(i) * right.col(j) = delta_ij`.
    pub left: Mat<c64>,
    pub residuals: Vec<f64>,
    pub generator_norm: f64,
    pub diagnostics: SpectrumDiagnostics,
}

fn quantize(x: f64) -> i64 {
    (x / 1e-9).round() as i64
}

fn order_key(l: c64) -> (i64, i64, i64) {
    (quantize(-l.re), quantize(l.im.abs()), quantize(l.im).signum())
}

pub const BIORTHOGONALITY_TOL: f64 = 1e-6;
pub const RESIDUAL_TOL: f64 = 1e-8;

pub fn spectrum(l: &Superoperator) -> Result<LiouvillianSpectrum> {
    let n = l.dim();
    let (vals, vecs) = linalg::eig(l.matrix.as_ref())?;
    if vals.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    let steady = (0..n)
        .min_by(|&a, &b| vals[a].norm().total_cmp(&vals[b].norm()))
        .unwrap_or(0);
    let mut order: Vec<usize> = (0..n).filter(|&i| i != steady).collect();
    order.sort_by(|&a, &b| order_key(vals[a]).cmp(&order_key(vals[b])).then(a.cmp(&b)));
    order.insert(0, steady);

    let eigenvalues: Vec<c64> = order.iter().map(|&i| vals[i]).collect();
    let mut right = Mat::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    for c in 0..n {
        let nrm = right.col(c).norm_l2();
        if nrm > 0.0 {
            let s = c64::new(1.0 / nrm, 0.0);
            for r in 0..n {
                right[(r, c)] *= s;
            }
        }
    }
    // the stationary column is scaled to unit trace so that it is the steady state itself
    let d = l.hilbert_dim();
    let tr0: c64 = (0..d).map(|i| right[(i * d + i, 0)]).sum();
    if tr0.norm() > 1e-10 {
        let s = tr0.inv();
        for r in 0..n {
            right[(r, 0)] *= s;
        }
    }
    let lr = &l.matrix * &right;
    let generator_norm = l.norm();
    let residuals: Vec<f64> = (0..n)
        .map(|c| (lr.col(c) - right.col(c) * faer::Scale(eigenvalues[c])).norm_l2())
        .collect();
    let max_rel = residuals.iter().cloned().fold(0.0, f64::max) / generator_norm.max(f64::MIN_POSITIVE);
    if max_rel > RESIDUAL_TOL {
        return Err(Error::Defective(format!("relative eigen-residual {max_rel:e}")));
    }
    let left = linalg::inverse(right.as_ref());
    let prod = &left * &right;
    let mut defect = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            let e = (prod[(i, j)] - c64::new(want, 0.0)).norm();
            defect = defect.max(if e.is_finite() { e } else { f64::INFINITY });
        }
    }
    let cond = right.norm_l2() * left.norm_l2();
    let defective = !(defect < BIORTHOGONALITY_TOL) || !cond.is_finite() || cond > 1e12;
    Ok(LiouvillianSpectrum {
        atoms: l.atoms,
        gamma: l.gamma,
        eigenvalues,
        right,
        left,
        residuals,
        generator_norm,
        diagnostics: SpectrumDiagnostics {
            max_relative_residual: max_rel,
            biorthogonality_defect: defect,
            condition_estimate: cond,
            defective,
        },
    })
}

impl LiouvillianSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn hilbert_dim(&self) -> usize {
        1 << self.atoms
    }

    /// Right eigenvector `i` reshaped to a matrix.
    pub fn eigenmatrix(&self, i: usize) -> Operator {
        unvectorize(self.right.col(i))
    }

    /// Number of eigenvalues with `|lambda| < ZERO_TOL * gamma`.
    pub fn zero_multiplicity(&self) -> usize {
        self.eigenvalues.iter().filter(|l| l.norm() < ZERO_TOL * self.gamma).count()
    }

    /// Decay rates `-Re lambda` in sorted order.
    pub fn rates(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| -l.re).collect()
    }
}

pub fn steady_state(spec: &LiouvillianSpectrum) -> Result<Operator> {
    let zeros = spec.zero_multiplicity();
    if zeros > 1 {
        return Err(Error::DegenerateSteadyState { multiplicity: zeros, tol: ZERO_TOL * spec.gamma });
    }
    let raw = spec.eigenmatrix(0);
    let tr = linalg::trace(raw.as_ref());
    if tr.norm() < 1e-12 * raw.norm_l2() {
        return Err(Error::Defective("steady-state eigenmatrix is traceless".into()));
    }
    let rho = linalg::hermitize(linalg::scale(raw.as_ref(), tr.inv()).as_ref());
    let tr = linalg::trace(rho.as_ref()).re;
    let rho = linalg::scale(rho.as_ref(), c64::new(1.0 / tr, 0.0));
    let min_eig = linalg::eigvalsh(rho.as_ref())?.first().copied().unwrap_or(0.0);
    if min_eig < -1e-8 {
        return Err(Error::Defective(format!("steady state not positive: min eigenvalue {min_eig:e}")));
    }
    Ok(rho)
}

#[derive(Clone, Debug, Serialize)]
pub struct SubradiantReport {
    /// Nonzero eigenvalue of smallest `-Re`, as `[re, im]`.
    pub lambda1: [f64; 2],
    pub threshold: f64,
    pub freq_tol: f64,
    /// Eigenvalues with `-Re lambda < threshold`, steady state included.
    pub count_inclusive: usize,
    pub count_exclusive: usize,
    /// Distinct `|Im lambda|` in the cluster, ascending.
    pub frequencies: Vec<f64>,
    /// `-Re` of the first eigenvalue outside the cluster over `-Re` of the last one inside.
    pub gap_ratio: Option<f64>,
}

/// Sorted distinct values above `tol`, merging neighbours closer than `tol`.
pub fn distinct_frequencies(imag: impl IntoIterator<Item = f64>, tol: f64) -> Vec<f64> {
    let mut v: Vec<f64> = imag.into_iter().map(f64::abs).filter(|x| *x > tol).collect();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for x in v {
        match out.last() {
            Some(&last) if x - last <= tol => {}
            _ => out.push(x),
        }
    }
    out
}

pub fn classify_subradiant(spec: &LiouvillianSpectrum, threshold: f64, freq_tol: f64) -> SubradiantReport {
    let g = spec.gamma;
    let ev = &spec.eigenvalues;
    let lambda1 = ev.get(1).map(|l| [l.re, l.im]).unwrap_or([0.0, 0.0]);
    let count = ev.iter().filter(|l| -l.re < threshold * g).count();
    let cluster = ev.iter().filter(|l| -l.re < threshold * g);
    let frequencies = distinct_frequencies(cluster.map(|l| l.im), freq_tol * g);
    // ordering is by quantized -Re, so the cluster is a prefix
    let gap_ratio = if count >= 2 && count < ev.len() {
        let inside = -ev[count - 1].re;
        let outside = -ev[count].re;
        (inside > 0.0).then(|| outside / inside)
    } else {
        None
    };
    SubradiantReport {
        lambda1,
        threshold,
        freq_tol,
        count_inclusive: count,
        count_exclusive: count.saturating_sub(1),
        frequencies,
        gap_ratio,
    }
}

/// Dark modes identified by their response to the drive: a mode is dark when
/// its rate stays below `threshold / kappa` once the drive is multiplied by
/// `kappa`. Dark rates fall with the drive while dipole-limited ones saturate,
/// so this separates the two families when both sit below `threshold`.
#[derive(Clone, Debug, Serialize)]
pub struct DarkCluster {
    pub kappa: f64,
    pub threshold: f64,
    pub scaled_drive: f64,
    pub count_inclusive: usize,
    pub count_exclusive: usize,
    pub frequencies: Vec<f64>,
}

pub fn dark_cluster(p: &ModelParams, threshold: f64, kappa: f64, freq_tol: f64) -> Result<DarkCluster> {
    let mut q = p.clone();
    q.omega = p.omega * kappa;
    let spec = spectrum(&build_liouvillian(&q)?)?;
    let rep = classify_subradiant(&spec, threshold / kappa, freq_tol);
    Ok(DarkCluster {
        kappa,
        threshold,
        scaled_drive: q.omega,
        count_inclusive: rep.count_inclusive,
        count_exclusive: rep.count_exclusive,
        frequencies: rep.frequencies,
    })
}

/// Coefficients `c_i = <left_i, vec(rho0)>` of the eigenmode expansion.
pub fn decompose_initial(spec: &LiouvillianSpectrum, rho0: &Operator) -> Result<Vec<c64>> {
    if spec.diagnostics.defective {
        return Err(Error::Defective(format!(
            "biorthogonality defect {:e}, condition estimate {:e}",
            spec.diagnostics.biorthogonality_defect, spec.diagnostics.condition_estimate
        )));
    }
    if rho0.nrows() != spec.hilbert_dim() || rho0.ncols() != spec.hilbert_dim() {
        return Err(Error::InvalidParams(format!(
            "initial state is {}x{}, expected dimension {}",
            rho0.nrows(),
            rho0.ncols(),
            spec.hilbert_dim()
        )));
    }
    let c = &spec.left * vectorize(rho0);
    Ok((0..c.nrows()).map(|i| c[i]).collect())
}

pub fn reconstruct(spec: &LiouvillianSpectrum, coeffs: &[c64]) -> Operator {
    let n = spec.right.nrows();
    let v = Col::from_fn(n, |r| (0..coeffs.len()).map(|i| spec.right[(r, i)] * coeffs[i]).sum());
    unvectorize(v.as_ref())
}

/// Order used for sorting, exposed for callers that re-sort subsets.
pub fn compare_eigenvalues(a: c64, b: c64) -> Ordering {
    order_key(a).cmp(&order_key(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{collective_ops, Boundary};

    fn params(n: usize, omega: f64, w: Vec<f64>) -> ModelParams {
        ModelParams::new(n, omega, w).unwrap()
    }

    fn random_rho(d: usize, seed: u64) -> Operator {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let a = Mat::from_fn(d, d, |_, _| c64::new(next(), next()));
        let r = &a * a.adjoint();
        let tr = linalg::trace(r.as_ref()).re;
        linalg::scale(r.as_ref(), c64::new(1.0 / tr, 0.0))
    }

    #[test]
    fn matrix_matches_definition() {
        let p = params(3, 0.7, vec![0.3, -0.2, 1.1]).with_dipole(0.4, Boundary::Open).unwrap();
        let l = build_liouvillian(&p).unwrap();
        for seed in 0..10 {
            let rho = random_rho(8, seed);
            let direct = l.apply(&rho);
            let via = unvectorize(l.apply_vec(vectorize(&rho).as_ref()).as_ref());
            assert!((direct - via).norm_l2() < 1e-12);
        }
    }

    #[test]
    fn identity_input_without_drive() {
        let p = params(3, 0.0, vec![0.0; 3]);
        let l = build_liouvillian(&p).unwrap();
        let d = 8;
        let rho = linalg::scale(linalg::identity(d).as_ref(), c64::new(1.0 / d as f64, 0.0));
        let out = l.apply(&rho);
        let o = collective_ops(3);
        let jp = o.jplus();
        let want = linalg::scale((&o.jminus * &jp - &jp * &o.jminus).as_ref(), c64::new(1.0 / d as f64, 0.0));
        assert!((&out - want).norm_l2() < 1e-13);
        assert!(out.norm_l2() > 0.1);
        assert!(linalg::trace(out.as_ref()).norm() < 1e-13);
    }

    #[test]
    fn single_atom_spectrum() {
        let w = 0.8;
        let l = build_liouvillian(&params(1, 0.0, vec![w])).unwrap();
        let s = spectrum(&l).unwrap();
        let want = [c64::new(0.0, 0.0), c64::new(-0.5, -2.0 * w), c64::new(-0.5, 2.0 * w), c64::new(-1.0, 0.0)];
        for (a, b) in s.eigenvalues.iter().zip(want) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn eigenvalue_sum_is_trace() {
        let p = params(3, 1.5, vec![0.4, -1.0, 0.9]);
        let l = build_liouvillian(&p).unwrap();
        let s = spectrum(&l).unwrap();
        let sum: c64 = s.eigenvalues.iter().sum();
        assert!((sum - l.trace()).norm() < 1e-8 * l.trace().norm());
    }

    #[test]
    fn steady_state_without_drive_is_ground() {
        let s = spectrum(&build_liouvillian(&params(2, 0.0, vec![0.5, -1.3])).unwrap()).unwrap();
        let rho = steady_state(&s).unwrap();
        let mut want = Mat::<c64>::zeros(4, 4);
        want[(3, 3)] = c64::new(1.0, 0.0);
        assert!((rho - want).norm_l2() < 1e-8);
    }

    #[test]
    fn saturated_single_atom() {
        let om = 50.0;
        let s = spectrum(&build_liouvillian(&params(1, om, vec![0.0])).unwrap()).unwrap();
        let rho = steady_state(&s).unwrap();
        assert!((rho[(0, 0)].re - 0.5).abs() < 1.0 / (om * om));
        assert!((linalg::trace(rho.as_ref()).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_steady_state_reported() {
        let s = spectrum(&build_liouvillian(&params(2, 0.0, vec![0.0, 0.0])).unwrap()).unwrap();
        assert!(matches!(steady_state(&s), Err(Error::DegenerateSteadyState { multiplicity: 4, .. })));
        let rep = classify_subradiant(&s, 0.05, 1e-6);
        assert!(rep.lambda1[0].abs() < 1e-9 && rep.lambda1[1].abs() < 1e-9);
    }

    #[test]
    fn decomposition_roundtrip() {
        let p = params(2, 0.9, vec![0.3, -0.8]);
        let s = spectrum(&build_liouvillian(&p).unwrap()).unwrap();
        let rho0 = random_rho(4, 3);
        let c = decompose_initial(&s, &rho0).unwrap();
        assert!((reconstruct(&s, &c) - &rho0).norm_l2() < 1e-10);
        let ss = steady_state(&s).unwrap();
        let c = decompose_initial(&s, &ss).unwrap();
        assert!((c[0] - c64::new(1.0, 0.0)).norm() < 1e-9);
        assert!(c[1..].iter().all(|x| x.norm() < 1e-9));
    }

    #[test]
    fn dimension_guard() {
        let p = params(7, 1.0, vec![0.0; 7]);
        assert!(matches!(build_liouvillian(&p), Err(Error::DimensionOverflow { .. })));
    }

    #[test]
    fn frequency_dedup() {
        let f = distinct_frequencies([0.0, 1.0, -1.0 - 1e-8, 2.0, 1e-9], 1e-6);
        assert_eq!(f.len(), 2);
    }
}
