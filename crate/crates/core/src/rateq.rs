//! Secular rate equation for populations in the Hamiltonian eigenbasis,
//! its stationary solutions, and oscillation frequencies predicted from
//! energy differences between irrep blocks of equal total spin.

use std::collections::BTreeMap;

use faer::{c64, Mat};
use serde::Serialize;

use crate::linalg;
use crate::liouvillian::distinct_frequencies;
use crate::operators::{allowed_j, collective_ops, HalfInt, Operator};
use crate::symmetry::{decompose_all, jucys_murphy, PermGroup};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct UnresolvedBlock {
    pub energy: f64,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct StateLabel {
    pub energy: f64,
    /// `<J^2>`
    pub j2: f64,
    /// `<J_x>`
    pub jx: f64,
    /// Irrep whose isotypic projector holds the state, when a group was given.
    pub irrep: Option<String>,
}

#[derive(Clone, Debug)]
pub struct RateMatrix {
    pub gamma: f64,
    pub energies: Vec<f64>,
    /// Eigenstates of H as columns.
    pub states: Mat<c64>,
    /// `R[a][b] = gamma |<a|J-|b>|^2 - delta_ab gamma <a|J+J-|a>`
    pub rates: Mat<f64>,
    pub labels: Vec<StateLabel>,
    pub unresolved: Vec<UnresolvedBlock>,
}

fn expect(op: &Operator, v: faer::ColRef<'_, c64>) -> f64 {
    (v.adjoint() * (op * v)).re
}

/// Split `[0, vals.len())` (ascending `vals`) into runs closer than `tol`.
fn clusters(vals: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=vals.len() {
        if k == vals.len() || vals[k] - vals[k - 1] > tol {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Rotate each degenerate block of `basis` to diagonalize the resolvers in turn.
fn resolve(basis: &mut Mat<c64>, energies: &[f64], tol: f64, resolvers: &[Operator]) -> Result<Vec<UnresolvedBlock>> {
    let mut unresolved = Vec::new();
    for block in clusters(energies, tol) {
        let mut pending = vec![block.clone()];
        for r in resolvers {
            let scale = r.norm_l2().max(1.0);
            let mut next = Vec::new();
            for sub in pending {
                if sub.len() == 1 {
                    next.push(sub);
                    continue;
                }
                let b: Mat<c64> = basis.subcols(sub.start, sub.len()).to_owned();
                let m = b.adjoint() * r * &b;
                let (vals, vecs) = linalg::eigh(linalg::hermitize(m.as_ref()).as_ref())?;
                let rotated = &b * &vecs;
                basis.subcols_mut(sub.start, sub.len()).copy_from(&rotated);
                for c in clusters(&vals, 1e-8 * scale) {
                    next.push(sub.start + c.start..sub.start + c.end);
                }
            }
            pending = next;
        }
        for sub in pending.into_iter().filter(|s| s.len() > 1) {
            unresolved.push(UnresolvedBlock { energy: energies[sub.start], dim: sub.len() });
        }
    }
    Ok(unresolved)
}

/// Isotypic resolver `sum_r (r+1) P_r`.
fn isotypic_resolver(group: &PermGroup) -> Operator {
    let d = 1usize << group.n;
    let mut z = Operator::zeros(d, d);
    for r in 0..group.irreps.len() {
        z += linalg::scale(group.isotypic_projector(r).as_ref(), c64::new((r + 1) as f64, 0.0));
    }
    z
}

/// Diagonalize `h`, fix a basis inside degenerate eigenspaces with the
/// resolver sequence J^2, isotypic projectors (if `group`), J_z, J_x and the
/// Jucys-Murphy elements, then assemble the rate matrix.
pub fn build_rate_matrix(h: &Operator, jminus: &Operator, gamma: f64, group: Option<&PermGroup>) -> Result<RateMatrix> {
    let d = h.nrows();
    let n = d.trailing_zeros() as usize;
    if linalg::hermiticity_defect(h.as_ref()) > 1e-10 * h.norm_l2().max(1.0) {
        return Err(Error::InvalidParams("Hamiltonian is not Hermitian".into()));
    }
    let (energies, mut basis) = linalg::eigh(h.as_ref())?;
    let ops = collective_ops(n);
    let j2 = ops.j2();
    let mut resolvers = vec![j2.clone()];
    if let Some(g) = group {
        resolvers.push(isotypic_resolver(g));
    }
    resolvers.push(ops.jz.clone());
    resolvers.push(ops.jx.clone());
    for k in 2..=n {
        resolvers.push(jucys_murphy(n, k));
    }
    let scale = energies.iter().fold(1.0f64, |a, e| a.max(e.abs()));
    let unresolved = resolve(&mut basis, &energies, 1e-9 * scale, &resolvers)?;

    // <a|J-|b> for all pairs
    let me = basis.adjoint() * jminus * &basis;
    let rates = Mat::from_fn(d, d, |a, b| {
        let off = gamma * me[(a, b)].norm_sqr();
        if a == b {
            let out: f64 = (0..d).map(|c| me[(c, a)].norm_sqr()).sum();
            off - gamma * out
        } else {
            off
        }
    });
    let projectors: Vec<(String, Operator)> = group
        .map(|g| (0..g.irreps.len()).map(|r| (g.irreps[r].name.clone(), g.isotypic_projector(r))).collect())
        .unwrap_or_default();
    let labels = (0..d)
        .map(|a| {
            let v = basis.col(a);
            let irrep = projectors
                .iter()
                .map(|(name, p)| (name, expect(p, v)))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .filter(|(_, w)| *w > 0.99)
                .map(|(name, _)| name.clone());
            StateLabel { energy: energies[a], j2: expect(&j2, v), jx: expect(&ops.jx, v), irrep }
        })
        .collect();
    Ok(RateMatrix { gamma, energies, states: basis, rates, labels, unresolved })
}

impl RateMatrix {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Largest |column sum|; zero by probability conservation.
    pub fn conservation_defect(&self) -> f64 {
        (0..self.dim())
            .map(|b| (0..self.dim()).map(|a| self.rates[(a, b)]).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    /// Most negative off-diagonal entry (should be >= 0).
    pub fn min_off_diagonal(&self) -> f64 {
        let mut m = f64::INFINITY;
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                if a != b {
                    m = m.min(self.rates[(a, b)]);
                }
            }
        }
        m
    }

    pub fn apply(&self, c: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|a| (0..self.dim()).map(|b| self.rates[(a, b)] * c[b]).sum()).collect()
    }

    /// Populations `<a|rho|a>` of an operator in this basis.
    pub fn populations(&self, rho: &Operator) -> Vec<f64> {
        (0..self.dim())
            .map(|a| {
                let v = self.states.col(a);
                (v.adjoint() * (rho * v)).re
            })
            .collect()
    }

    fn complex(&self) -> Mat<c64> {
        Mat::from_fn(self.dim(), self.dim(), |a, b| c64::new(self.rates[(a, b)], 0.0))
    }
}

pub const NULL_TOL: f64 = 1e-9;

/// Dimension of `{c : R c = 0}`, counting singular values below `tol * ||R||_2`.
pub fn stationary_count(r: &RateMatrix, tol: f64) -> Result<usize> {
    let sv = linalg::singular_values(r.complex().as_ref())?;
    stationary_count_from(&sv, tol)
}

fn stationary_count_from(sv: &[f64], tol: f64) -> Result<usize> {
    let norm = sv.first().copied().unwrap_or(0.0);
    let threshold = tol * norm.max(f64::MIN_POSITIVE);
    let below = sv.iter().copied().filter(|s| *s < threshold).fold(0.0, f64::max);
    let above = sv.iter().copied().filter(|s| *s >= threshold).fold(f64::INFINITY, f64::min);
    if below > threshold / 10.0 || above < threshold * 10.0 {
        return Err(Error::AmbiguousGap { below, above, threshold });
    }
    Ok(sv.iter().filter(|s| **s < threshold).count())
}

/// One irrep copy at total spin `j`, with its energies (drive part removed) per `m_x`.
#[derive(Clone, Debug, Serialize)]
pub struct IrrepBlock {
    pub j: HalfInt,
    pub irrep: String,
    pub copy: usize,
    /// `(m_x, E - 2 Omega m_x)`, ascending in `m_x`.
    pub energies: Vec<(HalfInt, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrequencyPrediction {
    pub blocks: Vec<IrrepBlock>,
    /// `(j, block a, block b, |mean_m (E_a - E_b)|)`
    pub pairs: Vec<(HalfInt, usize, usize, f64)>,
    /// Distinct frequencies, ascending.
    pub frequencies: Vec<f64>,
}

/// Frequencies of coherences between irrep blocks of equal total spin.
/// `r` must have been built with `group`; `omega` is the drive so that the
/// `2 Omega m_x` ladder can be removed before comparing blocks.
pub fn predicted_frequencies(r: &RateMatrix, group: &PermGroup, omega: f64, freq_tol: f64) -> Result<FrequencyPrediction> {
    let n = group.n;
    let dec = decompose_all(group)?;
    // (m, irrep) -> state indices
    let mut sectors: BTreeMap<(HalfInt, String), Vec<usize>> = BTreeMap::new();
    for (a, l) in r.labels.iter().enumerate() {
        let irrep = l
            .irrep
            .clone()
            .ok_or_else(|| Error::InvalidLabel(format!("state {a} (E={}) has no irrep label", l.energy)))?;
        sectors.entry((HalfInt::round(l.jx), irrep)).or_default().push(a);
    }
    // (j, irrep) -> m -> energies
    let mut per_block: BTreeMap<(HalfInt, String), BTreeMap<HalfInt, Vec<f64>>> = BTreeMap::new();
    for ((m, irrep), mut states) in sectors {
        let ridx = group.irrep_index(&irrep).expect("label from this group");
        let dim = group.irreps[ridx].dim;
        // expected total spins in this sector, ascending
        let mut js = Vec::new();
        for j in allowed_j(n).into_iter().rev() {
            if j.twice() < m.twice().abs() {
                continue;
            }
            let row = dec.rows.iter().find(|row| row.j == j).expect("row per j");
            let mult = row.components.iter().find(|c| c.name == irrep).map(|c| c.multiplicity).unwrap_or(0);
            js.extend(std::iter::repeat_n(j, mult * dim));
        }
        if js.len() != states.len() {
            return Err(Error::InvalidLabel(format!(
                "sector m_x={m}, {irrep}: {} states but {} expected",
                states.len(),
                js.len()
            )));
        }
        states.sort_by(|&a, &b| r.labels[a].j2.total_cmp(&r.labels[b].j2));
        for (&a, &j) in states.iter().zip(&js) {
            per_block
                .entry((j, irrep.clone()))
                .or_default()
                .entry(m)
                .or_default()
                .push(r.energies[a] - 2.0 * omega * m.value());
        }
    }
    let mut blocks = Vec::new();
    for ((j, irrep), by_m) in per_block {
        let dim = group.irreps[group.irrep_index(&irrep).expect("known irrep")].dim;
        let copies = by_m.values().next().map(|v| v.len() / dim).unwrap_or(0);
        for c in 0..copies {
            let energies = by_m
                .iter()
                .map(|(m, es)| {
                    let mut es = es.clone();
                    es.sort_by(f64::total_cmp);
                    let chunk = &es[c * dim..(c + 1) * dim];
                    (*m, chunk.iter().sum::<f64>() / dim as f64)
                })
                .collect();
            blocks.push(IrrepBlock { j, irrep: irrep.clone(), copy: c + 1, energies });
        }
    }
    let mut pairs = Vec::new();
    for a in 0..blocks.len() {
        for b in a + 1..blocks.len() {
            if blocks[a].j != blocks[b].j {
                continue;
            }
            let diffs: Vec<f64> = blocks[a].energies.iter().zip(&blocks[b].energies).map(|(x, y)| x.1 - y.1).collect();
            let f = (diffs.iter().sum::<f64>() / diffs.len() as f64).abs();
            pairs.push((blocks[a].j, a, b, f));
        }
    }
    let frequencies = distinct_frequencies(pairs.iter().map(|p| p.3), freq_tol);
    Ok(FrequencyPrediction { blocks, pairs, frequencies })
}

/// Match each predicted frequency to the nearest observed one (both sorted)
/// and return the worst relative deviation; `None` if the counts differ.
pub fn max_relative_mismatch(predicted: &[f64], observed: &[f64]) -> Option<f64> {
    if predicted.len() != observed.len() {
        return None;
    }
    let mut p = predicted.to_vec();
    let mut o = observed.to_vec();
    p.sort_by(f64::total_cmp);
    o.sort_by(f64::total_cmp);
    Some(p.iter().zip(&o).map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max))
}
