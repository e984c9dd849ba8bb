//! Exact diagonalization, the transverse-field Ising reference, spectrum
//! comparison and the free-fermion ground-state oracle.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainBasis, ChainOperator};

/// Largest dimension accepted by dense diagonalization.
pub const DENSE_LIMIT: usize = 4096;
pub const DEGENERACY_TOL: f64 = 1e-8;
pub const SPECTRAL_TOL: f64 = 1e-10;
const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum SpectraError {
    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("dimension {0} exceeds the dense limit {DENSE_LIMIT}; use Lanczos")]
    TooLarge(usize),
    #[error("empty operator")]
    Empty,
    #[error("invalid argument: {0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, SpectraError>;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSource {
    pub model: String,
    pub size: usize,
    pub boundary: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kappa: Option<i32>,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub degeneracies: Vec<Level>,
    pub degeneracy_tolerance: f64,
    pub source: SpectrumSource,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<f64>, degeneracy_tolerance: f64, source: SpectrumSource) -> Spectrum {
        eigenvalues.sort_by(f64::total_cmp);
        let mut degeneracies: Vec<Level> = Vec::new();
        let mut start = f64::NAN;
        for &e in &eigenvalues {
            match degeneracies.last_mut() {
                Some(l) if (e - start).abs() <= degeneracy_tolerance => l.multiplicity += 1,
                _ => {
                    start = e;
                    degeneracies.push(Level { energy: e, multiplicity: 1 });
                }
            }
        }
        Spectrum { eigenvalues, degeneracies, degeneracy_tolerance, source }
    }

    pub fn ground_energy(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn ground_degeneracy(&self) -> usize {
        self.degeneracies.first().map_or(0, |l| l.multiplicity)
    }

    /// Multiset union, e.g. of boundary sectors.
    pub fn union(parts: &[&Spectrum], source: SpectrumSource) -> Spectrum {
        let tol = parts.first().map_or(DEGENERACY_TOL, |s| s.degeneracy_tolerance);
        Spectrum::new(parts.iter().flat_map(|s| s.eigenvalues.iter().copied()).collect(), tol, source)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum DiagMode {
    DenseFull,
    LanczosLowK { k: usize },
}

/// Connected components of the sparsity graph, each sorted.
pub fn connected_blocks(op: &ChainOperator) -> Vec<Vec<usize>> {
    let n = op.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (r, c, _) in op.triplets() {
        let (a, b) = (find(&mut parent, r), find(&mut parent, c));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        blocks.entry(root).or_default().push(i);
    }
    blocks.into_values().collect()
}

fn dense_block_eigenvalues(op: &ChainOperator, idx: &[usize]) -> Vec<f64> {
    let pos: std::collections::HashMap<usize, usize> = idx.iter().enumerate().map(|(i, &j)| (j, i)).collect();
    let n = idx.len();
    if op.is_real() {
        let mut m = faer::Mat::<f64>::zeros(n, n);
        for (r, c, v) in op.triplets() {
            if let (Some(&i), Some(&j)) = (pos.get(&r), pos.get(&c)) {
                m.write(i, j, v.re);
            }
        }
        m.selfadjoint_eigenvalues(faer::Side::Lower)
    } else {
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (r, c, v) in op.triplets() {
            if let (Some(&i), Some(&j)) = (pos.get(&r), pos.get(&c)) {
                m[(i, j)] = v;
            }
        }
        m.symmetric_eigenvalues().iter().copied().collect()
    }
}

/// Dense eigenvalues, block by block over the connected components of the
/// sparsity pattern (an exact decomposition).
pub fn diagonalize_dense(op: &ChainOperator, source: SpectrumSource) -> Result<Spectrum> {
    if op.dim() == 0 {
        return Err(SpectraError::Empty);
    }
    if op.dim() > DENSE_LIMIT {
        return Err(SpectraError::TooLarge(op.dim()));
    }
    let herm = op.hermiticity_error();
    if herm > HERMITICITY_TOL {
        return Err(SpectraError::NotHermitian(herm));
    }
    let mut ev = Vec::with_capacity(op.dim());
    for block in connected_blocks(op) {
        ev.extend(dense_block_eigenvalues(op, &block));
    }
    Ok(Spectrum::new(ev, DEGENERACY_TOL, source))
}

pub fn diagonalize(op: &ChainOperator, mode: DiagMode, mut source: SpectrumSource) -> Result<Spectrum> {
    match mode {
        DiagMode::DenseFull => {
            source.method = "dense".into();
            diagonalize_dense(op, source)
        }
        DiagMode::LanczosLowK { k } => {
            source.method = format!("lanczos({k})");
            let herm = op.hermiticity_error();
            if herm > HERMITICITY_TOL {
                return Err(SpectraError::NotHermitian(herm));
            }
            Ok(Spectrum::new(lanczos_lowest(op, k, 0)?, DEGENERACY_TOL, source))
        }
    }
}

/// Lowest `k` Ritz values from Lanczos with full reorthogonalization.
/// Degenerate levels appear once per independent Krylov direction, so the
/// multiplicities of the result are not reliable.
pub fn lanczos_lowest(op: &ChainOperator, k: usize, seed: u64) -> Result<Vec<f64>> {
    let n = op.dim();
    if n == 0 {
        return Err(SpectraError::Empty);
    }
    if k == 0 {
        return Err(SpectraError::Invalid("k must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, 0.0)).collect();
    normalize(&mut v);
    let max_iter = n.min(300.max(4 * k));
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for _ in 0..max_iter {
        basis.push(v.clone());
        let mut w = op.matvec(&v);
        alpha.push(dot(&v, &w).re);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let nb = norm(&w);
        // residual of Ritz pair i is nb·|s_{m,i}|
        let (ritz, last) = tridiagonal_eigen(&alpha, &beta);
        let m = ritz.len();
        let done = nb < 1e-12
            || (m >= k && (0..k).all(|i| nb * last[i].abs() < 1e-11 * (1.0 + ritz[i].abs())));
        if done || basis.len() == n {
            return Ok(ritz.into_iter().take(k).collect());
        }
        beta.push(nb);
        v = w.into_iter().map(|x| x / nb).collect();
    }
    Ok(tridiagonal_eigen(&alpha, &beta).0.into_iter().take(k).collect())
}

/// Sorted eigenvalues of the Lanczos matrix and the last component of each
/// eigenvector.
fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let last = order.iter().map(|&i| eig.eigenvectors[(m - 1, i)]).collect();
    (vals, last)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(a: &mut [Complex64]) {
    let n = norm(a);
    for x in a.iter_mut() {
        *x /= n;
    }
}

/// How many identity terms the reference carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TfimConvention {
    /// One per local term of the defect chain with 2n+1 edges: 2n-1.
    #[default]
    MatchDefectChain,
    /// One per qubit: n.
    PerSite,
}

impl TfimConvention {
    pub fn identity_terms(self, n: usize) -> usize {
        match self {
            TfimConvention::MatchDefectChain => 2 * n - 1,
            TfimConvention::PerSite => n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfimBasis {
    /// Computational basis: Z diagonal.
    Z,
    /// Hadamard-rotated basis: X diagonal, ZZ flips pairs (parity blocks).
    X,
}

/// `-(1/√2)(c·1 + Σ_{i<n-1} Z_i Z_{i+1} + Σ_i X_i)` on n qubits with open
/// boundary, `c` from `conv`.
pub fn tfim_reference(n: usize, conv: TfimConvention) -> Result<ChainOperator> {
    tfim_operator(n, conv, TfimBasis::Z, &[])
}

/// Same operator with optional per-bond ZZ couplings (default 1) and a
/// choice of basis.
pub fn tfim_operator(n: usize, conv: TfimConvention, basis: TfimBasis, couplings: &[f64]) -> Result<ChainOperator> {
    if n == 0 {
        return Err(SpectraError::Invalid("n_qubits must be at least 1".into()));
    }
    if n > 24 {
        return Err(SpectraError::Invalid("tfim_reference is limited to 24 qubits".into()));
    }
    let pref = -std::f64::consts::FRAC_1_SQRT_2;
    let c = conv.identity_terms(n) as f64;
    let j = |i: usize| couplings.get(i).copied().unwrap_or(1.0);
    let dim = 1usize << n;
    let mut rows = Vec::with_capacity(dim);
    for s in 0..dim {
        let sign = |i: usize| if s >> i & 1 == 0 { 1.0 } else { -1.0 };
        let mut row: Vec<(usize, f64)> = Vec::new();
        match basis {
            TfimBasis::Z => {
                let diag = c + (0..n - 1).map(|i| j(i) * sign(i) * sign(i + 1)).sum::<f64>();
                row.push((s, pref * diag));
                for i in 0..n {
                    row.push((s ^ (1 << i), pref));
                }
            }
            TfimBasis::X => {
                let diag = c + (0..n).map(sign).sum::<f64>();
                row.push((s, pref * diag));
                for i in 0..n - 1 {
                    row.push((s ^ (3 << i), pref * j(i)));
                }
            }
        }
        row.sort_by_key(|e| e.0);
        rows.push(row);
    }
    let label = match conv {
        TfimConvention::MatchDefectChain => "matched",
        TfimConvention::PerSite => "per-site",
    };
    Ok(ChainOperator::from_rows(ChainBasis::qubits(n), rows, format!("tfim({n}, {label})")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub equal: bool,
    pub max_deviation: f64,
    pub unmatched: usize,
    pub len_a: usize,
    pub len_b: usize,
    pub tolerance: f64,
}

/// Multiset comparison after sorting.
pub fn compare_spectra(a: &Spectrum, b: &Spectrum, tol: f64) -> ComparisonReport {
    let (x, y) = (&a.eigenvalues, &b.eigenvalues);
    let mut max_dev: f64 = 0.0;
    let mut unmatched = x.len().abs_diff(y.len());
    for (u, v) in x.iter().zip(y) {
        let d = (u - v).abs();
        max_dev = max_dev.max(d);
        if d > tol {
            unmatched += 1;
        }
    }
    if x.len() != y.len() {
        max_dev = f64::INFINITY;
    }
    ComparisonReport {
        equal: unmatched == 0,
        max_deviation: max_dev,
        unmatched,
        len_a: x.len(),
        len_b: y.len(),
        tolerance: tol,
    }
}

/// Compare `a` against the multiset union of `parts`.
pub fn compare_spectra_union(a: &Spectrum, parts: &[&Spectrum], tol: f64) -> ComparisonReport {
    compare_spectra(a, &Spectrum::union(parts, SpectrumSource::default()), tol)
}

/// Ground energy of `-(1/√2)(n·1 + Σ Z_i Z_{i+1} + Σ X_i)` (open chain, one
/// identity term per qubit) from the Jordan–Wigner single-particle energies:
/// the singular values of the bidiagonal matrix with ones on the diagonal
/// and the superdiagonal.
pub fn free_fermion_energy(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(SpectraError::Invalid("n_qubits must be at least 1".into()));
    }
    let mut b = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        b[(i, i)] = 1.0;
        if i + 1 < n {
            b[(i, i + 1)] = 1.0;
        }
    }
    let modes: f64 = b.singular_values().iter().sum();
    Ok(-std::f64::consts::FRAC_1_SQRT_2 * (n as f64 + modes))
}

/// Ground energy per site in the thermodynamic limit, `-(1/√2)(1 + 4/π)`.
pub fn tfim_energy_density_limit() -> f64 {
    -std::f64::consts::FRAC_1_SQRT_2 * (1.0 + 4.0 / std::f64::consts::PI)
}

/// Extrapolate `f(h) → f(0)` from samples `(h, f(h))` by polynomial
/// (Neville) interpolation, i.e. Richardson extrapolation in `h = 1/n`.
pub fn richardson(points: &[(f64, f64)]) -> f64 {
    let hs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let mut p: Vec<f64> = points.iter().map(|p| p.1).collect();
    let m = p.len();
    for level in 1..m {
        for i in 0..m - level {
            let (hi, hj) = (hs[i], hs[i + level]);
            p[i] = (hj * p[i] - hi * p[i + 1]) / (hj - hi);
        }
    }
    p[0]
}

/// Energy per site at each n, extrapolated in 1/n.
pub fn extrapolate_energy_density(sizes: &[usize]) -> Result<(Vec<(usize, f64)>, f64)> {
    let mut per_site = Vec::new();
    for &n in sizes {
        per_site.push((n, free_fermion_energy(n)? / n as f64));
    }
    let pts: Vec<(f64, f64)> = per_site.iter().map(|&(n, e)| (1.0 / n as f64, e)).collect();
    Ok((per_site, richardson(&pts)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_qubit() {
        let h = tfim_reference(1, TfimConvention::MatchDefectChain).unwrap();
        let s = diagonalize_dense(&h, SpectrumSource::default()).unwrap();
        assert!((s.eigenvalues[0] + 2f64.sqrt()).abs() < 1e-14);
        assert!(s.eigenvalues[1].abs() < 1e-14);
        assert!((free_fermion_energy(1).unwrap() + 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn richardson_is_exact_on_polynomials() {
        let f = |h: f64| 2.0 + 3.0 * h - h * h;
        let pts: Vec<(f64, f64)> = [0.5, 0.25, 0.125].iter().map(|&h| (h, f(h))).collect();
        assert!((richardson(&pts) - 2.0).abs() < 1e-12);
    }
}
