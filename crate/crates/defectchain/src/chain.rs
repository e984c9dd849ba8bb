//! Anyonic chains in the edge basis.
//!
//! A state labels the horizontal edges `e_0 … e_{n-1}`; between consecutive
//! edges a vertical strand `X` fuses in, so `e_{i+1} ∈ e_i ⊗ X`. The local
//! term `h_i` acts on `e_i` with its two neighbours held fixed.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fusion_core::{self, CategoryError, FusionCategory, Label, ISING_STAR};
use crate::scalar::{Scalar, ScalarError};

#[derive(Debug, thiserror::Error)]
pub enum ChainError {
    #[error("chain needs at least 2 edges, got {0}")]
    TooShort(usize),
    #[error("invalid boundary: {0}")]
    Boundary(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

type Result<T> = std::result::Result<T, ChainError>;

/// Which alternation pattern a free chain starts with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    /// `e_0` is the strand label itself (`*` for the defect chain).
    Star,
    /// `e_0` is any other label.
    Category,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Fixed(Label, Label),
    Free,
    Sector(Sector),
    /// `e_n ≡ e_0`; golden chain only.
    Periodic,
    /// Plain qubit chains (reference models), no fusion constraint.
    Open,
}

impl Boundary {
    /// Parse `"l,r"`, `free`, `free:star`, `free:category` or `periodic`.
    pub fn parse(s: &str, cat: &FusionCategory) -> Result<Boundary> {
        match s.trim() {
            "free" => Ok(Boundary::Free),
            "free:star" => Ok(Boundary::Sector(Sector::Star)),
            "free:category" => Ok(Boundary::Sector(Sector::Category)),
            "periodic" => Ok(Boundary::Periodic),
            other => {
                let (l, r) = other
                    .split_once(',')
                    .ok_or_else(|| ChainError::Boundary(format!("cannot parse boundary {other:?}")))?;
                Ok(Boundary::Fixed(cat.label(l.trim())?, cat.label(r.trim())?))
            }
        }
    }

    pub fn describe(&self, cat: &FusionCategory) -> String {
        match self {
            Boundary::Fixed(l, r) => format!("{},{}", cat.label_name(*l), cat.label_name(*r)),
            Boundary::Free => "free".into(),
            Boundary::Sector(Sector::Star) => "free:star".into(),
            Boundary::Sector(Sector::Category) => "free:category".into(),
            Boundary::Periodic => "periodic".into(),
            Boundary::Open => "open".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChainBasis {
    n_edges: usize,
    boundary: Boundary,
    strand: Label,
    labels: Vec<String>,
    states: Vec<Vec<Label>>,
    index: HashMap<Vec<Label>, usize>,
    note: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisJson {
    pub n_edges: usize,
    pub boundary: String,
    pub strand: String,
    pub note: Option<String>,
    pub states: Vec<Vec<String>>,
}

impl ChainBasis {
    /// Lexicographic enumeration of admissible edge labelings.
    pub fn enumerate(cat: &FusionCategory, strand: Label, n_edges: usize, boundary: Boundary) -> Result<ChainBasis> {
        if n_edges < 2 {
            return Err(ChainError::TooShort(n_edges));
        }
        let n = cat.n_labels();
        if strand >= n {
            return Err(ChainError::Boundary("strand label out of range".into()));
        }
        let starts: Vec<Label> = match boundary {
            Boundary::Fixed(l, r) => {
                if l >= n || r >= n {
                    return Err(ChainError::Boundary("boundary label out of range".into()));
                }
                vec![l]
            }
            Boundary::Sector(Sector::Star) => vec![strand],
            Boundary::Sector(Sector::Category) => (0..n).filter(|&a| a != strand).collect(),
            Boundary::Free | Boundary::Periodic => (0..n).collect(),
            Boundary::Open => return Err(ChainError::Boundary("open boundary is for qubit reference chains".into())),
        };
        let mut states = Vec::new();
        let mut cur = Vec::with_capacity(n_edges);
        for s in starts {
            cur.clear();
            cur.push(s);
            Self::extend(cat, strand, n_edges, &boundary, &mut cur, &mut states);
        }
        let note = states.is_empty().then(|| match boundary {
            Boundary::Fixed(l, r) => format!(
                "no admissible labeling of {n_edges} edges between {} and {} (alternation parity)",
                cat.label_name(l),
                cat.label_name(r)
            ),
            _ => format!("no admissible labeling of {n_edges} edges"),
        });
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(ChainBasis {
            n_edges,
            boundary,
            strand,
            labels: cat.labels().to_vec(),
            states,
            index,
            note,
        })
    }

    fn extend(cat: &FusionCategory, x: Label, n_edges: usize, b: &Boundary, cur: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
        let last = *cur.last().unwrap();
        if cur.len() == n_edges {
            let ok = match b {
                Boundary::Fixed(_, r) => last == *r,
                Boundary::Periodic => cat.admits(last, x, cur[0]),
                _ => true,
            };
            if ok {
                out.push(cur.clone());
            }
            return;
        }
        for &next in cat.fuse(last, x) {
            cur.push(next);
            Self::extend(cat, x, n_edges, b, cur, out);
            cur.pop();
        }
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn strand(&self) -> Label {
        self.strand
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<Label>] {
        &self.states
    }

    pub fn index_of(&self, s: &[Label]) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Set when the basis is empty.
    pub fn note(&self) -> Option<&str> {
        self.note.as_deref()
    }

    /// Edges carrying a local term.
    pub fn active_edges(&self) -> Vec<usize> {
        match self.boundary {
            Boundary::Periodic => (0..self.n_edges).collect(),
            _ => (1..self.n_edges - 1).collect(),
        }
    }

    fn neighbours(&self, i: usize) -> (usize, usize) {
        let n = self.n_edges;
        ((i + n - 1) % n, (i + 1) % n)
    }

    pub fn state_name(&self, s: &[Label]) -> Vec<String> {
        s.iter().map(|&l| self.labels[l].clone()).collect()
    }

    pub fn to_json(&self) -> BasisJson {
        let boundary = match self.boundary {
            Boundary::Fixed(l, r) => format!("{},{}", self.labels[l], self.labels[r]),
            Boundary::Free => "free".into(),
            Boundary::Sector(Sector::Star) => "free:star".into(),
            Boundary::Sector(Sector::Category) => "free:category".into(),
            Boundary::Periodic => "periodic".into(),
            Boundary::Open => "open".into(),
        };
        BasisJson {
            n_edges: self.n_edges,
            boundary,
            strand: self.labels[self.strand].clone(),
            note: self.note.clone(),
            states: self.states.iter().map(|s| self.state_name(s)).collect(),
        }
    }
}

/// Every state alternates between `*` and category labels.
pub fn is_alternating(state: &[Label]) -> bool {
    state.windows(2).all(|w| (w[0] == ISING_STAR) != (w[1] == ISING_STAR))
}

/// Defect-chain basis over the labels {0, 1, *}.
pub fn enumerate_states(n_edges: usize, boundary: Boundary) -> Result<ChainBasis> {
    if boundary == Boundary::Periodic {
        return Err(ChainError::Unsupported("periodic boundary is only available for the golden chain".into()));
    }
    ChainBasis::enumerate(&fusion_core::ising(1)?, ISING_STAR, n_edges, boundary)
}

#[derive(Debug, Clone, Serialize)]
pub struct TermInfo {
    pub edge: usize,
    /// Label of the middle edge class: "star" or "category" for the defect chain.
    pub kind: String,
    pub nnz: usize,
}

/// Sparse Hermitian operator in CSR form on a chain basis.
#[derive(Debug, Clone)]
pub struct ChainOperator {
    basis: ChainBasis,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    terms: Vec<TermInfo>,
    model: String,
}

/// `stencil[(left, old, new, right)] = ⟨new|h|old⟩` for the middle edge.
type Stencil = BTreeMap<(Label, Label, Label, Label), Scalar>;

impl ChainOperator {
    fn assemble(basis: ChainBasis, stencil: &Stencil, model: String, only_edge: Option<usize>) -> ChainOperator {
        let edges: Vec<usize> = match only_edge {
            Some(e) => vec![e],
            None => basis.active_edges(),
        };
        let rows: Vec<Vec<(usize, Complex64)>> = (0..basis.dim())
            .into_par_iter()
            .map(|r| {
                // row r collects ⟨r|h_i|c⟩ = stencil(old = c_i, new = r_i)
                let s = &basis.states[r];
                let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                let mut other = s.clone();
                for &i in &edges {
                    let (l, rgt) = basis.neighbours(i);
                    for old in 0..basis.labels.len() {
                        let Some(v) = stencil.get(&(s[l], old, s[i], s[rgt])) else { continue };
                        other[i] = old;
                        if let Some(c) = basis.index_of(&other) {
                            match acc.get_mut(&c) {
                                Some(x) => *x += v,
                                None => {
                                    acc.insert(c, v.clone());
                                }
                            }
                        }
                    }
                    other[i] = s[i];
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c, v.to_float())).collect()
            })
            .collect();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        let mut terms = Vec::new();
        for &i in &edges {
            let nnz = (0..basis.dim())
                .map(|c| {
                    let s = &basis.states[c];
                    let (l, r) = basis.neighbours(i);
                    (0..basis.labels.len()).filter(|&new| stencil.contains_key(&(s[l], s[i], new, s[r]))).count()
                })
                .sum();
            let mid = basis.states.first().map(|s| s[i]);
            let kind = match mid {
                Some(m) if m == basis.strand => "star",
                Some(_) => "category",
                None => "empty",
            };
            terms.push(TermInfo { edge: i, kind: kind.into(), nnz });
        }
        ChainOperator { basis, row_ptr, cols, vals, terms, model }
    }

    /// From sorted real rows (reference models).
    pub fn from_rows(basis: ChainBasis, rows: Vec<Vec<(usize, f64)>>, model: String) -> ChainOperator {
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for row in rows {
            for (c, v) in row {
                if v != 0.0 {
                    cols.push(c);
                    vals.push(Complex64::new(v, 0.0));
                }
            }
            row_ptr.push(cols.len());
        }
        ChainOperator { basis, row_ptr, cols, vals, terms: Vec::new(), model }
    }

    pub fn basis(&self) -> &ChainBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn terms(&self) -> &[TermInfo] {
        &self.terms
    }

    /// `(row, col, value)` triplets in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim()).flat_map(move |r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k])))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        (self.row_ptr[r]..self.row_ptr[r + 1])
            .find(|&k| self.cols[k] == c)
            .map_or(Complex64::new(0.0, 0.0), |k| self.vals[k])
    }

    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.triplets().map(|(r, c, v)| (v - self.get(c, r).conj()).norm()).fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim())
            .into_par_iter()
            .map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|k| self.vals[k] * x[self.cols[k]]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn to_dense_real(&self) -> Option<DMatrix<f64>> {
        self.is_real().then(|| {
            let mut m = DMatrix::zeros(self.dim(), self.dim());
            for (r, c, v) in self.triplets() {
                m[(r, c)] = v.re;
            }
            m
        })
    }

    /// Largest entrywise difference; `None` if the bases differ.
    pub fn max_difference(&self, other: &ChainOperator) -> Option<f64> {
        if self.basis.states != other.basis.states {
            return None;
        }
        let mut d: f64 = 0.0;
        for (r, c, v) in self.triplets() {
            d = d.max((v - other.get(r, c)).norm());
        }
        for (r, c, v) in other.triplets() {
            d = d.max((v - self.get(r, c)).norm());
        }
        Some(d)
    }

    pub fn scaled(&self, f: f64) -> ChainOperator {
        let mut out = self.clone();
        for v in out.vals.iter_mut() {
            *v *= f;
        }
        out
    }

    /// Matrix Market coordinate format; `real symmetric` (lower triangle)
    /// when possible, otherwise `complex hermitian`.
    pub fn write_matrix_market<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        let real = self.is_real();
        let lower: Vec<(usize, usize, Complex64)> = self.triplets().filter(|(r, c, _)| r >= c).collect();
        let field = if real { "real symmetric" } else { "complex hermitian" };
        writeln!(w, "%%MatrixMarket matrix coordinate {field}")?;
        writeln!(w, "% model: {}", self.model)?;
        writeln!(w, "{} {} {}", self.dim(), self.dim(), lower.len())?;
        for (r, c, v) in lower {
            if real {
                writeln!(w, "{} {} {:.17e}", r + 1, c + 1, v.re)?;
            } else {
                writeln!(w, "{} {} {:.17e} {:.17e}", r + 1, c + 1, v.re, v.im)?;
            }
        }
        Ok(())
    }
}

impl ChainOperator {
    /// Inverse of [`ChainOperator::write_matrix_market`]; also accepts
    /// `general` storage.
    pub fn read_matrix_market<R: std::io::BufRead>(r: R) -> Result<ChainOperator> {
        let bad = |m: String| ChainError::Unsupported(format!("matrix market: {m}"));
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad("empty file".into()))??;
        let h: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
        if h.len() != 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" || h[2] != "coordinate" {
            return Err(bad(format!("unsupported header {header:?}")));
        }
        let complex = match h[3].as_str() {
            "real" => false,
            "complex" => true,
            other => return Err(bad(format!("unsupported field {other}"))),
        };
        let mirror = match h[4].as_str() {
            "general" => None,
            "symmetric" => Some(false),
            "hermitian" => Some(true),
            other => return Err(bad(format!("unsupported symmetry {other}"))),
        };
        let mut model = String::from("matrix market");
        let mut size: Option<(usize, usize, usize)> = None;
        let mut entries: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for line in lines {
            let line = line?;
            let t = line.trim();
            if let Some(rest) = t.strip_prefix('%') {
                if let Some(m) = rest.trim().strip_prefix("model:") {
                    model = m.trim().to_string();
                }
                continue;
            }
            if t.is_empty() {
                continue;
            }
            let f: Vec<&str> = t.split_whitespace().collect();
            let Some((rows, cols, _)) = size else {
                let p = |x: &str| x.parse::<usize>().map_err(|_| bad(format!("bad size line {t:?}")));
                if f.len() != 3 {
                    return Err(bad(format!("bad size line {t:?}")));
                }
                size = Some((p(f[0])?, p(f[1])?, p(f[2])?));
                if size.unwrap().0 != size.unwrap().1 {
                    return Err(bad("matrix is not square".into()));
                }
                continue;
            };
            let want = if complex { 4 } else { 3 };
            if f.len() != want {
                return Err(bad(format!("bad entry {t:?}")));
            }
            let i = f[0].parse::<usize>().map_err(|_| bad(format!("bad entry {t:?}")))?;
            let j = f[1].parse::<usize>().map_err(|_| bad(format!("bad entry {t:?}")))?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(bad(format!("index out of range in {t:?}")));
            }
            let num = |x: &str| x.parse::<f64>().map_err(|_| bad(format!("bad value in {t:?}")));
            let v = Complex64::new(num(f[2])?, if complex { num(f[3])? } else { 0.0 });
            *entries.entry((i - 1, j - 1)).or_default() += v;
            if let Some(conj) = mirror {
                if i != j {
                    *entries.entry((j - 1, i - 1)).or_default() += if conj { v.conj() } else { v };
                }
            }
        }
        let (dim, _, _) = size.ok_or_else(|| bad("missing size line".into()))?;
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut it = entries.into_iter().peekable();
        for r in 0..dim {
            while let Some(&((i, j), v)) = it.peek() {
                if i != r {
                    break;
                }
                cols.push(j);
                vals.push(v);
                it.next();
            }
            row_ptr.push(cols.len());
        }
        Ok(ChainOperator { basis: ChainBasis::unlabeled(dim), row_ptr, cols, vals, terms: Vec::new(), model })
    }
}

fn golden_stencil(cat: &FusionCategory, x: Label) -> Result<Stencil> {
    let n = cat.n_labels();
    let unit = cat.unit();
    let inv_d = cat.qdim(x).try_inv()?;
    let mut st = Stencil::new();
    for l in 0..n {
        for r in 0..n {
            for old in 0..n {
                let f_old = cat.f(l, x, x, r, old, unit);
                if f_old.is_zero() {
                    continue;
                }
                for new in 0..n {
                    let f_new = cat.f(l, x, x, r, new, unit);
                    if f_new.is_zero() {
                        continue;
                    }
                    let v = -&(&(&inv_d * &f_new) * &f_old.conj());
                    st.insert((l, old, new, r), v);
                }
            }
        }
    }
    Ok(st)
}

/// `h_i = -(1/d_X) |0-channel⟩⟨0-channel|` written through the F-move
/// `(F^{r}_{l X X})_{e, 0}` with `l, r` the neighbouring edges.
pub fn golden_chain_hamiltonian(cat: &FusionCategory, x: Label, n_edges: usize, boundary: Boundary) -> Result<ChainOperator> {
    let basis = ChainBasis::enumerate(cat, x, n_edges, boundary)?;
    let st = golden_stencil(cat, x)?;
    let model = format!("golden({}, {})", cat.name(), cat.label_name(x));
    Ok(ChainOperator::assemble(basis, &st, model, None))
}

/// Read the Pauli data of the defect chain off an Ising-type table:
/// `Z_a = (F^*_{a*1})_{*,*}` on a category edge next to a `*`, and the
/// transverse flip `a → a+1` from moving the 1-line through the two
/// neighbouring `*` vertices.
fn defect_paulis(ext: &FusionCategory) -> Result<([Scalar; 2], Scalar)> {
    let s = ext.n_labels() - 1;
    let ok = ext.n_labels() == 3 && ext.label_name(s) == "*" && ext.fuse(s, s) == [0, 1];
    if !ok {
        return Err(ChainError::Unsupported(format!("{} is not an extension of Vec(Z/2Z) by a defect *", ext.name())));
    }
    let z = [ext.f(0, s, 1, s, s, s), ext.f(1, s, 1, s, s, s)];
    let flip = |a: Label| &ext.f(s, s, 1, 1 - a, a, s).conj() * &ext.f(1, s, s, 1 - a, s, a);
    let x01 = flip(0);
    if x01 != flip(1).conj() {
        return Err(ChainError::Unsupported("transverse term is not Hermitian".into()));
    }
    Ok((z, x01))
}

fn defect_stencil(ext: &FusionCategory, o_hat: Option<&Scalar>) -> Result<Stencil> {
    let order = ext.order();
    let s = ISING_STAR;
    let (z, x01) = defect_paulis(ext)?;
    let pref = -&Scalar::sqrt2(order)?.try_inv()?;
    let one = Scalar::one(order);
    let zero = Scalar::zero(order);
    let o = o_hat.cloned().unwrap_or_else(|| zero.clone());
    // Z ⊕ Ô and X ⊕ Ô on a single three-level edge
    let zo = |a: Label| if a == s { o.clone() } else { z[a].clone() };
    let xo = |old: Label, new: Label| match (old, new) {
        (a, b) if a == s && b == s => o.clone(),
        (a, b) if a == s || b == s => zero.clone(),
        (0, 1) => x01.clone(),
        (1, 0) => x01.conj(),
        _ => zero.clone(),
    };
    let proj = |a: Label| if a == s { one.clone() } else { zero.clone() };
    let mut st = Stencil::new();
    for l in 0..3 {
        for r in 0..3 {
            for old in 0..3 {
                for new in 0..3 {
                    let mut v = if old == new { one.clone() } else { zero.clone() };
                    if old == new {
                        v += &(&(&zo(l) * &proj(old)) * &zo(r));
                    }
                    v += &(&(&proj(l) * &xo(old, new)) * &proj(r));
                    if !v.is_zero() {
                        st.insert((l, old, new, r), &pref * &v);
                    }
                }
            }
        }
    }
    Ok(st)
}

/// `h_i = -(1/√2)(1 + (Z⊕Ô)|*⟩⟨*|(Z⊕Ô) + |*⟩⟨*|(X⊕Ô)|*⟩⟨*|)` with Ô = 0,
/// Pauli data taken from `ext` (ising(κ) or the derived table).
pub fn defect_chain_hamiltonian(ext: &FusionCategory, n_edges: usize, boundary: Boundary) -> Result<ChainOperator> {
    let basis = enumerate_states(n_edges, boundary)?;
    let st = defect_stencil(ext, None)?;
    Ok(ChainOperator::assemble(basis, &st, format!("defect({})", ext.name()), None))
}

/// A single local term `h_i` of the defect chain on the given basis.
pub fn defect_chain_term(ext: &FusionCategory, n_edges: usize, boundary: Boundary, edge: usize) -> Result<ChainOperator> {
    let basis = enumerate_states(n_edges, boundary)?;
    if !basis.active_edges().contains(&edge) {
        return Err(ChainError::Boundary(format!("edge {edge} carries no local term")));
    }
    let st = defect_stencil(ext, None)?;
    Ok(ChainOperator::assemble(basis, &st, format!("defect({}) h_{edge}", ext.name()), Some(edge)))
}

/// The defect chain on the full `3^n` edge space with a chosen Ô on the
/// forbidden sector, restricted back to the admissible basis.
pub fn defect_chain_via_full_space(ext: &FusionCategory, n_edges: usize, boundary: Boundary, o_hat: &Scalar) -> Result<ChainOperator> {
    let full = ChainBasis::full_space(ext, n_edges, boundary)?;
    let st = defect_stencil(ext, Some(o_hat))?;
    let big = ChainOperator::assemble(full, &st, "full".into(), None);
    let basis = enumerate_states(n_edges, boundary)?;
    let map: Vec<usize> = basis.states.iter().map(|s| big.basis.index_of(s).expect("admissible state in full space")).collect();
    let mut row_ptr = vec![0];
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let back: HashMap<usize, usize> = map.iter().enumerate().map(|(i, &j)| (j, i)).collect();
    for &r in &map {
        for k in big.row_ptr[r]..big.row_ptr[r + 1] {
            if let Some(&c) = back.get(&big.cols[k]) {
                cols.push(c);
                vals.push(big.vals[k]);
            }
        }
        row_ptr.push(cols.len());
    }
    let terms = big.terms.clone();
    Ok(ChainOperator { basis, row_ptr, cols, vals, terms, model: format!("defect({}) via full space", ext.name()) })
}

impl ChainBasis {
    /// Computational basis of n qubits; bit i of the index is qubit i.
    pub fn qubits(n: usize) -> ChainBasis {
        let states: Vec<Vec<Label>> = (0..1usize << n).map(|s| (0..n).map(|i| s >> i & 1).collect()).collect();
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        ChainBasis {
            n_edges: n,
            boundary: Boundary::Open,
            strand: usize::MAX,
            labels: vec!["0".into(), "1".into()],
            states,
            index,
            note: None,
        }
    }

    /// Basis of a matrix read from disk; states are just indices.
    pub fn unlabeled(dim: usize) -> ChainBasis {
        let states: Vec<Vec<Label>> = (0..dim).map(|i| vec![i]).collect();
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        ChainBasis {
            n_edges: 1,
            boundary: Boundary::Open,
            strand: usize::MAX,
            labels: (0..dim).map(|i| i.to_string()).collect(),
            states,
            index,
            note: Some("read from file".into()),
        }
    }

    /// All `3^n` labelings (no fusion constraint), boundary edges pinned.
    fn full_space(cat: &FusionCategory, n_edges: usize, boundary: Boundary) -> Result<ChainBasis> {
        if n_edges < 2 {
            return Err(ChainError::TooShort(n_edges));
        }
        let n = cat.n_labels();
        let allowed = |i: usize, a: Label| match boundary {
            Boundary::Fixed(l, _) if i == 0 => a == l,
            Boundary::Fixed(_, r) if i == n_edges - 1 => a == r,
            Boundary::Sector(Sector::Star) if i == 0 => a == ISING_STAR,
            Boundary::Sector(Sector::Category) if i == 0 => a != ISING_STAR,
            _ => true,
        };
        let mut states = vec![Vec::new()];
        for i in 0..n_edges {
            states = states
                .into_iter()
                .flat_map(|s: Vec<Label>| {
                    (0..n).filter(move |&a| allowed(i, a)).map(move |a| {
                        let mut t = s.clone();
                        t.push(a);
                        t
                    })
                })
                .collect();
        }
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(ChainBasis { n_edges, boundary, strand: ISING_STAR, labels: cat.labels().to_vec(), states, index, note: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let s = ISING_STAR;
        assert_eq!(enumerate_states(5, Boundary::Fixed(s, s)).unwrap().dim(), 4);
        assert_eq!(enumerate_states(3, Boundary::Fixed(s, s)).unwrap().dim(), 2);
        assert_eq!(enumerate_states(4, Boundary::Free).unwrap().dim(), 8);
        let empty = enumerate_states(4, Boundary::Fixed(s, s)).unwrap();
        assert_eq!(empty.dim(), 0);
        assert!(empty.note().is_some());
    }

    #[test]
    fn single_qubit() {
        let ising = fusion_core::ising(1).unwrap();
        let h = defect_chain_hamiltonian(&ising, 3, Boundary::Fixed(ISING_STAR, ISING_STAR)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((h.get(0, 0).re + r).abs() < 1e-15);
        assert!((h.get(0, 1).re + r).abs() < 1e-15);
    }
}
