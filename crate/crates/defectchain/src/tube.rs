//! Three-string annular category over pointed categories with trivial
//! associator.
//!
//! Strands `m ∈ M` (A-B), `n ∈ N` (B-C) and `p ∈ P` (A-C) run radially
//! through the annulus. The basis diagram `D(x,y,z)` carries an arc `x ∈ A`
//! between `p` and `m`, `y ∈ B` between `m` and `n`, and `z ∈ C` between `n`
//! and `p`, in the normal form
//!
//! ```text
//! m' = (x▷m)◁y    n' = y▷(n◁z)    p' = (x▷p)◁z
//! ```
//!
//! Composition stacks the outer diagram around the inner one and reduces
//! each strand word back to normal form with the bimodule associators.
//! Parallel arcs fuse for free because the categories have trivial F.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::bimodule::{Bimodule, BimoduleError, Letter, WordOrder};
use crate::exact;
use crate::fusion_core::{CategoryError, FusionCategory, Label};
use crate::scalar::{Scalar, ScalarError};

mod derive;
pub use derive::{derive_extended_fsymbols, four_string_covariance};

#[derive(Debug, thiserror::Error)]
pub enum TubeError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("label mismatch: {0}")]
    Mismatch(String),
    #[error("algebra is not associative")]
    NotAssociative,
    #[error("algebra has no two-sided identity")]
    NotUnital,
    #[error("idempotent decomposition failed: {0}")]
    Decomposition(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Bimodule(#[from] BimoduleError),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

type Result<T> = std::result::Result<T, TubeError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Triple {
    pub m: usize,
    pub n: usize,
    pub p: usize,
}

impl Triple {
    pub fn new(m: usize, n: usize, p: usize) -> Triple {
        Triple { m, n, p }
    }
}

/// Basis diagram `D(x,y,z)` out of the object triple `inner`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AnnularDiagram {
    pub inner: Triple,
    pub x: Label,
    pub y: Label,
    pub z: Label,
}

/// Exact linear combination of basis diagrams; zero terms are dropped.
pub type LinComb = BTreeMap<AnnularDiagram, Scalar>;

fn add_term(acc: &mut LinComb, d: AnnularDiagram, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&d) {
        Some(v) => {
            *v += &c;
            if v.is_zero() {
                acc.remove(&d);
            }
        }
        None => {
            acc.insert(d, c);
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnnularCategory {
    a: Arc<FusionCategory>,
    b: Arc<FusionCategory>,
    c: Arc<FusionCategory>,
    m: Bimodule,
    n: Bimodule,
    p: Bimodule,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObjectClass {
    pub representative: Triple,
    pub members: Vec<Triple>,
}

impl AnnularCategory {
    /// `m`: A-B, `n`: B-C, `p`: A-C.
    pub fn new(m: Bimodule, n: Bimodule, p: Bimodule) -> Result<AnnularCategory> {
        let a = m.left_cat().clone();
        let b = m.right_cat().clone();
        let c = n.right_cat().clone();
        if !n.left_cat().same_data(&b) || !p.left_cat().same_data(&a) || !p.right_cat().same_data(&c) {
            return Err(TubeError::Mismatch("bimodules are not over compatible categories".into()));
        }
        for cat in [&a, &b, &c] {
            if !cat.is_pointed() || !cat.has_trivial_fsymbols() {
                return Err(TubeError::Unsupported(format!(
                    "annular category over {} (only pointed categories with trivial associator)",
                    cat.name()
                )));
            }
            if cat.order() != a.order() {
                return Err(TubeError::Mismatch("categories use different cyclotomic fields".into()));
            }
        }
        Ok(AnnularCategory { a, b, c, m, n, p })
    }

    pub fn categories(&self) -> [&Arc<FusionCategory>; 3] {
        [&self.a, &self.b, &self.c]
    }

    pub fn bimodules(&self) -> [&Bimodule; 3] {
        [&self.m, &self.n, &self.p]
    }

    pub fn order(&self) -> u32 {
        self.a.order()
    }

    pub fn triples(&self) -> Vec<Triple> {
        let mut out = Vec::new();
        for m in 0..self.m.n_objects() {
            for n in 0..self.n.n_objects() {
                for p in 0..self.p.n_objects() {
                    out.push(Triple::new(m, n, p));
                }
            }
        }
        out
    }

    pub fn triple_name(&self, t: Triple) -> String {
        format!("({},{},{})", self.m.objects()[t.m], self.n.objects()[t.n], self.p.objects()[t.p])
    }

    pub fn outer(&self, d: &AnnularDiagram) -> Triple {
        let t = d.inner;
        Triple::new(
            self.m.act_right(self.m.act_left(d.x, t.m), d.y),
            self.n.act_left(d.y, self.n.act_right(t.n, d.z)),
            self.p.act_right(self.p.act_left(d.x, t.p), d.z),
        )
    }

    /// All basis diagrams out of `src`, lexicographic in (x, y, z).
    pub fn diagrams_from(&self, src: Triple) -> Vec<AnnularDiagram> {
        let mut out = Vec::new();
        for x in 0..self.a.n_labels() {
            for y in 0..self.b.n_labels() {
                for z in 0..self.c.n_labels() {
                    out.push(AnnularDiagram { inner: src, x, y, z });
                }
            }
        }
        out
    }

    pub fn hom_basis(&self, src: Triple, tgt: Triple) -> Vec<AnnularDiagram> {
        self.diagrams_from(src).into_iter().filter(|d| self.outer(d) == tgt).collect()
    }

    pub fn identity(&self, t: Triple) -> AnnularDiagram {
        AnnularDiagram { inner: t, x: self.a.unit(), y: self.b.unit(), z: self.c.unit() }
    }

    /// Append extra letters (outermost) to each strand of `d` and reduce.
    pub fn extend(
        &self,
        d: &AnnularDiagram,
        m_ext: &[Letter],
        n_ext: &[Letter],
        p_ext: &[Letter],
    ) -> Result<(Scalar, AnnularDiagram)> {
        let t = d.inner;
        let word = |first: [Letter; 2], ext: &[Letter]| first.iter().chain(ext).copied().collect::<Vec<_>>();
        let (cm, xm, ym) = self.m.reduce_word(t.m, &word([Letter::L(d.x), Letter::R(d.y)], m_ext), WordOrder::LeftFirst)?;
        let (cn, yn, zn) = self.n.reduce_word(t.n, &word([Letter::R(d.z), Letter::L(d.y)], n_ext), WordOrder::RightFirst)?;
        let (cp, xp, zp) = self.p.reduce_word(t.p, &word([Letter::L(d.x), Letter::R(d.z)], p_ext), WordOrder::LeftFirst)?;
        if xm != xp || ym != yn || zn != zp {
            return Err(TubeError::Mismatch("extra arcs do not close up into a basis diagram".into()));
        }
        Ok((&(&cm * &cn) * &cp, AnnularDiagram { inner: t, x: xm, y: ym, z: zn }))
    }

    /// `outer ∘ inner`: draw `outer` around `inner`.
    pub fn compose(&self, inner: &AnnularDiagram, outer: &AnnularDiagram) -> Result<(Scalar, AnnularDiagram)> {
        let mid = self.outer(inner);
        if mid != outer.inner {
            return Err(TubeError::Mismatch(format!(
                "outer object {} of the inner diagram is not the inner object {} of the outer one",
                self.triple_name(mid),
                self.triple_name(outer.inner)
            )));
        }
        self.extend(
            inner,
            &[Letter::L(outer.x), Letter::R(outer.y)],
            &[Letter::R(outer.z), Letter::L(outer.y)],
            &[Letter::L(outer.x), Letter::R(outer.z)],
        )
    }

    /// Bilinear extension of [`Self::compose`].
    pub fn compose_lin(&self, inner: &LinComb, outer: &LinComb) -> Result<LinComb> {
        let mut acc = LinComb::new();
        for (d1, c1) in inner {
            for (d2, c2) in outer {
                if self.outer(d1) != d2.inner {
                    continue;
                }
                let (c, d) = self.compose(d1, d2)?;
                add_term(&mut acc, d, &(c1 * c2) * &c);
            }
        }
        Ok(acc)
    }

    /// Reflected diagram with conjugated coefficients.
    pub fn dagger(&self, v: &LinComb) -> LinComb {
        let mut acc = LinComb::new();
        for (d, c) in v {
            let r = AnnularDiagram { inner: self.outer(d), x: self.a.dual(d.x), y: self.b.dual(d.y), z: self.c.dual(d.z) };
            add_term(&mut acc, r, c.conj());
        }
        acc
    }

    /// Isomorphism classes of object triples under the annular action.
    pub fn object_classes(&self) -> Vec<ObjectClass> {
        let all = self.triples();
        let mut seen = BTreeSet::new();
        let mut classes = Vec::new();
        for &t in &all {
            if seen.contains(&t) {
                continue;
            }
            let mut members = BTreeSet::from([t]);
            let mut stack = vec![t];
            while let Some(s) = stack.pop() {
                for d in self.diagrams_from(s) {
                    let o = self.outer(&d);
                    if members.insert(o) {
                        stack.push(o);
                    }
                }
            }
            seen.extend(members.iter().copied());
            let members: Vec<Triple> = members.into_iter().collect();
            classes.push(ObjectClass { representative: members[0], members });
        }
        classes
    }

    pub fn endomorphism_algebra(&self, rep: Triple) -> Result<TubeAlgebra> {
        let basis = self.hom_basis(rep, rep);
        let index: BTreeMap<AnnularDiagram, usize> = basis.iter().enumerate().map(|(i, d)| (*d, i)).collect();
        let order = self.order();
        let mut structure = vec![vec![vec![Scalar::zero(order); basis.len()]; basis.len()]; basis.len()];
        for (i, di) in basis.iter().enumerate() {
            for (j, dj) in basis.iter().enumerate() {
                let (c, d) = self.compose(dj, di)?;
                let k = index[&d];
                structure[i][j][k] = c;
            }
        }
        Ok(TubeAlgebra { object: rep, basis, structure, order })
    }

    /// Endomorphism algebras of every class representative, in parallel.
    pub fn all_endomorphism_algebras(&self) -> Result<Vec<TubeAlgebra>> {
        self.object_classes().par_iter().map(|c| self.endomorphism_algebra(c.representative)).collect()
    }

    /// Independent elements `D ∘ e` for `D: rep → target`, first in
    /// lexicographic order.
    pub fn vertex_basis(&self, idempotent: &LinComb, rep: Triple, target: Triple) -> Result<Vec<LinComb>> {
        let mut chosen: Vec<LinComb> = Vec::new();
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        let cols = self.hom_basis(rep, target);
        for d in &cols {
            let w = self.compose_lin(idempotent, &LinComb::from([(*d, Scalar::one(self.order()))]))?;
            if w.is_empty() {
                continue;
            }
            let row: Vec<Scalar> = cols.iter().map(|c| w.get(c).cloned().unwrap_or_else(|| Scalar::zero(self.order()))).collect();
            rows.push(row);
            if exact::rank(&rows) == rows.len() {
                chosen.push(w);
            } else {
                rows.pop();
            }
        }
        Ok(chosen)
    }
}

/// Endomorphism algebra of one object triple, with exact structure
/// constants `basis[i] ∘ basis[j] = Σ_k structure[i][j][k] basis[k]`.
#[derive(Debug, Clone)]
pub struct TubeAlgebra {
    object: Triple,
    basis: Vec<AnnularDiagram>,
    structure: Vec<Vec<Vec<Scalar>>>,
    order: u32,
}

impl TubeAlgebra {
    pub fn object(&self) -> Triple {
        self.object
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[AnnularDiagram] {
        &self.basis
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn product(&self, i: usize, j: usize) -> &[Scalar] {
        &self.structure[i][j]
    }

    pub fn zero(&self) -> Vec<Scalar> {
        vec![Scalar::zero(self.order); self.dim()]
    }

    pub fn unit_vector(&self, i: usize) -> Vec<Scalar> {
        let mut v = self.zero();
        v[i] = Scalar::one(self.order);
        v
    }

    pub fn mul(&self, u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
        let mut out = self.zero();
        for (i, ui) in u.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (j, vj) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let uv = ui * vj;
                for (k, s) in self.structure[i][j].iter().enumerate() {
                    if !s.is_zero() {
                        out[k] += &(&uv * s);
                    }
                }
            }
        }
        out
    }

    /// The two-sided identity, if the algebra has one.
    pub fn identity(&self) -> Option<Vec<Scalar>> {
        let cand = (0..self.dim()).find(|&i| (0..self.dim()).all(|j| self.structure[i][j] == self.unit_vector(j)))?;
        let e = self.unit_vector(cand);
        (0..self.dim()).all(|j| self.mul(&self.unit_vector(j), &e) == self.unit_vector(j)).then_some(e)
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim()).all(|i| (0..i).all(|j| self.structure[i][j] == self.structure[j][i]))
    }

    /// Exhaustive check on basis triples.
    pub fn is_associative(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| {
            (0..d).all(|j| {
                (0..d).all(|k| {
                    let (ei, ej, ek) = (self.unit_vector(i), self.unit_vector(j), self.unit_vector(k));
                    self.mul(&self.mul(&ei, &ej), &ek) == self.mul(&ei, &self.mul(&ej, &ek))
                })
            })
        })
    }

    pub fn to_lincomb(&self, v: &[Scalar]) -> LinComb {
        let mut acc = LinComb::new();
        for (d, c) in self.basis.iter().zip(v) {
            add_term(&mut acc, *d, c.clone());
        }
        acc
    }

    /// Matrix of left multiplication by `basis[i]`.
    fn left_matrix(&self, i: usize) -> Vec<Vec<Scalar>> {
        let d = self.dim();
        (0..d).map(|k| (0..d).map(|j| self.structure[i][j][k].clone()).collect()).collect()
    }
}

/// Complete orthogonal set of primitive idempotents of a commutative split
/// semisimple algebra, via simultaneous eigenspaces of left multiplication.
/// Eigenvalues are searched among 1, ζ, ζ², … and finally 0, so the trivial
/// character comes first.
pub fn primitive_idempotents(alg: &TubeAlgebra) -> Result<Vec<Vec<Scalar>>> {
    let order = alg.order;
    let d = alg.dim();
    let unit = alg.identity().ok_or(TubeError::NotUnital)?;
    if !alg.is_associative() {
        return Err(TubeError::NotAssociative);
    }
    if !alg.is_commutative() {
        return Err(TubeError::Unsupported("non-commutative endomorphism algebra".into()));
    }
    let mut candidates: Vec<Scalar> = (0..order as i64).map(|k| Scalar::zeta_pow(order, k)).collect();
    candidates.push(Scalar::zero(order));

    let mut spaces: Vec<Vec<Vec<Scalar>>> = vec![(0..d).map(|i| alg.unit_vector(i)).collect()];
    for i in 0..d {
        let li = alg.left_matrix(i);
        let mut next = Vec::new();
        for space in spaces {
            // L_i restricted to span(space): columns are L_i v.
            let images: Vec<Vec<Scalar>> = space.iter().map(|v| mat_vec(&li, v)).collect();
            let mut found = 0;
            for lam in &candidates {
                let rows: Vec<Vec<Scalar>> = (0..d)
                    .map(|r| (0..space.len()).map(|c| &images[c][r] - &(lam * &space[c][r])).collect())
                    .collect();
                let ns = exact::nullspace(&rows, space.len(), order);
                if ns.is_empty() {
                    continue;
                }
                found += ns.len();
                let sub: Vec<Vec<Scalar>> = ns.iter().map(|coef| lin_combo(&space, coef, d, order)).collect();
                next.push(sub);
            }
            if found != space.len() {
                return Err(TubeError::Decomposition("eigenvalues outside the cyclotomic field or non-diagonalizable".into()));
            }
        }
        spaces = next;
    }
    let mut out = Vec::new();
    for space in spaces {
        if space.len() != 1 {
            return Err(TubeError::Decomposition("common eigenspace of dimension > 1".into()));
        }
        let v = &space[0];
        let vv = alg.mul(v, v);
        let k = (0..d).find(|&k| !v[k].is_zero()).expect("nonzero eigenvector");
        let c = vv[k].try_div(&v[k])?;
        if c.is_zero() {
            return Err(TubeError::Decomposition("nilpotent element: algebra is not semisimple".into()));
        }
        let inv = c.try_inv()?;
        out.push(v.iter().map(|x| x * &inv).collect::<Vec<_>>());
    }
    let mut total = alg.zero();
    for e in &out {
        for (t, x) in total.iter_mut().zip(e) {
            *t += x;
        }
    }
    if total != unit {
        return Err(TubeError::Decomposition("idempotents do not sum to the identity".into()));
    }
    Ok(out)
}

fn mat_vec(m: &[Vec<Scalar>], v: &[Scalar]) -> Vec<Scalar> {
    m.iter()
        .map(|row| {
            let mut acc = Scalar::zero(v[0].order());
            for (a, b) in row.iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    acc += &(a * b);
                }
            }
            acc
        })
        .collect()
}

fn lin_combo(vs: &[Vec<Scalar>], coef: &[Scalar], d: usize, order: u32) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(order); d];
    for (v, c) in vs.iter().zip(coef) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o += &(x * c);
        }
    }
    out
}

/// `u = λ v` with a single exact λ, if any.
pub fn proportionality(u: &LinComb, v: &LinComb) -> Option<Scalar> {
    let (d0, v0) = v.iter().next()?;
    let lam = u.get(d0)?.try_div(v0).ok()?;
    let keys: BTreeSet<&AnnularDiagram> = u.keys().chain(v.keys()).collect();
    keys.into_iter()
        .all(|k| match (u.get(k), v.get(k)) {
            (Some(a), Some(b)) => *a == &lam * b,
            _ => false,
        })
        .then_some(lam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::{vec_zp_bimodule_over, CatalogName};
    use crate::fusion_core::vec_zp;

    fn f1_setup() -> AnnularCategory {
        let cat = Arc::new(vec_zp(2).unwrap());
        let f1 = vec_zp_bimodule_over(cat.clone(), CatalogName::F(1)).unwrap();
        let reg = vec_zp_bimodule_over(cat, CatalogName::X(1)).unwrap();
        AnnularCategory::new(f1.clone(), f1, reg).unwrap()
    }

    #[test]
    fn one_class_for_f1() {
        let ac = f1_setup();
        let classes = ac.object_classes();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].representative, Triple::new(0, 0, 0));
    }

    #[test]
    fn group_algebra() {
        let ac = f1_setup();
        let alg = ac.endomorphism_algebra(Triple::new(0, 0, 0)).unwrap();
        assert_eq!(alg.dim(), 4);
        assert!(alg.is_commutative() && alg.is_associative());
        let ps = primitive_idempotents(&alg).unwrap();
        assert_eq!(ps.len(), 4);
        let quarter = Scalar::from_ratio(1, 4, 8);
        assert!(ps[0].iter().all(|c| *c == quarter));
    }
}
