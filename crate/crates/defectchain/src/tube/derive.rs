//! Extended fusion data for a chain with an invertible defect.
//!
//! The defect object `*` gets trivalent vertices from the idempotent of the
//! trivial character of End(*,*,0). Moving a category leg from one strand
//! to another inserts an arc into the annulus; reducing that arc gives the
//! F-symbols with two `*`. The all-`*` symbol is fixed up to scale by
//! covariance under the four-string annulus and then normalized.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{add_term, proportionality, AnnularCategory, LinComb, Result, Triple, TubeError};
use crate::bimodule::{self, vec_zp_bimodule, Bimodule, CatalogName, Letter, WordOrder};
use crate::fusion_core::{self, check_pentagon, FKey, FusionCategory, Label};
use crate::scalar::Scalar;

struct Setup {
    ac: AnnularCategory,
    cat: Arc<FusionCategory>,
    defect: Bimodule,
    rep: Triple,
    /// `vertices[b]` spans Hom((*,*,0) → (*,*,b)) ∘ P_{0,0}.
    vertices: Vec<LinComb>,
}

impl Setup {
    fn new(cat: &FusionCategory, defect: &Bimodule) -> Result<Setup> {
        let supported = cat.same_data(&fusion_core::vec_zp(2)?)
            && defect.same_data(&vec_zp_bimodule(2, CatalogName::F(1))?);
        if !supported {
            return Err(TubeError::Unsupported(format!(
                "derivation is implemented for Vec(Z/2Z) with the F1 bimodule only, got {} with {}",
                cat.name(),
                defect.name()
            )));
        }
        let cat = defect.left_cat().clone();
        let reg = bimodule::regular(cat.clone())?;
        let ac = AnnularCategory::new(defect.clone(), defect.clone(), reg)?;
        let rep = ac.object_classes()[0].representative;
        let alg = ac.endomorphism_algebra(rep)?;
        let idempotents = super::primitive_idempotents(&alg)?;
        let trivial = idempotents
            .iter()
            .find(|e| (0..alg.dim()).all(|i| alg.mul(&alg.unit_vector(i), e) == **e))
            .ok_or_else(|| TubeError::Inconsistent("no idempotent for the trivial character".into()))?;
        let p00 = alg.to_lincomb(trivial);
        let mut vertices = Vec::new();
        for b in 0..cat.n_labels() {
            let mut vb = ac.vertex_basis(&p00, rep, Triple::new(rep.m, rep.n, b))?;
            if vb.len() != 1 {
                return Err(TubeError::Inconsistent(format!("vertex space for label {b} has dimension {}", vb.len())));
            }
            vertices.push(vb.remove(0));
        }
        Ok(Setup { ac, cat, defect: defect.clone(), rep, vertices })
    }

    fn star(&self) -> usize {
        self.rep.m
    }

    fn extend_all(&self, v: &LinComb, m_ext: &[Letter], n_ext: &[Letter], p_ext: &[Letter]) -> Result<LinComb> {
        let mut acc = LinComb::new();
        for (d, c) in v {
            let (k, e) = self.ac.extend(d, m_ext, n_ext, p_ext)?;
            add_term(&mut acc, e, c * &k);
        }
        Ok(acc)
    }

    fn ratio(&self, u: &LinComb, b: Label) -> Result<Scalar> {
        proportionality(u, &self.vertices[b])
            .ok_or_else(|| TubeError::Inconsistent(format!("slid vertex is not a multiple of the vertex for {b}")))
    }

    /// Leg `a` moved between the strands bounding region 0 (p|m), 1 (m|n)
    /// or 2 (n|p) of the vertex for `b`.
    fn slide(&self, region: usize, a: Label, b: Label) -> Result<Scalar> {
        let v = &self.vertices[b];
        let (u, target) = match region {
            0 => (self.extend_all(v, &[Letter::L(a)], &[], &[Letter::L(a)])?, self.cat.mul(a, b)),
            1 => (self.extend_all(v, &[Letter::R(a)], &[Letter::L(a)], &[])?, b),
            _ => (self.extend_all(v, &[], &[Letter::R(a)], &[Letter::R(a)])?, self.cat.mul(a, b)),
        };
        self.ratio(&u, target)
    }

    /// Factor and new internal label when the four-string annulus with arcs
    /// `r` acts on ((s1 s2)_a s3).
    fn act_left_tree(&self, a: Label, r: [Label; 4]) -> Result<(Scalar, Label)> {
        let [r0, r1, r2, r3] = r;
        let c = &self.cat;
        let a2 = c.mul(r0, c.mul(a, r2));
        let v = self.extend_all(
            &self.vertices[a],
            &[Letter::L(r0), Letter::R(r1)],
            &[Letter::L(r1), Letter::R(r2)],
            &[Letter::L(r0), Letter::R(r2)],
        )?;
        let inner = self.ratio(&v, a2)?;
        let word = [Letter::L(r2), Letter::R(r3), Letter::L(a), Letter::L(r0), Letter::R(r3)];
        let (strand, la, lb) = self.defect.reduce_word(self.star(), &word, WordOrder::LeftFirst)?;
        if la != a2 || lb != c.unit() {
            return Err(TubeError::Inconsistent("outer strand did not reduce to a single leg".into()));
        }
        Ok((&inner * &strand, a2))
    }

    /// Same for (s1 (s2 s3)_b).
    fn act_right_tree(&self, b: Label, r: [Label; 4]) -> Result<(Scalar, Label)> {
        let [r0, r1, r2, r3] = r;
        let c = &self.cat;
        let b2 = c.mul(r1, c.mul(b, r3));
        let v = self.extend_all(
            &self.vertices[b],
            &[Letter::L(r1), Letter::R(r2)],
            &[Letter::R(r3), Letter::L(r2)],
            &[Letter::L(r1), Letter::R(r3)],
        )?;
        let inner = self.ratio(&v, b2)?;
        let word = [Letter::R(r1), Letter::L(r0), Letter::R(b), Letter::L(r0), Letter::R(r3)];
        let (strand, la, lb) = self.defect.reduce_word(self.star(), &word, WordOrder::RightFirst)?;
        if la != c.unit() || lb != b2 {
            return Err(TubeError::Inconsistent("outer strand did not reduce to a single leg".into()));
        }
        Ok((&inner * &strand, b2))
    }

    /// Solve λ_L(a) F_{a',b'} = F_{a,b} λ_R(b) over all annuli; returns
    /// F_{a,b} / F_{0,0}.
    fn covariance(&self) -> Result<Vec<Vec<Scalar>>> {
        let n = self.cat.n_labels();
        let order = self.cat.order();
        let idx = |a: Label, b: Label| a * n + b;
        let mut rows = Vec::new();
        for code in 0..n.pow(4) {
            let r = [code % n, (code / n) % n, (code / n / n) % n, code / n / n / n];
            for a in 0..n {
                let (la, a2) = self.act_left_tree(a, r)?;
                for b in 0..n {
                    let (lb, b2) = self.act_right_tree(b, r)?;
                    let mut row = vec![Scalar::zero(order); n * n];
                    row[idx(a2, b2)] += &la;
                    row[idx(a, b)] -= &lb;
                    rows.push(row);
                }
            }
        }
        let ns = crate::exact::nullspace(&rows, n * n, order);
        if ns.len() != 1 {
            return Err(TubeError::Inconsistent(format!("covariance leaves {} free parameters", ns.len())));
        }
        let v = &ns[0];
        let v00 = v[idx(0, 0)].clone();
        if v00.is_zero() {
            return Err(TubeError::Inconsistent("covariant solution vanishes at (0,0)".into()));
        }
        Ok((0..n).map(|a| (0..n).map(|b| v[idx(a, b)].try_div(&v00)).collect::<std::result::Result<_, _>>()).collect::<std::result::Result<_, _>>()?)
    }
}

/// F_{a,b} / F_{0,0} for the all-defect symbol, as forced by the
/// four-string annulus before any normalization.
pub fn four_string_covariance(cat: &FusionCategory, defect: &Bimodule) -> Result<Vec<Vec<Scalar>>> {
    Setup::new(cat, defect)?.covariance()
}

/// Fusion category on the labels of `cat` plus `*`, with F-symbols computed
/// from the annular category. `kappa` is the Frobenius–Schur sign of `*`.
pub fn derive_extended_fsymbols(cat: &FusionCategory, defect: &Bimodule, kappa: i32) -> Result<FusionCategory> {
    if kappa != 1 && kappa != -1 {
        return Err(TubeError::Unsupported(format!("kappa must be +1 or -1, got {kappa}")));
    }
    let setup = Setup::new(cat, defect)?;
    let c = setup.cat.clone();
    let bm = &setup.defect;
    let order = c.order();
    let n = c.n_labels();
    let s = n;
    let x = setup.star();

    let mut labels: Vec<String> = c.labels().to_vec();
    labels.push("*".into());
    let mut fusion = vec![vec![Vec::new(); n + 1]; n + 1];
    for a in 0..n {
        for b in 0..n {
            fusion[a][b] = vec![c.mul(a, b)];
        }
        fusion[a][s] = vec![s];
        fusion[s][a] = vec![s];
    }
    fusion[s][s] = (0..n).collect();

    let mut dsq = Scalar::zero(order);
    for a in 0..n {
        dsq += c.qdim(a);
    }
    let dsq = dsq.as_rational().ok_or_else(|| TubeError::Inconsistent("irrational dimension".into()))?;
    let dstar = Scalar::sqrt_rational(&dsq, order)?;
    let mut qdim: Vec<Scalar> = (0..n).map(|a| c.qdim(a).clone()).collect();
    qdim.push(dstar.clone());

    let mut fs: BTreeMap<FKey, Scalar> = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            let ab = c.mul(a, b);
            for cc in 0..n {
                let key = [a, b, cc, c.mul(ab, cc), ab, c.mul(b, cc)];
                fs.insert(key, c.f(key[0], key[1], key[2], key[3], key[4], key[5]));
            }
            fs.insert([a, b, s, s, ab, s], bm.l(a, b, x).try_inv()?);
            fs.insert([a, s, b, s, s, s], bm.c(a, x, b).clone());
            fs.insert([s, a, b, s, s, ab], bm.r(x, a, b).clone());
            fs.insert([a, s, s, ab, s, b], setup.slide(0, a, b)?);
            fs.insert([s, a, s, b, s, s], setup.slide(1, a, b)?);
            fs.insert([s, s, a, ab, b, s], setup.slide(2, a, b)?);
        }
    }
    let cov = setup.covariance()?;
    let scale = Scalar::from_int(kappa as i64, order).try_div(&dstar)?;
    for a in 0..n {
        for b in 0..n {
            fs.insert([s, s, s, s, a, b], &cov[a][b] * &scale);
        }
    }
    let name = format!("{}+{}", c.name(), bm.name());
    let out = FusionCategory::new(name, labels, c.unit(), fusion, qdim, fs)?;
    let issues = out.check_invariants();
    if !issues.is_empty() {
        return Err(TubeError::Inconsistent(issues.join("; ")));
    }
    let report = check_pentagon(&out);
    if !report.ok {
        return Err(TubeError::Inconsistent(format!("derived data violates {} pentagon equations", report.violations.len())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derives_ising() {
        let cat = fusion_core::vec_zp(2).unwrap();
        let f1 = vec_zp_bimodule(2, CatalogName::F(1)).unwrap();
        for kappa in [1, -1] {
            let got = derive_extended_fsymbols(&cat, &f1, kappa).unwrap();
            assert!(got.same_data(&fusion_core::ising(kappa).unwrap()), "kappa = {kappa}");
        }
    }
}
