use std::collections::BTreeSet;
use std::sync::Arc;

use defectchain::bimodule::{regular, vec_zp_bimodule, vec_zp_bimodule_over, CatalogName};
use defectchain::fusion_core::{check_pentagon, ising, vec_zp, ISING_STAR};
use defectchain::scalar::Scalar;
use defectchain::tube::{
    derive_extended_fsymbols, four_string_covariance, primitive_idempotents, proportionality, AnnularCategory,
    AnnularDiagram, LinComb, Triple, TubeAlgebra, TubeError,
};
use proptest::prelude::*;

const S: usize = ISING_STAR;

fn f1_annulus() -> AnnularCategory {
    let cat = Arc::new(vec_zp(2).unwrap());
    let f1 = vec_zp_bimodule_over(cat.clone(), CatalogName::F(1)).unwrap();
    AnnularCategory::new(f1.clone(), f1, regular(cat).unwrap()).unwrap()
}

fn rep() -> Triple {
    Triple::new(0, 0, 0)
}

/// T_{a,b} = D(b, a, b) on (*,*,0).
fn t(a: usize, b: usize) -> AnnularDiagram {
    AnnularDiagram { inner: rep(), x: b, y: a, z: b }
}

fn f1_algebra() -> TubeAlgebra {
    f1_annulus().endomorphism_algebra(rep()).unwrap()
}

fn index(alg: &TubeAlgebra, d: AnnularDiagram) -> usize {
    alg.basis().iter().position(|b| *b == d).unwrap()
}

#[test]
fn squares_of_generators() {
    let ac = f1_annulus();
    let (c, d) = ac.compose(&t(0, 1), &t(0, 1)).unwrap();
    assert!(c.is_one());
    assert_eq!(d, t(0, 0));
    let (c, d) = ac.compose(&t(1, 1), &t(1, 1)).unwrap();
    assert!(c.is_one());
    assert_eq!(d, t(0, 0));
}

#[test]
fn group_algebra_products() {
    let alg = f1_algebra();
    assert_eq!(alg.dim(), 4);
    assert!(alg.is_commutative() && alg.is_associative());
    for (a, b, c, d) in quads(2) {
        let got = alg.product(index(&alg, t(a, b)), index(&alg, t(c, d)));
        assert_eq!(got, alg.unit_vector(index(&alg, t((a + c) % 2, (b + d) % 2))).as_slice());
    }
    assert_eq!(alg.identity().unwrap(), alg.unit_vector(index(&alg, t(0, 0))));
}

fn quads(n: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut v = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    v.push((a, b, c, d));
                }
            }
        }
    }
    v
}

#[test]
fn identity_is_neutral() {
    let ac = f1_annulus();
    for src in ac.triples() {
        for d in ac.diagrams_from(src) {
            let (c, e) = ac.compose(&ac.identity(src), &d).unwrap();
            assert!(c.is_one());
            assert_eq!(e, d);
            let (c, e) = ac.compose(&d, &ac.identity(ac.outer(&d))).unwrap();
            assert!(c.is_one());
            assert_eq!(e, d);
        }
    }
}

#[test]
fn label_mismatch_is_an_error() {
    let ac = f1_annulus();
    let d = AnnularDiagram { inner: rep(), x: 1, y: 0, z: 0 };
    assert_ne!(ac.outer(&d), rep());
    assert!(matches!(ac.compose(&d, &t(0, 0)), Err(TubeError::Mismatch(_))));
}

#[test]
fn object_classes() {
    let ac = f1_annulus();
    let classes = ac.object_classes();
    assert_eq!(classes.len(), 1);
    assert_eq!(classes[0].representative, rep());
    assert_eq!(classes[0].members, vec![Triple::new(0, 0, 0), Triple::new(0, 0, 1)]);

    let c1 = Arc::new(vec_zp(1).unwrap());
    let r1 = regular(c1).unwrap();
    let triv = AnnularCategory::new(r1.clone(), r1.clone(), r1).unwrap();
    assert_eq!(triv.object_classes().len(), 1);
    let alg = triv.endomorphism_algebra(rep()).unwrap();
    assert_eq!(alg.dim(), 1);
    let ps = primitive_idempotents(&alg).unwrap();
    assert_eq!(ps, vec![alg.identity().unwrap()]);
}

#[test]
fn t_bimodule_classes_are_orbits() {
    let t = vec_zp_bimodule(2, CatalogName::T).unwrap();
    let ac = AnnularCategory::new(t.clone(), t.clone(), t).unwrap();
    let classes = ac.object_classes();
    let all: BTreeSet<Triple> = ac.triples().into_iter().collect();
    let mut covered = BTreeSet::new();
    for c in &classes {
        assert_eq!(c.representative, *c.members.iter().min().unwrap());
        let set: BTreeSet<Triple> = c.members.iter().copied().collect();
        for &m in &c.members {
            assert!(covered.insert(m), "overlapping classes");
            for d in ac.diagrams_from(m) {
                assert!(set.contains(&ac.outer(&d)));
            }
        }
    }
    assert_eq!(covered, all);
    assert_eq!(classes.len(), 8);
}

#[test]
fn idempotents() {
    let alg = f1_algebra();
    let ps = primitive_idempotents(&alg).unwrap();
    assert_eq!(ps.len(), 4);
    let mut sum = alg.zero();
    for (i, p) in ps.iter().enumerate() {
        for (j, q) in ps.iter().enumerate() {
            let pq = alg.mul(p, q);
            assert_eq!(pq, if i == j { p.clone() } else { alg.zero() });
        }
        for (s, c) in sum.iter_mut().zip(p) {
            *s += c;
        }
    }
    assert_eq!(sum, alg.identity().unwrap());
    for x in 0..2 {
        for y in 0..2 {
            let mut want = alg.zero();
            for a in 0..2 {
                for b in 0..2 {
                    want[index(&alg, t(a, b))] = Scalar::from_ratio(if (a * x + b * y) % 2 == 0 { 1 } else { -1 }, 4, 8);
                }
            }
            assert_eq!(ps.iter().filter(|p| **p == want).count(), 1, "P_{x}{y}");
        }
    }
}

#[test]
fn vertex_basis() {
    let ac = f1_annulus();
    let alg = f1_algebra();
    let p00 = alg.to_lincomb(&primitive_idempotents(&alg).unwrap()[0]);
    for alpha in 0..2 {
        let target = Triple::new(0, 0, alpha);
        assert_eq!(ac.hom_basis(rep(), target).len(), 4);
        let v = ac.vertex_basis(&p00, rep(), target).unwrap();
        assert_eq!(v.len(), 1, "alpha = {alpha}");
        let mut want = LinComb::new();
        for y in 0..2 {
            for z in 0..2 {
                let sign = if (y * alpha) % 2 == 0 { 1 } else { -1 };
                want.insert(AnnularDiagram { inner: rep(), x: (alpha + z) % 2, y, z }, Scalar::from_ratio(sign, 4, 8));
            }
        }
        assert_eq!(v[0], want);
        assert!(proportionality(&v[0], &want).unwrap().is_one());
    }
}

#[test]
fn dagger_is_an_involution() {
    let ac = f1_annulus();
    let alg = f1_algebra();
    for p in primitive_idempotents(&alg).unwrap() {
        let v = alg.to_lincomb(&p);
        assert_eq!(ac.dagger(&ac.dagger(&v)), v);
        // the P_xy are self-adjoint
        assert_eq!(ac.dagger(&v), v);
    }
}

#[test]
fn four_string_covariance_signs() {
    let cat = vec_zp(2).unwrap();
    let f1 = vec_zp_bimodule(2, CatalogName::F(1)).unwrap();
    let cov = four_string_covariance(&cat, &f1).unwrap();
    for a in 0..2 {
        for b in 0..2 {
            assert_eq!(cov[a][b], Scalar::sign((a * b) as i64, 8));
        }
    }
}

#[test]
fn derived_table() {
    let cat = vec_zp(2).unwrap();
    let f1 = vec_zp_bimodule(2, CatalogName::F(1)).unwrap();
    let inv_r2 = Scalar::one(8) / Scalar::sqrt2(8).unwrap();
    for kappa in [1, -1] {
        let d = derive_extended_fsymbols(&cat, &f1, kappa).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let sign = Scalar::sign((a * b) as i64, 8);
                assert!(d.f(S, S, a, (a + b) % 2, b, S).is_one());
                assert_eq!(d.f(S, a, S, b, S, S), sign);
                assert_eq!(d.f(S, S, S, S, a, b), &(&sign * &inv_r2) * &Scalar::from_int(kappa as i64, 8));
            }
        }
        assert!(d.same_data(&ising(kappa).unwrap()));
        assert!(check_pentagon(&d).ok);
    }
}

#[test]
fn unsupported_inputs() {
    let cat = vec_zp(2).unwrap();
    let f1 = vec_zp_bimodule(2, CatalogName::F(1)).unwrap();
    let f0 = vec_zp_bimodule(2, CatalogName::F0).unwrap();
    assert!(matches!(derive_extended_fsymbols(&cat, &f0, 1), Err(TubeError::Unsupported(_))));
    assert!(matches!(derive_extended_fsymbols(&cat, &f1, 0), Err(TubeError::Unsupported(_))));
    let z3 = vec_zp(3).unwrap();
    assert!(derive_extended_fsymbols(&z3, &f1, 1).is_err());
    // strands over different categories
    assert!(AnnularCategory::new(
        vec_zp_bimodule(2, CatalogName::F(1)).unwrap(),
        vec_zp_bimodule_over(Arc::new(vec_zp(3).unwrap()), CatalogName::F0).unwrap(),
        vec_zp_bimodule(2, CatalogName::F0).unwrap(),
    )
    .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn composition_is_associative(
        p in prop_oneof![Just(2usize), Just(3usize)],
        names in prop::collection::vec(0usize..5, 3),
        src in 0usize..64,
        arcs in prop::collection::vec((0usize..3, 0usize..3, 0usize..3), 3),
    ) {
        let cat = Arc::new(vec_zp(p).unwrap());
        let pick = |i: usize| {
            let name = match i { 0 => CatalogName::T, 1 => CatalogName::F0, 2 => CatalogName::F(1), 3 => CatalogName::X(1), _ => CatalogName::L };
            vec_zp_bimodule_over(cat.clone(), name).unwrap()
        };
        let ac = AnnularCategory::new(pick(names[0]), pick(names[1]), pick(names[2])).unwrap();
        let triples = ac.triples();
        let mut cur = triples[src % triples.len()];
        let mut ds = Vec::new();
        for &(x, y, z) in &arcs {
            let d = AnnularDiagram { inner: cur, x: x % p, y: y % p, z: z % p };
            cur = ac.outer(&d);
            ds.push(d);
        }
        let (c12, d12) = ac.compose(&ds[0], &ds[1]).unwrap();
        let (c12_3, left) = ac.compose(&d12, &ds[2]).unwrap();
        let (c23, d23) = ac.compose(&ds[1], &ds[2]).unwrap();
        let (c1_23, right) = ac.compose(&ds[0], &d23).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(&c12 * &c12_3, &c23 * &c1_23);
    }
}
