use defectchain::chain::{
    defect_chain_hamiltonian, defect_chain_term, defect_chain_via_full_space, enumerate_states, golden_chain_hamiltonian,
    is_alternating, Boundary, ChainBasis, ChainOperator, Sector,
};
use defectchain::fusion_core::{ising, vec_zp, ISING_STAR};
use defectchain::scalar::Scalar;
use defectchain::spectra::{
    compare_spectra, compare_spectra_union, diagonalize_dense, tfim_reference, Spectrum, SpectrumSource, TfimConvention,
};
use num_complex::Complex64;
use proptest::prelude::*;

const S: usize = ISING_STAR;
const R2: f64 = std::f64::consts::SQRT_2;

fn star_fixed() -> Boundary {
    Boundary::Fixed(S, S)
}

fn spectrum(h: &ChainOperator) -> Spectrum {
    diagonalize_dense(h, SpectrumSource::default()).unwrap()
}

#[test]
fn state_enumeration() {
    let b = enumerate_states(5, star_fixed()).unwrap();
    let want: Vec<Vec<usize>> =
        [(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|&(a, c)| vec![S, a, S, c, S]).collect();
    assert_eq!(b.states(), want.as_slice());
    assert_eq!(enumerate_states(3, star_fixed()).unwrap().dim(), 2);
    let free = enumerate_states(4, Boundary::Free).unwrap();
    assert_eq!(free.dim(), 8);
    assert!(free.states().iter().all(|s| is_alternating(s)));
    let star = enumerate_states(4, Boundary::Sector(Sector::Star)).unwrap();
    let cat = enumerate_states(4, Boundary::Sector(Sector::Category)).unwrap();
    assert_eq!(star.dim() + cat.dim(), 8);
}

#[test]
fn parity_mismatch_gives_empty_basis() {
    let b = enumerate_states(4, star_fixed()).unwrap();
    assert_eq!(b.dim(), 0);
    assert!(b.note().unwrap().contains("parity"));
    assert!(enumerate_states(1, star_fixed()).is_err());
    assert!(enumerate_states(4, Boundary::Periodic).is_err());
}

#[test]
fn boundary_parsing() {
    let c = ising(1).unwrap();
    assert_eq!(Boundary::parse("*,*", &c).unwrap(), star_fixed());
    assert_eq!(Boundary::parse("free:category", &c).unwrap(), Boundary::Sector(Sector::Category));
    assert_eq!(Boundary::parse("0, 1", &c).unwrap(), Boundary::Fixed(0, 1));
    assert!(Boundary::parse("*,q", &c).is_err());
    assert!(Boundary::parse("nonsense", &c).is_err());
    assert_eq!(Boundary::Free.describe(&c), "free");
}

#[test]
fn single_qubit() {
    let h = defect_chain_hamiltonian(&ising(1).unwrap(), 3, star_fixed()).unwrap();
    assert_eq!(h.dim(), 2);
    let d = -1.0 / R2;
    assert!((h.get(0, 0) - Complex64::new(d, 0.0)).norm() < 1e-15);
    assert!((h.get(0, 1) - Complex64::new(d, 0.0)).norm() < 1e-15);
    let s = spectrum(&h);
    assert!((s.eigenvalues[0] + R2).abs() < 1e-14 && s.eigenvalues[1].abs() < 1e-14);
}

#[test]
fn middle_star_term_is_zz() {
    let ext = ising(1).unwrap();
    let h2 = defect_chain_term(&ext, 5, star_fixed(), 2).unwrap();
    for (i, st) in h2.basis().states().iter().enumerate() {
        let sign = if (st[1] + st[3]) % 2 == 0 { 1.0 } else { -1.0 };
        assert!((h2.get(i, i).re + (1.0 + sign) / R2).abs() < 1e-15, "{st:?}");
        for j in 0..h2.dim() {
            if j != i {
                assert_eq!(h2.get(i, j), Complex64::new(0.0, 0.0));
            }
        }
    }
    assert!(defect_chain_term(&ext, 5, star_fixed(), 0).is_err());
}

#[test]
fn local_terms_have_eigenvalues_minus_root2_and_zero() {
    let ext = ising(1).unwrap();
    for b in [star_fixed(), Boundary::Free] {
        let n = 7;
        let basis = enumerate_states(n, b).unwrap();
        for e in basis.active_edges() {
            let s = spectrum(&defect_chain_term(&ext, n, b, e).unwrap());
            for v in s.eigenvalues {
                assert!((v + R2).abs() < 1e-12 || v.abs() < 1e-12, "edge {e}: {v}");
            }
        }
    }
}

#[test]
fn forbidden_sector_operator_drops_out() {
    let ext = ising(1).unwrap();
    for b in [star_fixed(), Boundary::Free] {
        let h = defect_chain_hamiltonian(&ext, 7, b).unwrap();
        for o in [Scalar::zero(8), Scalar::one(8), Scalar::from_ratio(-3, 2, 8)] {
            let g = defect_chain_via_full_space(&ext, 7, b, &o).unwrap();
            assert_eq!(g.max_difference(&h), Some(0.0));
        }
    }
}

#[test]
fn defect_chain_is_twice_the_golden_chain() {
    for kappa in [1, -1] {
        let ext = ising(kappa).unwrap();
        for n in 2..=15 {
            for b in [star_fixed(), Boundary::Free, Boundary::Sector(Sector::Category), Boundary::Fixed(0, 1)] {
                let d = defect_chain_hamiltonian(&ext, n, b).unwrap();
                let g = golden_chain_hamiltonian(&ext, S, n, b).unwrap();
                let diff = d.max_difference(&g.scaled(2.0)).unwrap();
                assert!(diff < 1e-14, "kappa {kappa}, n {n}, {b:?}: {diff}");
            }
        }
    }
}

#[test]
fn kappa_does_not_enter() {
    for n in [3, 5, 9, 12] {
        let a = defect_chain_hamiltonian(&ising(1).unwrap(), n, Boundary::Free).unwrap();
        let b = defect_chain_hamiltonian(&ising(-1).unwrap(), n, Boundary::Free).unwrap();
        assert_eq!(a.max_difference(&b), Some(0.0));
    }
}

#[test]
fn fixed_sector_matches_tfim() {
    for k in 1..=6 {
        let h = defect_chain_hamiltonian(&ising(1).unwrap(), 2 * k + 1, star_fixed()).unwrap();
        let t = tfim_reference(k, TfimConvention::MatchDefectChain).unwrap();
        assert!(compare_spectra(&spectrum(&h), &spectrum(&t), 1e-10).equal, "k = {k}");
    }
}

#[test]
fn category_sector_is_two_tfim_copies() {
    for k in 1..=6 {
        let h = defect_chain_hamiltonian(&ising(1).unwrap(), 2 * k + 1, Boundary::Sector(Sector::Category)).unwrap();
        let t = spectrum(&tfim_reference(k, TfimConvention::MatchDefectChain).unwrap());
        assert!(compare_spectra_union(&spectrum(&h), &[&t, &t], 1e-10).equal, "k = {k}");
    }
}

#[test]
fn operators_are_hermitian_and_real() {
    for b in [star_fixed(), Boundary::Free] {
        let h = defect_chain_hamiltonian(&ising(-1).unwrap(), 9, b).unwrap();
        assert!(h.hermiticity_error() <= 1e-14);
        assert!(h.is_real());
        assert_eq!(h.terms().len(), 7);
    }
}

#[test]
fn vec_z2_fixed_chain() {
    let cat = vec_zp(2).unwrap();
    for n in [3, 5, 9, 11] {
        let h = golden_chain_hamiltonian(&cat, 1, n, Boundary::Fixed(0, 0)).unwrap();
        for r in 0..h.dim() {
            for c in 0..h.dim() {
                if r != c {
                    assert_eq!(h.get(r, c).norm(), 0.0);
                }
            }
        }
        let s = Spectrum::new(spectrum(&h).eigenvalues, 1e-8, SpectrumSource::default());
        assert!((s.ground_energy().unwrap() + (n as f64 - 2.0)).abs() < 1e-12, "n = {n}");
        assert_eq!(s.ground_degeneracy(), 1);
    }
    let p = golden_chain_hamiltonian(&cat, 1, 8, Boundary::Periodic).unwrap();
    let s = Spectrum::new(spectrum(&p).eigenvalues, 1e-8, SpectrumSource::default());
    assert_eq!(s.ground_degeneracy(), 2);
}

#[test]
fn matrix_market_round_trip() {
    let h = defect_chain_hamiltonian(&ising(1).unwrap(), 9, Boundary::Free).unwrap();
    let mut buf = Vec::new();
    h.write_matrix_market(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("%%MatrixMarket matrix coordinate"));
    let back = ChainOperator::read_matrix_market(std::io::Cursor::new(buf)).unwrap();
    assert_eq!(back.dim(), h.dim());
    assert_eq!(back.nnz(), h.nnz());
    assert_eq!(back.model(), h.model());
    for (r, c, v) in h.triplets() {
        assert_eq!(back.get(r, c), v);
    }
    assert!(ChainOperator::read_matrix_market(std::io::Cursor::new(b"not a matrix".to_vec())).is_err());
}

#[test]
fn qubit_basis_layout() {
    let b = ChainBasis::qubits(3);
    assert_eq!(b.dim(), 8);
    assert_eq!(b.states()[5], vec![1, 0, 1]);
    assert_eq!(b.index_of(&[0, 1, 1]), Some(6));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn enumerated_states_are_admissible(n in 2usize..12, which in 0usize..5) {
        let b = [star_fixed(), Boundary::Free, Boundary::Sector(Sector::Star), Boundary::Sector(Sector::Category), Boundary::Fixed(0, S)][which];
        let basis = enumerate_states(n, b).unwrap();
        let c = ising(1).unwrap();
        for s in basis.states() {
            prop_assert!(is_alternating(s));
            for w in s.windows(2) {
                prop_assert!(c.admits(w[0], S, w[1]));
            }
        }
        // 2^(number of category edges), summed over patterns
        let cat_edges = |first_star: bool| (0..n).filter(|i| (i % 2 == 0) != first_star).count() as u32;
        let want = match b {
            Boundary::Free => 2usize.pow(cat_edges(true)) + 2usize.pow(cat_edges(false)),
            Boundary::Sector(Sector::Star) => 2usize.pow(cat_edges(true)),
            Boundary::Sector(Sector::Category) => 2usize.pow(cat_edges(false)),
            Boundary::Fixed(S, S) => if n % 2 == 1 { 2usize.pow(cat_edges(true)) } else { 0 },
            _ => if n % 2 == 0 { 2usize.pow(cat_edges(false) - 1) } else { 0 },
        };
        prop_assert_eq!(basis.dim(), want);
    }
}
