//! End-to-end checks shared by `defectchain reproduce` and the acceptance
//! test. Each returns a [`Check`] with a one-line detail string.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bimodule::{self, check_module_coherence, vec_zp_bimodule, CatalogName};
use crate::chain::{defect_chain_hamiltonian, golden_chain_hamiltonian, Boundary, Sector};
use crate::fusion_core::{check_pentagon, ising, vec_zp, FusionCategory, ISING_STAR};
use crate::scalar::Scalar;
use crate::spectra::{
    compare_spectra, compare_spectra_union, diagonalize_dense, extrapolate_energy_density, free_fermion_energy,
    tfim_energy_density_limit, tfim_operator, tfim_reference, SpectrumSource, TfimBasis, TfimConvention,
};
use crate::tube::{self, derive_extended_fsymbols, AnnularCategory, AnnularDiagram, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_spectral")]
    pub spectral: f64,
    #[serde(default = "default_degeneracy")]
    pub degeneracy: f64,
    /// Relative tolerance on the extrapolated energy density.
    #[serde(default = "default_energy")]
    pub energy_relative: f64,
}

fn default_spectral() -> f64 {
    crate::spectra::SPECTRAL_TOL
}

fn default_degeneracy() -> f64 {
    crate::spectra::DEGENERACY_TOL
}

fn default_energy() -> f64 {
    1e-3
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { spectral: default_spectral(), degeneracy: default_degeneracy(), energy_relative: default_energy() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "[{}] {}. {}: {} ({:.3} s, budget {} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds,
            self.budget_seconds
        )
    }
}

fn timed(id: u32, name: &str, budget: f64, f: impl FnOnce() -> Result<String, String>) -> Check {
    let t = Instant::now();
    let out = f();
    let seconds = t.elapsed().as_secs_f64();
    let within = seconds < budget;
    let (ok, mut detail) = match out {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if !within {
        detail.push_str("; over time budget");
    }
    Check { id, name: name.into(), passed: ok && within, detail, seconds, budget_seconds: budget }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Pentagon equations for the builtin categories, and detection of a sign
/// flip in the all-`*` symbol of ising(+1).
pub fn pentagon_suite() -> Check {
    timed(1, "pentagon suite", 1.0, || {
        let mut checked = 0;
        let mut cats = Vec::new();
        for p in [1, 2, 3, 5] {
            cats.push(vec_zp(p).map_err(|e| e.to_string())?);
        }
        for k in [1, -1] {
            cats.push(ising(k).map_err(|e| e.to_string())?);
        }
        for c in &cats {
            let r = check_pentagon(c);
            ensure(r.ok, format!("{} has {} violations", c.name(), r.violations.len()))?;
            checked += r.checked;
        }
        let base = ising(1).map_err(|e| e.to_string())?;
        let s = ISING_STAR;
        let key = [s, s, s, s, 1, 1];
        let flipped = -base.fsymbol(&key).ok_or("missing F-symbol")?;
        let mutated = base.with_fsymbol(key, flipped);
        let r = check_pentagon(&mutated);
        ensure(!r.ok, "sign mutation went undetected")?;
        Ok(format!("{} categories, {checked} equations; mutation gives {} violations", cats.len(), r.violations.len()))
    })
}

/// Coherence of every catalog bimodule for p = 2, 3, 5 and the mixed
/// associator of F1 over Z/2Z.
pub fn bimodule_suite() -> Check {
    timed(2, "bimodule coherence", 1.0, || {
        let mut count = 0;
        for p in [2, 3, 5] {
            for name in bimodule::catalog(p) {
                let m = vec_zp_bimodule(p, name).map_err(|e| e.to_string())?;
                let r = check_module_coherence(&m);
                ensure(r.ok, format!("{} fails {} identities", m.name(), r.violations.len()))?;
                count += 1;
            }
        }
        let f1 = vec_zp_bimodule(2, CatalogName::F(1)).map_err(|e| e.to_string())?;
        for a in 0..2 {
            for b in 0..2 {
                let want = Scalar::sign((a * b) as i64, f1.order());
                ensure(*f1.c(a, 0, b) == want, format!("F1 C({a},*,{b}) = {}", f1.c(a, 0, b)))?;
            }
        }
        Ok(format!("{count} bimodules coherent; F1 C = (-1)^(ab)"))
    })
}

/// Endomorphism algebra of (*,*,0) for the annulus (F1, F1, regular).
pub fn tube_suite() -> Check {
    timed(3, "tube algebra", 1.0, || {
        let f1 = vec_zp_bimodule(2, CatalogName::F(1)).map_err(|e| e.to_string())?;
        let reg = bimodule::regular(f1.left_cat().clone()).map_err(|e| e.to_string())?;
        let ac = AnnularCategory::new(f1.clone(), f1, reg).map_err(|e| e.to_string())?;
        let rep = Triple::new(0, 0, 0);
        let alg = ac.endomorphism_algebra(rep).map_err(|e| e.to_string())?;
        ensure(alg.dim() == 4, format!("dimension {}", alg.dim()))?;
        ensure(alg.is_commutative(), "not commutative")?;
        let order = alg.order();
        // T_{a,b} = D(b, a, b)
        let t = |a: usize, b: usize| {
            alg.basis()
                .iter()
                .position(|d| *d == AnnularDiagram { inner: rep, x: b, y: a, z: b })
                .ok_or_else(|| format!("T_{a}{b} missing from basis"))
        };
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        let got = alg.product(t(a, b)?, t(c, d)?);
                        let want = alg.unit_vector(t((a + c) % 2, (b + d) % 2)?);
                        ensure(got == want.as_slice(), format!("T_{a}{b} T_{c}{d} is wrong"))?;
                    }
                }
            }
        }
        let found = tube::primitive_idempotents(&alg).map_err(|e| e.to_string())?;
        ensure(found.len() == 4, format!("{} primitive idempotents", found.len()))?;
        for x in 0..2 {
            for y in 0..2 {
                let mut want = alg.zero();
                for a in 0..2 {
                    for b in 0..2 {
                        want[t(a, b)?] = Scalar::from_ratio(if (a * x + b * y) % 2 == 0 { 1 } else { -1 }, 4, order);
                    }
                }
                ensure(found.iter().filter(|e| **e == want).count() == 1, format!("P_{x}{y} not found"))?;
            }
        }
        Ok("dim 4, commutative, Z2xZ2 products, 4 idempotents P_xy".into())
    })
}

/// Derived fusion data equal ising(kappa) for both signs.
pub fn derivation_suite() -> Check {
    timed(4, "F-symbol derivation", 5.0, || {
        let cat = vec_zp(2).map_err(|e| e.to_string())?;
        let f1 = vec_zp_bimodule(2, CatalogName::F(1)).map_err(|e| e.to_string())?;
        for kappa in [1, -1] {
            let got = derive_extended_fsymbols(&cat, &f1, kappa).map_err(|e| e.to_string())?;
            let want = ising(kappa).map_err(|e| e.to_string())?;
            ensure(got.same_data(&want), format!("kappa = {kappa}: derived table differs from ising"))?;
            ensure(check_pentagon(&got).ok, format!("kappa = {kappa}: derived table fails the pentagon"))?;
        }
        Ok("derived tables equal ising(+1), ising(-1) and satisfy the pentagon".into())
    })
}

fn star_fixed() -> Boundary {
    Boundary::Fixed(ISING_STAR, ISING_STAR)
}

/// Defect chain with 2k+1 edges and `*` at both ends against the TFIM on k
/// qubits, for each k.
pub fn tfim_equivalence(ext: &FusionCategory, ks: &[usize], tol: Tolerances) -> Check {
    timed(5, "defect chain = TFIM", 60.0, || {
        let worst = ks
            .par_iter()
            .map(|&k| -> Result<f64, String> {
                let h = defect_chain_hamiltonian(ext, 2 * k + 1, star_fixed()).map_err(|e| e.to_string())?;
                let a = diagonalize_dense(&h, SpectrumSource::default()).map_err(|e| e.to_string())?;
                let t = tfim_reference(k, TfimConvention::MatchDefectChain).map_err(|e| e.to_string())?;
                let b = diagonalize_dense(&t, SpectrumSource::default()).map_err(|e| e.to_string())?;
                let r = compare_spectra(&a, &b, tol.spectral);
                ensure(r.equal, format!("k = {k}: deviation {:.3e}, {} unmatched", r.max_deviation, r.unmatched))?;
                Ok(r.max_deviation)
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(format!("k in {ks:?}: max deviation {worst:.3e}"))
    })
}

/// Free boundary spectrum against the union of its two sectors.
pub fn free_sectors(ext: &FusionCategory, ks: &[usize], tol: Tolerances) -> Check {
    timed(6, "free boundary = union of sectors", 60.0, || {
        let worst = ks
            .par_iter()
            .map(|&k| -> Result<f64, String> {
                let n = 2 * k + 1;
                let spec = |b: Boundary| {
                    defect_chain_hamiltonian(ext, n, b)
                        .map_err(|e| e.to_string())
                        .and_then(|h| diagonalize_dense(&h, SpectrumSource::default()).map_err(|e| e.to_string()))
                };
                let free = spec(Boundary::Free)?;
                let star = spec(Boundary::Sector(Sector::Star))?;
                let cat = spec(Boundary::Sector(Sector::Category))?;
                let r = compare_spectra_union(&free, &[&star, &cat], tol.spectral);
                ensure(r.equal, format!("k = {k}: deviation {:.3e}, {} unmatched", r.max_deviation, r.unmatched))?;
                Ok(r.max_deviation)
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(format!("k in {ks:?}: max deviation {worst:.3e}"))
    })
}

/// Extrapolated free-fermion energy density, and free fermions against
/// dense diagonalization for n = 1..=dense_max.
pub fn criticality(sizes: &[usize], dense_max: usize, tol: Tolerances) -> Check {
    timed(7, "energy density", 10.0, || {
        let (_, e) = extrapolate_energy_density(sizes).map_err(|e| e.to_string())?;
        let limit = tfim_energy_density_limit();
        let rel = ((e - limit) / limit).abs();
        ensure(rel < tol.energy_relative, format!("extrapolated {e:.10} vs {limit:.10} (relative {rel:.3e})"))?;
        let mut worst: f64 = 0.0;
        for n in 1..=dense_max {
            let h = tfim_operator(n, TfimConvention::PerSite, TfimBasis::X, &[]).map_err(|e| e.to_string())?;
            let s = diagonalize_dense(&h, SpectrumSource::default()).map_err(|e| e.to_string())?;
            let dense = s.ground_energy().ok_or("empty spectrum")?;
            let ff = free_fermion_energy(n).map_err(|e| e.to_string())?;
            ensure((dense - ff).abs() < tol.spectral, format!("n = {n}: dense {dense} vs free fermion {ff}"))?;
            worst = worst.max((dense - ff).abs());
        }
        Ok(format!(
            "extrapolated {e:.10} vs {limit:.10} (relative {rel:.2e}); n <= {dense_max} dense agreement {worst:.2e}"
        ))
    })
}

/// vec_zp(2) with X = 1: one ground state with fixed ends, two when periodic.
pub fn ground_state_counting(tol: Tolerances) -> Check {
    timed(8, "ground-state counting", 1.0, || {
        let cat = vec_zp(2).map_err(|e| e.to_string())?;
        let spec = |n: usize, b: Boundary| {
            golden_chain_hamiltonian(&cat, 1, n, b)
                .map_err(|e| e.to_string())
                .and_then(|h| diagonalize_dense(&h, SpectrumSource::default()).map_err(|e| e.to_string()))
                .map(|s| crate::spectra::Spectrum::new(s.eigenvalues, tol.degeneracy, s.source))
        };
        let fixed = spec(9, Boundary::Fixed(0, 0))?;
        let periodic = spec(8, Boundary::Periodic)?;
        ensure(fixed.ground_degeneracy() == 1, format!("fixed: {} ground states", fixed.ground_degeneracy()))?;
        ensure(periodic.ground_degeneracy() == 2, format!("periodic: {} ground states", periodic.ground_degeneracy()))?;
        let e0 = fixed.ground_energy().unwrap_or(f64::NAN);
        ensure((e0 + 7.0).abs() < tol.spectral, format!("fixed ground energy {e0}, expected -7"))?;
        Ok(format!("fixed (9 edges): 1 ground state at {e0}; periodic (8 edges): 2 ground states"))
    })
}

/// The fusion data derived from Vec(Z/2Z) and F1.
pub fn derived_ising(kappa: i32) -> Result<FusionCategory, String> {
    let cat = vec_zp(2).map_err(|e| e.to_string())?;
    let f1 = vec_zp_bimodule(2, CatalogName::F(1)).map_err(|e| e.to_string())?;
    derive_extended_fsymbols(&cat, &f1, kappa).map_err(|e| e.to_string())
}

/// All eight checks with the sizes the acceptance criteria name. The chain
/// checks run on the derived table.
pub fn acceptance(tol: Tolerances) -> Vec<Check> {
    let mut out = vec![pentagon_suite(), bimodule_suite(), tube_suite(), derivation_suite()];
    match derived_ising(1) {
        Ok(ext) => {
            out.push(tfim_equivalence(&ext, &(1..=10).collect::<Vec<_>>(), tol));
            out.push(free_sectors(&ext, &(1..=8).collect::<Vec<_>>(), tol));
        }
        Err(e) => {
            for (id, name) in [(5, "defect chain = TFIM"), (6, "free boundary = union of sectors")] {
                out.push(timed(id, name, 60.0, || Err(format!("derivation failed: {e}"))));
            }
        }
    }
    out.extend([
        criticality(&[64, 128, 256], 12, tol),
        ground_state_counting(tol),
    ]);
    out
}
