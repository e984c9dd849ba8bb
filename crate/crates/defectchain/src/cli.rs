//! Command-line front end: one subcommand per pipeline stage plus
//! `reproduce`, which runs them all from a JSON config.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bimodule::{self, check_module_coherence, vec_zp_bimodule_over, Bimodule, CatalogName};
use crate::chain::{defect_chain_hamiltonian, golden_chain_hamiltonian, Boundary, ChainOperator, Sector};
use crate::checks::{self, Check, Tolerances};
use crate::fusion_core::{check_pentagon, ising, vec_zp, FusionCategory, ISING_STAR};
use crate::spectra::{
    compare_spectra, diagonalize, tfim_reference, DiagMode, Spectrum, SpectrumSource, TfimConvention,
};
use crate::tube::{self, derive_extended_fsymbols, AnnularCategory};

type Result<T> = std::result::Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

#[derive(Parser, Debug)]
#[command(name = "defectchain", version, about = "Fusion data, tube algebras and defect spin chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the pentagon equations of a category.
    PentagonCheck(PentagonArgs),
    /// Check the coherence identities of a bimodule category.
    BimoduleCheck(BimoduleArgs),
    /// Primitive idempotents of the tube algebra of (*,*,0).
    TubeIdempotents(TubeArgs),
    /// Derive the F-symbols of the category extended by a defect.
    DeriveFsymbols(DeriveArgs),
    /// Write a chain Hamiltonian as Matrix Market plus a basis file.
    BuildHamiltonian(BuildArgs),
    /// Diagonalize a Matrix Market Hamiltonian.
    Spectrum(SpectrumArgs),
    /// Compare the defect chain with the transverse-field Ising model.
    CompareTfim(CompareArgs),
    /// Run the whole pipeline and write report.json.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct PentagonArgs {
    /// Builtin name (vecz<p>, ising+1, ising-1) or a category JSON file.
    pub category: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct BimoduleArgs {
    /// Catalog name (F1, X2, T, ... or vecz3:F2) or a bimodule JSON file.
    pub bimodule: String,
    /// Category for bare catalog names.
    #[arg(long, default_value = "vecz2")]
    pub category: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct TubeArgs {
    #[arg(long, default_value = "vecz2")]
    pub category: String,
    #[arg(long, default_value = "F1")]
    pub bimodule: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DeriveArgs {
    #[arg(long, default_value = "vecz2")]
    pub category: String,
    #[arg(long, default_value = "F1")]
    pub bimodule: String,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub kappa: i32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct BuildArgs {
    /// `defect-z2` or `golden`.
    #[arg(long, default_value = "defect-z2")]
    pub model: String,
    /// Category for the golden chain, or an F-symbol file for either model.
    #[arg(long)]
    pub category: Option<String>,
    /// Strand label of the golden chain.
    #[arg(long)]
    pub strand: Option<String>,
    #[arg(long)]
    pub edges: usize,
    /// `l,r`, `free`, `free:star`, `free:category` or `periodic`.
    #[arg(long, default_value = "*,*")]
    pub boundary: String,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub kappa: i32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    pub matrix: PathBuf,
    /// Full dense diagonalization (the default).
    #[arg(long, conflicts_with = "lanczos")]
    pub dense: bool,
    /// Lowest K levels by Lanczos.
    #[arg(long, value_name = "K")]
    pub lanczos: Option<usize>,
    #[arg(long, default_value_t = crate::spectra::DEGENERACY_TOL)]
    pub degeneracy_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct CompareArgs {
    /// Odd number of edges 2k+1; compared with k qubits.
    #[arg(long)]
    pub edges: usize,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub kappa: i32,
    #[arg(long, default_value_t = crate::spectra::SPECTRAL_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// JSON config; flags below override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub category: Option<String>,
    #[arg(long)]
    pub bimodule: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<i32>,
    /// Comma-separated k values (chains with 2k+1 edges); empty for none.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub boundary: Option<BoundaryChoice>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Use this F-symbol file instead of deriving.
    #[arg(long)]
    pub fsymbols_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryChoice {
    Fixed,
    Free,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default = "default_category")]
    pub category: String,
    #[serde(default = "default_bimodule")]
    pub bimodule: String,
    #[serde(default = "default_kappa")]
    pub kappa: i32,
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "default_boundary")]
    pub boundary: BoundaryChoice,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fsymbols_file: Option<PathBuf>,
}

fn default_category() -> String {
    "vecz2".into()
}
fn default_bimodule() -> String {
    "F1".into()
}
fn default_kappa() -> i32 {
    1
}
fn default_sizes() -> Vec<usize> {
    (1..=8).collect()
}
fn default_boundary() -> BoundaryChoice {
    BoundaryChoice::Both
}
fn default_output_dir() -> PathBuf {
    "defectchain-out".into()
}

impl Default for PipelineConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

/// Largest k accepted by `reproduce`; free chains have 3·2^k states.
pub const MAX_K: usize = 10;

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kappa != 1 && self.kappa != -1 {
            return Err(format!("kappa must be +1 or -1, got {}", self.kappa));
        }
        if let Some(k) = self.sizes.iter().find(|&&k| k == 0 || k > MAX_K) {
            return Err(format!("sizes must lie in 1..={MAX_K}, got {k}"));
        }
        let t = &self.tolerances;
        if !(t.spectral > 0.0 && t.degeneracy > 0.0 && t.energy_relative > 0.0) {
            return Err("tolerances must be positive".into());
        }
        Ok(())
    }

    fn apply(&mut self, a: &ReproduceArgs) {
        if let Some(v) = &a.category {
            self.category = v.clone();
        }
        if let Some(v) = &a.bimodule {
            self.bimodule = v.clone();
        }
        if let Some(v) = a.kappa {
            self.kappa = v;
        }
        if let Some(v) = &a.sizes {
            self.sizes = v.clone();
        }
        if let Some(v) = a.boundary {
            self.boundary = v;
        }
        if let Some(v) = &a.output_dir {
            self.output_dir = v.clone();
        }
        if let Some(v) = &a.fsymbols_file {
            self.fsymbols_file = Some(v.clone());
        }
    }
}

// ---------------------------------------------------------------- output

/// Pretty JSON with every float written to 17 significant digits.
struct FixedFloats(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            write!(w, "{v:.16e}")
        } else {
            w.write_all(b"null")
        }
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(Default::default()));
    value.serialize(&mut ser).expect("value serializes");
    buf.push(b'\n');
    String::from_utf8(buf).expect("utf-8")
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `{ tool, version, config_sha256 }` for the canonical JSON of `config`.
pub fn provenance<T: Serialize>(config: &T) -> Value {
    let canonical = serde_json::to_vec(config).expect("config serializes");
    json!({
        "tool": "defectchain",
        "version": env!("CARGO_PKG_VERSION"),
        "config_sha256": sha256_hex(&canonical),
    })
}

fn with_provenance<T: Serialize, C: Serialize>(body: &T, config: &C) -> Value {
    let mut v = serde_json::to_value(body).expect("body serializes");
    if let Value::Object(m) = &mut v {
        m.insert("provenance".into(), provenance(config));
    }
    v
}

fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    let text = to_json_string(value);
    match out {
        Some(p) => write_file(p, text.as_bytes()),
        None => io::stdout().write_all(text.as_bytes()).map_err(err),
    }
}

fn write_file(p: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    fs::write(p, bytes).map_err(|e| format!("{}: {e}", p.display()))
}

fn read_file(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))
}

// ---------------------------------------------------------------- inputs

/// `vecz<p>`, `vec_zp:<p>`, `ising`, `ising+1`, `ising-1`, or a JSON file.
pub fn load_category(spec: &str) -> Result<FusionCategory> {
    let s = spec.trim();
    if let Some(p) = s.strip_prefix("vecz").or_else(|| s.strip_prefix("vec_zp:")) {
        if let Ok(p) = p.parse::<usize>() {
            return vec_zp(p).map_err(err);
        }
    }
    match s {
        "ising" | "ising+1" | "ising1" => return ising(1).map_err(err),
        "ising-1" => return ising(-1).map_err(err),
        _ => {}
    }
    let path = Path::new(s);
    if !path.exists() {
        return Err(format!("{s:?} is neither a builtin category nor a file"));
    }
    FusionCategory::from_json_str(&read_file(path)?).map_err(|e| format!("{s}: {e}"))
}

/// Catalog name over `category` (or `vecz<p>:<name>`), or a JSON file.
pub fn load_bimodule(spec: &str, category: &str) -> Result<Bimodule> {
    let s = spec.trim();
    let (cat_spec, name) = match s.split_once(':') {
        Some((c, n)) if c.starts_with("vecz") => (c, n),
        _ => (category, s),
    };
    if let Ok(name) = name.parse::<CatalogName>() {
        let cat = load_category(cat_spec)?;
        if !cat.is_pointed() || !cat.has_trivial_fsymbols() || !cat.same_data(&vec_zp(cat.n_labels()).map_err(err)?) {
            return Err(format!("catalog bimodules need a Vec(Z/pZ) category, got {}", cat.name()));
        }
        return vec_zp_bimodule_over(Arc::new(cat), name).map_err(err);
    }
    let path = Path::new(s);
    if !path.exists() {
        return Err(format!("{s:?} is neither a catalog name nor a file"));
    }
    Bimodule::from_json_str(&read_file(path)?).map_err(|e| format!("{s}: {e}"))
}

fn category_json(cat: &FusionCategory) -> Value {
    serde_json::to_value(cat.to_json()).expect("category serializes")
}

// ---------------------------------------------------------------- commands

fn pentagon_check(a: &PentagonArgs) -> Result<bool> {
    let cat = load_category(&a.category)?;
    let report = check_pentagon(&cat);
    let body = json!({
        "category": cat.name(),
        "ok": report.ok,
        "checked": report.checked,
        "violations": report.violations,
    });
    emit(&with_provenance(&body, a), a.out.as_deref())?;
    eprintln!("{}: {} equations, {} violations", cat.name(), report.checked, report.violations.len());
    Ok(report.ok)
}

fn bimodule_check(a: &BimoduleArgs) -> Result<bool> {
    let m = load_bimodule(&a.bimodule, &a.category)?;
    let report = check_module_coherence(&m);
    let body = json!({
        "bimodule": m.name(),
        "ok": report.ok,
        "checked": report.checked,
        "violations": report.violations,
    });
    emit(&with_provenance(&body, a), a.out.as_deref())?;
    eprintln!("{}: {} identities, {} violations", m.name(), report.checked, report.violations.len());
    Ok(report.ok)
}

fn tube_idempotents(a: &TubeArgs) -> Result<bool> {
    let m = load_bimodule(&a.bimodule, &a.category)?;
    let reg = bimodule::regular(m.left_cat().clone()).map_err(err)?;
    let ac = AnnularCategory::new(m.clone(), m.clone(), reg).map_err(err)?;
    let classes = ac.object_classes();
    let algebras = ac.all_endomorphism_algebras().map_err(err)?;
    let mut blocks = Vec::new();
    for (class, alg) in classes.iter().zip(&algebras) {
        let ps = tube::primitive_idempotents(alg).map_err(err)?;
        blocks.push(json!({
            "representative": ac.triple_name(class.representative),
            "members": class.members.iter().map(|t| ac.triple_name(*t)).collect::<Vec<_>>(),
            "algebra_dim": alg.dim(),
            "commutative": alg.is_commutative(),
            "n_idempotents": ps.len(),
        }));
    }
    let first = algebras.first().ok_or("annulus has no objects")?;
    let names = |d: &tube::AnnularDiagram| {
        let [ca, cb, cc] = ac.categories();
        format!("D({},{},{})", ca.label_name(d.x), cb.label_name(d.y), cc.label_name(d.z))
    };
    let ps = tube::primitive_idempotents(first).map_err(err)?;
    let readable: Vec<serde_json::Map<String, Value>> = ps
        .iter()
        .map(|e| first.basis().iter().zip(e).map(|(d, c)| (names(d), json!(c.to_string()))).collect())
        .collect();
    let body = json!({
        "object": ac.triple_name(first.object()),
        "algebra_dim": first.dim(),
        "basis": first.basis().iter().map(names).collect::<Vec<_>>(),
        "blocks": blocks,
        "idempotents": readable,
    });
    emit(&with_provenance(&body, a), a.out.as_deref())?;
    eprintln!("{}: dimension {}, {} primitive idempotents", ac.triple_name(first.object()), first.dim(), ps.len());
    Ok(true)
}

fn derive_fsymbols(a: &DeriveArgs) -> Result<bool> {
    let cat = load_category(&a.category)?;
    let m = load_bimodule(&a.bimodule, &a.category)?;
    let ext = derive_extended_fsymbols(&cat, &m, a.kappa).map_err(err)?;
    emit(&with_provenance(&category_json(&ext), a), a.out.as_deref())?;
    let matches = ising(a.kappa).map(|i| i.same_data(&ext)).unwrap_or(false);
    eprintln!("{}: {} F-symbols, equal to ising({:+}): {matches}", ext.name(), ext.fsymbols().len(), a.kappa);
    Ok(true)
}

fn build_operator(a: &BuildArgs) -> Result<ChainOperator> {
    match a.model.as_str() {
        "defect-z2" => {
            let ext = match &a.category {
                Some(c) => load_category(c)?,
                None => checks::derived_ising(a.kappa)?,
            };
            let b = Boundary::parse(&a.boundary, &ext).map_err(err)?;
            defect_chain_hamiltonian(&ext, a.edges, b).map_err(err)
        }
        "golden" => {
            let cat = load_category(a.category.as_deref().ok_or("--category is required for the golden chain")?)?;
            let x = cat.label(a.strand.as_deref().ok_or("--strand is required for the golden chain")?).map_err(err)?;
            let b = Boundary::parse(&a.boundary, &cat).map_err(err)?;
            golden_chain_hamiltonian(&cat, x, a.edges, b).map_err(err)
        }
        other => Err(format!("unknown model {other:?}; expected defect-z2 or golden")),
    }
}

/// `H.mtx` → `H.basis.json`.
pub fn basis_path(matrix: &Path) -> PathBuf {
    matrix.with_extension("basis.json")
}

fn write_operator(h: &ChainOperator, out: &Path, prov: &Value) -> Result<()> {
    let mut buf = Vec::new();
    h.write_matrix_market(&mut buf).map_err(err)?;
    let text = String::from_utf8(buf).map_err(err)?;
    let mut lines = text.splitn(2, '\n');
    let header = lines.next().unwrap_or_default();
    let rest = lines.next().unwrap_or_default();
    let with_prov = format!("{header}\n% provenance: {}\n{rest}", serde_json::to_string(prov).map_err(err)?);
    write_file(out, with_prov.as_bytes())?;
    let mut basis = serde_json::to_value(h.basis().to_json()).map_err(err)?;
    if let Value::Object(m) = &mut basis {
        m.insert("model".into(), json!(h.model()));
        m.insert("dim".into(), json!(h.dim()));
        m.insert("terms".into(), serde_json::to_value(h.terms()).map_err(err)?);
        m.insert("provenance".into(), prov.clone());
    }
    write_file(&basis_path(out), to_json_string(&basis).as_bytes())
}

fn build_hamiltonian(a: &BuildArgs) -> Result<bool> {
    let h = build_operator(a)?;
    write_operator(&h, &a.out, &provenance(a))?;
    eprintln!("{}: dimension {}, {} nonzeros -> {}", h.model(), h.dim(), h.nnz(), a.out.display());
    Ok(true)
}

fn spectrum(a: &SpectrumArgs) -> Result<bool> {
    let f = fs::File::open(&a.matrix).map_err(|e| format!("{}: {e}", a.matrix.display()))?;
    let h = ChainOperator::read_matrix_market(io::BufReader::new(f)).map_err(err)?;
    let mode = match a.lanczos {
        Some(k) => DiagMode::LanczosLowK { k },
        None => DiagMode::DenseFull,
    };
    let source = SpectrumSource { model: h.model().to_string(), size: h.dim(), ..Default::default() };
    let s = diagonalize(&h, mode, source).map_err(err)?;
    let s = Spectrum::new(s.eigenvalues, a.degeneracy_tol, s.source);
    emit(&with_provenance(&s, a), a.out.as_deref())?;
    eprintln!(
        "{} levels, ground energy {:.12}, degeneracy {}",
        s.eigenvalues.len(),
        s.ground_energy().unwrap_or(f64::NAN),
        s.ground_degeneracy()
    );
    Ok(true)
}

fn compare_tfim(a: &CompareArgs) -> Result<bool> {
    if a.edges < 3 || a.edges % 2 == 0 {
        return Err(format!("--edges must be odd and at least 3, got {}", a.edges));
    }
    let k = (a.edges - 1) / 2;
    let ext = checks::derived_ising(a.kappa)?;
    let h = defect_chain_hamiltonian(&ext, a.edges, Boundary::Fixed(ISING_STAR, ISING_STAR)).map_err(err)?;
    let src = |model: &str, size: usize| SpectrumSource {
        model: model.into(),
        size,
        boundary: "*,*".into(),
        kappa: Some(a.kappa),
        method: "dense".into(),
    };
    let d = diagonalize(&h, DiagMode::DenseFull, src("defect-z2", a.edges)).map_err(err)?;
    let t = tfim_reference(k, TfimConvention::MatchDefectChain).map_err(err)?;
    let r = diagonalize(&t, DiagMode::DenseFull, src("tfim", k)).map_err(err)?;
    let report = compare_spectra(&d, &r, a.tol);
    let body = json!({
        "edges": a.edges,
        "qubits": k,
        "kappa": a.kappa,
        "comparison": report,
        "defect_ground_energy": d.ground_energy(),
        "tfim_ground_energy": r.ground_energy(),
    });
    emit(&with_provenance(&body, a), a.out.as_deref())?;
    eprintln!(
        "{} edges vs {k} qubits: {} (max deviation {:.3e})",
        a.edges,
        if report.equal { "equal" } else { "different" },
        report.max_deviation
    );
    Ok(report.equal)
}

// ---------------------------------------------------------------- reproduce

#[derive(Debug, Clone, Serialize)]
struct StageResult {
    stage: String,
    passed: bool,
    detail: String,
}

#[derive(Debug, Clone, Serialize)]
struct CriterionResult {
    id: u32,
    name: String,
    passed: bool,
    detail: String,
}

impl From<&Check> for CriterionResult {
    fn from(c: &Check) -> Self {
        CriterionResult { id: c.id, name: c.name.clone(), passed: c.passed, detail: c.detail.clone() }
    }
}

struct Reporter {
    config: PipelineConfig,
    stages: Vec<StageResult>,
    criteria: Vec<CriterionResult>,
}

impl Reporter {
    fn stage(&mut self, name: &str, out: Result<String>) -> bool {
        let (passed, detail) = match out {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        println!("[{}] {name}: {detail}", if passed { "PASS" } else { "FAIL" });
        self.stages.push(StageResult { stage: name.into(), passed, detail });
        passed
    }

    fn criterion(&mut self, c: Check) {
        println!("{}", c.line());
        self.criteria.push((&c).into());
    }

    fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.passed) && self.criteria.iter().all(|c| c.passed)
    }

    /// Timings are printed but kept out of the file so reruns are
    /// byte-identical.
    fn write(&self) -> Result<PathBuf> {
        let body = json!({
            "passed": self.passed(),
            "config": self.config,
            "stages": self.stages,
            "criteria": self.criteria,
            "provenance": provenance(&self.config),
        });
        let path = self.config.output_dir.join("report.json");
        write_file(&path, to_json_string(&body).as_bytes())?;
        Ok(path)
    }
}

pub fn load_config(a: &ReproduceArgs) -> Result<PipelineConfig> {
    let mut cfg = match &a.config {
        Some(p) => serde_json::from_str::<PipelineConfig>(&read_file(p)?).map_err(|e| format!("{}: {e}", p.display()))?,
        None => PipelineConfig::default(),
    };
    cfg.apply(a);
    cfg.validate()?;
    Ok(cfg)
}

fn spectrum_of(ext: &FusionCategory, n: usize, b: Boundary) -> Result<(ChainOperator, Spectrum)> {
    let h = defect_chain_hamiltonian(ext, n, b).map_err(err)?;
    let s = diagonalize(&h, DiagMode::DenseFull, SpectrumSource::default()).map_err(err)?;
    Ok((h, s))
}

/// Runs every stage; returns whether all passed. The report is written
/// even when a stage fails.
pub fn run_reproduce(cfg: PipelineConfig) -> Result<bool> {
    let prov = provenance(&cfg);
    let dir = cfg.output_dir.clone();
    let tol = cfg.tolerances;
    let mut rep = Reporter { config: cfg.clone(), stages: Vec::new(), criteria: Vec::new() };

    // fusion data: derived, or read from the given file
    let ext = match &cfg.fsymbols_file {
        Some(p) => {
            let loaded = load_category(&p.to_string_lossy());
            let detail = loaded.as_ref().map(|c| format!("loaded {} from {}", c.name(), p.display())).map_err(Clone::clone);
            rep.stage("derive-fsymbols", detail);
            loaded.ok()
        }
        None => {
            let derived = load_category(&cfg.category)
                .and_then(|c| load_bimodule(&cfg.bimodule, &cfg.category).map(|m| (c, m)))
                .and_then(|(c, m)| derive_extended_fsymbols(&c, &m, cfg.kappa).map_err(err));
            let written = derived.as_ref().map_err(Clone::clone).and_then(|ext| {
                let mut v = category_json(ext);
                if let Value::Object(m) = &mut v {
                    m.insert("provenance".into(), prov.clone());
                }
                write_file(&dir.join("fsymbols.json"), to_json_string(&v).as_bytes())?;
                Ok(format!("{}: {} F-symbols -> fsymbols.json", ext.name(), ext.fsymbols().len()))
            });
            rep.stage("derive-fsymbols", written);
            derived.ok()
        }
    };
    let Some(ext) = ext else {
        rep.write()?;
        return Ok(false);
    };

    let pent = check_pentagon(&ext);
    let ok = rep.stage(
        "pentagon-check",
        if pent.ok {
            Ok(format!("{} equations hold", pent.checked))
        } else {
            Err(format!("{} of {} equations violated", pent.violations.len(), pent.checked))
        },
    );
    if !ok {
        rep.write()?;
        return Ok(false);
    }
    let target = ising(cfg.kappa).map_err(err)?;
    rep.stage(
        "ising-match",
        if target.same_data(&ext) {
            Ok(format!("equal to ising({:+}) entry for entry", cfg.kappa))
        } else {
            Err(format!("differs from ising({:+})", cfg.kappa))
        },
    );

    // Hamiltonians for every size and boundary sector
    let boundaries: Vec<(&str, Boundary)> = {
        let mut v = Vec::new();
        if cfg.boundary != BoundaryChoice::Free {
            v.push(("fixed", Boundary::Fixed(ISING_STAR, ISING_STAR)));
        }
        if cfg.boundary != BoundaryChoice::Fixed {
            v.push(("free", Boundary::Free));
            v.push(("free-star", Boundary::Sector(Sector::Star)));
            v.push(("free-category", Boundary::Sector(Sector::Category)));
        }
        v
    };
    let jobs: Vec<(usize, &str, Boundary)> =
        cfg.sizes.iter().flat_map(|&k| boundaries.iter().map(move |&(n, b)| (k, n, b))).collect();
    let built: Result<usize> = jobs
        .par_iter()
        .map(|&(k, name, b)| {
            let h = defect_chain_hamiltonian(&ext, 2 * k + 1, b).map_err(err)?;
            write_operator(&h, &dir.join(format!("H_k{k}_{name}.mtx")), &prov)?;
            Ok(1)
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.len());
    let built_ok = rep.stage("build-hamiltonian", built.map(|n| format!("{n} Matrix Market files")));

    if built_ok && !cfg.sizes.is_empty() {
        let spectra: Result<Vec<Value>> = cfg
            .sizes
            .par_iter()
            .map(|&k| {
                let (_, s) = spectrum_of(&ext, 2 * k + 1, Boundary::Fixed(ISING_STAR, ISING_STAR))?;
                Ok(json!({ "k": k, "edges": 2 * k + 1, "eigenvalues": s.eigenvalues }))
            })
            .collect();
        let detail = spectra.and_then(|v| {
            let body = json!({ "boundary": "*,*", "spectra": v, "provenance": prov });
            write_file(&dir.join("spectra.json"), to_json_string(&body).as_bytes())?;
            Ok("fixed-boundary spectra -> spectra.json".to_string())
        });
        rep.stage("spectrum", detail);
    }

    if cfg.boundary != BoundaryChoice::Free {
        rep.criterion(checks::tfim_equivalence(&ext, &cfg.sizes, tol));
    }
    if cfg.boundary != BoundaryChoice::Fixed {
        let small: Vec<usize> = cfg.sizes.iter().copied().filter(|&k| k <= 8).collect();
        rep.criterion(checks::free_sectors(&ext, &small, tol));
    }
    for c in [checks::pentagon_suite(), checks::bimodule_suite(), checks::tube_suite(), checks::derivation_suite()] {
        rep.criterion(c);
    }
    rep.criterion(checks::criticality(&[64, 128, 256], 12, tol));
    rep.criterion(checks::ground_state_counting(tol));
    rep.criteria.sort_by_key(|c| c.id);

    let path = rep.write()?;
    println!("report: {}", path.display());
    Ok(rep.passed())
}

fn reproduce(a: &ReproduceArgs) -> Result<bool> {
    run_reproduce(load_config(a)?)
}

/// Size of the worker pool from `DEFECTCHAIN_THREADS`, if set.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("DEFECTCHAIN_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("DEFECTCHAIN_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("DEFECTCHAIN_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(err)
}

pub fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    match &cli.command {
        Command::PentagonCheck(a) => pentagon_check(a),
        Command::BimoduleCheck(a) => bimodule_check(a),
        Command::TubeIdempotents(a) => tube_idempotents(a),
        Command::DeriveFsymbols(a) => derive_fsymbols(a),
        Command::BuildHamiltonian(a) => build_hamiltonian(a),
        Command::Spectrum(a) => spectrum(a),
        Command::CompareTfim(a) => compare_tfim(a),
        Command::Reproduce(a) => reproduce(a),
    }
}

/// Exit codes: 0 success, 1 a check failed, 2 bad input or I/O error.
pub fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
