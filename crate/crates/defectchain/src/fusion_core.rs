//! Skeletal multiplicity-free fusion categories.
//!
//! Labels are indices into [`FusionCategory::labels`]. An F-symbol
//! `(F^d_{abc})_{e,f}` relates the two fusion trees
//! `((a b)_e c)_d = Σ_f (F^d_{abc})_{e,f} (a (b c)_f)_d`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::scalar::{self, Scalar, ScalarError};

pub type Label = usize;

/// Key of an F-symbol: `[a, b, c, d, e, f]` for `(F^d_{abc})_{e,f}`.
pub type FKey = [Label; 6];

#[derive(Debug, thiserror::Error)]
pub enum CategoryError {
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("malformed category: {0}")]
    Malformed(String),
    #[error("inadmissible fusion tree: {0}")]
    Inadmissible(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

type Result<T> = std::result::Result<T, CategoryError>;

#[derive(Clone, Debug, PartialEq)]
pub struct FusionCategory {
    name: String,
    labels: Vec<String>,
    unit: Label,
    /// `fusion[a][b]` is the sorted list of c with N_{ab}^c = 1.
    fusion: Vec<Vec<Vec<Label>>>,
    qdim: Vec<Scalar>,
    fsymbols: BTreeMap<FKey, Scalar>,
    order: u32,
}

impl FusionCategory {
    /// Assemble a category, checking the structural invariants: unit laws,
    /// multiplicity-freeness, and F-symbols defined exactly on admissible
    /// tuples. Numerical invariants are reported by [`Self::check_invariants`].
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        unit: Label,
        fusion: Vec<Vec<Vec<Label>>>,
        qdim: Vec<Scalar>,
        fsymbols: BTreeMap<FKey, Scalar>,
    ) -> Result<FusionCategory> {
        let n = labels.len();
        if n == 0 || unit >= n {
            return Err(CategoryError::Malformed("no labels or unit out of range".into()));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != n {
            return Err(CategoryError::Malformed("duplicate label names".into()));
        }
        if fusion.len() != n || fusion.iter().any(|r| r.len() != n) || qdim.len() != n {
            return Err(CategoryError::Malformed("fusion/qdim tables have the wrong shape".into()));
        }
        let order = qdim[0].order();
        let mut fusion = fusion;
        for row in fusion.iter_mut() {
            for prod in row.iter_mut() {
                let before = prod.len();
                prod.sort_unstable();
                prod.dedup();
                if prod.len() != before {
                    return Err(CategoryError::Malformed("fusion multiplicity > 1".into()));
                }
                if prod.iter().any(|&c| c >= n) {
                    return Err(CategoryError::Malformed("fusion product out of range".into()));
                }
            }
        }
        for a in 0..n {
            if fusion[unit][a] != vec![a] || fusion[a][unit] != vec![a] {
                return Err(CategoryError::Malformed(format!("unit law fails for {}", labels[a])));
            }
        }
        if qdim.iter().any(|d| d.order() != order) || fsymbols.values().any(|v| v.order() != order) {
            return Err(CategoryError::Malformed("scalars of mixed cyclotomic order".into()));
        }
        let cat = FusionCategory { name: name.into(), labels, unit, fusion, qdim, fsymbols, order };
        for key in cat.fsymbols.keys() {
            if key.iter().any(|&l| l >= n) || !cat.admissible_key(key) {
                return Err(CategoryError::Malformed(format!("F-symbol on inadmissible tuple {}", cat.key_name(key))));
            }
        }
        for key in cat.admissible_keys() {
            if !cat.fsymbols.contains_key(&key) {
                return Err(CategoryError::Malformed(format!("missing F-symbol {}", cat.key_name(&key))));
            }
        }
        Ok(cat)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn unit(&self) -> Label {
        self.unit
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn label_name(&self, a: Label) -> &str {
        &self.labels[a]
    }

    pub fn label(&self, name: &str) -> Result<Label> {
        self.labels.iter().position(|l| l == name).ok_or_else(|| CategoryError::UnknownLabel(name.into()))
    }

    pub fn fuse(&self, a: Label, b: Label) -> &[Label] {
        &self.fusion[a][b]
    }

    pub fn admits(&self, a: Label, b: Label, c: Label) -> bool {
        self.fusion[a][b].binary_search(&c).is_ok()
    }

    pub fn qdim(&self, a: Label) -> &Scalar {
        &self.qdim[a]
    }

    pub fn fsymbols(&self) -> &BTreeMap<FKey, Scalar> {
        &self.fsymbols
    }

    /// The dual label (unique b with the unit in a⊗b).
    pub fn dual(&self, a: Label) -> Label {
        (0..self.n_labels()).find(|&b| self.admits(a, b, self.unit)).expect("rigid category")
    }

    /// Every product is a single label.
    pub fn is_pointed(&self) -> bool {
        self.fusion.iter().all(|r| r.iter().all(|p| p.len() == 1))
    }

    pub fn has_trivial_fsymbols(&self) -> bool {
        self.fsymbols.values().all(Scalar::is_one)
    }

    /// For pointed categories: the unique product a⊗b.
    pub fn mul(&self, a: Label, b: Label) -> Label {
        let p = &self.fusion[a][b];
        assert_eq!(p.len(), 1, "mul() on a non-pointed product");
        p[0]
    }

    /// `(F^d_{abc})_{e,f}` or zero on inadmissible tuples.
    pub fn f(&self, a: Label, b: Label, c: Label, d: Label, e: Label, f: Label) -> Scalar {
        self.fsymbols.get(&[a, b, c, d, e, f]).cloned().unwrap_or_else(|| Scalar::zero(self.order))
    }

    pub fn fsymbol(&self, key: &FKey) -> Option<&Scalar> {
        self.fsymbols.get(key)
    }

    /// Copy with one F-symbol replaced; no validation (used for mutation tests).
    pub fn with_fsymbol(&self, key: FKey, value: Scalar) -> FusionCategory {
        let mut out = self.clone();
        out.fsymbols.insert(key, value);
        out
    }

    /// Equal labels, fusion rules, dimensions and F-symbols, ignoring the name.
    pub fn same_data(&self, other: &FusionCategory) -> bool {
        self.labels == other.labels
            && self.unit == other.unit
            && self.fusion == other.fusion
            && self.qdim == other.qdim
            && self.fsymbols == other.fsymbols
    }

    pub fn admissible_key(&self, k: &FKey) -> bool {
        let [a, b, c, d, e, f] = *k;
        self.admits(a, b, e) && self.admits(e, c, d) && self.admits(b, c, f) && self.admits(a, f, d)
    }

    pub fn admissible_keys(&self) -> Vec<FKey> {
        let n = self.n_labels();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for &e in self.fuse(a, b) {
                        for &d in self.fuse(e, c) {
                            for &f in self.fuse(b, c) {
                                if self.admits(a, f, d) {
                                    out.push([a, b, c, d, e, f]);
                                }
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn key_name(&self, k: &FKey) -> String {
        let n: Vec<&str> = k.iter().map(|&l| self.labels.get(l).map(String::as_str).unwrap_or("?")).collect();
        format!("(F^{}_{{{},{},{}}})_{{{},{}}}", n[3], n[0], n[1], n[2], n[4], n[5])
    }

    /// Numerical invariants: qdim consistency, strict unit gauge and unitarity
    /// of every F-matrix. Returns human-readable problems (empty when fine).
    pub fn check_invariants(&self) -> Vec<String> {
        let mut issues = Vec::new();
        let n = self.n_labels();
        for a in 0..n {
            for b in 0..n {
                let mut sum = Scalar::zero(self.order);
                for &c in self.fuse(a, b) {
                    sum += &self.qdim[c];
                }
                if &self.qdim[a] * &self.qdim[b] != sum {
                    issues.push(format!("qdim: d_{} d_{} != sum over products", self.labels[a], self.labels[b]));
                }
            }
        }
        for (k, v) in &self.fsymbols {
            if k[..3].contains(&self.unit) && !v.is_one() {
                issues.push(format!("unit gauge: {} = {v}", self.key_name(k)));
            }
        }
        for (abcd, mat) in self.f_matrices() {
            let (es, fs, m) = mat;
            if es.len() != fs.len() {
                issues.push(format!("F-matrix for {abcd:?} is not square"));
                continue;
            }
            for i in 0..es.len() {
                for j in 0..es.len() {
                    let mut s = Scalar::zero(self.order);
                    for col in 0..fs.len() {
                        s += &(&m[i][col] * &m[j][col].conj());
                    }
                    let expect = if i == j { Scalar::one(self.order) } else { Scalar::zero(self.order) };
                    if s != expect {
                        let [a, b, c, d] = abcd;
                        issues.push(format!(
                            "F^{}_{{{},{},{}}} is not unitary",
                            self.labels[d], self.labels[a], self.labels[b], self.labels[c]
                        ));
                    }
                }
            }
        }
        issues
    }

    /// F-matrices keyed by (a,b,c,d), with their row (e) and column (f) labels.
    pub fn f_matrices(&self) -> BTreeMap<[Label; 4], (Vec<Label>, Vec<Label>, Vec<Vec<Scalar>>)> {
        let mut rows: BTreeMap<[Label; 4], (BTreeSet<Label>, BTreeSet<Label>)> = BTreeMap::new();
        for k in self.fsymbols.keys() {
            let entry = rows.entry([k[0], k[1], k[2], k[3]]).or_default();
            entry.0.insert(k[4]);
            entry.1.insert(k[5]);
        }
        rows.into_iter()
            .map(|(abcd, (es, fs))| {
                let es: Vec<Label> = es.into_iter().collect();
                let fs: Vec<Label> = fs.into_iter().collect();
                let m = es
                    .iter()
                    .map(|&e| fs.iter().map(|&f| self.f(abcd[0], abcd[1], abcd[2], abcd[3], e, f)).collect())
                    .collect();
                (abcd, (es, fs, m))
            })
            .collect()
    }

    pub fn to_json(&self) -> CategoryJson {
        let n = |l: Label| self.labels[l].clone();
        let mut fusion = Vec::new();
        for a in 0..self.n_labels() {
            for b in 0..self.n_labels() {
                fusion.push((n(a), n(b), self.fuse(a, b).iter().map(|&c| n(c)).collect()));
            }
        }
        CategoryJson {
            name: Some(self.name.clone()),
            provenance: None,
            labels: self.labels.clone(),
            unit: n(self.unit),
            fusion,
            qdim: self.labels.iter().cloned().zip(self.qdim.iter().cloned()).collect(),
            fsymbols: self
                .fsymbols
                .iter()
                .map(|(k, v)| (n(k[0]), n(k[1]), n(k[2]), n(k[3]), n(k[4]), n(k[5]), v.clone()))
                .collect(),
        }
    }

    pub fn from_json(j: &CategoryJson) -> Result<FusionCategory> {
        let idx = |s: &str| -> Result<Label> {
            j.labels.iter().position(|l| l == s).ok_or_else(|| CategoryError::UnknownLabel(s.into()))
        };
        let n = j.labels.len();
        let mut fusion = vec![vec![Vec::new(); n]; n];
        let mut seen = BTreeSet::new();
        for (a, b, cs) in &j.fusion {
            let (a, b) = (idx(a)?, idx(b)?);
            if !seen.insert((a, b)) {
                return Err(CategoryError::Malformed("repeated fusion entry".into()));
            }
            fusion[a][b] = cs.iter().map(|c| idx(c)).collect::<Result<_>>()?;
        }
        let mut qdim = Vec::with_capacity(n);
        for l in &j.labels {
            qdim.push(j.qdim.get(l).cloned().ok_or_else(|| CategoryError::Malformed(format!("no qdim for {l}")))?);
        }
        let mut fs = BTreeMap::new();
        for (a, b, c, d, e, f, v) in &j.fsymbols {
            let key = [idx(a)?, idx(b)?, idx(c)?, idx(d)?, idx(e)?, idx(f)?];
            if fs.insert(key, v.clone()).is_some() {
                return Err(CategoryError::Malformed("repeated F-symbol entry".into()));
            }
        }
        FusionCategory::new(j.name.clone().unwrap_or_else(|| "custom".into()), j.labels.clone(), idx(&j.unit)?, fusion, qdim, fs)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("category serializes")
    }

    pub fn from_json_str(s: &str) -> Result<FusionCategory> {
        let j: CategoryJson = serde_json::from_str(s)?;
        Self::from_json(&j)
    }
}

/// On-disk category format.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub labels: Vec<String>,
    pub unit: String,
    pub fusion: Vec<(String, String, Vec<String>)>,
    pub qdim: BTreeMap<String, Scalar>,
    pub fsymbols: Vec<(String, String, String, String, String, String, Scalar)>,
}

/// Vec(Z/pZ) with trivial associator, scalars in Q(ζ_{lcm(8,p)}).
pub fn vec_zp(p: usize) -> Result<FusionCategory> {
    if p == 0 {
        return Err(CategoryError::Malformed("vec_zp needs p >= 1".into()));
    }
    let order = scalar::lcm(scalar::DEFAULT_ORDER, p as u32);
    let labels = (0..p).map(|a| a.to_string()).collect();
    let fusion = (0..p).map(|a| (0..p).map(|b| vec![(a + b) % p]).collect()).collect();
    let qdim = vec![Scalar::one(order); p];
    let mut fs = BTreeMap::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                fs.insert([a, b, c, (a + b + c) % p, (a + b) % p, (b + c) % p], Scalar::one(order));
            }
        }
    }
    FusionCategory::new(format!("vec_z{p}"), labels, 0, fusion, qdim, fs)
}

pub const ISING_STAR: Label = 2;

/// Ising-type category on {0, 1, *} with Frobenius–Schur sign `kappa`.
pub fn ising(kappa: i32) -> Result<FusionCategory> {
    if kappa != 1 && kappa != -1 {
        return Err(CategoryError::Malformed(format!("kappa must be +1 or -1, got {kappa}")));
    }
    let order = scalar::DEFAULT_ORDER;
    let s = ISING_STAR;
    let labels = vec!["0".to_string(), "1".to_string(), "*".to_string()];
    let mut fusion = vec![vec![Vec::new(); 3]; 3];
    for a in 0..2 {
        for b in 0..2 {
            fusion[a][b] = vec![(a + b) % 2];
        }
        fusion[a][s] = vec![s];
        fusion[s][a] = vec![s];
    }
    fusion[s][s] = vec![0, 1];
    let root2 = Scalar::sqrt2(order)?;
    let qdim = vec![Scalar::one(order), Scalar::one(order), root2.clone()];
    let sign = |e: usize| Scalar::sign(e as i64, order);
    let scale = &Scalar::from_int(kappa as i64, order) / &root2;
    let mut fs = BTreeMap::new();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                fs.insert([a, b, c, (a + b + c) % 2, (a + b) % 2, (b + c) % 2], Scalar::one(order));
            }
            fs.insert([a, b, s, s, (a + b) % 2, s], Scalar::one(order));
            fs.insert([a, s, b, s, s, s], sign(a * b));
            fs.insert([s, a, b, s, s, (a + b) % 2], Scalar::one(order));
            fs.insert([a, s, s, (a + b) % 2, s, b], Scalar::one(order));
            fs.insert([s, a, s, b, s, s], sign(a * b));
            fs.insert([s, s, a, (a + b) % 2, b, s], Scalar::one(order));
            fs.insert([s, s, s, s, a, b], &sign(a * b) * &scale);
        }
    }
    let name = if kappa == 1 { "ising+" } else { "ising-" };
    FusionCategory::new(name, labels, 0, fusion, qdim, fs)
}

// ---------------------------------------------------------------- pentagon

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PentagonViolation {
    /// External legs a, b, c, d, total e, and internal labels f, g, k, l.
    pub labels: BTreeMap<String, String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PentagonReport {
    pub ok: bool,
    pub checked: usize,
    pub violations: Vec<PentagonViolation>,
}

/// Exact check of
/// `(F^e_{fcd})_{g,l} (F^e_{abl})_{f,k} = Σ_h (F^g_{abc})_{f,h} (F^e_{ahd})_{g,k} (F^k_{bcd})_{h,l}`
/// over every admissible labeling.
pub fn check_pentagon(cat: &FusionCategory) -> PentagonReport {
    let n = cat.n_labels();
    let mut checked = 0;
    let mut violations = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for &f in cat.fuse(a, b) {
                        for &g in cat.fuse(f, c) {
                            for &e in cat.fuse(g, d) {
                                for &l in cat.fuse(c, d) {
                                    for &k in cat.fuse(b, l) {
                                        if !cat.admits(a, k, e) {
                                            continue;
                                        }
                                        checked += 1;
                                        let lhs = &cat.f(f, c, d, e, g, l) * &cat.f(a, b, l, e, f, k);
                                        let mut rhs = Scalar::zero(cat.order());
                                        for &h in cat.fuse(b, c) {
                                            let t = &(&cat.f(a, b, c, g, f, h) * &cat.f(a, h, d, e, g, k))
                                                * &cat.f(b, c, d, k, h, l);
                                            rhs += &t;
                                        }
                                        if lhs != rhs {
                                            let names = ["a", "b", "c", "d", "e", "f", "g", "k", "l"];
                                            let vals = [a, b, c, d, e, f, g, k, l];
                                            violations.push(PentagonViolation {
                                                labels: names
                                                    .iter()
                                                    .zip(vals)
                                                    .map(|(nm, v)| (nm.to_string(), cat.label_name(v).to_string()))
                                                    .collect(),
                                                lhs: lhs.to_string(),
                                                rhs: rhs.to_string(),
                                            });
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    PentagonReport { ok: violations.is_empty(), checked, violations }
}

// ---------------------------------------------------------------- labelings

/// Internal labels x_1..x_{N-1} of a chain of N leaves labeled `x_leaf`
/// between boundary labels x_0 = `left` and x_N = `right`, with
/// x_i ∈ x_{i-1} ⊗ X. Lexicographic order.
pub fn admissible_labelings(cat: &FusionCategory, left: Label, right: Label, x_leaf: Label, n_leaves: usize) -> Vec<Vec<Label>> {
    let mut out = Vec::new();
    if n_leaves == 0 {
        return out;
    }
    let mut cur = Vec::with_capacity(n_leaves + 1);
    cur.push(left);
    extend_labelings(cat, right, x_leaf, n_leaves, &mut cur, &mut out);
    out
}

fn extend_labelings(cat: &FusionCategory, right: Label, x: Label, n: usize, cur: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
    let last = *cur.last().unwrap();
    if cur.len() == n {
        if cat.admits(last, x, right) {
            out.push(cur[1..].to_vec());
        }
        return;
    }
    for &next in cat.fuse(last, x) {
        cur.push(next);
        extend_labelings(cat, right, x, n, cur, out);
        cur.pop();
    }
}

// ---------------------------------------------------------------- trees

/// A binary fusion tree; every node records the label it fuses to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FusionTree {
    Leaf(Label),
    Node(Box<FusionTree>, Box<FusionTree>, Label),
}

/// Which way an F-move reassociates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveDirection {
    /// `((A B)_e C)_d → Σ_f F_{e,f} (A (B C)_f)_d`
    Right,
    /// `(A (B C)_f)_d → Σ_e conj(F_{e,f}) ((A B)_e C)_d`
    Left,
}

impl FusionTree {
    pub fn node(l: FusionTree, r: FusionTree, total: Label) -> FusionTree {
        FusionTree::Node(Box::new(l), Box::new(r), total)
    }

    pub fn total(&self) -> Label {
        match self {
            FusionTree::Leaf(a) => *a,
            FusionTree::Node(_, _, t) => *t,
        }
    }

    pub fn leaves(&self) -> Vec<Label> {
        match self {
            FusionTree::Leaf(a) => vec![*a],
            FusionTree::Node(l, r, _) => {
                let mut v = l.leaves();
                v.extend(r.leaves());
                v
            }
        }
    }

    pub fn is_admissible(&self, cat: &FusionCategory) -> bool {
        match self {
            FusionTree::Leaf(a) => *a < cat.n_labels(),
            FusionTree::Node(l, r, t) => {
                l.is_admissible(cat) && r.is_admissible(cat) && cat.admits(l.total(), r.total(), *t)
            }
        }
    }

    fn at(&self, path: &[bool]) -> Option<&FusionTree> {
        match (path.split_first(), self) {
            (None, _) => Some(self),
            (Some((&right, rest)), FusionTree::Node(l, r, _)) => if right { r } else { l }.at(rest),
            _ => None,
        }
    }

    fn replaced(&self, path: &[bool], sub: FusionTree) -> FusionTree {
        match (path.split_first(), self) {
            (None, _) => sub,
            (Some((&right, rest)), FusionTree::Node(l, r, t)) => {
                if right {
                    FusionTree::node((**l).clone(), r.replaced(rest, sub), *t)
                } else {
                    FusionTree::node(l.replaced(rest, sub), (**r).clone(), *t)
                }
            }
            _ => unreachable!("path checked by at()"),
        }
    }
}

/// Apply one F-move at the node addressed by `path` (false = left child).
pub fn f_move(cat: &FusionCategory, tree: &FusionTree, path: &[bool], dir: MoveDirection) -> Result<Vec<(Scalar, FusionTree)>> {
    if !tree.is_admissible(cat) {
        return Err(CategoryError::Inadmissible(format!("{tree:?}")));
    }
    let node = tree.at(path).ok_or_else(|| CategoryError::Inadmissible("path leaves the tree".into()))?;
    let mut out = Vec::new();
    match (dir, node) {
        (MoveDirection::Right, FusionTree::Node(ab, cc, d)) => {
            let FusionTree::Node(aa, bb, e) = &**ab else {
                return Err(CategoryError::Inadmissible("left child is a leaf".into()));
            };
            let (a, b, c) = (aa.total(), bb.total(), cc.total());
            for &f in cat.fuse(b, c) {
                let coef = cat.f(a, b, c, *d, *e, f);
                if !coef.is_zero() {
                    let bc = FusionTree::node((**bb).clone(), (**cc).clone(), f);
                    out.push((coef, tree.replaced(path, FusionTree::node((**aa).clone(), bc, *d))));
                }
            }
        }
        (MoveDirection::Left, FusionTree::Node(aa, bc, d)) => {
            let FusionTree::Node(bb, cc, f) = &**bc else {
                return Err(CategoryError::Inadmissible("right child is a leaf".into()));
            };
            let (a, b, c) = (aa.total(), bb.total(), cc.total());
            for &e in cat.fuse(a, b) {
                let coef = cat.f(a, b, c, *d, e, *f).conj();
                if !coef.is_zero() {
                    let ab = FusionTree::node((**aa).clone(), (**bb).clone(), e);
                    out.push((coef, tree.replaced(path, FusionTree::node(ab, (**cc).clone(), *d))));
                }
            }
        }
        _ => return Err(CategoryError::Inadmissible("move needs an internal node".into())),
    }
    Ok(out)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vec_z3_example() {
        let c = vec_zp(3).unwrap();
        assert_eq!(c.fuse(1, 2), &[0]);
        assert!(c.f(1, 2, 2, 2, 0, 1).is_one());
        assert!(vec_zp(0).is_err());
        let t = vec_zp(1).unwrap();
        assert_eq!(t.n_labels(), 1);
        assert!(t.f(0, 0, 0, 0, 0, 0).is_one());
    }

    #[test]
    fn ising_table_entries() {
        let c = ising(1).unwrap();
        let s = ISING_STAR;
        let r2 = Scalar::sqrt2(8).unwrap();
        assert_eq!(c.f(s, s, s, s, 1, 1), -(Scalar::one(8) / r2.clone()));
        assert_eq!(c.f(1, s, 1, s, s, s), Scalar::from_int(-1, 8));
        assert!(c.f(1, 1, s, s, 0, s).is_one());
        assert!(ising(0).is_err());
        assert!(c.check_invariants().is_empty(), "{:?}", c.check_invariants());
    }

    #[test]
    fn mutation_breaks_pentagon() {
        let c = ising(1).unwrap();
        let k = [ISING_STAR, ISING_STAR, ISING_STAR, ISING_STAR, 0, 0];
        let m = c.with_fsymbol(k, -c.f(2, 2, 2, 2, 0, 0));
        assert!(check_pentagon(&c).ok);
        assert!(!check_pentagon(&m).violations.is_empty());
    }

    #[test]
    fn json_roundtrip() {
        let c = ising(-1).unwrap();
        let back = FusionCategory::from_json_str(&c.to_json_string()).unwrap();
        assert_eq!(back, c);
    }
}
