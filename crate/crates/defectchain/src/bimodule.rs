//! Bimodule categories over pointed fusion categories.
//!
//! Actions are functions on object labels and the associators are scalars:
//!
//! * `a▷(b▷m) = L(a,b,m) · (a⊗b)▷m`
//! * `(m◁a)◁b = R(m,a,b) · m◁(a⊗b)`
//! * `(a▷m)◁b = C(a,m,b) · a▷(m◁b)`
//!
//! The ordering of the two routes in each definition is our gauge convention;
//! the coherence identities in [`check_module_coherence`] are written in the
//! same convention.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fusion_core::{self, CategoryError, CategoryJson, FusionCategory, Label};
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error)]
pub enum BimoduleError {
    #[error("unknown catalog bimodule {0:?} (expected T, L, R, F0, X<k> or F<q>)")]
    UnknownName(String),
    #[error("p = {0} is neither 1 nor prime")]
    BadP(usize),
    #[error("malformed bimodule: {0}")]
    Malformed(String),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

type Result<T> = std::result::Result<T, BimoduleError>;

#[derive(Clone, Debug, PartialEq)]
pub struct Bimodule {
    name: String,
    left_cat: Arc<FusionCategory>,
    right_cat: Arc<FusionCategory>,
    objects: Vec<String>,
    left_action: Vec<Vec<usize>>,
    right_action: Vec<Vec<usize>>,
    l: Vec<Scalar>,
    r: Vec<Scalar>,
    c: Vec<Scalar>,
}

/// Names of the Vec(Z/pZ) catalog.
/// A category line attaching to a bimodule strand from the left or right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    L(Label),
    R(Label),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordOrder {
    LeftFirst,
    RightFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogName {
    T,
    L,
    R,
    F0,
    X(usize),
    F(usize),
}

impl std::str::FromStr for CatalogName {
    type Err = BimoduleError;
    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| t.parse::<usize>().map_err(|_| BimoduleError::UnknownName(s.into()));
        match s {
            "T" => Ok(CatalogName::T),
            "L" => Ok(CatalogName::L),
            "R" => Ok(CatalogName::R),
            "F0" => Ok(CatalogName::F0),
            _ if s.starts_with('X') => Ok(CatalogName::X(num(&s[1..])?)),
            _ if s.starts_with('F') => Ok(CatalogName::F(num(&s[1..])?)),
            _ => Err(BimoduleError::UnknownName(s.into())),
        }
    }
}

impl std::fmt::Display for CatalogName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CatalogName::T => write!(f, "T"),
            CatalogName::L => write!(f, "L"),
            CatalogName::R => write!(f, "R"),
            CatalogName::F0 => write!(f, "F0"),
            CatalogName::X(k) => write!(f, "X{k}"),
            CatalogName::F(q) => write!(f, "F{q}"),
        }
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl Bimodule {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        left_cat: Arc<FusionCategory>,
        right_cat: Arc<FusionCategory>,
        objects: Vec<String>,
        left_action: Vec<Vec<usize>>,
        right_action: Vec<Vec<usize>>,
        l: Vec<Scalar>,
        r: Vec<Scalar>,
        c: Vec<Scalar>,
    ) -> Result<Bimodule> {
        if !left_cat.is_pointed() || !right_cat.is_pointed() {
            return Err(BimoduleError::Malformed("only bimodules over pointed categories are supported".into()));
        }
        let (na, nb, nm) = (left_cat.n_labels(), right_cat.n_labels(), objects.len());
        if nm == 0 {
            return Err(BimoduleError::Malformed("no objects".into()));
        }
        let shape_ok = left_action.len() == na
            && left_action.iter().all(|row| row.len() == nm && row.iter().all(|&x| x < nm))
            && right_action.len() == nm
            && right_action.iter().all(|row| row.len() == nb && row.iter().all(|&x| x < nm))
            && l.len() == na * na * nm
            && r.len() == nm * nb * nb
            && c.len() == na * nm * nb;
        if !shape_ok {
            return Err(BimoduleError::Malformed("action or associator tables have the wrong shape".into()));
        }
        let order = left_cat.order();
        if right_cat.order() != order || l.iter().chain(&r).chain(&c).any(|s| s.order() != order) {
            return Err(BimoduleError::Malformed("scalars of mixed cyclotomic order".into()));
        }
        for m in 0..nm {
            if left_action[left_cat.unit()][m] != m || right_action[m][right_cat.unit()] != m {
                return Err(BimoduleError::Malformed("unit does not act trivially".into()));
            }
        }
        Ok(Bimodule { name: name.into(), left_cat, right_cat, objects, left_action, right_action, l, r, c })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn left_cat(&self) -> &Arc<FusionCategory> {
        &self.left_cat
    }

    pub fn right_cat(&self) -> &Arc<FusionCategory> {
        &self.right_cat
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn order(&self) -> u32 {
        self.left_cat.order()
    }

    pub fn object(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    /// a▷m
    pub fn act_left(&self, a: Label, m: usize) -> usize {
        self.left_action[a][m]
    }

    /// m◁a
    pub fn act_right(&self, m: usize, a: Label) -> usize {
        self.right_action[m][a]
    }

    pub fn l(&self, a: Label, b: Label, m: usize) -> &Scalar {
        let (na, nm) = (self.left_cat.n_labels(), self.objects.len());
        &self.l[(a * na + b) * nm + m]
    }

    pub fn r(&self, m: usize, a: Label, b: Label) -> &Scalar {
        let nb = self.right_cat.n_labels();
        &self.r[(m * nb + a) * nb + b]
    }

    pub fn c(&self, a: Label, m: usize, b: Label) -> &Scalar {
        let (nm, nb) = (self.objects.len(), self.right_cat.n_labels());
        &self.c[(a * nm + m) * nb + b]
    }

    fn index_l(&self, a: Label, b: Label, m: usize) -> usize {
        (a * self.left_cat.n_labels() + b) * self.objects.len() + m
    }

    fn index_r(&self, m: usize, a: Label, b: Label) -> usize {
        (m * self.right_cat.n_labels() + a) * self.right_cat.n_labels() + b
    }

    fn index_c(&self, a: Label, m: usize, b: Label) -> usize {
        (a * self.objects.len() + m) * self.right_cat.n_labels() + b
    }

    /// Copy with one C entry replaced; no validation (mutation tests).
    pub fn with_c(&self, a: Label, m: usize, b: Label, v: Scalar) -> Bimodule {
        let mut out = self.clone();
        let i = self.index_c(a, m, b);
        out.c[i] = v;
        out
    }

    /// Copy with one L entry replaced; no validation (mutation tests).
    pub fn with_l(&self, a: Label, b: Label, m: usize, v: Scalar) -> Bimodule {
        let mut out = self.clone();
        let i = self.index_l(a, b, m);
        out.l[i] = v;
        out
    }

    /// Copy with one R entry replaced; no validation (mutation tests).
    pub fn with_r(&self, m: usize, a: Label, b: Label, v: Scalar) -> Bimodule {
        let mut out = self.clone();
        let i = self.index_r(m, a, b);
        out.r[i] = v;
        out
    }

    pub fn apply(&self, m: usize, letter: Letter) -> usize {
        match letter {
            Letter::L(a) => self.act_left(a, m),
            Letter::R(a) => self.act_right(m, a),
        }
    }

    /// Rewrite `word` acting on `m` (first letter innermost) as
    /// `coef · [L a, R b]` (left first) or `coef · [R b, L a]` (right first).
    /// Returns `(coef, a, b)`; missing letters are the unit.
    pub fn reduce_word(&self, m: usize, word: &[Letter], order: WordOrder) -> Result<(Scalar, Label, Label)> {
        let mut w = word.to_vec();
        let mut coef = Scalar::one(self.order());
        let objects = |w: &[Letter]| {
            let mut objs = vec![m];
            for &l in w {
                objs.push(self.apply(*objs.last().unwrap(), l));
            }
            objs
        };
        loop {
            let objs = objects(&w);
            let swap = (0..w.len().saturating_sub(1)).find_map(|i| match (w[i], w[i + 1], order) {
                (Letter::R(b), Letter::L(a), WordOrder::LeftFirst) | (Letter::L(a), Letter::R(b), WordOrder::RightFirst) => {
                    Some((i, a, b))
                }
                _ => None,
            });
            let Some((i, a, b)) = swap else { break };
            let c = self.c(a, objs[i], b);
            match order {
                WordOrder::LeftFirst => {
                    coef = coef.try_div(c).map_err(|_| BimoduleError::Malformed("vanishing middle associator".into()))?
                }
                WordOrder::RightFirst => coef *= c,
            }
            w.swap(i, i + 1);
        }
        loop {
            let objs = objects(&w);
            let merge = (0..w.len().saturating_sub(1)).find(|&i| {
                matches!((w[i], w[i + 1]), (Letter::L(_), Letter::L(_)) | (Letter::R(_), Letter::R(_)))
            });
            let Some(i) = merge else { break };
            let merged = match (w[i], w[i + 1]) {
                (Letter::L(a), Letter::L(b)) => {
                    coef *= self.l(b, a, objs[i]);
                    Letter::L(self.left_cat.mul(b, a))
                }
                (Letter::R(a), Letter::R(b)) => {
                    coef *= self.r(objs[i], a, b);
                    Letter::R(self.right_cat.mul(a, b))
                }
                _ => unreachable!(),
            };
            w.splice(i..i + 2, [merged]);
        }
        let mut a = self.left_cat.unit();
        let mut b = self.right_cat.unit();
        for l in w {
            match l {
                Letter::L(x) => a = x,
                Letter::R(x) => b = x,
            }
        }
        Ok((coef, a, b))
    }

    /// Equal actions and associators, ignoring names.
    pub fn same_data(&self, other: &Bimodule) -> bool {
        self.left_cat.same_data(&other.left_cat)
            && self.right_cat.same_data(&other.right_cat)
            && self.objects.len() == other.objects.len()
            && self.left_action == other.left_action
            && self.right_action == other.right_action
            && self.l == other.l
            && self.r == other.r
            && self.c == other.c
    }

    /// For every fixed category label both actions permute the objects.
    pub fn actions_are_bijective(&self) -> bool {
        let nm = self.objects.len();
        let perm = |img: Vec<usize>| {
            let mut s = img;
            s.sort_unstable();
            s == (0..nm).collect::<Vec<_>>()
        };
        (0..self.left_cat.n_labels()).all(|a| perm((0..nm).map(|m| self.act_left(a, m)).collect()))
            && (0..self.right_cat.n_labels()).all(|a| perm((0..nm).map(|m| self.act_right(m, a)).collect()))
    }

    pub fn to_json(&self) -> BimoduleJson {
        let la = |a: Label| self.left_cat.label_name(a).to_string();
        let ra = |a: Label| self.right_cat.label_name(a).to_string();
        let ob = |m: usize| self.objects[m].clone();
        let (na, nb, nm) = (self.left_cat.n_labels(), self.right_cat.n_labels(), self.objects.len());
        let mut j = BimoduleJson {
            name: Some(self.name.clone()),
            provenance: None,
            left_category: self.left_cat.to_json(),
            right_category: self.right_cat.to_json(),
            objects: self.objects.clone(),
            left_action: Vec::new(),
            right_action: Vec::new(),
            l: Vec::new(),
            r: Vec::new(),
            c: Vec::new(),
        };
        for a in 0..na {
            for m in 0..nm {
                j.left_action.push((la(a), ob(m), ob(self.act_left(a, m))));
            }
        }
        for m in 0..nm {
            for a in 0..nb {
                j.right_action.push((ob(m), ra(a), ob(self.act_right(m, a))));
            }
        }
        for a in 0..na {
            for m in 0..nm {
                for b in 0..na {
                    if !self.l(a, b, m).is_one() {
                        j.l.push((la(a), la(b), ob(m), self.l(a, b, m).clone()));
                    }
                }
                for b in 0..nb {
                    if !self.c(a, m, b).is_one() {
                        j.c.push((la(a), ob(m), ra(b), self.c(a, m, b).clone()));
                    }
                }
            }
        }
        for m in 0..nm {
            for a in 0..nb {
                for b in 0..nb {
                    if !self.r(m, a, b).is_one() {
                        j.r.push((ob(m), ra(a), ra(b), self.r(m, a, b).clone()));
                    }
                }
            }
        }
        j
    }

    pub fn from_json(j: &BimoduleJson) -> Result<Bimodule> {
        let left = Arc::new(FusionCategory::from_json(&j.left_category)?);
        let right = Arc::new(FusionCategory::from_json(&j.right_category)?);
        let (na, nb, nm) = (left.n_labels(), right.n_labels(), j.objects.len());
        let ob = |s: &str| {
            j.objects.iter().position(|o| o == s).ok_or_else(|| BimoduleError::Malformed(format!("unknown object {s:?}")))
        };
        let order = left.order();
        let mut left_action = vec![vec![usize::MAX; nm]; na];
        let mut right_action = vec![vec![usize::MAX; nb]; nm];
        for (a, m, out) in &j.left_action {
            left_action[left.label(a)?][ob(m)?] = ob(out)?;
        }
        for (m, a, out) in &j.right_action {
            right_action[ob(m)?][right.label(a)?] = ob(out)?;
        }
        if left_action.iter().chain(&right_action).any(|row| row.contains(&usize::MAX)) {
            return Err(BimoduleError::Malformed("actions must be total".into()));
        }
        let mut bm = Bimodule::new(
            j.name.clone().unwrap_or_else(|| "custom".into()),
            left.clone(),
            right.clone(),
            j.objects.clone(),
            left_action,
            right_action,
            vec![Scalar::one(order); na * na * nm],
            vec![Scalar::one(order); nm * nb * nb],
            vec![Scalar::one(order); na * nm * nb],
        )?;
        for (a, b, m, v) in &j.l {
            let i = bm.index_l(left.label(a)?, left.label(b)?, ob(m)?);
            bm.l[i] = v.clone();
        }
        for (m, a, b, v) in &j.r {
            let i = bm.index_r(ob(m)?, right.label(a)?, right.label(b)?);
            bm.r[i] = v.clone();
        }
        for (a, m, b, v) in &j.c {
            let i = bm.index_c(left.label(a)?, ob(m)?, right.label(b)?);
            bm.c[i] = v.clone();
        }
        if bm.l.iter().chain(&bm.r).chain(&bm.c).any(|s| s.order() != order) {
            return Err(BimoduleError::Malformed("scalars of mixed cyclotomic order".into()));
        }
        Ok(bm)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("bimodule serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Bimodule> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

/// On-disk bimodule format. Associator entries that are not listed equal 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BimoduleJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub left_category: CategoryJson,
    pub right_category: CategoryJson,
    pub objects: Vec<String>,
    pub left_action: Vec<(String, String, String)>,
    pub right_action: Vec<(String, String, String)>,
    #[serde(rename = "L", default)]
    pub l: Vec<(String, String, String, Scalar)>,
    #[serde(rename = "R", default)]
    pub r: Vec<(String, String, String, Scalar)>,
    #[serde(rename = "C", default)]
    pub c: Vec<(String, String, String, Scalar)>,
}

/// Every catalog name over Z/pZ: T, L, R, F0, X_k for k = 1..p-1 and
/// F_q for q = 1..p-1.
pub fn catalog(p: usize) -> Vec<CatalogName> {
    let mut names = vec![CatalogName::T, CatalogName::L, CatalogName::R, CatalogName::F0];
    names.extend((1..p).map(CatalogName::X));
    names.extend((1..p).map(CatalogName::F));
    names
}

/// Catalog bimodule over Vec(Z/pZ) (both sides).
pub fn vec_zp_bimodule(p: usize, name: CatalogName) -> Result<Bimodule> {
    if p != 1 && !is_prime(p) {
        return Err(BimoduleError::BadP(p));
    }
    let cat = Arc::new(fusion_core::vec_zp(p)?);
    vec_zp_bimodule_over(cat, name)
}

/// Same as [`vec_zp_bimodule`], sharing an existing Vec(Z/pZ) instance.
pub fn vec_zp_bimodule_over(cat: Arc<FusionCategory>, name: CatalogName) -> Result<Bimodule> {
    let p = cat.n_labels();
    let order = cat.order();
    let one = Scalar::one(order);
    match name {
        CatalogName::X(k) if k == 0 || k >= p.max(2) => return Err(BimoduleError::UnknownName(format!("{name} over Z{p}"))),
        CatalogName::F(q) if q >= p.max(2) => return Err(BimoduleError::UnknownName(format!("{name} over Z{p}"))),
        _ => {}
    }
    let (objects, left, right): (Vec<String>, Vec<Vec<usize>>, Vec<Vec<usize>>) = match name {
        CatalogName::T => {
            // objects (g, h) stored as g*p + h
            let objs = (0..p * p).map(|i| format!("({},{})", i / p, i % p)).collect();
            let left = (0..p).map(|a| (0..p * p).map(|i| ((i / p + a) % p) * p + i % p).collect()).collect();
            let right = (0..p * p).map(|i| (0..p).map(|a| (i / p) * p + (i % p + a) % p).collect()).collect();
            (objs, left, right)
        }
        CatalogName::L => {
            let objs = (0..p).map(|g| g.to_string()).collect();
            let left = (0..p).map(|_| (0..p).collect()).collect();
            let right = (0..p).map(|g| (0..p).map(|a| (g + a) % p).collect()).collect();
            (objs, left, right)
        }
        CatalogName::R => {
            let objs = (0..p).map(|g| g.to_string()).collect();
            let left = (0..p).map(|a| (0..p).map(|g| (g + a) % p).collect()).collect();
            let right = (0..p).map(|g| vec![g; p]).collect();
            (objs, left, right)
        }
        CatalogName::F0 | CatalogName::F(_) => (vec!["*".into()], vec![vec![0]; p], vec![vec![0; p]]),
        CatalogName::X(k) => {
            let objs = (0..p).map(|h| h.to_string()).collect();
            let left = (0..p).map(|a| (0..p).map(|h| (h + a) % p).collect()).collect();
            let right = (0..p).map(|h| (0..p).map(|a| (h + k * a) % p).collect()).collect();
            (objs, left, right)
        }
    };
    let nm = objects.len();
    let mut c = vec![one.clone(); p * nm * p];
    if let CatalogName::F(q) = name {
        for a in 0..p {
            for b in 0..p {
                c[a * p + b] = Scalar::root_of_unity(order, (q * a * b) as i64, p as u32)
                    .map_err(|e| BimoduleError::Malformed(e.to_string()))?;
            }
        }
    }
    let full_name = format!("{name}@Z{p}");
    Bimodule::new(full_name, cat.clone(), cat, objects, left, right, vec![one.clone(); p * p * nm], vec![one; nm * p * p], c)
}

/// The regular (identity) bimodule X_1.
pub fn regular(cat: Arc<FusionCategory>) -> Result<Bimodule> {
    vec_zp_bimodule_over(cat, CatalogName::X(1))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CoherenceViolation {
    pub identity: String,
    pub labels: BTreeMap<String, String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CoherenceReport {
    pub ok: bool,
    pub checked: usize,
    pub violations: Vec<CoherenceViolation>,
}

/// Exact check of the left pentagon, right pentagon and the two middle
/// hexagons, in the conventions of the module docs.
pub fn check_module_coherence(m: &Bimodule) -> CoherenceReport {
    let (a_cat, b_cat) = (m.left_cat.clone(), m.right_cat.clone());
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut record = |identity: &str, labels: &dyn Fn() -> Vec<(&'static str, String)>, lhs: Scalar, rhs: Scalar| {
        checked += 1;
        if lhs != rhs {
            violations.push(CoherenceViolation {
                identity: identity.into(),
                labels: labels().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
    };
    let an = |a: Label| a_cat.label_name(a).to_string();
    let bn = |b: Label| b_cat.label_name(b).to_string();
    let on = |x: usize| m.objects[x].clone();
    let (na, nb, nm) = (a_cat.n_labels(), b_cat.n_labels(), m.n_objects());
    // (i) a▷(b▷(c▷x)) two ways
    for a in 0..na {
        for b in 0..na {
            for c in 0..na {
                let (ab, bc) = (a_cat.mul(a, b), a_cat.mul(b, c));
                let f = a_cat.f(a, b, c, a_cat.mul(ab, c), ab, bc);
                for x in 0..nm {
                    let lhs = &(m.l(a, b, m.act_left(c, x)) * m.l(ab, c, x)) * &f;
                    let rhs = m.l(b, c, x) * m.l(a, bc, x);
                    record("left pentagon", &|| vec![("a", an(a)), ("b", an(b)), ("c", an(c)), ("m", on(x))], lhs, rhs);
                }
            }
        }
    }
    // (ii) ((x◁a)◁b)◁c two ways
    for a in 0..nb {
        for b in 0..nb {
            for c in 0..nb {
                let (ab, bc) = (b_cat.mul(a, b), b_cat.mul(b, c));
                let f = b_cat.f(a, b, c, b_cat.mul(ab, c), ab, bc);
                for x in 0..nm {
                    let lhs = m.r(m.act_right(x, a), b, c) * m.r(x, a, bc);
                    let rhs = &(m.r(x, a, b) * m.r(x, ab, c)) * &f;
                    record("right pentagon", &|| vec![("m", on(x)), ("a", bn(a)), ("b", bn(b)), ("c", bn(c))], lhs, rhs);
                }
            }
        }
    }
    // (iii) (a▷(b▷x))◁c and ((a▷x)◁b)◁c two ways
    for x in 0..nm {
        for a in 0..na {
            for b in 0..na {
                for c in 0..nb {
                    let lhs = m.l(a, b, x) * m.c(a_cat.mul(a, b), x, c);
                    let rhs = &(m.c(a, m.act_left(b, x), c) * m.c(b, x, c)) * m.l(a, b, m.act_right(x, c));
                    record("left-middle hexagon", &|| vec![("a", an(a)), ("b", an(b)), ("m", on(x)), ("c", bn(c))], lhs, rhs);
                }
            }
            for b in 0..nb {
                for c in 0..nb {
                    let lhs = m.r(m.act_left(a, x), b, c) * m.c(a, x, b_cat.mul(b, c));
                    let rhs = &(m.c(a, x, b) * m.c(a, m.act_right(x, b), c)) * m.r(x, b, c);
                    record("right-middle hexagon", &|| vec![("a", an(a)), ("m", on(x)), ("b", bn(b)), ("c", bn(c))], lhs, rhs);
                }
            }
        }
    }
    CoherenceReport { ok: violations.is_empty(), checked, violations }
}
