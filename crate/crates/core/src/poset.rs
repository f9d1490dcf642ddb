//! Finite posets with the order-theoretic machinery of domain theory:
//! up/down sets, directed subsets, suprema, the way-below relation and
//! order-theoretic bases.
//!
//! Everything that quantifies over directed subsets (`is_dcpo`,
//! `way_below`, `is_basis`, ...) evaluates the textbook definition by
//! brute-force enumeration of the power set, so those operations refuse
//! posets larger than the configured enumeration cap.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default limit on the number of elements for power-set enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 15;

/// Subsets are enumerated as `u64` bitmasks.
pub const MAX_ENUMERATION_CAP: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("unknown element label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("cover relations form a cycle through `{0}` and `{1}`")]
    Cycle(String, String),
    #[error("subset must be nonempty")]
    EmptySubset,
    #[error("poset has {size} elements but the enumeration cap is {cap}")]
    SizeLimit { size: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, PosetError>;

/// On-disk description of a poset: element labels plus cover pairs
/// `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetFile {
    pub elements: Vec<String>,
    pub covers: Vec<[String; 2]>,
}

impl PosetFile {
    pub fn into_poset(self) -> Result<FinitePoset> {
        let covers: Vec<(String, String)> =
            self.covers.into_iter().map(|[lo, hi]| (lo, hi)).collect();
        FinitePoset::from_cover_relations(&self.elements, &covers)
    }
}

/// A set of elements of one particular [`FinitePoset`], stored by index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ElementSubset {
    members: BTreeSet<usize>,
}

impl ElementSubset {
    fn from_mask(mask: u64) -> Self {
        let members = (0..64).filter(|i| mask & (1u64 << i) != 0).collect();
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.members.contains(&i)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    /// Labels of the members, in poset element order.
    pub fn labels<'p>(&self, poset: &'p FinitePoset) -> Vec<&'p str> {
        self.members.iter().map(|&i| poset.label(i)).collect()
    }

    pub fn intersection(&self, other: &ElementSubset) -> ElementSubset {
        Self {
            members: self.members.intersection(&other.members).copied().collect(),
        }
    }
}

impl FromIterator<usize> for ElementSubset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self {
            members: iter.into_iter().collect(),
        }
    }
}

/// Result of the directed-completeness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DcpoCheck {
    pub is_dcpo: bool,
    /// A directed subset without a supremum, when one exists.
    pub witness: Option<ElementSubset>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Proposition1Check {
    pub holds: bool,
    /// `(rho, sigma, tau)` with `rho << sigma <= tau`, nonempty `wayup(tau)`
    /// and not `rho << tau`.
    pub counterexample: Option<[String; 3]>,
}

/// Aggregate of the structural checks run on one poset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PosetReport {
    pub is_dcpo: bool,
    pub maximal_elements: Vec<String>,
    pub compact_elements: Vec<String>,
    pub proposition1_holds: bool,
    pub counterexample: Option<[String; 3]>,
}

/// A nonempty directed subset found by enumeration, with its supremum.
#[derive(Debug, Clone, Copy)]
struct DirectedMask {
    mask: u64,
    sup: Option<usize>,
}

/// The way-below relation of a poset as a dense boolean matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WayBelow {
    n: usize,
    rel: Vec<bool>,
}

impl WayBelow {
    pub fn holds(&self, x: usize, y: usize) -> bool {
        self.rel[x * self.n + y]
    }

    pub fn wayup(&self, x: usize) -> ElementSubset {
        (0..self.n).filter(|&y| self.holds(x, y)).collect()
    }

    pub fn waydown(&self, x: usize) -> ElementSubset {
        (0..self.n).filter(|&y| self.holds(y, x)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<bool>> {
        self.rel
            .chunks(self.n.max(1))
            .map(<[bool]>::to_vec)
            .collect()
    }
}

/// A finite partially ordered set over unique string labels.
#[derive(Debug, Clone)]
pub struct FinitePoset {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    // leq[i * n + j] <=> labels[i] ⊑ labels[j]
    leq: Vec<bool>,
    cap: usize,
}

impl PartialEq for FinitePoset {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.leq == other.leq
    }
}

impl Eq for FinitePoset {}

impl FinitePoset {
    /// Builds the poset whose order is the reflexive-transitive closure of
    /// `covers` (pairs `(lower, upper)`).
    pub fn from_cover_relations<S, T>(elements: &[S], covers: &[(T, T)]) -> Result<Self>
    where
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let n = elements.len();
        let mut labels = Vec::with_capacity(n);
        let mut index = HashMap::with_capacity(n);
        for (i, e) in elements.iter().enumerate() {
            let e = e.as_ref().to_string();
            if index.insert(e.clone(), i).is_some() {
                return Err(PosetError::DuplicateLabel(e));
            }
            labels.push(e);
        }

        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (lo, hi) in covers {
            let lo = lookup(&index, lo.as_ref())?;
            let hi = lookup(&index, hi.as_ref())?;
            leq[lo * n + hi] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if !leq[i * n + k] {
                    continue;
                }
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(PosetError::Cycle(labels[i].clone(), labels[j].clone()));
                }
            }
        }

        Ok(Self {
            labels,
            index,
            leq,
            cap: DEFAULT_ENUMERATION_CAP,
        })
    }

    /// Random poset on labels `e0..e{n-1}`: each pair `i < j` is related
    /// by a cover candidate with probability `density`.
    pub fn random<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> Self {
        let labels: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        let mut covers = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(density.clamp(0.0, 1.0)) {
                    covers.push((labels[i].clone(), labels[j].clone()));
                }
            }
        }
        Self::from_cover_relations(&labels, &covers).expect("index-ordered covers are acyclic")
    }

    /// Sets the limit on the number of elements for power-set enumeration.
    ///
    /// Panics if `cap` exceeds [`MAX_ENUMERATION_CAP`].
    pub fn with_enumeration_cap(mut self, cap: usize) -> Self {
        assert!(
            cap <= MAX_ENUMERATION_CAP,
            "enumeration cap {cap} exceeds {MAX_ENUMERATION_CAP}"
        );
        self.cap = cap;
        self
    }

    pub fn enumeration_cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        lookup(&self.index, label)
    }

    pub fn subset<S: AsRef<str>>(&self, labels: &[S]) -> Result<ElementSubset> {
        labels.iter().map(|l| self.index_of(l.as_ref())).collect()
    }

    pub fn all_elements(&self) -> ElementSubset {
        (0..self.len()).collect()
    }

    pub fn leq_index(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.len() + j]
    }

    pub fn leq(&self, x: &str, y: &str) -> Result<bool> {
        Ok(self.leq_index(self.index_of(x)?, self.index_of(y)?))
    }

    /// Hasse diagram edges `(lower, upper)`: strict relations with nothing
    /// strictly in between.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.leq_index(i, j) {
                    continue;
                }
                let between = (0..n)
                    .any(|k| k != i && k != j && self.leq_index(i, k) && self.leq_index(k, j));
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn to_file(&self) -> PosetFile {
        PosetFile {
            elements: self.labels.clone(),
            covers: self
                .cover_pairs()
                .into_iter()
                .map(|(i, j)| [self.labels[i].clone(), self.labels[j].clone()])
                .collect(),
        }
    }

    /// `↑x = {σ : x ⊑ σ}`.
    pub fn up_set(&self, x: &str) -> Result<ElementSubset> {
        let i = self.index_of(x)?;
        Ok(self.up_set_index(i))
    }

    /// `↓x = {σ : σ ⊑ x}`.
    pub fn down_set(&self, x: &str) -> Result<ElementSubset> {
        let i = self.index_of(x)?;
        Ok((0..self.len()).filter(|&j| self.leq_index(j, i)).collect())
    }

    pub(crate) fn up_set_index(&self, i: usize) -> ElementSubset {
        (0..self.len()).filter(|&j| self.leq_index(i, j)).collect()
    }

    /// Every pair of members has an upper bound inside the subset.
    pub fn is_directed(&self, s: &ElementSubset) -> Result<bool> {
        if s.is_empty() {
            return Err(PosetError::EmptySubset);
        }
        let members: Vec<usize> = s.indices().collect();
        Ok(members.iter().enumerate().all(|(k, &a)| {
            members[k..].iter().all(|&b| {
                members
                    .iter()
                    .any(|&c| self.leq_index(a, c) && self.leq_index(b, c))
            })
        }))
    }

    /// Index of the least upper bound of `s`, if it exists.
    pub fn supremum_index(&self, s: &ElementSubset) -> Result<Option<usize>> {
        if s.is_empty() {
            return Err(PosetError::EmptySubset);
        }
        let upper: Vec<usize> = (0..self.len())
            .filter(|&u| s.indices().all(|a| self.leq_index(a, u)))
            .collect();
        Ok(upper
            .iter()
            .copied()
            .find(|&u| upper.iter().all(|&v| self.leq_index(u, v))))
    }

    pub fn supremum(&self, s: &ElementSubset) -> Result<Option<&str>> {
        Ok(self.supremum_index(s)?.map(|i| self.label(i)))
    }

    /// Elements with no strict successor.
    pub fn maximal_elements(&self) -> ElementSubset {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.leq_index(i, j)))
            .collect()
    }

    fn check_cap(&self) -> Result<()> {
        if self.len() > self.cap {
            return Err(PosetError::SizeLimit {
                size: self.len(),
                cap: self.cap,
            });
        }
        Ok(())
    }

    fn up_masks(&self) -> Vec<u64> {
        (0..self.len())
            .map(|i| {
                (0..self.len())
                    .filter(|&j| self.leq_index(i, j))
                    .fold(0u64, |m, j| m | (1u64 << j))
            })
            .collect()
    }

    /// All nonempty directed subsets, each with its supremum if any.
    fn directed_family(&self) -> Result<Vec<DirectedMask>> {
        self.check_cap()?;
        let n = self.len();
        let up = self.up_masks();
        let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut out = Vec::new();
        for mask in 1..=full {
            let members: Vec<usize> = (0..n).filter(|&i| mask & (1u64 << i) != 0).collect();
            let directed = members
                .iter()
                .enumerate()
                .all(|(k, &a)| members[k..].iter().all(|&b| up[a] & up[b] & mask != 0));
            if !directed {
                continue;
            }
            let upper = members.iter().fold(full, |acc, &a| acc & up[a]);
            let sup = (0..n).find(|&u| upper & (1u64 << u) != 0 && upper & !up[u] == 0);
            out.push(DirectedMask { mask, sup });
        }
        Ok(out)
    }

    /// Checks that every nonempty directed subset has a supremum.
    pub fn is_dcpo(&self) -> Result<DcpoCheck> {
        let witness = self
            .directed_family()?
            .into_iter()
            .find(|d| d.sup.is_none())
            .map(|d| ElementSubset::from_mask(d.mask));
        Ok(DcpoCheck {
            is_dcpo: witness.is_none(),
            witness,
        })
    }

    fn way_below_with(&self, family: &[DirectedMask], x: usize, y: usize) -> bool {
        let up_x = self
            .up_set_index(x)
            .indices()
            .fold(0u64, |m, j| m | (1u64 << j));
        family.iter().all(|d| match d.sup {
            Some(s) if self.leq_index(y, s) => d.mask & up_x != 0,
            _ => true,
        })
    }

    /// `x ⪯ y`: every directed set whose supremum dominates `y` contains an
    /// element dominating `x`.
    pub fn way_below(&self, x: &str, y: &str) -> Result<bool> {
        let (x, y) = (self.index_of(x)?, self.index_of(y)?);
        let family = self.directed_family()?;
        Ok(self.way_below_with(&family, x, y))
    }

    pub fn way_below_relation(&self) -> Result<WayBelow> {
        let family = self.directed_family()?;
        let n = self.len();
        let mut rel = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                rel[x * n + y] = self.way_below_with(&family, x, y);
            }
        }
        Ok(WayBelow { n, rel })
    }

    /// `↟x = {σ : x ⪯ σ}`.
    pub fn wayup_set(&self, x: &str) -> Result<ElementSubset> {
        let i = self.index_of(x)?;
        Ok(self.way_below_relation()?.wayup(i))
    }

    /// `↡x = {σ : σ ⪯ x}`.
    pub fn waydown_set(&self, x: &str) -> Result<ElementSubset> {
        let i = self.index_of(x)?;
        Ok(self.way_below_relation()?.waydown(i))
    }

    /// Elements with `x ⪯ x`.
    pub fn compact_elements(&self) -> Result<ElementSubset> {
        let wb = self.way_below_relation()?;
        Ok((0..self.len()).filter(|&i| wb.holds(i, i)).collect())
    }

    /// `m` is a basis when `m ∩ ↡ρ` is directed with supremum `ρ` for
    /// every element `ρ`.
    pub fn is_basis(&self, m: &ElementSubset) -> Result<bool> {
        if m.is_empty() {
            return Err(PosetError::EmptySubset);
        }
        let wb = self.way_below_relation()?;
        for rho in 0..self.len() {
            let approx = m.intersection(&wb.waydown(rho));
            if approx.is_empty()
                || !self.is_directed(&approx)?
                || self.supremum_index(&approx)? != Some(rho)
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exhaustive check of: `ρ ⪯ σ ⊑ τ` and `↟τ` nonempty imply `ρ ⪯ τ`.
    pub fn check_proposition1(&self) -> Result<Proposition1Check> {
        let wb = self.way_below_relation()?;
        let n = self.len();
        for rho in 0..n {
            for sigma in 0..n {
                if !wb.holds(rho, sigma) {
                    continue;
                }
                for tau in 0..n {
                    if !self.leq_index(sigma, tau) || wb.wayup(tau).is_empty() {
                        continue;
                    }
                    if !wb.holds(rho, tau) {
                        return Ok(Proposition1Check {
                            holds: false,
                            counterexample: Some([
                                self.labels[rho].clone(),
                                self.labels[sigma].clone(),
                                self.labels[tau].clone(),
                            ]),
                        });
                    }
                }
            }
        }
        Ok(Proposition1Check {
            holds: true,
            counterexample: None,
        })
    }

    pub fn analyze(&self) -> Result<PosetReport> {
        let to_labels = |s: &ElementSubset| s.labels(self).into_iter().map(String::from).collect();
        let dcpo = self.is_dcpo()?;
        let prop1 = self.check_proposition1()?;
        Ok(PosetReport {
            is_dcpo: dcpo.is_dcpo,
            maximal_elements: to_labels(&self.maximal_elements()),
            compact_elements: to_labels(&self.compact_elements()?),
            proposition1_holds: prop1.holds,
            counterexample: prop1.counterexample,
        })
    }

    /// Graphviz rendering of the Hasse diagram, greater elements on top.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=TB;\n  edge [dir=none];\n");
        for l in &self.labels {
            let _ = writeln!(out, "  \"{}\";", escape_dot(l));
        }
        for (lo, hi) in self.cover_pairs() {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\";",
                escape_dot(&self.labels[hi]),
                escape_dot(&self.labels[lo])
            );
        }
        out.push_str("}\n");
        out
    }
}

fn lookup(index: &HashMap<String, usize>, label: &str) -> Result<usize> {
    index
        .get(label)
        .copied()
        .ok_or_else(|| PosetError::UnknownLabel(label.to_string()))
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
