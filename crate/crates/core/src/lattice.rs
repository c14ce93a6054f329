//! The numerical lattice `Z ⊕ Z^k ⊕ Z` with its two-step filtration,
//! the antisymmetric pairing, the effectivity cone and the support sets
//! used by the series completions.
//!
//! A class is a triple `(s, beta, r)`: degree, curve class and rank.
//! Classes of actual objects are indexed on the positive side as
//! `(n, beta) = (-s, -beta)` with `beta` effective; rank-zero object
//! classes live in the set `T = {n >= 0, beta >= 0}` and rank-one object
//! classes in `S = {n >= m(beta), beta >= 0}`, where `m` is a configured
//! integer lower bound with `m(0) = 0`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An element of `N_1 ≅ Z^k`, the curve-class part of the lattice.
///
/// The effective cone is modelled as the standard simplicial cone
/// `N^k`, with the partial order `a <= b` iff `b - a` is effective.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CurveClass(pub Vec<i64>);

impl CurveClass {
    pub fn zero(rank: usize) -> Self {
        CurveClass(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Membership in the effective cone (componentwise nonnegative).
    pub fn is_effective(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// Cone order: `self <= other` iff `other - self` is effective.
    pub fn leq(&self, other: &CurveClass) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &CurveClass) -> CurveClass {
        CurveClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &CurveClass) -> CurveClass {
        CurveClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> CurveClass {
        CurveClass(self.0.iter().map(|c| -c).collect())
    }

    /// Sum of components; the total degree against the sum of the
    /// coordinate hyperplane classes.
    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl fmt::Debug for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A lattice class `(s, beta, r)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassVector {
    pub s: i64,
    pub beta: CurveClass,
    pub r: i64,
}

impl ClassVector {
    pub fn new(s: i64, beta: CurveClass, r: i64) -> Self {
        ClassVector { s, beta, r }
    }

    /// Convenience constructor from raw parts.
    pub fn from_parts(s: i64, beta: &[i64], r: i64) -> Self {
        ClassVector {
            s,
            beta: CurveClass(beta.to_vec()),
            r,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.s == 0 && self.r == 0 && self.beta.is_zero()
    }

    pub fn add(&self, other: &ClassVector) -> ClassVector {
        ClassVector {
            s: self.s + other.s,
            beta: self.beta.add(&other.beta),
            r: self.r + other.r,
        }
    }

    pub fn sub(&self, other: &ClassVector) -> ClassVector {
        ClassVector {
            s: self.s - other.s,
            beta: self.beta.sub(&other.beta),
            r: self.r - other.r,
        }
    }

    /// The `(n, beta)` index of the class of an object, `v = (-n, -beta, r)`.
    pub fn object_index(&self) -> (i64, CurveClass) {
        (-self.s, self.beta.neg())
    }

    /// Builds the class `(-n, -beta, r)` from an object index.
    pub fn from_object_index(n: i64, beta: &CurveClass, r: i64) -> Self {
        ClassVector {
            s: -n,
            beta: beta.neg(),
            r,
        }
    }
}

impl fmt::Debug for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {:?}, {})", self.s, self.beta, self.r)
    }
}

/// The antisymmetric pairing `chi((s,l,r), (s',l',r')) = r s' - r' s`.
///
/// It vanishes identically on pairs of rank-zero classes.
pub fn euler_pairing(v: &ClassVector, w: &ClassVector) -> i64 {
    v.r * w.s - w.r * v.s
}

/// Level of a nonzero class in the two-step filtration
/// `Z ⊂ Z ⊕ Z^k ⊂ Z ⊕ Z^k ⊕ Z`: 0 for degree-only classes, 1 for
/// rank-zero classes with nonzero curve part, 2 otherwise.
pub fn filtration_level(v: &ClassVector) -> Result<u8> {
    if v.is_zero() {
        return Err(Error::ZeroClass);
    }
    Ok(if v.r != 0 {
        2
    } else if !v.beta.is_zero() {
        1
    } else {
        0
    })
}

/// Rule assigning the integer lower bound `m(beta)` to effective curve
/// classes.
///
/// `m` must satisfy `m(0) = 0` and be nonincreasing along the cone
/// order, which makes the sets `S` and `T` below closed under the
/// required additions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MRule {
    /// `m(beta) = -slope * (sum of components)` with `slope >= 0`.
    Affine { slope: i64 },
    /// Explicit table of values; the zero class is implied to map to 0.
    Table(Vec<(Vec<i64>, i64)>),
}

/// Lattice-wide configuration: the curve rank `k`, the topological
/// Euler characteristic used by the degree-zero closed forms, and the
/// bound rule `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub curve_rank: usize,
    pub chi: i64,
    pub m_rule: MRule,
}

impl LatticeConfig {
    pub fn new(curve_rank: usize, chi: i64, m_rule: MRule) -> Result<Self> {
        if let MRule::Affine { slope } = &m_rule {
            if *slope < 0 {
                return Err(Error::Config(
                    "affine m-rule requires a nonnegative slope".into(),
                ));
            }
        }
        if let MRule::Table(entries) = &m_rule {
            for (beta, value) in entries {
                if beta.len() != curve_rank {
                    return Err(Error::Config(format!(
                        "m-table key {:?} has wrong rank (expected {})",
                        beta, curve_rank
                    )));
                }
                if beta.iter().all(|&c| c == 0) && *value != 0 {
                    return Err(Error::Config("m(0) must be 0".into()));
                }
                if beta.iter().any(|&c| c < 0) {
                    return Err(Error::Config(format!(
                        "m-table key {:?} is not effective",
                        beta
                    )));
                }
            }
        }
        Ok(LatticeConfig {
            curve_rank,
            chi,
            m_rule,
        })
    }

    /// Evaluates `m(beta)` for an effective class, or a configuration
    /// error when the table does not cover it.
    pub fn m_of(&self, beta: &CurveClass) -> Result<i64> {
        if beta.rank() != self.curve_rank {
            return Err(Error::Config(format!(
                "curve class {:?} has wrong rank (expected {})",
                beta, self.curve_rank
            )));
        }
        if !beta.is_effective() {
            return Err(Error::Config(format!(
                "m is only defined on effective classes, got {:?}",
                beta
            )));
        }
        if beta.is_zero() {
            return Ok(0);
        }
        match &self.m_rule {
            MRule::Affine { slope } => Ok(-slope * beta.total()),
            MRule::Table(entries) => entries
                .iter()
                .find(|(k, _)| k == &beta.0)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Config(format!("m undefined for curve class {:?}", beta))),
        }
    }
}

/// Membership in `S = {(n, beta) : beta >= 0, n >= m(beta)}`.
pub fn in_s(cfg: &LatticeConfig, n: i64, beta: &CurveClass) -> Result<bool> {
    if !beta.is_effective() {
        return Ok(false);
    }
    Ok(n >= cfg.m_of(beta)?)
}

/// Membership in `T = {(n, beta) : beta >= 0, n >= 0}`.
pub fn in_t(n: i64, beta: &CurveClass) -> bool {
    beta.is_effective() && n >= 0
}

/// A finite box of object indices: `{(n, beta) : beta <= beta_cut,
/// m(beta) <= n < k_cut}`, with `m` resolved over the whole box at
/// construction time.
///
/// These boxes realize the finite quotients of the completed monoid
/// algebra; all series arithmetic happens inside one of them. The
/// `T`-supported ring is truncated at the extended cut
/// `k_cut - min(m)`: an `S`-index with negative degree pairs against
/// `T`-indices beyond `k_cut`, and the extended cut is exactly what the
/// module action on the box quotient needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub k_cut: i64,
    pub beta_cut: CurveClass,
    t_cut: i64,
    m: BTreeMap<CurveClass, i64>,
}

impl Window {
    /// Builds a window, resolving and validating `m` on every effective
    /// class below `beta_cut`.
    pub fn new(cfg: &LatticeConfig, k_cut: i64, beta_cut: CurveClass) -> Result<Self> {
        if beta_cut.rank() != cfg.curve_rank {
            return Err(Error::Config(format!(
                "beta_cut {:?} has wrong rank (expected {})",
                beta_cut, cfg.curve_rank
            )));
        }
        if !beta_cut.is_effective() {
            return Err(Error::Config("beta_cut must be effective".into()));
        }
        let mut m = BTreeMap::new();
        for beta in effective_box(&beta_cut) {
            let value = cfg.m_of(&beta)?;
            m.insert(beta, value);
        }
        // m must be nonincreasing along the cone order so that the
        // supports satisfy T + T ⊂ T and S + T ⊂ S.
        for (a, ma) in &m {
            for (b, mb) in &m {
                if a.leq(b) && mb > ma {
                    return Err(Error::Config(format!(
                        "m is not nonincreasing: m({:?}) = {} > m({:?}) = {}",
                        b, mb, a, ma
                    )));
                }
            }
        }
        let m_min = m.values().copied().min().unwrap_or(0).min(0);
        Ok(Window {
            k_cut,
            beta_cut,
            t_cut: k_cut - m_min,
            m,
        })
    }

    /// Exclusive degree bound of the `T`-supported ring.
    pub fn t_cut(&self) -> i64 {
        self.t_cut
    }

    pub fn curve_rank(&self) -> usize {
        self.beta_cut.rank()
    }

    /// `m(beta)` for `beta` inside the box.
    pub fn m(&self, beta: &CurveClass) -> Result<i64> {
        self.m
            .get(beta)
            .copied()
            .ok_or_else(|| Error::Config(format!("curve class {:?} outside window box", beta)))
    }

    /// Whether the index is retained for an `S`-supported series.
    pub fn retains_s(&self, n: i64, beta: &CurveClass) -> bool {
        beta.is_effective()
            && beta.leq(&self.beta_cut)
            && n < self.k_cut
            && self.m.get(beta).is_some_and(|&m| n >= m)
    }

    /// Whether the index is retained for a `T`-supported series.
    pub fn retains_t(&self, n: i64, beta: &CurveClass) -> bool {
        beta.is_effective() && beta.leq(&self.beta_cut) && n >= 0 && n < self.t_cut
    }

    /// All retained indices of the given support, sorted.
    pub fn indices(&self, support: Support) -> Vec<(i64, CurveClass)> {
        let mut out = Vec::new();
        for beta in effective_box(&self.beta_cut) {
            let (floor, ceil) = match support {
                Support::S => (*self.m.get(&beta).expect("box covered"), self.k_cut),
                Support::T => (0, self.t_cut),
            };
            for n in floor..ceil {
                out.push((n, beta.clone()));
            }
        }
        out.sort();
        out
    }

    /// Whether this window is contained in `other` (and `m` agrees on
    /// the overlap).
    pub fn is_sub_of(&self, other: &Window) -> bool {
        self.k_cut <= other.k_cut
            && self.beta_cut.leq(&other.beta_cut)
            && self
                .m
                .iter()
                .all(|(beta, value)| other.m.get(beta) == Some(value))
    }
}

/// Both support sets a series can be declared over. `T`-supported
/// series form a commutative ring; `S`-supported series form a module
/// over it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Support {
    T,
    S,
}

/// Enumerates the effective classes below `cut` (inclusive), in
/// lexicographic order.
pub fn effective_box(cut: &CurveClass) -> Vec<CurveClass> {
    let mut out = vec![CurveClass(Vec::with_capacity(cut.rank()))];
    for &hi in &cut.0 {
        let mut next = Vec::new();
        for prefix in &out {
            for c in 0..=hi {
                let mut v = prefix.0.clone();
                v.push(c);
                next.push(CurveClass(v));
            }
        }
        out = next;
    }
    out
}

/// Whether `v` is the class of an object: rank 0 or 1, object index
/// effective, and `(n, beta)` in `T` (rank 0, nonzero) respectively `S`
/// (rank 1), both cut to the window.
pub fn is_realizable(window: &Window, v: &ClassVector) -> bool {
    let (n, beta) = v.object_index();
    match v.r {
        0 => !v.is_zero() && window.retains_t(n, &beta),
        1 => window.retains_s(n, &beta),
        _ => false,
    }
}

/// All ordered `parts`-tuples of realizable window classes summing to
/// `v`, with at most one rank-one part.
///
/// The rank of `v` must be 0 or 1; rank-one targets receive exactly one
/// rank-one part. The window keeps the enumeration finite.
pub fn decompose(window: &Window, v: &ClassVector, parts: usize) -> Result<Vec<Vec<ClassVector>>> {
    if parts == 0 {
        return Err(Error::Config("decompose requires at least one part".into()));
    }
    if v.r != 0 && v.r != 1 {
        return Err(Error::Config(format!(
            "decompose target must have rank 0 or 1, got {}",
            v.r
        )));
    }
    let candidates = realizable_classes(window);
    let mut out = Vec::new();
    let mut partial = Vec::with_capacity(parts);
    decompose_rec(&candidates, v, parts, &mut partial, &mut out);
    Ok(out)
}

/// All realizable classes of a window, sorted: the rank-zero `T`-box
/// classes and the rank-one `S`-box classes.
pub fn realizable_classes(window: &Window) -> Vec<ClassVector> {
    let mut out = Vec::new();
    for (n, beta) in window.indices(Support::T) {
        let v = ClassVector::from_object_index(n, &beta, 0);
        if !v.is_zero() {
            out.push(v);
        }
    }
    for (n, beta) in window.indices(Support::S) {
        out.push(ClassVector::from_object_index(n, &beta, 1));
    }
    out.sort();
    out
}

fn decompose_rec(
    candidates: &[ClassVector],
    target: &ClassVector,
    parts: usize,
    partial: &mut Vec<ClassVector>,
    out: &mut Vec<Vec<ClassVector>>,
) {
    if partial.len() == parts {
        let sum = partial.iter().fold(
            ClassVector::from_parts(0, &vec![0; target.beta.rank()], 0),
            |a, b| a.add(b),
        );
        if &sum == target {
            out.push(partial.clone());
        }
        return;
    }
    let used: ClassVector = partial.iter().fold(
        ClassVector::from_parts(0, &vec![0; target.beta.rank()], 0),
        |a, b| a.add(b),
    );
    let rank_used: i64 = used.r;
    for c in candidates {
        // Effective object indices only ever lower the remaining index,
        // so prune on the cone order and the rank budget.
        if rank_used + c.r > target.r {
            continue;
        }
        let after = used.add(c);
        let (_, rem_beta) = target.sub(&after).object_index();
        if !rem_beta.is_effective() {
            continue;
        }
        partial.push(c.clone());
        decompose_rec(candidates, target, parts, partial, out);
        partial.pop();
    }
}
