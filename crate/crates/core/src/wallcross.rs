//! The combinatorial wall-crossing machinery: the transformation
//! coefficients S and U attached to a pair of phase oracles, labeled
//! tree sums, the change-of-oracle transform for invariant tables, the
//! wall product factors for generating series, and transport of a
//! series along a path of charges.
//!
//! Invariant tables are inputs: the engine validates every relation
//! among invariants rather than computing them from geometry. Missing
//! table entries read as zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::lattice::Support;
use crate::lattice::{euler_pairing, filtration_level, ClassVector, CurveClass, Window};
use crate::series::{factorial, infinite_product, MonoidSeries};
use crate::stability::{
    find_walls, ChargeFn, ChargePath, FiltrationKind, GaussPoly, GaussRational, PhaseOracle,
    RatPoly, Side,
};
use crate::{Error, Result};

/// Sign convention for the transform and the wall product: plain
/// pairing weights, or pairing weights twisted by the parity of the
/// pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Euler,
    Behrend,
}

/// A finite assignment of rational invariants to classes of rank zero
/// or one. Absent classes are read as zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantTable {
    pub mode: Mode,
    entries: BTreeMap<ClassVector, BigRational>,
}

impl InvariantTable {
    pub fn new(mode: Mode) -> Self {
        InvariantTable {
            mode,
            entries: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, v: ClassVector, value: BigRational) -> Result<()> {
        if v.r != 0 && v.r != 1 {
            return Err(Error::Config(format!(
                "invariant tables only carry rank-zero and rank-one classes, got {:?}",
                v
            )));
        }
        if value.is_zero() {
            self.entries.remove(&v);
        } else {
            self.entries.insert(v, value);
        }
        Ok(())
    }

    pub fn get(&self, v: &ClassVector) -> BigRational {
        self.entries
            .get(v)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn entries(&self) -> &BTreeMap<ClassVector, BigRational> {
        &self.entries
    }
}

/// Ordered compositions of `l` into positive block sizes.
fn compositions(l: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, partial: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(partial.clone());
            return;
        }
        for first in 1..=rest {
            partial.push(first);
            rec(rest - first, partial, out);
            partial.pop();
        }
    }
    let mut out = Vec::new();
    if l > 0 {
        rec(l, &mut Vec::new(), &mut out);
    }
    out
}

/// All nondecreasing surjections `{0..l-1} -> {0..lp-1}`, each returned
/// as the image vector. They correspond to compositions of `l` into
/// `lp` blocks, so there are `binomial(l-1, lp-1)` of them.
pub fn nondecr_surjections(l: usize, lp: usize) -> Vec<Vec<usize>> {
    if lp == 0 || lp > l {
        return Vec::new();
    }
    compositions(l)
        .into_iter()
        .filter(|c| c.len() == lp)
        .map(|c| {
            let mut map = Vec::with_capacity(l);
            for (block, size) in c.iter().enumerate() {
                map.extend(std::iter::repeat_n(block, *size));
            }
            map
        })
        .collect()
}

/// The signed sum over nondecreasing surjections out of `{1..l}` of the
/// product of inverse block factorials. Contract: equals `1/l!`.
pub fn surjection_identity_check(l: usize) -> BigRational {
    let mut total = BigRational::zero();
    for c in compositions(l) {
        let lp = c.len();
        let mut term = BigRational::one();
        for size in &c {
            term /= factorial(*size as i64);
        }
        if (l - lp) % 2 == 1 {
            term = -term;
        }
        total += term;
    }
    total
}

/// The weighted count of positions a distinguished part can take:
/// `sum over e of 1 / (2^(l-1) (e-1)! (l-e)!)`. Contract: equals
/// `1/(l-1)!`.
pub fn star_weight_sum(l: usize) -> BigRational {
    let mut total = BigRational::zero();
    let half_pow = BigRational::new(BigInt::one(), BigInt::from(2).pow(l as u32 - 1));
    for e in 1..=l {
        total += &half_pow / (factorial(e as i64 - 1) * factorial((l - e) as i64));
    }
    total
}

fn prefix_sums(vs: &[ClassVector]) -> Vec<ClassVector> {
    let mut out = Vec::with_capacity(vs.len());
    let mut acc: Option<ClassVector> = None;
    for v in vs {
        acc = Some(match acc {
            None => v.clone(),
            Some(a) => a.add(v),
        });
        out.push(acc.clone().unwrap());
    }
    out
}

/// The order-sensitive sign attached to a class sequence and a pair of
/// phase oracles.
///
/// For each adjacent position, either the `tau`-phases are
/// nondecreasing and the `tau_prime`-phases of the complementary
/// partial sums strictly reversed, or the `tau`-phases strictly
/// decrease and the partial-sum phases do not. If some position
/// satisfies neither, the sign is zero; otherwise it is `(-1)^r` with
/// `r` the number of positions of the first kind.
pub fn s_coeff(vs: &[ClassVector], tau: &PhaseOracle, tau_prime: &PhaseOracle) -> Result<i8> {
    if vs.is_empty() {
        return Err(Error::Config("the class sequence must be nonempty".into()));
    }
    let l = vs.len();
    let prefixes = prefix_sums(vs);
    let mut suffix: Option<ClassVector> = None;
    let mut suffixes = vec![ClassVector::from_parts(0, &[], 0); l];
    for i in (0..l).rev() {
        suffix = Some(match suffix {
            None => vs[i].clone(),
            Some(a) => a.add(&vs[i]),
        });
        suffixes[i] = suffix.clone().unwrap();
    }
    let mut r = 0usize;
    for i in 0..l - 1 {
        let ascending = tau.phase_cmp(&vs[i], &vs[i + 1])? != Ordering::Greater;
        let reversed = tau_prime.phase_cmp(&prefixes[i], &suffixes[i + 1])? == Ordering::Greater;
        match (ascending, reversed) {
            (true, true) => r += 1,
            (false, false) => {}
            _ => return Ok(0),
        }
    }
    Ok(if r.is_multiple_of(2) { 1 } else { -1 })
}

/// The rational transformation coefficient attached to a class
/// sequence and a pair of phase oracles: the double sum over
/// nondecreasing surjections merging equal-phase classes under `tau`
/// and equal-phase merged sums under `tau_prime`, of the product of
/// the signs of the merged subsequences, weighted by
/// `(-1)^(m-1)/m` for `m` outer blocks and by inverse factorials of
/// the inner block sizes.
pub fn u_coeff(
    vs: &[ClassVector],
    tau: &PhaseOracle,
    tau_prime: &PhaseOracle,
) -> Result<BigRational> {
    if vs.is_empty() {
        return Err(Error::Config("the class sequence must be nonempty".into()));
    }
    let l = vs.len();
    let mut total = BigRational::zero();
    for psi_blocks in compositions(l) {
        // Equal tau-phases within every block.
        let mut ok = true;
        let mut pos = 0;
        let mut merged: Vec<ClassVector> = Vec::with_capacity(psi_blocks.len());
        'blocks: for size in &psi_blocks {
            let block = &vs[pos..pos + size];
            for w in &block[1..] {
                if tau.phase_cmp(&block[0], w)? != Ordering::Equal {
                    ok = false;
                    break 'blocks;
                }
            }
            merged.push(block[1..].iter().fold(block[0].clone(), |a, b| a.add(b)));
            pos += size;
        }
        if !ok {
            continue;
        }
        let lp = merged.len();
        let mut psi_weight = BigRational::one();
        for size in &psi_blocks {
            psi_weight /= factorial(*size as i64);
        }
        for xi_blocks in compositions(lp) {
            // Equal tau_prime-phases of the outer block sums.
            let mut outer_sums: Vec<ClassVector> = Vec::with_capacity(xi_blocks.len());
            let mut start = 0;
            for size in &xi_blocks {
                let slice = &merged[start..start + size];
                outer_sums.push(slice[1..].iter().fold(slice[0].clone(), |a, b| a.add(b)));
                start += size;
            }
            let mut equal = true;
            for w in &outer_sums[1..] {
                if tau_prime.phase_cmp(&outer_sums[0], w)? != Ordering::Equal {
                    equal = false;
                    break;
                }
            }
            if !equal {
                continue;
            }
            let m = xi_blocks.len();
            let mut sign_product = BigRational::one();
            let mut start = 0;
            let mut vanished = false;
            for size in &xi_blocks {
                let s = s_coeff(&merged[start..start + size], tau, tau_prime)?;
                if s == 0 {
                    vanished = true;
                    break;
                }
                if s < 0 {
                    sign_product = -sign_product;
                }
                start += size;
            }
            if vanished {
                continue;
            }
            let mut outer_weight = BigRational::new(BigInt::one(), BigInt::from(m as i64));
            if m % 2 == 0 {
                outer_weight = -outer_weight;
            }
            total += sign_product * outer_weight * &psi_weight;
        }
    }
    Ok(total)
}

/// Slot of a one-sided wall configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotTag {
    /// The single rank-one class; its phase agrees with the structure
    /// class on both sides.
    RankOne,
    /// A degree class on the wall: above the structure phase on the
    /// plus side, below it on the minus side.
    Wall,
    /// A rank-zero class off the wall whose phase stays above the
    /// structure phase on both sides.
    OffWallAbove,
    /// A rank-zero class off the wall whose phase stays below.
    OffWallBelow,
}

/// A synthetic one-sided configuration at a single wall: a sequence of
/// tagged classes realized by an exact charge that rotates the wall ray
/// through the structure ray at parameter zero. Off-wall classes sit on
/// fixed pairwise-distinct rays.
#[derive(Clone, Debug)]
pub struct WallConfig {
    pub tags: Vec<SlotTag>,
}

impl WallConfig {
    pub fn new(tags: Vec<SlotTag>) -> Result<Self> {
        if tags.is_empty() {
            return Err(Error::Config(
                "a wall configuration needs at least one slot".into(),
            ));
        }
        if tags.iter().filter(|t| **t == SlotTag::RankOne).count() > 1 {
            return Err(Error::Config(
                "a one-sided wall configuration admits at most one rank-one slot".into(),
            ));
        }
        Ok(WallConfig { tags })
    }

    fn off_wall_count(&self) -> usize {
        self.tags
            .iter()
            .filter(|t| matches!(t, SlotTag::OffWallAbove | SlotTag::OffWallBelow))
            .count()
    }

    /// The class sequence of the configuration. Off-wall slots occupy
    /// their own curve-class axes so their rays stay independent.
    pub fn classes(&self) -> Vec<ClassVector> {
        let k = self.off_wall_count();
        let mut axis = 0usize;
        self.tags
            .iter()
            .map(|tag| match tag {
                SlotTag::RankOne => ClassVector::from_parts(0, &vec![0; k], 1),
                SlotTag::Wall => ClassVector::from_parts(-1, &vec![0; k], 0),
                SlotTag::OffWallAbove | SlotTag::OffWallBelow => {
                    let mut beta = vec![0i64; k];
                    beta[axis] = -1;
                    axis += 1;
                    ClassVector::from_parts(-1, &beta, 0)
                }
            })
            .collect()
    }

    /// The one-sided oracle pair `(plus, minus)` realizing the
    /// configuration: the wall ray rotates through the structure ray,
    /// passing from below it to above it as the parameter increases
    /// through zero.
    pub fn oracles(&self) -> Result<(PhaseOracle, PhaseOracle)> {
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let z1 = GaussRational::from_ints(-1, 1, 1, 1);
        // Value of the wall generator (-1, 0, 0) is z1 (1 + i t):
        // c_s = -z1 (1 + i t).
        let c_s = GaussPoly {
            re: RatPoly(vec![q(1, 1), q(1, 1)]),
            im: RatPoly(vec![q(-1, 1), q(1, 1)]),
        };
        let mut c_beta = Vec::new();
        let mut axis = 0usize;
        for tag in &self.tags {
            let rotation = match tag {
                SlotTag::OffWallAbove => Some(q(1, axis as i64 + 2)),
                SlotTag::OffWallBelow => Some(-q(1, axis as i64 + 2)),
                _ => None,
            };
            if let Some(rot) = rotation {
                // Fixed ray z1 (1 + i rot) for the class (-1, -e_axis, 0):
                // its value is -c_s - c_beta[axis], so
                // c_beta[axis] = -c_s - z1 (1 + i rot).
                let target = GaussRational::new(&z1.re - &z1.im * &rot, &z1.im + &z1.re * &rot);
                let minus_target = GaussPoly::constant(&target.neg());
                c_beta.push(minus_target.add(&GaussPoly {
                    re: c_s.re.neg(),
                    im: c_s.im.neg(),
                }));
                axis += 1;
            }
        }
        let charge = ChargeFn {
            filt: FiltrationKind::RankSplit,
            c_s,
            c_beta,
            c_r: GaussPoly::constant(&z1),
        };
        Ok((
            PhaseOracle {
                charge: charge.clone(),
                side: Side::Above,
            },
            PhaseOracle {
                charge,
                side: Side::Below,
            },
        ))
    }
}

/// The one-sided limits of the two coefficients on a synthetic wall
/// configuration: `tau` is the plus side, `tau_prime` the minus side.
pub fn limit_coeffs(config: &WallConfig) -> Result<(i8, BigRational)> {
    let classes = config.classes();
    let (plus, minus) = config.oracles()?;
    let s = s_coeff(&classes, &plus, &minus)?;
    let u = u_coeff(&classes, &plus, &minus)?;
    Ok((s, u))
}

/// Closed form for the one-sided sign, where one is known: all slots on
/// the wall, or exactly one rank-one slot among wall slots (zero as
/// soon as an off-wall slot is present next to a rank-one slot).
pub fn s_limit_closed(tags: &[SlotTag]) -> Option<i8> {
    let l = tags.len();
    let rank_ones: Vec<usize> = tags
        .iter()
        .enumerate()
        .filter(|(_, t)| **t == SlotTag::RankOne)
        .map(|(i, _)| i)
        .collect();
    let off_wall = tags
        .iter()
        .any(|t| matches!(t, SlotTag::OffWallAbove | SlotTag::OffWallBelow));
    match rank_ones.len() {
        0 => {
            if off_wall {
                None
            } else {
                Some(if l == 1 { 1 } else { 0 })
            }
        }
        1 => {
            if off_wall {
                Some(0)
            } else {
                let e = rank_ones[0] + 1;
                if e <= 2 {
                    Some(if (l - e).is_multiple_of(2) { 1 } else { -1 })
                } else {
                    Some(0)
                }
            }
        }
        _ => None,
    }
}

/// Closed form for the one-sided rational coefficient in the mixed
/// case: one rank-one slot at position `e` among wall slots gives
/// `(-1)^(l-e) / ((e-1)! (l-e)!)`; an off-wall slot forces zero.
pub fn u_limit_closed(tags: &[SlotTag]) -> Option<BigRational> {
    let l = tags.len();
    let rank_ones: Vec<usize> = tags
        .iter()
        .enumerate()
        .filter(|(_, t)| **t == SlotTag::RankOne)
        .map(|(i, _)| i)
        .collect();
    if rank_ones.len() != 1 {
        return None;
    }
    let off_wall = tags
        .iter()
        .any(|t| matches!(t, SlotTag::OffWallAbove | SlotTag::OffWallBelow));
    if off_wall {
        return Some(BigRational::zero());
    }
    let e = rank_ones[0] + 1;
    let mut out = (factorial(e as i64 - 1) * factorial((l - e) as i64)).recip();
    if (l - e) % 2 == 1 {
        out = -out;
    }
    Some(out)
}

/// The pair of one-sided oracles at the single wall of the
/// degree-versus-rank family: the degree ray rotates through the
/// structure ray at parameter zero. The plus side is the chamber where
/// rank-one semistables are pair-like, the minus side the chamber where
/// they are ideal-like.
pub fn dtpt_limit_oracles(curve_rank: usize) -> (PhaseOracle, PhaseOracle) {
    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let z1 = GaussRational::from_ints(-1, 1, 1, 1);
    let c_s = GaussPoly {
        re: RatPoly(vec![q(1, 1), q(1, 1)]),
        im: RatPoly(vec![q(-1, 1), q(1, 1)]),
    };
    let c_beta = (0..curve_rank)
        .map(|_| GaussPoly::constant(&GaussRational::from_ints(0, 1, -1, 1)))
        .collect();
    let charge = ChargeFn {
        filt: FiltrationKind::Hook,
        c_s,
        c_beta,
        c_r: GaussPoly::constant(&z1),
    };
    (
        PhaseOracle {
            charge: charge.clone(),
            side: Side::Above,
        },
        PhaseOracle {
            charge,
            side: Side::Below,
        },
    )
}

/// A labeled tree on `{0..l-1}` with edges oriented from the smaller
/// label to the larger.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedTree {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

/// All labeled trees on `l` vertices, enumerated through their Prufer
/// sequences; `l^(l-2)` of them for `l >= 2`. Capped at `l <= 8`.
pub fn trees(l: usize) -> Result<Vec<OrientedTree>> {
    if l == 0 {
        return Err(Error::Config("trees need at least one vertex".into()));
    }
    if l > 8 {
        return Err(Error::Budget(format!(
            "tree enumeration above 8 vertices is not supported, got {}",
            l
        )));
    }
    if l == 1 {
        return Ok(vec![OrientedTree {
            vertices: 1,
            edges: Vec::new(),
        }]);
    }
    let mut out = Vec::new();
    let mut seq = vec![0usize; l - 2];
    loop {
        out.push(decode_tree(l, &seq));
        // advance the base-l counter
        let mut i = 0;
        loop {
            if i == seq.len() {
                return Ok(out);
            }
            seq[i] += 1;
            if seq[i] < l {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

fn decode_tree(l: usize, seq: &[usize]) -> OrientedTree {
    let mut degree = vec![1usize; l];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(l - 1);
    let mut used = vec![false; l];
    for &s in seq {
        let leaf = (0..l).find(|&i| degree[i] == 1 && !used[i]).expect("leaf");
        used[leaf] = true;
        degree[s] -= 1;
        edges.push((leaf.min(s), leaf.max(s)));
    }
    let rest: Vec<usize> = (0..l).filter(|&i| !used[i] && degree[i] == 1).collect();
    edges.push((rest[0].min(rest[1]), rest[0].max(rest[1])));
    edges.sort();
    OrientedTree { vertices: l, edges }
}

fn edge_weight(mode: Mode, vi: &ClassVector, vj: &ClassVector) -> BigRational {
    let chi = euler_pairing(vi, vj);
    let base = BigRational::from(BigInt::from(chi));
    match mode {
        Mode::Euler => base,
        Mode::Behrend => {
            if chi.rem_euclid(2) == 0 {
                base
            } else {
                -base
            }
        }
    }
}

/// Sum over all labeled trees of the product of oriented edge weights.
fn tree_sum(tuple: &[ClassVector], mode: Mode, tree_cache: &[OrientedTree]) -> BigRational {
    let mut total = BigRational::zero();
    'trees: for tree in tree_cache {
        let mut prod = BigRational::one();
        for &(i, j) in &tree.edges {
            let w = edge_weight(mode, &tuple[i], &tuple[j]);
            if w.is_zero() {
                continue 'trees;
            }
            prod *= w;
        }
        total += prod;
    }
    total
}

/// Enumeration budget for the transform.
#[derive(Clone, Copy, Debug)]
pub struct TransformBudget {
    /// Hard cap on the number of parts of a decomposition; the window
    /// must provably keep every decomposition within it.
    pub max_parts: usize,
}

impl Default for TransformBudget {
    fn default() -> Self {
        TransformBudget { max_parts: 8 }
    }
}

/// The change-of-oracle transform of an invariant table at `v`: the sum
/// over ordered decompositions of `v` into table classes inside the
/// window, weighted by the rational coefficient of the decomposition,
/// the tree sum of pairing weights, the product of table values, and
/// `1/2^(l-1)`.
///
/// Decompositions over classes outside the table support contribute
/// nothing, since their table value is zero; restricting candidates to
/// the support is therefore exact. The budget errors out exactly when a
/// genuinely completable decomposition would exceed the part cap.
pub fn transform(
    table: &InvariantTable,
    mode: Mode,
    v: &ClassVector,
    tau: &PhaseOracle,
    tau_prime: &PhaseOracle,
    window: &Window,
    budget: &TransformBudget,
) -> Result<BigRational> {
    if mode != table.mode {
        return Err(Error::ModeMismatch);
    }
    if v.r != 0 && v.r != 1 {
        return Err(Error::Config(format!(
            "transform targets must have rank 0 or 1, got {:?}",
            v
        )));
    }
    let candidates: Vec<ClassVector> = table
        .entries()
        .keys()
        .filter(|c| crate::lattice::is_realizable(window, c))
        .cloned()
        .collect();
    // Every realizable rank-zero class has weight at least one under
    // n + m_scale * |beta| and rank-one classes have nonnegative
    // weight, so reachability recursion terminates.
    let m_min = window
        .indices(Support::S)
        .iter()
        .map(|(n, _)| *n)
        .min()
        .unwrap_or(0)
        .min(0);
    let mut run = TransformRun {
        table,
        mode,
        tau,
        tau_prime,
        candidates,
        max_parts: budget.max_parts,
        m_scale: 1 - m_min,
        reachable: std::collections::HashMap::new(),
        tree_cache: vec![None; budget.max_parts + 1],
        partial: Vec::new(),
        total: BigRational::zero(),
    };
    run.descend(v)?;
    Ok(run.total)
}

struct TransformRun<'a> {
    table: &'a InvariantTable,
    mode: Mode,
    tau: &'a PhaseOracle,
    tau_prime: &'a PhaseOracle,
    candidates: Vec<ClassVector>,
    max_parts: usize,
    m_scale: i64,
    reachable: std::collections::HashMap<ClassVector, bool>,
    tree_cache: Vec<Option<Vec<OrientedTree>>>,
    partial: Vec<ClassVector>,
    total: BigRational,
}

impl TransformRun<'_> {
    fn weight(&self, c: &ClassVector) -> i64 {
        let (n, beta) = c.object_index();
        n + self.m_scale * beta.0.iter().map(|b| b.abs()).sum::<i64>()
    }

    /// Whether `rem` is a sum of zero or more candidate classes,
    /// memoized. Rank-zero candidates have positive weight and the
    /// single rank-one candidate nonnegative weight, so the recursion
    /// is well founded.
    fn completable(&mut self, rem: &ClassVector) -> bool {
        if rem.is_zero() {
            return true;
        }
        if rem.r < 0 || rem.r > 1 {
            return false;
        }
        let (_, beta) = rem.object_index();
        if !beta.is_effective() {
            return false;
        }
        if self.weight(rem) < i64::from(rem.r == 0) {
            return false;
        }
        if let Some(&known) = self.reachable.get(rem) {
            return known;
        }
        // Well founded: rank-zero candidates strictly decrease the
        // weight, and a rank-one candidate strictly decreases the rank.
        let candidates = self.candidates.clone();
        let mut ok = false;
        for c in &candidates {
            if c.r > rem.r {
                continue;
            }
            if self.completable(&rem.sub(c)) {
                ok = true;
                break;
            }
        }
        self.reachable.insert(rem.clone(), ok);
        ok
    }

    fn descend(&mut self, remaining: &ClassVector) -> Result<()> {
        if remaining.is_zero() && !self.partial.is_empty() {
            return self.emit();
        }
        if !self.completable(remaining) {
            return Ok(());
        }
        if self.partial.len() >= self.max_parts {
            // A continuation is feasible here, so stopping would
            // silently truncate the sum.
            return Err(Error::Budget(format!(
                "a decomposition needs more than {} parts",
                self.max_parts
            )));
        }
        let candidates = self.candidates.clone();
        for c in &candidates {
            if c.r > remaining.r {
                continue;
            }
            self.partial.push(c.clone());
            self.descend(&remaining.sub(c))?;
            self.partial.pop();
        }
        Ok(())
    }

    fn emit(&mut self) -> Result<()> {
        let l = self.partial.len();
        let u = u_coeff(&self.partial, self.tau, self.tau_prime)?;
        if u.is_zero() {
            return Ok(());
        }
        if self.tree_cache[l].is_none() {
            self.tree_cache[l] = Some(trees(l)?);
        }
        let t = tree_sum(
            &self.partial,
            self.mode,
            self.tree_cache[l].as_ref().unwrap(),
        );
        if t.is_zero() {
            return Ok(());
        }
        let mut term = u * t;
        for c in &self.partial {
            term *= self.table.get(c);
        }
        term /= BigRational::from(BigInt::from(2).pow(l as u32 - 1));
        self.total += term;
        Ok(())
    }
}

/// Verifies that a rank-zero-supported table is fixed by the transform
/// between every consecutive pair of oracle points: the pairing
/// vanishes on rank-zero pairs, so every multi-part decomposition drops
/// out of the sum.
pub fn nhat_invariance_check(
    table: &InvariantTable,
    v: &ClassVector,
    oracle_points: &[PhaseOracle],
    window: &Window,
    budget: &TransformBudget,
) -> Result<bool> {
    if filtration_level(v)? != 0 {
        return Err(Error::Config(
            "invariance is asserted for degree classes".into(),
        ));
    }
    let expected = table.get(v);
    for pair in oracle_points.windows(2) {
        let forward = transform(table, table.mode, v, &pair[0], &pair[1], window, budget)?;
        let backward = transform(table, table.mode, v, &pair[1], &pair[0], window, budget)?;
        if forward != expected || backward != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Closed form for the degree-axis wall invariants:
/// `chi * sum of 1/r^2 over divisors r of n`, negated in the twisted
/// mode.
pub fn nhat_closed_form(n: i64, chi: i64, mode: Mode) -> Result<BigRational> {
    if n < 1 {
        return Err(Error::Config(format!(
            "degree-axis invariants are indexed by n >= 1, got {}",
            n
        )));
    }
    let mut total = BigRational::zero();
    for r in 1..=n {
        if n % r == 0 {
            total += BigRational::new(BigInt::from(chi), BigInt::from(r * r));
        }
    }
    Ok(match mode {
        Mode::Euler => total,
        Mode::Behrend => -total,
    })
}

/// Verifies that the coefficients of `log M(x)^chi` match
/// `n * nhat_closed_form(n)` over the whole ring-side degree range.
pub fn nhat_log_macmahon_check(window: &Window, chi: i64) -> Result<bool> {
    let m = crate::series::macmahon(window, 1, chi)?;
    let lm = m.log()?;
    let zero_beta = CurveClass::zero(window.curve_rank());
    for n in 1..window.t_cut() {
        let expected = nhat_closed_form(n, chi, Mode::Euler)? * BigRational::from(BigInt::from(n));
        if lm.get(n, &zero_beta) != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The wall product factor: the product over wall classes of
/// `exp(w x^n y^beta)`, with `w = n * N(n, beta)` in the plain mode and
/// `w = (-1)^(n-1) n * N(n, beta)` in the twisted mode. Missing table
/// values contribute the trivial factor; indices outside the window are
/// projected away.
pub fn wall_product(
    n_table: &BTreeMap<(i64, CurveClass), BigRational>,
    wall_classes: &[ClassVector],
    mode: Mode,
    window: &Window,
) -> Result<MonoidSeries> {
    let mut factors = Vec::new();
    for v in wall_classes {
        if v.is_zero() || v.r != 0 {
            return Err(Error::Config(format!(
                "wall classes must be nonzero with rank zero, got {:?}",
                v
            )));
        }
        let (n, beta) = v.object_index();
        if !crate::lattice::in_t(n, &beta) {
            return Err(Error::SupportViolation(format!(
                "wall class index ({}, {:?}) is not in the rank-zero cone",
                n, beta
            )));
        }
        if !window.retains_t(n, &beta) {
            continue;
        }
        let value = match n_table.get(&(n, beta.clone())) {
            Some(v) => v.clone(),
            None => continue,
        };
        let mut w = value * BigRational::from(BigInt::from(n));
        if mode == Mode::Behrend && n.rem_euclid(2) == 0 {
            w = -w;
        }
        if w.is_zero() {
            continue;
        }
        let mono = MonoidSeries::monomial(window.clone(), Support::T, n, beta, w)?;
        factors.push(mono.exp()?);
    }
    infinite_product(window.clone(), factors)
}

/// Transports a series along a path of charges: at each transversal
/// crossing the wall product of the crossing classes is multiplied in
/// with the crossing sign as exponent. The result does not depend on
/// how the path is subdivided.
pub fn path_transport(
    series: &MonoidSeries,
    path: &ChargePath,
    n_table: &BTreeMap<(i64, CurveClass), BigRational>,
    mode: Mode,
) -> Result<MonoidSeries> {
    let window = series.window().clone();
    let zero_beta = CurveClass::zero(window.curve_rank());
    let classes: Vec<ClassVector> = (1..window.t_cut().max(1))
        .map(|n| ClassVector::from_object_index(n, &zero_beta, 0))
        .collect();
    let crossings = find_walls(path, &classes)?;
    let mut out = series.clone();
    for crossing in crossings {
        let factor = wall_product(n_table, &crossing.classes, mode, &window)?;
        out = if crossing.epsilon >= 0 {
            out.mul(&factor)?
        } else {
            out.divide(&factor)?
        };
    }
    Ok(out)
}

/// Input of the self-consistency pipeline: a window, a pair-side table
/// with trivial degree axis, a degree-axis wall-invariant table, and an
/// optional path. The ideal-side series is synthesized as the
/// pair-side series times the wall product, transported across the
/// single wall, and compared back.
#[derive(Clone, Debug)]
pub struct DtptConfig {
    pub window: Window,
    pub mode: Mode,
    pub pt_entries: Vec<(i64, CurveClass, BigRational)>,
    pub n_table: BTreeMap<(i64, CurveClass), BigRational>,
    pub path: Option<ChargePath>,
}

/// Outcome of the pipeline: named sub-checks and the first mismatching
/// index of the quotient comparison, when any.
#[derive(Clone, Debug)]
pub struct DtptReport {
    pub ok: bool,
    pub crossings: usize,
    pub checks: Vec<(String, bool)>,
    pub first_mismatch: Option<(i64, CurveClass)>,
}

/// Runs the pipeline: build the ideal-side series from the pair side,
/// verify that dividing by its degree axis recovers the pair side, and
/// verify that path transport across the wall and back reproduces both
/// series exactly.
pub fn dtpt_check(cfg: &DtptConfig) -> Result<DtptReport> {
    let window = &cfg.window;
    let pt = MonoidSeries::from_coeffs(window.clone(), Support::S, cfg.pt_entries.clone())?;
    if !pt.constant_term().is_one() {
        return Err(Error::Config(
            "the pair-side series must have constant term 1".into(),
        ));
    }
    let pt_axis = pt.degree_axis();
    if pt_axis != MonoidSeries::one(window.clone(), Support::S) {
        return Err(Error::Config(
            "the pair-side series must have trivial degree axis".into(),
        ));
    }
    let zero_beta = CurveClass::zero(window.curve_rank());
    let wall_classes: Vec<ClassVector> = (1..window.t_cut().max(1))
        .map(|n| ClassVector::from_object_index(n, &zero_beta, 0))
        .collect();
    let factor = wall_product(&cfg.n_table, &wall_classes, cfg.mode, window)?;
    let dt = pt.mul(&factor)?;
    // The degree axis of the ideal-side series determines the divisor
    // on the degrees the box can see; the wall product supplies the
    // ring-side tail beyond the box that exact division needs.
    let dt0 = dt.degree_axis();
    let axis_matches =
        (0..window.k_cut.max(0)).all(|n| dt0.get(n, &zero_beta) == factor.get(n, &zero_beta));
    let mut checks = Vec::new();
    checks.push(("degree_axis_equals_wall_product".to_string(), axis_matches));
    let quotient = dt.divide(&factor)?;
    let quotient_ok = quotient == pt;
    let first_mismatch = if quotient_ok {
        None
    } else {
        pt.window()
            .indices(Support::S)
            .into_iter()
            .find(|(n, beta)| quotient.get(*n, beta) != pt.get(*n, beta))
    };
    checks.push(("quotient_equals_pair_side".to_string(), quotient_ok));
    let path = match &cfg.path {
        Some(p) => p.clone(),
        None => default_dtpt_path(window.curve_rank())?,
    };
    let crossings = find_walls(&path, &wall_classes)?;
    let transported = path_transport(&dt, &path, &cfg.n_table, cfg.mode)?;
    checks.push(("transport_reaches_pair_side".to_string(), transported == pt));
    let back = path_transport(&transported, &path.reversed(), &cfg.n_table, cfg.mode)?;
    checks.push((
        "reverse_transport_restores_ideal_side".to_string(),
        back == dt,
    ));
    let ok = checks.iter().all(|(_, pass)| *pass);
    Ok(DtptReport {
        ok,
        crossings: crossings.len(),
        checks,
        first_mismatch,
    })
}

/// The canonical two-keyframe path from the ideal-side chamber to the
/// pair-side chamber, crossing the single wall once.
pub fn default_dtpt_path(curve_rank: usize) -> Result<ChargePath> {
    let one = BigRational::one();
    let start = crate::stability::XiCharge::new(
        GaussRational::from_ints(-1, 1, 2, 1),
        vec![one.clone(); curve_rank],
        GaussRational::from_ints(-1, 1, 1, 1),
    )?;
    let end = crate::stability::XiCharge::new(
        GaussRational::from_ints(-2, 1, 1, 1),
        vec![one; curve_rank],
        GaussRational::from_ints(-1, 1, 1, 1),
    )?;
    ChargePath::new(vec![start, end])
}
