//! A desk-scale abelian category: finite-dimensional representations
//! of a small acyclic quiver over a small prime field.
//!
//! Subobjects are enumerable by brute force, so semistability against a
//! weak stability function and Harder-Narasimhan filtrations can be
//! computed and cross-checked exhaustively. Representations live over
//! `F_2` or `F_3` so the subobject lattice is finite; stability is a
//! linear-algebra condition that does not see the coefficient field at
//! this scale.

use std::cmp::Ordering;

use crate::stability::{phase_cmp, GaussRational};
use crate::{Error, Result};

/// Default cap on the total dimension of a representation fed to the
/// brute-force enumerations.
pub const DEFAULT_DIM_BOUND: usize = 6;

/// A dense matrix over `F_p`, row major.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MatFp {
    pub p: u8,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u8>,
}

impl MatFp {
    pub fn zero(p: u8, rows: usize, cols: usize) -> Self {
        MatFp {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u8, n: usize) -> Self {
        let mut m = Self::zero(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(p: u8, cols: usize, rows: &[Vec<u8>]) -> Self {
        let mut m = Self::zero(p, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v % p);
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn mul(&self, other: &MatFp) -> MatFp {
        assert_eq!(self.cols, other.rows);
        let mut out = MatFp::zero(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v =
                        (out.get(i, j) as u16 + a as u16 * other.get(k, j) as u16) % self.p as u16;
                    out.data[i * out.cols + j] = v as u8;
                }
            }
        }
        out
    }

    fn inv_scalar(p: u8, a: u8) -> u8 {
        for x in 1..p {
            if (a as u16 * x as u16) % p as u16 == 1 {
                return x;
            }
        }
        unreachable!("nonzero element of a prime field is invertible")
    }

    /// Reduced row echelon form in place; returns the rank.
    pub fn rref_in_place(&mut self) -> usize {
        let p = self.p as u16;
        let mut pivot_row = 0;
        for col in 0..self.cols {
            let Some(src) = (pivot_row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            for j in 0..self.cols {
                self.data
                    .swap(pivot_row * self.cols + j, src * self.cols + j);
            }
            let inv = Self::inv_scalar(self.p, self.get(pivot_row, col)) as u16;
            for j in 0..self.cols {
                let v = (self.get(pivot_row, j) as u16 * inv) % p;
                self.data[pivot_row * self.cols + j] = v as u8;
            }
            for r in 0..self.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = self.get(r, col) as u16;
                if factor == 0 {
                    continue;
                }
                for j in 0..self.cols {
                    let v =
                        (self.get(r, j) as u16 + (p - factor) * self.get(pivot_row, j) as u16) % p;
                    self.data[r * self.cols + j] = v as u8;
                }
            }
            pivot_row += 1;
            if pivot_row == self.rows {
                break;
            }
        }
        pivot_row
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place()
    }

    /// Inverse of a square invertible matrix, by Gauss-Jordan on the
    /// augmented matrix.
    pub fn inverse(&self) -> Result<MatFp> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = MatFp::zero(self.p, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let rank = aug.rref_in_place();
        if rank < n {
            return Err(Error::Internal("matrix is singular".into()));
        }
        let mut out = MatFp::zero(self.p, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j));
            }
        }
        Ok(out)
    }

    /// Rows with any nonzero entry.
    fn nonzero_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .filter(|row| row.iter().any(|&v| v != 0))
            .collect()
    }
}

/// Canonical basis (rref rows) of the row span of the given rows.
fn row_span(p: u8, cols: usize, rows: &[Vec<u8>]) -> MatFp {
    let mut m = MatFp::from_rows(p, cols, rows);
    m.rref_in_place();
    MatFp::from_rows(p, cols, &m.nonzero_rows())
}

/// Whether `vector` lies in the row span of the rref matrix `span`.
fn in_span(span: &MatFp, vector: &[u8]) -> bool {
    let mut rows = span.nonzero_rows();
    rows.push(vector.to_vec());
    row_span(span.p, span.cols, &rows).rows == span.rows
}

/// All subspaces of `F_p^d` as rref basis matrices, found by closing
/// the zero subspace under one-vector extensions.
fn all_subspaces(p: u8, d: usize) -> Vec<MatFp> {
    let vectors: Vec<Vec<u8>> = {
        let mut out = vec![vec![]];
        for _ in 0..d {
            let mut next = Vec::new();
            for v in &out {
                for c in 0..p {
                    let mut w = v.clone();
                    w.push(c);
                    next.push(w);
                }
            }
            out = next;
        }
        out.into_iter()
            .filter(|v| v.iter().any(|&c| c != 0))
            .collect()
    };
    let mut seen = std::collections::BTreeSet::new();
    let zero = MatFp::from_rows(p, d, &[]);
    seen.insert(zero.clone());
    let mut frontier = vec![zero];
    let mut out = Vec::new();
    while let Some(space) = frontier.pop() {
        out.push(space.clone());
        if space.rows == d {
            continue;
        }
        for v in &vectors {
            if in_span(&space, v) {
                continue;
            }
            let mut rows = space.nonzero_rows();
            rows.push(v.clone());
            let bigger = row_span(p, d, &rows);
            if seen.insert(bigger.clone()) {
                frontier.push(bigger);
            }
        }
    }
    out.sort();
    out
}

/// A small acyclic quiver: arrows always point from a lower vertex to a
/// higher one, so the path algebra is finite dimensional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub vertex_count: usize,
    pub arrows: Vec<(usize, usize)>,
}

impl Quiver {
    pub fn new(vertex_count: usize, arrows: Vec<(usize, usize)>) -> Result<Self> {
        for &(s, t) in &arrows {
            if s >= t || t >= vertex_count {
                return Err(Error::Config(format!(
                    "arrow ({}, {}) violates source < target < vertex count",
                    s, t
                )));
            }
        }
        Ok(Quiver {
            vertex_count,
            arrows,
        })
    }

    /// The linear quiver `0 -> 1 -> ... -> n-1`.
    pub fn linear(n: usize) -> Self {
        Quiver {
            vertex_count: n,
            arrows: (1..n).map(|i| (i - 1, i)).collect(),
        }
    }
}

/// A finite-dimensional representation: one vector space dimension per
/// vertex and one matrix per arrow, acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverRep {
    pub quiver: Quiver,
    pub p: u8,
    pub dims: Vec<usize>,
    /// `maps[a]` has shape `dims[target] x dims[source]`.
    pub maps: Vec<MatFp>,
}

impl QuiverRep {
    pub fn new(quiver: Quiver, p: u8, dims: Vec<usize>, maps: Vec<MatFp>) -> Result<Self> {
        if p != 2 && p != 3 {
            return Err(Error::Config(
                "the coefficient field must be F_2 or F_3".into(),
            ));
        }
        if dims.len() != quiver.vertex_count || maps.len() != quiver.arrows.len() {
            return Err(Error::Config(
                "representation data sizes do not match the quiver".into(),
            ));
        }
        for (m, &(s, t)) in maps.iter().zip(&quiver.arrows) {
            if m.rows != dims[t] || m.cols != dims[s] || m.p != p {
                return Err(Error::Config(format!(
                    "matrix for arrow ({}, {}) has wrong shape or field",
                    s, t
                )));
            }
        }
        Ok(QuiverRep {
            quiver,
            p,
            dims,
            maps,
        })
    }

    /// The simple representation supported at one vertex.
    pub fn simple(quiver: Quiver, p: u8, vertex: usize) -> Result<Self> {
        let mut dims = vec![0; quiver.vertex_count];
        dims[vertex] = 1;
        let maps = quiver
            .arrows
            .iter()
            .map(|&(s, t)| MatFp::zero(p, dims[t], dims[s]))
            .collect();
        QuiverRep::new(quiver, p, dims, maps)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// The class of the representation: its dimension vector.
    pub fn class(&self) -> Vec<usize> {
        self.dims.clone()
    }
}

/// Weak stability data: one direction in the closed upper half plane
/// minus zero per simple object, and one filtration level per simple.
/// The charge of a class only sees the vertices at its top occupied
/// level.
#[derive(Clone, Debug)]
pub struct WeakStabilityFn {
    pub directions: Vec<GaussRational>,
    pub levels: Vec<u8>,
}

impl WeakStabilityFn {
    pub fn new(directions: Vec<GaussRational>, levels: Vec<u8>) -> Result<Self> {
        if directions.len() != levels.len() {
            return Err(Error::Config(
                "directions and levels must have equal length".into(),
            ));
        }
        for u in &directions {
            if !u.in_heart() {
                return Err(Error::Config(
                    "every direction must lie in the upper half plane minus zero".into(),
                ));
            }
        }
        Ok(WeakStabilityFn { directions, levels })
    }

    /// Identity grading: vertex `j` sits at level `j`.
    pub fn graded(directions: Vec<GaussRational>) -> Result<Self> {
        let levels = (0..directions.len()).map(|j| j as u8).collect();
        Self::new(directions, levels)
    }
}

/// Charge of a nonzero class: the direction-weighted sum over the
/// vertices at the top occupied level.
pub fn charge_of_class(dims: &[usize], z: &WeakStabilityFn) -> Result<GaussRational> {
    if dims.len() != z.directions.len() {
        return Err(Error::Config(
            "class length does not match the stability data".into(),
        ));
    }
    let top = dims
        .iter()
        .zip(&z.levels)
        .filter(|(d, _)| **d > 0)
        .map(|(_, l)| *l)
        .max()
        .ok_or(Error::ZeroClass)?;
    let mut out = GaussRational::zero();
    for ((d, l), u) in dims.iter().zip(&z.levels).zip(&z.directions) {
        if *l == top && *d > 0 {
            out = out.add(&u.scale_int(*d as i64));
        }
    }
    Ok(out)
}

/// Charge of a nonzero representation.
pub fn charge_of(rep: &QuiverRep, z: &WeakStabilityFn) -> Result<GaussRational> {
    charge_of_class(&rep.dims, z)
}

/// A subrepresentation, recorded as one rref basis per vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubRep {
    pub dims: Vec<usize>,
    pub basis: Vec<MatFp>,
}

impl SubRep {
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
}

/// Exhaustive list of subrepresentations: tuples of subspaces closed
/// under every arrow map, including the zero and full ones.
pub fn all_subreps(rep: &QuiverRep, bound: usize) -> Result<Vec<SubRep>> {
    if rep.total_dim() > bound {
        return Err(Error::Budget(format!(
            "total dimension {} exceeds the enumeration bound {}",
            rep.total_dim(),
            bound
        )));
    }
    let per_vertex: Vec<Vec<MatFp>> = rep.dims.iter().map(|&d| all_subspaces(rep.p, d)).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; rep.quiver.vertex_count.max(1)];
    if rep.quiver.vertex_count == 0 {
        return Ok(out);
    }
    'outer: loop {
        let basis: Vec<&MatFp> = choice
            .iter()
            .enumerate()
            .map(|(v, &i)| &per_vertex[v][i])
            .collect();
        let closed = rep.quiver.arrows.iter().zip(&rep.maps).all(|(&(s, t), m)| {
            (0..basis[s].rows).all(|i| {
                let col = &basis[s].data[i * basis[s].cols..(i + 1) * basis[s].cols];
                let mut image = vec![0u8; rep.dims[t]];
                for (r, img) in image.iter_mut().enumerate() {
                    let mut acc = 0u16;
                    for (c, &x) in col.iter().enumerate() {
                        acc = (acc + m.get(r, c) as u16 * x as u16) % rep.p as u16;
                    }
                    *img = acc as u8;
                }
                in_span(basis[t], &image)
            })
        });
        if closed {
            out.push(SubRep {
                dims: basis.iter().map(|b| b.rows).collect(),
                basis: basis.into_iter().cloned().collect(),
            });
        }
        for v in 0..choice.len() {
            choice[v] += 1;
            if choice[v] < per_vertex[v].len() {
                continue 'outer;
            }
            choice[v] = 0;
        }
        break;
    }
    out.sort();
    Ok(out)
}

/// Change-of-basis columns at each vertex: the sub basis extended by
/// standard vectors to a full basis.
fn extension_matrices(rep: &QuiverRep, sub: &SubRep) -> Result<Vec<MatFp>> {
    let mut out = Vec::new();
    for (v, b) in sub.basis.iter().enumerate() {
        let d = rep.dims[v];
        let mut rows = b.nonzero_rows();
        for i in 0..d {
            let mut e = vec![0u8; d];
            e[i] = 1;
            if !in_span(&row_span(rep.p, d, &rows), &e) {
                rows.push(e);
            }
        }
        if rows.len() != d {
            return Err(Error::Internal("basis extension failed".into()));
        }
        let mut s = MatFp::zero(rep.p, d, d);
        for (j, row) in rows.iter().enumerate() {
            for (i, &x) in row.iter().enumerate() {
                s.set(i, j, x);
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// The subobject carried by a subrepresentation, in its own basis.
pub fn sub_rep(rep: &QuiverRep, sub: &SubRep) -> Result<QuiverRep> {
    let s = extension_matrices(rep, sub)?;
    let mut maps = Vec::new();
    for (a, &(src, tgt)) in rep.quiver.arrows.iter().enumerate() {
        let conj = s[tgt].inverse()?.mul(&rep.maps[a]).mul(&s[src]);
        let mut m = MatFp::zero(rep.p, sub.dims[tgt], sub.dims[src]);
        for i in 0..sub.dims[tgt] {
            for j in 0..sub.dims[src] {
                m.set(i, j, conj.get(i, j));
            }
        }
        maps.push(m);
    }
    QuiverRep::new(rep.quiver.clone(), rep.p, sub.dims.clone(), maps)
}

/// The quotient by a subrepresentation, in the complement coordinates.
pub fn quotient_rep(rep: &QuiverRep, sub: &SubRep) -> Result<QuiverRep> {
    let s = extension_matrices(rep, sub)?;
    let dims: Vec<usize> = rep.dims.iter().zip(&sub.dims).map(|(d, k)| d - k).collect();
    let mut maps = Vec::new();
    for (a, &(src, tgt)) in rep.quiver.arrows.iter().enumerate() {
        let conj = s[tgt].inverse()?.mul(&rep.maps[a]).mul(&s[src]);
        let mut m = MatFp::zero(rep.p, dims[tgt], dims[src]);
        for i in 0..dims[tgt] {
            for j in 0..dims[src] {
                m.set(i, j, conj.get(sub.dims[tgt] + i, sub.dims[src] + j));
            }
        }
        maps.push(m);
    }
    QuiverRep::new(rep.quiver.clone(), rep.p, dims, maps)
}

/// Semistability of a nonzero representation: no proper nonzero
/// subrepresentation has phase exceeding the phase of its quotient
/// class. The comparison is between the subobject and the quotient,
/// never against the ambient object.
pub fn is_semistable(rep: &QuiverRep, z: &WeakStabilityFn, bound: usize) -> Result<bool> {
    if rep.is_zero() {
        return Err(Error::ZeroClass);
    }
    for sub in all_subreps(rep, bound)? {
        if sub.total_dim() == 0 || sub.total_dim() == rep.total_dim() {
            continue;
        }
        let quotient_class: Vec<usize> =
            rep.dims.iter().zip(&sub.dims).map(|(d, k)| d - k).collect();
        let zf = charge_of_class(&sub.dims, z)?;
        let zg = charge_of_class(&quotient_class, z)?;
        if phase_cmp(&zf, &zg)? == Ordering::Greater {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The canonical Harder-Narasimhan factors of a nonzero
/// representation: repeatedly extract the maximal-phase semistable
/// subobject, breaking phase ties by largest total dimension, then by
/// lexicographically largest dimension vector, then by basis encoding.
///
/// The restriction to semistable candidates matters for weak charges:
/// the ambient object can share the phase of its destabilizing
/// subobject, so a plain maximal-phase pick could land on an unstable
/// candidate. A semistable subobject of maximal phase always exists,
/// since a destabilizer of a maximal-phase subobject has the same
/// phase.
///
/// Factors come out with strictly decreasing phases.
pub fn hn_filtration(rep: &QuiverRep, z: &WeakStabilityFn, bound: usize) -> Result<Vec<QuiverRep>> {
    if rep.is_zero() {
        return Err(Error::ZeroClass);
    }
    let mut factors = Vec::new();
    let mut current = rep.clone();
    while !current.is_zero() {
        let subs = all_subreps(&current, bound)?;
        let mut best: Option<(&SubRep, GaussRational)> = None;
        for sub in &subs {
            if sub.total_dim() == 0 {
                continue;
            }
            if !is_semistable(&sub_rep(&current, sub)?, z, bound)? {
                continue;
            }
            let value = charge_of_class(&sub.dims, z)?;
            best = match best {
                None => Some((sub, value)),
                Some((bs, bv)) => {
                    let key = phase_cmp(&value, &bv)?.then_with(|| {
                        sub.total_dim()
                            .cmp(&bs.total_dim())
                            .then_with(|| sub.dims.cmp(&bs.dims))
                            .then_with(|| bs.basis.cmp(&sub.basis))
                    });
                    if key == Ordering::Greater {
                        Some((sub, value))
                    } else {
                        Some((bs, bv))
                    }
                }
            };
        }
        let (max_sub, _) =
            best.ok_or_else(|| Error::Internal("no semistable subobject found".into()))?;
        let factor = sub_rep(&current, max_sub)?;
        let next = quotient_rep(&current, max_sub)?;
        factors.push(factor);
        current = next;
    }
    for pair in factors.windows(2) {
        let a = charge_of(&pair[0], z)?;
        let b = charge_of(&pair[1], z)?;
        if phase_cmp(&a, &b)? != Ordering::Greater {
            return Err(Error::Internal(
                "extracted factors do not have strictly decreasing phases".into(),
            ));
        }
    }
    Ok(factors)
}

/// All factor-class sequences of valid Harder-Narasimhan filtrations,
/// found by exhaustive search over chains with semistable subquotients
/// of strictly decreasing phase.
pub fn all_hn_factor_sequences(
    rep: &QuiverRep,
    z: &WeakStabilityFn,
    bound: usize,
) -> Result<Vec<Vec<Vec<usize>>>> {
    fn rec(
        current: &QuiverRep,
        z: &WeakStabilityFn,
        bound: usize,
        prev_phase: Option<&GaussRational>,
        prefix: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) -> Result<()> {
        if current.is_zero() {
            out.push(prefix.clone());
            return Ok(());
        }
        for sub in all_subreps(current, bound)? {
            if sub.total_dim() == 0 {
                continue;
            }
            let value = charge_of_class(&sub.dims, z)?;
            if let Some(prev) = prev_phase {
                if phase_cmp(prev, &value)? != Ordering::Greater {
                    continue;
                }
            }
            let factor = sub_rep(current, &sub)?;
            if !is_semistable(&factor, z, bound)? {
                continue;
            }
            let rest = quotient_rep(current, &sub)?;
            prefix.push(sub.dims.clone());
            rec(&rest, z, bound, Some(&value), prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }
    if rep.is_zero() {
        return Err(Error::ZeroClass);
    }
    let mut out = Vec::new();
    rec(rep, z, bound, None, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// Dimension of the space of representation homomorphisms `a -> b`:
/// matrix tuples commuting with every arrow map.
pub fn hom_dim(a: &QuiverRep, b: &QuiverRep) -> Result<usize> {
    if a.quiver != b.quiver || a.p != b.p {
        return Err(Error::Config(
            "homomorphisms need a common quiver and field".into(),
        ));
    }
    let unknowns: usize = a.dims.iter().zip(&b.dims).map(|(da, db)| da * db).sum();
    if unknowns == 0 {
        return Ok(0);
    }
    // X_v is dims_b[v] x dims_a[v]; unknown (v, i, j) sits at
    // offset[v] + i * dims_a[v] + j.
    let offset: Vec<usize> = {
        let mut out = vec![0];
        for (da, db) in a.dims.iter().zip(&b.dims) {
            out.push(out.last().unwrap() + da * db);
        }
        out
    };
    // One linear constraint per arrow and per entry of the commutation
    // square X_t A = B X_s.
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (arrow, &(s, t)) in a.quiver.arrows.iter().enumerate() {
        let am = &a.maps[arrow];
        let bm = &b.maps[arrow];
        for i in 0..b.dims[t] {
            for j in 0..a.dims[s] {
                let mut row = vec![0u8; unknowns];
                // (X_t A)_{ij} = sum_k X_t[i, k] A[k, j]
                for k in 0..a.dims[t] {
                    let idx = offset[t] + i * a.dims[t] + k;
                    row[idx] = (row[idx] + am.get(k, j)) % a.p;
                }
                // -(B X_s)_{ij} = -sum_k B[i, k] X_s[k, j]
                for k in 0..b.dims[s] {
                    let idx = offset[s] + k * a.dims[s] + j;
                    let v = (a.p - bm.get(i, k)) % a.p;
                    row[idx] = (row[idx] + v) % a.p;
                }
                if row.iter().any(|&v| v != 0) {
                    rows.push(row);
                }
            }
        }
    }
    let rank = row_span(a.p, unknowns, &rows).rows;
    Ok(unknowns - rank)
}

/// Every representation of the quiver over `F_p` with the given
/// dimension vector, enumerated over all matrix tuples.
pub fn enumerate_reps(quiver: &Quiver, p: u8, dims: &[usize]) -> Result<Vec<QuiverRep>> {
    let shapes: Vec<(usize, usize)> = quiver
        .arrows
        .iter()
        .map(|&(s, t)| (dims[t], dims[s]))
        .collect();
    let total_entries: usize = shapes.iter().map(|(r, c)| r * c).sum();
    let total: u64 = (p as u64).pow(total_entries as u32);
    let mut out = Vec::with_capacity(total as usize);
    for code in 0..total {
        let mut rem = code;
        let mut maps = Vec::with_capacity(shapes.len());
        for (r, c) in &shapes {
            let mut m = MatFp::zero(p, *r, *c);
            for e in 0..(r * c) {
                m.data[e] = (rem % p as u64) as u8;
                rem /= p as u64;
            }
            maps.push(m);
        }
        out.push(QuiverRep::new(quiver.clone(), p, dims.to_vec(), maps)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> GaussRational {
        GaussRational::from_ints(re_n, re_d, im_n, im_d)
    }

    fn a2_rep(p: u8, map_entry: u8) -> QuiverRep {
        let q = Quiver::linear(2);
        let m = MatFp::from_rows(p, 1, &[vec![map_entry]]);
        QuiverRep::new(q, p, vec![1, 1], vec![m]).unwrap()
    }

    #[test]
    fn simple_rep_has_two_subreps() {
        let q = Quiver::linear(2);
        let s1 = QuiverRep::simple(q, 2, 0).unwrap();
        let subs = all_subreps(&s1, DEFAULT_DIM_BOUND).unwrap();
        assert_eq!(subs.len(), 2);
    }

    #[test]
    fn a2_connecting_map_blocks_source_subrep() {
        let rep = a2_rep(2, 1);
        let subs = all_subreps(&rep, DEFAULT_DIM_BOUND).unwrap();
        let dims: Vec<Vec<usize>> = subs.iter().map(|s| s.dims.clone()).collect();
        assert!(dims.contains(&vec![0, 0]));
        assert!(dims.contains(&vec![0, 1]));
        assert!(dims.contains(&vec![1, 1]));
        assert!(!dims.contains(&vec![1, 0]));
        assert_eq!(subs.len(), 3);
    }

    #[test]
    fn direct_sum_has_four_subreps() {
        let rep = a2_rep(2, 0);
        let subs = all_subreps(&rep, DEFAULT_DIM_BOUND).unwrap();
        assert_eq!(subs.len(), 4);
    }

    #[test]
    fn enumeration_bound_is_enforced() {
        let q = Quiver::linear(2);
        let rep = QuiverRep::new(q, 2, vec![2, 2], vec![MatFp::identity(2, 2)]).unwrap();
        assert!(matches!(all_subreps(&rep, 3), Err(Error::Budget(_))));
    }

    #[test]
    fn charge_reads_top_level_only() {
        let u0 = g(-1, 1, 1, 1);
        let u1 = g(0, 1, 1, 1);
        let z = WeakStabilityFn::graded(vec![u0.clone(), u1.clone()]).unwrap();
        assert_eq!(charge_of_class(&[1, 0], &z).unwrap(), u0);
        assert_eq!(charge_of_class(&[0, 1], &z).unwrap(), u1);
        // a mixed class only sees its top level
        assert_eq!(charge_of_class(&[1, 1], &z).unwrap(), u1);
        // doubling stays on the ray
        let twice = charge_of_class(&[0, 2], &z).unwrap();
        assert_eq!(twice, u1.scale_int(2));
        assert_eq!(phase_cmp(&twice, &u1).unwrap(), Ordering::Equal);
        assert!(charge_of_class(&[0, 0], &z).is_err());
    }

    #[test]
    fn semistability_depends_on_phase_order() {
        // one proper nonzero subrep: sub at the sink, quotient at the source
        let rep = a2_rep(2, 1);
        let low_high = WeakStabilityFn::graded(vec![g(-1, 1, 1, 1), g(0, 1, 1, 1)]).unwrap();
        // phase of the sink simple is 1/2, below 3/4: semistable
        assert!(is_semistable(&rep, &low_high, DEFAULT_DIM_BOUND).unwrap());
        let high_low = WeakStabilityFn::graded(vec![g(0, 1, 1, 1), g(-1, 1, 1, 1)]).unwrap();
        assert!(!is_semistable(&rep, &high_low, DEFAULT_DIM_BOUND).unwrap());
        // simples are always semistable
        let s = QuiverRep::simple(Quiver::linear(2), 2, 0).unwrap();
        assert!(is_semistable(&s, &high_low, DEFAULT_DIM_BOUND).unwrap());
    }

    #[test]
    fn hn_of_semistable_is_itself() {
        let rep = a2_rep(2, 1);
        let z = WeakStabilityFn::graded(vec![g(-1, 1, 1, 1), g(0, 1, 1, 1)]).unwrap();
        let factors = hn_filtration(&rep, &z, DEFAULT_DIM_BOUND).unwrap();
        assert_eq!(factors.len(), 1);
        assert_eq!(factors[0].dims, vec![1, 1]);
    }

    #[test]
    fn hn_splits_unstable_extension() {
        let rep = a2_rep(2, 1);
        let z = WeakStabilityFn::graded(vec![g(0, 1, 1, 1), g(-1, 1, 1, 1)]).unwrap();
        let factors = hn_filtration(&rep, &z, DEFAULT_DIM_BOUND).unwrap();
        let classes: Vec<Vec<usize>> = factors.iter().map(|f| f.dims.clone()).collect();
        assert_eq!(classes, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn hn_orders_direct_sum_by_phase() {
        let rep = a2_rep(2, 0);
        let z = WeakStabilityFn::graded(vec![g(-3, 1, 1, 1), g(-1, 1, 1, 1)]).unwrap();
        // the source simple has the larger phase here
        let factors = hn_filtration(&rep, &z, DEFAULT_DIM_BOUND).unwrap();
        let classes: Vec<Vec<usize>> = factors.iter().map(|f| f.dims.clone()).collect();
        assert_eq!(classes, vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn exhaustive_search_agrees_on_factor_classes() {
        for entry in [0u8, 1] {
            let rep = a2_rep(2, entry);
            for z in [
                WeakStabilityFn::graded(vec![g(-1, 1, 1, 1), g(0, 1, 1, 1)]).unwrap(),
                WeakStabilityFn::graded(vec![g(0, 1, 1, 1), g(-1, 1, 1, 1)]).unwrap(),
            ] {
                let greedy = hn_filtration(&rep, &z, DEFAULT_DIM_BOUND).unwrap();
                let greedy_classes: Vec<Vec<usize>> =
                    greedy.iter().map(|f| f.dims.clone()).collect();
                let all = all_hn_factor_sequences(&rep, &z, DEFAULT_DIM_BOUND).unwrap();
                assert!(!all.is_empty());
                for seq in &all {
                    assert_eq!(seq, &greedy_classes);
                }
            }
        }
    }

    #[test]
    fn hom_dimensions_between_simples_and_extensions() {
        let q = Quiver::linear(2);
        let s0 = QuiverRep::simple(q.clone(), 2, 0).unwrap();
        let s1 = QuiverRep::simple(q, 2, 1).unwrap();
        assert_eq!(hom_dim(&s0, &s1).unwrap(), 0);
        assert_eq!(hom_dim(&s1, &s0).unwrap(), 0);
        assert_eq!(hom_dim(&s0, &s0).unwrap(), 1);
        let rep = a2_rep(2, 1);
        // the sink simple includes; the source simple receives the quotient
        assert_eq!(hom_dim(&s1, &rep).unwrap(), 1);
        assert_eq!(hom_dim(&rep, &s0).unwrap(), 1);
        // but there is no splitting in either direction
        assert_eq!(hom_dim(&rep, &s1).unwrap(), 0);
        assert_eq!(hom_dim(&s0, &rep).unwrap(), 0);
    }

    #[test]
    fn rep_enumeration_counts_matrix_tuples() {
        let q = Quiver::linear(3);
        let reps = enumerate_reps(&q, 2, &[1, 1, 1]).unwrap();
        assert_eq!(reps.len(), 4);
        let reps = enumerate_reps(&q, 2, &[1, 2, 0]).unwrap();
        assert_eq!(reps.len(), 4);
    }
}
