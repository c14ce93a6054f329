//! Weak central charges with exact phase comparison.
//!
//! Charge values are Gaussian rationals; phases are never materialized
//! as real numbers. Comparing two phases in the closed upper half plane
//! reduces to the sign of the rational cross product, and one-sided
//! limits along a path reduce to the sign of the first nonvanishing
//! coefficient of a rational polynomial. Walls along linear charge
//! paths are the zero locus of a quadratic, solved exactly.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::lattice::{filtration_level, ClassVector, Window};
use crate::{Error, Result};

/// An element of `Q(i)`, exact real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    /// Convenience constructor from integer fractions `(re_n/re_d, im_n/im_d)`.
    pub fn from_ints(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> Self {
        GaussRational {
            re: BigRational::new(BigInt::from(re_n), BigInt::from(re_d)),
            im: BigRational::new(BigInt::from(im_n), BigInt::from(im_d)),
        }
    }

    pub fn zero() -> Self {
        GaussRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        GaussRational::new(&self.re + &other.re, &self.im + &other.im)
    }

    pub fn sub(&self, other: &Self) -> Self {
        GaussRational::new(&self.re - &other.re, &self.im - &other.im)
    }

    pub fn neg(&self) -> Self {
        GaussRational::new(-self.re.clone(), -self.im.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        GaussRational::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        GaussRational::new(&self.re * c, &self.im * c)
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&BigRational::from(BigInt::from(c)))
    }

    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// `re(a) im(b) - im(a) re(b)`; positive exactly when `b` sits
    /// counterclockwise of `a` within a half turn.
    pub fn cross(&self, other: &Self) -> BigRational {
        &self.re * &other.im - &self.im * &other.re
    }

    pub fn dot(&self, other: &Self) -> BigRational {
        &self.re * &other.re + &self.im * &other.im
    }

    /// Membership in the closed upper half plane minus zero, with the
    /// negative real axis included (phase one).
    pub fn in_heart(&self) -> bool {
        self.im.is_positive() || (self.im.is_zero() && self.re.is_negative())
    }
}

/// Exact comparison of `arg a` and `arg b` for values with argument in
/// `(0, pi]`. The negative real axis compares largest.
pub fn phase_cmp(a: &GaussRational, b: &GaussRational) -> Result<Ordering> {
    for v in [a, b] {
        if v.is_zero() {
            return Err(Error::PhaseDomain("zero value has no phase".into()));
        }
        if !v.in_heart() {
            return Err(Error::PhaseDomain(format!(
                "value {} + {} i outside the upper half plane",
                v.re, v.im
            )));
        }
    }
    let c = a.cross(b);
    Ok(if c.is_positive() {
        Ordering::Less
    } else if c.is_zero() {
        Ordering::Equal
    } else {
        Ordering::Greater
    })
}

/// Polynomial in one parameter with rational coefficients, low degree
/// first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly(pub Vec<BigRational>);

impl RatPoly {
    pub fn zero() -> Self {
        RatPoly(Vec::new())
    }

    pub fn constant(c: BigRational) -> Self {
        RatPoly(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] += c;
        }
        RatPoly(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RatPoly(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RatPoly(self.0.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        let mut out = BigRational::zero();
        for c in self.0.iter().rev() {
            out = out * t + c;
        }
        out
    }

    /// Sign of the polynomial in the one-sided limit toward zero, or
    /// exactly at zero. For a one-sided limit this is the sign of the
    /// first nonvanishing coefficient, corrected for the approach
    /// direction.
    pub fn sign_at_limit(&self, side: Side) -> i8 {
        match side {
            Side::At => sign_of(&self.eval(&BigRational::zero())),
            Side::Above => {
                for c in &self.0 {
                    let s = sign_of(c);
                    if s != 0 {
                        return s;
                    }
                }
                0
            }
            Side::Below => {
                for (k, c) in self.0.iter().enumerate() {
                    let s = sign_of(c);
                    if s != 0 {
                        return if k % 2 == 0 { s } else { -s };
                    }
                }
                0
            }
        }
    }
}

fn sign_of(c: &BigRational) -> i8 {
    if c.is_positive() {
        1
    } else if c.is_negative() {
        -1
    } else {
        0
    }
}

/// How a parametrized charge is evaluated: exactly at the base point,
/// or as a one-sided limit just below / just above it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Below,
    At,
    Above,
}

/// A Gaussian-rational-valued polynomial in the path parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussPoly {
    pub re: RatPoly,
    pub im: RatPoly,
}

impl GaussPoly {
    pub fn constant(g: &GaussRational) -> Self {
        GaussPoly {
            re: RatPoly::constant(g.re.clone()),
            im: RatPoly::constant(g.im.clone()),
        }
    }

    /// `a + t (b - a)`, the segment from `a` to `b`.
    pub fn segment(a: &GaussRational, b: &GaussRational) -> Self {
        GaussPoly {
            re: RatPoly(vec![a.re.clone(), &b.re - &a.re]),
            im: RatPoly(vec![a.im.clone(), &b.im - &a.im]),
        }
    }

    pub fn zero() -> Self {
        GaussPoly {
            re: RatPoly::zero(),
            im: RatPoly::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        GaussPoly {
            re: self.re.add(&other.re),
            im: self.im.add(&other.im),
        }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        let q = BigRational::from(BigInt::from(c));
        GaussPoly {
            re: self.re.scale(&q),
            im: self.im.scale(&q),
        }
    }

    pub fn cross(&self, other: &Self) -> RatPoly {
        self.re.mul(&other.im).sub(&self.im.mul(&other.re))
    }

    pub fn dot(&self, other: &Self) -> RatPoly {
        self.re.mul(&other.re).add(&self.im.mul(&other.im))
    }

    pub fn eval(&self, t: &BigRational) -> GaussRational {
        GaussRational::new(self.re.eval(t), self.im.eval(t))
    }

    /// Whether the value lies in the closed upper half plane minus zero
    /// (argument in `(0, pi]`) at the given side of the base point.
    pub fn in_heart_at(&self, side: Side) -> bool {
        match self.im.sign_at_limit(side) {
            1 => true,
            -1 => false,
            _ => self.re.sign_at_limit(side) < 0,
        }
    }
}

/// A weak central charge of the fixed-degree family: `z0` and `z1` in
/// the open second quadrant, `omega` a strictly positive tuple. Degree
/// classes are sent to `-s z0`, curve classes to `-i (omega . beta)`,
/// and positive-rank classes to `r z1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiCharge {
    pub z0: GaussRational,
    pub omega: Vec<BigRational>,
    pub z1: GaussRational,
}

impl XiCharge {
    pub fn new(z0: GaussRational, omega: Vec<BigRational>, z1: GaussRational) -> Result<Self> {
        for (name, z) in [("z0", &z0), ("z1", &z1)] {
            if !(z.re.is_negative() && z.im.is_positive()) {
                return Err(Error::Config(format!(
                    "{} must lie in the open second quadrant",
                    name
                )));
            }
        }
        if omega.iter().any(|w| !w.is_positive()) {
            return Err(Error::Config("omega must be strictly positive".into()));
        }
        Ok(XiCharge { z0, omega, z1 })
    }

    pub fn curve_rank(&self) -> usize {
        self.omega.len()
    }

    /// The charge of the rank-one structure class `(0, 0, 1)`.
    pub fn structure_value(&self) -> GaussRational {
        self.z1.clone()
    }
}

/// Value of the charge on a nonzero class: only the top graded piece of
/// the filtration contributes.
pub fn charge_eval(xi: &XiCharge, v: &ClassVector) -> Result<GaussRational> {
    match filtration_level(v)? {
        0 => Ok(xi.z0.scale_int(-v.s)),
        1 => {
            let mut q = BigRational::zero();
            for (w, b) in xi.omega.iter().zip(&v.beta.0) {
                q += w * BigRational::from(BigInt::from(*b));
            }
            // -i (omega . beta)
            Ok(GaussRational::new(BigRational::zero(), -q))
        }
        _ => Ok(xi.z1.scale_int(v.r)),
    }
}

/// The chamber of a charge, decided by the exact sign of the cross
/// product of `z0` and `z1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chamber {
    /// `arg z0 < arg z1`: rank-one semistable objects are ideal-sheaf
    /// like.
    Dt,
    /// `arg z0 > arg z1`: rank-one semistable objects are stable-pair
    /// like.
    Pt,
    /// `arg z0 = arg z1`: degree classes align with the rank class.
    Wall,
}

pub fn chamber_classify(xi: &XiCharge) -> Chamber {
    match sign_of(&xi.z0.cross(&xi.z1)) {
        1 => Chamber::Dt,
        0 => Chamber::Wall,
        _ => Chamber::Pt,
    }
}

/// A charge is general when no degree class is positively proportional
/// to the charge of the rank-one structure class.
pub fn is_general(xi: &XiCharge) -> bool {
    chamber_classify(xi) != Chamber::Wall
}

/// Which filtration a parametrized charge grades by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiltrationKind {
    /// Degree classes, then curve classes, then rank.
    Hook,
    /// All rank-zero classes at the bottom level, rank on top.
    RankSplit,
}

/// A weak central charge with polynomial dependence on a path
/// parameter. Evaluation picks the functional of the top graded piece
/// of the class.
#[derive(Clone, Debug)]
pub struct ChargeFn {
    pub filt: FiltrationKind,
    pub c_s: GaussPoly,
    pub c_beta: Vec<GaussPoly>,
    pub c_r: GaussPoly,
}

impl ChargeFn {
    pub fn from_xi(xi: &XiCharge) -> Self {
        ChargeFn {
            filt: FiltrationKind::Hook,
            c_s: GaussPoly::constant(&xi.z0.neg()),
            c_beta: xi
                .omega
                .iter()
                .map(|w| GaussPoly::constant(&GaussRational::new(BigRational::zero(), -w.clone())))
                .collect(),
            c_r: GaussPoly::constant(&xi.z1),
        }
    }

    /// Linear interpolation from `a` at parameter 0 to `b` at 1.
    pub fn from_xi_segment(a: &XiCharge, b: &XiCharge) -> Self {
        ChargeFn {
            filt: FiltrationKind::Hook,
            c_s: GaussPoly::segment(&a.z0.neg(), &b.z0.neg()),
            c_beta: a
                .omega
                .iter()
                .zip(&b.omega)
                .map(|(wa, wb)| {
                    GaussPoly::segment(
                        &GaussRational::new(BigRational::zero(), -wa.clone()),
                        &GaussRational::new(BigRational::zero(), -wb.clone()),
                    )
                })
                .collect(),
            c_r: GaussPoly::segment(&a.z1, &b.z1),
        }
    }

    fn level(&self, v: &ClassVector) -> Result<u8> {
        if v.is_zero() {
            return Err(Error::ZeroClass);
        }
        Ok(match self.filt {
            FiltrationKind::Hook => filtration_level(v)?,
            FiltrationKind::RankSplit => u8::from(v.r != 0),
        })
    }

    /// Charge value as a polynomial in the path parameter.
    pub fn eval(&self, v: &ClassVector) -> Result<GaussPoly> {
        let level = self.level(v)?;
        let mut out = GaussPoly::zero();
        match (self.filt, level) {
            (FiltrationKind::Hook, 0) => out = out.add(&self.c_s.scale_int(v.s)),
            (FiltrationKind::Hook, 1) => {
                for (c, b) in self.c_beta.iter().zip(&v.beta.0) {
                    out = out.add(&c.scale_int(*b));
                }
            }
            (FiltrationKind::Hook, _) => out = out.add(&self.c_r.scale_int(v.r)),
            (FiltrationKind::RankSplit, 0) => {
                out = out.add(&self.c_s.scale_int(v.s));
                for (c, b) in self.c_beta.iter().zip(&v.beta.0) {
                    out = out.add(&c.scale_int(*b));
                }
            }
            (FiltrationKind::RankSplit, _) => out = out.add(&self.c_r.scale_int(v.r)),
        }
        Ok(out)
    }
}

/// A total phase preorder on classes: a parametrized charge together
/// with the side at which limits are taken.
#[derive(Clone, Debug)]
pub struct PhaseOracle {
    pub charge: ChargeFn,
    pub side: Side,
}

impl PhaseOracle {
    pub fn at_xi(xi: &XiCharge) -> Self {
        PhaseOracle {
            charge: ChargeFn::from_xi(xi),
            side: Side::At,
        }
    }

    pub fn value(&self, v: &ClassVector) -> Result<GaussPoly> {
        let value = self.charge.eval(v)?;
        if value.is_zero() {
            return Err(Error::PhaseDomain(format!("class {:?} has zero charge", v)));
        }
        if !value.in_heart_at(self.side) {
            return Err(Error::PhaseDomain(format!(
                "class {:?} evaluates outside the upper half plane",
                v
            )));
        }
        Ok(value)
    }

    /// Exact one-sided comparison of the phases of two classes.
    pub fn phase_cmp(&self, v: &ClassVector, w: &ClassVector) -> Result<Ordering> {
        let a = self.value(v)?;
        let b = self.value(w)?;
        self.cmp_values(&a, &b)
    }

    /// Comparison of two already-evaluated charge values.
    pub fn cmp_values(&self, a: &GaussPoly, b: &GaussPoly) -> Result<Ordering> {
        Ok(match a.cross(b).sign_at_limit(self.side) {
            1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }
}

/// A piecewise-linear path in the charge family, componentwise linear
/// between consecutive keyframes. Keyframe invariants propagate to the
/// interior by convexity of the constraints.
#[derive(Clone, Debug)]
pub struct ChargePath {
    pub keyframes: Vec<XiCharge>,
}

impl ChargePath {
    pub fn new(keyframes: Vec<XiCharge>) -> Result<Self> {
        if keyframes.is_empty() {
            return Err(Error::Config("a path needs at least one keyframe".into()));
        }
        let rank = keyframes[0].curve_rank();
        if keyframes.iter().any(|k| k.curve_rank() != rank) {
            return Err(Error::Config("keyframes have mixed curve ranks".into()));
        }
        Ok(ChargePath { keyframes })
    }

    pub fn segments(&self) -> usize {
        self.keyframes.len().saturating_sub(1)
    }

    pub fn start(&self) -> &XiCharge {
        self.keyframes.first().expect("nonempty")
    }

    pub fn end(&self) -> &XiCharge {
        self.keyframes.last().expect("nonempty")
    }

    pub fn reversed(&self) -> ChargePath {
        let mut keyframes = self.keyframes.clone();
        keyframes.reverse();
        ChargePath { keyframes }
    }

    /// The charge at a global parameter in `[0, 1]`.
    pub fn charge_at(&self, t: &BigRational) -> Result<XiCharge> {
        if t < &BigRational::zero() || t > &BigRational::one() {
            return Err(Error::Config("path parameter outside [0, 1]".into()));
        }
        if self.segments() == 0 {
            return Ok(self.keyframes[0].clone());
        }
        let scaled = t * BigRational::from(BigInt::from(self.segments() as i64));
        let mut seg = scaled.floor().to_integer();
        if seg == BigInt::from(self.segments() as i64) {
            seg -= 1;
        }
        let seg_idx = num_traits::ToPrimitive::to_usize(&seg).expect("segment index fits");
        let local = &scaled - BigRational::from(seg);
        let a = &self.keyframes[seg_idx];
        let b = &self.keyframes[seg_idx + 1];
        let lerp_g = |x: &GaussRational, y: &GaussRational| -> GaussRational {
            x.add(&y.sub(x).scale(&local))
        };
        let lerp_q = |x: &BigRational, y: &BigRational| -> BigRational { x + (y - x) * &local };
        XiCharge::new(
            lerp_g(&a.z0, &b.z0),
            a.omega
                .iter()
                .zip(&b.omega)
                .map(|(x, y)| lerp_q(x, y))
                .collect(),
            lerp_g(&a.z1, &b.z1),
        )
    }
}

/// An exact crossing parameter: either rational, or the root of an
/// integer quadratic on one segment, carried with a rational isolating
/// interval in the global parameter.
#[derive(Clone, Debug)]
pub enum WallTime {
    Rational(BigRational),
    Quadratic {
        /// Segment whose local quadratic `a u^2 + b u + c` vanishes.
        segment: usize,
        a: BigInt,
        b: BigInt,
        c: BigInt,
        /// The larger of the two real roots when true.
        plus_branch: bool,
        /// Global-parameter rational bounds isolating the crossing.
        lo: BigRational,
        hi: BigRational,
    },
}

impl WallTime {
    /// Rational bounds on the global crossing parameter.
    pub fn bounds(&self) -> (BigRational, BigRational) {
        match self {
            WallTime::Rational(t) => (t.clone(), t.clone()),
            WallTime::Quadratic { lo, hi, .. } => (lo.clone(), hi.clone()),
        }
    }
}

/// One transversal wall crossing.
#[derive(Clone, Debug)]
pub struct WallCrossing {
    pub time: WallTime,
    /// Degree classes on the wall at the crossing.
    pub classes: Vec<ClassVector>,
    /// +1 when the degree-class phase passes from above the rank-class
    /// phase to below it as the parameter increases; -1 for the
    /// reverse.
    pub epsilon: i8,
}

/// Locates the wall crossings of a path, with exact crossing
/// parameters and crossing signs.
///
/// Both endpoints must be general, and every crossing must be
/// transversal: the alignment function changes sign. Tangential
/// contact and segments lying identically on a wall are rejected.
pub fn find_walls(path: &ChargePath, classes: &[ClassVector]) -> Result<Vec<WallCrossing>> {
    for v in classes {
        if filtration_level(v)? != 0 {
            return Err(Error::Config(format!(
                "wall classes must be degree classes, got {:?}",
                v
            )));
        }
    }
    let wall_classes: Vec<ClassVector> = classes.iter().filter(|v| v.s < 0).cloned().collect();
    if !is_general(path.start()) || !is_general(path.end()) {
        return Err(Error::NotGoodPath("an endpoint lies on a wall".into()));
    }
    let segs = path.segments();
    let mut crossings = Vec::new();
    if segs == 0 {
        return Ok(crossings);
    }
    let segs_q = BigRational::from(BigInt::from(segs as i64));
    // Sign of the alignment function after the most recent event.
    let mut running = sign_of(&segment_alignment(path, 0).eval(&BigRational::zero()));
    for seg in 0..segs {
        let g = segment_alignment(path, seg);
        if g.is_zero() {
            return Err(Error::NotGoodPath(format!(
                "segment {} lies identically on a wall",
                seg
            )));
        }
        for root in local_roots(&g, seg)? {
            let (after_sign, time) = match root {
                LocalRoot::Rational(u) => {
                    let after = sign_after_rational(&g, &u);
                    let time = WallTime::Rational(
                        (BigRational::from(BigInt::from(seg as i64)) + u) / &segs_q,
                    );
                    (after, time)
                }
                LocalRoot::Quadratic {
                    a,
                    b,
                    c,
                    plus_branch,
                    lo,
                    hi,
                } => {
                    let after = sign_of(&g.eval(&hi));
                    let time = WallTime::Quadratic {
                        segment: seg,
                        a,
                        b,
                        c,
                        plus_branch,
                        lo: (BigRational::from(BigInt::from(seg as i64)) + lo) / &segs_q,
                        hi: (BigRational::from(BigInt::from(seg as i64)) + hi) / &segs_q,
                    };
                    (after, time)
                }
            };
            if after_sign == 0 || running == 0 || after_sign == running {
                return Err(Error::NotGoodPath("crossing without a sign change".into()));
            }
            let epsilon = if running < 0 && after_sign > 0 { 1 } else { -1 };
            crossings.push(WallCrossing {
                time,
                classes: wall_classes.clone(),
                epsilon,
            });
            running = after_sign;
        }
        let at_end = sign_of(&g.eval(&BigRational::one()));
        if at_end != 0 {
            running = at_end;
        }
        // A vanishing end value is the next segment's root at local
        // zero (or an endpoint violation caught above).
    }
    Ok(crossings)
}

/// Alignment function of one segment: the cross product of the degree
/// ray and the rank ray, a quadratic in the local parameter whose zeros
/// are the walls.
fn segment_alignment(path: &ChargePath, seg: usize) -> RatPoly {
    let a = &path.keyframes[seg];
    let b = &path.keyframes[seg + 1];
    let z0 = GaussPoly::segment(&a.z0, &b.z0);
    let z1 = GaussPoly::segment(&a.z1, &b.z1);
    z0.cross(&z1)
}

/// Sign of `g` immediately after a rational root `u` inside the same
/// segment.
fn sign_after_rational(g: &RatPoly, u: &BigRational) -> i8 {
    shift_poly(g, u).sign_at_limit(Side::Above)
}

/// `g(u + t)` expanded in `t`.
fn shift_poly(g: &RatPoly, u: &BigRational) -> RatPoly {
    let mut out = RatPoly::constant(BigRational::zero());
    let t_plus_u = RatPoly(vec![u.clone(), BigRational::one()]);
    for c in g.0.iter().rev() {
        out = out.mul(&t_plus_u).add(&RatPoly::constant(c.clone()));
    }
    out
}

enum LocalRoot {
    Rational(BigRational),
    Quadratic {
        a: BigInt,
        b: BigInt,
        c: BigInt,
        plus_branch: bool,
        lo: BigRational,
        hi: BigRational,
    },
}

/// Roots of the segment alignment in local parameter `[0, 1)`, sorted.
/// A root at local 1 belongs to the next segment, so each keyframe
/// event is counted once.
fn local_roots(g: &RatPoly, seg: usize) -> Result<Vec<LocalRoot>> {
    // Clear denominators, preserving sign.
    let mut den = BigInt::one();
    for c in &g.0 {
        den = &den / den.gcd(c.denom()) * c.denom();
    }
    let ints: Vec<BigInt> = g.0.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    let get = |i: usize| -> BigInt { ints.get(i).cloned().unwrap_or_else(BigInt::zero) };
    let (c0, c1, c2) = (get(0), get(1), get(2));
    let mut roots: Vec<(BigRational, LocalRoot)> = Vec::new();
    let in_range = |u: &BigRational| *u >= BigRational::zero() && *u < BigRational::one();
    if c2.is_zero() {
        if c1.is_zero() {
            return Ok(Vec::new());
        }
        let u = BigRational::new(-c0, c1);
        if in_range(&u) {
            roots.push((u.clone(), LocalRoot::Rational(u)));
        }
    } else {
        let disc = &c1 * &c1 - BigInt::from(4) * &c2 * &c0;
        if disc.is_negative() {
            return Ok(Vec::new());
        }
        if disc.is_zero() {
            let u = BigRational::new(-c1.clone(), BigInt::from(2) * &c2);
            if in_range(&u) {
                return Err(Error::NotGoodPath(format!(
                    "tangential wall contact on segment {}",
                    seg
                )));
            }
            return Ok(Vec::new());
        }
        let sqrt = disc.sqrt();
        if &sqrt * &sqrt == disc {
            for sign in [-1i64, 1] {
                let u = BigRational::new(-&c1 + BigInt::from(sign) * &sqrt, BigInt::from(2) * &c2);
                if in_range(&u) {
                    roots.push((u.clone(), LocalRoot::Rational(u)));
                }
            }
        } else {
            // Irrational pair; isolate each root by exact bisection.
            for (plus_branch, mut lo, mut hi) in quadratic_brackets(&c2, &c1, &sqrt) {
                let threshold = BigRational::new(BigInt::one(), BigInt::from(1_048_576));
                loop {
                    let clear_of_range = hi <= BigRational::zero() || lo >= BigRational::one();
                    let inside_range = lo > BigRational::zero() && hi < BigRational::one();
                    if (&hi - &lo) < threshold && (clear_of_range || inside_range) {
                        break;
                    }
                    let mid = (&lo + &hi) / BigRational::from(BigInt::from(2));
                    let qlo = quad_eval(&c2, &c1, &c0, &lo);
                    let qmid = quad_eval(&c2, &c1, &c0, &mid);
                    debug_assert!(!qmid.is_zero(), "irrational root hit exactly");
                    if (qlo.is_negative() && qmid.is_positive())
                        || (qlo.is_positive() && qmid.is_negative())
                    {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                if hi <= BigRational::zero() || lo >= BigRational::one() {
                    continue;
                }
                roots.push((
                    lo.clone(),
                    LocalRoot::Quadratic {
                        a: c2.clone(),
                        b: c1.clone(),
                        c: c0.clone(),
                        plus_branch,
                        lo,
                        hi,
                    },
                ));
            }
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(roots.into_iter().map(|(_, r)| r).collect())
}

fn quad_eval(a: &BigInt, b: &BigInt, c: &BigInt, u: &BigRational) -> BigRational {
    let ar = BigRational::from(a.clone());
    let br = BigRational::from(b.clone());
    let cr = BigRational::from(c.clone());
    ar * u * u + br * u + cr
}

/// Initial rational brackets for the two roots of `a u^2 + b u + c`
/// with non-square positive discriminant, using floor bounds on the
/// square root. Smaller root first.
fn quadratic_brackets(
    a: &BigInt,
    b: &BigInt,
    sqrt_floor: &BigInt,
) -> Vec<(bool, BigRational, BigRational)> {
    let two_a = BigInt::from(2) * a;
    let f = sqrt_floor.clone();
    let f1 = &f + BigInt::one();
    let minus_lo = BigRational::new(-b - &f1, two_a.clone());
    let minus_hi = BigRational::new(-b - &f, two_a.clone());
    let plus_lo = BigRational::new(-b + &f, two_a.clone());
    let plus_hi = BigRational::new(-b + &f1, two_a);
    let order = |x: BigRational, y: BigRational| if x <= y { (x, y) } else { (y, x) };
    let (m_lo, m_hi) = order(minus_lo, minus_hi);
    let (p_lo, p_hi) = order(plus_lo, plus_hi);
    let mut out = vec![(false, m_lo, m_hi), (true, p_lo, p_hi)];
    out.sort_by(|x, y| x.1.cmp(&y.1));
    out
}

/// The finite set of candidate summands around `v` whose phase sits
/// within the tolerance window of the complementary part.
///
/// `eps` is the tangent of the half width of the phase window: a split
/// `v = v' + (v - v')` is accepted when the angle between the two
/// charge values is below `2 atan(eps)`. The trivial split is always
/// included. For rank-one `v` the doubled window around the rank-class
/// phase must stay strictly inside the open sector between phase 1/2
/// and phase 1, which bounds `eps` from above.
pub fn s_eps_v(
    xi: &XiCharge,
    v: &ClassVector,
    eps: &BigRational,
    window: &Window,
) -> Result<Vec<ClassVector>> {
    if !eps.is_positive() || eps >= &BigRational::one() {
        return Err(Error::EpsTooLarge(
            "tolerance must lie strictly between 0 and 1".into(),
        ));
    }
    let level_ok = v.r == 1 || filtration_level(v)? == 0;
    if !level_ok {
        return Err(Error::Config(
            "phase-window sets are only defined for rank-one or degree classes".into(),
        ));
    }
    if v.r == 1 {
        // Rotating the rank-class value by ±2 atan(eps) must stay in
        // the open second quadrant.
        let e2 = eps * eps;
        let cos2 = BigRational::one() - &e2;
        let sin2 = BigRational::from(BigInt::from(2)) * eps;
        let rot = |z: &GaussRational, s: &BigRational| {
            GaussRational::new(&z.re * &cos2 - &z.im * s, &z.re * s + &z.im * &cos2)
        };
        let up = rot(&xi.z1, &sin2);
        let down = rot(&xi.z1, &-sin2.clone());
        if !(up.im.is_positive() && down.re.is_negative() && down.im.is_positive()) {
            return Err(Error::EpsTooLarge(
                "doubled phase window leaves the admissible sector".into(),
            ));
        }
    }
    let mut out = vec![v.clone()];
    let q = BigRational::from(BigInt::from(2)) * eps / (BigRational::one() - eps * eps);
    let q_sq = &q * &q;
    for cand in crate::lattice::realizable_classes(window) {
        if &cand == v {
            continue;
        }
        let rest = v.sub(&cand);
        if rest.is_zero() || !crate::lattice::is_realizable(window, &rest) {
            continue;
        }
        let za = charge_eval(xi, &cand)?;
        let zb = charge_eval(xi, &rest)?;
        if !za.in_heart() || !zb.in_heart() {
            continue;
        }
        let dot = za.dot(&zb);
        if !dot.is_positive() {
            continue;
        }
        let cross = za.cross(&zb);
        if &cross * &cross < &q_sq * &dot * &dot {
            out.push(cand);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// The smallest positive tangent gap between distinct charge rays of
/// the realizable window classes and the rank-one structure class.
/// `None` when every pair of distinct rays is at least a quarter turn
/// apart.
pub fn min_phase_gap(xi: &XiCharge, window: &Window) -> Option<BigRational> {
    let mut values: Vec<GaussRational> = crate::lattice::realizable_classes(window)
        .iter()
        .filter_map(|v| charge_eval(xi, v).ok())
        .filter(|z| z.in_heart())
        .collect();
    values.push(xi.z1.clone());
    let mut best: Option<BigRational> = None;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let cross = values[i].cross(&values[j]);
            if cross.is_zero() {
                continue;
            }
            let dot = values[i].dot(&values[j]);
            if !dot.is_positive() {
                continue;
            }
            let tan = (cross / dot).abs();
            best = Some(match best {
                None => tan,
                Some(b) => b.min(tan),
            });
        }
    }
    best
}

/// Squared support constant of a charge: the largest ratio of squared
/// class norm to squared charge norm over the three strata. The norm
/// of a class is the sup norm of its top graded piece; on the curve
/// stratum the extremal ratio is attained on a coordinate ray, so the
/// constant is `max(1/|z0|^2, 1/min(omega)^2, 1/|z1|^2)`.
pub fn support_constant_sq(xi: &XiCharge) -> BigRational {
    let mut c = xi.z0.norm_sq().recip();
    let c1 = xi.z1.norm_sq().recip();
    if c1 > c {
        c = c1;
    }
    if let Some(min_w) = xi.omega.iter().min() {
        let cw = (min_w * min_w).recip();
        if cw > c {
            c = cw;
        }
    }
    c
}

/// Squared sup norm of the top graded piece of a nonzero class.
pub fn class_norm_sq(v: &ClassVector) -> Result<BigRational> {
    let level = filtration_level(v)?;
    let n: i64 = match level {
        0 => v.s.abs(),
        1 => v.beta.0.iter().map(|b| b.abs()).max().unwrap_or(0),
        _ => v.r.abs(),
    };
    Ok(BigRational::from(BigInt::from(n * n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{CurveClass, LatticeConfig, MRule};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn g(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> GaussRational {
        GaussRational::from_ints(re_n, re_d, im_n, im_d)
    }

    fn xi(z0: (i64, i64), z1: (i64, i64)) -> XiCharge {
        XiCharge::new(g(z0.0, 1, z0.1, 1), vec![q(1, 1)], g(z1.0, 1, z1.1, 1)).unwrap()
    }

    fn cv(s: i64, beta: &[i64], r: i64) -> ClassVector {
        ClassVector::from_parts(s, beta, r)
    }

    #[test]
    fn charge_eval_by_stratum() {
        let xi = xi((-1, 2), (-1, 1));
        // degree stratum: (-n, 0, 0) with n > 0 maps to n z0.
        assert_eq!(charge_eval(&xi, &cv(-3, &[0], 0)).unwrap(), g(-3, 1, 6, 1));
        // curve stratum: (0, beta, 0) maps to -i (omega . beta).
        assert_eq!(charge_eval(&xi, &cv(0, &[2], 0)).unwrap(), g(0, 1, -2, 1));
        // rank stratum.
        assert_eq!(charge_eval(&xi, &cv(0, &[0], 1)).unwrap(), g(-1, 1, 1, 1));
        // only the top stratum contributes.
        assert_eq!(charge_eval(&xi, &cv(-7, &[5], 1)).unwrap(), g(-1, 1, 1, 1));
    }

    #[test]
    fn phase_cmp_basics() {
        let i = g(0, 1, 1, 1);
        let minus_one = g(-1, 1, 0, 1);
        assert_eq!(phase_cmp(&i, &minus_one).unwrap(), Ordering::Less);
        assert_eq!(phase_cmp(&i, &g(0, 1, 5, 1)).unwrap(), Ordering::Equal);
        assert_eq!(
            phase_cmp(&g(-1, 1, 2, 1), &g(-1, 1, 1, 1)).unwrap(),
            Ordering::Less
        );
        assert!(phase_cmp(&g(1, 1, -1, 1), &i).is_err());
        assert!(phase_cmp(&GaussRational::zero(), &i).is_err());
    }

    #[test]
    fn chamber_classification() {
        assert_eq!(chamber_classify(&xi((-1, 2), (-1, 1))), Chamber::Dt);
        assert_eq!(chamber_classify(&xi((-1, 1), (-1, 2))), Chamber::Pt);
        assert_eq!(chamber_classify(&xi((-2, 2), (-1, 1))), Chamber::Wall);
        assert!(is_general(&xi((-1, 2), (-1, 1))));
        assert!(!is_general(&xi((-2, 2), (-1, 1))));
    }

    #[test]
    fn one_sided_polynomial_signs() {
        let p = RatPoly(vec![q(0, 1), q(-3, 1), q(5, 1)]);
        assert_eq!(p.sign_at_limit(Side::Above), -1);
        assert_eq!(p.sign_at_limit(Side::Below), 1);
        assert_eq!(p.sign_at_limit(Side::At), 0);
        let c = RatPoly(vec![q(2, 1)]);
        assert_eq!(c.sign_at_limit(Side::Below), 1);
    }

    #[test]
    fn single_rotation_crossing_has_negative_sign() {
        // z0 swings from below z1's ray to above it; z1 fixed at phase 3/4.
        let start = xi((-1, 2), (-1, 1)); // Dt side
        let end = xi((-2, 1), (-1, 1)); // Pt side
        let path = ChargePath::new(vec![start, end]).unwrap();
        let classes = vec![cv(-1, &[0], 0), cv(-2, &[0], 0)];
        let crossings = find_walls(&path, &classes).unwrap();
        assert_eq!(crossings.len(), 1);
        assert_eq!(crossings[0].epsilon, -1);
        assert_eq!(crossings[0].classes.len(), 2);
        // Reversal flips the sign.
        let back = find_walls(&path.reversed(), &classes).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].epsilon, 1);
    }

    #[test]
    fn path_inside_chamber_has_no_crossings() {
        let path = ChargePath::new(vec![xi((-1, 3), (-1, 1)), xi((-1, 2), (-1, 1))]).unwrap();
        let crossings = find_walls(&path, &[cv(-1, &[0], 0)]).unwrap();
        assert!(crossings.is_empty());
    }

    #[test]
    fn double_crossing_within_one_segment() {
        // Both rays move; the alignment quadratic vanishes at 1/3 and
        // 1/2, so the path dips through the other chamber and returns.
        let path = ChargePath::new(vec![
            XiCharge::new(g(-1, 1, 2, 1), vec![q(1, 1)], g(-2, 1, 3, 1)).unwrap(),
            XiCharge::new(g(-4, 1, 2, 1), vec![q(1, 1)], g(-3, 1, 1, 1)).unwrap(),
        ])
        .unwrap();
        let crossings = find_walls(&path, &[cv(-1, &[0], 0)]).unwrap();
        assert_eq!(crossings.len(), 2);
        match (&crossings[0].time, &crossings[1].time) {
            (WallTime::Rational(a), WallTime::Rational(b)) => {
                assert_eq!(a, &q(1, 3));
                assert_eq!(b, &q(1, 2));
            }
            other => panic!("expected rational crossings, got {:?}", other),
        }
        assert_eq!(crossings[0].epsilon, -crossings[1].epsilon);
        // returning to the starting chamber
        assert_eq!(
            chamber_classify(path.start()),
            chamber_classify(path.end())
        );
    }

    #[test]
    fn endpoint_on_wall_is_rejected() {
        let path = ChargePath::new(vec![xi((-1, 1), (-1, 1)), xi((-1, 2), (-1, 1))]).unwrap();
        assert!(matches!(
            find_walls(&path, &[cv(-1, &[0], 0)]),
            Err(Error::NotGoodPath(_))
        ));
    }

    #[test]
    fn keyframe_on_wall_counts_once() {
        let path = ChargePath::new(vec![
            xi((-1, 2), (-1, 1)),
            xi((-1, 1), (-1, 1)), // exactly on the wall
            xi((-2, 1), (-1, 1)),
        ])
        .unwrap();
        let crossings = find_walls(&path, &[cv(-1, &[0], 0)]).unwrap();
        assert_eq!(crossings.len(), 1);
        assert_eq!(crossings[0].epsilon, -1);
    }

    #[test]
    fn tangential_contact_is_rejected() {
        // The path dips onto the wall at the middle keyframe and
        // returns to the same chamber: a touch without sign change.
        let path = ChargePath::new(vec![
            xi((-1, 2), (-1, 1)),
            xi((-1, 1), (-1, 1)),
            xi((-1, 3), (-1, 1)),
        ])
        .unwrap();
        assert!(matches!(
            find_walls(&path, &[cv(-1, &[0], 0)]),
            Err(Error::NotGoodPath(_))
        ));
    }

    #[test]
    fn irrational_crossing_is_isolated() {
        // z1 varies too, making the alignment genuinely quadratic with
        // an irrational root in (0, 1).
        let start = XiCharge::new(g(-1, 1, 3, 1), vec![q(1, 1)], g(-1, 1, 1, 1)).unwrap();
        let end = XiCharge::new(g(-3, 1, 1, 1), vec![q(2, 1)], g(-1, 1, 2, 1)).unwrap();
        let path = ChargePath::new(vec![start, end]).unwrap();
        let crossings = find_walls(&path, &[cv(-1, &[0], 0)]).unwrap();
        assert_eq!(crossings.len(), 1);
        match &crossings[0].time {
            WallTime::Quadratic { lo, hi, .. } => {
                assert!(lo < hi);
                assert!(*lo > BigRational::zero() && *hi < BigRational::one());
            }
            WallTime::Rational(t) => panic!("expected an irrational crossing, got {}", t),
        }
        // The chamber changes across the isolating interval.
        let (lo, hi) = crossings[0].time.bounds();
        let before = path.charge_at(&lo).unwrap();
        let after = path.charge_at(&hi).unwrap();
        assert_ne!(chamber_classify(&before), chamber_classify(&after));
    }

    #[test]
    fn phase_window_set_in_a_chamber_is_trivial() {
        let cfg = LatticeConfig::new(1, 1, MRule::Affine { slope: 0 }).unwrap();
        let window = Window::new(&cfg, 3, CurveClass(vec![0])).unwrap();
        // Deep inside the Dt chamber with a tiny tolerance.
        let xi = xi((-1, 5), (-1, 1));
        let v = cv(-1, &[0], 1);
        let got = s_eps_v(&xi, &v, &q(1, 100), &window).unwrap();
        assert_eq!(got, vec![v]);
    }

    #[test]
    fn phase_window_set_near_wall_collects_degree_classes() {
        let cfg = LatticeConfig::new(1, 1, MRule::Affine { slope: 0 }).unwrap();
        let window = Window::new(&cfg, 3, CurveClass(vec![0])).unwrap();
        // Close to the wall: z0 and z1 nearly aligned.
        let xi = XiCharge::new(g(-100, 1, 101, 1), vec![q(1, 1)], g(-1, 1, 1, 1)).unwrap();
        let v = cv(-2, &[0], 1);
        let got = s_eps_v(&xi, &v, &q(1, 10), &window).unwrap();
        for expected in [
            cv(-1, &[0], 0),
            cv(-1, &[0], 1),
            cv(-2, &[0], 0),
            cv(-2, &[0], 1),
            cv(0, &[0], 1),
        ] {
            assert!(got.contains(&expected), "missing {:?}", expected);
        }
    }

    #[test]
    fn phase_window_shrinks_with_tolerance() {
        let cfg = LatticeConfig::new(1, 1, MRule::Affine { slope: 0 }).unwrap();
        let window = Window::new(&cfg, 3, CurveClass(vec![0])).unwrap();
        let xi = XiCharge::new(g(-100, 1, 101, 1), vec![q(1, 1)], g(-1, 1, 1, 1)).unwrap();
        let v = cv(-2, &[0], 1);
        let wide = s_eps_v(&xi, &v, &q(1, 10), &window).unwrap();
        let narrow = s_eps_v(&xi, &v, &q(1, 100000), &window).unwrap();
        assert!(narrow.len() < wide.len());
        assert!(narrow.iter().all(|c| wide.contains(c)));
        assert_eq!(narrow, vec![v]);
    }

    #[test]
    fn eps_too_large_is_rejected() {
        let cfg = LatticeConfig::new(1, 1, MRule::Affine { slope: 0 }).unwrap();
        let window = Window::new(&cfg, 3, CurveClass(vec![0])).unwrap();
        // z1 close to the imaginary axis: little room toward phase 1/2.
        let xi = XiCharge::new(g(-1, 1, 1, 1), vec![q(1, 1)], g(-1, 100, 1, 1)).unwrap();
        let v = cv(-1, &[0], 1);
        assert!(matches!(
            s_eps_v(&xi, &v, &q(9, 10), &window),
            Err(Error::EpsTooLarge(_))
        ));
    }

    #[test]
    fn support_property_bound_holds_on_window() {
        let cfg = LatticeConfig::new(1, 1, MRule::Affine { slope: 1 }).unwrap();
        let window = Window::new(&cfg, 4, CurveClass(vec![2])).unwrap();
        let xi = XiCharge::new(g(-1, 3, 2, 1), vec![q(1, 2)], g(-5, 1, 1, 7)).unwrap();
        let c_sq = support_constant_sq(&xi);
        for v in crate::lattice::realizable_classes(&window) {
            let z = charge_eval(&xi, &v).unwrap();
            assert!(
                class_norm_sq(&v).unwrap() <= &c_sq * z.norm_sq(),
                "support bound fails at {:?}",
                v
            );
        }
    }

    #[test]
    fn oracle_limit_comparisons() {
        // A rank-split charge whose degree functional rotates through
        // the rank ray at t = 0: value on (-1, 0) is z1 (1 + i t).
        let z1 = g(-1, 1, 1, 1);
        let charge = ChargeFn {
            filt: FiltrationKind::RankSplit,
            c_s: GaussPoly {
                re: RatPoly(vec![q(1, 1), q(1, 1)]),
                im: RatPoly(vec![q(-1, 1), q(1, 1)]),
            },
            c_beta: vec![],
            c_r: GaussPoly::constant(&z1),
        };
        let w0 = cv(-1, &[], 0);
        let ox = cv(0, &[], 1);
        let above = PhaseOracle {
            charge: charge.clone(),
            side: Side::Above,
        };
        let below = PhaseOracle {
            charge,
            side: Side::Below,
        };
        assert_eq!(above.phase_cmp(&w0, &ox).unwrap(), Ordering::Greater);
        assert_eq!(below.phase_cmp(&w0, &ox).unwrap(), Ordering::Less);
    }
}
