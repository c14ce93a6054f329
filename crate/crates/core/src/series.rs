//! Exact truncated arithmetic in the completed monoid algebras of the
//! support sets `T` and `S`.
//!
//! A [`MonoidSeries`] holds finitely many rational coefficients indexed
//! by `(n, beta)` pairs inside a [`Window`]; the window realizes one
//! finite quotient of the completion, and all operations truncate to
//! it. `T`-supported series form a commutative ring with exp/log and
//! division by units; `S`-supported series form a module over that
//! ring, so products of two `S`-series are rejected.
//!
//! Coefficients are arbitrary-precision rationals. Canonical form never
//! stores zero coefficients, so equality is structural.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::lattice::{ClassVector, CurveClass, Support, Window};
use crate::{Error, Result};

/// Index of a single monomial `x^n y^beta`.
pub type Index = (i64, CurveClass);

/// A truncated element of the completed monoid algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidSeries {
    window: Window,
    support: Support,
    coeffs: BTreeMap<Index, BigRational>,
}

fn retains(window: &Window, support: Support, n: i64, beta: &CurveClass) -> bool {
    match support {
        Support::S => window.retains_s(n, beta),
        Support::T => window.retains_t(n, beta),
    }
}

impl MonoidSeries {
    pub fn zero(window: Window, support: Support) -> Self {
        MonoidSeries {
            window,
            support,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(window: Window, support: Support) -> Self {
        let mut s = Self::zero(window, support);
        let unit = (0, CurveClass::zero(s.window.curve_rank()));
        s.coeffs.insert(unit, BigRational::one());
        s
    }

    /// A single monomial `c * x^n y^beta`; the index must be retained by
    /// the window under the declared support.
    pub fn monomial(
        window: Window,
        support: Support,
        n: i64,
        beta: CurveClass,
        c: BigRational,
    ) -> Result<Self> {
        if !retains(&window, support, n, &beta) {
            return Err(Error::SupportViolation(format!(
                "index ({}, {:?}) not retained for {:?}-support",
                n, beta, support
            )));
        }
        let mut s = Self::zero(window, support);
        s.set(n, beta, c);
        Ok(s)
    }

    /// Builds a series from raw `(n, beta) -> coefficient` assignments.
    pub fn from_coeffs(
        window: Window,
        support: Support,
        entries: impl IntoIterator<Item = (i64, CurveClass, BigRational)>,
    ) -> Result<Self> {
        let mut s = Self::zero(window, support);
        for (n, beta, c) in entries {
            if !retains(&s.window, support, n, &beta) {
                return Err(Error::SupportViolation(format!(
                    "index ({}, {:?}) not retained for {:?}-support",
                    n, beta, support
                )));
            }
            let prev = s.get(n, &beta);
            s.set(n, beta, prev + c);
        }
        Ok(s)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn coeffs(&self) -> &BTreeMap<Index, BigRational> {
        &self.coeffs
    }

    pub fn get(&self, n: i64, beta: &CurveClass) -> BigRational {
        self.coeffs
            .get(&(n, beta.clone()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.get(0, &CurveClass::zero(self.window.curve_rank()))
    }

    fn set(&mut self, n: i64, beta: CurveClass, c: BigRational) {
        if c.is_zero() {
            self.coeffs.remove(&(n, beta));
        } else {
            self.coeffs.insert((n, beta), c);
        }
    }

    fn join_support(&self, other: &Self) -> Support {
        match (self.support, other.support) {
            (Support::T, Support::T) => Support::T,
            _ => Support::S,
        }
    }

    /// Coefficientwise sum. Windows must agree; mixing supports lands
    /// in the module.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.window != other.window {
            return Err(Error::WindowMismatch);
        }
        let mut out = self.clone();
        out.support = self.join_support(other);
        for ((n, beta), c) in &other.coeffs {
            let prev = out.get(*n, beta);
            out.set(*n, beta.clone(), prev + c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.window.clone(), self.support);
        if c.is_zero() {
            return out;
        }
        for ((n, beta), a) in &self.coeffs {
            out.coeffs.insert((*n, beta.clone()), a * c);
        }
        out
    }

    /// Truncated Cauchy product. `T * T` stays in the ring; `S * T` and
    /// `T * S` land in the module; `S * S` is rejected, as the
    /// `S`-support only carries a module structure.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.window != other.window {
            return Err(Error::WindowMismatch);
        }
        let support = match (self.support, other.support) {
            (Support::T, Support::T) => Support::T,
            (Support::S, Support::T) | (Support::T, Support::S) => Support::S,
            (Support::S, Support::S) => {
                return Err(Error::SupportViolation(
                    "product of two S-supported series".into(),
                ))
            }
        };
        let mut out = Self::zero(self.window.clone(), support);
        for ((n1, b1), c1) in &self.coeffs {
            for ((n2, b2), c2) in &other.coeffs {
                let n = n1 + n2;
                let beta = b1.add(b2);
                if retains(&out.window, support, n, &beta) {
                    let prev = out.get(n, &beta);
                    out.set(n, beta, prev + c1 * c2);
                }
            }
        }
        Ok(out)
    }

    /// Projection to a nested window; a ring homomorphism on the
    /// `T`-supported ring.
    pub fn project(&self, smaller: &Window) -> Result<Self> {
        if !smaller.is_sub_of(&self.window) {
            return Err(Error::NonNestedWindows);
        }
        let mut out = Self::zero(smaller.clone(), self.support);
        for ((n, beta), c) in &self.coeffs {
            if retains(smaller, self.support, *n, beta) {
                out.coeffs.insert((*n, beta.clone()), c.clone());
            }
        }
        Ok(out)
    }

    /// Truncated exponential of a `T`-supported series with vanishing
    /// constant term.
    pub fn exp(&self) -> Result<Self> {
        if self.support != Support::T {
            return Err(Error::SupportViolation(
                "exp is defined on the T-supported ring".into(),
            ));
        }
        if !self.constant_term().is_zero() {
            return Err(Error::NonZeroConstant);
        }
        let mut out = Self::one(self.window.clone(), Support::T);
        let mut power = Self::one(self.window.clone(), Support::T);
        let mut factorial = BigRational::one();
        let mut k = BigInt::one();
        loop {
            power = power.mul(self)?;
            if power.coeffs.is_empty() {
                break;
            }
            factorial *= BigRational::from(k.clone());
            out = out.add(&power.scale(&factorial.recip()))?;
            k += 1;
        }
        Ok(out)
    }

    /// Truncated logarithm of a `T`-supported series with constant term
    /// one.
    pub fn log(&self) -> Result<Self> {
        if self.support != Support::T {
            return Err(Error::SupportViolation(
                "log is defined on the T-supported ring".into(),
            ));
        }
        if !self.constant_term().is_one() {
            return Err(Error::NonUnit("log requires constant term 1".into()));
        }
        let one = Self::one(self.window.clone(), Support::T);
        let h = self.sub(&one)?;
        let mut out = Self::zero(self.window.clone(), Support::T);
        let mut power = Self::one(self.window.clone(), Support::T);
        let mut k = BigInt::zero();
        loop {
            power = power.mul(&h)?;
            if power.coeffs.is_empty() {
                break;
            }
            k += 1;
            let mut coeff = BigRational::from(k.clone()).recip();
            if (&k % BigInt::from(2)).is_zero() {
                coeff = -coeff;
            }
            out = out.add(&power.scale(&coeff))?;
        }
        Ok(out)
    }

    /// Inverse of a `T`-supported unit.
    pub fn invert(&self) -> Result<Self> {
        if self.support != Support::T {
            return Err(Error::SupportViolation(
                "inversion is defined on the T-supported ring".into(),
            ));
        }
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::NonUnit(
                "inversion requires a nonzero constant term".into(),
            ));
        }
        let normalized = self.scale(&c.recip());
        let one = Self::one(self.window.clone(), Support::T);
        let h = normalized.sub(&one)?;
        // 1/(1 + h) = sum of (-h)^j, nilpotent inside the window.
        let mut out = Self::one(self.window.clone(), Support::T);
        let mut power = Self::one(self.window.clone(), Support::T);
        let mut sign = true;
        loop {
            power = power.mul(&h)?;
            if power.coeffs.is_empty() {
                break;
            }
            let term = if sign {
                power.scale(&-BigRational::one())
            } else {
                power.clone()
            };
            out = out.add(&term)?;
            sign = !sign;
        }
        Ok(out.scale(&c.recip()))
    }

    /// Quotient by a unit of the `T`-supported ring; the result keeps
    /// the support of `self`.
    pub fn divide(&self, g: &Self) -> Result<Self> {
        self.mul(&g.invert()?)
    }

    /// Integer power; negative exponents go through the inverse (only
    /// available for `T`-supported units).
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.invert()?.pow(-e);
        }
        let mut out = Self::one(self.window.clone(), self.support);
        if self.support == Support::S && e != 1 {
            return Err(Error::SupportViolation(
                "powers of S-supported series are not defined".into(),
            ));
        }
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(out)
    }

    /// Re-declares the support of the series. Every stored index must
    /// be retained under the new support.
    pub fn with_support(&self, support: Support) -> Result<Self> {
        for (n, beta) in self.coeffs.keys() {
            if !retains(&self.window, support, *n, beta) {
                return Err(Error::SupportViolation(format!(
                    "index ({}, {:?}) not retained for {:?}-support",
                    n, beta, support
                )));
            }
        }
        let mut out = self.clone();
        out.support = support;
        Ok(out)
    }

    /// Restriction to the degree axis `beta = 0`; the sub-series of
    /// coefficients with vanishing curve class.
    pub fn degree_axis(&self) -> Self {
        let mut out = Self::zero(self.window.clone(), self.support);
        for ((n, beta), c) in &self.coeffs {
            if beta.is_zero() {
                out.coeffs.insert((*n, beta.clone()), c.clone());
            }
        }
        out
    }

    /// JSON value: window data plus entries `[n, beta, num, den]`
    /// sorted by index. Numerator and denominator are decimal strings
    /// so arbitrary-precision values survive the round trip.
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .coeffs
            .iter()
            .map(|((n, beta), c)| json!([n, beta.0, c.numer().to_string(), c.denom().to_string()]))
            .collect();
        json!({
            "window": { "k_cut": self.window.k_cut, "beta_cut": self.window.beta_cut.0 },
            "support": match self.support { Support::T => "T", Support::S => "S" },
            "entries": entries,
        })
    }

    /// Tab-separated table `n  beta...  coefficient`, one row per
    /// retained nonzero coefficient.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("n");
        for j in 0..self.window.curve_rank() {
            out.push_str(&format!("\tbeta{}", j));
        }
        out.push_str("\tcoefficient\n");
        for ((n, beta), c) in &self.coeffs {
            out.push_str(&n.to_string());
            for b in &beta.0 {
                out.push_str(&format!("\t{}", b));
            }
            out.push_str(&format!("\t{}\n", c));
        }
        out
    }
}

/// Product of a family of `T`-supported series with constant term one.
/// Truncation makes the product finite; commutativity makes it
/// order-independent.
pub fn infinite_product<I>(window: Window, factors: I) -> Result<MonoidSeries>
where
    I: IntoIterator<Item = MonoidSeries>,
{
    let mut out = MonoidSeries::one(window, Support::T);
    for f in factors {
        if !f.constant_term().is_one() {
            return Err(Error::NonUnit(
                "every factor of an infinite product must have constant term 1".into(),
            ));
        }
        out = out.mul(&f)?;
    }
    Ok(out)
}

/// The MacMahon series `M(sign * x)^chi` on the degree axis,
/// truncated to the window. `M(x)` is the plane-partition generating
/// series, the product over `k >= 1` of `(1 - x^k)^(-k)`.
pub fn macmahon(window: &Window, sign: i64, chi: i64) -> Result<MonoidSeries> {
    if sign != 1 && sign != -1 {
        return Err(Error::Config("macmahon sign must be +1 or -1".into()));
    }
    let zero_beta = CurveClass::zero(window.curve_rank());
    let mut base = MonoidSeries::one(window.clone(), Support::T);
    for k in 1..window.t_cut().max(1) {
        // (1 - (sign x)^k)^(-k) expanded by the negative binomial series.
        let mut factor = MonoidSeries::one(window.clone(), Support::T);
        let mut j: i64 = 1;
        while k * j < window.t_cut() {
            let c = binomial(k + j - 1, j);
            let s = if sign == -1 && (k * j) % 2 == 1 {
                -c
            } else {
                c
            };
            let prev = factor.get(k * j, &zero_beta);
            factor.set(
                k * j,
                zero_beta.clone(),
                prev + BigRational::from(s),
            );
            j += 1;
        }
        base = base.mul(&factor)?;
    }
    if chi >= 0 {
        base.pow(chi)
    } else {
        MonoidSeries::one(window.clone(), Support::T).divide(&base.pow(-chi)?)
    }
}

fn binomial(n: i64, k: i64) -> BigInt {
    let mut out = BigInt::one();
    for i in 0..k {
        out = out * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    out
}

/// Scalar coefficients indexed along a single ray: `coeffs[k]` is the
/// value attached to `k * primitive`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayTable {
    pub primitive: ClassVector,
    pub coeffs: BTreeMap<u32, BigRational>,
}

impl RayTable {
    pub fn new(primitive: ClassVector) -> Result<Self> {
        if primitive.is_zero() {
            return Err(Error::ZeroClass);
        }
        Ok(RayTable {
            primitive,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn set(&mut self, step: u32, value: BigRational) {
        if value.is_zero() {
            self.coeffs.remove(&step);
        } else {
            self.coeffs.insert(step, value);
        }
    }

    pub fn get(&self, step: u32) -> BigRational {
        self.coeffs
            .get(&step)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Which multiple of the primitive class `v` is; errors when `v`
    /// is off the ray.
    pub fn step_of(&self, v: &ClassVector) -> Result<u32> {
        let p = &self.primitive;
        let mut k: Option<i64> = None;
        let mut check = |num: i64, den: i64| -> bool {
            if den == 0 {
                return num == 0;
            }
            if num % den != 0 {
                return false;
            }
            let q = num / den;
            match k {
                None => {
                    k = Some(q);
                    true
                }
                Some(prev) => prev == q,
            }
        };
        let ok = check(v.s, p.s)
            && check(v.r, p.r)
            && v.beta.0.iter().zip(&p.beta.0).all(|(&a, &b)| check(a, b));
        match (ok, k) {
            (true, Some(q)) if q > 0 => Ok(q as u32),
            _ => Err(Error::OffRay),
        }
    }
}

/// The alternating-harmonic resummation along a ray: the value at `v`
/// of `sum over ordered decompositions v = v_1 + ... + v_l` of
/// `((-1)^(l-1) / l) * product of delta-values`, with all parts on the
/// ray of the table. This is the logarithm of `1 + delta` read off in
/// the one-variable completed algebra of the ray.
pub fn epsilon_from_delta(delta: &RayTable, v: &ClassVector) -> Result<BigRational> {
    let k = delta.step_of(v)?;
    let mut total = BigRational::zero();
    for composition in compositions(k) {
        let l = composition.len();
        let mut prod = BigRational::one();
        for part in &composition {
            prod *= delta.get(*part);
            if prod.is_zero() {
                break;
            }
        }
        if prod.is_zero() {
            continue;
        }
        let mut weight = BigRational::from(BigInt::from(l as i64)).recip();
        if l % 2 == 0 {
            weight = -weight;
        }
        total += weight * prod;
    }
    Ok(total)
}

/// Inverse of [`epsilon_from_delta`]: exponential resummation,
/// `delta = exp(epsilon) - 1` along the ray.
pub fn delta_from_epsilon(eps: &RayTable, v: &ClassVector) -> Result<BigRational> {
    let k = eps.step_of(v)?;
    let mut total = BigRational::zero();
    for composition in compositions(k) {
        let l = composition.len();
        let mut prod = BigRational::one();
        for part in &composition {
            prod *= eps.get(*part);
            if prod.is_zero() {
                break;
            }
        }
        if prod.is_zero() {
            continue;
        }
        total += prod / factorial(l as i64);
    }
    Ok(total)
}

/// `n!` as a rational, for exact weight computations.
pub fn factorial(n: i64) -> BigRational {
    let mut out = BigInt::one();
    for i in 2..=n {
        out *= BigInt::from(i);
    }
    BigRational::from(out)
}

/// Ordered compositions of `k` into positive parts.
fn compositions(k: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![];
    }
    let mut out = Vec::new();
    let mut partial = Vec::new();
    fn rec(rest: u32, partial: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
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
    rec(k, &mut partial, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{LatticeConfig, MRule};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn window(k_cut: i64) -> Window {
        let cfg = LatticeConfig::new(0, 1, MRule::Affine { slope: 0 }).unwrap();
        Window::new(&cfg, k_cut, CurveClass(vec![])).unwrap()
    }

    fn x_series(k_cut: i64, coeffs: &[i64]) -> MonoidSeries {
        MonoidSeries::from_coeffs(
            window(k_cut),
            Support::T,
            coeffs
                .iter()
                .enumerate()
                .map(|(n, &c)| (n as i64, CurveClass(vec![]), q(c, 1))),
        )
        .unwrap()
    }

    #[test]
    fn one_plus_x_squared() {
        let f = x_series(4, &[1, 1]);
        let g = f.mul(&f).unwrap();
        assert_eq!(g, x_series(4, &[1, 2, 1]));
    }

    #[test]
    fn product_of_s_supports_is_rejected() {
        let w = window(4);
        let f = MonoidSeries::one(w.clone(), Support::S);
        assert!(matches!(f.mul(&f), Err(Error::SupportViolation(_))));
    }

    #[test]
    fn window_mismatch_is_rejected() {
        let f = x_series(4, &[1, 1]);
        let g = x_series(5, &[1, 1]);
        assert!(matches!(f.add(&g), Err(Error::WindowMismatch)));
    }

    #[test]
    fn projection_truncates_and_composes() {
        let f = x_series(3, &[1, 1, 1]);
        let small = window(2);
        let p = f.project(&small).unwrap();
        assert_eq!(p, x_series(2, &[1, 1]));
        let smaller = window(1);
        assert_eq!(p.project(&smaller).unwrap(), f.project(&smaller).unwrap());
        assert!(matches!(
            x_series(2, &[1]).project(&window(3)),
            Err(Error::NonNestedWindows)
        ));
    }

    #[test]
    fn exp_of_scalar_multiple() {
        // exp(a x) at k_cut = 4 -> 1 + a x + a^2 x^2 / 2 + a^3 x^3 / 6 with a = 3.
        let f =
            MonoidSeries::monomial(window(4), Support::T, 1, CurveClass(vec![]), q(3, 1)).unwrap();
        let e = f.exp().unwrap();
        assert_eq!(e.get(0, &CurveClass(vec![])), q(1, 1));
        assert_eq!(e.get(1, &CurveClass(vec![])), q(3, 1));
        assert_eq!(e.get(2, &CurveClass(vec![])), q(9, 2));
        assert_eq!(e.get(3, &CurveClass(vec![])), q(9, 2));
    }

    #[test]
    fn exp_log_are_mutually_inverse() {
        let f = MonoidSeries::from_coeffs(
            window(6),
            Support::T,
            vec![
                (1, CurveClass(vec![]), q(2, 3)),
                (2, CurveClass(vec![]), q(-1, 5)),
                (3, CurveClass(vec![]), q(7, 2)),
            ],
        )
        .unwrap();
        assert_eq!(f.exp().unwrap().log().unwrap(), f);
        let g = f.exp().unwrap();
        assert_eq!(g.log().unwrap().exp().unwrap(), g);
    }

    #[test]
    fn exp_rejects_nonzero_constant() {
        let f = x_series(3, &[1, 1]);
        assert!(matches!(f.exp(), Err(Error::NonZeroConstant)));
    }

    #[test]
    fn divide_inverts_multiplication() {
        let f = x_series(5, &[2, 1, 0, 3]);
        let g = x_series(5, &[1, -4, 2]);
        let h = f.mul(&g).unwrap().divide(&g).unwrap();
        assert_eq!(h, f);
        let zero_const = x_series(5, &[0, 1]);
        assert!(matches!(f.divide(&zero_const), Err(Error::NonUnit(_))));
    }

    #[test]
    fn macmahon_low_order_coefficients() {
        let m = macmahon(&window(7), 1, 1).unwrap();
        let expect = [1, 1, 3, 6, 13, 24, 48];
        for (n, &c) in expect.iter().enumerate() {
            assert_eq!(m.get(n as i64, &CurveClass(vec![])), q(c, 1));
        }
        let m_neg = macmahon(&window(4), -1, 1).unwrap();
        for (n, &c) in [1i64, -1, 3, -6].iter().enumerate() {
            assert_eq!(m_neg.get(n as i64, &CurveClass(vec![])), q(c, 1));
        }
        assert_eq!(
            macmahon(&window(5), 1, 0).unwrap(),
            MonoidSeries::one(window(5), Support::T)
        );
    }

    #[test]
    fn macmahon_negative_power_inverts() {
        let m = macmahon(&window(8), 1, 3).unwrap();
        let m_inv = macmahon(&window(8), 1, -3).unwrap();
        assert_eq!(
            m.mul(&m_inv).unwrap(),
            MonoidSeries::one(window(8), Support::T)
        );
    }

    #[test]
    fn log_macmahon_divisor_sums() {
        // The x^n coefficient of log M(x) is (sum of k^2 over k | n) / n.
        let m = macmahon(&window(21), 1, 1).unwrap();
        let lm = m.log().unwrap();
        for n in 1..21i64 {
            let mut expect = BigRational::zero();
            for k in 1..=n {
                if n % k == 0 {
                    expect += q(k * k, n);
                }
            }
            assert_eq!(lm.get(n, &CurveClass(vec![])), expect, "order {}", n);
        }
    }

    #[test]
    fn infinite_product_properties() {
        let w = window(6);
        let factors: Vec<MonoidSeries> = (1..6)
            .map(|k| {
                let mono =
                    MonoidSeries::monomial(w.clone(), Support::T, k, CurveClass(vec![]), q(k, 1))
                        .unwrap();
                mono.add(&MonoidSeries::one(w.clone(), Support::T)).unwrap()
            })
            .collect();
        let forward = infinite_product(w.clone(), factors.clone()).unwrap();
        let mut reversed = factors;
        reversed.reverse();
        let backward = infinite_product(w.clone(), reversed).unwrap();
        assert_eq!(forward, backward);
        assert_eq!(
            infinite_product(w.clone(), Vec::new()).unwrap(),
            MonoidSeries::one(w, Support::T)
        );
    }

    #[test]
    fn infinite_product_rejects_non_units() {
        let w = window(4);
        let f = x_series(4, &[2, 1]);
        assert!(matches!(
            infinite_product(w, vec![f]),
            Err(Error::NonUnit(_))
        ));
    }

    #[test]
    fn two_variable_product_respects_window() {
        let cfg = LatticeConfig::new(1, 1, MRule::Affine { slope: 1 }).unwrap();
        let w = Window::new(&cfg, 3, CurveClass(vec![2])).unwrap();
        // f is S-supported with a negative-degree term allowed by m.
        let f = MonoidSeries::from_coeffs(
            w.clone(),
            Support::S,
            vec![
                (-1, CurveClass(vec![1]), q(1, 1)),
                (0, CurveClass(vec![0]), q(1, 1)),
            ],
        )
        .unwrap();
        let g = MonoidSeries::from_coeffs(
            w.clone(),
            Support::T,
            vec![
                (0, CurveClass(vec![0]), q(1, 1)),
                (1, CurveClass(vec![1]), q(2, 1)),
            ],
        )
        .unwrap();
        let h = f.mul(&g).unwrap();
        assert_eq!(h.support(), Support::S);
        assert_eq!(h.get(-1, &CurveClass(vec![1])), q(1, 1));
        assert_eq!(h.get(0, &CurveClass(vec![2])), q(2, 1));
        // T-side coefficient stays.
        assert_eq!(h.get(1, &CurveClass(vec![1])), q(2, 1));
    }

    #[test]
    fn epsilon_from_delta_two_step_ray() {
        let p = ClassVector::from_parts(-1, &[], 0);
        let mut delta = RayTable::new(p.clone()).unwrap();
        let a = q(5, 7);
        let b = q(-3, 2);
        delta.set(1, a.clone());
        delta.set(2, b.clone());
        let v1 = ClassVector::from_parts(-1, &[], 0);
        let v2 = ClassVector::from_parts(-2, &[], 0);
        assert_eq!(epsilon_from_delta(&delta, &v1).unwrap(), a.clone());
        assert_eq!(
            epsilon_from_delta(&delta, &v2).unwrap(),
            b - a.clone() * a / q(2, 1)
        );
    }

    #[test]
    fn epsilon_delta_round_trip() {
        let p = ClassVector::from_parts(-1, &[], 0);
        let mut delta = RayTable::new(p.clone()).unwrap();
        for (k, (n, d)) in [
            (1, (3, 4)),
            (2, (-1, 3)),
            (3, (7, 5)),
            (4, (2, 9)),
            (5, (-8, 3)),
        ] {
            delta.set(k, q(n, d));
        }
        let mut eps = RayTable::new(p.clone()).unwrap();
        for k in 1..=5u32 {
            let v = ClassVector::from_parts(-(k as i64), &[], 0);
            eps.set(k, epsilon_from_delta(&delta, &v).unwrap());
        }
        for k in 1..=5u32 {
            let v = ClassVector::from_parts(-(k as i64), &[], 0);
            assert_eq!(delta_from_epsilon(&eps, &v).unwrap(), delta.get(k));
        }
    }

    #[test]
    fn ray_table_rejects_off_ray_classes() {
        let p = ClassVector::from_parts(-1, &[0], 0);
        let delta = RayTable::new(p).unwrap();
        let off = ClassVector::from_parts(-1, &[1], 0);
        assert!(matches!(
            epsilon_from_delta(&delta, &off),
            Err(Error::OffRay)
        ));
    }

    #[test]
    fn json_entries_are_sorted_and_exact() {
        let f = MonoidSeries::from_coeffs(
            window(3),
            Support::T,
            vec![
                (2, CurveClass(vec![]), q(1, 3)),
                (0, CurveClass(vec![]), q(-7, 1)),
            ],
        )
        .unwrap();
        let v = f.to_json();
        let entries = v["entries"].as_array().unwrap();
        assert_eq!(entries[0][0], 0);
        assert_eq!(entries[0][2], "-7");
        assert_eq!(entries[1][3], "3");
    }
}
