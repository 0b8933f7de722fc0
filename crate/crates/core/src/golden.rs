//! Exact arithmetic: the golden ring Z[φ], the cyclotomic lattice Z[ζ] with
//! ζ = exp(iπ/5), rigid motions, and the exact planar predicates built on them.
//!
//! Coordinates never touch floating point except in [`LatticePoint::embed`].
//! Comparisons along an axis use the identities
//! `2·Re(p) ∈ Z[φ]` and `Im(p) / sin36° ∈ Z[φ]`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

pub const PHI_F64: f64 = 1.618_033_988_749_895;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("integer overflow in exact arithmetic")]
pub struct Overflow;

fn ck(v: Option<i64>) -> Result<i64, Overflow> {
    v.ok_or(Overflow)
}

/// `a + b·φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct GoldenInt {
    pub a: i64,
    pub b: i64,
}

impl GoldenInt {
    pub const ZERO: GoldenInt = GoldenInt { a: 0, b: 0 };
    pub const ONE: GoldenInt = GoldenInt { a: 1, b: 0 };
    pub const PHI: GoldenInt = GoldenInt { a: 0, b: 1 };

    pub const fn new(a: i64, b: i64) -> Self {
        GoldenInt { a, b }
    }

    pub fn checked_add(self, o: Self) -> Result<Self, Overflow> {
        Ok(GoldenInt::new(ck(self.a.checked_add(o.a))?, ck(self.b.checked_add(o.b))?))
    }

    pub fn checked_sub(self, o: Self) -> Result<Self, Overflow> {
        Ok(GoldenInt::new(ck(self.a.checked_sub(o.a))?, ck(self.b.checked_sub(o.b))?))
    }

    /// (a+bφ)(c+dφ) = ac+bd + (ad+bc+bd)φ
    pub fn checked_mul(self, o: Self) -> Result<Self, Overflow> {
        let ac = ck(self.a.checked_mul(o.a))?;
        let bd = ck(self.b.checked_mul(o.b))?;
        let ad = ck(self.a.checked_mul(o.b))?;
        let bc = ck(self.b.checked_mul(o.a))?;
        Ok(GoldenInt::new(ck(ac.checked_add(bd))?, ck(ck(ad.checked_add(bc))?.checked_add(bd))?))
    }

    pub fn scale(self, k: i64) -> Self {
        GoldenInt::new(self.a * k, self.b * k)
    }

    /// Galois conjugate φ ↦ 1−φ.
    pub fn conj(self) -> Self {
        GoldenInt::new(self.a + self.b, -self.b)
    }

    /// Field norm `x · conj(x) = a² + ab − b²`.
    pub fn norm(self) -> i128 {
        let (a, b) = (self.a as i128, self.b as i128);
        a * a + a * b - b * b
    }

    pub fn value(self) -> f64 {
        self.a as f64 + self.b as f64 * PHI_F64
    }

    /// Exact sign, computed as the sign of `(2a+b) + b√5`.
    pub fn signum(self) -> i32 {
        let x = 2 * self.a as i128 + self.b as i128;
        let y = self.b as i128;
        let sx = x.signum();
        let sy = y.signum();
        if sx >= 0 && sy >= 0 {
            return (sx + sy).signum() as i32;
        }
        if sx <= 0 && sy <= 0 {
            return -1;
        }
        // opposite signs: compare x² with 5y²
        let d = x * x - 5 * y * y;
        (if sx > 0 { d.signum() } else { -d.signum() }) as i32
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// φⁿ for n ≥ 0 (Fibonacci coefficients), φ⁻ⁿ through the conjugate.
    pub fn phi_pow(n: i32) -> Self {
        let mut r = GoldenInt::ONE;
        let step = if n >= 0 { GoldenInt::PHI } else { GoldenInt::new(-1, 1) };
        for _ in 0..n.unsigned_abs() {
            r = r * step;
        }
        r
    }

    /// Exact quotient when it exists in Z[φ].
    pub fn div_exact(self, d: GoldenInt) -> Option<GoldenInt> {
        let n = d.norm();
        if n == 0 {
            return None;
        }
        let num = self.checked_mul(d.conj()).ok()?;
        let (a, b) = (num.a as i128, num.b as i128);
        if a % n != 0 || b % n != 0 {
            return None;
        }
        Some(GoldenInt::new((a / n) as i64, (b / n) as i64))
    }
}

impl Add for GoldenInt {
    type Output = GoldenInt;
    fn add(self, o: Self) -> Self {
        self.checked_add(o).expect("golden overflow")
    }
}

impl Sub for GoldenInt {
    type Output = GoldenInt;
    fn sub(self, o: Self) -> Self {
        self.checked_sub(o).expect("golden overflow")
    }
}

impl Mul for GoldenInt {
    type Output = GoldenInt;
    fn mul(self, o: Self) -> Self {
        self.checked_mul(o).expect("golden overflow")
    }
}

impl Neg for GoldenInt {
    type Output = GoldenInt;
    fn neg(self) -> Self {
        GoldenInt::new(-self.a, -self.b)
    }
}

impl fmt::Display for GoldenInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}φ", self.a, self.b)
    }
}

/// Product in Z[φ]; the checked form of `x * y`.
pub fn gmul(x: GoldenInt, y: GoldenInt) -> Result<GoldenInt, Overflow> {
    x.checked_mul(y)
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A golden value with an integer denominator: `num / den`, kept reduced, `den > 0`.
///
/// Half-tiles have half-integer areas and the T12 family lives on an 1/11 grid,
/// so areas are reported in this form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GoldenRat {
    pub num: GoldenInt,
    pub den: i64,
}

impl GoldenRat {
    pub fn new(num: GoldenInt, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let s = den.signum();
        let g = gcd(gcd(num.a, num.b), den).max(1);
        GoldenRat { num: GoldenInt::new(s * num.a / g, s * num.b / g), den: s * den / g }
    }

    pub fn int(g: GoldenInt) -> Self {
        GoldenRat { num: g, den: 1 }
    }

    pub fn zero() -> Self {
        GoldenRat::int(GoldenInt::ZERO)
    }

    pub fn value(self) -> f64 {
        self.num.value() / self.den as f64
    }

    pub fn signum(self) -> i32 {
        self.num.signum()
    }

    pub fn as_int(self) -> Option<GoldenInt> {
        (self.den == 1).then_some(self.num)
    }

    pub fn mul_int(self, k: i64) -> Self {
        GoldenRat::new(self.num.scale(k), self.den)
    }

    pub fn mul_golden(self, g: GoldenInt) -> Self {
        GoldenRat::new(self.num * g, self.den)
    }

    pub fn div_int(self, k: i64) -> Self {
        GoldenRat::new(self.num, self.den * k)
    }
}

impl Add for GoldenRat {
    type Output = GoldenRat;
    fn add(self, o: Self) -> Self {
        let l = self.den / gcd(self.den, o.den) * o.den;
        GoldenRat::new(self.num.scale(l / self.den) + o.num.scale(l / o.den), l)
    }
}

impl Sub for GoldenRat {
    type Output = GoldenRat;
    fn sub(self, o: Self) -> Self {
        self + GoldenRat { num: -o.num, den: o.den }
    }
}

impl Mul for GoldenRat {
    type Output = GoldenRat;
    fn mul(self, o: Self) -> Self {
        GoldenRat::new(self.num * o.num, self.den * o.den)
    }
}

impl std::iter::Sum for GoldenRat {
    fn sum<I: Iterator<Item = GoldenRat>>(it: I) -> Self {
        it.fold(GoldenRat::zero(), |a, b| a + b)
    }
}

impl fmt::Display for GoldenRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/{}", self.num, self.den)
        }
    }
}

// sin(36k°)/sin36° and 2cos(36k°), both in Z[φ]
const SIN: [GoldenInt; 10] = [
    GoldenInt::new(0, 0),
    GoldenInt::new(1, 0),
    GoldenInt::new(0, 1),
    GoldenInt::new(0, 1),
    GoldenInt::new(1, 0),
    GoldenInt::new(0, 0),
    GoldenInt::new(-1, 0),
    GoldenInt::new(0, -1),
    GoldenInt::new(0, -1),
    GoldenInt::new(-1, 0),
];
const COS2: [GoldenInt; 10] = [
    GoldenInt::new(2, 0),
    GoldenInt::new(0, 1),
    GoldenInt::new(-1, 1),
    GoldenInt::new(1, -1),
    GoldenInt::new(0, -1),
    GoldenInt::new(-2, 0),
    GoldenInt::new(0, -1),
    GoldenInt::new(1, -1),
    GoldenInt::new(-1, 1),
    GoldenInt::new(0, 1),
];

/// `Σ cᵢ ζⁱ`, reduced by `ζ⁴ = ζ³ − ζ² + ζ − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct LatticePoint(pub [i64; 4]);

impl LatticePoint {
    pub const ZERO: LatticePoint = LatticePoint([0; 4]);

    pub const fn new(c0: i64, c1: i64, c2: i64, c3: i64) -> Self {
        LatticePoint([c0, c1, c2, c3])
    }

    /// ζᵏ as a lattice point.
    pub fn zeta(k: i32) -> Self {
        LatticePoint::new(1, 0, 0, 0).rotate(k)
    }

    /// `φᵉ·ζᵏ`, e ≥ 0.
    pub fn phi_zeta(e: u32, k: i32) -> Self {
        LatticePoint::zeta(k).mul_golden(GoldenInt::phi_pow(e as i32))
    }

    pub fn checked_add(self, o: Self) -> Result<Self, Overflow> {
        let mut r = [0; 4];
        for (i, v) in r.iter_mut().enumerate() {
            *v = ck(self.0[i].checked_add(o.0[i]))?;
        }
        Ok(LatticePoint(r))
    }

    pub fn checked_sub(self, o: Self) -> Result<Self, Overflow> {
        self.checked_add(-o)
    }

    pub fn scale(self, k: i64) -> Self {
        LatticePoint(self.0.map(|c| c * k))
    }

    /// Multiplication by ζ.
    pub fn rot1(self) -> Self {
        let [c0, c1, c2, c3] = self.0;
        LatticePoint::new(-c3, c0 + c3, c1 - c3, c2 + c3)
    }

    pub fn rotate(self, k: i32) -> Self {
        let mut p = self;
        for _ in 0..k.rem_euclid(10) {
            p = p.rot1();
        }
        p
    }

    /// Complex conjugation (reflection in the real axis).
    pub fn conj(self) -> Self {
        let [c0, c1, c2, c3] = self.0;
        LatticePoint::new(c0 + c1, -c1, c1 - c3, -c1 - c2)
    }

    /// Multiplication by φ = ζ + ζ⁹.
    pub fn mul_phi(self) -> Self {
        self.rot1() + self.rotate(9)
    }

    pub fn checked_mul_phi(self) -> Result<Self, Overflow> {
        let m = self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
        if m > (i64::MAX as u64) / 8 {
            return Err(Overflow);
        }
        Ok(self.mul_phi())
    }

    /// Division by φ (multiplication by φ−1); always exact since φ is a unit.
    pub fn div_phi(self) -> Self {
        self.mul_phi() - self
    }

    pub fn mul_golden(self, g: GoldenInt) -> Self {
        self.scale(g.a) + self.mul_phi().scale(g.b)
    }

    /// `2·Re(p)`.
    pub fn x2(self) -> GoldenInt {
        (0..4).fold(GoldenInt::ZERO, |s, i| s + COS2[i].scale(self.0[i]))
    }

    /// `Im(p)/sin36°`.
    pub fn ys(self) -> GoldenInt {
        (0..4).fold(GoldenInt::ZERO, |s, i| s + SIN[i].scale(self.0[i]))
    }

    /// `2|p|²`.
    pub fn norm2x(self) -> GoldenInt {
        dot2(self, self)
    }

    pub fn embed(self) -> (f64, f64) {
        let mut x = 0.0;
        let mut y = 0.0;
        for (i, c) in self.0.iter().enumerate() {
            let a = std::f64::consts::PI / 5.0 * i as f64;
            x += *c as f64 * a.cos();
            y += *c as f64 * a.sin();
        }
        (x, y)
    }

    pub fn max_abs(self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, o: Self) -> Self {
        self.checked_add(o).expect("lattice overflow")
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> Self {
        LatticePoint(self.0.map(|c| -c))
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

pub fn rotate(p: LatticePoint, k: i32) -> LatticePoint {
    p.rotate(k)
}

/// `Im(conj(u)·v) / sin36°`: the cross product in sin36° units.
pub fn cross(u: LatticePoint, v: LatticePoint) -> GoldenInt {
    let mut s = GoldenInt::ZERO;
    for i in 0..4 {
        if u.0[i] == 0 {
            continue;
        }
        for j in 0..4 {
            if v.0[j] != 0 {
                s = s + SIN[(j + 10 - i) % 10].scale(u.0[i] * v.0[j]);
            }
        }
    }
    s
}

/// `2·Re(conj(u)·v)`: twice the dot product.
pub fn dot2(u: LatticePoint, v: LatticePoint) -> GoldenInt {
    let mut s = GoldenInt::ZERO;
    for i in 0..4 {
        if u.0[i] == 0 {
            continue;
        }
        for j in 0..4 {
            if v.0[j] != 0 {
                s = s + COS2[(j + 10 - i) % 10].scale(u.0[i] * v.0[j]);
            }
        }
    }
    s
}

/// Sign of the turn a→b→c: +1 left, −1 right, 0 collinear.
pub fn orient(a: LatticePoint, b: LatticePoint, c: LatticePoint) -> i32 {
    cross(b - a, c - a).signum()
}

/// Rotation by `rot·36°`, preceded by reflection in the real axis when `refl`,
/// followed by translation by `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Placement {
    pub rot: u8,
    pub refl: bool,
    pub t: LatticePoint,
}

impl Placement {
    pub const IDENTITY: Placement = Placement { rot: 0, refl: false, t: LatticePoint::ZERO };

    pub fn new(rot: i32, refl: bool, t: LatticePoint) -> Self {
        Placement { rot: rot.rem_euclid(10) as u8, refl, t }
    }

    pub fn translation(t: LatticePoint) -> Self {
        Placement::new(0, false, t)
    }

    pub fn linear(&self, p: LatticePoint) -> LatticePoint {
        let q = if self.refl { p.conj() } else { p };
        q.rotate(self.rot as i32)
    }

    pub fn apply(&self, p: LatticePoint) -> LatticePoint {
        self.linear(p) + self.t
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Placement) -> Placement {
        let kb = if self.refl { -(other.rot as i32) } else { other.rot as i32 };
        Placement::new(self.rot as i32 + kb, self.refl ^ other.refl, self.apply(other.t))
    }

    pub fn inverse(&self) -> Placement {
        let rot = if self.refl { self.rot as i32 } else { -(self.rot as i32) };
        let lin = Placement::new(rot, self.refl, LatticePoint::ZERO);
        Placement { t: -lin.apply(self.t), ..lin }
    }

    /// Conjugate the translation into a frame scaled by `g` (lengths × g).
    pub fn scaled(&self, g: GoldenInt) -> Placement {
        Placement { t: self.t.mul_golden(g), ..*self }
    }
}

pub fn apply(pl: &Placement, p: LatticePoint) -> LatticePoint {
    pl.apply(p)
}

/// Total order on directions by angle in [0, 2π), exact.
pub fn angle_cmp(u: LatticePoint, v: LatticePoint) -> Ordering {
    fn half(p: LatticePoint) -> u8 {
        let y = p.ys().signum();
        if y > 0 || (y == 0 && p.x2().signum() > 0) {
            0
        } else {
            1
        }
    }
    half(u).cmp(&half(v)).then_with(|| 0.cmp(&cross(u, v).signum()))
}

/// Index k with `v = φᵉ·ζᵏ` for the given scale exponent, if any.
pub fn direction_index(v: LatticePoint, e: u32) -> Option<i32> {
    let base = LatticePoint::phi_zeta(e, 0);
    let mut p = base;
    for k in 0..10 {
        if p == v {
            return Some(k);
        }
        p = p.rot1();
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// Is `p` on the closed segment `ab`?
pub fn on_segment(p: LatticePoint, a: LatticePoint, b: LatticePoint) -> bool {
    if cross(b - a, p - a).signum() != 0 {
        return false;
    }
    dot2(p - a, b - a).signum() >= 0 && dot2(p - b, a - b).signum() >= 0
}

/// Is `p` strictly between `a` and `b` on the segment?
pub fn in_segment_interior(p: LatticePoint, a: LatticePoint, b: LatticePoint) -> bool {
    p != a && p != b && on_segment(p, a, b)
}

/// Winding-number point location against a simple polygon.
pub fn locate(p: LatticePoint, poly: &[LatticePoint]) -> Location {
    let n = poly.len();
    let py = p.ys();
    let mut wn = 0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if on_segment(p, a, b) {
            return Location::Boundary;
        }
        let ay = (a.ys() - py).signum();
        let by = (b.ys() - py).signum();
        if ay <= 0 {
            if by > 0 && orient(a, b, p) > 0 {
                wn += 1;
            }
        } else if by <= 0 && orient(a, b, p) < 0 {
            wn -= 1;
        }
    }
    if wn != 0 {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// Twice the signed area in sin36° units (shoelace).
pub fn area2(poly: &[LatticePoint]) -> GoldenInt {
    let n = poly.len();
    (0..n).fold(GoldenInt::ZERO, |s, i| s + cross(poly[i], poly[(i + 1) % n]))
}

/// Do the closed segments ab and cd share at least one point?
pub fn segments_touch(a: LatticePoint, b: LatticePoint, c: LatticePoint, d: LatticePoint) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d)
}

/// Do the segments overlap in a piece of positive length?
pub fn segments_overlap(a: LatticePoint, b: LatticePoint, c: LatticePoint, d: LatticePoint) -> bool {
    if orient(a, b, c) != 0 || orient(a, b, d) != 0 {
        return false;
    }
    let pts = [c, d].iter().filter(|p| on_segment(**p, a, b)).count()
        + [a, b].iter().filter(|p| on_segment(**p, c, d)).count();
    // collinear: overlap has positive length unless the only contact is a shared endpoint
    if pts == 0 {
        return false;
    }
    !(pts == 2 && (a == c || a == d || b == c || b == d) && {
        let shared = if a == c || a == d { a } else { b };
        let oa = if shared == a { b } else { a };
        let oc = if shared == c { d } else { c };
        dot2(oa - shared, oc - shared).signum() < 0
    })
}

/// Drop vertices where the boundary goes straight on; result is counterclockwise.
pub fn simplify(poly: &[LatticePoint]) -> Vec<LatticePoint> {
    let n = poly.len();
    let mut out: Vec<LatticePoint> =
        (0..n).filter(|&i| orient(poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]) != 0).map(|i| poly[i]).collect();
    if area2(&out).signum() < 0 {
        out.reverse();
    }
    out
}

/// Interiors of two convex counterclockwise polygons are disjoint.
pub fn convex_disjoint(p: &[LatticePoint], q: &[LatticePoint]) -> bool {
    fn separates(p: &[LatticePoint], q: &[LatticePoint]) -> bool {
        let n = p.len();
        (0..n).any(|i| {
            let a = p[i];
            let b = p[(i + 1) % n];
            q.iter().all(|&v| orient(a, b, v) <= 0)
        })
    }
    separates(p, q) || separates(q, p)
}

/// Ear-clipping triangulation of a simple counterclockwise polygon, exact.
pub fn triangulate(poly: &[LatticePoint]) -> Vec<[LatticePoint; 3]> {
    let mut idx: Vec<usize> = (0..poly.len()).collect();
    let mut out = Vec::new();
    let mut guard = 0;
    while idx.len() > 3 {
        let n = idx.len();
        let mut clipped = false;
        for i in 0..n {
            let (a, b, c) = (poly[idx[(i + n - 1) % n]], poly[idx[i]], poly[idx[(i + 1) % n]]);
            let turn = orient(a, b, c);
            if turn < 0 {
                continue;
            }
            if turn == 0 {
                idx.remove(i);
                clipped = true;
                break;
            }
            let blocked = idx.iter().any(|&j| {
                let p = poly[j];
                p != a && p != b && p != c && locate(p, &[a, b, c]) != Location::Outside
            });
            if !blocked {
                out.push([a, b, c]);
                idx.remove(i);
                clipped = true;
                break;
            }
        }
        guard += 1;
        assert!(clipped && guard < 10_000, "polygon is not simple");
    }
    if idx.len() == 3 && orient(poly[idx[0]], poly[idx[1]], poly[idx[2]]) > 0 {
        out.push([poly[idx[0]], poly[idx[1]], poly[idx[2]]]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64) -> GoldenInt {
        GoldenInt::new(a, b)
    }

    #[test]
    fn products() {
        assert_eq!(g(0, 1) * g(0, 1), g(1, 1));
        assert_eq!(g(1, 1) * g(0, 1), g(1, 2));
        assert_eq!(g(2, 1) * g(2, 1), g(5, 5));
        assert!(gmul(g(i64::MAX, 0), g(2, 0)).is_err());
    }

    #[test]
    fn signs() {
        assert_eq!(g(-1, 1).signum(), 1); // φ−1 > 0
        assert_eq!(g(2, -1).signum(), 1);
        assert_eq!(g(1, -1).signum(), -1);
        assert_eq!(g(-2, 1).signum(), -1);
        assert_eq!(g(0, 0).signum(), 0);
        assert_eq!(g(-21, 13).signum(), 1); // 13φ ≈ 21.03
        assert_eq!(g(-34, 21).signum(), -1); // 21φ ≈ 33.98
    }

    #[test]
    fn rotations() {
        let p = LatticePoint::new(3, -1, 4, 2);
        assert_eq!(p.rotate(0), p);
        assert_eq!(p.rotate(5).rotate(5), p);
        assert_eq!(LatticePoint::new(1, 0, 0, 0).rotate(1), LatticePoint::new(0, 1, 0, 0));
        assert_eq!(LatticePoint::zeta(5), LatticePoint::new(-1, 0, 0, 0));
        assert_eq!(p.conj().conj(), p);
        assert_eq!(LatticePoint::zeta(1).conj(), LatticePoint::zeta(9));
    }

    #[test]
    fn embedding() {
        assert_eq!(LatticePoint::ZERO.embed(), (0.0, 0.0));
        assert_eq!(LatticePoint::zeta(0).embed(), (1.0, 0.0));
        let (x, y) = LatticePoint::zeta(1).embed();
        let a = 36f64.to_radians();
        assert!((x - a.cos()).abs() < 1e-12 && (y - a.sin()).abs() < 1e-12);
    }

    #[test]
    fn phi_on_lattice() {
        let p = LatticePoint::zeta(0).mul_phi();
        assert!((p.embed().0 - PHI_F64).abs() < 1e-12);
        assert_eq!(p.div_phi(), LatticePoint::zeta(0));
        assert_eq!(
            LatticePoint::zeta(3).mul_golden(g(2, 3)).div_phi().mul_phi(),
            LatticePoint::zeta(3).mul_golden(g(2, 3))
        );
    }

    #[test]
    fn cross_and_dot_match_floats() {
        let u = LatticePoint::new(2, -1, 0, 3);
        let v = LatticePoint::new(-1, 4, 2, 1);
        let (ux, uy) = u.embed();
        let (vx, vy) = v.embed();
        let s36 = 36f64.to_radians().sin();
        assert!((cross(u, v).value() * s36 - (ux * vy - uy * vx)).abs() < 1e-9);
        assert!((dot2(u, v).value() / 2.0 - (ux * vx + uy * vy)).abs() < 1e-9);
        assert!((u.x2().value() / 2.0 - ux).abs() < 1e-9);
        assert!((u.ys().value() * s36 - uy).abs() < 1e-9);
    }

    #[test]
    fn placement_algebra() {
        let p = LatticePoint::new(1, 2, -3, 0);
        let a = Placement::new(3, true, LatticePoint::new(0, 1, 1, -2));
        let b = Placement::new(7, false, LatticePoint::new(2, 0, -1, 5));
        assert_eq!(a.compose(&b).apply(p), a.apply(b.apply(p)));
        assert_eq!(a.inverse().apply(a.apply(p)), p);
        let half = Placement::new(5, false, LatticePoint::ZERO);
        assert_eq!(half.apply(half.apply(p)), p);
        assert_eq!(Placement::IDENTITY.apply(p), p);
    }

    #[test]
    fn point_location() {
        let sq = [
            LatticePoint::ZERO,
            LatticePoint::zeta(0),
            LatticePoint::zeta(0) + LatticePoint::zeta(2),
            LatticePoint::zeta(2),
        ];
        let mid = (sq[0] + sq[2]).scale(1);
        assert_eq!(locate(LatticePoint::ZERO, &sq), Location::Boundary);
        // the doubled rhombus contains its own centre scaled by two
        let big: Vec<_> = sq.iter().map(|p| p.scale(2)).collect();
        assert_eq!(locate(mid, &big), Location::Inside);
        assert_eq!(locate(LatticePoint::zeta(5), &sq), Location::Outside);
    }

    #[test]
    fn triangulation_area() {
        let poly = [
            LatticePoint::ZERO,
            LatticePoint::zeta(0).scale(2),
            LatticePoint::zeta(0).scale(2) + LatticePoint::zeta(2),
            LatticePoint::zeta(0) + LatticePoint::zeta(3).scale(-1) + LatticePoint::zeta(2),
            LatticePoint::zeta(2),
        ];
        let poly = simplify(&poly);
        let tris = triangulate(&poly);
        let s = tris.iter().fold(GoldenInt::ZERO, |s, t| s + area2(t));
        assert_eq!(s, area2(&poly));
    }
}
