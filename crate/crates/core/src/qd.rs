//! Quad-double arithmetic (four non-overlapping `f64` limbs, about 64
//! significant digits).
//!
//! Kernel Gram matrices on the dyadic grids are badly conditioned: on the
//! default two-level grid the pivots span twelve decades and the kernel
//! coefficients of `ψ_m` reach `4e12`, so `C G C*` carries terms near `1e26`
//! that must cancel to `1e-8`. Construction, coefficient storage and every
//! sum of coefficients against kernel values run in this type; results
//! handed to callers are rounded to `f64`.

use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Qd([f64; 4]);

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[inline]
fn three_sum(a: &mut f64, b: &mut f64, c: &mut f64) {
    let (t1, t2) = two_sum(*a, *b);
    let (s, t3) = two_sum(*c, t1);
    *a = s;
    let (u, v) = two_sum(t2, t3);
    *b = u;
    *c = v;
}

/// Accumulates `c` into the two-limb `(a, b)`; returns a finished limb or 0.
#[inline]
fn quick_three_accum(a: &mut f64, b: &mut f64, c: f64) -> f64 {
    let (s, bb) = two_sum(*b, c);
    let (s, aa) = two_sum(*a, s);
    let za = aa != 0.0;
    let zb = bb != 0.0;
    if za && zb {
        *a = aa;
        *b = bb;
        return s;
    }
    if !zb {
        *b = aa;
        *a = s;
    } else {
        *b = bb;
        *a = s;
    }
    0.0
}

fn renorm4(c: [f64; 4]) -> [f64; 4] {
    let [mut c0, mut c1, mut c2, mut c3] = c;
    if !c0.is_finite() {
        return [c0, c1, c2, c3];
    }
    let (s0, t3) = quick_two_sum(c2, c3);
    c3 = t3;
    let (s0, t2) = quick_two_sum(c1, s0);
    c2 = t2;
    let (t0, t1) = quick_two_sum(c0, s0);
    c0 = t0;
    c1 = t1;

    let mut s0 = c0;
    let mut s1 = c1;
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    if s1 != 0.0 {
        (s1, s2) = quick_two_sum(s1, c2);
        if s2 != 0.0 {
            (s2, s3) = quick_two_sum(s2, c3);
        } else {
            (s1, s2) = quick_two_sum(s1, c3);
        }
    } else {
        (s0, s1) = quick_two_sum(s0, c2);
        if s1 != 0.0 {
            (s1, s2) = quick_two_sum(s1, c3);
        } else {
            (s0, s1) = quick_two_sum(s0, c3);
        }
    }
    [s0, s1, s2, s3]
}

fn renorm5(c: [f64; 5]) -> [f64; 4] {
    let [mut c0, mut c1, mut c2, mut c3, mut c4] = c;
    if !c0.is_finite() {
        return [c0, c1, c2, c3];
    }
    let (s0, t4) = quick_two_sum(c3, c4);
    c4 = t4;
    let (s0, t3) = quick_two_sum(c2, s0);
    c3 = t3;
    let (s0, t2) = quick_two_sum(c1, s0);
    c2 = t2;
    let (t0, t1) = quick_two_sum(c0, s0);
    c0 = t0;
    c1 = t1;

    let mut s0 = c0;
    let mut s1 = c1;
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    if s1 != 0.0 {
        (s1, s2) = quick_two_sum(s1, c2);
        if s2 != 0.0 {
            (s2, s3) = quick_two_sum(s2, c3);
            if s3 != 0.0 {
                s3 += c4;
            } else {
                s2 += c4;
            }
        } else {
            (s1, s2) = quick_two_sum(s1, c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c4);
            } else {
                (s1, s2) = quick_two_sum(s1, c4);
            }
        }
    } else {
        (s0, s1) = quick_two_sum(s0, c2);
        if s1 != 0.0 {
            (s1, s2) = quick_two_sum(s1, c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c4);
            } else {
                (s1, s2) = quick_two_sum(s1, c4);
            }
        } else {
            (s0, s1) = quick_two_sum(s0, c3);
            if s1 != 0.0 {
                (s1, s2) = quick_two_sum(s1, c4);
            } else {
                (s0, s1) = quick_two_sum(s0, c4);
            }
        }
    }
    [s0, s1, s2, s3]
}

impl Qd {
    pub const ZERO: Qd = Qd([0.0; 4]);
    pub const ONE: Qd = Qd([1.0, 0.0, 0.0, 0.0]);

    /// Normalizes an arbitrary four-limb sum.
    pub fn from_limbs(limbs: [f64; 4]) -> Self {
        Qd(renorm4(limbs))
    }

    pub fn limbs(self) -> [f64; 4] {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0[0] + (self.0[1] + (self.0[2] + self.0[3]))
    }

    pub fn recip(self) -> Self {
        Qd::ONE / self
    }

    pub fn sqrt(self) -> Self {
        if self.0[0] <= 0.0 {
            return Qd::ZERO;
        }
        // Newton on x ↦ (x + a/x)/2; each step doubles the correct bits.
        let mut x = Qd::from(self.0[0].sqrt());
        let half = Qd::from(0.5);
        for _ in 0..3 {
            x = (x + self / x) * half;
        }
        x
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    fn mul_f64(self, b: f64) -> Qd {
        let a = self.0;
        let (p0, q0) = two_prod(a[0], b);
        let (p1, mut q1) = two_prod(a[1], b);
        let (mut p2, mut q2) = two_prod(a[2], b);
        let p3 = a[3] * b;
        let s0 = p0;
        let (s1, mut s2) = two_sum(q0, p1);
        three_sum(&mut s2, &mut q1, &mut p2);
        let (t1, t2) = two_sum(q1, q2);
        let (u, t3) = two_sum(p3, t1);
        q1 = u;
        q2 = t2 + t3;
        let s3 = q1;
        let s4 = q2 + p2;
        Qd(renorm5([s0, s1, s2, s3, s4]))
    }
}

impl From<f64> for Qd {
    fn from(x: f64) -> Self {
        Qd([x, 0.0, 0.0, 0.0])
    }
}

impl Neg for Qd {
    type Output = Qd;
    #[inline]
    fn neg(self) -> Qd {
        Qd([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl Add for Qd {
    type Output = Qd;
    fn add(self, other: Qd) -> Qd {
        let a = self.0;
        let b = other.0;
        let (mut i, mut j, mut k) = (0usize, 0usize, 0usize);
        let mut x = [0.0; 4];
        let pick = |i: &mut usize, j: &mut usize| -> f64 {
            if *i >= 4 {
                *j += 1;
                b[*j - 1]
            } else if *j >= 4 || a[*i].abs() > b[*j].abs() {
                *i += 1;
                a[*i - 1]
            } else {
                *j += 1;
                b[*j - 1]
            }
        };
        let u0 = pick(&mut i, &mut j);
        let v0 = pick(&mut i, &mut j);
        let (mut u, mut v) = quick_two_sum(u0, v0);
        while k < 4 {
            if i >= 4 && j >= 4 {
                x[k] = u;
                if k < 3 {
                    k += 1;
                    x[k] = v;
                }
                break;
            }
            let t = pick(&mut i, &mut j);
            let s = quick_three_accum(&mut u, &mut v, t);
            if s != 0.0 {
                x[k] = s;
                k += 1;
            }
        }
        for &ak in &a[i..] {
            x[3] += ak;
        }
        for &bk in &b[j..] {
            x[3] += bk;
        }
        Qd(renorm4(x))
    }
}

impl Sub for Qd {
    type Output = Qd;
    #[inline]
    fn sub(self, b: Qd) -> Qd {
        self + (-b)
    }
}

impl Mul for Qd {
    type Output = Qd;
    fn mul(self, other: Qd) -> Qd {
        let a = self.0;
        let b = other.0;
        let (p0, q0) = two_prod(a[0], b[0]);
        let (mut p1, q1) = two_prod(a[0], b[1]);
        let (mut p2, q2) = two_prod(a[1], b[0]);
        let (mut p3, q3) = two_prod(a[0], b[2]);
        let (mut p4, q4) = two_prod(a[1], b[1]);
        let (mut p5, q5) = two_prod(a[2], b[0]);
        let mut q0 = q0;
        let mut q1 = q1;
        let mut q2 = q2;

        three_sum(&mut p1, &mut p2, &mut q0);
        three_sum(&mut p2, &mut q1, &mut q2);
        three_sum(&mut p3, &mut p4, &mut p5);
        let (s0, t0) = two_sum(p2, p3);
        let (s1, t1) = two_sum(q1, p4);
        let mut s2 = q2 + p5;
        let (s1, t0) = two_sum(s1, t0);
        s2 += t0 + t1;
        let s1 = s1
            + (a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0] + q0 + q3 + q4 + q5);
        Qd(renorm5([p0, p1, s0, s1, s2]))
    }
}

impl Div for Qd {
    type Output = Qd;
    fn div(self, b: Qd) -> Qd {
        let q0 = self.0[0] / b.0[0];
        let r = self - b.mul_f64(q0);
        let q1 = r.0[0] / b.0[0];
        let r = r - b.mul_f64(q1);
        let q2 = r.0[0] / b.0[0];
        let r = r - b.mul_f64(q2);
        let q3 = r.0[0] / b.0[0];
        let r = r - b.mul_f64(q3);
        let q4 = r.0[0] / b.0[0];
        Qd(renorm5([q0, q1, q2, q3, q4]))
    }
}

impl AddAssign for Qd {
    fn add_assign(&mut self, b: Qd) {
        *self = *self + b;
    }
}

impl SubAssign for Qd {
    fn sub_assign(&mut self, b: Qd) {
        *self = *self - b;
    }
}

impl PartialOrd for Qd {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        (*self - *other).0[0].partial_cmp(&0.0)
    }
}

/// Complex quad-double.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Cqd {
    pub re: Qd,
    pub im: Qd,
}

impl Cqd {
    pub const ZERO: Cqd = Cqd {
        re: Qd::ZERO,
        im: Qd::ZERO,
    };
    pub const ONE: Cqd = Cqd {
        re: Qd::ONE,
        im: Qd::ZERO,
    };

    pub fn new(re: Qd, im: Qd) -> Self {
        Self { re, im }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sqr(self) -> Qd {
        self.re * self.re + self.im * self.im
    }

    /// `|z|` rounded to `f64`.
    pub fn abs_f64(self) -> f64 {
        self.norm_sqr().to_f64().sqrt()
    }

    pub fn scale(self, s: Qd) -> Self {
        Self {
            re: self.re * s,
            im: self.im * s,
        }
    }

    pub fn recip(self) -> Self {
        let n = self.norm_sqr().recip();
        self.conj().scale(n)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// `conj(self) * b` without forming the conjugate.
    #[inline]
    pub fn conj_mul(self, b: Cqd) -> Cqd {
        Cqd {
            re: self.re * b.re + self.im * b.im,
            im: self.re * b.im - self.im * b.re,
        }
    }
}

impl From<Complex64> for Cqd {
    fn from(z: Complex64) -> Self {
        Self {
            re: z.re.into(),
            im: z.im.into(),
        }
    }
}

impl From<Qd> for Cqd {
    fn from(x: Qd) -> Self {
        Self { re: x, im: Qd::ZERO }
    }
}

impl Neg for Cqd {
    type Output = Cqd;
    fn neg(self) -> Cqd {
        Cqd {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Add for Cqd {
    type Output = Cqd;
    #[inline]
    fn add(self, b: Cqd) -> Cqd {
        Cqd {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl Sub for Cqd {
    type Output = Cqd;
    #[inline]
    fn sub(self, b: Cqd) -> Cqd {
        Cqd {
            re: self.re - b.re,
            im: self.im - b.im,
        }
    }
}

impl Mul for Cqd {
    type Output = Cqd;
    #[inline]
    fn mul(self, b: Cqd) -> Cqd {
        Cqd {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl Div for Cqd {
    type Output = Cqd;
    fn div(self, b: Cqd) -> Cqd {
        self * b.recip()
    }
}

impl AddAssign for Cqd {
    fn add_assign(&mut self, b: Cqd) {
        *self = *self + b;
    }
}

impl SubAssign for Cqd {
    fn sub_assign(&mut self, b: Cqd) {
        *self = *self - b;
    }
}

impl Sum for Cqd {
    fn sum<I: Iterator<Item = Cqd>>(iter: I) -> Cqd {
        iter.fold(Cqd::ZERO, |a, b| a + b)
    }
}

/// `K(z, w) = 1 / (1 - conj(w) z)²`; the product `conj(w) z` of two `f64`
/// points is formed exactly.
pub fn kernel_qd(z: Complex64, w: Complex64) -> Cqd {
    let (a, ea) = two_prod(w.re, z.re);
    let (b, eb) = two_prod(w.im, z.im);
    let (c, ec) = two_prod(w.re, z.im);
    let (d, ed) = two_prod(w.im, z.re);
    // conj(w) z = (w.re z.re + w.im z.im) + i (w.re z.im - w.im z.re)
    let re = Qd::from_limbs([a, ea, 0.0, 0.0]) + Qd::from_limbs([b, eb, 0.0, 0.0]);
    let im = Qd::from_limbs([c, ec, 0.0, 0.0]) - Qd::from_limbs([d, ed, 0.0, 0.0]);
    let one_minus = Cqd::new(Qd::ONE - re, -im);
    (one_minus * one_minus).recip()
}
