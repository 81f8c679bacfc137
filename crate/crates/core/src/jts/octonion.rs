//! Octonions over a commutative scalar ring (reals, or complex numbers for the
//! complexified exceptional models).
//!
//! Basis `(1, e₁, …, e₇)`. The product of imaginary units follows the Fano
//! plane with oriented lines
//!
//! ```text
//! (1,2,3) (1,4,5) (1,7,6) (2,4,6) (2,5,7) (3,4,7) (3,6,5)
//! ```
//!
//! meaning `e_a e_b = e_c` along each cyclic rotation of a line and
//! `e_b e_a = −e_c`; `e_i e_i = −1`.

use std::ops::{Add, Mul, Neg, Sub};

const LINES: [[usize; 3]; 7] = [
    [1, 2, 3],
    [1, 4, 5],
    [1, 7, 6],
    [2, 4, 6],
    [2, 5, 7],
    [3, 4, 7],
    [3, 6, 5],
];

/// `TABLE[a][b] = (sign, c)` with `e_a e_b = sign · e_c`.
const TABLE: [[(i8, usize); 8]; 8] = build_table();

const fn build_table() -> [[(i8, usize); 8]; 8] {
    let mut t = [[(0i8, 0usize); 8]; 8];
    let mut a = 0;
    while a < 8 {
        t[0][a] = (1, a);
        t[a][0] = (1, a);
        if a > 0 {
            t[a][a] = (-1, 0);
        }
        a += 1;
    }
    let mut l = 0;
    while l < 7 {
        let [x, y, z] = LINES[l];
        t[x][y] = (1, z);
        t[y][z] = (1, x);
        t[z][x] = (1, y);
        t[y][x] = (-1, z);
        t[z][y] = (-1, x);
        t[x][z] = (-1, y);
        l += 1;
    }
    t
}

/// Scalars an octonion can be built over.
pub trait Scalar:
    Copy + Default + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl<T> Scalar for T where
    T: Copy + Default + PartialEq + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Octonion<T = f64> {
    pub coords: [T; 8],
}

impl<T: Scalar> Octonion<T> {
    pub fn new(coords: [T; 8]) -> Self {
        Self { coords }
    }

    pub fn zero() -> Self {
        Self {
            coords: [T::default(); 8],
        }
    }

    /// `s · 1`.
    pub fn scalar(s: T) -> Self {
        let mut coords = [T::default(); 8];
        coords[0] = s;
        Self { coords }
    }

    /// `s · e_i`.
    pub fn unit(i: usize, s: T) -> Self {
        let mut coords = [T::default(); 8];
        coords[i] = s;
        Self { coords }
    }

    /// Octonion conjugation: negates the imaginary part.
    pub fn conj(&self) -> Self {
        let mut coords = self.coords;
        for c in coords.iter_mut().skip(1) {
            *c = -*c;
        }
        Self { coords }
    }

    /// Quadratic norm form `Σ a_k²` (bilinear, no complex conjugation).
    pub fn norm_form(&self) -> T {
        self.coords.iter().fold(T::default(), |acc, &c| acc + c * c)
    }

    /// Real part `a₀`.
    pub fn re(&self) -> T {
        self.coords[0]
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            coords: self.coords.map(|c| c * s),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Octonion<U> {
        Octonion {
            coords: self.coords.map(f),
        }
    }
}

impl<T: Scalar> Add for Octonion<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut coords = self.coords;
        for (c, r) in coords.iter_mut().zip(rhs.coords) {
            *c = *c + r;
        }
        Self { coords }
    }
}

impl<T: Scalar> Sub for Octonion<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar> Neg for Octonion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            coords: self.coords.map(|c| -c),
        }
    }
}

impl<T: Scalar> Mul for Octonion<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = [T::default(); 8];
        for (a, &x) in self.coords.iter().enumerate() {
            if x == T::default() {
                continue;
            }
            for (b, &y) in rhs.coords.iter().enumerate() {
                let (sign, c) = TABLE[a][b];
                let p = x * y;
                out[c] = if sign > 0 { out[c] + p } else { out[c] - p };
            }
        }
        Self { coords: out }
    }
}

/// Product of two octonions under the fixed table.
pub fn oct_mul<T: Scalar>(a: Octonion<T>, b: Octonion<T>) -> Octonion<T> {
    a * b
}

impl Octonion<f64> {
    pub fn norm(&self) -> f64 {
        self.norm_form().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{gaussian, rng_for};

    fn random(seed: u64) -> Octonion {
        let mut rng = rng_for(seed, 0);
        Octonion::new(std::array::from_fn(|_| gaussian(&mut rng)))
    }

    fn e(i: usize) -> Octonion {
        Octonion::unit(i, 1.0)
    }

    #[test]
    fn one_is_neutral() {
        let b = random(1);
        assert_eq!(Octonion::scalar(1.0) * b, b);
        assert_eq!(b * Octonion::scalar(1.0), b);
    }

    #[test]
    fn units_square_to_minus_one() {
        for i in 1..8 {
            assert_eq!(e(i) * e(i), Octonion::scalar(-1.0));
        }
    }

    #[test]
    fn table_follows_fano_lines() {
        assert_eq!(e(1) * e(2), e(3));
        assert_eq!(e(2) * e(1), -e(3));
        assert_eq!(e(6) * e(5), e(3));
        // imaginary units anticommute
        for a in 1..8 {
            for b in 1..8 {
                if a != b {
                    assert_eq!(e(a) * e(b), -(e(b) * e(a)));
                }
            }
        }
    }

    #[test]
    fn multiplication_is_not_associative() {
        // brute force over all unit triples: some associator is nonzero
        let assoc = (e(1) * e(2)) * e(4) - e(1) * (e(2) * e(4));
        assert!(assoc.norm() > 1.0);
        let nonassoc = (1..8)
            .flat_map(|a| (1..8).flat_map(move |b| (1..8).map(move |c| (a, b, c))))
            .filter(|&(a, b, c)| ((e(a) * e(b)) * e(c) - e(a) * (e(b) * e(c))).norm() > 0.0)
            .count();
        assert!(nonassoc > 0);
    }

    #[test]
    fn norm_is_multiplicative() {
        for s in 0..50 {
            let a = random(2 * s + 10);
            let b = random(2 * s + 11);
            assert!(((a * b).norm() - a.norm() * b.norm()).abs() < 1e-12 * (1.0 + a.norm() * b.norm()));
        }
    }

    #[test]
    fn alternative_laws_hold() {
        for s in 0..50 {
            let a = random(2 * s + 200);
            let b = random(2 * s + 201);
            let left = a * (a * b) - (a * a) * b;
            let right = (b * a) * a - b * (a * a);
            assert!(left.norm() < 1e-12 * (1.0 + a.norm().powi(2) * b.norm()));
            assert!(right.norm() < 1e-12 * (1.0 + a.norm().powi(2) * b.norm()));
        }
    }

    #[test]
    fn conjugation_reverses_products() {
        for s in 0..50 {
            let a = random(2 * s + 400);
            let b = random(2 * s + 401);
            let lhs = (a * b).conj();
            let rhs = b.conj() * a.conj();
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + a.norm() * b.norm()));
        }
    }
}
