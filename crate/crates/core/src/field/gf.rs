use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Field element, encoded as `c_0 + c_1 p + ... + c_{f-1} p^{f-1}` where
/// `c_0 + c_1 x + ...` is its representative modulo the defining polynomial.
pub type Elem = u32;

/// Serializable identifier of a field; rebuilt into a [`Gf`] on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub f: u32,
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.f == 1 {
            write!(out, "F{}", self.p)
        } else {
            write!(out, "F{}^{}", self.p, self.f)
        }
    }
}

/// Conway polynomials, coefficients from the constant term up, monic leading
/// coefficient omitted.
fn conway(p: u32, f: u32) -> Option<Vec<u32>> {
    let c: &[u32] = match (p, f) {
        (_, 1) => return Some(vec![(p - primitive_root(p)) % p]),
        (2, 2) => &[1, 1],
        (3, 2) => &[2, 2],
        (5, 2) => &[2, 4],
        (7, 2) => &[3, 6],
        (11, 2) => &[2, 7],
        (13, 2) => &[2, 12],
        (17, 2) => &[3, 16],
        (2, 3) => &[1, 1, 0],
        (3, 3) => &[1, 2, 0],
        (5, 3) => &[3, 3, 0],
        (7, 3) => &[4, 0, 6],
        (11, 3) => &[9, 2, 0],
        (13, 3) => &[11, 2, 0],
        (17, 3) => &[14, 1, 0],
        _ => return None,
    };
    Some(c.to_vec())
}

fn primitive_root(p: u32) -> u32 {
    match p {
        2 => 1,
        3 => 2,
        5 => 2,
        7 => 3,
        11 => 2,
        13 => 2,
        17 => 3,
        _ => unreachable!("unsupported prime"),
    }
}

const PRIMES: [u32; 7] = [2, 3, 5, 7, 11, 13, 17];

/// The finite field with `p^f` elements, realised through log/antilog tables
/// built from a primitive defining polynomial.
pub struct Gf {
    p: u32,
    f: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<Elem>,
    log: Vec<u32>,
    add: Option<Vec<u16>>,
    neg: Vec<Elem>,
}

impl fmt::Debug for Gf {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "Gf({})", self.descriptor())
    }
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f
    }
}
impl Eq for Gf {}

impl Gf {
    pub fn new(p: u32, f: u32) -> Result<Gf> {
        if !PRIMES.contains(&p) || !(1..=3).contains(&f) {
            return Err(Error::InvalidField { p, f });
        }
        let q = p.pow(f);
        let tail = conway(p, f).ok_or(Error::InvalidField { p, f })?;
        let mut gf = Gf {
            p,
            f,
            q,
            modulus: tail,
            exp: Vec::new(),
            log: Vec::new(),
            add: None,
            neg: Vec::new(),
        };
        gf.neg = (0..q).map(|x| gf.neg_slow(x)).collect();
        if q <= 512 {
            let mut t = vec![0u16; (q * q) as usize];
            for x in 0..q {
                for y in 0..q {
                    t[(x * q + y) as usize] = gf.add_slow(x, y) as u16;
                }
            }
            gf.add = Some(t);
        }
        gf.build_tables()?;
        Ok(gf)
    }

    pub fn from_descriptor(d: FieldDescriptor) -> Result<Gf> {
        Gf::new(d.p, d.f)
    }

    pub fn from_order(q: u32) -> Result<Gf> {
        for &p in &PRIMES {
            let mut f = 1;
            let mut pf = p;
            while pf < q {
                pf *= p;
                f += 1;
            }
            if pf == q {
                return Gf::new(p, f);
            }
        }
        Err(Error::InvalidField { p: q, f: 1 })
    }

    fn build_tables(&mut self) -> Result<()> {
        let n = (self.q - 1) as usize;
        let mut exp = vec![0; 2 * n];
        let mut log = vec![u32::MAX; self.q as usize];
        let g = if self.f == 1 { primitive_root(self.p) } else { self.p };
        let mut cur: Elem = 1;
        for i in 0..n {
            if log[cur as usize] != u32::MAX {
                return Err(Error::InvalidField { p: self.p, f: self.f });
            }
            exp[i] = cur;
            log[cur as usize] = i as u32;
            cur = self.mul_slow(cur, g);
        }
        if cur != 1 {
            return Err(Error::InvalidField { p: self.p, f: self.f });
        }
        for i in 0..n {
            exp[n + i] = exp[i];
        }
        self.exp = exp;
        self.log = log;
        Ok(())
    }

    fn digits(&self, mut x: Elem) -> Vec<u32> {
        let mut d = vec![0; self.f as usize];
        for c in d.iter_mut() {
            *c = x % self.p;
            x /= self.p;
        }
        d
    }

    fn undigits(&self, d: &[u32]) -> Elem {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add_slow(&self, x: Elem, y: Elem) -> Elem {
        let (a, b) = (self.digits(x), self.digits(y));
        let s: Vec<u32> = a.iter().zip(&b).map(|(u, v)| (u + v) % self.p).collect();
        self.undigits(&s)
    }

    fn neg_slow(&self, x: Elem) -> Elem {
        let s: Vec<u32> = self
            .digits(x)
            .iter()
            .map(|&u| (self.p - u) % self.p)
            .collect();
        self.undigits(&s)
    }

    /// Schoolbook product of representatives reduced by the defining polynomial.
    fn mul_slow(&self, x: Elem, y: Elem) -> Elem {
        let p = self.p;
        let f = self.f as usize;
        if f == 1 {
            return (x * y) % p;
        }
        let (a, b) = (self.digits(x), self.digits(y));
        let mut prod = vec![0u32; 2 * f - 1];
        for i in 0..f {
            for j in 0..f {
                prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
            }
        }
        for k in (f..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &m) in self.modulus.iter().enumerate() {
                let sub = (c * m) % p;
                prod[k - f + i] = (prod[k - f + i] + p - sub) % p;
            }
        }
        self.undigits(&prod[..f])
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor { p: self.p, f: self.f }
    }
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.f
    }
    pub fn order(&self) -> u32 {
        self.q
    }
    /// Defining polynomial, monic, coefficients from the constant term up.
    pub fn modulus(&self) -> Vec<u32> {
        let mut m = self.modulus.clone();
        if self.f == 1 {
            m = vec![m[0]];
        }
        m.push(1);
        m
    }

    pub fn zero(&self) -> Elem {
        0
    }
    pub fn one(&self) -> Elem {
        1
    }
    /// The primitive element used for the log tables (the class of `x` when f > 1).
    pub fn generator(&self) -> Elem {
        self.exp[1]
    }
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.q
    }
    pub fn nonzero(&self) -> impl Iterator<Item = Elem> {
        1..self.q
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as Elem
    }

    #[inline]
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        match &self.add {
            Some(t) => t[(x * self.q + y) as usize] as Elem,
            None => self.add_slow(x, y),
        }
    }
    #[inline]
    pub fn neg(&self, x: Elem) -> Elem {
        self.neg[x as usize]
    }
    #[inline]
    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }
    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        if x == 0 || y == 0 {
            return 0;
        }
        self.exp[(self.log[x as usize] + self.log[y as usize]) as usize]
    }
    pub fn inv(&self, x: Elem) -> Option<Elem> {
        if x == 0 {
            return None;
        }
        let n = self.q - 1;
        Some(self.exp[((n - self.log[x as usize]) % n) as usize])
    }
    pub fn div(&self, x: Elem, y: Elem) -> Option<Elem> {
        self.inv(y).map(|iy| self.mul(x, iy))
    }
    pub fn pow(&self, x: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if x == 0 {
            return 0;
        }
        let n = (self.q - 1) as u64;
        self.exp[((self.log[x as usize] as u64 * (e % n)) % n) as usize]
    }
    /// x ↦ x^p.
    pub fn frobenius(&self, x: Elem) -> Elem {
        self.pow(x, self.p as u64)
    }
    /// Inverse of the Frobenius, x ↦ x^{q/p}.
    pub fn frobenius_inv(&self, x: Elem) -> Elem {
        self.pow(x, (self.q / self.p) as u64)
    }
    pub fn is_square(&self, x: Elem) -> bool {
        x == 0 || self.p == 2 || self.log[x as usize] % 2 == 0
    }
    pub fn sqrt(&self, x: Elem) -> Option<Elem> {
        if x == 0 {
            return Some(0);
        }
        if self.p == 2 {
            return Some(self.pow(x, (self.q / 2) as u64));
        }
        let l = self.log[x as usize];
        (l % 2 == 0).then(|| self.exp[(l / 2) as usize])
    }
    /// A fixed non-square (odd characteristic only).
    pub fn nonsquare(&self) -> Option<Elem> {
        (self.p != 2).then(|| self.generator())
    }
    pub fn sum<I: IntoIterator<Item = Elem>>(&self, it: I) -> Elem {
        it.into_iter().fold(0, |a, b| self.add(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_fields() -> Vec<Gf> {
        let mut out = Vec::new();
        for &p in &PRIMES {
            for f in 1..=3 {
                if p.pow(f) <= 5000 {
                    out.push(Gf::new(p, f).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn tables_build_for_every_supported_field() {
        assert_eq!(all_fields().len(), 21);
    }

    #[test]
    fn field_axioms_small_fields() {
        for gf in all_fields().into_iter().filter(|g| g.order() <= 49) {
            for x in gf.elements() {
                assert_eq!(gf.add(x, gf.neg(x)), 0);
                if x != 0 {
                    assert_eq!(gf.mul(x, gf.inv(x).unwrap()), 1);
                }
                for y in gf.elements() {
                    assert_eq!(gf.mul(x, y), gf.mul_slow(x, y));
                    for z in [0, 1, gf.generator()] {
                        let lhs = gf.mul(x, gf.add(y, z));
                        let rhs = gf.add(gf.mul(x, y), gf.mul(x, z));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_is_automorphism_of_order_f() {
        for gf in all_fields() {
            let g = gf.generator();
            for x in [0, 1, g, gf.mul(g, g), gf.add(g, 1)] {
                let mut y = x;
                for _ in 0..gf.degree() {
                    y = gf.frobenius(y);
                }
                assert_eq!(y, x);
                assert_eq!(gf.frobenius_inv(gf.frobenius(x)), x);
                let z = gf.add(g, 1);
                assert_eq!(gf.frobenius(gf.mul(x, z)), gf.mul(gf.frobenius(x), gf.frobenius(z)));
            }
        }
    }

    #[test]
    fn frobenius_f9_examples() {
        let gf = Gf::new(3, 2).unwrap();
        assert_eq!(gf.frobenius(0), 0);
        assert_eq!(gf.frobenius(1), 1);
        let g = gf.generator();
        let g3 = gf.mul(g, gf.mul(g, g));
        assert_eq!(gf.frobenius(g), g3);
        assert_eq!(gf.frobenius(gf.frobenius(g)), g);
    }

    #[test]
    fn generator_is_x_in_extensions() {
        for gf in all_fields().into_iter().filter(|g| g.degree() > 1) {
            assert_eq!(gf.generator(), gf.p());
        }
    }

    #[test]
    fn square_roots() {
        for gf in all_fields().into_iter().filter(|g| g.order() <= 125) {
            for x in gf.elements() {
                let s = gf.mul(x, x);
                let r = gf.sqrt(s).unwrap();
                assert_eq!(gf.mul(r, r), s);
            }
        }
    }
}
