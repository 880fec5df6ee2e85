//! Finite abelian groups `Z_{n_1} x ... x Z_{n_r}` in cartesian form.
//!
//! Elements are addressed by a mixed-radix index with coordinate 0 as the
//! least significant digit, so on `F2^n` the index is the bit-packed vector.
//! Characters are identified with elements through
//! `chi_t(x) = exp(2 pi i sum_j t_j x_j / n_j)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest order for which membership tables are built.
pub const MAX_MEMBERSHIP_ORDER: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Group {
    factors: Vec<u64>,
    strides: Vec<usize>,
    order: usize,
    boolean: bool,
    exponent: u64,
    phase_weights: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element(pub Vec<u64>);

/// A character, identified with its frequency vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character(pub Element);

/// An exact phase `num / den` in `[0, 1)`, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase {
    pub num: u64,
    pub den: u64,
}

impl Phase {
    fn reduced(num: u64, den: u64) -> Phase {
        let g = num.gcd(&den).max(1);
        Phase {
            num: num / g,
            den: den / g,
        }
    }

    /// Distance to the nearest integer, `||x||`, as `(num, den)`.
    pub fn dist(&self) -> (u64, u64) {
        (self.num.min(self.den - self.num), self.den)
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Group {
    pub fn new(factors: &[u64]) -> Result<Group> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("group needs at least one factor".into()));
        }
        let mut strides = Vec::with_capacity(factors.len());
        let mut order: usize = 1;
        let mut exponent: u64 = 1;
        for &n in factors {
            if n < 2 {
                return Err(Error::InvalidFactor(n));
            }
            strides.push(order);
            order = order
                .checked_mul(usize::try_from(n).map_err(|_| Error::OrderOverflow)?)
                .ok_or(Error::OrderOverflow)?;
            exponent = exponent.lcm(&n);
        }
        if order as u64 > 1u64 << 40 {
            return Err(Error::OrderOverflow);
        }
        let phase_weights = factors.iter().map(|&n| exponent / n).collect();
        Ok(Group {
            boolean: factors.iter().all(|&n| n == 2),
            factors: factors.to_vec(),
            strides,
            order,
            exponent,
            phase_weights,
        })
    }

    pub fn cyclic(n: u64) -> Result<Group> {
        Group::new(&[n])
    }

    pub fn boolean(dim: usize) -> Result<Group> {
        Group::new(&vec![2; dim])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn is_boolean(&self) -> bool {
        self.boolean
    }

    /// Least common multiple of the factors; every phase has this denominator.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn zero(&self) -> Element {
        Element(vec![0; self.rank()])
    }

    pub fn element(&self, coords: &[u64]) -> Result<Element> {
        self.check_shape(coords)?;
        for (&c, &n) in coords.iter().zip(&self.factors) {
            if c >= n {
                return Err(Error::CoordinateOutOfRange { coord: c, factor: n });
            }
        }
        Ok(Element(coords.to_vec()))
    }

    fn check_shape(&self, coords: &[u64]) -> Result<()> {
        if coords.len() != self.rank() {
            return Err(Error::ShapeMismatch {
                expected: self.rank(),
                found: coords.len(),
            });
        }
        Ok(())
    }

    fn check_element(&self, x: &Element) -> Result<()> {
        self.check_shape(&x.0)?;
        for (&c, &n) in x.0.iter().zip(&self.factors) {
            if c >= n {
                return Err(Error::CoordinateOutOfRange { coord: c, factor: n });
            }
        }
        Ok(())
    }

    pub fn index(&self, x: &Element) -> Result<usize> {
        self.check_element(x)?;
        Ok(x.0
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c as usize * s)
            .sum())
    }

    pub fn unindex(&self, i: usize) -> Result<Element> {
        if i >= self.order {
            return Err(Error::IndexOutOfRange {
                index: i,
                order: self.order,
            });
        }
        Ok(Element(self.coords(i)))
    }

    /// Coordinates of an in-range index.
    pub fn coords(&self, mut i: usize) -> Vec<u64> {
        self.factors
            .iter()
            .map(|&n| {
                let n = n as usize;
                let c = i % n;
                i /= n;
                c as u64
            })
            .collect()
    }

    pub fn add(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check_element(x)?;
        self.check_element(y)?;
        Ok(Element(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.factors)
                .map(|((&a, &b), &n)| (a + b) % n)
                .collect(),
        ))
    }

    pub fn neg(&self, x: &Element) -> Result<Element> {
        self.check_element(x)?;
        Ok(Element(
            x.0.iter()
                .zip(&self.factors)
                .map(|(&a, &n)| (n - a) % n)
                .collect(),
        ))
    }

    pub fn sub(&self, x: &Element, y: &Element) -> Result<Element> {
        let ny = self.neg(y)?;
        self.add(x, &ny)
    }

    #[inline]
    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        if self.boolean {
            return a ^ b;
        }
        if self.factors.len() == 1 {
            let s = a + b;
            return if s >= self.order { s - self.order } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        for (&n, &stride) in self.factors.iter().zip(&self.strides) {
            let n = n as usize;
            let s = a % n + b % n;
            out += if s >= n { s - n } else { s } * stride;
            a /= n;
            b /= n;
        }
        out
    }

    #[inline]
    pub fn neg_idx(&self, a: usize) -> usize {
        if self.boolean {
            return a;
        }
        if self.factors.len() == 1 {
            return if a == 0 { 0 } else { self.order - a };
        }
        let mut a = a;
        let mut out = 0;
        for (&n, &stride) in self.factors.iter().zip(&self.strides) {
            let n = n as usize;
            let c = a % n;
            out += if c == 0 { 0 } else { n - c } * stride;
            a /= n;
        }
        out
    }

    #[inline]
    pub fn sub_idx(&self, a: usize, b: usize) -> usize {
        if self.boolean {
            return a ^ b;
        }
        self.add_idx(a, self.neg_idx(b))
    }

    /// Numerator of the phase `sum_j t_j x_j / n_j mod 1` over [`Group::exponent`].
    #[inline]
    pub fn phase_num(&self, t: usize, x: usize) -> u64 {
        if self.boolean {
            return u64::from((t & x).count_ones() & 1);
        }
        let l = self.exponent as u128;
        if self.factors.len() == 1 {
            return ((t as u128 * x as u128) % l) as u64;
        }
        let (mut t, mut x) = (t, x);
        let mut acc: u128 = 0;
        for (&n, &w) in self.factors.iter().zip(&self.phase_weights) {
            let nn = n as usize;
            let (tc, xc) = ((t % nn) as u128, (x % nn) as u128);
            acc += (tc * xc % n as u128) * w as u128;
            t /= nn;
            x /= nn;
        }
        (acc % l) as u64
    }

    pub fn char_phase(&self, t: &Character, x: &Element) -> Result<Phase> {
        let ti = self.index(&t.0)?;
        let xi = self.index(x)?;
        Ok(Phase::reduced(self.phase_num(ti, xi), self.exponent))
    }

    pub fn char_eval(&self, t: &Character, x: &Element) -> Result<Complex64> {
        let p = self.char_phase(t, x)?;
        Ok(unit_root(p.num, p.den))
    }

    /// `chi_t(x)` for indices, without shape checks.
    pub fn char_eval_idx(&self, t: usize, x: usize) -> Complex64 {
        unit_root(self.phase_num(t, x), self.exponent)
    }

    pub fn format_element(&self, i: usize) -> String {
        format_coords(&self.coords(i))
    }

    pub fn parse_element(&self, s: &str) -> Result<usize> {
        let coords = s
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad coordinate in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.index(&Element(coords))
    }

    pub fn ensure_same(&self, other: &Group) -> Result<()> {
        if self != other {
            return Err(Error::GroupMismatch {
                left: self.to_string(),
                right: other.to_string(),
            });
        }
        Ok(())
    }
}

/// `exp(2 pi i num / den)`, exact at the quarter turns.
pub fn unit_root(num: u64, den: u64) -> Complex64 {
    let num = num % den;
    if num == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 4 * num == den {
        return Complex64::new(0.0, 1.0);
    }
    if 2 * num == den {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * num == 3 * den {
        return Complex64::new(0.0, -1.0);
    }
    let theta = std::f64::consts::TAU * (num as f64) / (den as f64);
    Complex64::new(theta.cos(), theta.sin())
}

pub fn format_coords(coords: &[u64]) -> String {
    coords
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.boolean {
            return write!(f, "F2^{}", self.rank());
        }
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z{n}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for Group {
    type Err = Error;

    /// Accepts `Z4xZ6`, `F2^8`, `Z3^2xZ5` and a bare `Z101`.
    fn from_str(s: &str) -> Result<Group> {
        let mut factors = Vec::new();
        for part in s.trim().split(['x', '*']) {
            let part = part.trim();
            let (base, power) = match part.split_once('^') {
                Some((b, p)) => (
                    b,
                    p.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad exponent in {part:?}")))?,
                ),
                None => (part, 1),
            };
            let n: u64 = if let Some(rest) = base.strip_prefix('F') {
                if rest != "2" {
                    return Err(Error::Parse(format!("only F2 is supported, got {part:?}")));
                }
                2
            } else if let Some(rest) = base.strip_prefix('Z') {
                rest.parse()
                    .map_err(|_| Error::Parse(format!("bad factor {part:?}")))?
            } else {
                return Err(Error::Parse(format!("unrecognised factor {part:?}")));
            };
            factors.extend(std::iter::repeat_n(n, power));
        }
        Group::new(&factors)
    }
}

impl From<Group> for String {
    fn from(g: Group) -> String {
        g.to_string()
    }
}

impl TryFrom<String> for Group {
    type Error = Error;
    fn try_from(s: String) -> Result<Group> {
        s.parse()
    }
}
