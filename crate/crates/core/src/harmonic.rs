//! Dense functions on a group, the Fourier transform
//! `f^(chi) = sum_g f(g) conj(chi(g))`, convolutions and correlations.
//!
//! Integer tables on `F2^n` go through an exact Walsh-Hadamard transform.
//! Everything else uses a per-coordinate DFT in double precision.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{unit_root, Group};

/// General-path transform limit.
pub const TRANSFORM_LIMIT: usize = 1 << 16;
/// Walsh-Hadamard limit (dense tables).
pub const BOOLEAN_TRANSFORM_LIMIT: usize = 1 << 24;
/// Above this order convolutions go through the transform.
pub const DIRECT_CONVOLUTION_LIMIT: usize = 1 << 12;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Axes longer than this use an FFT plan instead of the direct O(n^2) DFT.
const DIRECT_AXIS_LIMIT: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Int,
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Int(Vec<i128>),
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Int(v) => v.len(),
            Values::Real(v) => v.len(),
            Values::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            Values::Int(_) => ValueKind::Int,
            Values::Real(_) => ValueKind::Real,
            Values::Complex(_) => ValueKind::Complex,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionTable {
    group: Group,
    values: Values,
}

impl FunctionTable {
    pub fn new(group: Group, values: Values) -> Result<FunctionTable> {
        if values.len() != group.order() {
            return Err(Error::InvalidArgument(format!(
                "table has {} values, group {} has order {}",
                values.len(),
                group,
                group.order()
            )));
        }
        Ok(FunctionTable { group, values })
    }

    pub fn from_int(group: Group, values: Vec<i128>) -> Result<FunctionTable> {
        FunctionTable::new(group, Values::Int(values))
    }

    pub fn from_real(group: Group, values: Vec<f64>) -> Result<FunctionTable> {
        FunctionTable::new(group, Values::Real(values))
    }

    pub fn from_complex(group: Group, values: Vec<Complex64>) -> Result<FunctionTable> {
        FunctionTable::new(group, Values::Complex(values))
    }

    pub fn zeros(group: Group) -> FunctionTable {
        let n = group.order();
        FunctionTable {
            group,
            values: Values::Int(vec![0; n]),
        }
    }

    /// Indicator of a list of element indices.
    pub fn indicator(group: Group, members: &[usize]) -> Result<FunctionTable> {
        let mut v = vec![0i128; group.order()];
        for &m in members {
            if m >= group.order() {
                return Err(Error::IndexOutOfRange {
                    index: m,
                    order: group.order(),
                });
            }
            v[m] = 1;
        }
        FunctionTable::from_int(group, v)
    }

    pub fn delta(group: Group, at: usize) -> Result<FunctionTable> {
        FunctionTable::indicator(group, &[at])
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn into_values(self) -> Values {
        self.values
    }

    pub fn kind(&self) -> ValueKind {
        self.values.kind()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_int(&self) -> Option<&[i128]> {
        match &self.values {
            Values::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn get(&self, i: usize) -> Complex64 {
        match &self.values {
            Values::Int(v) => Complex64::new(v[i] as f64, 0.0),
            Values::Real(v) => Complex64::new(v[i], 0.0),
            Values::Complex(v) => v[i],
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    pub fn abs(&self, i: usize) -> f64 {
        match &self.values {
            Values::Int(v) => (v[i] as f64).abs(),
            Values::Real(v) => v[i].abs(),
            Values::Complex(v) => v[i].norm(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.values {
            Values::Int(v) => v.iter().all(|&x| x == 0),
            Values::Real(v) => v.iter().all(|&x| x == 0.0),
            Values::Complex(v) => v.iter().all(|x| x.re == 0.0 && x.im == 0.0),
        }
    }

    /// `||f||_1`, exact for integer tables.
    pub fn norm1_exact(&self) -> Option<i128> {
        self.as_int()
            .and_then(|v| v.iter().try_fold(0i128, |acc, x| acc.checked_add(x.checked_abs()?)))
    }

    pub fn norm1(&self) -> f64 {
        (0..self.len()).map(|i| self.abs(i)).sum()
    }

    /// `||f||_2^2`, exact for integer tables.
    pub fn norm2_sq_exact(&self) -> Option<i128> {
        self.as_int().and_then(|v| {
            v.iter()
                .try_fold(0i128, |acc, &x| acc.checked_add(x.checked_mul(x)?))
        })
    }

    pub fn norm2_sq(&self) -> f64 {
        (0..self.len()).map(|i| self.get(i).norm_sqr()).sum()
    }

    pub fn sum(&self) -> Complex64 {
        (0..self.len()).map(|i| self.get(i)).sum()
    }

    /// Serialises as a `group=<spec> kind=<kind>` header followed by
    /// `index value` lines (complex values as `re,im`).
    pub fn to_text(&self) -> String {
        let kind = match self.kind() {
            ValueKind::Int => "int",
            ValueKind::Real => "real",
            ValueKind::Complex => "complex",
        };
        let mut out = format!("group={} kind={}\n", self.group, kind);
        for i in 0..self.len() {
            match &self.values {
                Values::Int(v) => writeln!(out, "{i} {}", v[i]),
                Values::Real(v) => writeln!(out, "{i} {:?}", v[i]),
                Values::Complex(v) => writeln!(out, "{i} {:?},{:?}", v[i].re, v[i].im),
            }
            .expect("writing to a String cannot fail");
        }
        out
    }

    /// Parses [`FunctionTable::to_text`] output. Indices not listed are zero.
    pub fn from_text(text: &str) -> Result<FunctionTable> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty function file".into()))?;
        let mut group = None;
        let mut kind = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("group", g)) => group = Some(g.parse::<Group>()?),
                Some(("kind", "int")) => kind = Some(ValueKind::Int),
                Some(("kind", "real")) => kind = Some(ValueKind::Real),
                Some(("kind", "complex")) => kind = Some(ValueKind::Complex),
                _ => return Err(Error::Parse(format!("bad header field {field:?}"))),
            }
        }
        let group = group.ok_or_else(|| Error::Parse("header lacks group=".into()))?;
        let kind = kind.ok_or_else(|| Error::Parse("header lacks kind=".into()))?;
        let n = group.order();
        let mut values = match kind {
            ValueKind::Int => Values::Int(vec![0; n]),
            ValueKind::Real => Values::Real(vec![0.0; n]),
            ValueKind::Complex => Values::Complex(vec![Complex64::new(0.0, 0.0); n]),
        };
        let bad = |l: &str| Error::Parse(format!("bad value line {l:?}"));
        for line in lines {
            let (idx, val) = line.split_once(char::is_whitespace).ok_or_else(|| bad(line))?;
            let i: usize = idx.parse().map_err(|_| bad(line))?;
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, order: n });
            }
            let val = val.trim();
            match &mut values {
                Values::Int(v) => v[i] = val.parse().map_err(|_| bad(line))?,
                Values::Real(v) => v[i] = val.parse().map_err(|_| bad(line))?,
                Values::Complex(v) => {
                    let (re, im) = val.split_once(',').unwrap_or((val, "0"));
                    v[i] = Complex64::new(
                        re.trim().parse().map_err(|_| bad(line))?,
                        im.trim().parse().map_err(|_| bad(line))?,
                    );
                }
            }
        }
        FunctionTable::new(group, values)
    }
}

/// The Fourier transform, indexed by character frequency.
///
/// Integer input on `F2^n` stays integer; other input on `F2^n` keeps its
/// kind (the transform is real); general groups produce complex tables.
pub fn dft(f: &FunctionTable) -> Result<FunctionTable> {
    let g = f.group().clone();
    let n = g.order();
    if g.is_boolean() {
        if n > BOOLEAN_TRANSFORM_LIMIT {
            return Err(Error::SizeLimit {
                what: "Walsh-Hadamard transform",
                limit: BOOLEAN_TRANSFORM_LIMIT,
                actual: n,
            });
        }
        let values = match f.values() {
            Values::Int(v) => {
                let mut v = v.clone();
                wht_int(&mut v)?;
                Values::Int(v)
            }
            Values::Real(v) => {
                let mut v = v.clone();
                wht_by(&mut v, |a, b| (a + b, a - b));
                Values::Real(v)
            }
            Values::Complex(v) => {
                let mut v = v.clone();
                wht_by(&mut v, |a, b| (a + b, a - b));
                Values::Complex(v)
            }
        };
        return FunctionTable::new(g, values);
    }
    check_general_limit(n)?;
    let mut data = f.to_complex();
    mixed_radix(&g, &mut data, false);
    FunctionTable::from_complex(g, data)
}

/// Inverse transform `f(x) = N^-1 sum_chi f^(chi) chi(x)`; always complex.
pub fn inverse_dft(fhat: &FunctionTable) -> Result<FunctionTable> {
    let g = fhat.group().clone();
    let n = g.order();
    let mut data = fhat.to_complex();
    if g.is_boolean() {
        if n > BOOLEAN_TRANSFORM_LIMIT {
            return Err(Error::SizeLimit {
                what: "Walsh-Hadamard transform",
                limit: BOOLEAN_TRANSFORM_LIMIT,
                actual: n,
            });
        }
        wht_by(&mut data, |a, b| (a + b, a - b));
    } else {
        check_general_limit(n)?;
        mixed_radix(&g, &mut data, true);
    }
    let scale = 1.0 / n as f64;
    for v in &mut data {
        *v *= scale;
    }
    FunctionTable::from_complex(g, data)
}

fn check_general_limit(n: usize) -> Result<()> {
    if n > TRANSFORM_LIMIT {
        return Err(Error::SizeLimit {
            what: "general transform",
            limit: TRANSFORM_LIMIT,
            actual: n,
        });
    }
    Ok(())
}

fn wht_int(v: &mut [i128]) -> Result<()> {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a.checked_add(b).ok_or(Error::Overflow("Walsh-Hadamard transform"))?;
                v[i + h] = a.checked_sub(b).ok_or(Error::Overflow("Walsh-Hadamard transform"))?;
            }
        }
        h *= 2;
    }
    Ok(())
}

fn wht_by<T: Copy>(v: &mut [T], butterfly: impl Fn(T, T) -> (T, T)) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = butterfly(v[i], v[i + h]);
                v[i] = a;
                v[i + h] = b;
            }
        }
        h *= 2;
    }
}

enum AxisPlan {
    Direct(Vec<Complex64>),
    Fft(Arc<dyn Fft<f64>>),
}

/// Per-coordinate DFT. `inverse` flips the sign of the exponent (no scaling).
fn mixed_radix(g: &Group, data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let mut stride = 1usize;
    for &n in g.factors() {
        let len = n as usize;
        let plan = if n <= DIRECT_AXIS_LIMIT {
            // e^{-2 pi i m / n} forward, e^{+2 pi i m / n} inverse
            let tw = (0..n)
                .map(|m| {
                    let w = unit_root(m, n);
                    if inverse {
                        w
                    } else {
                        w.conj()
                    }
                })
                .collect();
            AxisPlan::Direct(tw)
        } else if inverse {
            AxisPlan::Fft(planner.plan_fft_inverse(len))
        } else {
            AxisPlan::Fft(planner.plan_fft_forward(len))
        };
        let block = stride * len;
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        for base in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let start = base + inner;
                for (m, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + m * stride];
                }
                match &plan {
                    AxisPlan::Direct(tw) => {
                        for (t, o) in out.iter_mut().enumerate() {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for (x, &v) in line.iter().enumerate() {
                                acc += v * tw[(t * x) % len];
                            }
                            *o = acc;
                        }
                    }
                    AxisPlan::Fft(fft) => {
                        out.copy_from_slice(&line);
                        fft.process(&mut out);
                    }
                }
                for (m, &v) in out.iter().enumerate() {
                    data[start + m * stride] = v;
                }
            }
        }
        stride = block;
    }
}

fn result_kind(a: ValueKind, b: ValueKind) -> ValueKind {
    use ValueKind::*;
    match (a, b) {
        (Complex, _) | (_, Complex) => Complex,
        (Real, _) | (_, Real) => Real,
        _ => Int,
    }
}

/// `(f * g)(x) = sum_y f(y) g(x - y)`.
pub fn convolve(f: &FunctionTable, g: &FunctionTable) -> Result<FunctionTable> {
    f.group().ensure_same(g.group())?;
    if f.group().order() <= DIRECT_CONVOLUTION_LIMIT {
        convolve_direct(f, g)
    } else {
        convolve_via_transform(f, g, DEFAULT_TOLERANCE)
    }
}

/// `(f o g)(x) = sum_y f(y) g(y + x)`.
pub fn correlate(f: &FunctionTable, g: &FunctionTable) -> Result<FunctionTable> {
    f.group().ensure_same(g.group())?;
    if f.group().order() <= DIRECT_CONVOLUTION_LIMIT {
        correlate_direct(f, g)
    } else {
        correlate_via_transform(f, g, DEFAULT_TOLERANCE)
    }
}

pub fn convolve_direct(f: &FunctionTable, g: &FunctionTable) -> Result<FunctionTable> {
    bilinear_direct(f, g, |grp, y, x| grp.sub_idx(x, y))
}

pub fn correlate_direct(f: &FunctionTable, g: &FunctionTable) -> Result<FunctionTable> {
    bilinear_direct(f, g, |grp, y, x| grp.add_idx(y, x))
}

/// `out(x) = sum_y f(y) g(partner(y, x))`.
fn bilinear_direct(
    f: &FunctionTable,
    g: &FunctionTable,
    partner: impl Fn(&Group, usize, usize) -> usize,
) -> Result<FunctionTable> {
    f.group().ensure_same(g.group())?;
    let grp = f.group();
    let n = grp.order();
    if let (Some(fv), Some(gv)) = (f.as_int(), g.as_int()) {
        let mut out = vec![0i128; n];
        for (y, &fy) in fv.iter().enumerate() {
            if fy == 0 {
                continue;
            }
            for (x, o) in out.iter_mut().enumerate() {
                let gy = gv[partner(grp, y, x)];
                if gy != 0 {
                    let p = fy.checked_mul(gy).ok_or(Error::Overflow("convolution"))?;
                    *o = o.checked_add(p).ok_or(Error::Overflow("convolution"))?;
                }
            }
        }
        return FunctionTable::from_int(grp.clone(), out);
    }
    let fv = f.to_complex();
    let gv = g.to_complex();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (y, &fy) in fv.iter().enumerate() {
        if fy.re == 0.0 && fy.im == 0.0 {
            continue;
        }
        for (x, o) in out.iter_mut().enumerate() {
            *o += fy * gv[partner(grp, y, x)];
        }
    }
    collapse(grp.clone(), out, result_kind(f.kind(), g.kind()), DEFAULT_TOLERANCE)
}

pub fn convolve_via_transform(
    f: &FunctionTable,
    g: &FunctionTable,
    tol: f64,
) -> Result<FunctionTable> {
    f.group().ensure_same(g.group())?;
    let fh = dft(f)?;
    let gh = dft(g)?;
    let prod: Vec<Complex64> = (0..fh.len()).map(|i| fh.get(i) * gh.get(i)).collect();
    let back = inverse_dft(&FunctionTable::from_complex(f.group().clone(), prod)?)?;
    collapse(
        f.group().clone(),
        back.to_complex(),
        result_kind(f.kind(), g.kind()),
        tol,
    )
}

pub fn correlate_via_transform(
    f: &FunctionTable,
    g: &FunctionTable,
    tol: f64,
) -> Result<FunctionTable> {
    f.group().ensure_same(g.group())?;
    let grp = f.group();
    let fh = dft(f)?;
    let gh = dft(g)?;
    // (f o g)^(t) = f^(-t) g^(t)
    let prod: Vec<Complex64> = (0..fh.len())
        .map(|t| fh.get(grp.neg_idx(t)) * gh.get(t))
        .collect();
    let back = inverse_dft(&FunctionTable::from_complex(grp.clone(), prod)?)?;
    collapse(
        grp.clone(),
        back.to_complex(),
        result_kind(f.kind(), g.kind()),
        tol,
    )
}

/// Converts a complex result back to the requested kind, rounding integer
/// results and rejecting residuals above `tol` (relative to the table scale).
fn collapse(group: Group, v: Vec<Complex64>, kind: ValueKind, tol: f64) -> Result<FunctionTable> {
    match kind {
        ValueKind::Complex => FunctionTable::from_complex(group, v),
        ValueKind::Real => FunctionTable::from_real(group, v.into_iter().map(|z| z.re).collect()),
        ValueKind::Int => {
            let scale = v.iter().map(|z| z.norm()).fold(1.0, f64::max);
            let mut out = Vec::with_capacity(v.len());
            for z in v {
                let r = z.re.round();
                let resid = (z.re - r).abs().max(z.im.abs());
                if resid > tol * scale {
                    return Err(Error::Precision(format!(
                        "integer rounding residual {resid:e} at scale {scale:e}"
                    )));
                }
                out.push(r as i128);
            }
            FunctionTable::from_int(group, out)
        }
    }
}

/// `f^(k) = f o f o ... o f` with the correlation taken `k - 1` times
/// (folded from the left).
pub fn iterated_correlation(f: &FunctionTable, k: u32) -> Result<FunctionTable> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if k > 8 {
        return Err(Error::SizeLimit {
            what: "iterated correlation depth",
            limit: 8,
            actual: k as usize,
        });
    }
    let mut acc = correlate(f, f)?;
    for _ in 2..k {
        acc = correlate(&acc, f)?;
    }
    Ok(acc)
}

/// Both sides of `N sum |f|^2 = sum |f^|^2`.
#[derive(Clone, Debug, Serialize)]
pub struct ParsevalCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Exact integer sides when the input is integer valued.
    pub exact: Option<(i128, i128)>,
    pub holds: bool,
}

/// Checks Parseval. For integer input the transform side is rounded to the
/// nearest integer (after a residual check) and compared exactly.
pub fn parseval(f: &FunctionTable, tol: f64) -> Result<ParsevalCheck> {
    let n = f.group().order();
    let fh = dft(f)?;
    if let (Some(l2), true) = (f.norm2_sq_exact(), f.kind() == ValueKind::Int) {
        let lhs = l2.checked_mul(n as i128).ok_or(Error::Overflow("parseval"))?;
        let rhs = match fh.as_int() {
            Some(v) => v.iter().try_fold(0i128, |acc, &x| acc.checked_add(x.checked_mul(x)?)),
            None => {
                let s = fh.norm2_sq();
                let r = s.round();
                if (s - r).abs() > tol * s.max(1.0) {
                    None
                } else {
                    Some(r as i128)
                }
            }
        };
        return Ok(match rhs {
            Some(rhs) => ParsevalCheck {
                lhs: lhs as f64,
                rhs: rhs as f64,
                exact: Some((lhs, rhs)),
                holds: lhs == rhs,
            },
            None => ParsevalCheck {
                lhs: lhs as f64,
                rhs: fh.norm2_sq(),
                exact: None,
                holds: false,
            },
        });
    }
    let lhs = n as f64 * f.norm2_sq();
    let rhs = fh.norm2_sq();
    Ok(ParsevalCheck {
        lhs,
        rhs,
        exact: None,
        holds: (lhs - rhs).abs() <= tol * lhs.abs().max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> u64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        *seed >> 33
    }

    fn random_int(g: &Group, seed: &mut u64, range: i128) -> FunctionTable {
        let v = (0..g.order())
            .map(|_| (lcg(seed) as i128 % (2 * range + 1)) - range)
            .collect();
        FunctionTable::from_int(g.clone(), v).unwrap()
    }

    fn brute_dft(f: &FunctionTable) -> Vec<Complex64> {
        let g = f.group();
        (0..g.order())
            .map(|t| {
                (0..g.order())
                    .map(|x| f.get(x) * g.char_eval_idx(t, x).conj())
                    .sum()
            })
            .collect()
    }

    #[test]
    fn delta_transforms_to_constant() {
        for g in [Group::boolean(4).unwrap(), Group::new(&[4, 6]).unwrap()] {
            let d = FunctionTable::delta(g.clone(), 0).unwrap();
            let dh = dft(&d).unwrap();
            for t in 0..g.order() {
                assert!((dh.get(t) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn subgroup_indicator_transform() {
        // H = <3> in Z12 = {0,3,6,9}; H^perp = multiples of 4.
        let g = Group::cyclic(12).unwrap();
        let h = FunctionTable::indicator(g.clone(), &[0, 3, 6, 9]).unwrap();
        let hh = dft(&h).unwrap();
        for t in 0..12 {
            let expect = if t % 4 == 0 { 4.0 } else { 0.0 };
            assert!((hh.get(t) - Complex64::new(expect, 0.0)).norm() < 1e-9, "t={t}");
        }
        // span{e1, e2} in F2^4: transform |H| on frequencies vanishing on e1, e2.
        let f = Group::boolean(4).unwrap();
        let h = FunctionTable::indicator(f.clone(), &[0, 1, 2, 3]).unwrap();
        let hh = dft(&h).unwrap();
        let v = hh.as_int().unwrap();
        for t in 0..16 {
            assert_eq!(v[t], if t & 3 == 0 { 4 } else { 0 });
        }
    }

    #[test]
    fn transform_matches_definition() {
        let mut seed = 7;
        for g in [
            Group::new(&[4, 6]).unwrap(),
            Group::cyclic(101).unwrap(),
            Group::new(&[3, 5, 2]).unwrap(),
            Group::boolean(5).unwrap(),
        ] {
            let f = random_int(&g, &mut seed, 5);
            let fast = dft(&f).unwrap();
            let slow = brute_dft(&f);
            for t in 0..g.order() {
                assert!((fast.get(t) - slow[t]).norm() < 1e-8, "{g} t={t}");
            }
            let back = inverse_dft(&fast).unwrap();
            for x in 0..g.order() {
                assert!((back.get(x) - f.get(x)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn parseval_exact_on_boolean() {
        let g = Group::boolean(8).unwrap();
        let mut seed = 3;
        for _ in 0..10 {
            let f = random_int(&g, &mut seed, 100);
            let p = parseval(&f, DEFAULT_TOLERANCE).unwrap();
            let (l, r) = p.exact.unwrap();
            assert_eq!(l, r);
            assert!(p.holds);
        }
    }

    #[test]
    fn overflow_is_reported() {
        let g = Group::boolean(2).unwrap();
        let f = FunctionTable::from_int(g, vec![i128::MAX, i128::MAX, 0, 0]).unwrap();
        assert!(matches!(dft(&f), Err(Error::Overflow(_))));
    }

    #[test]
    fn correlation_of_indicator_counts_slices() {
        let g = Group::cyclic(20).unwrap();
        let a = [0usize, 1, 4, 9, 11, 15];
        let ind = FunctionTable::indicator(g.clone(), &a).unwrap();
        let c = correlate(&ind, &ind).unwrap();
        let v = c.as_int().unwrap();
        assert_eq!(v[0], a.len() as i128);
        for x in 0..20 {
            // |A ∩ (A + x)|
            let slice = a.iter().filter(|&&y| a.contains(&g.sub_idx(y, x))).count();
            assert_eq!(v[x], slice as i128);
            assert_eq!(v[x], v[g.neg_idx(x)]);
        }
    }

    #[test]
    fn direct_and_transform_paths_agree_on_z36() {
        let g = Group::cyclic(36).unwrap();
        let mut seed = 11;
        for _ in 0..20 {
            let f = random_int(&g, &mut seed, 1).into_values();
            let Values::Int(fv) = f else { unreachable!() };
            let a = FunctionTable::from_int(g.clone(), fv.iter().map(|x| x.abs()).collect()).unwrap();
            let b = random_int(&g, &mut seed, 3);
            // brute-force double loop
            let mut conv = vec![0i128; 36];
            let mut corr = vec![0i128; 36];
            let (av, bv) = (a.as_int().unwrap(), b.as_int().unwrap());
            for x in 0..36 {
                for y in 0..36 {
                    conv[x] += av[y] * bv[(x + 36 - y) % 36];
                    corr[x] += av[y] * bv[(y + x) % 36];
                }
            }
            assert_eq!(convolve_direct(&a, &b).unwrap().as_int().unwrap(), &conv[..]);
            assert_eq!(
                convolve_via_transform(&a, &b, DEFAULT_TOLERANCE).unwrap().as_int().unwrap(),
                &conv[..]
            );
            assert_eq!(correlate_direct(&a, &b).unwrap().as_int().unwrap(), &corr[..]);
            assert_eq!(
                correlate_via_transform(&a, &b, DEFAULT_TOLERANCE).unwrap().as_int().unwrap(),
                &corr[..]
            );
        }
    }

    #[test]
    fn fourth_iterate_at_zero_is_energy() {
        let g = Group::cyclic(20).unwrap();
        let a = [0usize, 2, 3, 7, 8, 13, 19];
        let ind = FunctionTable::indicator(g.clone(), &a).unwrap();
        let a4 = iterated_correlation(&ind, 4).unwrap();
        let mut quads = 0i128;
        for &a1 in &a {
            for &a2 in &a {
                for &a3 in &a {
                    for &a4 in &a {
                        if (a1 + 20 - a2) % 20 == (a3 + 20 - a4) % 20 {
                            quads += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(a4.as_int().unwrap()[0], quads);
    }

    #[test]
    fn iterated_correlation_of_delta_and_subgroup() {
        let g = Group::new(&[4, 6]).unwrap();
        let d = FunctionTable::delta(g.clone(), 0).unwrap();
        for k in 2..=5 {
            assert_eq!(iterated_correlation(&d, k).unwrap(), d);
        }
        // H = {(0,0),(2,0),(0,3),(2,3)}
        let h: Vec<usize> = [(0, 0), (2, 0), (0, 3), (2, 3)]
            .iter()
            .map(|&(a, b)| g.index(&crate::group::Element(vec![a, b])).unwrap())
            .collect();
        let ind = FunctionTable::indicator(g.clone(), &h).unwrap();
        for k in 2..=4u32 {
            let hk = iterated_correlation(&ind, k).unwrap();
            for x in 0..g.order() {
                let expect = if h.contains(&x) { 4i128.pow(k - 1) } else { 0 };
                assert_eq!(hk.as_int().unwrap()[x], expect);
            }
        }
        assert!(iterated_correlation(&ind, 1).is_err());
    }

    #[test]
    fn text_round_trip() {
        let g = Group::new(&[4, 6]).unwrap();
        let mut seed = 5;
        let f = random_int(&g, &mut seed, 9);
        assert_eq!(FunctionTable::from_text(&f.to_text()).unwrap(), f);
        let c = dft(&f).unwrap();
        let back = FunctionTable::from_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
        assert!(FunctionTable::from_text("group=Z4 kind=int\n9 1\n").is_err());
    }
}
