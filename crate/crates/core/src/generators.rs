//! Extreme rays of the fundamental cone and their pseudo-weights.
//!
//! Rays are enumerated with the double-description method, starting from the
//! nonnegative orthant and adding one cone inequality at a time. Rays are
//! kept as primitive integer vectors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::codes::ParityCheckMatrix;
use crate::error::{Error, Result};
use crate::linprog::format_rational;
use crate::polytope::{ConstraintSystem, SystemKind};

/// Default limit on the code length for generator enumeration.
pub const DEFAULT_MAX_LENGTH: usize = 20;

/// Default histogram bin width.
pub const DEFAULT_RESOLUTION: f64 = 0.1;

/// A cone generator normalized to unit coordinate sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoCodeword {
    vector: Vec<BigRational>,
    pseudo_weight: BigRational,
    is_codeword_ray: bool,
}

impl PseudoCodeword {
    /// Normalizes a nonnegative nonzero vector to sum one. `code`, when
    /// given, is used to decide whether the ray is a codeword ray.
    pub fn from_vector(vector: Vec<BigRational>, code: Option<&ParityCheckMatrix>) -> Result<Self> {
        if vector.iter().any(Signed::is_negative) {
            return Err(Error::InvalidArgument("pseudo-codewords are nonnegative".into()));
        }
        let sum: BigRational = vector.iter().fold(BigRational::zero(), |a, b| a + b);
        if sum.is_zero() {
            return Err(Error::InvalidArgument("zero vector".into()));
        }
        let vector: Vec<BigRational> = vector.into_iter().map(|v| v / &sum).collect();
        let norm2: BigRational = vector.iter().fold(BigRational::zero(), |a, b| a + b * b);
        let pseudo_weight = norm2.recip();
        let is_codeword_ray = match code {
            Some(h) => is_codeword_ray(&vector, h),
            None => false,
        };
        Ok(PseudoCodeword {
            vector,
            pseudo_weight,
            is_codeword_ray,
        })
    }

    pub fn vector(&self) -> &[BigRational] {
        &self.vector
    }

    pub fn vector_f64(&self) -> Vec<f64> {
        self.vector.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn pseudo_weight(&self) -> f64 {
        self.pseudo_weight.to_f64().unwrap_or(f64::NAN)
    }

    pub fn pseudo_weight_exact(&self) -> &BigRational {
        &self.pseudo_weight
    }

    pub fn is_codeword_ray(&self) -> bool {
        self.is_codeword_ray
    }

    /// Support as a 0/1 word.
    pub fn support(&self) -> Vec<u8> {
        self.vector.iter().map(|v| u8::from(!v.is_zero())).collect()
    }
}

fn is_codeword_ray(vector: &[BigRational], h: &ParityCheckMatrix) -> bool {
    let mut nonzero = vector.iter().filter(|v| !v.is_zero());
    let Some(first) = nonzero.next() else {
        return false;
    };
    let flat = nonzero.all(|v| v == first);
    let support: Vec<u8> = vector.iter().map(|v| u8::from(!v.is_zero())).collect();
    flat && vector.len() == h.cols() && h.is_codeword(&support)
}

/// `(sum x)^2 / |x|^2` for a nonnegative nonzero vector.
pub fn pseudo_weight(x: &[f64]) -> Result<f64> {
    if x.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "pseudo-weight needs a finite nonnegative vector".into(),
        ));
    }
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    if norm2 == 0.0 {
        return Err(Error::InvalidArgument("pseudo-weight of the zero vector".into()));
    }
    let sum: f64 = x.iter().sum();
    Ok(sum * sum / norm2)
}

/// Exact pseudo-weight of a rational vector.
pub fn pseudo_weight_exact(x: &[BigRational]) -> Result<BigRational> {
    if x.iter().any(Signed::is_negative) {
        return Err(Error::InvalidArgument(
            "pseudo-weight needs a nonnegative vector".into(),
        ));
    }
    let norm2: BigRational = x.iter().fold(BigRational::zero(), |a, b| a + b * b);
    if norm2.is_zero() {
        return Err(Error::InvalidArgument("pseudo-weight of the zero vector".into()));
    }
    let sum: BigRational = x.iter().fold(BigRational::zero(), |a, b| a + b);
    Ok(&sum * &sum / norm2)
}

#[derive(Clone, Debug)]
struct Ray {
    v: Vec<i128>,
    zero: ZeroSet,
}

/// Indices of constraints a ray satisfies with equality.
#[derive(Clone, Debug, PartialEq, Eq)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn empty(len: usize) -> Self {
        ZeroSet(vec![0; len.div_ceil(64)])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn intersect(&self, other: &ZeroSet) -> ZeroSet {
        ZeroSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn is_subset_of(&self, other: &ZeroSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

fn primitive(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

fn dot(a: &[i128], v: &[i128]) -> Result<i128> {
    a.iter()
        .zip(v)
        .try_fold(0i128, |acc, (&x, &y)| {
            if x == 0 || y == 0 {
                return Some(acc);
            }
            acc.checked_add(x.checked_mul(y)?)
        })
        .ok_or(Error::Overflow("ray evaluation"))
}

/// Integer coefficient rows `a` with the cone described by `a . x <= 0`,
/// scaled from the rational system.
fn integer_rows(cone: &ConstraintSystem) -> Result<Vec<Vec<i128>>> {
    let n = cone.dim();
    cone.non_bound_constraints()
        .map(|c| {
            let lcm = c.terms().iter().fold(1i64, |l, (_, r)| l.lcm(r.denom()));
            let mut row = vec![0i128; n];
            for &(i, r) in c.terms() {
                row[i] = i128::from(*r.numer()) * i128::from(lcm / *r.denom());
            }
            if c.sense() != crate::polytope::Sense::LessEq {
                return Err(Error::InvalidArgument(
                    "equalities are not supported in cone enumeration".into(),
                ));
            }
            Ok(row)
        })
        .collect()
}

/// Complete duplicate-free list of extreme rays of a cone system, each
/// normalized to unit coordinate sum, in a canonical (lexicographic) order.
pub fn enumerate_generators(cone: &ConstraintSystem, code: Option<&ParityCheckMatrix>) -> Result<Vec<PseudoCodeword>> {
    enumerate_generators_with_guard(cone, code, DEFAULT_MAX_LENGTH)
}

pub fn enumerate_generators_with_guard(
    cone: &ConstraintSystem,
    code: Option<&ParityCheckMatrix>,
    max_length: usize,
) -> Result<Vec<PseudoCodeword>> {
    if cone.kind() != SystemKind::Cone {
        return Err(Error::InvalidArgument("expected a cone system".into()));
    }
    let n = cone.dim();
    if n > max_length {
        return Err(Error::Guard {
            what: "code length for generator enumeration",
            limit: max_length,
            actual: n,
        });
    }
    let mut rows = integer_rows(cone)?;
    // Smaller supports first, ties in original order.
    rows.sort_by_key(|r| r.iter().filter(|&&a| a != 0).count());
    let total = n + rows.len();

    let mut rays: Vec<Ray> = (0..n)
        .map(|i| {
            let mut v = vec![0i128; n];
            v[i] = 1;
            let mut zero = ZeroSet::empty(total);
            (0..n).filter(|&j| j != i).for_each(|j| zero.insert(j));
            Ray { v, zero }
        })
        .collect();

    for (k, a) in rows.iter().enumerate() {
        let idx = n + k;
        let values: Vec<i128> = rays.iter().map(|r| dot(a, &r.v)).collect::<Result<_>>()?;
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (r, &s) in values.iter().enumerate() {
            match s.signum() {
                1 => pos.push(r),
                -1 => neg.push(r),
                _ => rays[r].zero.insert(idx),
            }
        }
        if pos.is_empty() {
            continue;
        }
        let mut created = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zero.intersect(&rays[q].zero);
                if common.len() + 2 < n {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(r, ray)| r != p && r != q && common.is_subset_of(&ray.zero));
                if blocked {
                    continue;
                }
                let (sp, sq) = (values[p], -values[q]);
                let mut v = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(&vq, &vp)| sp.checked_mul(vq)?.checked_add(sq.checked_mul(vp)?))
                    .collect::<Option<Vec<i128>>>()
                    .ok_or(Error::Overflow("ray combination"))?;
                primitive(&mut v);
                let mut zero = common;
                zero.insert(idx);
                created.push(Ray { v, zero });
            }
        }
        let keep: Vec<Ray> = values
            .iter()
            .zip(rays)
            .filter(|(s, _)| **s <= 0)
            .map(|(_, r)| r)
            .collect();
        rays = keep;
        rays.extend(created);
    }

    let unique: BTreeSet<Vec<i128>> = rays
        .into_iter()
        .map(|r| r.v)
        .filter(|v| v.iter().any(|&x| x != 0))
        .collect();
    unique
        .into_iter()
        .rev()
        .map(|v| {
            let big = v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
            PseudoCodeword::from_vector(big, code)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumBin {
    #[serde(serialize_with = "crate::report::ser_sig6")]
    pub pseudo_weight: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumHistogram {
    #[serde(serialize_with = "crate::report::ser_sig6")]
    pub resolution: f64,
    pub bins: Vec<SpectrumBin>,
    #[serde(serialize_with = "crate::report::ser_sig6")]
    pub min_pw: f64,
    pub generator_count: usize,
    pub codeword_rays: usize,
}

/// Histogram of pseudo-weights, rounded to the nearest multiple of
/// `resolution`; `min_pw` is unrounded.
pub fn spectrum(gens: &[PseudoCodeword], resolution: f64) -> Result<SpectrumHistogram> {
    if gens.is_empty() {
        return Err(Error::Empty("generator list"));
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for g in gens {
        *counts
            .entry((g.pseudo_weight() / resolution).round() as i64)
            .or_default() += 1;
    }
    let min_exact = gens.iter().map(|g| g.pseudo_weight_exact()).min().expect("nonempty");
    Ok(SpectrumHistogram {
        resolution,
        bins: counts
            .into_iter()
            .map(|(b, count)| SpectrumBin {
                pseudo_weight: b as f64 * resolution,
                count,
            })
            .collect(),
        min_pw: min_exact.to_f64().unwrap_or(f64::NAN),
        generator_count: gens.len(),
        codeword_rays: gens.iter().filter(|g| g.is_codeword_ray()).count(),
    })
}

impl SpectrumHistogram {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("pseudo_weight,count\n");
        for b in &self.bins {
            let _ = writeln!(s, "{},{}", crate::report::sig6(b.pseudo_weight), b.count);
        }
        s
    }
}

/// One ray per line, entries as exact `p/q` separated by spaces.
pub fn format_generators(gens: &[PseudoCodeword]) -> String {
    let mut s = String::new();
    for g in gens {
        let cells: Vec<String> = g.vector().iter().map(format_rational).collect();
        let _ = writeln!(s, "{}", cells.join(" "));
    }
    s
}

fn parse_rational(tok: &str) -> Option<BigRational> {
    let (p, q) = match tok.split_once('/') {
        Some((p, q)) => (p.parse::<BigInt>().ok()?, q.parse::<BigInt>().ok()?),
        None => (tok.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if q.is_zero() {
        return None;
    }
    Some(BigRational::new(p, q))
}

/// Reads the generator dump written by [`format_generators`]. All rows must
/// have the same length and be nonnegative and nonzero.
pub fn parse_generators(text: &str, code: Option<&ParityCheckMatrix>) -> Result<Vec<PseudoCodeword>> {
    let mut out = Vec::new();
    let mut width = None;
    for (no, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v = line
            .split_whitespace()
            .map(|t| {
                if t.len() > 200 {
                    return Err(Error::parse(no, "rational too long"));
                }
                parse_rational(t).ok_or_else(|| Error::parse(no, format!("invalid rational {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        match width {
            None => width = Some(v.len()),
            Some(w) if w != v.len() => return Err(Error::parse(no, format!("expected {w} entries, got {}", v.len()))),
            _ => {}
        }
        if let Some(h) = code {
            if v.len() != h.cols() {
                return Err(Error::parse(no, "ray length does not match code length"));
            }
        }
        out.push(PseudoCodeword::from_vector(v, code).map_err(|e| Error::parse(no, e.to_string()))?);
    }
    Ok(out)
}
