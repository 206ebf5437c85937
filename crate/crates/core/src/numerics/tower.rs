//! Exact arithmetic in towers of real number fields over Q.
//!
//! A [`Tower`] is a chain `Q ⊂ K₁ ⊂ … ⊂ Kₙ` where each step adjoins one real
//! algebraic number: either a root of a rational polynomial (first level
//! only) or a square root of a positive element of the previous field.
//! Elements are stored as rational coordinate vectors in the mixed-radix
//! power basis `α₁^i₁ · α₂^i₂ ⋯`, lowest level varying fastest, so an element
//! of a prefix tower embeds by zero padding.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::FixedInterval;
use super::NumSign;

/// How one level of the tower is adjoined.
#[derive(Clone, Debug)]
pub enum LevelKind {
    /// The unique root of a rational polynomial inside `(lo, hi)`.
    RationalRoot {
        /// Monic coefficients, constant term first.
        poly: Vec<BigRational>,
        lo: BigRational,
        hi: BigRational,
    },
    /// `±sqrt(radicand)`, the radicand being a positive element of the
    /// previous field.
    SquareRoot { radicand: Elem, positive: bool },
}

pub struct Level {
    name: String,
    kind: LevelKind,
    degree: usize,
    /// Coefficients `p_0..p_{d-1}` of the monic minimal polynomial as
    /// coordinate vectors over the previous field.
    min_poly: Vec<Vec<BigRational>>,
    cache: Mutex<RootCache>,
}

#[derive(Default)]
struct RootCache {
    /// Best dyadic isolating interval found so far (rational-root levels).
    isolating: Option<DyadicBracket>,
    by_bits: HashMap<u32, FixedInterval>,
}

impl fmt::Debug for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Level")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .finish()
    }
}

impl Level {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> &LevelKind {
        &self.kind
    }

    /// Human-readable minimal polynomial, e.g. `x^3 - x^2 - 2x + 1`.
    pub fn describe(&self) -> String {
        match &self.kind {
            LevelKind::RationalRoot { poly, lo, hi } => {
                format!("{} : {} = 0, root in ({}, {})", self.name, format_poly(poly, &self.name), lo, hi)
            }
            LevelKind::SquareRoot { radicand, positive } => {
                let sign = if *positive { "+" } else { "-" };
                format!("{} = {}sqrt({})", self.name, sign, radicand)
            }
        }
    }
}

fn format_poly(poly: &[BigRational], var: &str) -> String {
    let mut terms = Vec::new();
    for (i, c) in poly.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let coeff = if mag.is_one() && i > 0 { String::new() } else { mag.to_string() };
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        let body = format!("{coeff}{mono}");
        let sign = if c.is_negative() { "-" } else { "+" };
        if terms.is_empty() {
            terms.push(if c.is_negative() { format!("-{body}") } else { body });
        } else {
            terms.push(format!("{sign} {body}"));
        }
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" ")
    }
}

struct TowerInner {
    levels: Vec<Arc<Level>>,
    /// `strides[i]` is the dimension of the field below level `i`.
    strides: Vec<usize>,
    dim: usize,
    table: OnceLock<MulTable>,
    basis: Mutex<HashMap<u32, Arc<Vec<FixedInterval>>>>,
}

impl TowerInner {
    fn new(levels: Vec<Arc<Level>>, strides: Vec<usize>, dim: usize) -> TowerInner {
        TowerInner { levels, strides, dim, table: OnceLock::new(), basis: Mutex::new(HashMap::new()) }
    }
}

/// A tower of real number fields. Cheap to clone.
#[derive(Clone)]
pub struct Tower(Arc<TowerInner>);

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.levels.iter().map(|l| l.name.clone())).finish()
    }
}

impl Tower {
    /// The field Q.
    pub fn rationals() -> Tower {
        Tower(Arc::new(TowerInner::new(Vec::new(), Vec::new(), 1)))
    }

    fn with_level(&self, level: Level) -> Tower {
        let mut levels = self.0.levels.clone();
        let mut strides = self.0.strides.clone();
        strides.push(self.0.dim);
        let dim = self.0.dim * level.degree;
        levels.push(Arc::new(level));
        Tower(Arc::new(TowerInner::new(levels, strides, dim)))
    }

    /// Adjoin the root of the monic rational polynomial `poly` isolated in
    /// `(lo, hi)`. Only allowed directly over Q.
    ///
    /// # Panics
    ///
    /// Panics if the tower is not Q, the polynomial is not monic of degree
    /// at least 2, or the endpoints do not bracket a sign change.
    pub fn adjoin_root(name: &str, poly: Vec<BigRational>, lo: BigRational, hi: BigRational) -> Tower {
        let base = Tower::rationals();
        let degree = poly.len() - 1;
        assert!(degree >= 2, "adjoined root must have degree >= 2");
        assert!(poly[degree].is_one(), "minimal polynomial must be monic");
        let (slo, shi) = (eval_rational_poly(&poly, &lo), eval_rational_poly(&poly, &hi));
        assert!(
            slo.signum() * shi.signum() < BigRational::zero(),
            "isolating interval must bracket a sign change"
        );
        let min_poly = poly[..degree].iter().map(|c| vec![c.clone()]).collect();
        base.with_level(Level {
            name: name.to_string(),
            kind: LevelKind::RationalRoot { poly, lo, hi },
            degree,
            min_poly,
            cache: Mutex::new(RootCache::default()),
        })
    }

    /// Adjoin `±sqrt(radicand)`. The radicand must be a positive element of
    /// this tower that is not a square in it (not checked; a square radicand
    /// still gives correct arithmetic but a non-reduced basis, so exact zero
    /// tests could miss).
    pub fn adjoin_sqrt(&self, name: &str, radicand: &Elem, positive: bool) -> Tower {
        let radicand = radicand.embed(self);
        assert_eq!(radicand.sign(), NumSign::Positive, "radicand must be positive");
        let neg = radicand.neg_ref().coords();
        let min_poly = vec![neg, vec![BigRational::zero(); self.0.dim]];
        self.with_level(Level {
            name: name.to_string(),
            kind: LevelKind::SquareRoot { radicand, positive },
            degree: 2,
            min_poly,
            cache: Mutex::new(RootCache::default()),
        })
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn depth(&self) -> usize {
        self.0.levels.len()
    }

    pub fn levels(&self) -> &[Arc<Level>] {
        &self.0.levels
    }

    /// The tower made of the first `depth` levels of this one.
    pub fn prefix(&self, depth: usize) -> Tower {
        let levels = self.0.levels[..depth].to_vec();
        let strides = self.0.strides[..depth].to_vec();
        let dim = levels.iter().map(|l| l.degree).product();
        Tower(Arc::new(TowerInner::new(levels, strides, dim)))
    }

    /// Whether every element of `self` is (by construction) an element of `other`.
    pub fn is_prefix_of(&self, other: &Tower) -> bool {
        self.depth() <= other.depth()
            && self.0.levels.iter().zip(other.0.levels.iter()).all(|(a, b)| Arc::ptr_eq(a, b))
    }

    pub fn same(&self, other: &Tower) -> bool {
        self.depth() == other.depth() && self.is_prefix_of(other)
    }

    /// Lines describing each adjoined element.
    pub fn descriptor(&self) -> Vec<String> {
        self.0.levels.iter().map(|l| l.describe()).collect()
    }

    pub fn generator(&self, level: usize) -> Elem {
        self.basis_elem(self.0.strides[level])
    }

    fn basis_elem(&self, i: usize) -> Elem {
        let mut num = vec![BigInt::zero(); self.0.dim];
        num[i] = BigInt::one();
        Elem { tower: self.clone(), num, den: BigInt::one() }
    }

    pub fn zero(&self) -> Elem {
        Elem { tower: self.clone(), num: vec![BigInt::zero(); self.0.dim], den: BigInt::one() }
    }

    pub fn one(&self) -> Elem {
        self.rational(BigRational::one())
    }

    pub fn rational(&self, q: BigRational) -> Elem {
        let mut num = vec![BigInt::zero(); self.0.dim];
        num[0] = q.numer().clone();
        Elem { tower: self.clone(), num, den: q.denom().clone() }
    }

    pub fn int(&self, n: i64) -> Elem {
        self.rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Build an element from raw coordinates.
    ///
    /// # Panics
    ///
    /// Panics if the length does not match the dimension.
    pub fn from_coords(&self, c: Vec<BigRational>) -> Elem {
        assert_eq!(c.len(), self.0.dim, "coordinate vector has wrong length");
        Elem::from_rationals(self.clone(), c)
    }

    fn join(a: &Tower, b: &Tower) -> Tower {
        if a.is_prefix_of(b) {
            b.clone()
        } else if b.is_prefix_of(a) {
            a.clone()
        } else {
            panic!("arithmetic between elements of unrelated number field towers")
        }
    }

    /// Multiply two coordinate vectors of the subfield made of the first
    /// `level` levels.
    fn mul_rec(&self, level: usize, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        if level == 0 {
            return vec![&a[0] * &b[0]];
        }
        let lv = &self.0.levels[level - 1];
        let d = lv.degree;
        let s = self.0.strides[level - 1];
        let nonzero = |v: &[BigRational]| v.iter().any(|x| !x.is_zero());
        let mut prod: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); s]; 2 * d - 1];
        for i in 0..d {
            let ai = &a[i * s..(i + 1) * s];
            if !nonzero(ai) {
                continue;
            }
            for j in 0..d {
                let bj = &b[j * s..(j + 1) * s];
                if !nonzero(bj) {
                    continue;
                }
                let p = self.mul_rec(level - 1, ai, bj);
                for (acc, x) in prod[i + j].iter_mut().zip(p) {
                    *acc += x;
                }
            }
        }
        for k in (d..2 * d - 1).rev() {
            let top = std::mem::replace(&mut prod[k], vec![BigRational::zero(); s]);
            if !nonzero(&top) {
                continue;
            }
            for (m, pm) in lv.min_poly.iter().enumerate() {
                if !nonzero(pm) {
                    continue;
                }
                let p = self.mul_rec(level - 1, &top, pm);
                for (acc, x) in prod[k - d + m].iter_mut().zip(p) {
                    *acc -= x;
                }
            }
        }
        prod.truncate(d);
        prod.into_iter().flatten().collect()
    }

    fn mul_table(&self) -> &MulTable {
        self.0.table.get_or_init(|| {
            let n = self.0.dim;
            let unit = |i: usize| {
                let mut v = vec![BigRational::zero(); n];
                v[i] = BigRational::one();
                v
            };
            let prods: Vec<Vec<BigRational>> = (0..n * n)
                .map(|ij| self.mul_rec(self.depth(), &unit(ij / n), &unit(ij % n)))
                .collect();
            let den = prods.iter().flatten().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            let entries = prods
                .iter()
                .map(|p| {
                    p.iter()
                        .enumerate()
                        .filter(|(_, q)| !q.is_zero())
                        .map(|(k, q)| (k, q.numer() * (&den / q.denom())))
                        .collect()
                })
                .collect();
            MulTable { entries, den }
        })
    }

    /// Enclosures of all power-basis monomials at `bits`.
    fn basis_enclosures(&self, bits: u32) -> Arc<Vec<FixedInterval>> {
        if let Some(b) = self.0.basis.lock().expect("basis cache poisoned").get(&bits) {
            return b.clone();
        }
        let gens: Vec<Vec<FixedInterval>> = (0..self.depth())
            .map(|lvl| {
                let g = self.generator_interval(lvl, bits);
                let d = self.0.levels[lvl].degree;
                let mut pw = vec![FixedInterval::one(bits)];
                for k in 1..d {
                    let next = pw[k - 1].mul(&g);
                    pw.push(next);
                }
                pw
            })
            .collect();
        let out: Vec<FixedInterval> = (0..self.0.dim)
            .map(|idx| {
                let mut rem = idx;
                let mut mono = FixedInterval::one(bits);
                for (lvl, pw) in gens.iter().enumerate() {
                    let d = self.0.levels[lvl].degree;
                    let e = rem % d;
                    rem /= d;
                    if e > 0 {
                        mono = mono.mul(&pw[e]);
                    }
                }
                mono
            })
            .collect();
        let out = Arc::new(out);
        self.0.basis.lock().expect("basis cache poisoned").insert(bits, out.clone());
        out
    }

    /// Fixed-point enclosure of the generator of `level` at `bits`.
    fn generator_interval(&self, level: usize, bits: u32) -> FixedInterval {
        let lv = &self.0.levels[level];
        if let Some(iv) = lv.cache.lock().expect("root cache poisoned").by_bits.get(&bits) {
            return iv.clone();
        }
        let iv = match &lv.kind {
            LevelKind::RationalRoot { poly, lo, hi } => {
                let mut cache = lv.cache.lock().expect("root cache poisoned");
                let start = cache.isolating.clone().unwrap_or_else(|| dyadic_bracket(poly, lo, hi));
                let refined = start.refine_to(poly, bits + 2);
                let iv = refined.to_fixed(bits);
                cache.isolating = Some(refined);
                iv
            }
            LevelKind::SquareRoot { radicand, positive } => {
                let r = radicand.enclose(bits + 8).rescale(bits);
                let root = r.sqrt();
                if *positive {
                    root
                } else {
                    root.neg()
                }
            }
        };
        lv.cache.lock().expect("root cache poisoned").by_bits.insert(bits, iv.clone());
        iv
    }
}


/// Bracket `[lo, hi] / 2^k` around a simple real root.
#[derive(Clone, Debug)]
struct DyadicBracket {
    lo: BigInt,
    hi: BigInt,
    k: u32,
}

impl DyadicBracket {
    /// Bisect until the width is at most `2^-bits`.
    fn refine_to(mut self, poly: &[BigRational], bits: u32) -> DyadicBracket {
        let coeffs = integer_coefficients(poly);
        let s_lo = dyadic_poly_sign(&coeffs, &self.lo, self.k);
        loop {
            let width = &self.hi - &self.lo;
            // width / 2^k <= 2^-bits  <=>  width <= 2^(k - bits)
            if self.k >= bits && width <= (BigInt::one() << (self.k - bits)) {
                return self;
            }
            let mid = &self.lo + &self.hi;
            self.lo <<= 1;
            self.hi <<= 1;
            self.k += 1;
            let s_mid = dyadic_poly_sign(&coeffs, &mid, self.k);
            if s_mid == 0 {
                self.lo = mid.clone();
                self.hi = mid;
                return self;
            }
            if s_mid == s_lo {
                self.lo = mid;
            } else {
                self.hi = mid;
            }
        }
    }

    fn to_fixed(&self, bits: u32) -> FixedInterval {
        let at_k = FixedInterval { lo: self.lo.clone(), hi: self.hi.clone(), bits: self.k };
        at_k.rescale(bits)
    }
}

/// Shrink the rational isolating interval to a dyadic one.
fn dyadic_bracket(poly: &[BigRational], lo: &BigRational, hi: &BigRational) -> DyadicBracket {
    let s_lo = eval_rational_poly(poly, lo).signum();
    let s_hi = eval_rational_poly(poly, hi).signum();
    let mut k: u32 = 8;
    loop {
        let scale: BigInt = BigInt::one() << k;
        let a = ceil_div(&(lo.numer() * &scale), lo.denom());
        let b = floor_div(&(hi.numer() * &scale), hi.denom());
        if a < b {
            let qa = BigRational::new(a.clone(), scale.clone());
            let qb = BigRational::new(b.clone(), scale.clone());
            if eval_rational_poly(poly, &qa).signum() == s_lo && eval_rational_poly(poly, &qb).signum() == s_hi {
                return DyadicBracket { lo: a, hi: b, k };
            }
        }
        k += 8;
    }
}

fn integer_coefficients(poly: &[BigRational]) -> Vec<BigInt> {
    let l = poly.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    poly.iter().map(|c| c.numer() * (&l / c.denom())).collect()
}

/// Sign of `poly(m / 2^k)` for integer coefficients.
fn dyadic_poly_sign(coeffs: &[BigInt], m: &BigInt, k: u32) -> i8 {
    let n = coeffs.len() - 1;
    let mut acc = coeffs[n].clone();
    for i in (0..n).rev() {
        acc = acc * m + (&coeffs[i] << (k as usize * (n - i)));
    }
    match acc.sign() {
        BigSign::Plus => 1,
        BigSign::Minus => -1,
        BigSign::NoSign => 0,
    }
}

fn eval_rational_poly(poly: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in poly.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// An element of a number-field tower: integer coordinates over one
/// positive common denominator, kept in lowest terms.
#[derive(Clone)]
pub struct Elem {
    tower: Tower,
    num: Vec<BigInt>,
    den: BigInt,
}

/// Structure constants `e_i · e_j = Σ_k n_ijk e_k / den`.
struct MulTable {
    entries: Vec<Vec<(usize, BigInt)>>,
    den: BigInt,
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.tower.0.levels.iter().map(|l| l.name.as_str()).collect();
        let degrees: Vec<usize> = self.tower.0.levels.iter().map(|l| l.degree).collect();
        let mut first = true;
        for (idx, q) in self.coords().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let mut rem = idx;
            let mut mono = Vec::new();
            for (name, d) in names.iter().zip(&degrees) {
                let e = rem % d;
                rem /= d;
                match e {
                    0 => {}
                    1 => mono.push((*name).to_string()),
                    _ => mono.push(format!("{name}^{e}")),
                }
            }
            let sep = if first {
                if q.is_negative() {
                    "-"
                } else {
                    ""
                }
            } else if q.is_negative() {
                " - "
            } else {
                " + "
            };
            let mag = q.abs();
            let body = if mono.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                mono.join("*")
            } else {
                format!("{}*{}", mag, mono.join("*"))
            };
            write!(f, "{sep}{body}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl PartialEq for Elem {
    fn eq(&self, other: &Self) -> bool {
        if self.tower.same(&other.tower) {
            self.den == other.den && self.num == other.num
        } else {
            let t = Tower::join(&self.tower, &other.tower);
            let (a, b) = (self.embed(&t), other.embed(&t));
            a.den == b.den && a.num == b.num
        }
    }
}

impl Eq for Elem {}

impl Hash for Elem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // Trailing zero coordinates are dropped so that embedded copies hash alike.
        let last = self.num.iter().rposition(|x| !x.is_zero()).map_or(0, |i| i + 1);
        self.num[..last].hash(state);
        self.den.hash(state);
    }
}

impl Elem {
    fn reduced(tower: Tower, mut num: Vec<BigInt>, mut den: BigInt) -> Elem {
        if den.is_negative() {
            den = -den;
            num.iter_mut().for_each(|x| *x = -&*x);
        }
        let mut g = den.clone();
        for x in &num {
            if g.is_one() {
                break;
            }
            if !x.is_zero() {
                g = g.gcd(x);
            }
        }
        if num.iter().all(Zero::is_zero) {
            return Elem { tower, num, den: BigInt::one() };
        }
        if !g.is_one() {
            num.iter_mut().for_each(|x| *x = &*x / &g);
            den /= &g;
        }
        Elem { tower, num, den }
    }

    fn from_rationals(tower: Tower, c: Vec<BigRational>) -> Elem {
        let den = c.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let num = c.iter().map(|q| q.numer() * (&den / q.denom())).collect();
        Elem::reduced(tower, num, den)
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    /// Rational coordinates in the tower's power basis.
    pub fn coords(&self) -> Vec<BigRational> {
        self.num.iter().map(|n| BigRational::new(n.clone(), self.den.clone())).collect()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, when the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    /// Embed into a tower that has `self.tower()` as a prefix.
    ///
    /// # Panics
    ///
    /// Panics when the towers are unrelated.
    pub fn embed(&self, target: &Tower) -> Elem {
        if self.tower.same(target) {
            return self.clone();
        }
        assert!(self.tower.is_prefix_of(target), "cannot embed into an unrelated tower");
        let mut num = self.num.clone();
        num.resize(target.dim(), BigInt::zero());
        Elem { tower: target.clone(), num, den: self.den.clone() }
    }

    fn neg_ref(&self) -> Elem {
        Elem { tower: self.tower.clone(), num: self.num.iter().map(|x| -x).collect(), den: self.den.clone() }
    }

    fn add_signed(&self, other: &Elem, negate: bool) -> Elem {
        if !self.tower.same(&other.tower) {
            let t = Tower::join(&self.tower, &other.tower);
            return self.embed(&t).add_signed(&other.embed(&t), negate);
        }
        let comb = |a: &BigInt, b: &BigInt| if negate { a - b } else { a + b };
        if self.den == other.den {
            let num = self.num.iter().zip(&other.num).map(|(a, b)| comb(a, b)).collect();
            return Elem::reduced(self.tower.clone(), num, self.den.clone());
        }
        let num = self.num.iter().zip(&other.num).map(|(a, b)| comb(&(a * &other.den), &(b * &self.den))).collect();
        Elem::reduced(self.tower.clone(), num, &self.den * &other.den)
    }

    pub fn mul_ref(&self, other: &Elem) -> Elem {
        if !self.tower.same(&other.tower) {
            let t = Tower::join(&self.tower, &other.tower);
            return self.embed(&t).mul_ref(&other.embed(&t));
        }
        let n = self.num.len();
        if n == 1 {
            return Elem::reduced(self.tower.clone(), vec![&self.num[0] * &other.num[0]], &self.den * &other.den);
        }
        let table = self.tower.mul_table();
        let mut acc = vec![BigInt::zero(); n];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let p = a * b;
                for (k, c) in &table.entries[i * n + j] {
                    if c.is_one() {
                        acc[*k] += &p;
                    } else {
                        acc[*k] += &p * c;
                    }
                }
            }
        }
        Elem::reduced(self.tower.clone(), acc, &self.den * &other.den * &table.den)
    }

    pub fn scale(&self, q: &BigRational) -> Elem {
        let num = self.num.iter().map(|x| x * q.numer()).collect();
        Elem::reduced(self.tower.clone(), num, &self.den * q.denom())
    }

    pub fn square(&self) -> Elem {
        self.mul_ref(self)
    }

    pub fn pow(&self, mut e: u32) -> Elem {
        let mut base = self.clone();
        let mut acc = self.tower.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Elem> {
        if self.is_zero() {
            return None;
        }
        let n = self.tower.dim();
        // Column j of the multiplication matrix is self * e_j.
        let mut m = vec![vec![BigRational::zero(); n + 1]; n];
        for j in 0..n {
            let col = self.mul_ref(&self.tower.basis_elem(j)).coords();
            for (i, x) in col.into_iter().enumerate() {
                m[i][j] = x;
            }
        }
        m[0][n] = BigRational::one();
        let sol = solve_in_place(m)?;
        Some(Elem::from_rationals(self.tower.clone(), sol))
    }

    /// An exact square root inside this tower, if one exists and can be
    /// found. Rational-root levels are handled when the defining polynomial
    /// is totally real; `None` otherwise.
    pub fn sqrt_exact(&self) -> Option<Elem> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let depth = self.tower.depth();
        if depth == 0 {
            return rational_sqrt(&self.as_rational()?).map(|r| self.tower.rational(r));
        }
        let lower = self.tower.prefix(depth - 1);
        let s = lower.dim();
        let top = self.tower.0.levels[depth - 1].clone();
        let candidate = match &top.kind {
            LevelKind::RationalRoot { poly, .. } => {
                debug_assert_eq!(depth, 1);
                totally_real_sqrt(poly, &self.coords())
                    .into_iter()
                    .map(|c| Elem::from_rationals(self.tower.clone(), c))
                    .find(|y| &y.square() == self)
            }
            LevelKind::SquareRoot { radicand, .. } => {
                let c = self.coords();
                let a = lower.from_coords(c[..s].to_vec());
                let b = lower.from_coords(c[s..].to_vec());
                let z = self.tower.generator(depth - 1);
                if b.is_zero() {
                    if let Some(c) = a.sqrt_exact() {
                        Some(c.embed(&self.tower))
                    } else {
                        let q = &a * &radicand.inv()?;
                        q.sqrt_exact().map(|d| &d.embed(&self.tower) * &z)
                    }
                } else {
                    let norm = &a.square() - &(&b.square() * radicand);
                    let n = norm.sqrt_exact()?;
                    let half = BigRational::new(BigInt::one(), BigInt::from(2));
                    [&a + &n, &a - &n].iter().find_map(|cc| {
                        let c = cc.scale(&half).sqrt_exact()?;
                        let d = &b * &c.scale(&BigRational::from_integer(BigInt::from(2))).inv()?;
                        let y = &c.embed(&self.tower) + &(&d.embed(&self.tower) * &z);
                        (&y.square() == self).then_some(y)
                    })
                }
            }
        };
        candidate.filter(|y| &y.square() == self)
    }

    /// Enclosure of the real value at `bits` bits of absolute precision.
    pub fn enclose(&self, bits: u32) -> FixedInterval {
        if self.tower.depth() == 0 {
            let q = BigRational::new(self.num[0].clone(), self.den.clone());
            return FixedInterval::from_rationals(&q, &q, bits);
        }
        let work = bits + 16;
        let basis = self.tower.basis_enclosures(work);
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (n, b) in self.num.iter().zip(basis.iter()) {
            if n.is_zero() {
                continue;
            }
            if n.is_negative() {
                lo += n * &b.hi;
                hi += n * &b.lo;
            } else {
                lo += n * &b.lo;
                hi += n * &b.hi;
            }
        }
        let acc = FixedInterval { lo: floor_div(&lo, &self.den), hi: ceil_div(&hi, &self.den), bits: work };
        acc.rescale(bits)
    }

    /// Exact sign. Zero is decided on coordinates; nonzero signs by
    /// enclosures of doubling precision, which always terminates.
    pub fn sign(&self) -> NumSign {
        if self.is_zero() {
            return NumSign::Zero;
        }
        if self.num[1..].iter().all(Zero::is_zero) {
            return if self.num[0].is_positive() { NumSign::Positive } else { NumSign::Negative };
        }
        let mut bits = 64;
        loop {
            let iv = self.enclose(bits);
            match iv.sign() {
                Some(s) => return s,
                None if bits >= 1 << 20 => panic!("nonzero coordinates with zero value: the tower is degenerate"),
                None => bits *= 2,
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        if let Some(q) = self.as_rational() {
            return q.to_f64().unwrap_or(f64::NAN);
        }
        self.enclose(64).midpoint_f64()
    }

    /// Coordinates as rational strings, for export.
    pub fn coordinate_strings(&self) -> Vec<String> {
        self.coords().iter().map(|q| q.to_string()).collect()
    }
}

/// Gauss-Jordan elimination on an augmented `n × (n+1)` matrix.
fn solve_in_place(mut m: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            let pivot_row = m[col].clone();
            for (x, y) in m[r].iter_mut().zip(pivot_row.iter()) {
                *x -= &f * y;
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

impl<'a> Add<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn add(self, rhs: &'a Elem) -> Elem {
        self.add_signed(rhs, false)
    }
}

impl<'a> Sub<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn sub(self, rhs: &'a Elem) -> Elem {
        self.add_signed(rhs, true)
    }
}

impl<'a> Mul<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn mul(self, rhs: &'a Elem) -> Elem {
        self.mul_ref(rhs)
    }
}

impl Neg for &Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        self.neg_ref()
    }
}

impl Add for Elem {
    type Output = Elem;
    fn add(self, rhs: Elem) -> Elem {
        &self + &rhs
    }
}

impl Sub for Elem {
    type Output = Elem;
    fn sub(self, rhs: Elem) -> Elem {
        &self - &rhs
    }
}

impl Mul for Elem {
    type Output = Elem;
    fn mul(self, rhs: Elem) -> Elem {
        &self * &rhs
    }
}

impl Neg for Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        self.neg_ref()
    }
}

/// `floor(sqrt(n))` for `n >= 0`.
pub(crate) fn isqrt(n: &BigInt) -> BigInt {
    if n.sign() != BigSign::Plus {
        return BigInt::zero();
    }
    n.sqrt()
}

/// `ceil(sqrt(n))` for `n >= 0`.
pub(crate) fn isqrt_ceil(n: &BigInt) -> BigInt {
    let r = isqrt(n);
    if &(&r * &r) == n {
        r
    } else {
        r + 1
    }
}

pub(crate) fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

pub(crate) fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = isqrt(q.numer());
    let d = isqrt(q.denom());
    (&(&n * &n) == q.numer() && &(&d * &d) == q.denom()).then(|| BigRational::new(n, d))
}

/// All real roots of `poly` in double precision, or `None` when fewer
/// than its degree are found.
fn real_roots_f64(poly: &[BigRational]) -> Option<Vec<f64>> {
    let c: Vec<f64> = poly.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let deg = c.len() - 1;
    let lead = c[deg];
    let bound = 1.0 + c[..deg].iter().fold(0.0f64, |m, x| m.max((x / lead).abs()));
    let eval = |x: f64| c.iter().rev().fold(0.0, |acc, ci| acc * x + ci);
    let steps = 4096 * deg;
    let h = 2.0 * bound / steps as f64;
    let mut roots = Vec::new();
    let mut prev = (-bound, eval(-bound));
    for i in 1..=steps {
        let x = -bound + h * i as f64;
        let fx = eval(x);
        if prev.1 == 0.0 {
            roots.push(prev.0);
        } else if prev.1 * fx < 0.0 {
            let (mut a, mut b) = (prev.0, x);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if eval(a) * eval(m) <= 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev = (x, fx);
    }
    (roots.len() == deg).then_some(roots)
}

/// Candidate square roots in `Q[x]/(poly)` for totally real `poly`, read
/// off the real embeddings by rounding. Callers confirm exactly.
fn totally_real_sqrt(poly: &[BigRational], x: &[BigRational]) -> Vec<Vec<BigRational>> {
    let mut out = Vec::new();
    let Some(roots) = real_roots_f64(poly) else { return out };
    let n = roots.len();
    let xf: Vec<f64> = x.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect();
    let emb: Vec<f64> = roots
        .iter()
        .map(|r| xf.iter().enumerate().map(|(j, cj)| cj * r.powi(j as i32)).sum())
        .collect();
    if emb.iter().any(|v| *v < 0.0) {
        return out;
    }
    let den = x.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let Some(den_f) = den.to_f64() else { return out };
    let vander: Vec<Vec<f64>> = roots.iter().map(|r| (0..n).map(|j| r.powi(j as i32)).collect()).collect();
    for pattern in 0..(1u32 << (n - 1)) {
        let y: Vec<f64> = emb
            .iter()
            .enumerate()
            .map(|(i, v)| if i > 0 && (pattern >> (i - 1)) & 1 == 1 { -v.sqrt() } else { v.sqrt() })
            .collect();
        let Some(u) = solve_f64(vander.clone(), y) else { continue };
        let coords: Option<Vec<BigRational>> = u
            .iter()
            .map(|v| {
                let scaled = (v * den_f).round();
                (scaled.is_finite() && scaled.abs() < 9.0e15)
                    .then(|| BigRational::new(BigInt::from(scaled as i64), den.clone()))
            })
            .collect();
        if let Some(c) = coords {
            out.push(c);
        }
    }
    out
}

fn solve_f64(mut m: Vec<Vec<f64>>, mut y: Vec<f64>) -> Option<Vec<f64>> {
    let n = y.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        y.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for k in col..n {
                m[r][k] -= f * m[col][k];
            }
            y[r] -= f * y[col];
        }
    }
    let mut u = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * u[k]).sum();
        u[i] = (y[i] - s) / m[i][i];
    }
    Some(u)
}
