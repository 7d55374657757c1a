//! Monomials and polynomials of the differential ring.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, ToPrimitive, Zero};

use super::Rat;

/// A monomial `x^m · Π_k (V^{(k)})^{e_k}`.
///
/// `jet` maps derivative order `k` to exponent `e_k ≥ 1`; absent orders have
/// exponent zero. `xdeg` may be negative (Laurent powers of `x`).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    xdeg: i64,
    jet: BTreeMap<u32, u32>,
}

impl Monomial {
    /// The empty monomial `1`.
    pub fn one() -> Self {
        Self::default()
    }

    /// `x^m`.
    pub fn x_pow(m: i64) -> Self {
        Self {
            xdeg: m,
            jet: BTreeMap::new(),
        }
    }

    /// `(V^{(k)})^e`.
    pub fn jet_var(k: u32, e: u32) -> Self {
        let mut jet = BTreeMap::new();
        if e > 0 {
            jet.insert(k, e);
        }
        Self { xdeg: 0, jet }
    }

    /// Build from explicit parts, dropping zero exponents.
    pub fn new(xdeg: i64, jet_entries: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let jet = jet_entries.into_iter().filter(|&(_, e)| e > 0).collect();
        Self { xdeg, jet }
    }

    /// Power of `x` carried by this monomial.
    pub fn xdeg(&self) -> i64 {
        self.xdeg
    }

    /// Exponent map over jet variables (order → exponent, all entries ≥ 1).
    pub fn jet(&self) -> &BTreeMap<u32, u32> {
        &self.jet
    }

    /// Exponent of `V^{(k)}` in this monomial.
    pub fn jet_exponent(&self, k: u32) -> u32 {
        self.jet.get(&k).copied().unwrap_or(0)
    }

    /// Sum of jet exponents (degree in the dependent variable and its derivatives).
    pub fn total_jet_degree(&self) -> u32 {
        self.jet.values().sum()
    }

    /// Highest derivative order appearing, if any jet variable is present.
    pub fn highest_order(&self) -> Option<u32> {
        self.jet.keys().next_back().copied()
    }

    /// True when no jet variable appears (pure `x` power or constant).
    pub fn is_jet_free(&self) -> bool {
        self.jet.is_empty()
    }

    /// Scaling weight `Σ_k e_k (k + 2)`, defined for `x`-free monomials only.
    pub fn weight(&self) -> Option<u64> {
        if self.xdeg != 0 {
            return None;
        }
        Some(
            self.jet
                .iter()
                .map(|(&k, &e)| u64::from(e) * (u64::from(k) + 2))
                .sum(),
        )
    }

    /// Product of two monomials.
    pub fn product(&self, other: &Self) -> Self {
        let mut jet = self.jet.clone();
        for (&k, &e) in &other.jet {
            *jet.entry(k).or_insert(0) += e;
        }
        Self {
            xdeg: self.xdeg + other.xdeg,
            jet,
        }
    }
}

/// Canonical term order.
///
/// Ascending iteration over this order is the emission order used by both
/// display and serialization: lower total jet degree first; within a degree,
/// higher derivative order first; then higher `x` power; final deterministic
/// tie-break on the exponent maps.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_jet_degree()
            .cmp(&other.total_jet_degree())
            .then_with(|| other.highest_order().cmp(&self.highest_order()))
            .then_with(|| other.xdeg.cmp(&self.xdeg))
            .then_with(|| {
                let a: Vec<(u32, u32)> = self.jet.iter().map(|(&k, &e)| (k, e)).collect();
                let b: Vec<(u32, u32)> = other.jet.iter().map(|(&k, &e)| (k, e)).collect();
                a.cmp(&b)
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of the differential-polynomial ring: a finite rational-linear
/// combination of [`Monomial`]s. The invariant is that no stored coefficient
/// is zero.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Rat>,
}

impl DiffPoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The constant polynomial `1`.
    pub fn one() -> Self {
        Self::constant(Rat::from_integer(1.into()))
    }

    /// A constant polynomial.
    pub fn constant(c: Rat) -> Self {
        Self::term(Monomial::one(), c)
    }

    /// A constant polynomial from an integer.
    pub fn from_int(n: i64) -> Self {
        Self::constant(super::rat_int(n))
    }

    /// The independent variable `x`.
    pub fn x() -> Self {
        Self::x_pow(1)
    }

    /// `x^m` (Laurent powers allowed).
    pub fn x_pow(m: i64) -> Self {
        Self::term(Monomial::x_pow(m), super::rat_int(1))
    }

    /// The jet variable `V^{(k)}` (`v(0)` is `V` itself).
    pub fn v(k: u32) -> Self {
        Self::term(Monomial::jet_var(k, 1), super::rat_int(1))
    }

    /// A single term `c · m`.
    pub fn term(m: Monomial, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    /// Build from a list of terms, combining duplicates and dropping zeros.
    pub fn from_terms(items: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut out = Self::zero();
        for (m, c) in items {
            out.add_term(m, c);
        }
        out
    }

    /// Add a single term in place.
    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the polynomial is a constant (including zero).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (*m == Monomial::one()).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Number of stored terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterate terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    /// Coefficient of a given monomial (zero if absent).
    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Highest derivative order appearing in any term, if any term has a jet part.
    pub fn max_order(&self) -> Option<u32> {
        self.terms.keys().filter_map(Monomial::highest_order).max()
    }

    /// Largest exponent with which `V^{(k)}` appears.
    pub fn max_exponent_of(&self, k: u32) -> u32 {
        self.terms
            .keys()
            .map(|m| m.jet_exponent(k))
            .max()
            .unwrap_or(0)
    }

    /// Set of monomials with nonzero coefficient.
    pub fn support(&self) -> BTreeSet<Monomial> {
        self.terms.keys().cloned().collect()
    }

    /// The part of the polynomial free of jet variables.
    pub fn jet_free_part(&self) -> DiffPoly {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.is_jet_free())
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The part of the polynomial with at least one jet variable.
    pub fn jet_part(&self) -> DiffPoly {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.is_jet_free())
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Multiply by a rational scalar.
    pub fn scale(&self, c: &Rat) -> DiffPoly {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    /// Integer power (by repeated multiplication; exponents stay small here).
    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut out = Self::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Partial derivative with respect to the jet variable `V^{(k)}`.
    pub fn partial_jet(&self, k: u32) -> DiffPoly {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.jet_exponent(k);
            if e == 0 {
                continue;
            }
            let mut jet = m.jet().clone();
            if e == 1 {
                jet.remove(&k);
            } else {
                jet.insert(k, e - 1);
            }
            out.add_term(
                Monomial::new(m.xdeg(), jet),
                c * Rat::from_integer(e.into()),
            );
        }
        out
    }

    /// Partial derivative with respect to the explicit `x` dependence.
    pub fn partial_x(&self) -> DiffPoly {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let deg = m.xdeg();
            if deg == 0 {
                continue;
            }
            out.add_term(
                Monomial::new(deg - 1, m.jet().clone()),
                c * Rat::from_integer(deg.into()),
            );
        }
        out
    }

    /// Replace every occurrence of `V^{(k)}` (including powers) by `replacement`.
    pub fn substitute(&self, k: u32, replacement: &DiffPoly) -> DiffPoly {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.jet_exponent(k);
            if e == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            let mut jet = m.jet().clone();
            jet.remove(&k);
            let rest = Self::term(Monomial::new(m.xdeg(), jet), c.clone());
            out = &out + &(&rest * &replacement.pow(e));
        }
        out
    }

    /// Scaling weight if every term is `x`-free and has the same weight.
    pub fn homogeneous_weight(&self) -> Option<u64> {
        let mut weights = self.terms.keys().map(Monomial::weight);
        let first = weights.next()??;
        for w in weights {
            if w? != first {
                return None;
            }
        }
        Some(first)
    }

    /// Evaluate at a point: `x` and the jet values `jet[k] = V^{(k)}(x)`.
    ///
    /// `jet` must cover every derivative order present. Terms are accumulated
    /// in canonical order; callers needing compensated summation over many
    /// points should use the facilities in the numeric module.
    pub fn eval_f64(&self, x: f64, jet: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (m, c) in &self.terms {
            let mut t = rat_to_f64(c);
            let deg = m.xdeg();
            if deg != 0 {
                t *= x.powi(deg as i32);
            }
            for (&k, &e) in m.jet() {
                let v = jet
                    .get(k as usize)
                    .copied()
                    .expect("jet values must cover every derivative order present");
                t *= v.powi(e as i32);
            }
            sum += t;
        }
        sum
    }

    /// Exact evaluation at a rational point. Returns `None` when a negative
    /// power of `x` is evaluated at `x = 0`.
    pub fn eval_rat(&self, x: &Rat, jet: &[Rat]) -> Option<Rat> {
        let mut sum = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            let deg = m.xdeg();
            if deg != 0 {
                if x.is_zero() && deg < 0 {
                    return None;
                }
                t *= rat_pow(x, deg);
            }
            for (&k, &e) in m.jet() {
                let v = jet
                    .get(k as usize)
                    .expect("jet values must cover every derivative order present");
                t *= rat_pow(v, i64::from(e));
            }
            sum += t;
        }
        Some(sum)
    }

    /// Render as LaTeX.
    pub fn latex(&self) -> String {
        self.render(&RenderStyle::Latex)
    }

    fn render(&self, style: &RenderStyle) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let vars = render_monomial(m, style);
            let coeff_is_one = abs == Rat::from_integer(1.into());
            if vars.is_empty() {
                out.push_str(&render_rat(&abs, style));
            } else if coeff_is_one {
                out.push_str(&vars);
            } else {
                out.push_str(&render_rat(&abs, style));
                out.push(' ');
                out.push_str(&vars);
            }
        }
        out
    }
}

enum RenderStyle {
    Plain,
    Latex,
}

fn render_rat(c: &Rat, style: &RenderStyle) -> String {
    match style {
        RenderStyle::Plain => c.to_string(),
        RenderStyle::Latex => {
            if c.denom() == &num_bigint::BigInt::from(1) {
                c.numer().to_string()
            } else {
                format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
            }
        }
    }
}

fn render_monomial(m: &Monomial, style: &RenderStyle) -> String {
    let mut parts: Vec<String> = Vec::new();
    let deg = m.xdeg();
    if deg != 0 {
        parts.push(match (deg, style) {
            (1, _) => "x".to_string(),
            (_, RenderStyle::Plain) => format!("x^{deg}"),
            (_, RenderStyle::Latex) => format!("x^{{{deg}}}"),
        });
    }
    for (&k, &e) in m.jet() {
        let base = match (k, style) {
            (0..=3, _) => format!("V{}", "'".repeat(k as usize)),
            (_, RenderStyle::Plain) => format!("V^({k})"),
            (_, RenderStyle::Latex) => format!("V^{{({k})}}"),
        };
        let with_exp = if e == 1 {
            base
        } else {
            match style {
                RenderStyle::Plain => format!("{base}^{e}"),
                RenderStyle::Latex => format!("{{{base}}}^{{{e}}}"),
            }
        };
        parts.push(with_exp);
    }
    parts.join(" ")
}

fn rat_to_f64(c: &Rat) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        // Fall back to separate conversion for ratios outside f64 range.
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn rat_pow(base: &Rat, exp: i64) -> Rat {
    use num_traits::One;
    let mut out = Rat::one();
    for _ in 0..exp.unsigned_abs() {
        out *= base;
    }
    if exp < 0 {
        out.recip()
    } else {
        out
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&RenderStyle::Plain))
    }
}

impl Add for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.product(mb), ca * cb);
            }
        }
        out
    }
}
