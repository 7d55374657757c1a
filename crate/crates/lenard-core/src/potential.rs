//! Concrete potentials behind one evaluation interface.
//!
//! Every consumer of a potential — residual evaluation, ODE right-hand
//! sides, commutator checks, quadrature — needs the same thing: the jet
//! `(V(x), V′(x), …, V^{(k)}(x))` at a point. The [`Potential`] trait
//! provides exactly that, with three implementations:
//!
//! - [`PowerSum`]: finite sums `Σ Aᵢ (x − sᵢ)^{pᵢ}` with rational data and
//!   exact falling-factorial derivatives (covers zero, constants, inverse
//!   squares, polynomial wells, and user-supplied rational expressions);
//! - [`Sech2`]: `A sech²x`, differentiated exactly through the closed
//!   `(s, t) = (sech²x, tanh x)` algebra `s′ = −2st`, `t′ = s`,
//!   `t² = 1 − s`;
//! - [`SampledGrid`]: tabulated values with fourth-order finite-difference
//!   derivative columns, for data that arrives as CSV samples.
//!
//! Closed-form implementations also expose exact rational jets where they
//! exist ([`Potential::exact_jet`]) and an exact ring representation when
//! the potential is a Laurent polynomial in `x`
//! ([`Potential::as_ring_element`]). Finite differences are a fallback for
//! sampled data, never the primary derivative path of a closed form — the
//! unit tests cross-check the closed forms *against* finite differences.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::ring::{rat_int, Rat};
use crate::DiffPoly;

/// Open interval on which a potential is evaluable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    /// Lower endpoint (may be −∞).
    pub lo: f64,
    /// Upper endpoint (may be +∞).
    pub hi: f64,
}

impl Domain {
    /// The whole line.
    pub fn all() -> Self {
        Domain {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    /// Strict interior membership.
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// A potential `V(x)` that can report its derivative jet at a point.
pub trait Potential: Sync + Send {
    /// Display name (catalog key or a rendered expression).
    fn name(&self) -> &str;

    /// Largest open interval of validity.
    fn domain(&self) -> Domain;

    /// `(V, V′, …, V^{(order)})` at `x`, or `None` outside the domain.
    fn jet(&self, x: f64, order: u32) -> Option<Vec<f64>>;

    /// Exact rational jet at a rational point, when the potential supports
    /// exact evaluation there.
    fn exact_jet(&self, x: &Rat, order: u32) -> Option<Vec<Rat>> {
        let _ = (x, order);
        None
    }

    /// The potential as a differential-ring element (a Laurent polynomial
    /// in `x`), when it is one.
    fn as_ring_element(&self) -> Option<DiffPoly> {
        None
    }
}

/// One term `A (x − s)^p` of a [`PowerSum`].
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTerm {
    /// Coefficient `A`.
    pub coeff: Rat,
    /// Shift `s`.
    pub shift: Rat,
    /// Integer power `p` (negative powers are poles at `s`).
    pub power: i32,
}

/// A finite sum of shifted integer powers of `x` with rational data.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSum {
    terms: Vec<PowerTerm>,
    name: String,
    domain: Domain,
}

impl PowerSum {
    /// Build from terms. The domain is the full line, shrunk from the left
    /// past the rightmost pole (every negative-power shift).
    pub fn new(terms: Vec<PowerTerm>) -> Self {
        let lo = terms
            .iter()
            .filter(|t| t.power < 0 && !t.coeff.is_zero())
            .map(|t| t.shift.to_f64().expect("rational shift fits f64"))
            .fold(f64::NEG_INFINITY, f64::max);
        let name = render_terms(&terms);
        PowerSum {
            terms,
            name,
            domain: Domain {
                lo,
                hi: f64::INFINITY,
            },
        }
    }

    /// Identically zero.
    pub fn zero() -> Self {
        PowerSum::new(vec![])
    }

    /// The constant potential `c`.
    pub fn constant(c: Rat) -> Self {
        PowerSum::new(vec![PowerTerm {
            coeff: c,
            shift: Rat::zero(),
            power: 0,
        }])
    }

    /// Override the domain (e.g. to select a two-sided pole's left branch).
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = Domain { lo, hi };
        self
    }

    /// The terms.
    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    /// Exact jet at a rational `x`; `None` exactly when some pole sits at
    /// `x`.
    pub fn jet_rat(&self, x: &Rat, order: u32) -> Option<Vec<Rat>> {
        let mut out = vec![Rat::zero(); order as usize + 1];
        for term in &self.terms {
            let base = x - &term.shift;
            if base.is_zero() && term.power < 0 {
                return None;
            }
            let mut factor = term.coeff.clone();
            let mut power = term.power;
            for slot in out.iter_mut() {
                if factor.is_zero() {
                    break;
                }
                // factor · base^power, with 0^0 = 1 and 0^positive = 0.
                if !base.is_zero() {
                    *slot += &factor * pow_rat(&base, power);
                } else if power == 0 {
                    *slot += factor.clone();
                }
                factor *= rat_int(power as i64);
                power -= 1;
            }
        }
        Some(out)
    }
}

fn pow_rat(base: &Rat, e: i32) -> Rat {
    base.pow(e)
}

fn render_rat(r: &Rat) -> String {
    r.to_string()
}

fn render_terms(terms: &[PowerTerm]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        if i > 0 {
            out.push_str(if t.coeff.is_negative() { " - " } else { " + " });
        } else if t.coeff.is_negative() {
            out.push('-');
        }
        let mag = t.coeff.abs();
        let base = if t.shift.is_zero() {
            "x".to_string()
        } else if t.shift.is_negative() {
            format!("(x+{})", render_rat(&t.shift.abs()))
        } else {
            format!("(x-{})", render_rat(&t.shift))
        };
        match (t.power, mag == rat_int(1)) {
            (0, _) => out.push_str(&render_rat(&mag)),
            (1, true) => out.push_str(&base),
            (1, false) => out.push_str(&format!("{}*{}", render_rat(&mag), base)),
            (p, true) => out.push_str(&format!("{base}^{p}")),
            (p, false) => out.push_str(&format!("{}*{}^{}", render_rat(&mag), base, p)),
        }
    }
    out
}

impl Potential for PowerSum {
    fn name(&self) -> &str {
        &self.name
    }

    fn domain(&self) -> Domain {
        self.domain
    }

    fn jet(&self, x: f64, order: u32) -> Option<Vec<f64>> {
        if !self.domain.contains(x) {
            return None;
        }
        let mut out = vec![0.0; order as usize + 1];
        for term in &self.terms {
            let base = x - term.shift.to_f64()?;
            let coeff = term.coeff.to_f64()?;
            if base == 0.0 && term.power < 0 {
                return None;
            }
            let mut factor = coeff;
            let mut power = term.power;
            for slot in out.iter_mut() {
                if factor == 0.0 {
                    break;
                }
                if base != 0.0 {
                    *slot += factor * base.powi(power);
                } else if power == 0 {
                    *slot += factor;
                }
                factor *= power as f64;
                power -= 1;
            }
        }
        Some(out)
    }

    fn exact_jet(&self, x: &Rat, order: u32) -> Option<Vec<Rat>> {
        self.jet_rat(x, order)
    }

    fn as_ring_element(&self) -> Option<DiffPoly> {
        let mut p = DiffPoly::zero();
        for term in &self.terms {
            if term.shift.is_zero() {
                p = &p + &DiffPoly::x_pow(term.power as i64).scale(&term.coeff);
            } else if term.power >= 0 {
                // Expand (x − s)^p by the binomial theorem.
                let base = &DiffPoly::x() - &DiffPoly::constant(term.shift.clone());
                p = &p + &base.pow(term.power as u32).scale(&term.coeff);
            } else {
                // A shifted pole is not a Laurent polynomial in x.
                return None;
            }
        }
        Some(p)
    }
}

/// Parse error for power-sum expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError(String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse potential expression: {}", self.0)
    }
}

impl std::error::Error for ParseError {}

impl FromStr for PowerSum {
    type Err = ParseError;

    /// Grammar: sum of terms `A`, `A*x^p`, `A*(x-s)^p`, `x^p`, `(x+s)^p`,
    /// with rational `A`, `s` (`3`, `-1/2`, `0.25` is *not* accepted — use
    /// fractions) and integer `p`. Whitespace is free.
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(ParseError("empty expression".into()));
        }
        let mut terms = Vec::new();
        let mut rest = compact.as_str();
        let mut sign = Rat::from_integer(1.into());
        if let Some(r) = rest.strip_prefix('-') {
            sign = -sign;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        while !rest.is_empty() {
            let split = rest
                .char_indices()
                .skip(1)
                .find(|&(i, c)| {
                    (c == '+' || c == '-') && !rest[..i].ends_with('^') && paren_depth(&rest[..i]) == 0
                })
                .map(|(i, _)| i);
            let (chunk, tail) = match split {
                Some(i) => (&rest[..i], &rest[i..]),
                None => (rest, ""),
            };
            let term = parse_term(chunk).map_err(ParseError)?;
            terms.push(PowerTerm {
                coeff: &sign * &term.coeff,
                ..term
            });
            rest = tail;
            if let Some(r) = rest.strip_prefix('-') {
                sign = -Rat::from_integer(1.into());
                rest = r;
            } else if let Some(r) = rest.strip_prefix('+') {
                sign = Rat::from_integer(1.into());
                rest = r;
            }
        }
        Ok(PowerSum::new(terms))
    }
}

fn paren_depth(s: &str) -> i32 {
    s.chars().fold(0, |d, c| match c {
        '(' => d + 1,
        ')' => d - 1,
        _ => d,
    })
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    Rat::from_str(s).map_err(|e| format!("bad rational {s:?}: {e}"))
}

fn parse_term(chunk: &str) -> Result<PowerTerm, String> {
    // Optional coefficient, then optional base (x or (x±s)), then optional
    // ^power.
    let (coeff, rest) = match chunk.find(['x', '(']) {
        None => (parse_rat(chunk)?, ""),
        Some(0) => (Rat::from_integer(1.into()), chunk),
        Some(i) => {
            let c = chunk[..i].strip_suffix('*').unwrap_or(&chunk[..i]);
            (parse_rat(c)?, &chunk[i..])
        }
    };
    if rest.is_empty() {
        return Ok(PowerTerm {
            coeff,
            shift: Rat::zero(),
            power: 0,
        });
    }
    let (shift, rest) = if let Some(r) = rest.strip_prefix('x') {
        (Rat::zero(), r)
    } else if let Some(r) = rest.strip_prefix("(x") {
        let close = r.find(')').ok_or("missing )")?;
        let inner = &r[..close];
        let shift = if inner.is_empty() {
            Rat::zero()
        } else if let Some(v) = inner.strip_prefix('-') {
            parse_rat(v)?
        } else if let Some(v) = inner.strip_prefix('+') {
            -parse_rat(v)?
        } else {
            return Err(format!("expected sign in {inner:?}"));
        };
        (shift, &r[close + 1..])
    } else {
        return Err(format!("unexpected base in {rest:?}"));
    };
    let power = if rest.is_empty() {
        1
    } else if let Some(p) = rest.strip_prefix('^') {
        p.parse::<i32>().map_err(|e| format!("bad power {p:?}: {e}"))?
    } else {
        return Err(format!("trailing {rest:?}"));
    };
    Ok(PowerTerm {
        coeff,
        shift,
        power,
    })
}

/// Polynomials in `(s, t) = (sech²x, tanh x)` with the reduction
/// `t² = 1 − s` applied, so `t` appears at most linearly.
type StPoly = BTreeMap<(u32, u32), Rat>;

fn st_insert(p: &mut StPoly, key: (u32, u32), val: Rat) {
    if val.is_zero() {
        return;
    }
    let entry = p.entry(key).or_insert_with(Rat::zero);
    *entry += val;
    if entry.is_zero() {
        p.remove(&key);
    }
}

/// Reduce t-degree ≥ 2 via t² = 1 − s.
fn st_reduce(p: StPoly) -> StPoly {
    let mut out = StPoly::new();
    let mut pending: Vec<((u32, u32), Rat)> = p.into_iter().collect();
    while let Some(((sd, td), c)) = pending.pop() {
        if td >= 2 {
            // t^td = t^{td−2} (1 − s)
            pending.push(((sd, td - 2), c.clone()));
            pending.push(((sd + 1, td - 2), -c));
        } else {
            st_insert(&mut out, (sd, td), c);
        }
    }
    out
}

/// d/dx on an (s, t) polynomial: s′ = −2st, t′ = s.
fn st_derivative(p: &StPoly) -> StPoly {
    let mut out = StPoly::new();
    for (&(sd, td), c) in p {
        if sd > 0 {
            // ∂/∂s → multiply by s′ = −2st
            st_insert(
                &mut out,
                (sd, td + 1),
                c * rat_int(-2) * rat_int(sd as i64),
            );
        }
        if td > 0 {
            // ∂/∂t → multiply by t′ = s
            st_insert(&mut out, (sd + 1, td - 1), c * rat_int(td as i64));
        }
    }
    st_reduce(out)
}

/// The soliton-type potential `A sech²x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sech2 {
    amplitude: Rat,
    name: String,
}

impl Sech2 {
    /// `V = amplitude · sech²x`.
    pub fn new(amplitude: Rat) -> Self {
        let name = format!("{}*sech^2(x)", render_rat(&amplitude));
        Sech2 { amplitude, name }
    }

    /// The amplitude `A`.
    pub fn amplitude(&self) -> &Rat {
        &self.amplitude
    }

    /// Derivative polynomials `P_k(s, t)` with `V^{(k)} = P_k(sech²x, tanh x)`.
    fn st_jet(&self, order: u32) -> Vec<StPoly> {
        let mut ps = Vec::with_capacity(order as usize + 1);
        let mut p = StPoly::new();
        st_insert(&mut p, (1, 0), self.amplitude.clone());
        ps.push(p);
        for _ in 0..order {
            let next = st_derivative(ps.last().expect("nonempty"));
            ps.push(next);
        }
        ps
    }
}

impl Potential for Sech2 {
    fn name(&self) -> &str {
        &self.name
    }

    fn domain(&self) -> Domain {
        Domain::all()
    }

    fn jet(&self, x: f64, order: u32) -> Option<Vec<f64>> {
        let s = 1.0 / x.cosh().powi(2);
        let t = x.tanh();
        let jets = self.st_jet(order);
        Some(
            jets.iter()
                .map(|p| {
                    p.iter()
                        .map(|(&(sd, td), c)| {
                            c.to_f64().expect("small rational") * s.powi(sd as i32) * t.powi(td as i32)
                        })
                        .sum()
                })
                .collect(),
        )
    }

    fn exact_jet(&self, x: &Rat, order: u32) -> Option<Vec<Rat>> {
        // Exact only at the symmetry point x = 0, where (s, t) = (1, 0).
        if !x.is_zero() {
            return None;
        }
        let jets = self.st_jet(order);
        Some(
            jets.iter()
                .map(|p| {
                    p.iter()
                        .filter(|(&(_, td), _)| td == 0)
                        .map(|(_, c)| c.clone())
                        .fold(Rat::zero(), |acc, c| acc + c)
                })
                .collect(),
        )
    }
}

/// Tabulated potential values on a uniform grid, with derivative columns
/// produced by repeated fourth-order finite differencing.
#[derive(Debug, Clone)]
pub struct SampledGrid {
    name: String,
    xs: Vec<f64>,
    cols: Vec<Vec<f64>>,
}

/// Fourth-order finite-difference derivative of uniformly spaced values
/// (5-point stencils: centered inside, one-sided at the two points nearest
/// each boundary).
pub fn fd_derivative(h: f64, values: &[f64]) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "need at least 5 samples for 5-point stencils");
    let v = values;
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = if i < 2 {
            (-25.0 * v[i] + 48.0 * v[i + 1] - 36.0 * v[i + 2] + 16.0 * v[i + 3]
                - 3.0 * v[i + 4])
                / (12.0 * h)
        } else if i >= n - 2 {
            (25.0 * v[i] - 48.0 * v[i - 1] + 36.0 * v[i - 2] - 16.0 * v[i - 3]
                + 3.0 * v[i - 4])
                / (12.0 * h)
        } else {
            (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h)
        };
    }
    out
}

impl SampledGrid {
    /// Build from abscissae (must be uniform and increasing) and data
    /// columns `V, V′, …` (at least `V`); missing derivative columns up to
    /// `max_order` are filled in by finite differencing the last column.
    pub fn new(
        name: impl Into<String>,
        xs: Vec<f64>,
        mut cols: Vec<Vec<f64>>,
        max_order: u32,
    ) -> Result<Self, String> {
        if xs.len() < 5 {
            return Err("need at least 5 samples".into());
        }
        if cols.is_empty() {
            return Err("need at least the value column".into());
        }
        for c in &cols {
            if c.len() != xs.len() {
                return Err("column length mismatch".into());
            }
        }
        let h = xs[1] - xs[0];
        if h <= 0.0 {
            return Err("abscissae must increase".into());
        }
        for w in xs.windows(2) {
            if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0) {
                return Err("abscissae must be uniformly spaced".into());
            }
        }
        while cols.len() <= max_order as usize {
            let next = fd_derivative(h, cols.last().expect("nonempty"));
            cols.push(next);
        }
        Ok(SampledGrid {
            name: name.into(),
            xs,
            cols,
        })
    }

    /// The abscissae.
    pub fn points(&self) -> &[f64] {
        &self.xs
    }

    /// The `k`-th derivative column, if present.
    pub fn column(&self, k: u32) -> Option<&[f64]> {
        self.cols.get(k as usize).map(|c| c.as_slice())
    }

    fn index_of(&self, x: f64) -> Option<usize> {
        let h = self.xs[1] - self.xs[0];
        let guess = ((x - self.xs[0]) / h).round();
        if guess < 0.0 || guess >= self.xs.len() as f64 {
            return None;
        }
        let i = guess as usize;
        ((self.xs[i] - x).abs() <= 1e-9 * h.abs().max(1.0)).then_some(i)
    }
}

impl Potential for SampledGrid {
    fn name(&self) -> &str {
        &self.name
    }

    fn domain(&self) -> Domain {
        Domain {
            lo: self.xs[0],
            hi: self.xs[self.xs.len() - 1],
        }
    }

    /// Jets are available exactly at the grid abscissae.
    fn jet(&self, x: f64, order: u32) -> Option<Vec<f64>> {
        let i = self.index_of(x)?;
        if order as usize >= self.cols.len() {
            return None;
        }
        Some(self.cols[..=order as usize].iter().map(|c| c[i]).collect())
    }
}
