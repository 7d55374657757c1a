//! Composition algebra of differential operators in right-normal form.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::ring::{nth_total_derivative, poly_from_json, poly_to_json, DiffPoly, Rat, RingError};

/// A finite-order differential operator `Σ_j q_j dʲ` with [`DiffPoly`]
/// coefficients. The invariant is that stored coefficients are nonzero; the
/// zero operator has an empty coefficient map.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DiffOperator {
    coeffs: BTreeMap<u32, DiffPoly>,
}

/// Binomial coefficient as an exact rational.
pub(crate) fn binomial(n: u32, k: u32) -> Rat {
    Rat::from_integer(num_integer::binomial(BigInt::from(n), BigInt::from(k)))
}

impl DiffOperator {
    /// The zero operator.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The identity operator (multiplication by 1).
    pub fn identity() -> Self {
        Self::multiplication_by(DiffPoly::one())
    }

    /// The pure derivative `dʲ`.
    pub fn d(j: u32) -> Self {
        Self::single(j, DiffPoly::one())
    }

    /// Multiplication by a ring element (an order-0 operator).
    pub fn multiplication_by(p: DiffPoly) -> Self {
        Self::single(0, p)
    }

    /// A single term `q · dʲ`.
    pub fn single(j: u32, q: DiffPoly) -> Self {
        let mut coeffs = BTreeMap::new();
        if !q.is_zero() {
            coeffs.insert(j, q);
        }
        Self { coeffs }
    }

    /// Build from `(order, coefficient)` pairs, combining duplicates.
    pub fn from_coeffs(items: impl IntoIterator<Item = (u32, DiffPoly)>) -> Self {
        let mut out = Self::zero();
        for (j, q) in items {
            out.add_coeff(j, &q);
        }
        out
    }

    /// The Schrödinger operator `−d² + V` for the given potential
    /// (`DiffPoly::v(0)` for the symbolic one).
    pub fn schrodinger(potential: &DiffPoly) -> Self {
        Self::from_coeffs([
            (2, DiffPoly::from_int(-1)),
            (0, potential.clone()),
        ])
    }

    fn add_coeff(&mut self, j: u32, q: &DiffPoly) {
        if q.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(j).or_insert_with(DiffPoly::zero);
        *entry = &*entry + q;
        if entry.is_zero() {
            self.coeffs.remove(&j);
        }
    }

    /// Coefficient of `dʲ` (zero if absent).
    pub fn coeff(&self, j: u32) -> DiffPoly {
        self.coeffs.get(&j).cloned().unwrap_or_else(DiffPoly::zero)
    }

    /// Iterate `(order, coefficient)` pairs, ascending order.
    pub fn coeffs(&self) -> impl Iterator<Item = (u32, &DiffPoly)> {
        self.coeffs.iter().map(|(&j, q)| (j, q))
    }

    /// Operator order, if nonzero.
    pub fn order(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    /// True for the zero operator.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Scale by a rational constant.
    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Self::zero();
        for (&j, q) in &self.coeffs {
            out.add_coeff(j, &q.scale(c));
        }
        out
    }

    /// Multiply every coefficient by a ring element from the left
    /// (the composition `multiplication_by(p) ∘ self`).
    pub fn premultiply(&self, p: &DiffPoly) -> Self {
        let mut out = Self::zero();
        for (&j, q) in &self.coeffs {
            out.add_coeff(j, &(p * q));
        }
        out
    }

    /// Operator composition `self ∘ other`, renormalized by the generalized
    /// Leibniz rule `dʲ ∘ f = Σ_t C(j,t) f^{(j−t)} dᵗ`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&j, qj) in &self.coeffs {
            for (&i, pi) in &other.coeffs {
                for t in 0..=j {
                    let shifted = nth_total_derivative(pi, j - t);
                    if shifted.is_zero() {
                        continue;
                    }
                    out.add_coeff(t + i, &(qj * &shifted).scale(&binomial(j, t)));
                }
            }
        }
        out
    }

    /// `self` composed with itself `e` times (`e = 0` gives the identity).
    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::identity();
        for _ in 0..e {
            out = out.compose(self);
        }
        out
    }

    /// Apply to a ring element: `Σ_j q_j · Dʲ(f)`.
    pub fn apply(&self, f: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (&j, qj) in &self.coeffs {
            out = &out + &(qj * &nth_total_derivative(f, j));
        }
        out
    }

    /// Substitute a concrete potential: every jet variable `V^{(k)}` in every
    /// coefficient is replaced by `Dᵏ(potential)`. The potential must be
    /// jet-free (a function of `x` alone in the ring).
    pub fn specialize(&self, potential: &DiffPoly) -> Self {
        assert!(
            potential.max_order().is_none(),
            "potential must be a pure function of x"
        );
        let mut out = Self::zero();
        for (&j, qj) in &self.coeffs {
            let mut q = qj.clone();
            if let Some(top) = q.max_order() {
                for k in (0..=top).rev() {
                    q = q.substitute(k, &nth_total_derivative(potential, k));
                }
            }
            out.add_coeff(j, &q);
        }
        out
    }

    /// Render as LaTeX, highest order first.
    pub fn latex(&self) -> String {
        self.render(true)
    }

    fn render(&self, latex: bool) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (&j, q) in self.coeffs.iter().rev() {
            let d = match (j, latex) {
                (0, _) => String::new(),
                (1, false) => "d".to_string(),
                (1, true) => "\\frac{d}{dx}".to_string(),
                (_, false) => format!("d^{j}"),
                (_, true) => format!("\\frac{{d^{{{j}}}}}{{dx^{{{j}}}}}"),
            };
            let qs = if latex { q.latex() } else { q.to_string() };
            let part = if j == 0 {
                if q.num_terms() > 1 {
                    format!("({qs})")
                } else {
                    qs
                }
            } else if q == &DiffPoly::one() {
                d
            } else if q == &DiffPoly::from_int(-1) {
                format!("-{d}")
            } else if q.num_terms() > 1 || q.as_constant().is_none() {
                format!("({qs}) {d}")
            } else {
                format!("{qs} {d}")
            };
            parts.push(part);
        }
        let mut out = String::new();
        for (i, part) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(part);
            } else if let Some(rest) = part.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(part);
            }
        }
        out
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(false))
    }
}

impl std::ops::Add for &DiffOperator {
    type Output = DiffOperator;
    fn add(self, rhs: &DiffOperator) -> DiffOperator {
        let mut out = self.clone();
        for (&j, q) in &rhs.coeffs {
            out.add_coeff(j, q);
        }
        out
    }
}

impl std::ops::Sub for &DiffOperator {
    type Output = DiffOperator;
    fn sub(self, rhs: &DiffOperator) -> DiffOperator {
        let mut out = self.clone();
        for (&j, q) in &rhs.coeffs {
            out.add_coeff(j, &(-q));
        }
        out
    }
}

impl std::ops::Neg for &DiffOperator {
    type Output = DiffOperator;
    fn neg(self) -> DiffOperator {
        DiffOperator {
            coeffs: self.coeffs.iter().map(|(&j, q)| (j, -q)).collect(),
        }
    }
}

/// Commutator `[A, B] = A∘B − B∘A`.
pub fn commutator(a: &DiffOperator, b: &DiffOperator) -> DiffOperator {
    &a.compose(b) - &b.compose(a)
}

/// Serialize an operator: `{"coeffs": {"j": <polynomial>, ...}}`.
pub fn op_to_json(op: &DiffOperator) -> Value {
    let coeffs: Map<String, Value> = op
        .coeffs()
        .map(|(j, q)| (j.to_string(), poly_to_json(q)))
        .collect();
    json!({ "coeffs": Value::Object(coeffs) })
}

/// Deserialize an operator, validating orders and coefficients.
pub fn op_from_json(value: &Value) -> Result<DiffOperator, RingError> {
    let obj = value
        .get("coeffs")
        .and_then(Value::as_object)
        .ok_or_else(|| RingError::Malformed("missing \"coeffs\" object".into()))?;
    let mut out = DiffOperator::zero();
    for (k, v) in obj {
        let j: u32 = k
            .parse()
            .map_err(|_| RingError::Malformed(format!("bad derivative order key {k:?}")))?;
        out.add_coeff(j, &poly_from_json(v)?);
    }
    Ok(out)
}
