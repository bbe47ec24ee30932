//! Exact-truncation multivariate Taylor (jet) arithmetic.
//!
//! A [`Jet`] stores all coefficients of a truncated Taylor expansion of a
//! scalar field at a point, in a fixed graded monomial order. The coefficient
//! of the multi-index `a` is `(d^a f)(p) / a!`, so `derivative_value` recovers
//! actual partial derivatives. Arithmetic is exact up to truncation: products
//! drop every term above the jet degree, and division/elementary functions are
//! computed through truncated series composition.
//!
//! Jets are immutable values; all operations are pure.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use thiserror::Error;

/// Constant terms with modulus at or below this are treated as zero divisors.
pub const DIV_TOL: f64 = 1e-300;

/// Errors raised by jet construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },
    #[error("jet shape mismatch: {0} vars degree {1} vs {2} vars degree {3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("division by jet with near-zero constant term (|b0| = {modulus:.3e})")]
    DivisionByZero { modulus: f64 },
    #[error("{func}: constant term {value} outside the function domain")]
    Domain { func: &'static str, value: f64 },
    #[error("{func} is not supported for complex jets (branch ambiguous)")]
    UnsupportedForComplex { func: &'static str },
    #[error("cannot differentiate a degree-0 jet")]
    DegreeExhausted,
    #[error("multi-index {0:?} out of range for degree {1}")]
    MultiIndexOutOfRange(Vec<u8>, usize),
    #[error("non-finite jet coefficient")]
    NonFinite,
}

/// Elementary functions applicable to jets via truncated composition.
///
/// The four inverse functions are real-only; for complex jets the principal
/// branch is used for `Sqrt` and `Log`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JetFn {
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Arcsin,
    Arccos,
    Arcsinh,
    Arccosh,
}

impl JetFn {
    pub const ALL: [JetFn; 11] = [
        JetFn::Sqrt,
        JetFn::Exp,
        JetFn::Log,
        JetFn::Sin,
        JetFn::Cos,
        JetFn::Sinh,
        JetFn::Cosh,
        JetFn::Arcsin,
        JetFn::Arccos,
        JetFn::Arcsinh,
        JetFn::Arccosh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            JetFn::Sqrt => "sqrt",
            JetFn::Exp => "exp",
            JetFn::Log => "log",
            JetFn::Sin => "sin",
            JetFn::Cos => "cos",
            JetFn::Sinh => "sinh",
            JetFn::Cosh => "cosh",
            JetFn::Arcsin => "arcsin",
            JetFn::Arccos => "arccos",
            JetFn::Arcsinh => "arcsinh",
            JetFn::Arccosh => "arccosh",
        }
    }

    pub fn from_name(name: &str) -> Option<JetFn> {
        JetFn::ALL.iter().copied().find(|f| f.name() == name)
    }

    fn real_only(self) -> bool {
        matches!(
            self,
            JetFn::Arcsin | JetFn::Arccos | JetFn::Arcsinh | JetFn::Arccosh
        )
    }
}

/// Scalar coefficient type of a jet: double-precision real or complex.
pub trait Scalar:
    Copy
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + Neg<Output = Self>
    + std::ops::AddAssign
    + Send
    + Sync
    + 'static
{
    const IS_REAL: bool;
    fn from_f64(x: f64) -> Self;
    fn zero() -> Self;
    fn one() -> Self;
    /// Modulus (absolute value).
    fn modulus(self) -> f64;
    fn is_finite_scalar(self) -> bool;
    /// Real part; for real scalars, the value itself.
    fn real_part(self) -> f64;
    fn conj_scalar(self) -> Self;
    /// Principal square root.
    fn sqrt_principal(self) -> Self;
    /// Value-level function application with closed-domain checks
    /// (e.g. `arccos(1)` is admissible here, though not for jets).
    fn call(f: JetFn, x: Self) -> Result<Self, JetError>;
    /// Value-level integer power.
    fn powi_scalar(self, n: i32) -> Result<Self, JetError>;
}

impl Scalar for f64 {
    const IS_REAL: bool = true;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite_scalar(self) -> bool {
        self.is_finite()
    }
    fn real_part(self) -> f64 {
        self
    }
    fn conj_scalar(self) -> Self {
        self
    }
    fn sqrt_principal(self) -> Self {
        self.sqrt()
    }

    fn call(f: JetFn, x: Self) -> Result<Self, JetError> {
        let domain = |ok: bool, v: f64| {
            if ok {
                Ok(v)
            } else {
                Err(JetError::Domain {
                    func: f.name(),
                    value: x,
                })
            }
        };
        match f {
            JetFn::Sqrt => domain(x >= 0.0, x.sqrt()),
            JetFn::Exp => Ok(x.exp()),
            JetFn::Log => domain(x > 0.0, x.ln()),
            JetFn::Sin => Ok(x.sin()),
            JetFn::Cos => Ok(x.cos()),
            JetFn::Sinh => Ok(x.sinh()),
            JetFn::Cosh => Ok(x.cosh()),
            JetFn::Arcsin => domain(x.abs() <= 1.0, x.asin()),
            JetFn::Arccos => domain(x.abs() <= 1.0, x.acos()),
            JetFn::Arcsinh => Ok(x.asinh()),
            JetFn::Arccosh => domain(x >= 1.0, x.acosh()),
        }
    }

    fn powi_scalar(self, n: i32) -> Result<Self, JetError> {
        if n < 0 && self.abs() <= DIV_TOL {
            return Err(JetError::DivisionByZero {
                modulus: self.abs(),
            });
        }
        Ok(self.powi(n))
    }
}

impl Scalar for Complex64 {
    const IS_REAL: bool = false;

    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite_scalar(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn real_part(self) -> f64 {
        self.re
    }
    fn conj_scalar(self) -> Self {
        self.conj()
    }
    fn sqrt_principal(self) -> Self {
        self.sqrt()
    }

    fn call(f: JetFn, x: Self) -> Result<Self, JetError> {
        if f.real_only() {
            return Err(JetError::UnsupportedForComplex { func: f.name() });
        }
        match f {
            JetFn::Sqrt => Ok(x.sqrt()),
            JetFn::Exp => Ok(x.exp()),
            JetFn::Log => {
                if x.norm() <= DIV_TOL {
                    Err(JetError::Domain {
                        func: "log",
                        value: 0.0,
                    })
                } else {
                    Ok(x.ln())
                }
            }
            JetFn::Sin => Ok(x.sin()),
            JetFn::Cos => Ok(x.cos()),
            JetFn::Sinh => Ok(x.sinh()),
            JetFn::Cosh => Ok(x.cosh()),
            _ => unreachable!(),
        }
    }

    fn powi_scalar(self, n: i32) -> Result<Self, JetError> {
        if n < 0 && self.norm() <= DIV_TOL {
            return Err(JetError::DivisionByZero {
                modulus: self.norm(),
            });
        }
        Ok(self.powi(n))
    }
}

/// Exponent vector of one monomial.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(pub Vec<u8>);

impl MultiIndex {
    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// alpha! as a float; exact for all degrees handled here.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&e| (1..=e as u64).product::<u64>() as f64)
            .product()
    }
}

/// Monomial bookkeeping for one (num_vars, degree) pair, shared by all jets
/// of that shape: graded index list, rank lookup, and the truncated
/// multiplication table.
#[derive(Debug)]
pub struct JetShape {
    num_vars: usize,
    degree: usize,
    indices: Vec<MultiIndex>,
    rank: HashMap<MultiIndex, usize>,
    /// All (i, j, k) with indices[i] + indices[j] = indices[k], including
    /// every pair whose degrees sum within the truncation bound.
    products: Vec<(u32, u32, u32)>,
}

impl JetShape {
    fn build(num_vars: usize, degree: usize) -> JetShape {
        let mut indices = Vec::new();
        let mut current = vec![0u8; num_vars];
        for total in 0..=degree {
            enumerate_degree(num_vars, total, 0, total, &mut current, &mut indices);
        }
        let rank: HashMap<MultiIndex, usize> = indices
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        let mut products = Vec::new();
        for (i, a) in indices.iter().enumerate() {
            let da = a.total_degree();
            for (j, b) in indices.iter().enumerate() {
                if da + b.total_degree() > degree {
                    continue;
                }
                let sum =
                    MultiIndex(a.0.iter().zip(&b.0).map(|(&x, &y)| x + y).collect::<Vec<_>>());
                let k = rank[&sum];
                products.push((i as u32, j as u32, k as u32));
            }
        }
        JetShape {
            num_vars,
            degree,
            indices,
            rank,
            products,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn len(&self) -> usize {
        self.indices.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }
    pub fn rank_of(&self, m: &MultiIndex) -> Option<usize> {
        self.rank.get(m).copied()
    }
}

fn enumerate_degree(
    num_vars: usize,
    total: usize,
    var: usize,
    remaining: usize,
    current: &mut Vec<u8>,
    out: &mut Vec<MultiIndex>,
) {
    if var == num_vars - 1 {
        current[var] = remaining as u8;
        out.push(MultiIndex(current.clone()));
        return;
    }
    // lexicographic within each total degree, largest first exponent first
    for e in (0..=remaining).rev() {
        current[var] = e as u8;
        enumerate_degree(num_vars, total, var + 1, remaining - e, current, out);
    }
    let _ = total;
}

type ShapeCache = HashMap<(usize, usize), Arc<JetShape>>;

static SHAPES: Lazy<Mutex<ShapeCache>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Interned shape for (num_vars, degree).
pub fn shape(num_vars: usize, degree: usize) -> Arc<JetShape> {
    let mut cache = SHAPES.lock().expect("shape cache poisoned");
    cache
        .entry((num_vars, degree))
        .or_insert_with(|| Arc::new(JetShape::build(num_vars, degree)))
        .clone()
}

/// Truncated multivariate Taylor expansion with dense graded coefficients.
#[derive(Clone)]
pub struct Jet<T: Scalar> {
    shape: Arc<JetShape>,
    coeffs: Vec<T>,
}

impl<T: Scalar> PartialEq for Jet<T> {
    fn eq(&self, other: &Self) -> bool {
        self.shape.num_vars == other.shape.num_vars
            && self.shape.degree == other.shape.degree
            && self.coeffs == other.coeffs
    }
}

impl<T: Scalar> fmt::Debug for Jet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Jet({} vars, deg {}, coeffs {:?})",
            self.shape.num_vars, self.shape.degree, self.coeffs
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl<T: Scalar> Jet<T> {
    /// Jet of a constant field.
    pub fn constant(value: T, num_vars: usize, degree: usize) -> Jet<T> {
        let shape = shape(num_vars, degree);
        let mut coeffs = vec![T::zero(); shape.len()];
        coeffs[0] = value;
        Jet { shape, coeffs }
    }

    /// Jet of the coordinate field `x_index` seeded at `value`: constant term
    /// `value`, unit linear coefficient, everything else zero.
    pub fn variable(
        index: usize,
        value: T,
        num_vars: usize,
        degree: usize,
    ) -> Result<Jet<T>, JetError> {
        if index >= num_vars {
            return Err(JetError::IndexOutOfRange { index, num_vars });
        }
        let mut jet = Jet::constant(value, num_vars, degree);
        if degree >= 1 {
            let mut e = vec![0u8; num_vars];
            e[index] = 1;
            let k = jet
                .shape
                .rank_of(&MultiIndex(e))
                .expect("unit multi-index in shape");
            jet.coeffs[k] = T::one();
        }
        Ok(jet)
    }

    pub fn num_vars(&self) -> usize {
        self.shape.num_vars
    }
    pub fn degree(&self) -> usize {
        self.shape.degree
    }
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }
    pub fn jet_shape(&self) -> &Arc<JetShape> {
        &self.shape
    }
    pub fn constant_term(&self) -> T {
        self.coeffs[0]
    }

    fn same_shape(&self, other: &Jet<T>) -> bool {
        self.shape.num_vars == other.shape.num_vars && self.shape.degree == other.shape.degree
    }

    fn shape_error(&self, other: &Jet<T>) -> JetError {
        JetError::ShapeMismatch(
            self.shape.num_vars,
            self.shape.degree,
            other.shape.num_vars,
            other.shape.degree,
        )
    }

    /// The spec-level binary arithmetic entry point; surfaces shape mismatches
    /// and division-domain violations as errors.
    pub fn arith(op: ArithOp, a: &Jet<T>, b: &Jet<T>) -> Result<Jet<T>, JetError> {
        if !a.same_shape(b) {
            return Err(a.shape_error(b));
        }
        let out = match op {
            ArithOp::Add => a + b,
            ArithOp::Sub => a - b,
            ArithOp::Mul => a * b,
            ArithOp::Div => a.div(b)?,
        };
        out.check_finite()?;
        Ok(out)
    }

    pub fn scaled(&self, s: T) -> Jet<T> {
        Jet {
            shape: self.shape.clone(),
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// Truncated quotient: requires `|b0| > DIV_TOL`. Computed from the
    /// geometric series of 1/b so that `mul(div(a, b), b) = a` up to
    /// truncation.
    pub fn div(&self, b: &Jet<T>) -> Result<Jet<T>, JetError> {
        if !self.same_shape(b) {
            return Err(self.shape_error(b));
        }
        let b0 = b.constant_term();
        if b0.modulus() <= DIV_TOL {
            return Err(JetError::DivisionByZero {
                modulus: b0.modulus(),
            });
        }
        // u := b/b0 - 1 has no constant term; 1/b = (1/b0) * sum (-u)^k.
        let mut u = b.scaled(T::one() / b0);
        u.coeffs[0] = T::zero();
        let one = Jet::constant(T::one(), self.num_vars(), self.degree());
        let mut inv = one.clone();
        for _ in 0..self.degree() {
            inv = &one - &(&u * &inv);
        }
        let out = &self.scaled(T::one() / b0) * &inv;
        out.check_finite()?;
        Ok(out)
    }

    /// Integer power by binary exponentiation; negative exponents require a
    /// nonzero constant term.
    pub fn powi(&self, n: i32) -> Result<Jet<T>, JetError> {
        if n < 0 {
            let one = Jet::constant(T::one(), self.num_vars(), self.degree());
            let inv = one.div(self)?;
            return inv.powi(-n);
        }
        let mut acc = Jet::constant(T::one(), self.num_vars(), self.degree());
        let mut base = self.clone();
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Composition with an elementary function: the univariate expansion of
    /// `f` at the constant term, Horner-composed with `self - a0`.
    pub fn apply(&self, f: JetFn) -> Result<Jet<T>, JetError> {
        let c = self.constant_term();
        let series = univariate_series(f, c, self.degree())?;
        let mut dx = self.clone();
        dx.coeffs[0] = T::zero();
        let d = self.degree();
        let mut acc = Jet::constant(series[d], self.num_vars(), d);
        for k in (0..d).rev() {
            acc = &(&acc * &dx) + &Jet::constant(series[k], self.num_vars(), d);
        }
        acc.check_finite()?;
        Ok(acc)
    }

    /// Partial derivative: one degree lower; coefficient of `a` in the result
    /// is `(a_i + 1) * coeff(a + e_i)`.
    pub fn partial(&self, index: usize) -> Result<Jet<T>, JetError> {
        if index >= self.num_vars() {
            return Err(JetError::IndexOutOfRange {
                index,
                num_vars: self.num_vars(),
            });
        }
        if self.degree() == 0 {
            return Err(JetError::DegreeExhausted);
        }
        let out_shape = shape(self.num_vars(), self.degree() - 1);
        let mut coeffs = vec![T::zero(); out_shape.len()];
        for (k, m) in out_shape.indices().iter().enumerate() {
            let mut up = m.0.clone();
            up[index] += 1;
            let src = self
                .shape
                .rank_of(&MultiIndex(up))
                .expect("shifted index in source shape");
            coeffs[k] = self.coeffs[src] * T::from_f64((m.0[index] + 1) as f64);
        }
        Ok(Jet {
            shape: out_shape,
            coeffs,
        })
    }

    /// Stored Taylor coefficient of the multi-index.
    pub fn coefficient(&self, alpha: &MultiIndex) -> Result<T, JetError> {
        if alpha.0.len() != self.num_vars() || alpha.total_degree() > self.degree() {
            return Err(JetError::MultiIndexOutOfRange(
                alpha.0.clone(),
                self.degree(),
            ));
        }
        let k = self
            .shape
            .rank_of(alpha)
            .ok_or_else(|| JetError::MultiIndexOutOfRange(alpha.0.clone(), self.degree()))?;
        Ok(self.coeffs[k])
    }

    /// Actual partial derivative value: `alpha! * coefficient(alpha)`.
    pub fn derivative_value(&self, alpha: &MultiIndex) -> Result<T, JetError> {
        Ok(self.coefficient(alpha)? * T::from_f64(alpha.factorial()))
    }

    /// Copy truncated to a lower degree. Graded storage makes the lower-degree
    /// coefficients a prefix.
    pub fn truncated(&self, new_degree: usize) -> Jet<T> {
        if new_degree >= self.degree() {
            return self.clone();
        }
        let out_shape = shape(self.num_vars(), new_degree);
        Jet {
            coeffs: self.coeffs[..out_shape.len()].to_vec(),
            shape: out_shape,
        }
    }

    pub fn check_finite(&self) -> Result<(), JetError> {
        if self.coeffs.iter().all(|c| c.is_finite_scalar()) {
            Ok(())
        } else {
            Err(JetError::NonFinite)
        }
    }
}

impl Jet<f64> {
    /// Lift a real jet into the complex coefficient field.
    pub fn to_complex(&self) -> Jet<Complex64> {
        Jet {
            shape: self.shape.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| Complex64::new(c, 0.0))
                .collect(),
        }
    }
}

impl<'a, T: Scalar> Add for &'a Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: &'a Jet<T>) -> Jet<T> {
        assert!(self.same_shape(rhs), "jet shape mismatch in add");
        Jet {
            shape: self.shape.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<'a, T: Scalar> Sub for &'a Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: &'a Jet<T>) -> Jet<T> {
        assert!(self.same_shape(rhs), "jet shape mismatch in sub");
        Jet {
            shape: self.shape.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl<T: Scalar> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        Jet {
            shape: self.shape.clone(),
            coeffs: self.coeffs.iter().map(|&a| -a).collect(),
        }
    }
}

impl<'a, T: Scalar> Mul for &'a Jet<T> {
    type Output = Jet<T>;
    /// Truncated Cauchy product over the precomputed index table.
    fn mul(self, rhs: &'a Jet<T>) -> Jet<T> {
        assert!(self.same_shape(rhs), "jet shape mismatch in mul");
        let mut coeffs = vec![T::zero(); self.shape.len()];
        for &(i, j, k) in &self.shape.products {
            coeffs[k as usize] += self.coeffs[i as usize] * rhs.coeffs[j as usize];
        }
        Jet {
            shape: self.shape.clone(),
            coeffs,
        }
    }
}

// ---- univariate series builders ------------------------------------------

/// Taylor coefficients of s -> f(c + s) up to `degree`.
fn univariate_series<T: Scalar>(f: JetFn, c: T, degree: usize) -> Result<Vec<T>, JetError> {
    if !T::IS_REAL && f.real_only() {
        return Err(JetError::UnsupportedForComplex { func: f.name() });
    }
    let d = degree;
    let cm = c.modulus();
    let cr = c.real_part();
    let strict = |ok: bool| -> Result<(), JetError> {
        if ok {
            Ok(())
        } else {
            Err(JetError::Domain {
                func: f.name(),
                value: cr,
            })
        }
    };
    match f {
        JetFn::Exp => {
            let e = T::call(JetFn::Exp, c)?;
            let mut out = vec![e; d + 1];
            let mut fact = 1.0;
            for (k, o) in out.iter_mut().enumerate().skip(1) {
                fact *= k as f64;
                *o = e * T::from_f64(1.0 / fact);
            }
            Ok(out)
        }
        JetFn::Sin | JetFn::Cos | JetFn::Sinh | JetFn::Cosh => {
            let (a, b, cycle_sign) = match f {
                // pairs (f(c), f'(c)) and the sign pattern of the derivative cycle
                JetFn::Sin => (T::call(JetFn::Sin, c)?, T::call(JetFn::Cos, c)?, -1.0),
                JetFn::Cos => (T::call(JetFn::Cos, c)?, -T::call(JetFn::Sin, c)?, -1.0),
                JetFn::Sinh => (T::call(JetFn::Sinh, c)?, T::call(JetFn::Cosh, c)?, 1.0),
                JetFn::Cosh => (T::call(JetFn::Cosh, c)?, T::call(JetFn::Sinh, c)?, 1.0),
                _ => unreachable!(),
            };
            // k-th derivative cycles with period 2 up to the sign pattern
            let mut out = Vec::with_capacity(d + 1);
            let mut fact = 1.0;
            for k in 0..=d {
                if k > 0 {
                    fact *= k as f64;
                }
                let base = if k % 2 == 0 { a } else { b };
                let sign = if k % 4 >= 2 { cycle_sign } else { 1.0 };
                out.push(base * T::from_f64(sign / fact));
            }
            Ok(out)
        }
        JetFn::Sqrt => {
            if T::IS_REAL {
                strict(cr > 0.0)?;
            } else {
                strict(cm > DIV_TOL)?;
            }
            let s = c.sqrt_principal();
            let mut out = Vec::with_capacity(d + 1);
            let mut coeff = T::one();
            let mut inv_c_pow = T::one();
            out.push(s);
            for k in 1..=d {
                coeff = coeff * T::from_f64((0.5 - (k as f64 - 1.0)) / k as f64);
                inv_c_pow = inv_c_pow / c;
                out.push(s * coeff * inv_c_pow);
            }
            Ok(out)
        }
        JetFn::Log => {
            if T::IS_REAL {
                strict(cr > 0.0)?;
            } else {
                strict(cm > DIV_TOL)?;
            }
            let mut out = Vec::with_capacity(d + 1);
            out.push(T::call(JetFn::Log, c)?);
            let mut inv_c_pow = T::one();
            for k in 1..=d {
                inv_c_pow = inv_c_pow / c;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                out.push(inv_c_pow * T::from_f64(sign / k as f64));
            }
            Ok(out)
        }
        JetFn::Arcsin | JetFn::Arccos | JetFn::Arcsinh | JetFn::Arccosh => {
            match f {
                JetFn::Arcsin | JetFn::Arccos => strict(cr.abs() < 1.0)?,
                JetFn::Arccosh => strict(cr > 1.0)?,
                _ => {}
            }
            // integrate the series of the derivative, an algebraic function
            // q(s)^(-1/2) with quadratic radicand q
            let (q0, q1, q2, sign) = match f {
                JetFn::Arcsin => (T::one() - c * c, -(c + c), -T::one(), 1.0),
                JetFn::Arccos => (T::one() - c * c, -(c + c), -T::one(), -1.0),
                JetFn::Arcsinh => (T::one() + c * c, c + c, T::one(), 1.0),
                JetFn::Arccosh => (c * c - T::one(), c + c, T::one(), 1.0),
                _ => unreachable!(),
            };
            let deriv = series_inv_sqrt([q0, q1, q2], d.saturating_sub(1))?;
            let mut out = Vec::with_capacity(d + 1);
            out.push(T::call(f, c)?);
            for k in 1..=d {
                out.push(deriv[k - 1] * T::from_f64(sign / k as f64));
            }
            Ok(out)
        }
    }
}

/// Series of q(s)^(-1/2) for the quadratic q = q0 + q1 s + q2 s^2, q0 > 0.
fn series_inv_sqrt<T: Scalar>(q: [T; 3], degree: usize) -> Result<Vec<T>, JetError> {
    let q0 = q[0];
    if q0.modulus() <= DIV_TOL {
        return Err(JetError::DivisionByZero {
            modulus: q0.modulus(),
        });
    }
    // (q0 (1 + t))^(-1/2) with t = (q1 s + q2 s^2)/q0, via the binomial series
    let d = degree;
    let t = [T::zero(), q[1] / q0, q[2] / q0];
    let mut out = vec![T::zero(); d + 1];
    let mut term = vec![T::zero(); d + 1]; // t^k
    term[0] = T::one();
    let mut coeff = T::one(); // binom(-1/2, k)
    out[0] = T::one();
    for k in 1..=d {
        coeff = coeff * T::from_f64((-0.5 - (k as f64 - 1.0)) / k as f64);
        term = series_mul_quadratic(&term, &t, d);
        for (o, &tm) in out.iter_mut().zip(&term) {
            *o += tm * coeff;
        }
    }
    let scale = T::one() / q0.sqrt_principal();
    Ok(out.into_iter().map(|v| v * scale).collect())
}

fn series_mul_quadratic<T: Scalar>(a: &[T], t: &[T; 3], degree: usize) -> Vec<T> {
    let mut out = vec![T::zero(); degree + 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &tj) in t.iter().enumerate() {
            if i + j <= degree {
                out[i + j] += ai * tj;
            }
        }
    }
    out
}
