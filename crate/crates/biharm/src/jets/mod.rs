//! Truncated multivariate Taylor arithmetic (forward-mode jets).
//!
//! A [`Jet`] carries every Taylor coefficient `∂^α f / α!` of a scalar
//! function at a base point, for all multi-indices `|α| ≤ order` in a fixed
//! number of variables. Sums, products and analytic lifts (`sqrt`, `sin`,
//! `exp`, ...) are exact to the truncation order, so extracted partial
//! derivatives carry only floating-point rounding error — no step-size error.
//!
//! Jets are immutable values; every operation is a pure function, so charts
//! can be evaluated in parallel across sample points without shared state.

mod table;

use std::fmt;
use std::sync::Arc;
use table::{shared_table, IndexTable};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum JetError {
    #[error("jet shape mismatch: {vars_a} vars/order {order_a} vs {vars_b} vars/order {order_b}")]
    ShapeMismatch {
        vars_a: usize,
        order_a: usize,
        vars_b: usize,
        order_b: usize,
    },
    #[error("variable index {index} out of range for {num_vars} variables")]
    VariableIndex { index: usize, num_vars: usize },
    #[error("derivative order {requested} exceeds jet order {order}")]
    DerivativeOrder { requested: usize, order: usize },
    #[error("division by a jet with zero constant term")]
    ZeroConstantDivisor,
    #[error("{op} of a jet with out-of-domain constant term {value}")]
    Domain { op: &'static str, value: f64 },
    #[error("pow exponent must be a constant jet")]
    NonConstantExponent,
}

/// A truncated multivariate Taylor expansion of a scalar at a point.
#[derive(Clone)]
pub struct Jet {
    table: Arc<IndexTable>,
    coeffs: Vec<f64>,
}

impl Jet {
    /// Jet of the constant function `value`.
    pub fn constant(value: f64, num_vars: usize, order: usize) -> Jet {
        let table = shared_table(num_vars, order);
        let mut coeffs = vec![0.0; table.len()];
        coeffs[0] = value;
        Jet { table, coeffs }
    }

    /// Jet of the coordinate function `x_i` at base value `value`: constant
    /// term `value`, a single 1 in the first-order slot `i`, zeros elsewhere.
    pub fn variable(index: usize, value: f64, num_vars: usize, order: usize) -> Result<Jet, JetError> {
        if index >= num_vars {
            return Err(JetError::VariableIndex { index, num_vars });
        }
        let mut jet = Jet::constant(value, num_vars, order);
        if order >= 1 {
            // first-order block starts at rank 1; lexicographic order puts
            // e_0 first, so e_index sits at rank 1 + index
            jet.coeffs[1 + index] = 1.0;
        }
        Ok(jet)
    }

    /// Builds a jet from raw Taylor coefficients in graded-lex rank order.
    pub fn from_coefficients(coeffs: Vec<f64>, num_vars: usize, order: usize) -> Jet {
        let table = shared_table(num_vars, order);
        assert_eq!(coeffs.len(), table.len(), "coefficient count mismatch");
        Jet { table, coeffs }
    }

    pub fn num_vars(&self) -> usize {
        self.table.num_vars
    }

    pub fn order(&self) -> usize {
        self.table.order
    }

    /// Value of the underlying function at the base point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient `∂^α f / α!`, or zero when `α` is not stored.
    pub fn coefficient(&self, alpha: &[u8]) -> f64 {
        match self.table.rank(alpha) {
            Some(r) => self.coeffs[r as usize],
            None => 0.0,
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Partial derivative `∂^α f` (the Taylor coefficient times `α!`).
    pub fn extract_derivative(&self, alpha: &[usize]) -> Result<f64, JetError> {
        if alpha.len() != self.num_vars() {
            return Err(JetError::ShapeMismatch {
                vars_a: self.num_vars(),
                order_a: self.order(),
                vars_b: alpha.len(),
                order_b: self.order(),
            });
        }
        let total: usize = alpha.iter().sum();
        if total > self.order() {
            return Err(JetError::DerivativeOrder {
                requested: total,
                order: self.order(),
            });
        }
        let small: Vec<u8> = alpha.iter().map(|&a| a as u8).collect();
        let rank = self.table.rank(&small).expect("index within order");
        let mut factorial = 1.0;
        for &a in alpha {
            for i in 2..=a {
                factorial *= i as f64;
            }
        }
        Ok(self.coeffs[rank as usize] * factorial)
    }

    /// Drops all coefficients above `order`. Exact: the surviving
    /// coefficients are bit-identical to a computation run at the lower order.
    pub fn truncated(&self, order: usize) -> Jet {
        assert!(order <= self.order(), "cannot truncate upward");
        if order == self.order() {
            return self.clone();
        }
        let table = shared_table(self.num_vars(), order);
        let coeffs = self.coeffs[..table.len()].to_vec();
        Jet { table, coeffs }
    }

    /// Re-expresses the jet in a larger variable set; the new trailing
    /// variables get zero coefficients.
    pub fn extended_vars(&self, num_vars: usize) -> Jet {
        assert!(num_vars >= self.num_vars());
        if num_vars == self.num_vars() {
            return self.clone();
        }
        let table = shared_table(num_vars, self.order());
        let mut coeffs = vec![0.0; table.len()];
        let mut padded = vec![0u8; num_vars];
        for (rank, exp) in self.table.exponents.iter().enumerate() {
            padded[..exp.len()].copy_from_slice(exp);
            let target = table.rank(&padded).expect("padded index present");
            coeffs[target as usize] = self.coeffs[rank];
        }
        Jet { table, coeffs }
    }

    /// Jet of `∂f/∂x_i`, one order lower.
    pub fn partial(&self, var: usize) -> Result<Jet, JetError> {
        if var >= self.num_vars() {
            return Err(JetError::VariableIndex {
                index: var,
                num_vars: self.num_vars(),
            });
        }
        if self.order() == 0 {
            return Err(JetError::DerivativeOrder {
                requested: 1,
                order: 0,
            });
        }
        let table = shared_table(self.num_vars(), self.order() - 1);
        let mut coeffs = vec![0.0; table.len()];
        let mut bumped = vec![0u8; self.num_vars()];
        for (rank, exp) in table.exponents.iter().enumerate() {
            bumped.copy_from_slice(exp);
            bumped[var] += 1;
            let source = self.table.rank(&bumped).expect("bumped index present");
            coeffs[rank] = (exp[var] as f64 + 1.0) * self.coeffs[source as usize];
        }
        Ok(Jet { table, coeffs })
    }

    /// Coefficient slice along the last variable at exponent one: for
    /// `f(x, t)` returns the jet of `∂f/∂t |_{t=0}` in the remaining
    /// variables, one order lower. Used to pull one extra directional
    /// derivative out of a chart function.
    pub fn slice_last_linear(&self) -> Jet {
        assert!(self.num_vars() >= 2 && self.order() >= 1);
        let table = shared_table(self.num_vars() - 1, self.order() - 1);
        let mut coeffs = vec![0.0; table.len()];
        let mut full = vec![0u8; self.num_vars()];
        for (rank, exp) in table.exponents.iter().enumerate() {
            full[..exp.len()].copy_from_slice(exp);
            full[self.num_vars() - 1] = 1;
            let source = self.table.rank(&full).expect("sliced index present");
            coeffs[rank] = self.coeffs[source as usize];
        }
        Jet { table, coeffs }
    }

    fn zero_like(&self) -> Jet {
        Jet {
            table: Arc::clone(&self.table),
            coeffs: vec![0.0; self.coeffs.len()],
        }
    }

    /// Constant jet with the same shape as `self`.
    pub fn constant_like(&self, value: f64) -> Jet {
        let mut jet = self.zero_like();
        jet.coeffs[0] = value;
        jet
    }

    fn same_shape(&self, other: &Jet) -> bool {
        self.num_vars() == other.num_vars() && self.order() == other.order()
    }

    fn check_shape(&self, other: &Jet) -> Result<(), JetError> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(JetError::ShapeMismatch {
                vars_a: self.num_vars(),
                order_a: self.order(),
                vars_b: other.num_vars(),
                order_b: other.order(),
            })
        }
    }

    /// `self += scale * other`, elementwise.
    pub fn add_scaled(&mut self, other: &Jet, scale: f64) {
        assert!(self.same_shape(other), "jet shape mismatch");
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += scale * o;
        }
    }

    /// `self += a * b` without building the intermediate product. The
    /// workhorse of tensor contractions.
    pub fn add_prod(&mut self, a: &Jet, b: &Jet) {
        assert!(
            self.same_shape(a) && self.same_shape(b),
            "jet shape mismatch"
        );
        for &(i, j, t) in &self.table.products {
            self.coeffs[t as usize] += a.coeffs[i as usize] * b.coeffs[j as usize];
        }
    }

    pub fn scale(&self, factor: f64) -> Jet {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= factor;
        }
        out
    }

    /// Composes `self` with a univariate analytic function given by the
    /// Taylor coefficients of the outer function at `self.value()`
    /// (`series[j] = f^{(j)}(c) / j!`). Powers of the zero-constant part are
    /// accumulated in ascending degree, which keeps truncation exact.
    fn compose_univariate(&self, series: &[f64]) -> Jet {
        debug_assert_eq!(series.len(), self.order() + 1);
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut result = self.constant_like(series[0]);
        let mut power = self.constant_like(1.0);
        for &coeff in &series[1..] {
            power = &power * &delta;
            result.add_scaled(&power, coeff);
        }
        result
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn recip(&self) -> Result<Jet, JetError> {
        let c = self.value();
        if c == 0.0 {
            return Err(JetError::ZeroConstantDivisor);
        }
        let mut series = Vec::with_capacity(self.order() + 1);
        let mut term = 1.0 / c;
        series.push(term);
        for _ in 0..self.order() {
            term = -term / c;
            series.push(term);
        }
        Ok(self.compose_univariate(&series))
    }

    /// Series division. Errors when the divisor has a zero constant term,
    /// which signals a degenerate geometric configuration upstream.
    pub fn try_div(&self, rhs: &Jet) -> Result<Jet, JetError> {
        self.check_shape(rhs)?;
        Ok(self * &rhs.recip()?)
    }

    /// Square root; the constant term must be strictly positive.
    pub fn sqrt(&self) -> Result<Jet, JetError> {
        let c = self.value();
        if c <= 0.0 {
            return Err(JetError::Domain {
                op: "sqrt",
                value: c,
            });
        }
        self.powf_series(0.5, c)
    }

    /// Real power; the constant term must be strictly positive.
    pub fn powf(&self, exponent: f64) -> Result<Jet, JetError> {
        let c = self.value();
        if c <= 0.0 {
            return Err(JetError::Domain { op: "pow", value: c });
        }
        self.powf_series(exponent, c)
    }

    fn powf_series(&self, p: f64, c: f64) -> Result<Jet, JetError> {
        // series[j] = binom(p, j) * c^(p - j)
        let mut series = Vec::with_capacity(self.order() + 1);
        let mut term = c.powf(p);
        series.push(term);
        for j in 0..self.order() {
            term *= (p - j as f64) / (j as f64 + 1.0) / c;
            series.push(term);
        }
        Ok(self.compose_univariate(&series))
    }

    /// Integer power by repeated multiplication (valid for any constant term).
    pub fn powi(&self, exponent: u32) -> Jet {
        if exponent == 0 {
            return self.constant_like(1.0);
        }
        let mut out = self.clone();
        for _ in 1..exponent {
            out = &out * self;
        }
        out
    }

    pub fn exp(&self) -> Jet {
        let c = self.value().exp();
        let mut series = Vec::with_capacity(self.order() + 1);
        let mut term = c;
        series.push(term);
        for j in 0..self.order() {
            term /= j as f64 + 1.0;
            series.push(term);
        }
        self.compose_univariate(&series)
    }

    /// Natural logarithm; the constant term must be strictly positive.
    pub fn ln(&self) -> Result<Jet, JetError> {
        let c = self.value();
        if c <= 0.0 {
            return Err(JetError::Domain { op: "ln", value: c });
        }
        let mut series = Vec::with_capacity(self.order() + 1);
        series.push(c.ln());
        let mut term = 1.0;
        for j in 1..=self.order() {
            term /= c;
            series.push(-(-1.0f64).powi(j as i32) * term / j as f64);
        }
        Ok(self.compose_univariate(&series))
    }

    pub fn sin(&self) -> Jet {
        self.compose_univariate(&trig_series(self.value(), self.order(), true))
    }

    pub fn cos(&self) -> Jet {
        self.compose_univariate(&trig_series(self.value(), self.order(), false))
    }
}

/// Taylor coefficients of sin (or cos) at `c`.
fn trig_series(c: f64, order: usize, sin_first: bool) -> Vec<f64> {
    let (s, co) = c.sin_cos();
    let cycle = if sin_first {
        [s, co, -s, -co]
    } else {
        [co, -s, -co, s]
    };
    let mut series = Vec::with_capacity(order + 1);
    let mut factorial = 1.0;
    for j in 0..=order {
        if j > 0 {
            factorial *= j as f64;
        }
        series.push(cycle[j % 4] / factorial);
    }
    series
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.same_shape(other) && self.coeffs == other.coeffs
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet({} vars, order {})[", self.num_vars(), self.order())?;
        let mut first = true;
        for (rank, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{:?}: {}", self.table.exponents[rank], c)?;
        }
        write!(f, "]")
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                assert!(self.same_shape(rhs), "jet shape mismatch");
                let mut out = self.clone();
                for (c, r) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
                    *c = *c $op *r;
                }
                out
            }
        }
        impl std::ops::$trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
    };
}

binary_op!(Add, add, +);
binary_op!(Sub, sub, -);

impl std::ops::Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        assert!(self.same_shape(rhs), "jet shape mismatch");
        let mut out = self.zero_like();
        out.add_prod(self, rhs);
        out
    }
}

impl std::ops::Mul<Jet> for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl std::ops::Mul<&Jet> for Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        &self * rhs
    }
}

impl std::ops::Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl std::ops::Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl std::ops::Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl std::ops::Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += rhs;
        out
    }
}

/// The lifted elementary operations, by name. `Pow` reads its exponent from
/// the constant term of a second, constant argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftOp {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
    Sin,
    Cos,
    Exp,
    Pow,
}

/// Applies a lifted elementary function, with full shape and domain checks.
pub fn lift(op: LiftOp, args: &[Jet]) -> Result<Jet, JetError> {
    let arity = match op {
        LiftOp::Add | LiftOp::Sub | LiftOp::Mul | LiftOp::Div | LiftOp::Pow => 2,
        _ => 1,
    };
    assert_eq!(args.len(), arity, "wrong argument count for {:?}", op);
    if arity == 2 {
        args[0].check_shape(&args[1])?;
    }
    match op {
        LiftOp::Add => Ok(&args[0] + &args[1]),
        LiftOp::Sub => Ok(&args[0] - &args[1]),
        LiftOp::Mul => Ok(&args[0] * &args[1]),
        LiftOp::Div => args[0].try_div(&args[1]),
        LiftOp::Sqrt => args[0].sqrt(),
        LiftOp::Sin => Ok(args[0].sin()),
        LiftOp::Cos => Ok(args[0].cos()),
        LiftOp::Exp => Ok(args[0].exp()),
        LiftOp::Pow => {
            let exponent = &args[1];
            if exponent.coeffs[1..].iter().any(|&c| c != 0.0) {
                return Err(JetError::NonConstantExponent);
            }
            args[0].powf(exponent.value())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn seed_variable_layout() {
        let j = Jet::variable(0, 2.0, 2, 2).unwrap();
        assert_eq!(j.coefficient(&[0, 0]), 2.0);
        assert_eq!(j.coefficient(&[1, 0]), 1.0);
        assert_eq!(j.coefficient(&[0, 1]), 0.0);
        assert_eq!(j.coefficient(&[2, 0]), 0.0);

        let j = Jet::variable(1, 0.0, 2, 1).unwrap();
        assert_eq!(j.coefficient(&[0, 0]), 0.0);
        assert_eq!(j.coefficient(&[0, 1]), 1.0);

        assert!(Jet::variable(3, 0.0, 2, 1).is_err());
    }

    #[test]
    fn square_of_coordinate_at_three() {
        let x = Jet::variable(0, 3.0, 1, 3).unwrap();
        let sq = &x * &x;
        assert_eq!(sq.coefficient(&[0]), 9.0);
        assert_eq!(sq.coefficient(&[1]), 6.0);
        assert_eq!(sq.coefficient(&[2]), 1.0);
        assert_eq!(sq.coefficient(&[3]), 0.0);
        assert_eq!(sq.extract_derivative(&[2]).unwrap(), 2.0);
    }

    #[test]
    fn sqrt_of_constant() {
        let c = Jet::constant(4.0, 2, 3);
        let r = c.sqrt().unwrap();
        assert_eq!(r.value(), 2.0);
        assert!(r.coefficients()[1..].iter().all(|&c| c == 0.0));
        assert!(Jet::constant(-1.0, 2, 3).sqrt().is_err());
        assert!(Jet::constant(0.0, 2, 3).recip().is_err());
    }

    #[test]
    fn sine_maclaurin() {
        let x = Jet::variable(0, 0.0, 1, 3).unwrap();
        let s = x.sin();
        close(s.coefficient(&[0]), 0.0, 1e-15);
        close(s.coefficient(&[1]), 1.0, 1e-15);
        close(s.coefficient(&[2]), 0.0, 1e-15);
        close(s.coefficient(&[3]), -1.0 / 6.0, 1e-15);
    }

    #[test]
    fn exp_derivatives_at_zero() {
        let x = Jet::variable(0, 0.0, 1, 5).unwrap();
        let e = x.exp();
        close(e.extract_derivative(&[4]).unwrap(), 1.0, 1e-15);
        close(e.extract_derivative(&[0]).unwrap(), 1.0, 1e-15);
    }

    #[test]
    fn exp_times_sin_mixed_partials() {
        // f(x, y) = exp(x) sin(y): ∂^(a,b) f = exp(x) * sin^(b)(y)
        let x = Jet::variable(0, 0.3, 2, 3).unwrap();
        let y = Jet::variable(1, 0.7, 2, 3).unwrap();
        let f = x.exp() * y.sin();
        let ex = 0.3f64.exp();
        let (s, c) = 0.7f64.sin_cos();
        let table = [s, c, -s, -c];
        for a in 0..=3usize {
            for b in 0..=(3 - a) {
                let expect = ex * table[b % 4];
                close(f.extract_derivative(&[a, b]).unwrap(), expect, 1e-12);
            }
        }
    }

    #[test]
    fn division_round_trip() {
        let x = Jet::variable(0, 0.4, 2, 4).unwrap();
        let y = Jet::variable(1, -0.2, 2, 4).unwrap();
        let num = &(&x * &x) + &(&y + 2.0);
        let den = &(&x * &y) + 3.0;
        let q = num.try_div(&den).unwrap();
        let back = &q * &den;
        for (a, b) in back.coefficients().iter().zip(num.coefficients()) {
            close(*a, *b, 1e-14);
        }
    }

    #[test]
    fn partial_lowers_order() {
        let x = Jet::variable(0, 1.5, 2, 4).unwrap();
        let y = Jet::variable(1, -0.5, 2, 4).unwrap();
        let f = &(&x * &x) * &y; // x² y
        let fx = f.partial(0).unwrap(); // 2xy
        assert_eq!(fx.order(), 3);
        close(fx.value(), 2.0 * 1.5 * -0.5, 1e-14);
        close(fx.extract_derivative(&[1, 0]).unwrap(), -1.0, 1e-14);
        close(fx.extract_derivative(&[0, 1]).unwrap(), 3.0, 1e-14);
    }

    #[test]
    fn extend_and_slice() {
        // f(x) = x², extended with t, then g = f * t has ∂g/∂t = x²
        let x = Jet::variable(0, 2.0, 1, 3).unwrap();
        let f = (&x * &x).extended_vars(2);
        let t = Jet::variable(1, 0.0, 2, 3).unwrap();
        let g = &f * &t;
        let sliced = g.slice_last_linear();
        assert_eq!(sliced.num_vars(), 1);
        assert_eq!(sliced.order(), 2);
        close(sliced.value(), 4.0, 1e-15);
        close(sliced.extract_derivative(&[1]).unwrap(), 4.0, 1e-15);
        close(sliced.extract_derivative(&[2]).unwrap(), 2.0, 1e-15);
    }

    #[test]
    fn lift_checks_shapes_and_domains() {
        let a = Jet::variable(0, 1.0, 2, 3).unwrap();
        let b = Jet::variable(0, 1.0, 2, 2).unwrap();
        assert!(matches!(
            lift(LiftOp::Add, &[a.clone(), b]),
            Err(JetError::ShapeMismatch { .. })
        ));
        let exponent = Jet::constant(2.5, 2, 3);
        let powed = lift(LiftOp::Pow, &[a.clone(), exponent]).unwrap();
        close(powed.value(), 1.0, 1e-15);
        close(powed.extract_derivative(&[1, 0]).unwrap(), 2.5, 1e-14);
        assert!(matches!(
            lift(LiftOp::Pow, &[a.clone(), a]),
            Err(JetError::NonConstantExponent)
        ));
    }
}
