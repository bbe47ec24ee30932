//! Cartan complex invariant of a hypersurface graphed as v = phi(x, y, u).
//!
//! Coordinates are z = x + iy, w = u + iv. The tangential generators are
//! L = d/dz + A d/du and Lbar = d/dzbar + Abar d/du with A = -phi_z/(i + phi_u),
//! Abar = -phi_zbar/(-i + phi_u), and the Levi factor ell is the real
//! coefficient of i[L, Lbar] in d/du. Subscripts are coordinate partials of
//! functions of (x, y, u): d/dz = (d/dx - i d/dy)/2, d/dzbar = (d/dx + i d/dy)/2.
//!
//! The computed relative invariant J_star is the six-term bracket
//!
//! ```text
//! -2 Lb(L(Lb(Pb))) + 3 Lb(Lb(L(Pb))) - 7 Pb Lb(L(Pb))
//!   + 4 Pb L(Lb(Pb)) - L(Pb) Lb(Pb) + 2 Pb Pb L(Pb)
//! ```
//!
//! with Pb = (ell_zbar - ell Abar_u + Abar ell_u)/ell. The group-parameter
//! prefactor is dropped; zero loci (CR-umbilical points) are unaffected.
//! Degree bookkeeping: phi enters at degree 6, ell at 4, Pb at 3, and three
//! field applications land on scalars.

use std::collections::HashMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::jet::{Jet, JetError};

/// Relative tolerance on the imaginary residue of the Levi factor; a larger
/// residue signals a non-real graphing function or a chart mistake.
pub const LEVI_IM_TOL: f64 = 1e-9;

/// A hypersurface chart v = phi(x, y, u) with named scalar parameters and an
/// optional list of admissibility predicates (all must evaluate > 0).
#[derive(Debug, Clone)]
pub struct GraphHypersurface {
    pub phi: Expr,
    pub params: HashMap<String, f64>,
    pub domain: Vec<Expr>,
}

impl GraphHypersurface {
    pub fn new(phi: Expr) -> GraphHypersurface {
        GraphHypersurface {
            phi,
            params: HashMap::new(),
            domain: Vec::new(),
        }
    }

    pub fn with_params(mut self, params: HashMap<String, f64>) -> Self {
        self.params = params;
        self
    }

    pub fn with_domain(mut self, domain: Vec<Expr>) -> Self {
        self.domain = domain;
        self
    }

    /// All domain predicates strictly positive at the point.
    pub fn admissible(&self, point: [f64; 3]) -> Result<bool, EvalError> {
        let vars = scalar_point(point);
        for predicate in &self.domain {
            if predicate.eval_scalar(&vars, &self.params)? <= 0.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Graph value phi at the point.
    pub fn height(&self, point: [f64; 3]) -> Result<f64, EvalError> {
        self.phi.eval_scalar(&scalar_point(point), &self.params)
    }

    /// Ambient point (z, w) = (x + iy, u + i phi).
    pub fn embed(&self, point: [f64; 3]) -> Result<(Complex64, Complex64), EvalError> {
        let v = self.height(point)?;
        Ok((
            Complex64::new(point[0], point[1]),
            Complex64::new(point[2], v),
        ))
    }
}

fn scalar_point(point: [f64; 3]) -> HashMap<String, f64> {
    [
        ("x".to_string(), point[0]),
        ("y".to_string(), point[1]),
        ("u".to_string(), point[2]),
    ]
    .into()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("point ({0}, {1}, {2}) outside the chart domain")]
    OutsideDomain(f64, f64, f64),
    #[error("Levi-degenerate point: |ell| = {ell:.3e} below tolerance {tol:.3e}")]
    LeviDegenerate { ell: f64, tol: f64 },
    #[error("Levi factor has imaginary residue beyond tolerance: {re} + {im}i")]
    NonRealLevi { re: f64, im: f64 },
    #[error("non-finite invariant value")]
    NonFinite,
}

/// Evaluation options.
#[derive(Debug, Clone, Copy)]
pub struct GraphOptions {
    /// Absolute tolerance on |ell| below which the point counts as
    /// Levi-degenerate.
    pub levi_tol: f64,
    /// Skip the domain-predicate test (used by scanners that pre-filter).
    pub skip_domain_check: bool,
}

impl Default for GraphOptions {
    fn default() -> Self {
        GraphOptions {
            levi_tol: 1e-10,
            skip_domain_check: false,
        }
    }
}

/// Result of one invariant evaluation.
#[derive(Debug, Clone)]
pub struct CartanGraphResult {
    /// Relative Cartan invariant (the six-term bracket).
    pub j_star: Complex64,
    /// Levi factor ell at the point.
    pub levi_factor: f64,
    /// Key function Pbar at the point (diagnostic).
    pub pbar_value: Complex64,
    pub point: [f64; 3],
}

/// Which tangential generator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    L,
    LBar,
}

/// Apply L or Lbar to a jet-valued field over (x, y, u):
/// L(f) = (f_x - i f_y)/2 + A f_u and Lbar(f) = (f_x + i f_y)/2 + Abar f_u.
/// The result is one degree lower.
pub fn apply_vector_field(
    which: FieldKind,
    f: &Jet<Complex64>,
    a: &Jet<Complex64>,
    abar: &Jet<Complex64>,
) -> Result<Jet<Complex64>, JetError> {
    let coeff = match which {
        FieldKind::L => a,
        FieldKind::LBar => abar,
    };
    // the result degree is limited by both f and the field coefficients
    let degree = (f.degree() - 1).min(coeff.degree());
    let fx = f.partial(0)?.truncated(degree);
    let fy = f.partial(1)?.truncated(degree);
    let fu = f.partial(2)?.truncated(degree);
    let half = Complex64::new(0.5, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let horizontal = match which {
        FieldKind::L => &fx.scaled(half) - &fy.scaled(half * i),
        FieldKind::LBar => &fx.scaled(half) + &fy.scaled(half * i),
    };
    Ok(&horizontal + &(&coeff.truncated(degree) * &fu))
}

/// Degree-6 pipeline shared by the public entry points.
struct Pipeline {
    ell: Jet<Complex64>,
    abar: Jet<Complex64>,
    a: Jet<Complex64>,
}

impl Pipeline {
    fn build(h: &GraphHypersurface, point: [f64; 3]) -> Result<Pipeline, GraphError> {
        let bindings: HashMap<String, Jet<f64>> = [
            ("x".to_string(), Jet::variable(0, point[0], 3, 6).expect("x")),
            ("y".to_string(), Jet::variable(1, point[1], 3, 6).expect("y")),
            ("u".to_string(), Jet::variable(2, point[2], 3, 6).expect("u")),
        ]
        .into();
        let phi = h.phi.eval_jet(&bindings, &h.params)?.to_complex();

        let i = Complex64::new(0.0, 1.0);
        let half = Complex64::new(0.5, 0.0);
        let phi_x = phi.partial(0).map_err(wrap)?;
        let phi_y = phi.partial(1).map_err(wrap)?;
        let phi_u = phi.partial(2).map_err(wrap)?;
        let phi_z = &phi_x.scaled(half) - &phi_y.scaled(half * i); // deg 5
        let phi_zb = &phi_x.scaled(half) + &phi_y.scaled(half * i);

        // second derivatives at degree 4
        let phi_zzb = {
            let zx = phi_z.partial(0).map_err(wrap)?;
            let zy = phi_z.partial(1).map_err(wrap)?;
            &zx.scaled(half) + &zy.scaled(half * i)
        };
        let phi_zu = phi_z.partial(2).map_err(wrap)?;
        let phi_zbu = phi_zb.partial(2).map_err(wrap)?;
        let phi_uu = phi_u.partial(2).map_err(wrap)?;

        let z4 = phi_z.truncated(4);
        let zb4 = phi_zb.truncated(4);
        let u4 = phi_u.truncated(4);
        let one = Jet::constant(Complex64::new(1.0, 0.0), 3, 4);
        let one_pu2 = &one + &(&u4 * &u4);

        let numerator = {
            let t1 = &phi_zzb * &one_pu2;
            let t2 = (&zb4 * &phi_zu).scaled(-i);
            let t3 = (&z4 * &phi_zbu).scaled(i);
            let t4 = -&(&(&zb4 * &phi_zu) * &u4);
            let t5 = -&(&(&z4 * &phi_zbu) * &u4);
            let t6 = &(&z4 * &zb4) * &phi_uu;
            &(&(&(&(&t1 + &t2) + &t3) + &t4) + &t5) + &t6
        };
        let ell = numerator
            .scaled(Complex64::new(2.0, 0.0))
            .div(&(&one_pu2 * &one_pu2))
            .map_err(wrap)?;

        let ell0 = ell.constant_term();
        if ell0.im.abs() >= LEVI_IM_TOL * (1.0 + ell0.re.abs()) {
            return Err(GraphError::NonRealLevi {
                re: ell0.re,
                im: ell0.im,
            });
        }

        let i_jet = Jet::constant(i, 3, 4);
        let a = (-&z4).div(&(&i_jet + &u4)).map_err(wrap)?;
        let abar = (-&zb4).div(&(&(-&i_jet) + &u4)).map_err(wrap)?;

        Ok(Pipeline { ell, abar, a })
    }

    /// Pbar = (ell_zbar - ell*Abar_u + Abar*ell_u)/ell at degree 3.
    /// ell is real, so the paper's ellbar is ell itself.
    fn pbar(&self, opts: &GraphOptions) -> Result<Jet<Complex64>, GraphError> {
        let ell0 = self.ell.constant_term();
        if ell0.norm() <= opts.levi_tol {
            return Err(GraphError::LeviDegenerate {
                ell: ell0.norm(),
                tol: opts.levi_tol,
            });
        }
        let half = Complex64::new(0.5, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let ell_x = self.ell.partial(0).map_err(wrap)?;
        let ell_y = self.ell.partial(1).map_err(wrap)?;
        let ell_zb = &ell_x.scaled(half) + &ell_y.scaled(half * i);
        let ell_u = self.ell.partial(2).map_err(wrap)?;
        let abar_u = self.abar.partial(2).map_err(wrap)?;
        let ell3 = self.ell.truncated(3);
        let numerator = &(&ell_zb - &(&ell3 * &abar_u)) + &(&self.abar.truncated(3) * &ell_u);
        numerator.div(&ell3).map_err(wrap)
    }
}

fn wrap(e: JetError) -> GraphError {
    GraphError::Eval(EvalError::Jet {
        location: "graph pipeline".to_string(),
        source: e,
    })
}

/// Levi factor ell at a point; real by construction up to tolerance.
pub fn levi_factor(h: &GraphHypersurface, point: [f64; 3]) -> Result<f64, GraphError> {
    check_domain(h, point, &GraphOptions::default())?;
    let p = Pipeline::build(h, point)?;
    Ok(p.ell.constant_term().re)
}

/// Key function Pbar at a point.
pub fn key_function_pbar(h: &GraphHypersurface, point: [f64; 3]) -> Result<Complex64, GraphError> {
    check_domain(h, point, &GraphOptions::default())?;
    let p = Pipeline::build(h, point)?;
    Ok(p.pbar(&GraphOptions::default())?.constant_term())
}

fn check_domain(
    h: &GraphHypersurface,
    point: [f64; 3],
    opts: &GraphOptions,
) -> Result<(), GraphError> {
    if !opts.skip_domain_check && !h.admissible(point)? {
        return Err(GraphError::OutsideDomain(point[0], point[1], point[2]));
    }
    Ok(())
}

/// The relative Cartan invariant J_star, with the Levi factor and Pbar.
pub fn cartan_invariant(
    h: &GraphHypersurface,
    point: [f64; 3],
    opts: &GraphOptions,
) -> Result<CartanGraphResult, GraphError> {
    check_domain(h, point, opts)?;
    let pipeline = Pipeline::build(h, point)?;
    let pbar = pipeline.pbar(opts)?;
    let a = &pipeline.a;
    let abar = &pipeline.abar;

    let field = |which: FieldKind, f: &Jet<Complex64>| -> Result<Jet<Complex64>, GraphError> {
        apply_vector_field(which, f, a, abar).map_err(wrap)
    };

    let lb_p = field(FieldKind::LBar, &pbar)?; // deg 2
    let l_p = field(FieldKind::L, &pbar)?; // deg 2
    let l_lb_p = field(FieldKind::L, &lb_p)?; // deg 1
    let lb_l_p = field(FieldKind::LBar, &l_p)?; // deg 1
    let t1 = field(FieldKind::LBar, &l_lb_p)?.constant_term(); // Lb L Lb Pb
    let t2 = field(FieldKind::LBar, &lb_l_p)?.constant_term(); // Lb Lb L Pb

    let p0 = pbar.constant_term();
    let t3 = p0 * lb_l_p.constant_term();
    let t4 = p0 * l_lb_p.constant_term();
    let t5 = l_p.constant_term() * lb_p.constant_term();
    let t6 = p0 * p0 * l_p.constant_term();

    let j_star = -2.0 * t1 + 3.0 * t2 - 7.0 * t3 + 4.0 * t4 - t5 + 2.0 * t6;
    if !j_star.re.is_finite() || !j_star.im.is_finite() {
        return Err(GraphError::NonFinite);
    }
    Ok(CartanGraphResult {
        j_star,
        levi_factor: pipeline.ell.constant_term().re,
        pbar_value: p0,
        point,
    })
}
