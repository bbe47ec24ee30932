//! Cartan umbilical locus for implicitly defined hypersurfaces 0 = F(z, w, zb, wb).
//!
//! The conjugate variables zb, wb are independent jet variables (polarization);
//! jets are seeded at (z0, w0, conj z0, conj w0). On the domain {F_w != 0} the
//! invariant
//!
//! ```text
//! I_[w] = 12 (F_w)^9 (I_1 + ... + I_7)
//! ```
//!
//! vanishes exactly at the CR-umbilical points, where the seven terms combine
//! Lbar = -F_wb d/dzb + F_zb d/dwb applications of h(F)/F_w^3 and l(F)/F_w^2:
//!
//! ```text
//! h(F) = F_z^2 F_ww - 2 F_z F_w F_zw + F_w^2 F_zz
//! l(F) = F_zb F_z F_wwb - F_zb F_w F_zwb - F_wb F_z F_zbw + F_wb F_w F_zzb
//! ```
//!
//! l(F) is the Levi-form contraction along the tangential generators and is
//! real on the surface. Degree bookkeeping: F at 6, h and l at 4, then up to
//! four Lbar applications land on scalars.

use std::collections::HashMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::jet::{Jet, JetError};

/// A hypersurface 0 = F(z, w, zb, wb) with named scalar parameters.
#[derive(Debug, Clone)]
pub struct ImplicitHypersurface {
    pub f: Expr,
    pub params: HashMap<String, f64>,
}

impl ImplicitHypersurface {
    pub fn new(f: Expr) -> ImplicitHypersurface {
        ImplicitHypersurface {
            f,
            params: HashMap::new(),
        }
    }

    pub fn with_params(mut self, params: HashMap<String, f64>) -> Self {
        self.params = params;
        self
    }

    /// Scalar value of F at (z, w, conj z, conj w).
    pub fn value(&self, z: Complex64, w: Complex64) -> Result<Complex64, EvalError> {
        self.f.eval_scalar(&conjugate_point(z, w), &self.params)
    }

    /// Largest |Im F| / scale over the samples; F must be real on the
    /// conjugate locus for a valid defining function.
    pub fn reality_residual(&self, samples: &[(Complex64, Complex64)]) -> Result<f64, EvalError> {
        let mut worst = 0.0f64;
        for &(z, w) in samples {
            let v = self.value(z, w)?;
            worst = worst.max(v.im.abs() / (1.0 + v.re.abs()));
        }
        Ok(worst)
    }
}

fn conjugate_point(z: Complex64, w: Complex64) -> HashMap<String, Complex64> {
    [
        ("z".to_string(), z),
        ("w".to_string(), w),
        ("zb".to_string(), z.conj()),
        ("wb".to_string(), w.conj()),
    ]
    .into()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImplicitError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("point is not on the hypersurface: |F| = {f_abs:.3e} exceeds {tol:.3e}")]
    NotOnSurface { f_abs: f64, tol: f64 },
    #[error("F_w vanishes at the point: |F_w| = {f_w_abs:.3e}")]
    FwVanishes { f_w_abs: f64 },
    #[error("non-finite invariant terms (Levi degeneracy or singular point)")]
    NonFinite,
}

#[derive(Debug, Clone, Copy)]
pub struct ImplicitOptions {
    /// On-surface tolerance, scaled by the local magnitude of F's low-order
    /// coefficients.
    pub on_surface_tol: f64,
    /// Minimum |F_w|.
    pub fw_tol: f64,
    /// Project near-surface points onto the surface with one Newton step when
    /// |F| lands between tol and 100 tol.
    pub project: bool,
}

impl Default for ImplicitOptions {
    fn default() -> Self {
        ImplicitOptions {
            on_surface_tol: 1e-8,
            fw_tol: 1e-10,
            project: true,
        }
    }
}

/// Result of one I_[w] evaluation.
#[derive(Debug, Clone)]
pub struct ImplicitResult {
    /// I_[w] = 12 F_w^9 (I_1 + ... + I_7).
    pub i_w: Complex64,
    /// The seven terms I_1 ... I_7.
    pub terms: [Complex64; 7],
    /// F_w at the point.
    pub f_w: Complex64,
    /// The (possibly Newton-projected) evaluation point.
    pub point: (Complex64, Complex64),
}

impl ImplicitResult {
    /// Levi-normalized magnitude: |sum I_i| / max(1, max |I_i|). Independent
    /// of the F_w^9 prefactor, so smallness means genuine cancellation.
    pub fn normalized_magnitude(&self) -> f64 {
        let sum: Complex64 = self.terms.iter().sum();
        let scale = self
            .terms
            .iter()
            .map(|t| t.norm())
            .fold(1.0f64, f64::max);
        sum.norm() / scale
    }
}

fn eval_f_jet(
    h: &ImplicitHypersurface,
    z: Complex64,
    w: Complex64,
    degree: usize,
) -> Result<Jet<Complex64>, EvalError> {
    let bindings: HashMap<String, Jet<Complex64>> = [
        ("z".to_string(), Jet::variable(0, z, 4, degree).expect("z")),
        ("w".to_string(), Jet::variable(1, w, 4, degree).expect("w")),
        (
            "zb".to_string(),
            Jet::variable(2, z.conj(), 4, degree).expect("zb"),
        ),
        (
            "wb".to_string(),
            Jet::variable(3, w.conj(), 4, degree).expect("wb"),
        ),
    ]
    .into();
    h.f.eval_jet(&bindings, &h.params)
}

fn wrap(e: JetError) -> ImplicitError {
    ImplicitError::Eval(EvalError::Jet {
        location: "implicit pipeline".to_string(),
        source: e,
    })
}

/// h(F) and l(F) as jets two degrees below F.
pub fn second_order_combinations(
    f: &Jet<Complex64>,
) -> Result<(Jet<Complex64>, Jet<Complex64>), JetError> {
    let d = f.degree() - 2;
    let f_z = f.partial(0)?;
    let f_w = f.partial(1)?;
    let f_zb = f.partial(2)?;
    let f_wb = f.partial(3)?;
    let f_ww = f_w.partial(1)?;
    let f_zw = f_z.partial(1)?;
    let f_zz = f_z.partial(0)?;
    let f_wwb = f_w.partial(3)?;
    let f_zwb = f_z.partial(3)?;
    let f_zbw = f_zb.partial(1)?;
    let f_zzb = f_z.partial(2)?;

    let z = f_z.truncated(d);
    let w = f_w.truncated(d);
    let zb = f_zb.truncated(d);
    let wb = f_wb.truncated(d);

    let h = &(&(&(&z * &z) * &f_ww) - &(&(&z * &w) * &f_zw).scaled(Complex64::new(2.0, 0.0)))
        + &(&(&w * &w) * &f_zz);
    let l = &(&(&(&zb * &z) * &f_wwb) - &(&(&zb * &w) * &f_zwb))
        - &(&(&(&wb * &z) * &f_zbw) - &(&(&wb * &w) * &f_zzb));
    Ok((h, l))
}

/// Apply Lbar = -F_wb d/dzb + F_zb d/dwb to a jet; one degree lower.
pub fn lbar_apply(f: &Jet<Complex64>, big_f: &Jet<Complex64>) -> Result<Jet<Complex64>, JetError> {
    let d = f.degree() - 1;
    let f_zb = f.partial(2)?;
    let f_wb = f.partial(3)?;
    let big_zb = big_f.partial(2)?.truncated(d);
    let big_wb = big_f.partial(3)?.truncated(d);
    Ok(&(-&(&big_wb * &f_zb)) + &(&big_zb * &f_wb))
}

/// Evaluate I_[w] at a point of the surface.
pub fn cartan_locus_iw(
    h: &ImplicitHypersurface,
    z: Complex64,
    w: Complex64,
    opts: &ImplicitOptions,
) -> Result<ImplicitResult, ImplicitError> {
    // surface membership via the cheap degree-1 jet, with optional Newton
    // projection along the real gradient
    let (z, w) = {
        let probe = eval_f_jet(h, z, w, 1)?;
        let f0 = probe.constant_term();
        let scale = probe
            .coeffs()
            .iter()
            .map(|c| c.norm())
            .fold(1.0f64, f64::max);
        let tol = opts.on_surface_tol * scale;
        if f0.norm() <= tol {
            (z, w)
        } else if opts.project && f0.norm() <= 100.0 * tol {
            let (z2, w2) = newton_project(&probe, z, w);
            let recheck = eval_f_jet(h, z2, w2, 1)?;
            if recheck.constant_term().norm() > tol {
                return Err(ImplicitError::NotOnSurface {
                    f_abs: recheck.constant_term().norm(),
                    tol,
                });
            }
            (z2, w2)
        } else {
            return Err(ImplicitError::NotOnSurface {
                f_abs: f0.norm(),
                tol,
            });
        }
    };

    let f = eval_f_jet(h, z, w, 6)?;
    let f_w_jet = f.partial(1).map_err(wrap)?;
    let f_w0 = f_w_jet.constant_term();
    if f_w0.norm() <= opts.fw_tol {
        return Err(ImplicitError::FwVanishes {
            f_w_abs: f_w0.norm(),
        });
    }

    let (h2, l2) = second_order_combinations(&f).map_err(wrap)?;
    let fw4 = f_w_jet.truncated(4);
    let q_h = h2.div(&fw4.powi(3).map_err(wrap)?).map_err(wrap)?;
    let q_l = l2.div(&fw4.powi(2).map_err(wrap)?).map_err(wrap)?;

    let lb = |g: &Jet<Complex64>| lbar_apply(g, &f).map_err(wrap);
    let h1 = lb(&q_h)?;
    let h2b = lb(&h1)?;
    let h3 = lb(&h2b)?;
    let h4 = lb(&h3)?;
    let l1 = lb(&q_l)?;
    let l2b = lb(&l1)?;
    let l3 = lb(&l2b)?;

    let ql = q_l.constant_term();
    let l1v = l1.constant_term();
    let l2v = l2b.constant_term();
    let l3v = l3.constant_term();
    let h1v = h1.constant_term();
    let h2v = h2b.constant_term();
    let h3v = h3.constant_term();
    let h4v = h4.constant_term();

    let terms = [
        ql * ql * ql * h4v,
        -6.0 * ql * ql * l1v * h3v,
        -4.0 * ql * ql * l2v * h2v,
        -ql * ql * l3v * h1v,
        15.0 * ql * l1v * l1v * h2v,
        10.0 * ql * l1v * l2v * h1v,
        -15.0 * l1v * l1v * l1v * h1v,
    ];
    let sum: Complex64 = terms.iter().sum();
    let i_w = 12.0 * f_w0.powi(9) * sum;
    if !i_w.re.is_finite() || !i_w.im.is_finite() || terms.iter().any(|t| !t.norm().is_finite()) {
        return Err(ImplicitError::NonFinite);
    }
    Ok(ImplicitResult {
        i_w,
        terms,
        f_w: f_w0,
        point: (z, w),
    })
}

/// One Newton step of the real-valued restriction G(x,y,u,v) = F(z,w,conj z,conj w)
/// along its gradient.
fn newton_project(probe: &Jet<Complex64>, z: Complex64, w: Complex64) -> (Complex64, Complex64) {
    let g0 = probe.constant_term().re;
    let d = |i: usize| {
        probe
            .coefficient(&crate::jet::MultiIndex(
                (0..4).map(|k| u8::from(k == i)).collect(),
            ))
            .expect("first-order coefficient")
    };
    let (f_z, f_w, f_zb, f_wb) = (d(0), d(1), d(2), d(3));
    let i = Complex64::new(0.0, 1.0);
    let grad = [
        (f_z + f_zb).re,
        ((f_z - f_zb) * i).re,
        (f_w + f_wb).re,
        ((f_w - f_wb) * i).re,
    ];
    let norm2: f64 = grad.iter().map(|g| g * g).sum();
    if norm2 <= 1e-300 {
        return (z, w);
    }
    let step = g0 / norm2;
    (
        Complex64::new(z.re - step * grad[0], z.im - step * grad[1]),
        Complex64::new(w.re - step * grad[2], w.im - step * grad[3]),
    )
}
