//! Independent cross-checks of the two curvature engines: finite-difference
//! Taylor data, biholomorphic invariance, phase identities, and the
//! zero-locus regression guard.

use std::collections::HashMap;

use cartan_cr::{
    build_model, cartan_invariant, cartan_locus_iw, cross_check, Chart, ChartSurface, Complex64,
    Expr, GraphHypersurface, GraphOptions, ImplicitHypersurface, ImplicitOptions, Jet, LevelConvention,
    ModelEntry, ModelKind, MultiIndex,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Fornberg weights: `w[i][k]` is the coefficient of `f(nodes[i])` in the
/// k-th derivative at `z0`, exact for polynomials of degree < nodes.len().
fn fornberg_weights(z0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let m = max_order;
    let mut c = vec![vec![0.0f64; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c
}

/// The invariant only sees the 6-jet of the graphing function: replace the
/// torus Case-2 graph by the degree-6 Taylor polynomial whose coefficients
/// come from high-order finite differences of phi, and compare invariants.
#[test]
fn fd_taylor_jet_matches_analytic_graph() {
    let beta = 1.0f64;
    let eps = 0.5f64;
    let x0 = 0.2f64;
    let phi_x = |x: f64| -(beta * beta + 1.0) * (eps * eps - x * x).sqrt();

    // weights on the integer-scaled stencil stay well conditioned; the
    // 1/h^k scale comes back at the end
    let h = 0.01;
    let scaled: Vec<f64> = (-6..=6).map(|j| j as f64).collect();
    let weights = fornberg_weights(0.0, &scaled, 6);
    let samples: Vec<f64> = scaled.iter().map(|j| phi_x(x0 + j * h)).collect();
    let mut taylor = [0.0f64; 7];
    let mut factorial = 1.0;
    for (k, t) in taylor.iter_mut().enumerate() {
        if k > 0 {
            factorial *= k as f64;
        }
        let deriv: f64 = samples
            .iter()
            .zip(&weights)
            .map(|(&f, w)| w[k] * f)
            .sum::<f64>()
            / h.powi(k as i32);
        *t = deriv / factorial;
    }

    let mut params: HashMap<String, f64> = [("beta".to_string(), beta), ("x0".to_string(), x0)].into();
    for (k, t) in taylor.iter().enumerate() {
        params.insert(format!("a{k}"), *t);
    }
    let fd_graph = GraphHypersurface::new(
        Expr::parse(
            "beta*u + a0 + a1*(x - x0) + a2*(x - x0)^2 + a3*(x - x0)^3 \
             + a4*(x - x0)^4 + a5*(x - x0)^5 + a6*(x - x0)^6",
            &["x", "y", "u"],
        )
        .unwrap(),
    )
    .with_params(params);
    let analytic = GraphHypersurface::new(
        Expr::parse("beta*u - (beta^2 + 1)*sqrt(eps^2 - x^2)", &["x", "y", "u"]).unwrap(),
    )
    .with_params([("beta".to_string(), beta), ("eps".to_string(), eps)].into());

    let point = [x0, 0.15, -0.4];
    let from_fd = cartan_invariant(&fd_graph, point, &GraphOptions::default()).unwrap();
    let from_jets = cartan_invariant(&analytic, point, &GraphOptions::default()).unwrap();
    let rel = (from_fd.j_star - from_jets.j_star).norm() / from_jets.j_star.norm();
    assert!(
        rel <= 1e-4,
        "FD-Taylor invariant {} vs jet invariant {} (rel {rel:e})",
        from_fd.j_star,
        from_jets.j_star
    );
    assert!((from_fd.levi_factor - from_jets.levi_factor).abs() < 1e-6);
}

/// Degree-6 polynomial fields evaluate to exact derivative values.
#[test]
fn kernel_polynomial_exactness() {
    let e = Expr::parse("x^3*y^2*u + 4*x*y - 7", &["x", "y", "u"]).unwrap();
    let p = [1.3f64, -0.7, 2.1];
    let bindings: HashMap<String, Jet<f64>> = [
        ("x".to_string(), Jet::variable(0, p[0], 3, 6).unwrap()),
        ("y".to_string(), Jet::variable(1, p[1], 3, 6).unwrap()),
        ("u".to_string(), Jet::variable(2, p[2], 3, 6).unwrap()),
    ]
    .into();
    let jet = e.eval_jet(&bindings, &HashMap::new()).unwrap();
    // monomial derivative oracle: d^alpha (x^a y^b u^c)
    let falling = |a: u8, k: u8, x: f64| -> f64 {
        if k > a {
            return 0.0;
        }
        let mut out = 1.0;
        for j in 0..k {
            out *= f64::from(a - j);
        }
        out * x.powi(i32::from(a - k))
    };
    for alpha in cartan_cr::jet::shape(3, 6).indices() {
        let [i, j, k] = [alpha.0[0], alpha.0[1], alpha.0[2]];
        let mut want = falling(3, i, p[0]) * falling(2, j, p[1]) * falling(1, k, p[2]);
        if k == 0 {
            want += 4.0 * falling(1, i, p[0]) * falling(1, j, p[1]);
        }
        if i == 0 && j == 0 && k == 0 {
            want -= 7.0;
        }
        let got = jet.derivative_value(alpha).unwrap();
        assert!(
            (got - want).abs() <= 1e-12 * (1.0 + want.abs()),
            "alpha {alpha:?}: {got} vs {want}"
        );
    }
}

/// Under (z, w) -> (lambda z, w) the graphed invariant must rescale by the
/// constant lambda^4 = c' cbar'^3 at corresponding points.
#[test]
fn graph_invariant_rescales_under_z_scaling() {
    let eps = 0.5;
    let lambda = 1.5f64;
    let original = GraphHypersurface::new(
        Expr::parse("sqrt(eps^2*x^2 - y^2)", &["x", "y", "u"]).unwrap(),
    )
    .with_params([("eps".to_string(), eps)].into());
    // image surface: v = sqrt(eps^2 x^2 - y^2)/lambda at (lambda x, lambda y, u)
    let image = GraphHypersurface::new(
        Expr::parse("sqrt(eps^2*x^2 - y^2)/lam", &["x", "y", "u"]).unwrap(),
    )
    .with_params([("eps".to_string(), eps), ("lam".to_string(), lambda)].into());
    for point in [[1.0, 0.1, 0.4], [2.0, -0.3, 0.0], [1.4, 0.25, -1.0]] {
        let a = cartan_invariant(&original, point, &GraphOptions::default()).unwrap();
        let b = cartan_invariant(
            &image,
            [lambda * point[0], lambda * point[1], point[2]],
            &GraphOptions::default(),
        )
        .unwrap();
        let ratio = a.j_star / b.j_star;
        assert!(
            (ratio - Complex64::new(lambda.powi(4), 0.0)).norm() <= 1e-8 * lambda.powi(4),
            "ratio {ratio} at {point:?}"
        );
    }
}

/// Shears (z, w) -> (z, w + a z) leave the graphed invariant unchanged at
/// corresponding points.
#[test]
fn graph_invariant_fixed_under_shear() {
    let eps = 0.5;
    let a = 0.4f64;
    let original = GraphHypersurface::new(
        Expr::parse("sqrt(eps^2*x^2 - y^2)", &["x", "y", "u"]).unwrap(),
    )
    .with_params([("eps".to_string(), eps)].into());
    // image graph: v~ = phi(x, y, u - a x) + a y
    let image = GraphHypersurface::new(
        Expr::parse("sqrt(eps^2*x^2 - y^2) + a*y", &["x", "y", "u"]).unwrap(),
    )
    .with_params([("eps".to_string(), eps), ("a".to_string(), a)].into());
    for point in [[1.0, 0.1, 0.4], [2.0, -0.3, 0.0], [1.4, 0.25, -1.0]] {
        let before = cartan_invariant(&original, point, &GraphOptions::default()).unwrap();
        let after = cartan_invariant(
            &image,
            [point[0], point[1], point[2] + a * point[0]],
            &GraphOptions::default(),
        )
        .unwrap();
        assert!(
            (before.j_star - after.j_star).norm() <= 1e-8 * before.j_star.norm(),
            "{} vs {} at {point:?}",
            before.j_star,
            after.j_star
        );
    }
}

/// The normalization map w' = w sqrt((1 + cos sqrt(ve))/2) carries the raw
/// tube boundary onto M'_eps; the implicit invariant is nonvanishing on both,
/// so the (empty) zero locus is preserved.
#[test]
fn implicit_zero_locus_survives_the_normalization_map() {
    let ve = 0.9f64;
    let c = ve.sqrt().cos();
    let eps = cartan_cr::eps_reparam(ve).unwrap();
    // raw boundary 2v^2 - (1-c)x^2 + (1+c)y^2 = 0 in z = u + iv, w = x + iy
    let raw = ImplicitHypersurface::new(
        Expr::parse(
            "-(z - zb)^2/2 - a*(w + wb)^2/4 - b*(w - wb)^2/4",
            &["z", "w", "zb", "wb"],
        )
        .unwrap(),
    )
    .with_params([("a".to_string(), 1.0 - c), ("b".to_string(), 1.0 + c)].into());
    let normalized = ImplicitHypersurface::new(
        Expr::parse(
            "-0.25*((z - zb)^2 + (1 + eps^2)*(w^2 + wb^2) - 2*(1 - eps^2)*w*wb)",
            &["z", "w", "zb", "wb"],
        )
        .unwrap(),
    )
    .with_params([("eps".to_string(), eps)].into());

    let q = ((1.0 + c) / 2.0).sqrt();
    let mut rng = StdRng::seed_from_u64(41);
    for _ in 0..25 {
        let x: f64 = rng.gen_range(0.5..2.5);
        let y_bound = ((1.0 - c) / (1.0 + c)).sqrt() * x;
        let y: f64 = rng.gen_range(-0.9 * y_bound..0.9 * y_bound);
        let u: f64 = rng.gen_range(-1.0..1.0);
        let v = (((1.0 - c) * x * x - (1.0 + c) * y * y) / 2.0).sqrt();
        let z = Complex64::new(u, v);
        let w = Complex64::new(x, y);
        assert!(raw.value(z, w).unwrap().norm() < 1e-12);
        let before = cartan_locus_iw(&raw, z, w, &ImplicitOptions::default()).unwrap();
        assert!(
            before.normalized_magnitude() > 1e-6,
            "umbilical candidate on the raw boundary at ({x}, {y}, {u})"
        );
        // mapped point lies on M'_eps
        let w_mapped = w * q;
        assert!(normalized.value(z, w_mapped).unwrap().norm() < 1e-12);
        let after = cartan_locus_iw(&normalized, z, w_mapped, &ImplicitOptions::default()).unwrap();
        assert!(
            after.normalized_magnitude() > 1e-6,
            "umbilical candidate on the image at ({x}, {y}, {u})"
        );
    }
}

/// arg(J) = pi + 2 arg((x + iy)/(x - iy)) on the tube v-graph.
#[test]
fn tube_phase_identity() {
    let eps = 0.5;
    let h = GraphHypersurface::new(
        Expr::parse("sqrt(eps^2*x^2 - y^2)", &["x", "y", "u"]).unwrap(),
    )
    .with_params([("eps".to_string(), eps)].into());
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..50 {
        let x: f64 = rng.gen_range(0.5..3.0);
        let y: f64 = rng.gen_range(-0.9 * eps * x..0.9 * eps * x);
        let u: f64 = rng.gen_range(-1.0..1.0);
        let r = cartan_invariant(&h, [x, y, u], &GraphOptions::default()).unwrap();
        let z = Complex64::new(x, y);
        let want = std::f64::consts::PI + 2.0 * (z / z.conj()).arg();
        let got = r.j_star.arg();
        let mut diff = (got - want) % (2.0 * std::f64::consts::PI);
        if diff > std::f64::consts::PI {
            diff -= 2.0 * std::f64::consts::PI;
        }
        if diff < -std::f64::consts::PI {
            diff += 2.0 * std::f64::consts::PI;
        }
        assert!(diff.abs() <= 1e-8, "phase off by {diff} at ({x}, {y}, {u})");
    }
}

/// Both engines agree the round-sphere tube boundary carries a nonvanishing
/// invariant. The two formulas are validated against each other here; this is
/// the classification the scanner reports.
#[test]
fn sphere_tube_engines_agree_and_do_not_vanish() {
    let entry = build_model("sphere-tube", &HashMap::new()).unwrap();
    let graph = entry.chart("graph").unwrap();
    let implicit = entry.chart("implicit").unwrap();
    let mut rng = StdRng::seed_from_u64(23);
    let mut n = 0;
    while n < 50 {
        let coords: Vec<f64> = graph
            .default_ranges
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..hi))
            .collect();
        if !graph.admissible(&coords).unwrap() {
            continue;
        }
        n += 1;
        let g = cartan_cr::eval_chart_point(graph, &coords).unwrap();
        let i = cartan_cr::eval_chart_point(implicit, &coords).unwrap();
        assert!(
            g.normalized > 1e-3,
            "graph engine near-zero {:.3e} at {coords:?}",
            g.normalized
        );
        assert!(
            i.normalized > 1e-3,
            "implicit engine near-zero {:.3e} at {coords:?}",
            i.normalized
        );
    }
    let report = cross_check(&entry, 50, 7, 1e-7).unwrap();
    assert_eq!(report.n_agree, report.n_samples);
    assert_eq!(report.both_nonzero, report.n_samples);
}

/// Regression guard: a synthetic model whose graph chart is flat but whose
/// implicit chart is the curved tube must be flagged as disagreeing, not
/// silently averaged away.
#[test]
fn cross_check_flags_synthetic_disagreement() {
    let tube = build_model("hyperbolic-tube", &[("eps".to_string(), 0.5)].into()).unwrap();
    let implicit = tube.chart("implicit").unwrap().clone();
    let flat = Chart {
        name: "graph".to_string(),
        coords: implicit.coords.clone(),
        default_ranges: implicit.default_ranges.clone(),
        surface: ChartSurface::Graph(GraphHypersurface::new(
            Expr::parse("x^2 + y^2", &["x", "y", "u"]).unwrap(),
        )),
        notes: String::new(),
    };
    let synthetic = ModelEntry {
        id: "synthetic-disagreement".to_string(),
        kind: ModelKind::Both,
        params: HashMap::new(),
        charts: vec![flat, implicit],
        notes: String::new(),
        level: LevelConvention::None,
    };
    let report = cross_check(&synthetic, 30, 0, 1e-7).unwrap();
    assert_eq!(report.n_agree, 0, "every sample should disagree");
    assert_eq!(report.disagreements.len(), 30);
    for d in &report.disagreements {
        assert!(d.graph_zero && !d.implicit_zero);
    }
}

/// The y-graph value is independent of the free chart coordinate (the
/// original u direction), as rigidity demands.
#[test]
fn y_graph_invariant_is_rigid() {
    let entry = build_model("hyperbolic-tube", &[("eps".to_string(), 0.5)].into()).unwrap();
    let chart = entry.chart("y-graph").unwrap();
    let base = cartan_cr::eval_chart_point(chart, &[0.0, 0.1, 1.2]).unwrap();
    for x_free in [-2.0, 0.7, 3.5] {
        let other = cartan_cr::eval_chart_point(chart, &[x_free, 0.1, 1.2]).unwrap();
        assert!((other.inv - base.inv).norm() <= 1e-9 * base.inv.norm());
    }
}

/// MultiIndex bookkeeping invariant from the kernel contract: coefficients
/// store derivative/alpha!.
#[test]
fn derivative_value_definition() {
    let x = Jet::<f64>::variable(0, 0.0, 2, 4).unwrap();
    let y = Jet::<f64>::variable(1, 0.0, 2, 4).unwrap();
    let f = &(&(&x * &x) * &(&y * &y)) + &x; // x^2 y^2 + x
    let alpha = MultiIndex(vec![2, 2]);
    assert_eq!(f.coefficient(&alpha).unwrap(), 1.0);
    assert_eq!(f.derivative_value(&alpha).unwrap(), 4.0);
}
