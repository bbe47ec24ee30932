//! Acceptance suite: every shipped guarantee as one test with a pass/fail line.
//!
//! Run with `cargo test -p cartan-cr --test acceptance -- --nocapture` to see
//! the per-criterion lines.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::time::Instant;

use cartan_cr::{
    build_model, cartan_invariant, cartan_locus_iw, cross_check, distance_to_real_set,
    eps_reparam, eval_chart_point, psh_check, scan_grid, Chart, ChartSurface, Complex64, EngineSel,
    Expr, GraphHypersurface, GraphOptions, ImplicitHypersurface, ImplicitOptions, Jet, JetFn,
    MetricKind, MultiIndex, RangeSpec, ScanConfig,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn pass(n: u32, message: &str) {
    println!("criterion {n} PASS: {message}");
}

fn rel_close(got: Complex64, want: Complex64, tol: f64) -> bool {
    (got - want).norm() <= tol * want.norm()
}

fn tube_graph(eps: f64) -> GraphHypersurface {
    GraphHypersurface::new(Expr::parse("sqrt(eps^2*x^2 - y^2)", &["x", "y", "u"]).unwrap())
        .with_params([("eps".to_string(), eps)].into())
}

fn v_graph_closed_form(eps: f64, x: f64, y: f64) -> Complex64 {
    let z = Complex64::new(x, y);
    -9.0 / 16.0 * (1.0 - eps.powi(4)) / (eps * eps * x * x - y * y).powi(2) * z * z
        / (z.conj() * z.conj())
}

#[test]
fn criterion_01_heisenberg_flatness() {
    let started = Instant::now();
    let h = GraphHypersurface::new(Expr::parse("x^2 + y^2", &["x", "y", "u"]).unwrap());
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let p = [
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        ];
        let r = cartan_invariant(&h, p, &GraphOptions::default()).unwrap();
        worst = worst.max(r.j_star.norm());
    }
    let elapsed = started.elapsed();
    assert!(worst < 1e-9, "max |J| = {worst:e}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(1, &format!("max |J| = {worst:.2e} over 200 points in {elapsed:?}"));
}

#[test]
fn criterion_02_sphere_umbilicity() {
    let sphere = ImplicitHypersurface::new(
        Expr::parse("z*zb + w*wb - 1", &["z", "w", "zb", "wb"]).unwrap(),
    );
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 200 {
        let t1: f64 = rng.gen_range(0.0..PI);
        let t2: f64 = rng.gen_range(0.0..2.0 * PI);
        let t3: f64 = rng.gen_range(0.0..2.0 * PI);
        let w_abs = t1.cos().abs();
        if w_abs <= 0.1 {
            continue;
        }
        n += 1;
        let z = Complex64::new(t1.sin() * t2.cos(), t1.sin() * t2.sin());
        let w = Complex64::new(t1.cos() * t3.cos(), t1.cos() * t3.sin());
        let r = cartan_locus_iw(&sphere, z, w, &ImplicitOptions::default()).unwrap();
        worst = worst.max(r.i_w.norm());
    }
    assert!(worst < 1e-9, "max |I_w| = {worst:e}");
    pass(2, &format!("max |I_w| = {worst:.2e} over 200 surface points"));
}

#[test]
fn criterion_03_v_graph_closed_form() {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for eps in [0.2, 0.5, 0.8] {
        let h = tube_graph(eps);
        for _ in 0..100 {
            let x: f64 = rng.gen_range(0.5..3.0);
            let y: f64 = rng.gen_range(-0.9 * eps * x..0.9 * eps * x);
            let u: f64 = rng.gen_range(-1.0..1.0);
            let r = cartan_invariant(&h, [x, y, u], &GraphOptions::default()).unwrap();
            let want = v_graph_closed_form(eps, x, y);
            let rel = (r.j_star - want).norm() / want.norm();
            worst = worst.max(rel);
            assert!(
                rel <= 1e-8,
                "eps {eps} point ({x}, {y}, {u}): got {} want {want}",
                r.j_star
            );
        }
    }
    pass(3, &format!("worst relative error {worst:.2e} over 300 points"));
}

#[test]
fn criterion_04_y_graph_closed_form() {
    // coordinate-swapped chart: phi = sqrt(eps^2 u^2 - y^2); points with the
    // original v = 0 are chart points (x_free, 0, x_original)
    let mut worst = 0.0f64;
    for eps in [0.2, 0.5, 0.8] {
        let h = GraphHypersurface::new(
            Expr::parse("sqrt(eps^2*u^2 - y^2)", &["x", "y", "u"]).unwrap(),
        )
        .with_params([("eps".to_string(), eps)].into());
        let i = Complex64::new(0.0, 1.0);
        for x in [0.5f64, 1.0, 2.0] {
            let want = 9.0 / 16.0 * (1.0 - eps * eps)
                / ((Complex64::new(eps, 0.0) + i).powi(2) * eps.powi(4) * x.powi(4));
            for x_free in [0.25, -0.8] {
                let r =
                    cartan_invariant(&h, [x_free, 0.0, x], &GraphOptions::default()).unwrap();
                let rel = (r.j_star - want).norm() / want.norm();
                worst = worst.max(rel);
                assert!(
                    rel <= 1e-8,
                    "eps {eps}, x {x}, chart x {x_free}: got {} want {want}",
                    r.j_star
                );
            }
        }
    }
    pass(4, &format!("worst relative error {worst:.2e}"));
}

#[test]
fn criterion_05_implicit_closed_form() {
    let mut rng = StdRng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for eps in [0.2, 0.5, 0.8] {
        let m = ImplicitHypersurface::new(
            Expr::parse(
                "-0.25*((z - zb)^2 + (1 + eps^2)*(w^2 + wb^2) - 2*(1 - eps^2)*w*wb)",
                &["z", "w", "zb", "wb"],
            )
            .unwrap(),
        )
        .with_params([("eps".to_string(), eps)].into());
        for _ in 0..100 {
            let x: f64 = rng.gen_range(0.2..3.0);
            let y: f64 = rng.gen_range(-0.9 * eps * x..0.9 * eps * x);
            let u: f64 = rng.gen_range(-1.0..1.0);
            let v = (eps * eps * x * x - y * y).sqrt();
            let z = Complex64::new(u, v);
            let w = Complex64::new(x, y);
            let r = cartan_locus_iw(&m, z, w, &ImplicitOptions::default()).unwrap();
            let want = 27.0 / 64.0 * eps.powi(8) * (1.0 - eps.powi(4))
                * w.conj().powi(2)
                * w.powi(6);
            let rel = (r.i_w - want).norm() / want.norm();
            worst = worst.max(rel);
            assert!(rel <= 1e-8, "eps {eps} ({x},{y},{u}): got {} want {want}", r.i_w);
        }
    }
    pass(5, &format!("worst relative error {worst:.2e} over 300 surface points"));
}

#[test]
fn criterion_06_nonvanishing_scan() {
    let started = Instant::now();
    let entry = build_model("hyperbolic-tube", &[("eps".to_string(), 0.5)].into()).unwrap();
    let cfg = ScanConfig {
        chart: "v-graph".to_string(),
        ranges: vec![
            (
                "x".to_string(),
                RangeSpec::Linspace { lo: 0.5, hi: 3.0, n: 100 },
            ),
            (
                "y".to_string(),
                RangeSpec::Linspace { lo: -1.49, hi: 1.49, n: 100 },
            ),
            ("u".to_string(), RangeSpec::Fixed(0.0)),
        ],
        engine: EngineSel::Both,
        zero_threshold: 1e-7,
        refine: false,
    };
    let out = scan_grid(&entry, &cfg).unwrap();
    let elapsed = started.elapsed();
    assert_eq!(out.summaries.len(), 2);
    for s in &out.summaries {
        assert!(s.candidates.is_empty(), "{} candidates on {}", s.candidates.len(), s.engine);
        assert!(s.n_ok > 1000, "only {} admissible points", s.n_ok);
    }
    let graph_min = out.summaries[0].min_abs.unwrap();
    assert!(graph_min > 1e-3, "min |J| = {graph_min:e}");
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    pass(
        6,
        &format!(
            "100x100 grid, both engines, zero candidates, min |J| = {graph_min:.4}, {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_07_torus_case2_closed_form() {
    // Reference: the Case-2 display J = 9 (beta^2+1)^16 eps^8 / (x^2 - eps^2)^8.
    // The engine computes the six-term bracket of the graphed invariant, the
    // same normalization that reproduces the closed forms of criteria 3 and 4.
    // The printed Case-2 display differs from that bracket by the
    // point-dependent factor (4 ell)^4 (beta^2+1)^16 (a different gauge of the
    // relative invariant), so this criterion cannot hold together with
    // criteria 3 and 4; it is asserted as stated and expected to fail.
    let eps = 0.5f64;
    let mut failures = Vec::new();
    for beta in [0.0, 1.0] {
        let h = GraphHypersurface::new(
            Expr::parse(
                "beta*u - (beta^2 + 1)*sqrt(eps^2 - x^2)",
                &["x", "y", "u"],
            )
            .unwrap(),
        )
        .with_params([("beta".to_string(), beta), ("eps".to_string(), eps)].into());
        for x in [0.1, 0.3] {
            let r = cartan_invariant(&h, [x, 0.2, -0.4], &GraphOptions::default()).unwrap();
            let want = Complex64::new(
                9.0 * (beta * beta + 1.0).powi(16) * eps.powi(8)
                    / (x * x - eps * eps).powi(8),
                0.0,
            );
            let gauge = (4.0 * r.levi_factor).powi(4) * (beta * beta + 1.0).powi(16);
            println!(
                "criterion 7 data: beta {beta} x {x}: computed J = {}, display = {}, \
                 display/computed = {:.6e}, (4 ell)^4 (beta^2+1)^16 = {:.6e}",
                r.j_star,
                want.re,
                want.re / r.j_star.re,
                gauge
            );
            if !rel_close(r.j_star, want, 1e-8) {
                failures.push((beta, x));
            }
        }
    }
    if failures.is_empty() {
        pass(7, "matches the Case-2 display");
    } else {
        println!(
            "criterion 7 FAIL: computed bracket differs from the Case-2 display by the \
             gauge factor (4 ell)^4 (beta^2+1)^16 at {failures:?}; see the data lines above"
        );
        panic!("criterion 7: Case-2 display is in a different gauge than criteria 3/4");
    }
}

#[test]
fn criterion_08_torus_cases_1_and_3_nonvanishing() {
    // Case 1: graph scans over (x, y) for all slope combinations.
    for alpha in [0.0, 1.0] {
        for beta in [0.0, 1.0] {
            let entry = build_model(
                "torus-case1",
                &[
                    ("alpha".to_string(), alpha),
                    ("beta".to_string(), beta),
                    ("eps".to_string(), 0.5),
                ]
                .into(),
            )
            .unwrap();
            let cfg = ScanConfig {
                chart: "graph".to_string(),
                ranges: vec![
                    (
                        "x".to_string(),
                        RangeSpec::Linspace { lo: -0.3, hi: 0.3, n: 12 },
                    ),
                    (
                        "y".to_string(),
                        RangeSpec::Linspace { lo: -0.3, hi: 0.3, n: 12 },
                    ),
                    ("u".to_string(), RangeSpec::Fixed(0.2)),
                ],
                engine: EngineSel::Graph,
                zero_threshold: 1e-6,
                refine: false,
            };
            let out = scan_grid(&entry, &cfg).unwrap();
            let s = &out.summaries[0];
            assert!(
                s.candidates.is_empty(),
                "alpha {alpha} beta {beta}: {} umbilical candidates",
                s.candidates.len()
            );
        }
    }
    // Case 3: implicit scan over the circle parameter and the free imaginary
    // parts.
    let entry = build_model("torus-case3", &[("eps".to_string(), 0.5)].into()).unwrap();
    let cfg = ScanConfig {
        chart: "implicit".to_string(),
        ranges: vec![
            (
                "t".to_string(),
                RangeSpec::Linspace { lo: 0.2, hi: 2.9, n: 15 },
            ),
            (
                "y".to_string(),
                RangeSpec::Linspace { lo: -0.8, hi: 0.8, n: 5 },
            ),
            (
                "v".to_string(),
                RangeSpec::Linspace { lo: -0.8, hi: 0.8, n: 5 },
            ),
        ],
        engine: EngineSel::Implicit,
        zero_threshold: 1e-6,
        refine: false,
    };
    let out = scan_grid(&entry, &cfg).unwrap();
    let s = &out.summaries[0];
    assert!(s.candidates.is_empty(), "case 3: {} candidates", s.candidates.len());
    // the case-3 invariant is the constant 27 eps^8 / 64 on the surface
    let want = 27.0 * 0.5f64.powi(8) / 64.0;
    for r in &out.records {
        if let Some(abs) = r.inv_abs {
            assert!((abs - want).abs() < 1e-10, "|I_w| = {abs} vs {want}");
        }
    }
    pass(8, "cases 1 and 3 report no umbilical candidates on admissible grids");
}

#[test]
fn criterion_09_distance_oracles() {
    let golden = |f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64| -> f64 {
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        while (b - a).abs() > 1e-8 {
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - phi * (b - a);
            d = a + phi * (b - a);
        }
        f(0.5 * (a + b))
    };
    let mut rng = StdRng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x: f64 = rng.gen_range(-2.0..2.0);
        let y: f64 = rng.gen_range(-2.0..2.0);
        let formula = distance_to_real_set(MetricKind::Elliptic, x, y).unwrap();
        let spherical = move |alpha: f64| {
            let c = (1.0 + alpha * x)
                / ((1.0 + alpha * alpha).sqrt() * (1.0 + x * x + y * y).sqrt());
            c.clamp(-1.0, 1.0).acos()
        };
        let brute = golden(&spherical, -100.0, 100.0);
        worst = worst.max((formula - brute).abs());
        assert!((formula - brute).abs() <= 1e-6, "elliptic at ({x}, {y})");
    }
    for _ in 0..100 {
        let x: f64 = rng.gen_range(-2.0..2.0);
        let y: f64 = rng.gen_range(0.2..3.0);
        let formula = distance_to_real_set(MetricKind::Hyperbolic, x, y).unwrap();
        let upper_half = move |t: f64| {
            (1.0 + (x * x + (y - t) * (y - t)) / (2.0 * y * t)).acosh()
        };
        let brute = golden(&upper_half, 1e-4, 50.0);
        worst = worst.max((formula - brute).abs());
        assert!((formula - brute).abs() <= 1e-6, "hyperbolic at ({x}, {y})");
    }
    pass(9, &format!("both distance formulas within {worst:.2e} of golden-section minima"));
}

#[test]
fn criterion_10_reparametrization() {
    let n = 1000;
    let lo = 1e-9;
    let hi = (PI / 2.0) * (PI / 2.0) - 1e-9;
    let mut prev = eps_reparam(lo).unwrap();
    for k in 1..n {
        let ve = lo + (hi - lo) * k as f64 / (n - 1) as f64;
        let cur = eps_reparam(ve).unwrap();
        assert!(cur > prev, "not strictly increasing at {ve}");
        prev = cur;
    }
    let got = eps_reparam((PI / 3.0) * (PI / 3.0)).unwrap();
    let want = 1.0 / 3.0f64.sqrt();
    assert!((got - want).abs() <= 1e-12 * want, "got {got} want {want}");
    pass(10, "strictly increasing; eps((pi/3)^2) = 1/sqrt(3) to 1e-12");
}

#[test]
fn criterion_11_plurisubharmonicity() {
    let r = Expr::parse("2*v^2 - a*x^2 + b*y^2", &["x", "y", "u", "v"]).unwrap();
    let lo = 0.01;
    let hi = (PI / 2.0) * (PI / 2.0) - 0.01;
    let mut worst = 0.0f64;
    for k in 0..20 {
        let ve = lo + (hi - lo) * k as f64 / 19.0;
        let c = ve.sqrt().cos();
        let params: HashMap<String, f64> =
            [("a".to_string(), 1.0 - c), ("b".to_string(), 1.0 + c)].into();
        let out = psh_check(&r, [0.3, -0.5, 0.9, 0.2], &params).unwrap();
        let rel = (out.min_eigenvalue - c).abs() / c;
        worst = worst.max(rel);
        assert!(rel <= 1e-9, "ve {ve}: min eig {} vs cos sqrt(ve) {c}", out.min_eigenvalue);
        assert!(out.min_eigenvalue > 0.0);
    }
    pass(11, &format!("min eigenvalue = cos(sqrt(ve)) to {worst:.2e}, all positive"));
}

#[test]
fn criterion_12_product_tube_identities() {
    let eps = 0.3f64;
    let mut rng = StdRng::seed_from_u64(12);
    let asserted = [
        (MetricKind::Flat, MetricKind::Flat),
        (MetricKind::Elliptic, MetricKind::Flat),
        (MetricKind::Hyperbolic, MetricKind::Flat),
        (MetricKind::Hyperbolic, MetricKind::Hyperbolic),
        (MetricKind::Elliptic, MetricKind::Hyperbolic),
    ];
    let rho = |left: MetricKind, right: MetricKind, x: f64, y: f64, u: f64, v: f64| -> f64 {
        let d1 = distance_to_real_set(left, x, y).unwrap();
        let d2 = distance_to_real_set(right, u, v).unwrap();
        d1 * d1 + d2 * d2
    };
    for (left, right) in asserted {
        let entry = cartan_cr::product_tube(left, right, eps).unwrap();
        let chart = entry.graph_chart().unwrap();
        let ChartSurface::Graph(g) = &chart.surface else { unreachable!() };
        let mut n = 0;
        let mut worst = 0.0f64;
        let mut attempts = 0;
        while n < 200 && attempts < 200_000 {
            attempts += 1;
            let coords: Vec<f64> = chart
                .default_ranges
                .iter()
                .map(|&(lo, hi)| rng.gen_range(lo..hi))
                .collect();
            if !chart.admissible(&coords).unwrap() {
                continue;
            }
            n += 1;
            let v = g.height([coords[0], coords[1], coords[2]]).unwrap();
            let value = rho(left, right, coords[0], coords[1], coords[2], v);
            let residual = (value - eps * eps).abs();
            worst = worst.max(residual);
            assert!(
                residual <= 1e-9,
                "{}: residual {residual:e} at {coords:?} (v = {v})",
                entry.id
            );
        }
        assert_eq!(n, 200, "{}: could not draw 200 admissible points", entry.id);
        println!("criterion 12 data: {} worst residual {worst:.2e}", entry.id);
    }
    // ell + ell is diagnostic-only (open question: the printed row does not
    // re-derive); report the residual without asserting
    let entry = cartan_cr::product_tube(MetricKind::Elliptic, MetricKind::Elliptic, eps).unwrap();
    let chart = entry.graph_chart().unwrap();
    let ChartSurface::Graph(g) = &chart.surface else { unreachable!() };
    let mut diagnostic = 0.0f64;
    let mut n = 0;
    let mut attempts = 0;
    while n < 50 && attempts < 100_000 {
        attempts += 1;
        let coords: Vec<f64> = chart
            .default_ranges
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..hi))
            .collect();
        if !chart.admissible(&coords).unwrap() {
            continue;
        }
        if let Ok(v) = g.height([coords[0], coords[1], coords[2]]) {
            n += 1;
            let value = rho(
                MetricKind::Elliptic,
                MetricKind::Elliptic,
                coords[0],
                coords[1],
                coords[2],
                v,
            );
            diagnostic = diagnostic.max((value - eps * eps).abs());
        }
    }
    println!(
        "criterion 12 diagnostic: tube-ell-ell substitution residual {diagnostic:.3e} \
         over {n} points (reported, not asserted)"
    );
    pass(12, "five product-tube graphs reproduce rho = eps^2 to 1e-9");
}

#[test]
fn criterion_13_kernel_properties() {
    let mut rng = StdRng::seed_from_u64(13);
    // jets of transcendental fields with dense coefficient spectra
    let random_jet = |rng: &mut StdRng, c0: Option<f64>| -> Jet<f64> {
        let x = Jet::<f64>::variable(0, rng.gen_range(0.4..1.2), 3, 5).unwrap();
        let y = Jet::<f64>::variable(1, rng.gen_range(0.4..1.2), 3, 5).unwrap();
        let u = Jet::<f64>::variable(2, rng.gen_range(0.4..1.2), 3, 5).unwrap();
        let mut out = &(&x.apply(JetFn::Sin).unwrap() * &y) + &u.apply(JetFn::Exp).unwrap();
        if let Some(c) = c0 {
            out = &out - &Jet::constant(out.constant_term() - c, 3, 5);
        }
        out
    };

    // ring laws and Leibniz at 1e-12
    for _ in 0..25 {
        let a = random_jet(&mut rng, None);
        let b = random_jet(&mut rng, None);
        let c = random_jet(&mut rng, None);
        let assoc_l = &(&a * &b) * &c;
        let assoc_r = &a * &(&b * &c);
        for (l, r) in assoc_l.coeffs().iter().zip(assoc_r.coeffs()) {
            assert!((l - r).abs() <= 1e-12 * (1.0 + r.abs()));
        }
        let dist_l = &a * &(&b + &c);
        let dist_r = &(&a * &b) + &(&a * &c);
        for (l, r) in dist_l.coeffs().iter().zip(dist_r.coeffs()) {
            assert!((l - r).abs() <= 1e-12 * (1.0 + r.abs()));
        }
        let leib_l = (&a * &b).partial(0).unwrap();
        let leib_r = &(&a.partial(0).unwrap() * &b.truncated(4))
            + &(&a.truncated(4) * &b.partial(0).unwrap());
        for (l, r) in leib_l.coeffs().iter().zip(leib_r.coeffs()) {
            assert!((l - r).abs() <= 1e-12 * (1.0 + r.abs()));
        }
    }
    // composition exp(log(a)) = a at 1e-10
    for _ in 0..25 {
        let c0 = rng.gen_range(0.5..3.0);
        let a = random_jet(&mut rng, Some(c0));
        let b = a.apply(JetFn::Log).unwrap().apply(JetFn::Exp).unwrap();
        for (g, w) in b.coeffs().iter().zip(a.coeffs()) {
            assert!((g - w).abs() <= 1e-10 * (1.0 + w.abs()));
        }
    }

    // finite-difference consistency on a smooth gallery-like expression
    let e = Expr::parse("sin(x)*cosh(u) + sqrt(1 + y^2)*exp(x/2)", &["x", "y", "u"]).unwrap();
    let params = HashMap::new();
    let value = |p: [f64; 3]| -> f64 {
        let vars: HashMap<String, f64> = [
            ("x".to_string(), p[0]),
            ("y".to_string(), p[1]),
            ("u".to_string(), p[2]),
        ]
        .into();
        e.eval_scalar(&vars, &params).unwrap()
    };
    let p0 = [0.3, -0.2, 0.7];
    let bindings: HashMap<String, Jet<f64>> = [
        ("x".to_string(), Jet::variable(0, p0[0], 3, 3).unwrap()),
        ("y".to_string(), Jet::variable(1, p0[1], 3, 3).unwrap()),
        ("u".to_string(), Jet::variable(2, p0[2], 3, 3).unwrap()),
    ]
    .into();
    let jet = e.eval_jet(&bindings, &params).unwrap();
    let s = 1e-5;
    for axis in 0..3 {
        let mut hi = p0;
        hi[axis] += s;
        let mut lo = p0;
        lo[axis] -= s;
        let fd1 = (value(hi) - value(lo)) / (2.0 * s);
        let mut alpha = vec![0u8; 3];
        alpha[axis] = 1;
        let d1 = jet.derivative_value(&MultiIndex(alpha.clone())).unwrap();
        assert!((d1 - fd1).abs() <= 1e-5 * (1.0 + fd1.abs()), "order 1 axis {axis}");

        let fd2 = (value(hi) - 2.0 * value(p0) + value(lo)) / (s * s);
        alpha[axis] = 2;
        let d2 = jet.derivative_value(&MultiIndex(alpha)).unwrap();
        assert!((d2 - fd2).abs() <= 1e-5 * (1.0 + fd2.abs()), "order 2 axis {axis}");
    }
    // third order via Richardson extrapolation of the 5-point stencil
    let third = |h: f64| {
        let at = |k: f64| {
            let mut p = p0;
            p[0] += k * h;
            value(p)
        };
        (at(2.0) - 2.0 * at(1.0) + 2.0 * at(-1.0) - at(-2.0)) / (2.0 * h * h * h)
    };
    let d3_fd = (4.0 * third(5e-3) - third(1e-2)) / 3.0;
    let d3 = jet
        .derivative_value(&MultiIndex(vec![3, 0, 0]))
        .unwrap();
    assert!((d3 - d3_fd).abs() <= 1e-3 * (1.0 + d3_fd.abs()), "order 3: {d3} vs {d3_fd}");
    pass(13, "ring/Leibniz/composition laws and FD consistency hold at stated tolerances");
}

#[test]
fn criterion_14_cross_engine_agreement() {
    let tube = build_model("hyperbolic-tube", &[("eps".to_string(), 0.5)].into()).unwrap();
    let report = cross_check(&tube, 100, 0, 1e-7).unwrap();
    assert_eq!(report.n_samples, 100);
    assert_eq!(
        report.n_agree, 100,
        "tube disagreements: {:?}",
        report.disagreements
    );
    assert_eq!(report.both_nonzero, 100);

    let sphere_tube = build_model("sphere-tube", &HashMap::new()).unwrap();
    let report2 = cross_check(&sphere_tube, 60, 0, 1e-7).unwrap();
    assert_eq!(report2.n_samples, 60);
    assert_eq!(
        report2.n_agree, 60,
        "sphere-tube disagreements: {:?}",
        report2.disagreements
    );
    pass(
        14,
        &format!(
            "hyperbolic tube 100/100 agree (all nonzero); sphere tube 60/60 agree \
             ({} nonzero, {} zero)",
            report2.both_nonzero, report2.both_zero
        ),
    );
}

/// The chart pairing used by criterion 14 must actually cover common points.
#[test]
fn cross_check_preconditions_hold() {
    for id in ["hyperbolic-tube", "sphere-tube"] {
        let entry = build_model(id, &HashMap::new()).unwrap();
        let graph: &Chart = entry.graph_chart().unwrap();
        let implicit: &Chart = entry.implicit_chart().unwrap();
        assert_eq!(graph.coords, implicit.coords);
        let mid: Vec<f64> = graph
            .default_ranges
            .iter()
            .map(|&(lo, hi)| 0.5 * (lo + hi))
            .collect();
        assert!(graph.admissible(&mid).unwrap());
        assert!(implicit.admissible(&mid).unwrap());
        let g = eval_chart_point(graph, &mid).unwrap();
        let i = eval_chart_point(implicit, &mid).unwrap();
        assert!(g.inv.norm().is_finite());
        assert!(i.inv.norm().is_finite());
    }
}
