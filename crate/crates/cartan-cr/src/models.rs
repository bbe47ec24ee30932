//! The hypersurface gallery: Grauert-tube boundaries around the hyperbolic
//! half-plane, the round-sphere quadric, flat tori from the extrinsic view,
//! and product-metric tubes, together with the distance formulas, the
//! varepsilon -> epsilon reparametrization and the plurisubharmonicity check.
//!
//! Conventions differ by family and are recorded per model: intrinsic tubes
//! use the level rho = eps, extrinsic product tubes use rho < eps^2.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::graph::GraphHypersurface;
use crate::implicit::ImplicitHypersurface;
use crate::jet::Jet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("unknown parameter `{0}` for model `{1}`")]
    UnknownParam(String, String),
    #[error("parameter `{name}` = {value} outside admissible range {range}")]
    ParamRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("hyperbolic distance requires y > 0 (got y = {0})")]
    HyperbolicHalfPlane(f64),
    #[error("point outside the security cone 2y^2 + v^2 <= x^2 (x > 0)")]
    SecurityCone,
    #[error("psh expression must use variables {{x,y,u,v}} or {{z,w,zb,wb}}, found {0:?}")]
    MixedPshVariables(Vec<String>),
    #[error("complex Hessian is not hermitian within tolerance (residue {0:.3e})")]
    NotHermitian(f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Which engines a model feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Graph,
    Implicit,
    Both,
}

/// Level-set convention of the tube family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelConvention {
    /// Intrinsic tubes: boundary at rho = eps.
    RhoEqualsEps,
    /// Extrinsic tubes: boundary at rho = eps^2.
    RhoEqualsEpsSquared,
    /// Flat models with no tube level.
    None,
}

impl LevelConvention {
    pub fn describe(self) -> &'static str {
        match self {
            LevelConvention::RhoEqualsEps => "rho = eps (intrinsic)",
            LevelConvention::RhoEqualsEpsSquared => "rho = eps^2 (extrinsic)",
            LevelConvention::None => "none",
        }
    }
}

/// One chart of a model: scan coordinates, their default sampling box, and
/// the surface handed to an engine.
#[derive(Debug, Clone)]
pub struct Chart {
    pub name: String,
    pub coords: Vec<String>,
    pub default_ranges: Vec<(f64, f64)>,
    pub surface: ChartSurface,
    pub notes: String,
}

#[derive(Debug, Clone)]
pub enum ChartSurface {
    Graph(GraphHypersurface),
    Implicit {
        surface: ImplicitHypersurface,
        /// (Re z, Im z, Re w, Im w) as expressions of the chart coordinates;
        /// maps scan coordinates onto surface points.
        embed: [Expr; 4],
        /// Admissibility predicates in chart coordinates (all must be > 0).
        domain: Vec<Expr>,
        params: HashMap<String, f64>,
    },
}

impl Chart {
    pub fn is_graph(&self) -> bool {
        matches!(self.surface, ChartSurface::Graph(_))
    }

    pub fn admissible(&self, coords: &[f64]) -> Result<bool, EvalError> {
        match &self.surface {
            ChartSurface::Graph(g) => g.admissible([coords[0], coords[1], coords[2]]),
            ChartSurface::Implicit { domain, params, .. } => {
                let point = self.coord_map(coords);
                for predicate in domain {
                    if predicate.eval_scalar(&point, params)? <= 0.0 {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    fn coord_map(&self, coords: &[f64]) -> HashMap<String, f64> {
        self.coords
            .iter()
            .cloned()
            .zip(coords.iter().copied())
            .collect()
    }

    /// Ambient point (z, w) for implicit charts.
    pub fn embed_point(&self, coords: &[f64]) -> Result<(Complex64, Complex64), EvalError> {
        match &self.surface {
            ChartSurface::Graph(g) => g.embed([coords[0], coords[1], coords[2]]),
            ChartSurface::Implicit { embed, params, .. } => {
                let point = self.coord_map(coords);
                let mut parts = [0.0; 4];
                for (slot, e) in parts.iter_mut().zip(embed.iter()) {
                    *slot = e.eval_scalar(&point, params)?;
                }
                Ok((
                    Complex64::new(parts[0], parts[1]),
                    Complex64::new(parts[2], parts[3]),
                ))
            }
        }
    }
}

/// A gallery model: parameter values, charts, provenance notes.
#[derive(Debug, Clone)]
pub struct ModelEntry {
    pub id: String,
    pub kind: ModelKind,
    pub params: HashMap<String, f64>,
    pub charts: Vec<Chart>,
    pub notes: String,
    pub level: LevelConvention,
}

impl ModelEntry {
    pub fn chart(&self, name: &str) -> Option<&Chart> {
        self.charts.iter().find(|c| c.name == name)
    }

    pub fn graph_chart(&self) -> Option<&Chart> {
        self.charts.iter().find(|c| c.is_graph())
    }

    pub fn implicit_chart(&self) -> Option<&Chart> {
        self.charts.iter().find(|c| !c.is_graph())
    }
}

fn parse_graph(text: &str) -> Expr {
    Expr::parse(text, &["x", "y", "u"]).expect("gallery graph expression")
}

fn parse_coords(text: &str, coords: &[&str]) -> Expr {
    Expr::parse(text, coords).expect("gallery coordinate expression")
}

fn parse_implicit(text: &str) -> Expr {
    Expr::parse(text, &["z", "w", "zb", "wb"]).expect("gallery defining function")
}

// ---- reparametrization and potentials ---------------------------------------

/// epsilon = sqrt((1 - cos sqrt(varepsilon))/(1 + cos sqrt(varepsilon))),
/// a strictly increasing real-analytic diffeomorphism (0, (pi/2)^2) -> (0, 1).
pub fn eps_reparam(varepsilon: f64) -> Result<f64, ModelError> {
    if !(varepsilon > 0.0 && varepsilon < (PI / 2.0) * (PI / 2.0)) {
        return Err(ModelError::ParamRange {
            name: "varepsilon",
            value: varepsilon,
            range: "(0, (pi/2)^2)",
        });
    }
    let c = varepsilon.sqrt().cos();
    Ok(((1.0 - c) / (1.0 + c)).sqrt())
}

/// Kaehler potential of the Grauert tube around the Poincare half-plane:
/// rho = (arccos(1 - 2 (y^2 + v^2)/(x^2 + y^2)))^2 on the security cone
/// {x > 0, 2y^2 + v^2 <= x^2}.
pub fn rho_hyperbolic(u: f64, v: f64, x: f64, y: f64) -> Result<f64, ModelError> {
    let _ = u; // the potential is independent of u
    if !(x > 0.0 && 2.0 * y * y + v * v <= x * x) {
        return Err(ModelError::SecurityCone);
    }
    let t = 1.0 - 2.0 * (y * y + v * v) / (x * x + y * y);
    Ok(t.clamp(-1.0, 1.0).acos().powi(2))
}

/// The three component metrics for product tubes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Flat,
    Elliptic,
    Hyperbolic,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Flat => "flat",
            MetricKind::Elliptic => "ell",
            MetricKind::Hyperbolic => "hyp",
        }
    }

    pub fn from_name(name: &str) -> Option<MetricKind> {
        match name {
            "flat" => Some(MetricKind::Flat),
            "elliptic" | "ell" => Some(MetricKind::Elliptic),
            "hyperbolic" | "hyp" => Some(MetricKind::Hyperbolic),
            _ => None,
        }
    }
}

/// Distance from (x, y) to the totally real set of the model plane:
/// flat |y|; elliptic arccos(sqrt(1+x^2)/sqrt(1+x^2+y^2)); hyperbolic
/// arccosh(sqrt(x^2+y^2)/y) on the upper half plane.
pub fn distance_to_real_set(kind: MetricKind, x: f64, y: f64) -> Result<f64, ModelError> {
    match kind {
        MetricKind::Flat => Ok(y.abs()),
        MetricKind::Elliptic => {
            let c = (1.0 + x * x).sqrt() / (1.0 + x * x + y * y).sqrt();
            Ok(c.clamp(-1.0, 1.0).acos())
        }
        MetricKind::Hyperbolic => {
            if y <= 0.0 {
                return Err(ModelError::HyperbolicHalfPlane(y));
            }
            Ok(((x * x + y * y).sqrt() / y).max(1.0).acosh())
        }
    }
}

// ---- gallery constructors ----------------------------------------------------

/// The flat model v = x^2 + y^2 (everywhere CR-umbilical).
pub fn heisenberg() -> ModelEntry {
    ModelEntry {
        id: "heisenberg".to_string(),
        kind: ModelKind::Graph,
        params: HashMap::new(),
        charts: vec![Chart {
            name: "graph".to_string(),
            coords: vec!["x".into(), "y".into(), "u".into()],
            default_ranges: vec![(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)],
            surface: ChartSurface::Graph(GraphHypersurface::new(parse_graph("x^2 + y^2"))),
            notes: "flat model; the invariant vanishes identically".to_string(),
        }],
        notes: "Heisenberg-sphere graph v = x^2 + y^2".to_string(),
        level: LevelConvention::None,
    }
}

/// The unit sphere |z|^2 + |w|^2 = 1, parameterized away from |w| <= 0.1.
pub fn unit_sphere() -> ModelEntry {
    let coords = ["t1", "t2", "t3"];
    let embed = [
        parse_coords("sin(t1)*cos(t2)", &coords),
        parse_coords("sin(t1)*sin(t2)", &coords),
        parse_coords("cos(t1)*cos(t3)", &coords),
        parse_coords("cos(t1)*sin(t3)", &coords),
    ];
    ModelEntry {
        id: "sphere".to_string(),
        kind: ModelKind::Implicit,
        params: HashMap::new(),
        charts: vec![Chart {
            name: "implicit".to_string(),
            coords: coords.iter().map(|s| s.to_string()).collect(),
            default_ranges: vec![(0.0, 1.44), (0.0, 2.0 * PI), (0.0, 2.0 * PI)],
            surface: ChartSurface::Implicit {
                surface: ImplicitHypersurface::new(parse_implicit("z*zb + w*wb - 1")),
                embed,
                domain: vec![parse_coords("cos(t1)^2 - 0.01", &coords)],
                params: HashMap::new(),
            },
            notes: "z = sin(t1) e^{i t2}, w = cos(t1) e^{i t3}; |w| > 0.1".to_string(),
        }],
        notes: "unit sphere in C^2; everywhere CR-umbilical (h(F) = 0)".to_string(),
        level: LevelConvention::None,
    }
}

/// Grauert tube boundary around the Poincare half-plane, in the normalized
/// coordinates of the model M'_eps: v^2 = eps^2 x^2 - y^2 with 0 < eps < 1.
/// Accepts the normalized eps directly.
pub fn hyperbolic_tube_eps(eps: f64) -> Result<ModelEntry, ModelError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(ModelError::ParamRange {
            name: "eps",
            value: eps,
            range: "(0, 1)",
        });
    }
    let params: HashMap<String, f64> = [("eps".to_string(), eps)].into();
    let margin = "1e-9";

    let v_graph = Chart {
        name: "v-graph".to_string(),
        coords: vec!["x".into(), "y".into(), "u".into()],
        default_ranges: vec![(0.5, 3.0), (-0.45 * eps, 0.45 * eps), (-1.0, 1.0)],
        surface: ChartSurface::Graph(
            GraphHypersurface::new(parse_graph("sqrt(eps^2*x^2 - y^2)"))
                .with_params(params.clone())
                .with_domain(vec![
                    parse_graph("x - 1e-9"),
                    parse_graph(&format!("eps^2*x^2 - y^2 - {margin}")),
                ]),
        ),
        notes: "chart v = sqrt(eps^2 x^2 - y^2) on {x > 0}".to_string(),
    };

    // y-graph chart after swapping the two complex coordinates: the chart's
    // (x, y, u) are the original (u, v, x), and the graph reads
    // v_chart = sqrt(eps^2 u^2 - y^2).
    let y_graph = Chart {
        name: "y-graph".to_string(),
        coords: vec!["x".into(), "y".into(), "u".into()],
        default_ranges: vec![(-1.0, 1.0), (-0.45 * eps, 0.45 * eps), (0.5, 3.0)],
        surface: ChartSurface::Graph(
            GraphHypersurface::new(parse_graph("sqrt(eps^2*u^2 - y^2)"))
                .with_params(params.clone())
                .with_domain(vec![
                    parse_graph("u - 1e-9"),
                    parse_graph(&format!("eps^2*u^2 - y^2 - {margin}")),
                ]),
        ),
        notes: "coordinate-swapped chart y = sqrt(eps^2 x^2 - v^2); chart (x, y, u) \
                are the original (u, v, x)"
            .to_string(),
    };

    // Implicit defining function in the swapped convention z = u + iv,
    // w = x + iy. Stored as v^2 - eps^2 x^2 + y^2 itself, i.e. -1/4 of the
    // expanded quadric, so invariant values match the reference closed form;
    // the zero locus is identical.
    let coords = ["x", "y", "u"];
    let implicit = Chart {
        name: "implicit".to_string(),
        coords: coords.iter().map(|s| s.to_string()).collect(),
        default_ranges: vec![(0.5, 3.0), (-0.45 * eps, 0.45 * eps), (-1.0, 1.0)],
        surface: ChartSurface::Implicit {
            surface: ImplicitHypersurface::new(parse_implicit(
                "-0.25*((z - zb)^2 + (1 + eps^2)*(w^2 + wb^2) - 2*(1 - eps^2)*w*wb)",
            ))
            .with_params(params.clone()),
            embed: [
                parse_coords("u", &coords),
                parse_coords("sqrt(eps^2*x^2 - y^2)", &coords),
                parse_coords("x", &coords),
                parse_coords("y", &coords),
            ],
            domain: vec![
                parse_coords("x - 1e-9", &coords),
                parse_coords(&format!("eps^2*x^2 - y^2 - {margin}"), &coords),
            ],
            params: params.clone(),
        },
        notes: "z = u + iv, w = x + iy; F stored as v^2 - eps^2 x^2 + y^2 \
                (-1/4 of the expanded quadric)"
            .to_string(),
    };

    Ok(ModelEntry {
        id: "hyperbolic-tube".to_string(),
        kind: ModelKind::Both,
        params,
        charts: vec![v_graph, y_graph, implicit],
        notes: "normalized boundary M'_eps: v^2 - eps^2 x^2 + y^2 = 0, x > 0; \
                eps = sqrt((1 - cos sqrt(ve))/(1 + cos sqrt(ve))) reparametrizes \
                the intrinsic radius ve"
            .to_string(),
        level: LevelConvention::RhoEqualsEps,
    })
}

/// Grauert tube boundary of intrinsic radius `varepsilon`; converts through
/// `eps_reparam`.
pub fn hyperbolic_tube(varepsilon: f64) -> Result<ModelEntry, ModelError> {
    hyperbolic_tube_eps(eps_reparam(varepsilon)?)
}

/// Extrinsic torus tubes of Example 7.4. Case 1 and 2 are graphs; case 3 is
/// implicit with F = ((z+zb)/2)^2 + ((w+wb)/2)^2 - eps^2.
pub fn torus_tube(
    case: u8,
    alpha: f64,
    beta: f64,
    eps: f64,
) -> Result<ModelEntry, ModelError> {
    if eps <= 0.0 {
        return Err(ModelError::ParamRange {
            name: "eps",
            value: eps,
            range: "(0, inf)",
        });
    }
    match case {
        1 => {
            let params: HashMap<String, f64> = [
                ("alpha".to_string(), alpha),
                ("beta".to_string(), beta),
                ("eps".to_string(), eps),
            ]
            .into();
            let radicand = "eps^2 - (alpha*x - y)^2/(alpha^2 + 1)^2";
            Ok(ModelEntry {
                id: "torus-case1".to_string(),
                kind: ModelKind::Graph,
                params: params.clone(),
                charts: vec![Chart {
                    name: "graph".to_string(),
                    coords: vec!["x".into(), "y".into(), "u".into()],
                    default_ranges: vec![(-0.3, 0.3), (-0.3, 0.3), (-1.0, 1.0)],
                    surface: ChartSurface::Graph(
                        GraphHypersurface::new(parse_graph(&format!(
                            "beta*u - (beta^2 + 1)*sqrt({radicand})"
                        )))
                        .with_params(params)
                        .with_domain(vec![parse_graph(&format!("{radicand} - 1e-9"))]),
                    ),
                    notes: "tube around the plane {y = alpha x, v = beta u}".to_string(),
                }],
                notes: "extrinsic torus tube, general position".to_string(),
                level: LevelConvention::RhoEqualsEpsSquared,
            })
        }
        2 => {
            let params: HashMap<String, f64> =
                [("beta".to_string(), beta), ("eps".to_string(), eps)].into();
            Ok(ModelEntry {
                id: "torus-case2".to_string(),
                kind: ModelKind::Graph,
                params: params.clone(),
                charts: vec![Chart {
                    name: "graph".to_string(),
                    coords: vec!["x".into(), "y".into(), "u".into()],
                    default_ranges: vec![(-0.8 * eps, 0.8 * eps), (-1.0, 1.0), (-1.0, 1.0)],
                    surface: ChartSurface::Graph(
                        GraphHypersurface::new(parse_graph(
                            "beta*u - (beta^2 + 1)*sqrt(eps^2 - x^2)",
                        ))
                        .with_params(params)
                        .with_domain(vec![parse_graph("eps^2 - x^2 - 1e-9")]),
                    ),
                    notes: "tube around the plane {x = 0, v = beta u}".to_string(),
                }],
                notes: "extrinsic torus tube, vertical first factor".to_string(),
                level: LevelConvention::RhoEqualsEpsSquared,
            })
        }
        3 => {
            let params: HashMap<String, f64> = [("eps".to_string(), eps)].into();
            let coords = ["t", "y", "v"];
            Ok(ModelEntry {
                id: "torus-case3".to_string(),
                kind: ModelKind::Implicit,
                params: params.clone(),
                charts: vec![Chart {
                    name: "implicit".to_string(),
                    coords: coords.iter().map(|s| s.to_string()).collect(),
                    default_ranges: vec![(0.15, 2.98), (-1.0, 1.0), (-1.0, 1.0)],
                    surface: ChartSurface::Implicit {
                        surface: ImplicitHypersurface::new(parse_implicit(
                            "((z + zb)/2)^2 + ((w + wb)/2)^2 - eps^2",
                        ))
                        .with_params(params.clone()),
                        embed: [
                            parse_coords("eps*cos(t)", &coords),
                            parse_coords("y", &coords),
                            parse_coords("eps*sin(t)", &coords),
                            parse_coords("v", &coords),
                        ],
                        domain: vec![parse_coords("sin(t)^2 - 1e-4", &coords)],
                        params,
                    },
                    notes: "x = eps cos t, u = eps sin t on x^2 + u^2 = eps^2; \
                            F_w = u, so sin t is kept away from 0"
                        .to_string(),
                }],
                notes: "extrinsic torus tube around {x = u = 0}, no graphing function"
                    .to_string(),
                level: LevelConvention::RhoEqualsEpsSquared,
            })
        }
        other => Err(ModelError::ParamRange {
            name: "case",
            value: f64::from(other),
            range: "1 | 2 | 3",
        }),
    }
}

/// Grauert tube boundary around the round 2-sphere, on the quadric chart
/// z3 = sqrt(1 - z1^2 - z2^2). The boundary condition
/// (Im z1)^2 + (Im z2)^2 + (Im z3)^2 = sinh^2(sqrt(eps)/2) is quadratic in
/// v = Im z2, giving an explicit graph used both as a graph chart and as the
/// embedding of the implicit chart.
pub fn sphere_tube(eps: f64) -> Result<ModelEntry, ModelError> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(ModelError::ParamRange {
            name: "eps",
            value: eps,
            range: "(0, 0.25)",
        });
    }
    let params: HashMap<String, f64> = [("eps".to_string(), eps)].into();
    // R^2 = sinh^2(sqrt(eps)/2), K = 1 + R^2 - x^2 - u^2,
    // D = (xyu)^2 - (u^2 + K)((xy)^2 + K y^2 - K R^2),
    // v = (-xyu + sqrt(D)) / (u^2 + K)
    let r2 = "sinh(sqrt(eps)/2)^2";
    let k = format!("(1 + {r2} - x^2 - u^2)");
    let d = format!("(x*y*u)^2 - (u^2 + {k})*((x*y)^2 + {k}*y^2 - {k}*{r2})");
    let v_expr = format!("(-(x*y*u) + sqrt({d}))/(u^2 + {k})");
    let domain_exprs = [
        format!("{d} - 1e-12"),
        "0.5 - x^2 - y^2 - u^2".to_string(),
    ];

    let coords = ["x", "y", "u"];
    let graph_domain: Vec<Expr> = domain_exprs.iter().map(|t| parse_graph(t)).collect();
    let implicit_domain: Vec<Expr> = domain_exprs
        .iter()
        .map(|t| parse_coords(t, &coords))
        .collect();

    let graph = Chart {
        name: "graph".to_string(),
        coords: coords.iter().map(|s| s.to_string()).collect(),
        default_ranges: vec![(-0.2, 0.2), (-0.1, 0.1), (-0.2, 0.2)],
        surface: ChartSurface::Graph(
            GraphHypersurface::new(parse_graph(&v_expr))
                .with_params(params.clone())
                .with_domain(graph_domain),
        ),
        notes: "graph of v = Im z2 solving the tube equation on the quadric chart"
            .to_string(),
    };
    let implicit = Chart {
        name: "implicit".to_string(),
        coords: coords.iter().map(|s| s.to_string()).collect(),
        default_ranges: vec![(-0.2, 0.2), (-0.1, 0.1), (-0.2, 0.2)],
        surface: ChartSurface::Implicit {
            surface: ImplicitHypersurface::new(parse_implicit(
                "z*zb + w*wb + sqrt(1 - z^2 - w^2)*sqrt(1 - zb^2 - wb^2) - cosh(sqrt(eps))",
            ))
            .with_params(params.clone()),
            embed: [
                parse_coords("x", &coords),
                parse_coords("y", &coords),
                parse_coords("u", &coords),
                parse_coords(&v_expr, &coords),
            ],
            domain: implicit_domain,
            params: params.clone(),
        },
        notes: "(z, w) = (z1, z2) on the quadric chart z3 = sqrt(1 - z1^2 - z2^2), \
                principal branch near the pole-free region"
            .to_string(),
    };

    Ok(ModelEntry {
        id: "sphere-tube".to_string(),
        kind: ModelKind::Both,
        params,
        charts: vec![graph, implicit],
        notes: "round-sphere Grauert tube boundary: |z1|^2 + |z2|^2 + |z3|^2 = cosh(sqrt(eps)) \
                on the quadric z1^2 + z2^2 + z3^2 = 1"
            .to_string(),
        level: LevelConvention::RhoEqualsEps,
    })
}

/// Product-metric tube boundaries (Table 1, with the squared-form repair:
/// the printed ell+flat and hyp+flat rows omit the square on the distance
/// term; the derivation-consistent forms square it). The ell+ell row could
/// not be re-derived and is kept as printed, flagged diagnostic-only.
pub fn product_tube(
    left: MetricKind,
    right: MetricKind,
    eps: f64,
) -> Result<ModelEntry, ModelError> {
    if eps <= 0.0 || eps > 1.0 {
        return Err(ModelError::ParamRange {
            name: "eps",
            value: eps,
            range: "(0, 1]",
        });
    }
    use MetricKind::{Elliptic, Flat, Hyperbolic};
    // canonical Table-1 ordering; rho is symmetric under swapping the factors
    let (a, b, swapped) = match (left, right) {
        (Flat, Elliptic) => (Elliptic, Flat, true),
        (Flat, Hyperbolic) => (Hyperbolic, Flat, true),
        (Hyperbolic, Elliptic) => (Elliptic, Hyperbolic, true),
        pair => (pair.0, pair.1, false),
    };
    let params: HashMap<String, f64> = [("eps".to_string(), eps)].into();
    let d_hyp_sq = "arccosh(sqrt(x^2 + y^2)/y)^2";
    let d_ell_sq = "arcsin(y/sqrt(1 + x^2 + y^2))^2";
    let h_helper = format!("sqrt(eps^2 - {d_hyp_sq})");
    let e_helper = format!("sqrt(eps^2 - {d_ell_sq})");
    // default boxes keep the first-factor distance below eps
    let (phi, domain, ranges, diagnostic_only, notes): (String, Vec<String>, _, bool, &str) =
        match (a, b) {
            (Flat, Flat) => (
                "sqrt(eps^2 - y^2)".to_string(),
                vec![format!("eps^2 - y^2 - 1e-9")],
                vec![(-1.0, 1.0), (-0.8 * eps, 0.8 * eps), (-1.0, 1.0)],
                false,
                "flat + flat: v = sqrt(eps^2 - y^2)",
            ),
            (Elliptic, Flat) => (
                format!("sqrt(eps^2 - {d_ell_sq})"),
                vec![format!("eps^2 - {d_ell_sq} - 1e-9")],
                vec![(-1.0, 1.0), (-0.7 * eps, 0.7 * eps), (-1.0, 1.0)],
                false,
                "ell + flat: v = sqrt(eps^2 - arcsin(y/sqrt(1+x^2+y^2))^2), squared-form repair",
            ),
            (Hyperbolic, Flat) => (
                "sqrt(eps^2 - arcsinh(x/y)^2)".to_string(),
                vec![
                    "y - 1e-9".to_string(),
                    format!("eps^2 - arcsinh(x/y)^2 - 1e-9"),
                ],
                vec![(-0.2 * eps, 0.2 * eps), (0.8, 2.0), (-1.0, 1.0)],
                false,
                "hyp + flat: v = sqrt(eps^2 - arcsinh(x/y)^2), squared-form repair",
            ),
            (Hyperbolic, Hyperbolic) => (
                format!("u/sinh({h_helper})"),
                vec![
                    "y - 1e-9".to_string(),
                    "x^2 - 1e-12".to_string(),
                    format!("eps^2 - {d_hyp_sq} - 1e-9"),
                    "u - 1e-9".to_string(),
                ],
                vec![(0.02, 0.2 * eps), (0.9, 2.0), (0.5, 2.0)],
                false,
                "hyp + hyp: v = u/sinh(H)",
            ),
            (Elliptic, Hyperbolic) => (
                format!("u/sinh({e_helper})"),
                vec![
                    "y^2 - 1e-12".to_string(),
                    format!("eps^2 - {d_ell_sq} - 1e-9"),
                    "u - 1e-9".to_string(),
                ],
                vec![(-1.0, 1.0), (0.02, 0.6 * eps), (0.5, 2.0)],
                false,
                "ell + hyp: v = u/sinh(E)",
            ),
            (Elliptic, Elliptic) => (
                format!("(1 + sqrt(1 - 4*(1 + u^2)*sin({e_helper})^2))/(2*sin({e_helper}))"),
                vec![
                    "y^2 - 1e-12".to_string(),
                    format!("eps^2 - {d_ell_sq} - 1e-9"),
                    format!("1 - 4*(1 + u^2)*sin({e_helper})^2 - 1e-9"),
                ],
                vec![(-0.5, 0.5), (0.02, 0.3 * eps), (-0.3, 0.3)],
                true,
                "ell + ell: kept as printed; the substitution residual is reported \
                 as a diagnostic, not asserted",
            ),
            _ => unreachable!("canonicalized above"),
        };
    let id = format!("tube-{}-{}", a.name(), b.name());
    let mut chart_notes = notes.to_string();
    if swapped {
        chart_notes.push_str("; factors swapped into Table-1 order");
    }
    Ok(ModelEntry {
        id: id.clone(),
        kind: ModelKind::Graph,
        params: params.clone(),
        charts: vec![Chart {
            name: "graph".to_string(),
            coords: vec!["x".into(), "y".into(), "u".into()],
            default_ranges: ranges,
            surface: ChartSurface::Graph(
                GraphHypersurface::new(parse_graph(&phi))
                    .with_params(params)
                    .with_domain(domain.iter().map(|t| parse_graph(t)).collect()),
            ),
            notes: chart_notes,
        }],
        notes: format!(
            "product tube rho = d_{}^2 + d_{}^2 < eps^2{}",
            a.name(),
            b.name(),
            if diagnostic_only {
                "; identity check diagnostic-only"
            } else {
                ""
            }
        ),
        level: LevelConvention::RhoEqualsEpsSquared,
    })
}

// ---- plurisubharmonicity -----------------------------------------------------

/// Complex Hessian of a potential at a point, with its eigenvalues.
#[derive(Debug, Clone)]
pub struct PshResult {
    /// [[r_zzb, r_zwb], [r_wzb, r_wwb]] (hermitian).
    pub levi_matrix: [[Complex64; 2]; 2],
    pub eigenvalues: [f64; 2],
    pub min_eigenvalue: f64,
}

/// Complex Hessian check for a potential r over {x,y,u,v} (real form with
/// z = x + iy, w = u + iv) or over {z,w,zb,wb} (polarized form). The point is
/// (x, y, u, v) in both modes.
pub fn psh_check(
    r: &Expr,
    point: [f64; 4],
    params: &HashMap<String, f64>,
) -> Result<PshResult, ModelError> {
    let vars = r.variables();
    let real_mode = vars.iter().all(|v| ["x", "y", "u", "v"].contains(&v.as_str()));
    let complex_mode = vars.iter().all(|v| ["z", "w", "zb", "wb"].contains(&v.as_str()));
    if !real_mode && !complex_mode {
        return Err(ModelError::MixedPshVariables(vars.into_iter().collect()));
    }

    let (a, b, c, d) = if real_mode {
        let names = ["x", "y", "u", "v"];
        let bindings: HashMap<String, Jet<f64>> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.to_string(), Jet::variable(i, point[i], 4, 2).expect("seed")))
            .collect();
        let jet = r.eval_jet(&bindings, params)?;
        let dd = |e: [u8; 4]| {
            jet.derivative_value(&crate::jet::MultiIndex(e.to_vec()))
                .expect("second-order index")
        };
        let r_zzb = 0.25 * (dd([2, 0, 0, 0]) + dd([0, 2, 0, 0]));
        let r_wwb = 0.25 * (dd([0, 0, 2, 0]) + dd([0, 0, 0, 2]));
        let re = 0.25 * (dd([1, 0, 1, 0]) + dd([0, 1, 0, 1]));
        let im = 0.25 * (dd([1, 0, 0, 1]) - dd([0, 1, 1, 0]));
        let r_zwb = Complex64::new(re, im);
        (
            Complex64::new(r_zzb, 0.0),
            r_zwb,
            r_zwb.conj(),
            Complex64::new(r_wwb, 0.0),
        )
    } else {
        let z = Complex64::new(point[0], point[1]);
        let w = Complex64::new(point[2], point[3]);
        let seeds = [z, w, z.conj(), w.conj()];
        let names = ["z", "w", "zb", "wb"];
        let bindings: HashMap<String, Jet<Complex64>> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.to_string(), Jet::variable(i, seeds[i], 4, 2).expect("seed")))
            .collect();
        let jet = r.eval_jet(&bindings, params)?;
        let dd = |e: [u8; 4]| {
            jet.derivative_value(&crate::jet::MultiIndex(e.to_vec()))
                .expect("second-order index")
        };
        (
            dd([1, 0, 1, 0]), // r_z zb
            dd([1, 0, 0, 1]), // r_z wb
            dd([0, 1, 1, 0]), // r_w zb
            dd([0, 1, 0, 1]), // r_w wb
        )
    };

    let scale = 1.0 + a.norm().max(d.norm()).max(b.norm());
    let residue = a.im.abs().max(d.im.abs()).max((b - c.conj()).norm());
    if residue > 1e-10 * scale {
        return Err(ModelError::NotHermitian(residue));
    }
    let off = 0.5 * (b + c.conj());
    let (ar, dr) = (a.re, d.re);
    let mid = 0.5 * (ar + dr);
    let disc = (0.25 * (ar - dr) * (ar - dr) + off.norm_sqr()).sqrt();
    let eigenvalues = [mid - disc, mid + disc];
    Ok(PshResult {
        levi_matrix: [[Complex64::new(ar, 0.0), off], [off.conj(), Complex64::new(dr, 0.0)]],
        eigenvalues,
        min_eigenvalue: eigenvalues[0],
    })
}

// ---- catalog -----------------------------------------------------------------

/// One catalog row: identifier, parameters with defaults, and a summary.
#[derive(Debug, Clone)]
pub struct ModelDescriptor {
    pub id: &'static str,
    pub kind: ModelKind,
    pub params: &'static [(&'static str, f64, &'static str)],
    pub summary: &'static str,
}

pub fn catalog() -> Vec<ModelDescriptor> {
    vec![
        ModelDescriptor {
            id: "heisenberg",
            kind: ModelKind::Graph,
            params: &[],
            summary: "flat model v = x^2 + y^2; invariant vanishes identically",
        },
        ModelDescriptor {
            id: "sphere",
            kind: ModelKind::Implicit,
            params: &[],
            summary: "unit sphere z zb + w wb = 1; everywhere CR-umbilical",
        },
        ModelDescriptor {
            id: "hyperbolic-tube",
            kind: ModelKind::Both,
            params: &[
                ("eps", 0.5, "normalized radius in (0, 1)"),
                ("varepsilon", f64::NAN, "intrinsic radius in (0, (pi/2)^2); alternative to eps"),
            ],
            summary: "hyperbolic Grauert tube boundary v^2 = eps^2 x^2 - y^2, x > 0",
        },
        ModelDescriptor {
            id: "torus-case1",
            kind: ModelKind::Graph,
            params: &[
                ("alpha", 1.0, "first-factor slope"),
                ("beta", 1.0, "second-factor slope"),
                ("eps", 0.5, "tube radius"),
            ],
            summary: "extrinsic torus tube around {y = alpha x, v = beta u}",
        },
        ModelDescriptor {
            id: "torus-case2",
            kind: ModelKind::Graph,
            params: &[("beta", 1.0, "second-factor slope"), ("eps", 0.5, "tube radius")],
            summary: "extrinsic torus tube around {x = 0, v = beta u}",
        },
        ModelDescriptor {
            id: "torus-case3",
            kind: ModelKind::Implicit,
            params: &[("eps", 0.5, "tube radius")],
            summary: "extrinsic torus tube around {x = u = 0}: x^2 + u^2 = eps^2",
        },
        ModelDescriptor {
            id: "sphere-tube",
            kind: ModelKind::Both,
            params: &[("eps", 0.1, "intrinsic radius in (0, 0.25)")],
            summary: "round-sphere Grauert tube boundary on the quadric chart",
        },
        ModelDescriptor {
            id: "tube-flat-flat",
            kind: ModelKind::Graph,
            params: &[("eps", 0.3, "tube radius")],
            summary: "product tube, flat + flat: v = sqrt(eps^2 - y^2)",
        },
        ModelDescriptor {
            id: "tube-ell-flat",
            kind: ModelKind::Graph,
            params: &[("eps", 0.3, "tube radius")],
            summary: "product tube, elliptic + flat (squared-form repair)",
        },
        ModelDescriptor {
            id: "tube-hyp-flat",
            kind: ModelKind::Graph,
            params: &[("eps", 0.3, "tube radius")],
            summary: "product tube, hyperbolic + flat (squared-form repair)",
        },
        ModelDescriptor {
            id: "tube-hyp-hyp",
            kind: ModelKind::Graph,
            params: &[("eps", 0.3, "tube radius")],
            summary: "product tube, hyperbolic + hyperbolic: v = u/sinh(H)",
        },
        ModelDescriptor {
            id: "tube-ell-hyp",
            kind: ModelKind::Graph,
            params: &[("eps", 0.3, "tube radius")],
            summary: "product tube, elliptic + hyperbolic: v = u/sinh(E)",
        },
        ModelDescriptor {
            id: "tube-ell-ell",
            kind: ModelKind::Graph,
            params: &[("eps", 0.3, "tube radius")],
            summary: "product tube, elliptic + elliptic (as printed; diagnostic-only)",
        },
    ]
}

/// Build a gallery model by id, validating parameter names against the
/// catalog and falling back to defaults.
pub fn build_model(id: &str, params: &HashMap<String, f64>) -> Result<ModelEntry, ModelError> {
    let descriptor = catalog()
        .into_iter()
        .find(|d| d.id == id)
        .ok_or_else(|| ModelError::UnknownModel(id.to_string()))?;
    for name in params.keys() {
        if !descriptor.params.iter().any(|(p, _, _)| p == name) {
            return Err(ModelError::UnknownParam(name.clone(), id.to_string()));
        }
    }
    let get = |name: &str| -> Option<f64> { params.get(name).copied() };
    let get_or = |name: &str| -> f64 {
        get(name).unwrap_or_else(|| {
            descriptor
                .params
                .iter()
                .find(|(p, _, _)| *p == name)
                .map(|(_, d, _)| *d)
                .expect("declared parameter")
        })
    };
    match id {
        "heisenberg" => Ok(heisenberg()),
        "sphere" => Ok(unit_sphere()),
        "hyperbolic-tube" => match (get("eps"), get("varepsilon")) {
            (Some(_), Some(_)) => Err(ModelError::ParamRange {
                name: "eps",
                value: get_or("eps"),
                range: "give either eps or varepsilon, not both",
            }),
            (None, Some(ve)) => hyperbolic_tube(ve),
            (eps, None) => hyperbolic_tube_eps(eps.unwrap_or(0.5)),
        },
        "torus-case1" => torus_tube(1, get_or("alpha"), get_or("beta"), get_or("eps")),
        "torus-case2" => torus_tube(2, 0.0, get_or("beta"), get_or("eps")),
        "torus-case3" => torus_tube(3, 0.0, 0.0, get_or("eps")),
        "sphere-tube" => sphere_tube(get_or("eps")),
        "tube-flat-flat" => product_tube(MetricKind::Flat, MetricKind::Flat, get_or("eps")),
        "tube-ell-flat" => product_tube(MetricKind::Elliptic, MetricKind::Flat, get_or("eps")),
        "tube-hyp-flat" => product_tube(MetricKind::Hyperbolic, MetricKind::Flat, get_or("eps")),
        "tube-hyp-hyp" => {
            product_tube(MetricKind::Hyperbolic, MetricKind::Hyperbolic, get_or("eps"))
        }
        "tube-ell-hyp" => product_tube(MetricKind::Elliptic, MetricKind::Hyperbolic, get_or("eps")),
        "tube-ell-ell" => product_tube(MetricKind::Elliptic, MetricKind::Elliptic, get_or("eps")),
        _ => unreachable!("catalog ids handled above"),
    }
}
