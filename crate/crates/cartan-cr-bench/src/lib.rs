//! Shared fixtures for the criterion benches.

use std::collections::HashMap;

use cartan_cr::{build_model, ModelEntry};

pub fn hyperbolic_tube_fixture() -> ModelEntry {
    build_model("hyperbolic-tube", &[("eps".to_string(), 0.5)].into()).expect("gallery model")
}

pub fn sphere_tube_fixture() -> ModelEntry {
    build_model("sphere-tube", &HashMap::new()).expect("gallery model")
}
