//! Report rows shared by the exact and numeric locality tests.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::gaussian::ExactScalar;
use crate::models::RFunctional;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestId {
    /// `∂λ∂ₜⁿ∫x₁²ρ₁` at `t = 0`.
    Test1,
    /// `∂λ∂ₜⁿ` of a general functional of `ρ₁`.
    Test2,
    /// `∂λ∂ₜⁿ∫x₁ρ₁` at `t = 0`.
    Test3,
    /// `∂λ∂ₜⁿ∫e^{ikx}|Ψ|²` at `t = 0`.
    Test4,
    /// The exact second-moment pipeline.
    Appendix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Symbolic,
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SignalValue {
    Exact { value: ExactScalar },
    Numeric { value: f64, error: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignalReport {
    pub test: TestId,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    pub point: BTreeMap<String, f64>,
    pub value: SignalValue,
    pub provenance: Provenance,
}

impl SignalReport {
    pub fn exact(test: TestId, n: usize, point: BTreeMap<String, f64>, value: ExactScalar) -> Self {
        SignalReport { test, n, k: None, point, value: SignalValue::Exact { value }, provenance: Provenance::Symbolic }
    }

    pub fn numeric(test: TestId, n: usize, point: BTreeMap<String, f64>, value: f64, error: f64) -> Self {
        SignalReport {
            test,
            n,
            k: None,
            point,
            value: SignalValue::Numeric { value, error },
            provenance: Provenance::Numeric,
        }
    }

    /// Value as a float (exact values are rounded).
    pub fn value_f64(&self) -> f64 {
        match &self.value {
            SignalValue::Exact { value } => value.to_f64(),
            SignalValue::Numeric { value, .. } => *value,
        }
    }

    /// Error bar; zero for exact values.
    pub fn error(&self) -> f64 {
        match &self.value {
            SignalValue::Exact { .. } => 0.0,
            SignalValue::Numeric { error, .. } => *error,
        }
    }

    /// Numeric value whose error bar exceeds half its magnitude.
    pub fn is_inconclusive(&self) -> bool {
        match &self.value {
            SignalValue::Exact { .. } => false,
            SignalValue::Numeric { value, error } => *error > 0.5 * value.abs(),
        }
    }
}

/// Named parameters of a nonlinearity, for report rows.
pub fn functional_point(f: &RFunctional) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    match f {
        RFunctional::None => {}
        RFunctional::Logarithmic { b } => {
            m.insert("b".to_string(), *b);
        }
        RFunctional::DoebnerGoldin(p) => {
            m.insert("D".to_string(), p.d);
            for (i, c) in p.c.iter().enumerate() {
                m.insert(format!("c{}", i + 1), *c);
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inconclusive_flag() {
        let r = SignalReport::numeric(TestId::Test1, 3, BTreeMap::new(), 1.0, 0.6);
        assert!(r.is_inconclusive());
        let r = SignalReport::numeric(TestId::Test1, 3, BTreeMap::new(), 1.0, 0.1);
        assert!(!r.is_inconclusive());
        let r = SignalReport::exact(TestId::Appendix, 3, BTreeMap::new(), ExactScalar::from_int(0));
        assert!(!r.is_inconclusive());
        assert_eq!(r.error(), 0.0);
    }

    #[test]
    fn serializes_with_tags() {
        let r = SignalReport::exact(TestId::Appendix, 3, functional_point(&RFunctional::Logarithmic { b: 1.0 }), ExactScalar::from_int(32));
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["test"], "appendix");
        assert_eq!(v["value"]["kind"], "exact");
        assert_eq!(v["value"]["value"], "32");
        assert_eq!(v["provenance"], "symbolic");
        assert_eq!(v["point"]["b"], 1.0);
    }
}
