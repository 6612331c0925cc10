//! Genuine tripartite entanglement tests built on the three-body
//! correlation tensor.
//!
//! * `T1` ([`frobenius_criterion`]): `‖T123‖ > sqrt(8(d-1)(d²-1)/d³)`.
//! * `T2` ([`kyfan_criterion`]): the average Ky Fan k-norm of the three
//!   matricizations exceeds `(2√2/3)(2√k+1)((d-1)/d)sqrt((d+1)/d)`.
//! * `T3` ([`concurrence_bound`]): `C_GE ≥ max(‖T123‖/(2√2) - ((d-1)/d)sqrt((d+1)/d), 0)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bloch::{frobenius_t123, matricize, CorrelationTensor, Matricization, Pivot};
use crate::error::{Error, Result};
use crate::states::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Criterion {
    #[serde(rename = "T1")]
    Frobenius,
    #[serde(rename = "T2")]
    KyFan,
    #[serde(rename = "T3")]
    Concurrence,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [
        Criterion::Frobenius,
        Criterion::KyFan,
        Criterion::Concurrence,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Criterion::Frobenius => "T1",
            Criterion::KyFan => "T2",
            Criterion::Concurrence => "T3",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T1" => Ok(Criterion::Frobenius),
            "T2" => Ok(Criterion::KyFan),
            "T3" => Ok(Criterion::Concurrence),
            _ => Err(Error::InvalidConfig(format!("unknown criterion `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub detected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concurrence_lower_bound: Option<f64>,
}

impl CriterionReport {
    fn new(criterion: Criterion, d: usize, k: Option<usize>, value: f64, bound: f64) -> Self {
        let margin = value - bound;
        let concurrence_lower_bound = match criterion {
            Criterion::Concurrence => Some(margin.max(0.0)),
            _ => None,
        };
        Self {
            criterion,
            d,
            k,
            value,
            bound,
            margin,
            detected: margin > 0.0,
            concurrence_lower_bound,
        }
    }

    /// Column label used in sweep output: `T1`, `T2_k4`, `T3`.
    pub fn label(&self) -> String {
        match self.k {
            Some(k) => format!("{}_k{k}", self.criterion),
            None => self.criterion.to_string(),
        }
    }
}

/// Sum of the `k` largest entries of a non-increasing list.
pub fn kyfan_from_singular_values(singular_values: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > singular_values.len() {
        return Err(Error::KyFanOrder {
            k,
            max: singular_values.len(),
        });
    }
    Ok(singular_values[..k].iter().sum())
}

pub fn kyfan_norm(m: &Matricization, k: usize) -> Result<f64> {
    kyfan_from_singular_values(&m.singular_values(), k)
}

/// `sqrt(8(d-1)(d²-1)/d³)`.
pub fn frobenius_bound(d: usize) -> f64 {
    let d = d as f64;
    (8.0 * (d - 1.0) * (d * d - 1.0) / (d * d * d)).sqrt()
}

/// `(2√2/3)(2√k+1)((d-1)/d)sqrt((d+1)/d)`.
pub fn kyfan_bound(d: usize, k: usize) -> f64 {
    2.0 * 2f64.sqrt() / 3.0 * (2.0 * (k as f64).sqrt() + 1.0) * concurrence_offset(d)
}

/// `((d-1)/d)sqrt((d+1)/d)`, the offset subtracted in the concurrence bound.
pub fn concurrence_offset(d: usize) -> f64 {
    let d = d as f64;
    (d - 1.0) / d * ((d + 1.0) / d).sqrt()
}

/// Singular values of all three matricizations, computed once and reused
/// for every Ky Fan order.
#[derive(Debug, Clone, PartialEq)]
pub struct KyFanProfile {
    d: usize,
    singular_values: [Vec<f64>; 3],
}

impl KyFanProfile {
    pub fn new(t: &CorrelationTensor) -> Self {
        let singular_values = Pivot::ALL.map(|p| matricize(t, p).singular_values());
        Self {
            d: t.d(),
            singular_values,
        }
    }

    pub fn singular_values(&self, pivot: Pivot) -> &[f64] {
        match pivot {
            Pivot::First => &self.singular_values[0],
            Pivot::Second => &self.singular_values[1],
            Pivot::Third => &self.singular_values[2],
        }
    }

    pub fn max_order(&self) -> usize {
        self.d * self.d - 1
    }

    /// `M_k`: mean of the three Ky Fan k-norms.
    pub fn average(&self, k: usize) -> Result<f64> {
        let mut acc = 0.0;
        for sv in &self.singular_values {
            acc += kyfan_from_singular_values(sv, k)?;
        }
        Ok(acc / 3.0)
    }

    pub fn report(&self, k: usize) -> Result<CriterionReport> {
        let value = self.average(k)?;
        Ok(CriterionReport::new(
            Criterion::KyFan,
            self.d,
            Some(k),
            value,
            kyfan_bound(self.d, k),
        ))
    }
}

/// Average matricization norm `M_k`.
pub fn average_kyfan(t: &CorrelationTensor, k: usize) -> Result<f64> {
    KyFanProfile::new(t).average(k)
}

pub fn kyfan_criterion(t: &CorrelationTensor, k: usize) -> Result<CriterionReport> {
    KyFanProfile::new(t).report(k)
}

/// Per-order Ky Fan reports for every `k` in `1..=d²-1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KyFanSummary {
    pub reports: Vec<CriterionReport>,
    /// True when at least one order detects.
    pub detected: bool,
}

pub fn kyfan_all_orders(t: &CorrelationTensor) -> KyFanSummary {
    let profile = KyFanProfile::new(t);
    let reports: Vec<_> = (1..=profile.max_order())
        .map(|k| profile.report(k).expect("order in range"))
        .collect();
    let detected = reports.iter().any(|r| r.detected);
    KyFanSummary { reports, detected }
}

pub fn frobenius_criterion(t: &CorrelationTensor) -> CriterionReport {
    CriterionReport::new(
        Criterion::Frobenius,
        t.d(),
        None,
        frobenius_t123(t),
        frobenius_bound(t.d()),
    )
}

/// Lower bound on the GME concurrence. `value` is `‖T123‖/(2√2)`, `bound`
/// the dimension offset, and the clamped margin is the concurrence bound.
pub fn concurrence_bound(t: &CorrelationTensor) -> CriterionReport {
    CriterionReport::new(
        Criterion::Concurrence,
        t.d(),
        None,
        frobenius_t123(t) / (2.0 * 2f64.sqrt()),
        concurrence_offset(t.d()),
    )
}

/// Evaluates the requested criteria; `T2` yields one report per `k`.
pub fn evaluate(
    t: &CorrelationTensor,
    criteria: &[Criterion],
    k_values: &[usize],
) -> Result<Vec<CriterionReport>> {
    let mut out = Vec::new();
    let mut profile = None;
    for &c in criteria {
        match c {
            Criterion::Frobenius => out.push(frobenius_criterion(t)),
            Criterion::Concurrence => out.push(concurrence_bound(t)),
            Criterion::KyFan => {
                let profile = profile.get_or_insert_with(|| KyFanProfile::new(t));
                for &k in k_values {
                    out.push(profile.report(k)?);
                }
            }
        }
    }
    Ok(out)
}

/// Purity threshold above which a state counts as pure.
pub const PURE_TOL: f64 = 1e-8;

/// `sqrt(min_i (1 - Tr ρ_i²))` for a pure tripartite state.
pub fn ge_concurrence_pure(state: &DensityMatrix) -> Result<f64> {
    if state.dims().len() != 3 {
        return Err(Error::InvalidShape(format!(
            "expected a tripartite state, got {:?}",
            state.dims()
        )));
    }
    let purity = state.purity();
    if purity < 1.0 - PURE_TOL {
        return Err(Error::MixedState { purity });
    }
    let mut min_linear_entropy = f64::INFINITY;
    for i in 0..3 {
        let r = state.reduced(&[i])?;
        min_linear_entropy = min_linear_entropy.min(1.0 - r.purity());
    }
    Ok(min_linear_entropy.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::correlation_tensor;
    use crate::states::{ghz_state, w_state, DensityMatrix};
    use crate::su_basis::generators;
    use crate::tensor_ops::C64;
    use approx::assert_abs_diff_eq;

    fn square(diag: &[f64]) -> Matricization {
        // a d=2 shaped tensor is 3 x 9; place diag entries on (i, i)
        let n = 3;
        let mut raw = vec![0.0; n * n * n];
        for (i, &v) in diag.iter().enumerate() {
            raw[i * n * n + i] = v;
        }
        matricize(&CorrelationTensor::from_t123(2, raw).unwrap(), Pivot::First)
    }

    #[test]
    fn kyfan_examples() {
        let id = square(&[1.0, 1.0, 1.0]);
        assert_abs_diff_eq!(kyfan_norm(&id, 2).unwrap(), 2.0, epsilon = 1e-12);
        let m = square(&[3.0, 2.0, 1.0]);
        assert_abs_diff_eq!(kyfan_norm(&m, 2).unwrap(), 5.0, epsilon = 1e-12);
        let tr: f64 = m.singular_values().iter().sum();
        assert_abs_diff_eq!(kyfan_norm(&m, 3).unwrap(), tr, epsilon = 1e-12);
        assert!(matches!(kyfan_norm(&m, 0), Err(Error::KyFanOrder { .. })));
        assert!(matches!(
            kyfan_norm(&m, 4),
            Err(Error::KyFanOrder { k: 4, max: 3 })
        ));
    }

    #[test]
    fn bound_closed_forms() {
        assert_abs_diff_eq!(kyfan_bound(4, 4), 2.5 * 2.5f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(kyfan_bound(4, 4), 3.95285, epsilon = 5e-6);
        let k4_d3 = 8.0 / 9.0 * (2.0f64 / 3.0).sqrt() * 5.0;
        assert_abs_diff_eq!(kyfan_bound(3, 4), k4_d3, epsilon = 1e-14);
        assert_abs_diff_eq!(kyfan_bound(3, 4), 3.628874, epsilon = 5e-7);
        let k8_d3 = 8.0 / 9.0 * (2.0f64 / 3.0).sqrt() * (1.0 + 4.0 * 2f64.sqrt());
        assert_abs_diff_eq!(kyfan_bound(3, 8), k8_d3, epsilon = 1e-14);
        assert_abs_diff_eq!(
            frobenius_bound(3),
            8.0 / 3.0 * (2.0f64 / 3.0).sqrt(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(frobenius_bound(3), 2.17732, epsilon = 5e-6);
        assert_abs_diff_eq!(frobenius_bound(4), 1.5 * 2.5f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(frobenius_bound(4), 2.37171, epsilon = 5e-6);
        assert_abs_diff_eq!(concurrence_offset(2), 0.5 * 1.5f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(
            concurrence_offset(3),
            2.0 / 3.0 * (4.0f64 / 3.0).sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn maximally_mixed_is_never_detected() {
        for d in [2, 3] {
            let s = DensityMatrix::maximally_mixed(vec![d, d, d]).unwrap();
            let t = correlation_tensor(&s, &generators(d).unwrap()).unwrap();
            let summary = kyfan_all_orders(&t);
            assert!(!summary.detected);
            assert!(summary.reports.iter().all(|r| r.value == 0.0));
            assert!(!frobenius_criterion(&t).detected);
            let c = concurrence_bound(&t);
            assert!(!c.detected);
            assert_eq!(c.concurrence_lower_bound, Some(0.0));
        }
    }

    #[test]
    fn margin_zero_is_not_detected() {
        let r = CriterionReport::new(Criterion::Frobenius, 2, None, 1.0, 1.0);
        assert!(!r.detected);
    }

    #[test]
    fn evaluate_expands_kyfan_orders() {
        let t = correlation_tensor(&ghz_state(), &generators(2).unwrap()).unwrap();
        let all = evaluate(&t, &Criterion::ALL, &[1, 2, 3]).unwrap();
        let labels: Vec<_> = all.iter().map(|r| r.label()).collect();
        assert_eq!(labels, ["T1", "T2_k1", "T2_k2", "T2_k3", "T3"]);
        assert!(evaluate(&t, &[Criterion::KyFan], &[9]).is_err());
    }

    #[test]
    fn pure_concurrence_examples() {
        assert_abs_diff_eq!(
            ge_concurrence_pure(&ghz_state()).unwrap(),
            0.5f64.sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            ge_concurrence_pure(&w_state()).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-12
        );
        let mut v = vec![C64::new(0.0, 0.0); 8];
        v[0b101] = C64::new(1.0, 0.0);
        let product = DensityMatrix::pure(&v, vec![2, 2, 2]).unwrap();
        assert_abs_diff_eq!(ge_concurrence_pure(&product).unwrap(), 0.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2, 2]).unwrap();
        assert!(matches!(
            ge_concurrence_pure(&mixed),
            Err(Error::MixedState { .. })
        ));
    }

    #[test]
    fn criterion_tags_round_trip() {
        for c in Criterion::ALL {
            assert_eq!(c.tag().parse::<Criterion>().unwrap(), c);
        }
        assert!("T4".parse::<Criterion>().is_err());
    }
}
